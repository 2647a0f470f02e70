//! Study configuration: a single JSON document, optionally overlaid on the
//! built-in defaults of the selected study kind.

use crate::error::{HarnessError, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use subdiff::SchemeVariant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StudyKind {
    /// Manufactured 1D solution u = t^sigma sin x: temporal errors at t = 1
    /// or as t -> 0 depending on the t_finals list.
    Example1,
    Example2a,
    Example2b,
    Example2c,
    Example2d,
    /// Spatial refinement of example1 against a fine-mesh reference.
    Spatial,
    /// Truncation-bound sharpness sweep.
    Truncation,
    /// Grönwall envelope grid and propagation-matrix checks.
    Gronwall,
    /// L1/complementary weight identities (and weight CSV export).
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Implicit,
    Linearized,
}

impl From<Variant> for SchemeVariant {
    fn from(v: Variant) -> SchemeVariant {
        match v {
            Variant::Implicit => SchemeVariant::FullyImplicit,
            Variant::Linearized => SchemeVariant::NewtonLinearized,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Implicit => "implicit",
            Variant::Linearized => "linearized",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study: StudyKind,
    pub alphas: Vec<f64>,
    /// Regularity exponents (example1 / truncation only).
    pub sigmas: Vec<f64>,
    /// Time-step counts; must double strictly when rates are taken along N.
    pub ns: Vec<usize>,
    /// Interior resolutions; a list only for the spatial study.
    pub ms: Vec<usize>,
    /// Final times; more than one entry selects the t -> 0 protocol.
    pub t_finals: Vec<f64>,
    pub variant: Variant,
    /// Fine reference resolution for the spatial study (every m must divide it).
    pub m_ref: usize,
    /// Output path (CSV for studies, JSON for suites); stdout when absent.
    pub out: Option<PathBuf>,
    /// Reserved; no randomness is consumed today.
    pub seed: u64,
}

/// Partial form used for JSON overlays: any field may be omitted.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConfigOverlay {
    study: Option<StudyKind>,
    alphas: Option<Vec<f64>>,
    sigmas: Option<Vec<f64>>,
    ns: Option<Vec<usize>>,
    ms: Option<Vec<usize>>,
    t_finals: Option<Vec<f64>>,
    variant: Option<Variant>,
    m_ref: Option<usize>,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

impl StudyConfig {
    /// The defaults reproduce the reference experiment grids of each study.
    pub fn default_for(kind: StudyKind) -> StudyConfig {
        let base = StudyConfig {
            study: kind,
            alphas: vec![0.4, 0.6],
            sigmas: vec![0.4],
            ns: vec![10, 20, 40, 80, 160],
            ms: vec![1000],
            t_finals: vec![1.0],
            variant: Variant::Implicit,
            m_ref: 960,
            out: None,
            seed: 0,
        };
        match kind {
            StudyKind::Example1 => StudyConfig {
                sigmas: vec![0.1, 0.4, 0.6, 0.8, 1.2, 1.8],
                ..base
            },
            StudyKind::Example2a | StudyKind::Example2b => StudyConfig {
                alphas: vec![0.4, 0.6, 0.8],
                sigmas: vec![],
                ..base
            },
            StudyKind::Example2c | StudyKind::Example2d => StudyConfig {
                alphas: vec![0.4, 0.6, 0.8],
                sigmas: vec![],
                ms: vec![10],
                ..base
            },
            StudyKind::Spatial => StudyConfig {
                sigmas: vec![0.4, 1.2, 0.6, 0.2],
                ns: vec![1000],
                ms: vec![8, 16, 24, 32, 40],
                ..base
            },
            StudyKind::Truncation => StudyConfig {
                sigmas: vec![0.4, 0.8, 1.2, 1.8],
                ns: vec![128, 256, 512, 1024],
                ..base
            },
            StudyKind::Gronwall => StudyConfig {
                alphas: vec![0.3, 0.5, 0.8],
                sigmas: vec![],
                ns: vec![512],
                ..base
            },
            StudyKind::Kernel => StudyConfig {
                alphas: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
                sigmas: vec![],
                ns: vec![2048],
                ..base
            },
        }
    }

    /// Loads a config: defaults of `cli_study` (or of the study named in the
    /// file) overlaid with whatever the JSON document specifies.
    pub fn load(path: Option<&Path>, cli_study: Option<StudyKind>) -> Result<StudyConfig> {
        let overlay: ConfigOverlay = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| HarnessError::ConfigIo {
                    path: p.to_path_buf(),
                    reason: e.to_string(),
                })?;
                serde_json::from_str(&text).map_err(|e| HarnessError::ConfigIo {
                    path: p.to_path_buf(),
                    reason: e.to_string(),
                })?
            }
            None => ConfigOverlay::default(),
        };
        let study = cli_study
            .or(overlay.study)
            .ok_or_else(|| HarnessError::Config("no study selected (--study or config)".into()))?;
        let mut cfg = StudyConfig::default_for(study);
        if let Some(v) = overlay.alphas {
            cfg.alphas = v;
        }
        if let Some(v) = overlay.sigmas {
            cfg.sigmas = v;
        }
        if let Some(v) = overlay.ns {
            cfg.ns = v;
        }
        if let Some(v) = overlay.ms {
            cfg.ms = v;
        }
        if let Some(v) = overlay.t_finals {
            cfg.t_finals = v;
        }
        if let Some(v) = overlay.variant {
            cfg.variant = v;
        }
        if let Some(v) = overlay.m_ref {
            cfg.m_ref = v;
        }
        if overlay.out.is_some() {
            cfg.out = overlay.out;
        }
        if let Some(v) = overlay.seed {
            cfg.seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(HarnessError::Config("alpha list is empty".into()));
        }
        for &a in &self.alphas {
            if !(a > 0.0 && a < 1.0) {
                return Err(HarnessError::Config(format!("alpha {a} outside (0,1)")));
            }
        }
        if self.ns.is_empty() {
            return Err(HarnessError::Config("N list is empty".into()));
        }
        if self.ms.is_empty() {
            return Err(HarnessError::Config("M list is empty".into()));
        }
        if self.t_finals.is_empty() {
            return Err(HarnessError::Config("t_final list is empty".into()));
        }
        for &t in &self.t_finals {
            #[allow(clippy::neg_cmp_op_on_partial_ord)] // the negation also catches NaN
            if !(t > 0.0) {
                return Err(HarnessError::Config(format!("t_final {t} must be positive")));
            }
        }
        let needs_sigmas = matches!(
            self.study,
            StudyKind::Example1 | StudyKind::Spatial | StudyKind::Truncation
        );
        if needs_sigmas {
            if self.sigmas.is_empty() {
                return Err(HarnessError::Config("sigma list is empty".into()));
            }
            for &s in &self.sigmas {
                if !(s > 0.0 && s != 1.0 && s <= 2.0) {
                    return Err(HarnessError::Config(format!(
                        "sigma {s} outside (0,1) ∪ (1,2]"
                    )));
                }
            }
        }
        // rates along N need a strictly doubling ladder
        let temporal_rates = self.ns.len() > 1;
        if temporal_rates {
            for w in self.ns.windows(2) {
                if w[1] != 2 * w[0] {
                    return Err(HarnessError::Config(format!(
                        "N list must double strictly: {} -> {}",
                        w[0], w[1]
                    )));
                }
            }
        }
        if self.study == StudyKind::Spatial {
            for &m in &self.ms {
                if m < 2 || !self.m_ref.is_multiple_of(m) {
                    return Err(HarnessError::Config(format!(
                        "spatial study needs every M (got {m}) to divide m_ref = {}",
                        self.m_ref
                    )));
                }
            }
            if self.ms.windows(2).any(|w| w[1] <= w[0]) {
                return Err(HarnessError::Config("M list must increase".into()));
            }
        }
        Ok(())
    }
}
