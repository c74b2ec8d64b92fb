//! Experiment configuration: a TOML file of `key = value` lines in sections.
//!
//! ```toml
//! [model]
//! delta_sweep = [0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625]
//! beta = -1.0
//!
//! [run]
//! seed = 7
//! ```
//!
//! Every key is optional; missing keys take the defaults of
//! [`ExperimentConfig::default`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use kelab::params::DELTA_MAX;
use kelab::params::check_beta;
use kelab::{Complex64, GluingParams};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{CliError, Result};

/// Sample sizes of the individual experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleCounts {
    /// Random points per δ for the Eguchi-Hanson volume check.
    pub identity_points: usize,
    /// Random radial fields for the decomposition identity.
    pub decomposition_fields: usize,
    /// Radii per annulus in decay sweeps.
    pub decay: usize,
    /// Central-fiber samples per GH row.
    pub gh: usize,
    pub gh_neighbours: usize,
    pub lipschitz_pairs: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        Self { identity_points: 200, decomposition_fields: 100, decay: 64, gh: 600, gh_neighbours: 10, lipschitz_pairs: 32 }
    }
}

/// Suites a run executes, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    VerifyIdentities,
    SweepDecay,
    Solve,
    Gh,
    NodeBound,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::VerifyIdentities, Suite::SweepDecay, Suite::Solve, Suite::Gh, Suite::NodeBound];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::VerifyIdentities => "verify-identities",
            Suite::SweepDecay => "sweep-decay",
            Suite::Solve => "solve",
            Suite::Gh => "gh",
            Suite::NodeBound => "node-bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub delta_sweep: Vec<f64>,
    pub beta: f64,
    pub gamma: f64,
    pub c2: f64,
    pub ph_coeffs: [Complex64; 3],
    pub grid_nodes: usize,
    pub samples: SampleCounts,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub suites: Vec<Suite>,
    pub tolerances: BTreeMap<String, f64>,
}

/// Named tolerances and their defaults.
pub const DEFAULT_TOLERANCES: [(&str, f64); 12] = [
    ("vol_ratio", 1e-6),
    ("decomposition", 1e-10),
    ("annulus_k0", 0.15),
    ("annulus_k2", 0.2),
    ("ricci_slope", 0.2),
    ("invertibility_factor", 2.0),
    ("grid_stability", 0.2),
    ("newton_residual", 1e-8),
    ("solve_slope", 0.2),
    ("gh_slope", 0.2),
    ("cycle_slope", 0.05),
    ("cycle_constant", 0.02),
];

pub const OUTPUT_DIR_ENV: &str = "KELAB_OUTPUT_DIR";

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            delta_sweep: (3..=8).map(|k| 2f64.powi(-k)).collect(),
            beta: -1.0,
            gamma: 0.5,
            c2: kelab::params::DEFAULT_C2,
            ph_coeffs: [Complex64::new(0.0, 0.0); 3],
            grid_nodes: kelab::solver::DEFAULT_NODES,
            samples: SampleCounts::default(),
            seed: 0,
            output_dir: PathBuf::from("kelab-reports"),
            suites: Suite::ALL.to_vec(),
            tolerances: DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    model: RawModel,
    grid: RawGrid,
    samples: Option<SampleCounts>,
    run: RawRun,
    tolerances: BTreeMap<String, Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawModel {
    delta_sweep: Option<Spanned<Vec<f64>>>,
    beta: Option<Spanned<f64>>,
    gamma: Option<Spanned<f64>>,
    c2: Option<Spanned<f64>>,
    /// `[[re, im], [re, im], [re, im]]`
    ph_coeffs: Option<Spanned<[[f64; 2]; 3]>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawGrid {
    nodes: Option<Spanned<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawRun {
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    suites: Option<Vec<Suite>>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::ConfigParse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            field: "syntax".into(),
            reason: e.message().to_string(),
        })?;
        let bad = |field: &str, span: std::ops::Range<usize>, reason: String| CliError::ConfigParse {
            line: line_of(text, span.start),
            field: field.into(),
            reason,
        };
        let mut cfg = Self::default();
        if let Some(v) = raw.model.delta_sweep {
            let span = v.span();
            cfg.delta_sweep = v.into_inner();
            validate_sweep(&cfg.delta_sweep).map_err(|r| bad("model.delta_sweep", span, r))?;
        }
        if let Some(v) = raw.model.beta {
            let span = v.span();
            cfg.beta = check_beta(*v.get_ref()).map_err(|e| bad("model.beta", span, e.to_string()))?;
        }
        if let Some(v) = raw.model.gamma {
            let span = v.span();
            cfg.gamma = *v.get_ref();
            GluingParams::new(0.1)
                .and_then(|p| p.with_gamma(cfg.gamma))
                .map_err(|e| bad("model.gamma", span, e.to_string()))?;
        }
        if let Some(v) = raw.model.c2 {
            let span = v.span();
            cfg.c2 = *v.get_ref();
            GluingParams::new(0.1).and_then(|p| p.with_c2(cfg.c2)).map_err(|e| bad("model.c2", span, e.to_string()))?;
        }
        if let Some(v) = raw.model.ph_coeffs {
            cfg.ph_coeffs = v.into_inner().map(|[re, im]| Complex64::new(re, im));
        }
        if let Some(v) = raw.grid.nodes {
            let span = v.span();
            cfg.grid_nodes = *v.get_ref();
            if cfg.grid_nodes < kelab::solver::MIN_NODES {
                return Err(bad("grid.nodes", span, format!("need at least {} nodes", kelab::solver::MIN_NODES)));
            }
        }
        if let Some(s) = raw.samples {
            cfg.samples = s;
        }
        if let Some(seed) = raw.run.seed {
            cfg.seed = seed;
        }
        if let Some(dir) = raw.run.output_dir {
            cfg.output_dir = dir;
        }
        if let Some(suites) = raw.run.suites {
            cfg.suites = suites;
        }
        for (name, v) in raw.tolerances {
            let span = v.span();
            if !cfg.tolerances.contains_key(&name) {
                return Err(bad(&format!("tolerances.{name}"), span, "unknown tolerance".into()));
            }
            let x = *v.get_ref();
            if !(x > 0.0 && x.is_finite()) {
                return Err(bad(&format!("tolerances.{name}"), span, format!("must be positive, got {x}")));
            }
            cfg.tolerances.insert(name, x);
        }
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        Self::from_toml(&text)
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    /// Model parameters at one δ.
    pub fn params(&self, delta: f64) -> Result<GluingParams> {
        Ok(GluingParams::new(delta)?
            .with_beta(self.beta)?
            .with_gamma(self.gamma)?
            .with_c2(self.c2)?
            .with_ph_coeffs(self.ph_coeffs))
    }

    /// Parameters at the first δ of the sweep, used as a template.
    pub fn base_params(&self) -> Result<GluingParams> {
        self.params(self.delta_sweep[0])
    }

    pub fn set_delta_sweep(&mut self, deltas: Vec<f64>) -> Result<()> {
        validate_sweep(&deltas).map_err(|reason| CliError::ConfigParse { line: 0, field: "delta".into(), reason })?;
        self.delta_sweep = deltas;
        Ok(())
    }
}

fn validate_sweep(deltas: &[f64]) -> std::result::Result<(), String> {
    if deltas.is_empty() {
        return Err("empty sweep".into());
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d <= DELTA_MAX)) {
        return Err(format!("delta {d} outside (0, {DELTA_MAX}]"));
    }
    let mut sorted = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err("repeated delta".into());
    }
    Ok(())
}
