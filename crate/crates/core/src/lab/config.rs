use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ScalingFunction, StarPotential};
use crate::quadrature::DEFAULT_ORDER;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_order() -> usize {
    DEFAULT_ORDER
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { order: DEFAULT_ORDER }
    }
}

/// Finite-difference cross-check settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    /// Truncation length for bound states and resolvent columns.
    pub length: f64,
    pub step: f64,
    /// Truncation length for the scattering problem.
    pub scattering_length: f64,
    /// `eps` of the eigenvalue check.
    pub epsilon: f64,
    /// `eps` of the resolvent-column and S-matrix checks.
    pub scattering_epsilon: f64,
    /// Momentum of the S-matrix check.
    pub k: f64,
    /// Source point of the resolvent columns.
    pub source_edge: usize,
    pub source_x: f64,
    /// Points closer than this to the source are skipped in the perturbed column comparison.
    pub diagonal_exclusion: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            length: 40.0,
            step: 5e-3,
            scattering_length: 2.0,
            epsilon: 0.05,
            scattering_epsilon: 0.1,
            k: 1.0,
            source_edge: 1,
            source_x: 0.7,
            diagonal_exclusion: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative eigenvalue mismatch, FD against the root-found pole.
    pub eigenvalue_rel: f64,
    /// Largest entrywise S-matrix mismatch.
    pub smatrix_entry: f64,
    /// Sup-norm mismatch of the free resolvent column.
    pub free_column_sup: f64,
    /// Sup-norm mismatch of the perturbed resolvent column.
    pub kernel_column_sup: f64,
    /// Largest accepted Hilbert–Schmidt tail bound.
    pub hs_tail: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigenvalue_rel: 1e-2,
            smatrix_entry: 1e-3,
            free_column_sup: 5e-4,
            kernel_column_sup: 1e-3,
            hs_tail: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub potential: StarPotential,
    pub scaling: ScalingFunction,
    pub epsilons: Vec<f64>,
    pub momenta: Vec<f64>,
    pub kappa: f64,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// `V_1 = 1, V_2 = -1, V_3 = 0` with resonant scaling and the given `lambda1`.
    pub fn reference(lambda1: f64) -> Self {
        Self {
            n: 3,
            potential: StarPotential::reference(),
            scaling: ScalingFunction { resonant: true, lambda0: None, lambda1, higher: Vec::new() },
            epsilons: (3..=7).map(|p| 0.5f64.powi(p)).collect(),
            momenta: vec![0.5, 1.0, 5.0],
            kappa: 1.0,
            quadrature: QuadratureConfig::default(),
            oracle: OracleConfig::default(),
            tolerances: Tolerances::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Schema-level checks; the potential itself is validated where it is used.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n != self.potential.n() {
            return bad(format!("n = {} but the potential has {} edges", self.n, self.potential.n()));
        }
        self.scaling.check().map_err(|e| Error::Config(e.to_string()))?;
        if self.epsilons.is_empty() {
            return bad("epsilons must not be empty".into());
        }
        if let Some(e) = self.epsilons.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return bad(format!("epsilon {e} outside (0, 1]"));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return bad("epsilons must be strictly decreasing".into());
        }
        if let Some(k) = self.momenta.iter().find(|&&k| !(k > 0.0 && k.is_finite())) {
            return bad(format!("momentum {k} must be positive"));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa {} must be positive", self.kappa));
        }
        if self.quadrature.order < 2 {
            return bad(format!("quadrature order {} must be >= 2", self.quadrature.order));
        }
        let o = &self.oracle;
        if !(o.step > 0.0 && o.length >= 2.0 && o.scattering_length >= 2.0) {
            return bad("oracle grid needs step > 0 and lengths >= 2".into());
        }
        if !(o.epsilon > 0.0 && o.epsilon <= 1.0 && o.scattering_epsilon > 0.0 && o.scattering_epsilon <= 1.0) {
            return bad("oracle epsilons must lie in (0, 1]".into());
        }
        if !(o.k > 0.0) || o.source_edge >= self.n || !(o.source_x >= 0.0) {
            return bad("oracle needs k > 0 and a source on the graph".into());
        }
        let t = &self.tolerances;
        if [t.eigenvalue_rel, t.smatrix_entry, t.free_column_sup, t.kernel_column_sup, t.hs_tail]
            .iter()
            .any(|&x| !(x > 0.0))
        {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }
}
