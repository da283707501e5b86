use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::potential::{constant_a, moments_theta, StarPotential};
use crate::error::{Error, Result};
use crate::tol;

/// `lambda(eps) = lambda0 + lambda1 eps + sum_k higher[k] eps^(k+2)`.
///
/// In the resonant case `lambda0` is not a free parameter: it is fixed to
/// `1 / A` once the potential is known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingFunction {
    #[serde(default)]
    pub resonant: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    pub lambda1: f64,
    #[serde(default)]
    pub higher: Vec<f64>,
}

impl ScalingFunction {
    pub fn resonant(lambda1: f64) -> Result<Self> {
        let s = Self { resonant: true, lambda0: None, lambda1, higher: Vec::new() };
        s.check()?;
        Ok(s)
    }

    pub fn explicit(lambda0: f64, lambda1: f64) -> Result<Self> {
        let s = Self { resonant: false, lambda0: Some(lambda0), lambda1, higher: Vec::new() };
        s.check()?;
        Ok(s)
    }

    pub fn with_higher(mut self, higher: Vec<f64>) -> Self {
        self.higher = higher;
        self
    }

    pub fn check(&self) -> Result<()> {
        if !(self.lambda1.is_finite() && self.lambda1 != 0.0) {
            return Err(Error::InvalidArgument("lambda1 must be finite and nonzero".into()));
        }
        match (self.resonant, self.lambda0) {
            (true, Some(_)) => {
                Err(Error::InvalidArgument("resonant scaling derives lambda0 = 1/A; do not set it".into()))
            }
            (false, None) => Err(Error::InvalidArgument("non-resonant scaling needs lambda0".into())),
            (false, Some(l0)) if !(l0.is_finite() && l0 != 0.0) => {
                Err(Error::InvalidArgument("lambda0 must be finite and nonzero".into()))
            }
            _ if self.higher.iter().any(|c| !c.is_finite()) => {
                Err(Error::InvalidArgument("higher scaling coefficients must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// `lambda0`, derived as `1/A` when resonant.
    pub fn lambda0(&self, a: f64) -> Result<f64> {
        match self.lambda0 {
            Some(l0) if !self.resonant => Ok(l0),
            _ => {
                if a.abs() <= tol::MEAN {
                    Err(Error::ResonantWithZeroA)
                } else {
                    Ok(1.0 / a)
                }
            }
        }
    }

    pub fn eval(&self, lambda0: f64, eps: f64) -> f64 {
        let mut value = lambda0 + self.lambda1 * eps;
        let mut pow = eps * eps;
        for c in &self.higher {
            value += c * pow;
            pow *= eps;
        }
        value
    }
}

/// Constants of the limit coupling derived from `V` and `lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingConstants {
    pub theta: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub pi: DMatrix<f64>,
    pub beta: f64,
}

impl CouplingConstants {
    pub fn new(v: &StarPotential, scaling: &ScalingFunction) -> Result<Self> {
        v.validate()?;
        let theta = moments_theta(v);
        let a = constant_a(v);
        let (b, pi) = constants_b_pi(&theta);
        let beta = coupling_beta(scaling, a)?;
        Ok(Self { theta, a, b, pi, beta })
    }

    /// Build from explicit `theta` and `beta`; `A` is irrelevant to the limit operator.
    pub fn from_theta(theta: Vec<f64>, beta: f64) -> Self {
        let (b, pi) = constants_b_pi(&theta);
        Self { theta, a: f64::NAN, b, pi, beta }
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    /// `p_i = mean(theta) - theta_i`, so that `Pi = p p^T`.
    pub fn p(&self) -> Vec<f64> {
        centered(&self.theta)
    }

    /// Largest pairwise gap `max |theta_i - theta_j|`.
    pub fn theta_spread(&self) -> f64 {
        let max = self.theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.theta.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub(crate) fn require_nonzero_b(&self) -> Result<()> {
        if self.theta_spread() <= tol::THETA {
            Err(Error::ZeroB)
        } else {
            Ok(())
        }
    }
}

fn centered(theta: &[f64]) -> Vec<f64> {
    let mean = theta.iter().sum::<f64>() / theta.len() as f64;
    theta.iter().map(|t| mean - t).collect()
}

/// `B = (sum theta)^2 / n - sum theta^2` and `Pi_ij = p_i p_j`.
pub fn constants_b_pi(theta: &[f64]) -> (f64, DMatrix<f64>) {
    let n = theta.len() as f64;
    let sum: f64 = theta.iter().sum();
    let sum_sq: f64 = theta.iter().map(|t| t * t).sum();
    let p = DVector::from_vec(centered(theta));
    let pi = &p * p.transpose();
    (sum * sum / n - sum_sq, pi)
}

/// `beta = 1/(lambda1 A^2)` in the resonant case, zero otherwise.
pub fn coupling_beta(scaling: &ScalingFunction, a: f64) -> Result<f64> {
    if scaling.resonant {
        if a.abs() <= tol::MEAN {
            return Err(Error::ResonantWithZeroA);
        }
        Ok(1.0 / (scaling.lambda1 * a * a))
    } else {
        Ok(0.0)
    }
}
