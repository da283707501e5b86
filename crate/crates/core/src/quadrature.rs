//! Composite Gauss–Legendre quadrature on panels.
//!
//! Nodes and weights are mapped once to the reference interval `[0, 1]` and
//! then affinely onto every panel. Integrands with a derivative jump (the
//! `|x - y|` kernels) are handled by the callers, which pass panel breaks at
//! the kink so that every panel sees a smooth integrand.

use std::num::NonZeroUsize;
use std::ops::{AddAssign, Mul};

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::tol;

pub const DEFAULT_ORDER: usize = 32;

/// Values a quadrature can accumulate: `f64` and `Complex64`.
pub trait Accumulate: Copy + Default + AddAssign + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl Accumulate for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Accumulate for num_complex::Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Split double integrals along the diagonal `x = y`.
    pub split_diagonal: bool,
}

impl QuadratureRule {
    pub fn gauss_legendre(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument(format!("quadrature order {order} must be >= 2")));
        }
        let deg = GaussLegendre::new(NonZeroUsize::new(order).expect("order >= 2"));
        let mut pairs = deg.into_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let nodes = pairs.iter().map(|(x, _)| 0.5 * (x + 1.0)).collect();
        let weights = pairs.iter().map(|(_, w)| 0.5 * w).collect();
        Ok(Self { order, nodes, weights, split_diagonal: true })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The same rule with twice as many nodes, used for convergence checks.
    pub fn doubled(&self) -> Self {
        let mut r = Self::gauss_legendre(2 * self.order).expect("doubling a valid order");
        r.split_diagonal = self.split_diagonal;
        r
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let len = b - a;
        self.nodes.iter().zip(&self.weights).map(move |(&t, &w)| (a + len * t, len * w))
    }

    pub fn integrate<T: Accumulate>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> T) -> T {
        let mut acc = T::default();
        if b <= a {
            return acc;
        }
        for (x, w) in self.points(a, b) {
            acc += f(x) * w;
        }
        acc
    }

    /// Sum of integrals over consecutive panels `[breaks[i], breaks[i+1]]`.
    pub fn integrate_panels<T: Accumulate>(&self, breaks: &[f64], mut f: impl FnMut(f64) -> T) -> T {
        let mut acc = T::default();
        for w in breaks.windows(2) {
            acc += self.integrate(w[0], w[1], &mut f);
        }
        acc
    }
}

/// Compare a value against its order-doubled counterpart.
pub fn check_converged<T: Accumulate + std::ops::Sub<Output = T>>(
    quantity: &'static str,
    coarse: T,
    fine: T,
) -> Result<T> {
    let diff = (fine - coarse).magnitude();
    let scale = fine.magnitude();
    if diff <= tol::QUAD_REL * scale || diff <= f64::MIN_POSITIVE {
        Ok(fine)
    } else {
        Err(Error::QuadratureNotConverged { quantity, rel_change: diff / scale.max(f64::MIN_POSITIVE) })
    }
}

/// Merge panel breakpoints, dropping duplicates and points outside `[lo, hi]`.
pub fn merge_breaks(lo: f64, hi: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> =
        std::iter::once(lo).chain(extra.into_iter().filter(|&x| x > lo && x < hi)).chain(std::iter::once(hi)).collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
    v
}
