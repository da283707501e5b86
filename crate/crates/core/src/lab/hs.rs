//! Hilbert–Schmidt distance between the finite-`eps` and limit resolvents.
//!
//! The free Green function cancels, leaving
//! `K_ij(x, y) = -zeta f_i(x) f_j(y) - Lambda_ij e^{-kappa(x+y)}`, which is
//! integrated by a tensor Gauss–Legendre rule over `[0, L]^2` for every edge
//! pair. Beyond the support `f_i(x) = a_i e^{-kappa x}`, so the part of the
//! norm outside `[0, L]^2` is integrated in closed form against the
//! `e^{-2 kappa L} / (2 kappa)` envelope and reported as a bound.

use serde::Serialize;

use crate::eps::{resolvent_eps_kernel, EpsKernel, EpsOperator};
use crate::error::Result;
use crate::graph::{CouplingConstants, EdgeCoordinate};
use crate::limit::{lambda_matrix, Momentum};
use crate::quadrature::{check_converged, merge_breaks, QuadratureRule};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HsDistance {
    /// `||R^eps - Xi||_2` restricted to `[0, L]^2` on every edge pair.
    pub value: f64,
    /// Norm of the kernel difference outside the truncated domain.
    pub tail_bound: f64,
    pub truncation: f64,
}

/// Truncation length `L = 1 + 24/kappa`; the envelope is then `e^{-2 - 48}/(2 kappa)`.
pub fn hs_truncation(kappa: f64) -> f64 {
    1.0 + 24.0 / kappa
}

struct Nodes {
    /// `(weight, f, e^{-kappa x})` per edge.
    edges: Vec<Vec<(f64, f64, f64)>>,
}

fn nodes(kernel: &EpsKernel, kappa: f64, length: f64, rule: &QuadratureRule) -> Nodes {
    let op = kernel.operator();
    let eps = op.eps();
    let edges = (0..op.n())
        .map(|j| {
            let strip = op.potential().profile(j).breakpoints().into_iter().map(|b| eps * b);
            let unit = (1..).map(f64::from).take_while(|&x| x < length);
            let breaks = merge_breaks(0.0, length, strip.chain([eps]).chain(unit));
            breaks
                .windows(2)
                .flat_map(|w| rule.points(w[0], w[1]).collect::<Vec<_>>())
                .map(|(x, w)| {
                    let p = EdgeCoordinate { edge: j, x };
                    (w, kernel.factor_with_rule(p, rule), (-kappa * x).exp())
                })
                .collect()
        })
        .collect();
    Nodes { edges }
}

/// `sum_ij int int K_ij^2` over `[0, L]^2`.
fn truncated_square(nodes: &Nodes, zeta: f64, lam: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (i, xi) in nodes.edges.iter().enumerate() {
        for (j, yj) in nodes.edges.iter().enumerate() {
            let l = lam[i][j];
            let mut acc = 0.0;
            for &(wa, fa, ga) in xi {
                let mut row = 0.0;
                for &(wb, fb, gb) in yj {
                    let k = zeta * fa * fb + l * ga * gb;
                    row += wb * k * k;
                }
                acc += wa * row;
            }
            total += acc;
        }
    }
    total
}

pub fn hs_distance(op: &EpsOperator, cc: &CouplingConstants, kappa: f64) -> Result<HsDistance> {
    let length = hs_truncation(kappa);
    let kernel = resolvent_eps_kernel(op, kappa)?;
    let n = op.n();
    let lam_c = lambda_matrix(Momentum::imaginary(kappa)?, cc)?;
    let lam: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| lam_c[(i, j)].re).collect()).collect();
    let zeta = kernel.zeta();

    let coarse = nodes(&kernel, kappa, length, op.rule());
    let fine = nodes(&kernel, kappa, length, op.fine_rule());
    let square =
        check_converged("HS distance", truncated_square(&coarse, zeta, &lam), truncated_square(&fine, zeta, &lam))?;

    // x > L: K_ij(x, y) = e^{-kappa x} h_ij(y), h_ij(y) = -(zeta a_i f_j(y) + Lambda_ij e^{-kappa y})
    let envelope = (-2.0 * kappa * length).exp() / (2.0 * kappa);
    let a = kernel.far_amplitudes();
    let mut tail = 0.0;
    for i in 0..n {
        for j in 0..n {
            let strip: f64 = fine.edges[j]
                .iter()
                .map(|&(w, f, g)| {
                    let h = zeta * a[i] * f + lam[i][j] * g;
                    w * h * h
                })
                .sum();
            let c = zeta * a[i] * a[j] + lam[i][j];
            // both arguments beyond L, plus the two mixed strips
            tail += c * c * envelope * envelope + 2.0 * envelope * strip;
        }
    }
    Ok(HsDistance { value: square.max(0.0).sqrt(), tail_bound: tail.sqrt(), truncation: length })
}
