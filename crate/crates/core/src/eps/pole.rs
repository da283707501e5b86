use super::{check_kappa, EpsOperator};
use crate::error::{Error, Result};
use crate::graph::CouplingConstants;
use crate::roots::{brent, geometric_grid, sign_changes};
use crate::tol;

const SCAN_POINTS: usize = 96;
const SCAN_MAX: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleResult {
    pub kappa: f64,
    /// `-kappa^2`.
    pub eigenvalue: f64,
    /// Value of [`pole_function`] at the root.
    pub residual: f64,
}

/// `eps^-3 (eps^3/lambda(eps) + <R_0 V_eps, V_eps>)` as a function of `kappa`.
pub fn pole_function(op: &EpsOperator, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(1.0 / op.lambda() + op.scaled_inner(kappa)?)
}

/// Two-term predictor `(1/B)((A - 1/lambda0)/eps + lambda1/lambda0^2)`.
pub fn pole_asymptotic(op: &EpsOperator, cc: &CouplingConstants) -> Result<f64> {
    if cc.b == 0.0 {
        return Err(Error::ZeroB);
    }
    let l0 = op.lambda0();
    let lead = if op.scaling().resonant { 0.0 } else { (cc.a - 1.0 / l0) / op.eps() };
    Ok((lead + op.scaling().lambda1 / (l0 * l0)) / cc.b)
}

pub fn default_bracket(op: &EpsOperator, cc: &CouplingConstants) -> Result<(f64, f64)> {
    let p = pole_asymptotic(op, cc)?;
    if p > 0.0 {
        Ok(((0.5 * p).max(tol::KAPPA_MIN), 2.0 * p + 1.0))
    } else {
        Ok((tol::KAPPA_MIN, SCAN_MAX))
    }
}

/// Root of the pole equation in `bracket`, located by a geometric sign scan
/// and refined by Brent's method.
pub fn find_pole(op: &EpsOperator, bracket: (f64, f64)) -> Result<Option<PoleResult>> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("pole bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let failure = std::cell::RefCell::new(None);
    let g = |k: f64| match pole_function(op, k) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let grid = geometric_grid(lo, hi, SCAN_POINTS);
    let changes = sign_changes(&grid, g);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let (a, b) = match changes.as_slice() {
        [] => return Ok(None),
        [one] => *one,
        many => return Err(Error::MultipleSignChanges { count: many.len(), lo, hi }),
    };
    let kappa = brent(g, a, b, 1e-15, 4.0 * f64::EPSILON, 200)
        .ok_or(Error::RootNotConverged { kappa: 0.5 * (a + b), residual: f64::NAN })?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let residual = pole_function(op, kappa)?;
    if residual.abs() > tol::ROOT {
        return Err(Error::RootNotConverged { kappa, residual });
    }
    Ok(Some(PoleResult { kappa, eigenvalue: -kappa * kappa, residual }))
}
