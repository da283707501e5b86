//! Integrals of the rescaled potential against exponential kernels.
//!
//! Everything is written on the unit square after `x -> eps x`, and the
//! differences `e^{z|x-y|} - e^{z(x+y)}` and `e^{zx} - 1` are evaluated with
//! `expm1` so that the cancellations forced by the zero mean of `V` happen
//! analytically instead of in floating point.

use num_complex::Complex64;

use crate::graph::{Profile, StarPotential};
use crate::quadrature::{merge_breaks, QuadratureRule};

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1c(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

fn panels(p: &Profile, lo: f64, hi: f64) -> Vec<f64> {
    merge_breaks(lo, hi, p.breakpoints())
}

/// `int_0^1 V(u) (e^{z u} - 1) du`.
pub fn moment_expm1(p: &Profile, z: Complex64, rule: &QuadratureRule) -> Complex64 {
    if p.is_zero() {
        return Complex64::default();
    }
    rule.integrate_panels(&panels(p, 0.0, 1.0), |u| expm1c(z * u) * p.eval(u))
}

/// `E_i(z) = int_0^1 V_i(u) e^{z u} du`, split as mass plus an `expm1` part.
pub fn exp_moments(v: &StarPotential, z: Complex64, rule: &QuadratureRule) -> (f64, Complex64) {
    let mass: f64 = v.total_mean();
    let rest: Complex64 = v.profiles().iter().map(|p| moment_expm1(p, z, rule)).sum();
    (mass, rest)
}

/// `int int V(x) V(y) (e^{z|x-y|} - e^{z(x+y)}) dx dy` over the unit square.
pub fn diagonal_form(p: &Profile, z: Complex64, rule: &QuadratureRule) -> Complex64 {
    if p.is_zero() {
        return Complex64::default();
    }
    let outer = panels(p, 0.0, 1.0);
    if rule.split_diagonal {
        // symmetric integrand: twice the triangle y < x
        let tri = rule.integrate_panels(&outer, |x| {
            let inner = panels(p, 0.0, x);
            let vx = p.eval(x);
            rule.integrate_panels(&inner, |y| (z * (x - y)).exp() * expm1c(2.0 * z * y) * p.eval(y)) * vx
        });
        tri * -2.0
    } else {
        rule.integrate_panels(&outer, |x| {
            let vx = p.eval(x);
            rule.integrate_panels(&outer, |y| (z * (x - y).abs()).exp() * expm1c(2.0 * z * x.min(y)) * p.eval(y)) * vx
        }) * -1.0
    }
}

/// `Q(z) = sum_i int int V_i V_i (e^{z|x-y|} - e^{z(x+y)}) + (2/n) (sum_i E_i(z))^2`.
///
/// `<R_0 V_eps, V_eps> = eps^2/(2 kappa) Q(-eps kappa)` and
/// `D = lambda/(2 i k eps) Q(i k eps)`.
pub fn q_form(v: &StarPotential, z: Complex64, rule: &QuadratureRule) -> Complex64 {
    let n = v.n() as f64;
    let diag: Complex64 = v.profiles().iter().map(|p| diagonal_form(p, z, rule)).sum();
    let (mass, rest) = exp_moments(v, z, rule);
    let e = rest + mass;
    diag + e * e * (2.0 / n)
}

/// `int_0^1 V_j(u) (e^{s|x - eps u|} - e^{s(x + eps u)}) du + (2/n) e^{s x} sum_l E_l(s eps)`.
///
/// With `s = -kappa` this is `(2 kappa / eps) (R_0 V_eps)(x_j)`; with `s = ik`
/// it is the bracket of the degenerate Fredholm kernel `W`.
pub fn green_potential(
    v: &StarPotential,
    j: usize,
    x: f64,
    s: Complex64,
    eps: f64,
    rule: &QuadratureRule,
) -> Complex64 {
    let n = v.n() as f64;
    let p = v.profile(j);
    let local = if p.is_zero() {
        Complex64::default()
    } else {
        let t = x / eps;
        let br = merge_breaks(0.0, 1.0, p.breakpoints().into_iter().chain(std::iter::once(t)));
        rule.integrate_panels(&br, |u| {
            let y = eps * u;
            -(s * (x - y).abs()).exp() * expm1c(2.0 * s * x.min(y)) * p.eval(u)
        })
    };
    let (mass, rest) = exp_moments(v, s * eps, rule);
    local + (s * x).exp() * (rest + mass) * (2.0 / n)
}
