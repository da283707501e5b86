//! Stationary scattering for the finite-`eps` operator.
//!
//! For a wave `e^{-ikx}` incoming along edge `i`, the Lippmann–Schwinger
//! equation has the separable kernel `W(x) V_eps(y)`, so it collapses to the
//! scalar equation `c (1 - D) = N` for `c = <psi, V_eps>`. Every integral is
//! taken over `[0, 1]` after `y = eps u`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eps::{forms, EpsOperator};
use crate::error::{Error, Result};
use crate::graph::EdgeCoordinate;
use crate::limit::SMatrix;
use crate::quadrature::{check_converged, merge_breaks, QuadratureRule};
use crate::tol;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("scattering momentum must be positive, got {k}")))
    }
}

fn check_edge(op: &EpsOperator, edge: usize) -> Result<()> {
    if edge < op.n() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("edge {edge} out of range for n = {}", op.n())))
    }
}

/// Inhomogeneity `F(x_j) = -2i delta_ij sin(kx) + (2/n) e^{ikx}`.
pub fn assemble_f(i: usize, k: f64, n: usize, x: EdgeCoordinate) -> Complex64 {
    let mut f = (I * k * x.x).exp() * (2.0 / n as f64);
    if x.edge == i {
        f -= 2.0 * I * (k * x.x).sin();
    }
    f
}

/// Degenerate kernel column `W(x_j) = -(lambda/eps^3) (R_0(k) V_eps)(x_j)` for `0 <= x <= eps`.
pub fn assemble_w(op: &EpsOperator, k: f64, j: usize, x: f64) -> Result<Complex64> {
    check_k(k)?;
    check_edge(op, j)?;
    let eps = op.eps();
    if !(0.0..=eps).contains(&x) {
        return Err(Error::InvalidArgument(format!("W is assembled on [0, eps]; got x = {x}")));
    }
    let w = |rule: &QuadratureRule| {
        forms::green_potential(op.potential(), j, x, I * k, eps, rule) * op.lambda() / (2.0 * I * k * eps * eps)
    };
    check_converged("W", w(op.rule()), w(op.fine_rule()))
}

/// Numerator and denominator of `<psi_i, V_eps> = N / (1 - D)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FredholmPieces {
    pub numerator: Complex64,
    pub denominator: Complex64,
}

/// `int_0^1 V_j(u) sin(k eps u) du`.
fn sine_moment(op: &EpsOperator, j: usize, k: f64, rule: &QuadratureRule) -> f64 {
    let p = op.potential().profile(j);
    if p.is_zero() {
        return 0.0;
    }
    let t = k * op.eps();
    rule.integrate_panels(&merge_breaks(0.0, 1.0, p.breakpoints()), |u| (t * u).sin() * p.eval(u))
}

/// `D = (lambda / (2ik eps)) Q(ik eps)`; `k` may be complex.
fn d_with(op: &EpsOperator, k: Complex64, rule: &QuadratureRule) -> Complex64 {
    let z = I * k * op.eps();
    forms::q_form(op.potential(), z, rule) * op.lambda() / (2.0 * z)
}

/// `N = eps [-2i int V_i sin(k eps u) + (2/n) sum_l E_l(ik eps)]`.
fn n_with(op: &EpsOperator, i: usize, k: f64, rule: &QuadratureRule) -> Complex64 {
    let shared = op.vertex_moment(I * k * op.eps(), rule);
    (shared - 2.0 * I * sine_moment(op, i, k, rule)) * op.eps()
}

pub fn compute_nd(op: &EpsOperator, i: usize, k: f64) -> Result<FredholmPieces> {
    check_k(k)?;
    check_edge(op, i)?;
    let numerator = check_converged("N", n_with(op, i, k, op.rule()), n_with(op, i, k, op.fine_rule()))?;
    let kc = Complex64::from(k);
    let denominator = check_converged("D", d_with(op, kc, op.rule()), d_with(op, kc, op.fine_rule()))?;
    Ok(FredholmPieces { numerator, denominator })
}

/// `1 - D` continued to complex `k`; at `k = i kappa` it vanishes exactly at the bound state.
pub fn fredholm_denominator(op: &EpsOperator, k: Complex64) -> Result<Complex64> {
    let d = check_converged("D", d_with(op, k, op.rule()), d_with(op, k, op.fine_rule()))?;
    Ok(1.0 - d)
}

fn solve_pieces(pieces: FredholmPieces, k: f64) -> Result<Complex64> {
    let den = 1.0 - pieces.denominator;
    if den.norm() <= tol::FREDHOLM * pieces.denominator.norm().max(1.0) {
        return Err(Error::FredholmSingular { k, denominator: den.norm() });
    }
    Ok(pieces.numerator / den)
}

/// `<psi_i, V_eps>`.
pub fn solve_inner(op: &EpsOperator, i: usize, k: f64) -> Result<Complex64> {
    solve_pieces(compute_nd(op, i, k)?, k)
}

/// Scattering solution for a wave incoming along one edge.
#[derive(Clone, Debug)]
pub struct ScatteringSolution<'a> {
    op: &'a EpsOperator,
    pub incoming: usize,
    pub k: f64,
    pub pieces: FredholmPieces,
    /// `<psi, V_eps>`.
    pub inner: Complex64,
    /// `S_ij` for `j = 0..n`.
    pub amplitudes: Vec<Complex64>,
}

fn amplitudes_with(op: &EpsOperator, i: usize, k: f64, c: Complex64, rule: &QuadratureRule) -> Vec<Complex64> {
    let n = op.n();
    let eps = op.eps();
    let shared = op.vertex_moment(I * k * eps, rule) * 0.5 / I;
    let scale = c * op.lambda() / (k * eps * eps);
    (0..n)
        .map(|j| {
            let kirchhoff = 2.0 / n as f64 - if i == j { 1.0 } else { 0.0 };
            scale * (shared - sine_moment(op, j, k, rule)) + kirchhoff
        })
        .collect()
}

impl<'a> ScatteringSolution<'a> {
    pub fn solve(op: &'a EpsOperator, i: usize, k: f64) -> Result<Self> {
        let pieces = compute_nd(op, i, k)?;
        let inner = solve_pieces(pieces, k)?;
        let coarse = amplitudes_with(op, i, k, inner, op.rule());
        let fine = amplitudes_with(op, i, k, inner, op.fine_rule());
        let amplitudes =
            coarse.into_iter().zip(fine).map(|(c, f)| check_converged("S^eps", c, f)).collect::<Result<Vec<_>>>()?;
        Ok(Self { op, incoming: i, k, pieces, inner, amplitudes })
    }

    /// `int_{x/eps}^1 V_j(u) g(k(x - eps u)) du` for `x < eps`, zero beyond the support.
    fn interior(&self, p: EdgeCoordinate, g: impl Fn(f64) -> f64) -> f64 {
        let eps = self.op.eps();
        let prof = self.op.potential().profile(p.edge);
        if p.x >= eps || prof.is_zero() {
            return 0.0;
        }
        let t = p.x / eps;
        let br = merge_breaks(t, 1.0, prof.breakpoints());
        self.op.fine_rule().integrate_panels(&br, |u| g(self.k * (p.x - eps * u)) * prof.eval(u))
    }

    fn interior_scale(&self) -> Complex64 {
        -self.inner * self.op.lambda() / (self.k * self.op.eps().powi(2))
    }

    /// `psi_i(x_j)`.
    pub fn eval(&self, p: EdgeCoordinate) -> Complex64 {
        let k = self.k;
        let delta = if p.edge == self.incoming { 1.0 } else { 0.0 };
        self.interior_scale() * self.interior(p, f64::sin)
            + delta * (-I * k * p.x).exp()
            + self.amplitudes[p.edge] * (I * k * p.x).exp()
    }

    /// `psi_i'(x_j)`.
    pub fn eval_dx(&self, p: EdgeCoordinate) -> Complex64 {
        let k = self.k;
        let delta = if p.edge == self.incoming { 1.0 } else { 0.0 };
        self.interior_scale() * k * self.interior(p, f64::cos) - I * k * delta * (-I * k * p.x).exp()
            + I * k * self.amplitudes[p.edge] * (I * k * p.x).exp()
    }

    /// `|<psi, V_eps> (1 - D) - N|`.
    pub fn fredholm_residual(&self) -> f64 {
        (self.inner * (1.0 - self.pieces.denominator) - self.pieces.numerator).norm()
    }
}

/// `S^eps(k)`, one row per incoming edge.
pub fn smatrix_eps(op: &EpsOperator, k: f64) -> Result<SMatrix> {
    check_k(k)?;
    let n = op.n();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        let sol = ScatteringSolution::solve(op, i, k)?;
        for (j, s) in sol.amplitudes.into_iter().enumerate() {
            entries[(i, j)] = s;
        }
    }
    Ok(SMatrix { k, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Piece, Profile, ScalingFunction, StarPotential};
    use crate::limit::smatrix_limit;

    fn op(eps: f64) -> EpsOperator {
        EpsOperator::new(StarPotential::reference(), ScalingFunction::resonant(-1.0).unwrap(), eps).unwrap()
    }

    fn pt(edge: usize, x: f64) -> EdgeCoordinate {
        EdgeCoordinate::new(edge, x).unwrap()
    }

    fn lumpy() -> EpsOperator {
        let mut profiles = vec![
            Profile { pieces: vec![Piece::new(0.0, 0.3, [1.0, 2.0]), Piece::new(0.3, 1.0, [-0.5, 0.0, 1.0])] },
            Profile { pieces: vec![Piece::new(0.2, 0.9, [-2.0])] },
            Profile::polynomial([0.3, -0.6, 0.0, 0.4]),
            Profile::zero(),
        ];
        let mass: f64 = profiles.iter().map(Profile::mean).sum();
        profiles[2].pieces[0].coeffs[0] -= mass;
        EpsOperator::new(StarPotential::new(profiles).unwrap(), ScalingFunction::explicit(0.7, -0.4).unwrap(), 0.3)
            .unwrap()
    }

    #[test]
    fn f_examples() {
        let f = assemble_f(0, 1.3, 3, pt(2, 0.0));
        assert!((f - Complex64::from(2.0 / 3.0)).norm() < 1e-16);
        let f = assemble_f(0, 1.3, 3, pt(1, 0.4));
        assert!((f - (I * 1.3 * 0.4).exp() * (2.0 / 3.0)).norm() < 1e-16);
        let f = assemble_f(1, std::f64::consts::PI, 2, pt(1, 0.5));
        assert!((f + I).norm() < 1e-15);
    }

    #[test]
    fn zero_potential_is_kirchhoff() {
        let o = EpsOperator::new(StarPotential::zero(3).unwrap(), ScalingFunction::explicit(1.0, 1.0).unwrap(), 0.2)
            .unwrap();
        let nd = compute_nd(&o, 0, 1.0).unwrap();
        assert_eq!(nd.numerator, Complex64::default());
        assert_eq!(nd.denominator, Complex64::default());
        assert_eq!(solve_inner(&o, 0, 1.0).unwrap(), Complex64::default());
        assert_eq!(assemble_w(&o, 1.0, 1, 0.1).unwrap(), Complex64::default());
        let s = smatrix_eps(&o, 1.0).unwrap();
        assert!(s.max_entry_distance(&SMatrix::kirchhoff(1.0, 3)) < 1e-16);
    }

    #[test]
    fn unitary_and_symmetric() {
        for o in [op(0.125), op(0.01), lumpy()] {
            for k in [0.5, 1.0, 5.0] {
                let s = smatrix_eps(&o, k).unwrap();
                assert!(s.unitarity_residual() < 1e-8, "unitarity {}", s.unitarity_residual());
                assert!(s.symmetry_residual() < 1e-8, "symmetry {}", s.symmetry_residual());
            }
        }
    }

    #[test]
    fn vertex_conditions_hold() {
        for o in [op(0.1), lumpy()] {
            for i in 0..o.n() {
                let sol = ScatteringSolution::solve(&o, i, 1.7).unwrap();
                let values: Vec<Complex64> = (0..o.n()).map(|j| sol.eval(pt(j, 0.0))).collect();
                for v in &values {
                    assert!((v - values[0]).norm() < 1e-9);
                }
                let flux: Complex64 = (0..o.n()).map(|j| sol.eval_dx(pt(j, 0.0))).sum();
                assert!(flux.norm() < 1e-9, "flux {flux}");
                assert!(sol.fredholm_residual() <= 1e-12);
            }
        }
    }

    #[test]
    fn plane_wave_beyond_support() {
        let o = op(0.2);
        let sol = ScatteringSolution::solve(&o, 1, 2.0).unwrap();
        for x in [0.2, 0.5, 3.0] {
            let want = (-I * 2.0 * x).exp() + sol.amplitudes[1] * (I * 2.0 * x).exp();
            assert!((sol.eval(pt(1, x)) - want).norm() < 1e-15);
        }
        // solution is continuous across x = eps
        let inside = sol.eval(pt(0, 0.2 - 1e-9));
        assert!((inside - sol.eval(pt(0, 0.2))).norm() < 1e-7);
    }

    #[test]
    fn d_is_the_integral_of_w() {
        for o in [op(0.1), lumpy()] {
            let k = 1.3;
            let rule = QuadratureRule::gauss_legendre(40).unwrap();
            let mut d = Complex64::default();
            for j in 0..o.n() {
                let prof = o.potential().profile(j);
                let br = merge_breaks(0.0, 1.0, prof.breakpoints());
                d +=
                    rule.integrate_panels(&br, |u| assemble_w(&o, k, j, o.eps() * u).unwrap() * prof.eval(u)) * o.eps();
            }
            let closed = compute_nd(&o, 0, k).unwrap().denominator;
            assert!((d - closed).norm() < 1e-10 * closed.norm().max(1.0), "{d} vs {closed}");
        }
    }

    #[test]
    fn w_solves_the_helmholtz_equation() {
        let o = lumpy();
        let k = 2.0;
        let h = 1e-4;
        for (j, x) in [(0, 0.03), (0, 0.2), (2, 0.15), (1, 0.12)] {
            let w = |x: f64| assemble_w(&o, k, j, x).unwrap();
            let lap = (w(x + h) - 2.0 * w(x) + w(x - h)) / (h * h);
            let rhs = o.strength() * o.potential().profile(j).eval(x / o.eps());
            let res = lap + k * k * w(x) - rhs;
            assert!(res.norm() < 1e-4 * rhs.abs().max(1.0), "({j},{x}) residual {res}");
        }
    }

    #[test]
    fn nd_asymptotics() {
        let eps = 1e-3;
        let o = op(eps);
        let cc = o.coupling().unwrap();
        let k = 1.0;
        let n = 3.0;
        for i in 0..2 {
            let nd = compute_nd(&o, i, k).unwrap();
            let lead: f64 = (0..3).map(|j| (1.0 / n - if i == j { 1.0 } else { 0.0 }) * cc.theta[j]).sum();
            let n_pred = 2.0 * I * k * eps * eps * lead;
            assert!((nd.numerator / n_pred - 1.0).norm() < 5.0 * eps);
            let d_pred = o.lambda() * (cc.a + I * k * eps * cc.b);
            assert!((nd.denominator / d_pred - 1.0).norm() < 5.0 * eps * eps);
        }
    }

    #[test]
    fn bound_state_zero_of_fredholm_denominator() {
        let o = op(0.05);
        let cc = o.coupling().unwrap();
        let p = crate::eps::find_pole(&o, crate::eps::default_bracket(&o, &cc).unwrap()).unwrap().unwrap();
        let at = fredholm_denominator(&o, Complex64::new(0.0, p.kappa)).unwrap();
        assert!(at.norm() < 1e-9, "{at}");
        let lo = fredholm_denominator(&o, Complex64::new(0.0, 0.9 * p.kappa)).unwrap();
        let hi = fredholm_denominator(&o, Complex64::new(0.0, 1.1 * p.kappa)).unwrap();
        assert!(lo.im.abs() < 1e-14 && hi.im.abs() < 1e-14);
        assert!(lo.re * hi.re < 0.0);
    }

    #[test]
    fn approaches_limit_smatrix() {
        let cc = op(0.5).coupling().unwrap();
        let limit = smatrix_limit(1.0, &cc).unwrap();
        let e1 = smatrix_eps(&op(1.0 / 64.0), 1.0).unwrap().distance(&limit);
        let e2 = smatrix_eps(&op(1.0 / 128.0), 1.0).unwrap().distance(&limit);
        assert!((0.4..0.6).contains(&(e2 / e1)), "{e1} {e2}");
    }

    #[test]
    fn rejects_bad_arguments() {
        let o = op(0.1);
        assert!(assemble_w(&o, 1.0, 0, 0.2).is_err());
        assert!(compute_nd(&o, 3, 1.0).is_err());
        assert!(smatrix_eps(&o, 0.0).is_err());
    }
}
