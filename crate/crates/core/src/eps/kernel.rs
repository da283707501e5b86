use num_complex::Complex64;

use super::{check_kappa, forms, zeta, EpsOperator};
use crate::error::Result;
use crate::graph::EdgeCoordinate;
use crate::limit::{free_green, KernelEvaluator, Momentum, OperatorKind};
use crate::quadrature::{check_converged, QuadratureRule};

/// Kernel of `(-Delta^eps + kappa^2)^-1`: `G(x, y) - zeta f(x) f(y)` with `f = R_0 V_eps`.
#[derive(Clone, Debug)]
pub struct EpsKernel {
    op: EpsOperator,
    kappa: f64,
    zeta: f64,
    momentum: Momentum,
    far: Vec<f64>,
}

impl EpsKernel {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    fn factor_with(&self, p: EdgeCoordinate, rule: &QuadratureRule) -> f64 {
        let s = Complex64::new(-self.kappa, 0.0);
        let g = forms::green_potential(self.op.potential(), p.edge, p.x, s, self.op.eps(), rule);
        g.re * self.op.eps() / (2.0 * self.kappa)
    }

    /// `(R_0 V_eps)(x_i)`, checked under order doubling.
    pub fn factor(&self, p: EdgeCoordinate) -> Result<f64> {
        if p.x >= self.op.eps() {
            return Ok(self.far[p.edge] * (-self.kappa * p.x).exp());
        }
        check_converged("R0 V", self.factor_with(p, self.op.rule()), self.factor_with(p, self.op.fine_rule()))
    }

    /// `(R_0 V_eps)(x_i)` with the strip integral taken by `rule`.
    pub fn factor_with_rule(&self, p: EdgeCoordinate, rule: &QuadratureRule) -> f64 {
        if p.x >= self.op.eps() {
            self.far[p.edge] * (-self.kappa * p.x).exp()
        } else {
            self.factor_with(p, rule)
        }
    }

    fn factor_unchecked(&self, p: EdgeCoordinate) -> f64 {
        self.factor_with_rule(p, self.op.fine_rule())
    }

    pub fn operator(&self) -> &EpsOperator {
        &self.op
    }

    /// Amplitudes `a_i` with `(R_0 V_eps)(x_i) = a_i e^{-kappa x}` beyond the support.
    pub fn far_amplitudes(&self) -> &[f64] {
        &self.far
    }
}

impl KernelEvaluator for EpsKernel {
    fn kind(&self) -> OperatorKind {
        OperatorKind::Eps
    }

    fn eval(&self, p: EdgeCoordinate, q: EdgeCoordinate) -> Complex64 {
        let g = free_green(self.momentum, p, q, self.op.n());
        g - self.zeta * self.factor_unchecked(p) * self.factor_unchecked(q)
    }
}

/// `a_i = (eps/2kappa) [int V_i(u) 2 sinh(kappa eps u) du + (2/n) sum_j E_j(-eps kappa)]`.
fn far_amplitudes(op: &EpsOperator, kappa: f64, rule: &QuadratureRule) -> Vec<f64> {
    let t = op.eps() * kappa;
    let shared = op.vertex_moment(Complex64::new(-t, 0.0), rule).re;
    op.potential()
        .profiles()
        .iter()
        .map(|p| {
            let local = if p.is_zero() {
                0.0
            } else {
                let br = crate::quadrature::merge_breaks(0.0, 1.0, p.breakpoints());
                rule.integrate_panels(&br, |u| 2.0 * (t * u).sinh() * p.eval(u))
            };
            op.eps() / (2.0 * kappa) * (local + shared)
        })
        .collect()
}

pub fn resolvent_eps_kernel(op: &EpsOperator, kappa: f64) -> Result<EpsKernel> {
    check_kappa(kappa)?;
    let zeta = zeta(op, kappa)?;
    let coarse = far_amplitudes(op, kappa, op.rule());
    let fine = far_amplitudes(op, kappa, op.fine_rule());
    let far = coarse
        .into_iter()
        .zip(fine)
        .map(|(c, f)| check_converged("R0 V far field", c, f))
        .collect::<Result<Vec<_>>>()?;
    Ok(EpsKernel { op: op.clone(), kappa, zeta, momentum: Momentum::imaginary(kappa)?, far })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ScalingFunction, StarPotential};
    use crate::limit::resolvent_kernel_limit;

    fn pt(edge: usize, x: f64) -> EdgeCoordinate {
        EdgeCoordinate::new(edge, x).unwrap()
    }

    fn op(eps: f64) -> EpsOperator {
        EpsOperator::new(StarPotential::reference(), ScalingFunction::resonant(-1.0).unwrap(), eps).unwrap()
    }

    /// Direct quadrature of `int G(x, y) V_eps(y) dy` with the kink as a panel break.
    fn factor_oracle(o: &EpsOperator, kappa: f64, p: EdgeCoordinate) -> f64 {
        let m = Momentum::imaginary(kappa).unwrap();
        let rule = QuadratureRule::gauss_legendre(60).unwrap();
        (0..o.n())
            .map(|j| {
                let prof = o.potential().profile(j);
                let br = crate::quadrature::merge_breaks(0.0, o.eps(), [p.x]);
                rule.integrate_panels(&br, |y| free_green(m, p, pt(j, y), o.n()).re * prof.eval(y / o.eps()))
            })
            .sum()
    }

    #[test]
    fn factor_matches_direct_green_integral() {
        let o = op(0.2);
        let k = resolvent_eps_kernel(&o, 1.3).unwrap();
        for p in [pt(0, 0.0), pt(0, 0.05), pt(1, 0.15), pt(2, 0.1), pt(0, 0.2), pt(1, 0.7)] {
            let got = k.factor(p).unwrap();
            let want = factor_oracle(&o, 1.3, p);
            assert!((got - want).abs() < 1e-13, "{p:?}: {got} vs {want}");
        }
    }

    #[test]
    fn kernel_is_symmetric() {
        let k = resolvent_eps_kernel(&op(0.1), 1.0).unwrap();
        let pts = [pt(0, 0.03), pt(1, 0.5), pt(2, 0.08), pt(0, 2.0)];
        for &p in &pts {
            for &q in &pts {
                assert!((k.eval(p, q) - k.eval(q, p)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_potential_gives_free_kernel() {
        let o = EpsOperator::new(StarPotential::zero(3).unwrap(), ScalingFunction::explicit(1.0, 1.0).unwrap(), 0.3)
            .unwrap();
        let k = resolvent_eps_kernel(&o, 0.8).unwrap();
        let m = Momentum::imaginary(0.8).unwrap();
        for (p, q) in [(pt(0, 0.1), pt(1, 0.2)), (pt(2, 1.0), pt(2, 0.4))] {
            assert!((k.eval(p, q) - free_green(m, p, q, 3)).norm() < 1e-16);
        }
    }

    #[test]
    fn pointwise_limit_off_support() {
        let cc = op(0.5).coupling().unwrap();
        let limit = resolvent_kernel_limit(&cc, Momentum::imaginary(1.0).unwrap()).unwrap();
        let (p, q) = (pt(0, 2.0), pt(1, 3.0));
        let target = limit.eval(p, q);
        let errs: Vec<f64> = [1e-2, 5e-3]
            .iter()
            .map(|&e| (resolvent_eps_kernel(&op(e), 1.0).unwrap().eval(p, q) - target).norm())
            .collect();
        assert!(errs[0] < 50.0 * 1e-2 * target.norm().max(1e-3), "{errs:?}");
        let r = errs[1] / errs[0];
        assert!((0.35..0.65).contains(&r), "ratio {r}");
    }

    #[test]
    fn rank_one_factor_asymptotics() {
        let eps = 1e-3;
        let k = resolvent_eps_kernel(&op(eps), 1.0).unwrap();
        let cc = op(eps).coupling().unwrap();
        let (x, y) = (1.5, 2.5);
        for i in 0..2 {
            for j in 0..2 {
                let prod = k.factor(pt(i, x)).unwrap() * k.factor(pt(j, y)).unwrap();
                let want = eps.powi(4) * (-(x + y)).exp() * cc.pi[(i, j)];
                assert!((prod / want - 1.0).abs() <= 10.0 * eps, "({i},{j}) {}", prod / want);
            }
        }
    }
}
