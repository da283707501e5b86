//! The approximating family `-Delta^eps = -Delta_0 + (lambda(eps)/eps^3) V_eps <., V_eps>`
//! with `V_eps(x) = V(x/eps)`, evaluated from exact finite-`eps` integrals.

pub mod forms;
mod kernel;
mod pole;

pub use kernel::{resolvent_eps_kernel, EpsKernel};
pub use pole::{default_bracket, find_pole, pole_asymptotic, pole_function, PoleResult};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{constant_a, CouplingConstants, ScalingFunction, StarPotential};
use crate::quadrature::{check_converged, QuadratureRule, DEFAULT_ORDER};
use crate::tol;

#[derive(Clone, Debug)]
pub struct EpsOperator {
    v: StarPotential,
    scaling: ScalingFunction,
    eps: f64,
    lambda0: f64,
    lambda_eps: f64,
    rule: QuadratureRule,
    fine: QuadratureRule,
}

impl EpsOperator {
    pub fn new(v: StarPotential, scaling: ScalingFunction, eps: f64) -> Result<Self> {
        Self::with_order(v, scaling, eps, DEFAULT_ORDER)
    }

    pub fn with_order(v: StarPotential, scaling: ScalingFunction, eps: f64, order: usize) -> Result<Self> {
        v.validate()?;
        scaling.check()?;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidArgument(format!("eps must lie in (0, 1], got {eps}")));
        }
        let lambda0 = scaling.lambda0(constant_a(&v))?;
        let lambda_eps = scaling.eval(lambda0, eps);
        if lambda_eps == 0.0 || !lambda_eps.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda(eps) vanishes at eps = {eps}")));
        }
        let rule = QuadratureRule::gauss_legendre(order)?;
        let fine = rule.doubled();
        Ok(Self { v, scaling, eps, lambda0, lambda_eps, rule, fine })
    }

    /// Same potential and scaling at another `eps`.
    pub fn at_eps(&self, eps: f64) -> Result<Self> {
        Self::with_order(self.v.clone(), self.scaling.clone(), eps, self.rule.order())
    }

    pub fn potential(&self) -> &StarPotential {
        &self.v
    }

    pub fn scaling(&self) -> &ScalingFunction {
        &self.scaling
    }

    pub fn n(&self) -> usize {
        self.v.n()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// `lambda(eps)`.
    pub fn lambda(&self) -> f64 {
        self.lambda_eps
    }

    /// Coupling strength `lambda(eps) / eps^3` of the rank-one term.
    pub fn strength(&self) -> f64 {
        self.lambda_eps / self.eps.powi(3)
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn fine_rule(&self) -> &QuadratureRule {
        &self.fine
    }

    pub fn coupling(&self) -> Result<CouplingConstants> {
        CouplingConstants::new(&self.v, &self.scaling)
    }

    /// `Q(z)` at the working order, checked against the doubled order.
    pub(crate) fn q_checked(&self, quantity: &'static str, z: Complex64) -> Result<Complex64> {
        let coarse = forms::q_form(&self.v, z, &self.rule);
        let fine = forms::q_form(&self.v, z, &self.fine);
        check_converged(quantity, coarse, fine)
    }

    /// `eps^-3 <R_0 V_eps, V_eps>` at `-kappa^2`, i.e. `Q(-eps kappa) / (2 kappa eps)`.
    pub(crate) fn scaled_inner(&self, kappa: f64) -> Result<f64> {
        let q = self.q_checked("<R0 V, V>", Complex64::new(-self.eps * kappa, 0.0))?;
        Ok(q.re / (2.0 * kappa * self.eps))
    }

    /// `(2/n) sum_l E_l(z)` with the potential moments `E_l(z) = int V_l(u) e^{zu} du`.
    pub(crate) fn vertex_moment(&self, z: Complex64, rule: &QuadratureRule) -> Complex64 {
        let (mass, rest) = forms::exp_moments(&self.v, z, rule);
        (rest + mass) * (2.0 / self.n() as f64)
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")))
    }
}

/// `<(-Delta_0 + kappa^2)^-1 V_eps, V_eps>`.
pub fn inner_rv_v(kappa: f64, op: &EpsOperator) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(op.scaled_inner(kappa)? * op.eps.powi(3))
}

/// `zeta_eps = (eps^3/lambda(eps) + <R_0 V_eps, V_eps>)^-1`.
pub fn zeta(op: &EpsOperator, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let e3 = op.eps.powi(3);
    let den = e3 / op.lambda_eps + inner_rv_v(kappa, op)?;
    if den.abs() <= tol::POLE * e3 {
        return Err(Error::AtPole { denominator: den.abs() });
    }
    Ok(1.0 / den)
}
