//! The limit operator: closed-form resolvent kernel, point spectrum and
//! on-shell S-matrix, each paired with a dense linear-solve route through the
//! boundary matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{BoundaryPair, CouplingConstants, EdgeCoordinate};
use crate::tol;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `Im k > 0`, where the resolvent kernels are square integrable.
    Resolvent,
    /// Real `k > 0`.
    Scattering,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Momentum {
    k: Complex64,
    regime: Regime,
}

impl Momentum {
    pub fn resolvent(k: Complex64) -> Result<Self> {
        if !(k.im > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("resolvent momentum needs Im k > 0, got {k}")));
        }
        Ok(Self { k, regime: Regime::Resolvent })
    }

    /// `k = i kappa`, i.e. spectral parameter `-kappa^2`.
    pub fn imaginary(kappa: f64) -> Result<Self> {
        Self::resolvent(Complex64::new(0.0, kappa))
    }

    pub fn scattering(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("scattering momentum needs k > 0, got {k}")));
        }
        Ok(Self { k: Complex64::new(k, 0.0), regime: Regime::Scattering })
    }

    pub fn k(&self) -> Complex64 {
        self.k
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Free,
    Limit,
    Eps,
}

/// A resolvent kernel on `Gamma x Gamma` at a fixed spectral parameter.
pub trait KernelEvaluator: Sync {
    fn kind(&self) -> OperatorKind;
    fn eval(&self, p: EdgeCoordinate, q: EdgeCoordinate) -> Complex64;
}

/// `(i/2k) [delta_ij e^{ik|x-y|} + (2/n - delta_ij) e^{ik(x+y)}]`.
pub fn free_green(k: Momentum, p: EdgeCoordinate, q: EdgeCoordinate, n: usize) -> Complex64 {
    let k = k.k;
    let same = p.edge == q.edge;
    let delta = if same { 1.0 } else { 0.0 };
    let direct = if same { (I * k * (p.x - q.x).abs()).exp() } else { Complex64::new(0.0, 0.0) };
    I / (2.0 * k) * (direct + (2.0 / n as f64 - delta) * (I * k * (p.x + q.x)).exp())
}

/// `d/dx` of [`free_green`] in the first argument, taken at `x != y`.
pub fn free_green_dx(k: Momentum, p: EdgeCoordinate, q: EdgeCoordinate, n: usize) -> Complex64 {
    let k = k.k;
    let same = p.edge == q.edge;
    let delta = if same { 1.0 } else { 0.0 };
    let direct = if same {
        let sign = if p.x >= q.x { 1.0 } else { -1.0 };
        I * k * sign * (I * k * (p.x - q.x).abs()).exp()
    } else {
        Complex64::new(0.0, 0.0)
    };
    I / (2.0 * k) * (direct + (2.0 / n as f64 - delta) * I * k * (I * k * (p.x + q.x)).exp())
}

#[derive(Clone, Debug)]
pub struct FreeKernel {
    pub n: usize,
    pub k: Momentum,
}

impl KernelEvaluator for FreeKernel {
    fn kind(&self) -> OperatorKind {
        OperatorKind::Free
    }

    fn eval(&self, p: EdgeCoordinate, q: EdgeCoordinate) -> Complex64 {
        free_green(self.k, p, q, self.n)
    }
}

fn pole_denominator(k: Complex64, cc: &CouplingConstants) -> Result<Complex64> {
    let d = 1.0 + I * k * cc.beta * cc.b;
    if d.norm() <= tol::POLE {
        Err(Error::AtPole { denominator: d.norm() })
    } else {
        Ok(d)
    }
}

/// `Lambda_ij = beta Pi_ij / (1 + i k beta B)`.
pub fn lambda_matrix(k: Momentum, cc: &CouplingConstants) -> Result<DMatrix<Complex64>> {
    let d = pole_denominator(k.k, cc)?;
    Ok(cc.pi.map(|p| Complex64::from(cc.beta * p) / d))
}

fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(Complex64::from)
}

fn solve(lhs: DMatrix<Complex64>, rhs: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let lu = lhs.lu();
    let x = lu.solve(&rhs).ok_or_else(|| Error::SingularSystem("A + ikB is not invertible".into()))?;
    if x.iter().any(|z| !z.is_finite()) {
        return Err(Error::SingularSystem("A + ikB is numerically singular".into()));
    }
    Ok(x)
}

/// `Lambda = -(A + ikB)^{-1} B - (i/(kn)) J`, by a dense complex solve.
pub fn lambda_matrix_direct(k: Momentum, bp: &BoundaryPair, n: usize) -> Result<DMatrix<Complex64>> {
    let k = k.k;
    let a = complexify(&bp.a);
    let b = complexify(&bp.b);
    let tilde = -solve(&a + &b * (I * k), b)?;
    let shift = I / (k * n as f64);
    Ok(tilde.map(|z| z - shift))
}

/// Resolvent kernel `G_k + Lambda_ij e^{ik(x+y)}` of the limit operator.
#[derive(Clone, Debug)]
pub struct LimitKernel {
    n: usize,
    k: Momentum,
    lambda: DMatrix<Complex64>,
}

impl LimitKernel {
    pub fn lambda(&self) -> &DMatrix<Complex64> {
        &self.lambda
    }

    pub fn momentum(&self) -> Momentum {
        self.k
    }

    /// `d/dx` in the first argument, analytic.
    pub fn eval_dx(&self, p: EdgeCoordinate, q: EdgeCoordinate) -> Complex64 {
        let k = self.k.k;
        free_green_dx(self.k, p, q, self.n) + self.lambda[(p.edge, q.edge)] * I * k * (I * k * (p.x + q.x)).exp()
    }
}

impl KernelEvaluator for LimitKernel {
    fn kind(&self) -> OperatorKind {
        OperatorKind::Limit
    }

    fn eval(&self, p: EdgeCoordinate, q: EdgeCoordinate) -> Complex64 {
        free_green(self.k, p, q, self.n) + self.lambda[(p.edge, q.edge)] * (I * self.k.k * (p.x + q.x)).exp()
    }
}

pub fn resolvent_kernel_limit(cc: &CouplingConstants, k: Momentum) -> Result<LimitKernel> {
    if k.regime != Regime::Resolvent {
        return Err(Error::InvalidArgument("limit resolvent kernel needs Im k > 0".into()));
    }
    Ok(LimitKernel { n: cc.n(), k, lambda: lambda_matrix(k, cc)? })
}

/// `-1/(beta^2 B^2)` when `beta < 0`, nothing otherwise.
pub fn limit_point_spectrum(cc: &CouplingConstants) -> Result<Option<f64>> {
    if cc.beta == 0.0 {
        return Ok(None);
    }
    cc.require_nonzero_b()?;
    if cc.beta < 0.0 {
        Ok(Some(-1.0 / (cc.beta * cc.beta * cc.b * cc.b)))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleKind {
    Bound,
    Antibound,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitPole {
    pub kappa: f64,
    pub kind: PoleKind,
}

/// Zero of `1 - kappa beta B`.
pub fn limit_pole(cc: &CouplingConstants) -> Result<Option<LimitPole>> {
    if cc.beta == 0.0 {
        return Ok(None);
    }
    cc.require_nonzero_b()?;
    let kappa = 1.0 / (cc.beta * cc.b);
    let kind = if kappa > 0.0 { PoleKind::Bound } else { PoleKind::Antibound };
    Ok(Some(LimitPole { kappa, kind }))
}

/// On-shell scattering matrix; row `i` collects the amplitudes for a wave incoming along edge `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SMatrix {
    pub k: f64,
    pub entries: DMatrix<Complex64>,
}

impl SMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// Kirchhoff matrix `2/n - delta_ij`.
    pub fn kirchhoff(k: f64, n: usize) -> Self {
        let entries = DMatrix::from_fn(n, n, |i, j| Complex64::from(2.0 / n as f64 - if i == j { 1.0 } else { 0.0 }));
        Self { k, entries }
    }

    /// `max |(S* S - I)_ij|`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.n();
        let prod = self.entries.adjoint() * &self.entries - DMatrix::<Complex64>::identity(n, n);
        prod.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn symmetry_residual(&self) -> f64 {
        (&self.entries - self.entries.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator (spectral) norm of the difference.
    pub fn distance(&self, other: &SMatrix) -> f64 {
        (&self.entries - &other.entries).singular_values().iter().copied().fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_entry_distance(&self, other: &SMatrix) -> f64 {
        (&self.entries - &other.entries).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `S_ij = 2/n - delta_ij - 2ik beta Pi_ij / (1 + ik beta B)`.
pub fn smatrix_limit(k: f64, cc: &CouplingConstants) -> Result<SMatrix> {
    let m = Momentum::scattering(k)?;
    let d = pole_denominator(m.k, cc)?;
    let n = cc.n();
    let mut s = SMatrix::kirchhoff(k, n);
    for i in 0..n {
        for j in 0..n {
            s.entries[(i, j)] -= 2.0 * I * k * cc.beta * cc.pi[(i, j)] / d;
        }
    }
    Ok(s)
}

/// `S = -(A + ikB)^{-1}(A - ikB)` by a dense solve.
///
/// The solve returns one column per incoming edge; the matrix is transposed
/// into the row-per-incoming-edge layout of [`SMatrix`].
pub fn smatrix_direct(k: f64, bp: &BoundaryPair) -> Result<SMatrix> {
    Momentum::scattering(k)?;
    let a = complexify(&bp.a);
    let b = complexify(&bp.b);
    let ik = I * k;
    let cols = -solve(&a + &b * ik, &a - &b * ik)?;
    Ok(SMatrix { k, entries: cols.transpose() })
}
