//! Finite-difference model of `-Delta^eps` on a star graph truncated at `x = L`.
//!
//! Each edge carries the nodes `h, 2h, ..., L`; the vertex value is one shared
//! unknown, so continuity is built in and the vertex row is the Kirchhoff
//! ghost-point stencil. Integrals use trapezoid weights (`nh/2` at the vertex,
//! `h` elsewhere), and the rank-one term is `sigma v (w v)^T`. Together with the
//! second-difference part this matrix is symmetric in the weighted inner
//! product.
//!
//! The matrix is a star of tridiagonal chains, solved in `O(N)` by eliminating
//! every chain towards the vertex; the rank-one term goes through
//! Sherman–Morrison.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::eps::EpsOperator;
use crate::error::{Error, Result};
use crate::graph::EdgeCoordinate;
use crate::limit::SMatrix;
use crate::roots::brent;

/// Largest admissible step.
pub const MAX_STEP: f64 = 1e-2;
/// Accepted band for the ratio of successive eigenvalue differences under halving.
const RICHARDSON_BAND: (f64, f64) = (2.5, 6.5);

pub trait Scalar:
    Copy
    + Default
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    /// `u(L) = 0`.
    Dirichlet,
    /// `u'(L) - ik u(L) = r`, eliminated with a ghost node.
    Radiation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteStarGraph {
    n: usize,
    length: f64,
    step: f64,
    nodes: usize,
}

impl DiscreteStarGraph {
    pub fn new(n: usize, length: f64, step: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need n >= 2 edges, got {n}")));
        }
        if !(length >= 2.0 && length.is_finite()) {
            return Err(Error::InvalidArgument(format!("truncation length must be >= 2, got {length}")));
        }
        if !(step > 0.0) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
        }
        if step > MAX_STEP {
            return Err(Error::GridTooCoarse(format!("h = {step} exceeds {MAX_STEP}")));
        }
        let ratio = length / step;
        let nodes = ratio.round();
        if (ratio - nodes).abs() > 1e-9 * ratio {
            return Err(Error::InvalidArgument(format!("L/h = {ratio} is not an integer")));
        }
        Ok(Self { n, length, step, nodes: nodes as usize })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Same truncation with the step halved.
    pub fn refined(&self) -> Self {
        Self { step: 0.5 * self.step, nodes: 2 * self.nodes, ..self.clone() }
    }

    /// Unknowns per edge.
    pub fn unknowns_per_edge(&self, closure: Closure) -> usize {
        match closure {
            Closure::Dirichlet => self.nodes - 1,
            Closure::Radiation => self.nodes,
        }
    }

    pub fn len(&self, closure: Closure) -> usize {
        1 + self.n * self.unknowns_per_edge(closure)
    }

    /// Node index of `(edge, x)` if `x` is a grid point.
    pub fn index_of(&self, p: EdgeCoordinate, closure: Closure) -> Result<usize> {
        let s = p.x / self.step;
        let sr = s.round();
        let m = self.unknowns_per_edge(closure);
        if (s - sr).abs() > 1e-9 * s.max(1.0) || sr as usize > m || p.edge >= self.n {
            return Err(Error::InvalidArgument(format!("({}, {}) is not an interior grid node", p.edge, p.x)));
        }
        Ok(if sr == 0.0 { 0 } else { 1 + p.edge * m + sr as usize - 1 })
    }

    /// Trapezoid weights in the unknown layout.
    pub fn weights(&self, closure: Closure) -> Vec<f64> {
        let mut w = vec![self.step; self.len(closure)];
        w[0] = 0.5 * self.n as f64 * self.step;
        w
    }

    /// Samples of `V_eps`: the edge mean at the vertex, the mean of one-sided limits at jumps.
    pub fn potential_samples(&self, op: &EpsOperator, closure: Closure) -> Vec<f64> {
        let m = self.unknowns_per_edge(closure);
        let v = op.potential();
        let mut out = Vec::with_capacity(self.len(closure));
        out.push(v.profiles().iter().map(|p| p.right_limit(0.0)).sum::<f64>() / self.n as f64);
        for j in 0..self.n {
            let p = v.profile(j);
            out.extend((1..=m).map(|s| p.eval_midpoint(s as f64 * self.step / op.eps())));
        }
        out
    }
}

/// Star of identical tridiagonal chains joined at a vertex row.
#[derive(Clone, Debug)]
pub struct StarTridiagonal<T> {
    n: usize,
    vertex_diag: T,
    /// Coefficient of `u_{j,1}` in the vertex row.
    vertex_off: T,
    /// Row `s` of each chain: `lower[s] u_{s-1} + diag[s] u_s + upper[s] u_{s+1}`; `u_0` is the vertex.
    lower: Vec<T>,
    diag: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> StarTridiagonal<T> {
    pub fn m(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, u: &[T]) -> Vec<T> {
        let m = self.m();
        let mut out = vec![T::default(); u.len()];
        out[0] = self.vertex_diag * u[0];
        for j in 0..self.n {
            let base = 1 + j * m;
            out[0] = out[0] + self.vertex_off * u[base];
            for s in 0..m {
                let prev = if s == 0 { u[0] } else { u[base + s - 1] };
                let mut acc = self.lower[s] * prev + self.diag[s] * u[base + s];
                if s + 1 < m {
                    acc = acc + self.upper[s] * u[base + s + 1];
                }
                out[base + s] = acc;
            }
        }
        out
    }

    /// Solve by elimination of every chain towards the vertex.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let m = self.m();
        let singular = || Error::SingularSystem("zero pivot in star-tridiagonal elimination".into());
        // u_s = alpha_s u_{s-1} + gamma_s
        let mut alpha = vec![T::default(); m];
        let mut denom = vec![T::default(); m];
        for s in (0..m).rev() {
            let d = if s + 1 < m { self.diag[s] + self.upper[s] * alpha[s + 1] } else { self.diag[s] };
            if d.modulus() == 0.0 || !d.modulus().is_finite() {
                return Err(singular());
            }
            denom[s] = d;
            alpha[s] = -self.lower[s] / d;
        }
        let mut u = vec![T::default(); rhs.len()];
        let mut gamma = vec![T::default(); m];
        let mut pivot = self.vertex_diag;
        let mut r0 = rhs[0];
        let mut gammas = Vec::with_capacity(self.n);
        for j in 0..self.n {
            let base = 1 + j * m;
            for s in (0..m).rev() {
                let carry = if s + 1 < m { self.upper[s] * gamma[s + 1] } else { T::default() };
                gamma[s] = (rhs[base + s] - carry) / denom[s];
            }
            pivot = pivot + self.vertex_off * alpha[0];
            r0 = r0 - self.vertex_off * gamma[0];
            gammas.push(gamma.clone());
        }
        if pivot.modulus() == 0.0 || !pivot.modulus().is_finite() {
            return Err(singular());
        }
        u[0] = r0 / pivot;
        for (j, g) in gammas.iter().enumerate() {
            let base = 1 + j * m;
            let mut prev = u[0];
            for s in 0..m {
                let val = alpha[s] * prev + g[s];
                u[base + s] = val;
                prev = val;
            }
        }
        Ok(u)
    }
}

impl StarTridiagonal<f64> {
    /// `self - shift I` over the scalar type `T`.
    pub fn shifted<T: Scalar>(&self, shift: T) -> StarTridiagonal<T> {
        let conv = |v: &[f64]| v.iter().map(|&x| T::from(x)).collect::<Vec<T>>();
        StarTridiagonal {
            n: self.n,
            vertex_diag: T::from(self.vertex_diag) - shift,
            vertex_off: T::from(self.vertex_off),
            lower: conv(&self.lower),
            diag: self.diag.iter().map(|&x| T::from(x) - shift).collect(),
            upper: conv(&self.upper),
        }
    }
}

/// Second-difference part of the discrete operator.
///
/// With [`Closure::Radiation`] the last row holds only the ghost-node
/// elimination `(2 u_M - 2 u_{M-1}) / h^2`; the `-2ik/h` term is added by the
/// scattering solve.
pub fn laplacian(g: &DiscreteStarGraph, closure: Closure) -> StarTridiagonal<f64> {
    let h2 = g.step * g.step;
    let m = g.unknowns_per_edge(closure);
    let mut lower = vec![-1.0 / h2; m];
    let mut upper = vec![-1.0 / h2; m];
    upper[m - 1] = 0.0;
    if closure == Closure::Radiation {
        lower[m - 1] = -2.0 / h2;
    }
    StarTridiagonal {
        n: g.n,
        vertex_diag: 2.0 / h2,
        vertex_off: -2.0 / (g.n as f64 * h2),
        lower,
        diag: vec![2.0 / h2; m],
        upper,
    }
}

fn dot<T: Scalar>(a: &[f64], b: &[T]) -> T {
    a.iter().zip(b).fold(T::default(), |acc, (&x, &y)| acc + y * T::from(x))
}

/// Solve `(T + sigma v q^T) u = b` given the chain solver for `T`.
fn sherman_morrison<T: Scalar>(t: &StarTridiagonal<T>, sigma: f64, v: &[f64], q: &[f64], b: &[T]) -> Result<Vec<T>> {
    let y = t.solve(b)?;
    let vt: Vec<T> = v.iter().map(|&x| T::from(x)).collect();
    let z = t.solve(&vt)?;
    let den = T::from(1.0) + dot(q, &z) * T::from(sigma);
    if den.modulus() <= 1e-13 {
        return Err(Error::SingularSystem(format!("rank-one update denominator {:e}", den.modulus())));
    }
    let coef = dot(q, &y) * T::from(sigma) / den;
    Ok(y.iter().zip(&z).map(|(&yi, &zi)| yi - coef * zi).collect())
}

/// Bound-state discretization of one operator on one grid.
pub struct DiscreteOperator {
    pub graph: DiscreteStarGraph,
    pub laplacian: StarTridiagonal<f64>,
    pub sigma: f64,
    pub v: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DiscreteOperator {
    pub fn new(op: &EpsOperator, graph: DiscreteStarGraph) -> Self {
        let laplacian = laplacian(&graph, Closure::Dirichlet);
        let v = graph.potential_samples(op, Closure::Dirichlet);
        let weights = graph.weights(Closure::Dirichlet);
        Self { graph, laplacian, sigma: op.strength(), v, weights }
    }

    fn q(&self) -> Vec<f64> {
        self.weights.iter().zip(&self.v).map(|(w, v)| w * v).collect()
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let proj = self.sigma * dot(&self.q(), u);
        self.laplacian.matvec(u).iter().zip(&self.v).map(|(a, v)| a + proj * v).collect()
    }

    /// `max |w_a M_ab - w_b M_ba|` over all pairs, probing with unit vectors on the stencil.
    pub fn weighted_symmetry_residual(&self) -> f64 {
        let len = self.v.len();
        let m = self.laplacian.m();
        let t = &self.laplacian;
        let mut worst: f64 = 0.0;
        let w = &self.weights;
        for j in 0..self.graph.n {
            let base = 1 + j * m;
            worst = worst.max((w[0] * t.vertex_off - w[base] * t.lower[0]).abs());
            for s in 0..m - 1 {
                worst = worst.max((w[base + s] * t.upper[s] - w[base + s + 1] * t.lower[s + 1]).abs());
            }
        }
        let q = self.q();
        for a in (0..len).step_by(97) {
            for b in (0..len).step_by(89) {
                let ab = w[a] * self.sigma * self.v[a] * q[b];
                let ba = w[b] * self.sigma * self.v[b] * q[a];
                worst = worst.max((ab - ba).abs());
            }
        }
        worst
    }

    /// `1 + sigma q^T (T - mu)^-1 v`; its zeros below the spectrum of `T` are the negative eigenvalues.
    pub fn secular(&self, mu: f64) -> Result<f64> {
        let z = self.laplacian.shifted(mu).solve(&self.v)?;
        Ok(1.0 + self.sigma * dot(&self.q(), &z))
    }

    /// Smallest eigenvalue if negative.
    pub fn lowest_negative_eigenvalue(&self) -> Result<Option<f64>> {
        if self.sigma >= 0.0 || self.v.iter().all(|&x| x == 0.0) {
            return Ok(None);
        }
        if self.secular(0.0)? >= 0.0 {
            return Ok(None);
        }
        let norm2: f64 = self.q().iter().zip(&self.v).map(|(q, v)| q * v).sum();
        let lo = 1.01 * self.sigma * norm2;
        let mut err = None;
        let root = brent(
            |mu| match self.secular(mu) {
                Ok(g) => g,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            },
            lo,
            0.0,
            1e-14,
            4.0 * f64::EPSILON,
            200,
        );
        if let Some(e) = err {
            return Err(e);
        }
        root.map(Some).ok_or_else(|| Error::SingularSystem("secular equation has no bracketed root".into()))
    }
}

/// Two Richardson steps for an `h^2, h^4` error expansion from values at `h, h/2, h/4`.
pub fn richardson<T: Scalar>(coarse: T, mid: T, fine: T) -> T {
    let e1 = (T::from(4.0) * mid - coarse) / T::from(3.0);
    let e2 = (T::from(4.0) * fine - mid) / T::from(3.0);
    (T::from(16.0) * e2 - e1) / T::from(15.0)
}

/// Discrete eigenvalues on `h, h/2, h/4` and their Richardson extrapolation.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueEstimate {
    pub levels: Vec<(f64, f64)>,
    /// `(mu(h) - mu(h/2)) / (mu(h/2) - mu(h/4))`, close to 4 for a second-order scheme.
    pub ratio: f64,
    pub extrapolated: f64,
}

pub fn eigenvalue_estimate(op: &EpsOperator, length: f64, step: f64) -> Result<Option<EigenvalueEstimate>> {
    let mut g = DiscreteStarGraph::new(op.n(), length, step)?;
    let mut levels = Vec::with_capacity(3);
    for _ in 0..3 {
        let mu = DiscreteOperator::new(op, g.clone()).lowest_negative_eigenvalue()?;
        levels.push((g.step(), mu));
        g = g.refined();
    }
    let found = levels.iter().filter(|(_, mu)| mu.is_some()).count();
    if found == 0 {
        return Ok(None);
    }
    if found < 3 {
        return Err(Error::GridTooCoarse(format!("bound state resolved on only {found} of 3 grids from h = {step}")));
    }
    let mu: Vec<f64> = levels.iter().map(|(_, m)| m.unwrap()).collect();
    let ratio = (mu[0] - mu[1]) / (mu[1] - mu[2]);
    if !(RICHARDSON_BAND.0..=RICHARDSON_BAND.1).contains(&ratio) {
        return Err(Error::GridTooCoarse(format!("Richardson ratio {ratio:.3} at h = {step} is not near 4")));
    }
    let extrapolated = richardson(mu[0], mu[1], mu[2]);
    Ok(Some(EigenvalueEstimate {
        levels: levels.into_iter().map(|(h, m)| (h, m.unwrap())).collect(),
        ratio,
        extrapolated,
    }))
}

/// Negative eigenvalue of the discretized operator, extrapolated in `h`.
pub fn oracle_eigenvalue(op: &EpsOperator, length: f64, step: f64) -> Result<Option<f64>> {
    Ok(eigenvalue_estimate(op, length, step)?.map(|e| e.extrapolated))
}

/// Grid function on the truncated star, vertex value shared by all edges.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    pub step: f64,
    pub vertex: T,
    /// `edges[j][s]` is the value at `x = (s + 1) h`.
    pub edges: Vec<Vec<T>>,
}

impl<T: Copy> GridFunction<T> {
    fn from_layout(u: &[T], n: usize, step: f64) -> Self {
        let m = (u.len() - 1) / n;
        let edges = (0..n).map(|j| u[1 + j * m..1 + (j + 1) * m].to_vec()).collect();
        Self { step, vertex: u[0], edges }
    }

    /// Value at a grid node.
    pub fn at(&self, p: EdgeCoordinate) -> Option<T> {
        let s = p.x / self.step;
        let sr = s.round();
        if (s - sr).abs() > 1e-9 * s.max(1.0) {
            return None;
        }
        if sr == 0.0 {
            return Some(self.vertex);
        }
        self.edges.get(p.edge)?.get(sr as usize - 1).copied()
    }

    /// All nodes as `(edge, x, value)`, the vertex listed once on edge 0.
    pub fn samples(&self) -> Vec<(usize, f64, T)> {
        let mut out = vec![(0, 0.0, self.vertex)];
        for (j, e) in self.edges.iter().enumerate() {
            out.extend(e.iter().enumerate().map(|(s, &v)| (j, (s + 1) as f64 * self.step, v)));
        }
        out
    }
}

/// Column `y -> R(source, y)` of the discrete resolvent at `-kappa^2` on one grid.
pub fn discrete_resolvent_column(
    op: &EpsOperator,
    kappa: f64,
    source: EdgeCoordinate,
    length: f64,
    step: f64,
) -> Result<GridFunction<f64>> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    let d = DiscreteOperator::new(op, DiscreteStarGraph::new(op.n(), length, step)?);
    let idx = d.graph.index_of(source, Closure::Dirichlet)?;
    let mut rhs = vec![0.0; d.v.len()];
    rhs[idx] = 1.0 / d.weights[idx];
    let t = d.laplacian.shifted(-kappa * kappa);
    let u = sherman_morrison(&t, d.sigma, &d.v, &d.q(), &rhs)?;
    Ok(GridFunction::from_layout(&u, op.n(), step))
}

/// Resolvent column on the nodes of step `h`, extrapolated from `h, h/2, h/4`.
pub fn oracle_resolvent_column(
    op: &EpsOperator,
    kappa: f64,
    source: EdgeCoordinate,
    length: f64,
    step: f64,
) -> Result<GridFunction<f64>> {
    let c0 = discrete_resolvent_column(op, kappa, source, length, step)?;
    let c1 = discrete_resolvent_column(op, kappa, source, length, 0.5 * step)?;
    let c2 = discrete_resolvent_column(op, kappa, source, length, 0.25 * step)?;
    let edges = c0
        .edges
        .iter()
        .enumerate()
        .map(|(j, e)| {
            e.iter().enumerate().map(|(s, &v)| richardson(v, c1.edges[j][2 * s + 1], c2.edges[j][4 * s + 3])).collect()
        })
        .collect();
    Ok(GridFunction { step, vertex: richardson(c0.vertex, c1.vertex, c2.vertex), edges })
}

/// S-matrix of the discrete scattering problem on one grid, with an exact radiation closure at `x = L`.
pub fn discrete_smatrix(op: &EpsOperator, k: f64, length: f64, step: f64) -> Result<SMatrix> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("scattering momentum must be positive, got {k}")));
    }
    let g = DiscreteStarGraph::new(op.n(), length, step)?;
    if op.eps() * op.potential().support_end() > length {
        return Err(Error::InvalidArgument("radiation closure must lie beyond the potential support".into()));
    }
    let mut t = laplacian(&g, Closure::Radiation).shifted(Complex64::from(k * k));
    let m = t.m();
    t.diag[m - 1] -= Complex64::new(0.0, 2.0 * k / step);
    let v = g.potential_samples(op, Closure::Radiation);
    let mut q: Vec<f64> = g.weights(Closure::Radiation).iter().zip(&v).map(|(w, v)| w * v).collect();
    // trapezoid end weight at x = L
    for j in 0..g.n {
        q[j * m + m] *= 0.5;
    }
    let n = g.n;
    let ik = Complex64::new(0.0, k);
    let mut entries = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        let r = -2.0 * ik * (-ik * length).exp();
        let mut rhs = vec![Complex64::default(); g.len(Closure::Radiation)];
        rhs[1 + i * m + m - 1] = r * (2.0 / step);
        let u = sherman_morrison(&t, op.strength(), &v, &q, &rhs)?;
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            let at_l = u[1 + j * m + m - 1];
            entries[(i, j)] = (at_l - delta * (-ik * length).exp()) * (-ik * length).exp();
        }
    }
    Ok(SMatrix { k, entries })
}

/// S-matrix extrapolated from the discrete problems at `h, h/2, h/4`.
pub fn oracle_smatrix(op: &EpsOperator, k: f64, length: f64, step: f64) -> Result<SMatrix> {
    let s0 = discrete_smatrix(op, k, length, step)?;
    let s1 = discrete_smatrix(op, k, length, 0.5 * step)?;
    let s2 = discrete_smatrix(op, k, length, 0.25 * step)?;
    let entries = s0.entries.zip_zip_map(&s1.entries, &s2.entries, richardson);
    Ok(SMatrix { k, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eps::{default_bracket, find_pole, resolvent_eps_kernel};
    use crate::graph::{ScalingFunction, StarPotential};
    use crate::limit::{free_green, KernelEvaluator, Momentum};
    use crate::scattering::smatrix_eps;

    fn op(lambda1: f64, eps: f64) -> EpsOperator {
        EpsOperator::new(StarPotential::reference(), ScalingFunction::resonant(lambda1).unwrap(), eps).unwrap()
    }

    fn free(n: usize) -> EpsOperator {
        EpsOperator::new(StarPotential::zero(n).unwrap(), ScalingFunction::explicit(1.0, 1.0).unwrap(), 0.1).unwrap()
    }

    fn pt(edge: usize, x: f64) -> EdgeCoordinate {
        EdgeCoordinate::new(edge, x).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(DiscreteStarGraph::new(3, 40.0, 0.1), Err(Error::GridTooCoarse(_))));
        assert!(DiscreteStarGraph::new(3, 1.0, 1e-3).is_err());
        assert!(DiscreteStarGraph::new(3, 2.0, 3e-3).is_err());
        let g = DiscreteStarGraph::new(3, 2.0, 5e-3).unwrap();
        assert_eq!(g.len(Closure::Dirichlet), 1 + 3 * 399);
        assert_eq!(g.index_of(pt(1, 0.01), Closure::Dirichlet).unwrap(), 1 + 399 + 1);
    }

    #[test]
    fn chain_solver_inverts_matvec() {
        let g = DiscreteStarGraph::new(4, 2.0, 1e-2).unwrap();
        let t = laplacian(&g, Closure::Dirichlet).shifted(-0.3);
        let u: Vec<f64> = (0..g.len(Closure::Dirichlet)).map(|i| ((i * 37 % 11) as f64 - 5.0) * 0.1).collect();
        let back = t.solve(&t.matvec(&u)).unwrap();
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).abs() < 1e-9);
        }
        let tc = laplacian(&g, Closure::Radiation).shifted(Complex64::new(1.0, 0.5));
        let uc: Vec<Complex64> = (0..g.len(Closure::Radiation)).map(|i| Complex64::new(i as f64 * 1e-3, 1.0)).collect();
        let back = tc.solve(&tc.matvec(&uc)).unwrap();
        for (a, b) in uc.iter().zip(&back) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn secular_root_matches_dense_eigensolver() {
        let o = op(-1.0, 0.5);
        let d = DiscreteOperator::new(&o, DiscreteStarGraph::new(3, 4.0, 1e-2).unwrap());
        let len = d.v.len();
        let sq: Vec<f64> = d.weights.iter().map(|w| w.sqrt()).collect();
        let mut dense = nalgebra::DMatrix::zeros(len, len);
        for c in 0..len {
            let mut e = vec![0.0; len];
            e[c] = 1.0;
            let col = d.apply(&e);
            for r in 0..len {
                dense[(r, c)] = sq[r] * col[r] / sq[c];
            }
        }
        let asym = (&dense - dense.transpose()).amax();
        assert!(asym < 1e-8 * dense.amax(), "asymmetry {asym}");
        let eig = nalgebra::SymmetricEigen::new(dense).eigenvalues;
        let lowest = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let second = eig.iter().copied().filter(|&x| x > lowest).fold(f64::INFINITY, f64::min);
        let mu = d.lowest_negative_eigenvalue().unwrap().unwrap();
        assert!((mu - lowest).abs() < 1e-9 * lowest.abs(), "{mu} vs {lowest}");
        assert!(second > 0.0);
        assert!(d.weighted_symmetry_residual() < 1e-9);
    }

    #[test]
    fn free_graph_has_no_eigenvalue() {
        assert_eq!(oracle_eigenvalue(&free(3), 10.0, 1e-2).unwrap(), None);
        assert_eq!(oracle_eigenvalue(&op(1.0, 0.05), 10.0, 1e-2).unwrap(), None);
    }

    #[test]
    fn eigenvalue_matches_pole() {
        let o = op(-1.0, 0.05);
        let cc = o.coupling().unwrap();
        let pole = find_pole(&o, default_bracket(&o, &cc).unwrap()).unwrap().unwrap();
        let est = eigenvalue_estimate(&o, 40.0, 5e-3).unwrap().unwrap();
        let rel = (est.extrapolated - pole.eigenvalue).abs() / pole.eigenvalue.abs();
        assert!(rel < 1e-2, "{} vs {} (ratio {})", est.extrapolated, pole.eigenvalue, est.ratio);
    }

    #[test]
    fn free_resolvent_column() {
        let col = oracle_resolvent_column(&free(3), 1.0, pt(1, 0.7), 20.0, 5e-3).unwrap();
        let m = Momentum::imaginary(1.0).unwrap();
        let worst = col
            .samples()
            .into_iter()
            .map(|(j, x, v)| (v - free_green(m, pt(1, 0.7), pt(j, x), 3).re).abs())
            .fold(0.0, f64::max);
        assert!(worst < 5e-4, "sup error {worst}");
    }

    #[test]
    fn resolvent_column_symmetry() {
        let o = op(-1.0, 0.1);
        let (a, b) = (pt(0, 0.05), pt(1, 0.3));
        let ca = oracle_resolvent_column(&o, 1.0, a, 10.0, 5e-3).unwrap();
        let cb = oracle_resolvent_column(&o, 1.0, b, 10.0, 5e-3).unwrap();
        assert!((ca.at(b).unwrap() - cb.at(a).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn resolvent_column_matches_kernel() {
        let o = op(-1.0, 0.1);
        let src = pt(0, 0.5);
        let col = oracle_resolvent_column(&o, 1.0, src, 20.0, 5e-3).unwrap();
        let k = resolvent_eps_kernel(&o, 1.0).unwrap();
        let worst = col
            .samples()
            .into_iter()
            .filter(|&(j, x, _)| !(j == 0 && (x - 0.5).abs() < 0.05))
            .map(|(j, x, v)| (v - k.eval(src, pt(j, x)).re).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-3, "sup error {worst}");
    }

    #[test]
    fn discrete_smatrix_is_second_order() {
        let o = op(-1.0, 0.1);
        let exact = smatrix_eps(&o, 1.0).unwrap();
        let e: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&h| discrete_smatrix(&o, 1.0, 2.0, h).unwrap().max_entry_distance(&exact))
            .collect();
        for w in e.windows(2) {
            assert!((3.5..4.5).contains(&(w[0] / w[1])), "{e:?}");
        }
        assert!(discrete_smatrix(&o, 1.0, 2.0, 5e-3).unwrap().unitarity_residual() < 1e-12);
    }

    #[test]
    fn free_smatrix_is_kirchhoff() {
        let s = oracle_smatrix(&free(3), 1.0, 2.0, 5e-3).unwrap();
        assert!(s.max_entry_distance(&SMatrix::kirchhoff(1.0, 3)) < 1e-4);
        assert!(s.unitarity_residual() < 1e-4);
    }

    #[test]
    fn smatrix_matches_exact() {
        let o = op(-1.0, 0.1);
        let fd = oracle_smatrix(&o, 1.0, 2.0, 5e-3).unwrap();
        let exact = smatrix_eps(&o, 1.0).unwrap();
        let d = fd.max_entry_distance(&exact);
        assert!(d < 1e-3, "entry error {d}");
    }
}
