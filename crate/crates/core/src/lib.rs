//! Numerical laboratory for rank-one approximations of vertex couplings on a
//! star graph.
//!
//! A star graph with `n` half-line edges carries the family of operators
//! `-Delta^eps = -Delta_0 + (lambda(eps)/eps^3) V_eps <., V_eps>`, where
//! `-Delta_0` is the Kirchhoff Laplacian and `V_eps(x) = V(x/eps)` is a
//! zero-mean potential squeezed into `[0, eps]`. As `eps -> 0` the family
//! converges to a self-adjoint vertex coupling determined by the moments of
//! `V` and the scaling of `lambda`. The crate computes:
//!
//! * the coupling constants and boundary matrices ([`graph`]),
//! * the limit resolvent, eigenvalue and S-matrix ([`limit`]),
//! * the exact finite-`eps` resolvent, bound state ([`eps`]) and S-matrix ([`scattering`]),
//! * an independent finite-difference oracle ([`fd`]),
//! * configuration-driven experiments and rate fits ([`lab`]).

pub mod eps;
pub mod error;
pub mod fd;
pub mod graph;
pub mod lab;
pub mod limit;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod scattering;
pub mod tol;

pub use error::{Error, Result};
