//! The star graph, the potential profile and the constants of the limit coupling.

mod boundary;
mod coupling;
mod potential;

pub use boundary::{boundary_matrices, check_selfadjoint, BoundaryPair};
pub use coupling::{constants_b_pi, coupling_beta, CouplingConstants, ScalingFunction};
pub use potential::{constant_a, moments_theta, validate_potential, EdgeCoordinate, Piece, Profile, StarPotential};
