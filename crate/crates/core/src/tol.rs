//! Numerical tolerances shared across the crate.

/// Two theta values closer than this count as tied.
pub const THETA: f64 = 1e-9;
/// Allowed residual of the total mean of a potential.
pub const MEAN: f64 = 1e-12;
/// Symmetry residual of `A B^T` for admissible boundary pairs.
pub const SELF_ADJOINT: f64 = 1e-10;
/// Smallest singular value of `(A|B)` that still counts as full rank.
pub const RANK: f64 = 1e-10;
/// Guard on `|1 + i k beta B|` and on the scaled resolvent denominator.
pub const POLE: f64 = 1e-12;
/// Residual accepted at a root of the pole equation.
pub const ROOT: f64 = 1e-10;
/// Lower end of pole brackets.
pub const KAPPA_MIN: f64 = 1e-6;
/// Relative change allowed when the quadrature order is doubled.
pub const QUAD_REL: f64 = 1e-10;
/// Relative guard on `|1 - D|` in the scattering solve.
pub const FREDHOLM: f64 = 1e-12;
