use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tol;

/// Vertex condition `A Psi(0) + B Psi'(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPair {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl BoundaryPair {
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Max-entry asymmetry of `A B^T`.
    pub fn selfadjoint_residual(&self) -> f64 {
        let ab = &self.a * self.b.transpose();
        (&ab - ab.transpose()).abs().max()
    }

    /// Smallest singular value of the `n x 2n` block `(A|B)`.
    pub fn rank_margin(&self) -> f64 {
        let n = self.n();
        let mut block = DMatrix::zeros(n, 2 * n);
        block.view_mut((0, 0), (n, n)).copy_from(&self.a);
        block.view_mut((0, n), (n, n)).copy_from(&self.b);
        block.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Boundary matrices of the limit coupling; needs pairwise distinct `theta`.
///
/// Row 1 is the Kirchhoff row `-sum psi'_l(0) = 0`; row `j >= 2` encodes
/// `(psi_1 - psi_j)/(theta_1 - theta_j) = beta sum theta_l psi'_l(0)`.
pub fn boundary_matrices(theta: &[f64], beta: f64) -> Result<BoundaryPair> {
    let n = theta.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if (theta[i] - theta[j]).abs() <= tol::THETA {
                return Err(Error::DegenerateTheta { i, j, value: theta[i] });
            }
        }
    }
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    for c in 0..n {
        b[(0, c)] = -1.0;
    }
    for j in 1..n {
        a[(j, 0)] = 1.0 / (theta[0] - theta[j]);
        a[(j, j)] = 1.0 / (theta[j] - theta[0]);
        for c in 0..n {
            b[(j, c)] = -beta * theta[c];
        }
    }
    Ok(BoundaryPair { a, b })
}

pub fn check_selfadjoint(bp: &BoundaryPair) -> bool {
    bp.selfadjoint_residual() <= tol::SELF_ADJOINT && bp.rank_margin() > tol::RANK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_matrices() {
        let bp = boundary_matrices(&[0.5, -0.5, 0.0], 0.0).unwrap();
        assert_eq!(bp.b.row(0).iter().copied().collect::<Vec<_>>(), vec![-1.0; 3]);
        assert!(bp.b.rows(1, 2).iter().all(|&x| x == 0.0));
        assert_eq!(bp.a.row(0).iter().copied().collect::<Vec<_>>(), vec![0.0; 3]);
        assert_eq!(bp.a.row(1).iter().copied().collect::<Vec<_>>(), vec![1.0, -1.0, 0.0]);
        assert_eq!(bp.a.row(2).iter().copied().collect::<Vec<_>>(), vec![2.0, 0.0, -2.0]);
        assert!(check_selfadjoint(&bp));
        let bp = boundary_matrices(&[0.5, -0.5, 0.0], -9.0 / 4.0).unwrap();
        assert!(check_selfadjoint(&bp));
    }

    #[test]
    fn degenerate_theta() {
        assert!(matches!(boundary_matrices(&[0.5, 0.5, 0.0], 1.0), Err(Error::DegenerateTheta { i: 0, j: 1, .. })));
    }

    #[test]
    fn trivial_pairs() {
        let z = BoundaryPair { a: DMatrix::zeros(3, 3), b: DMatrix::zeros(3, 3) };
        assert!(!check_selfadjoint(&z));
        let dirichlet = BoundaryPair { a: DMatrix::identity(3, 3), b: DMatrix::zeros(3, 3) };
        assert!(check_selfadjoint(&dirichlet));
    }
}
