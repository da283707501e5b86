use starlab::graph::CouplingConstants;
use starlab::limit::{limit_point_spectrum, limit_pole, smatrix_limit};

fn main() -> starlab::Result<()> {
    for beta in [-9.0 / 4.0, 9.0 / 4.0, 0.0] {
        let cc = CouplingConstants::from_theta(vec![0.5, -0.5, 0.0], beta);
        let pole = limit_pole(&cc)?;
        println!("beta = {beta}: eigenvalue {:?}, pole {:?}", limit_point_spectrum(&cc)?, pole);
        for k in [0.5, 1.0, 5.0] {
            let s = smatrix_limit(k, &cc)?;
            println!("  k = {k}: S_00 = {:.6}, unitarity residual {:.1e}", s.entries[(0, 0)], s.unitarity_residual());
        }
    }
    Ok(())
}
