use starlab::eps::EpsOperator;
use starlab::graph::{ScalingFunction, StarPotential};
use starlab::limit::smatrix_limit;
use starlab::scattering::smatrix_eps;

fn main() -> starlab::Result<()> {
    let base = EpsOperator::new(StarPotential::reference(), ScalingFunction::resonant(-1.0)?, 0.125)?;
    let cc = base.coupling()?;
    let k = 1.0;
    let limit = smatrix_limit(k, &cc)?;
    for p in 3..=8 {
        let op = base.at_eps(0.5f64.powi(p))?;
        let s = smatrix_eps(&op, k)?;
        println!(
            "eps = {:.3e}  |S_eps - S| = {:.4e}  unitarity {:.1e}",
            op.eps(),
            s.distance(&limit),
            s.unitarity_residual()
        );
    }
    Ok(())
}
