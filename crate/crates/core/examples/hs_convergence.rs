use starlab::eps::EpsOperator;
use starlab::graph::{ScalingFunction, StarPotential};
use starlab::lab::{hs_distance, RateFit};

fn main() -> starlab::Result<()> {
    let base = EpsOperator::new(StarPotential::reference(), ScalingFunction::resonant(-1.0)?, 0.125)?;
    let cc = base.coupling()?;
    let mut pairs = Vec::new();
    for p in 3..=9 {
        let op = base.at_eps(0.5f64.powi(p))?;
        let d = hs_distance(&op, &cc, 1.0)?;
        println!("eps = {:.3e}  HS = {:.6}  tail <= {:.1e}", op.eps(), d.value, d.tail_bound);
        pairs.push((op.eps(), d.value));
    }
    let fit = RateFit::fit("hs_distance".to_string(), pairs)?;
    println!("slope {:.3}, R^2 {:.5}", fit.slope, fit.r_squared);
    Ok(())
}
