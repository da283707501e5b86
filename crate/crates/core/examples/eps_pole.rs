use starlab::eps::{default_bracket, find_pole, pole_asymptotic, EpsOperator};
use starlab::graph::{ScalingFunction, StarPotential};

fn main() -> starlab::Result<()> {
    let base = EpsOperator::new(StarPotential::reference(), ScalingFunction::resonant(-1.0)?, 0.125)?;
    let cc = base.coupling()?;
    println!("{:>10} {:>14} {:>14} {:>12}", "eps", "kappa", "predictor", "residual");
    for p in 3..=10 {
        let op = base.at_eps(0.5f64.powi(p))?;
        let pole = find_pole(&op, default_bracket(&op, &cc)?)?.expect("bound state");
        println!(
            "{:>10.3e} {:>14.10} {:>14.10} {:>12.2e}",
            op.eps(),
            pole.kappa,
            pole_asymptotic(&op, &cc)?,
            pole.residual
        );
    }
    Ok(())
}
