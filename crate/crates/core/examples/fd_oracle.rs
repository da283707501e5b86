use starlab::eps::{default_bracket, find_pole, EpsOperator};
use starlab::fd::{oracle_eigenvalue, oracle_smatrix};
use starlab::graph::{ScalingFunction, StarPotential};
use starlab::scattering::smatrix_eps;

fn main() -> starlab::Result<()> {
    let op = EpsOperator::new(StarPotential::reference(), ScalingFunction::resonant(-1.0)?, 0.05)?;
    let cc = op.coupling()?;
    let exact = find_pole(&op, default_bracket(&op, &cc)?)?.map(|p| p.eigenvalue);
    let fd = oracle_eigenvalue(&op, 40.0, 5e-3)?;
    println!("eigenvalue: root {exact:?}, finite differences {fd:?}");

    let op = op.at_eps(0.1)?;
    let s = smatrix_eps(&op, 1.0)?;
    let s_fd = oracle_smatrix(&op, 1.0, 2.0, 5e-3)?;
    println!("S-matrix at k = 1: max entry difference {:.2e}", s.max_entry_distance(&s_fd));
    Ok(())
}
