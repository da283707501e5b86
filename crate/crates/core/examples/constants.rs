use starlab::graph::{boundary_matrices, CouplingConstants, ScalingFunction, StarPotential};

fn main() -> starlab::Result<()> {
    let v = StarPotential::reference();
    let cc = CouplingConstants::new(&v, &ScalingFunction::resonant(-1.0)?)?;
    println!("theta = {:?}", cc.theta);
    println!("A = {}, B = {}, beta = {}", cc.a, cc.b, cc.beta);
    println!("Pi = {}", cc.pi);
    let bp = boundary_matrices(&cc.theta, cc.beta)?;
    println!("A_bc = {}B_bc = {}", bp.a, bp.b);
    println!("|AB^T - BA^T| = {:.2e}, rank margin = {:.3}", bp.selfadjoint_residual(), bp.rank_margin());
    Ok(())
}
