//! Integrating normal extremals from an initial covector: circles for the
//! Euclidean norm, bang-bang squares for the l1 norm.

use std::f64::consts::PI;

use nilcone::algebra::presets;
use nilcone::norm::Norm;
use nilcone::pmp::{integrate_extremal, ExtremalState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alg = presets::heisenberg();
    // ξ_Z = 2π closes the l2 circle at time 1
    let s0 = ExtremalState::normal_at_identity(vec![1.0, 0.0, 2.0 * PI]);
    let traj = integrate_extremal(&alg, &Norm::L2(2), &s0, 1.0, 8)?;
    println!("l2: endpoint {:?}, expected (0, 0, 1/(4π) = {:.6})", traj.endpoint(), 1.0 / (4.0 * PI));
    print!("{}", traj.to_csv());

    // ξ_Z = 2 switches faces every unit of time: a square of side 1
    let s0 = ExtremalState::normal_at_identity(vec![1.0, 0.0, 2.0]);
    let traj = integrate_extremal(&alg, &Norm::L1(2), &s0, 4.0, 8)?;
    println!("l1: endpoint {:?}, expected (0, 0, 1)", traj.endpoint());
    for s in &traj.samples {
        println!("  t = {:.2}  u = {:?}", s.t, s.u);
    }
    Ok(())
}
