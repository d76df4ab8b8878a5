//! Pointwise discrepancy `sup |ρ_S − d∞|` on spheres of the integer
//! Heisenberg group with standard generators.

use nilcone::bfs::DEFAULT_BUDGET;
use nilcone::convergence::{fit_exponent, Comparison, SamplePolicy};
use nilcone::lattice::{GeneratingSet, Lattice};
use nilcone::pmp::distance::DistanceOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let radius: usize = std::env::args().nth(1).map_or(Ok(24), |s| s.parse())?;
    let lattice = Lattice::h3z();
    let gens = GeneratingSet::preset(&lattice, "standard")?;
    let t = std::time::Instant::now();
    let cmp = Comparison::new(lattice, &gens, radius, DEFAULT_BUDGET, DistanceOptions::default())?;
    println!("ball of radius {radius}: {} elements ({:.2?})", cmp.table().len(), t.elapsed());
    let mut rows = Vec::new();
    for n in (8..=radius).step_by(4) {
        let t = std::time::Instant::now();
        let r = cmp.pointwise(n, &SamplePolicy::default())?;
        println!(
            "n = {n:>3}  D = {:.6}  D/n = {:.6}  samples = {}  skipped = {}  ({:.2?})",
            r.discrepancy,
            r.discrepancy / n as f64,
            r.samples,
            r.skipped,
            t.elapsed()
        );
        rows.push((n as f64, r.discrepancy / n as f64));
    }
    if let Ok(fit) = fit_exponent(&rows) {
        println!("scaled profile D(n)/n ~ n^-{:.3} (stderr {:.3})", fit.alpha, fit.stderr);
    }
    Ok(())
}
