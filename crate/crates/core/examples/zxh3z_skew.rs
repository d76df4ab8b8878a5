//! Discrepancy profiles on `ℤ × H₃(ℤ)` for the product and skew generating
//! sets, with the fitted decay exponent of `D(n)/n`.

use nilcone::bfs::DEFAULT_BUDGET;
use nilcone::convergence::{fit_exponent, Comparison, SamplePolicy};
use nilcone::lattice::{GeneratingSet, Lattice};
use nilcone::pmp::distance::DistanceOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let radius: usize = std::env::args().nth(1).map_or(Ok(12), |s| s.parse())?;
    for preset in ["product", "skew"] {
        let lattice = Lattice::z_times_h3z();
        let gens = GeneratingSet::preset(&lattice, preset)?;
        let t = std::time::Instant::now();
        let cmp = Comparison::new(lattice, &gens, radius, DEFAULT_BUDGET, DistanceOptions::default())?;
        println!("{preset}: ball of radius {radius} has {} elements ({:.2?})", cmp.table().len(), t.elapsed());
        let policy = SamplePolicy {
            full_threshold: 20_000,
            sample: 2_000,
            seed: 0,
        };
        let mut rows = Vec::new();
        for n in (4..=radius).step_by(2) {
            let t = std::time::Instant::now();
            let r = cmp.pointwise(n, &policy)?;
            println!(
                "  n = {n:>3}  D = {:.6}  D/n = {:.6}  samples = {}  skipped = {}  ({:.2?})",
                r.discrepancy,
                r.discrepancy / n as f64,
                r.samples,
                r.skipped,
                t.elapsed()
            );
            rows.push((n as f64, r.discrepancy / n as f64));
        }
        match fit_exponent(&rows) {
            Ok(fit) => println!("  D(n)/n ~ n^-{:.3} (stderr {:.3})", fit.alpha, fit.stderr),
            Err(e) => println!("  no fit: {e}"),
        }
    }
    Ok(())
}
