//! Two-sided distance estimates with the method behind each bound.

use std::sync::Arc;

use nilcone::algebra::{presets, GroupElement};
use nilcone::norm::Norm;
use nilcone::pmp::distance::{DistanceEstimator, DistanceOptions};
use nilcone::space::HorizontalSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let hexagon = Norm::polytope(vec![
        vec![1.0, 0.0],
        vec![0.5, 0.8660254037844386],
        vec![-0.5, 0.8660254037844386],
        vec![-1.0, 0.0],
        vec![-0.5, -0.8660254037844386],
        vec![0.5, -0.8660254037844386],
    ])?;
    let cases = [
        ("h3, l2", presets::heisenberg(), Norm::L2(2), vec![0.0, 0.0, 1.0]),
        ("h3, l1", presets::heisenberg(), Norm::L1(2), vec![0.0, 0.0, 1.0]),
        ("h3, hexagon", presets::heisenberg(), hexagon, vec![0.7, -0.2, 0.4]),
        ("h3 x h3, l1", presets::heisenberg_squared(), Norm::L1(4), vec![1.0, 0.0, 0.5, 0.0, 0.3, -0.2]),
        ("free3, l2", presets::free_rank3(), Norm::L2(3), vec![0.4, -0.3, 0.2, 0.3, -0.1, 0.2]),
    ];
    for (name, alg, norm, target) in cases {
        let sp = HorizontalSpace::polarized(Arc::new(alg), norm)?;
        let est = DistanceEstimator::new(&sp, DistanceOptions::default());
        let t = std::time::Instant::now();
        let d = est.estimate(&GroupElement::new(target.clone()))?;
        println!(
            "{name:>12} → {target:?}: [{:.6}, {:.6}] lower by {:?}, upper by {:?}, {} pieces, K1 ≈ {:.4} ({:.2?})",
            d.lower,
            d.upper,
            d.lower_method,
            d.upper_method,
            d.path.simplified().len(),
            est.k1().value,
            t.elapsed()
        );
    }
    Ok(())
}
