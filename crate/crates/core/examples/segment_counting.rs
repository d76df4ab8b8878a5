//! Counting short-projection pieces of subdivided geodesics.

use std::f64::consts::PI;
use std::sync::Arc;

use nilcone::algebra::{presets, GroupElement};
use nilcone::norm::Norm;
use nilcone::path::count_irregular_segments;
use nilcone::pmp::distance::{DistanceEstimator, DistanceOptions};
use nilcone::space::HorizontalSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let target = GroupElement::new(vec![0.0, 0.0, 1.0]);
    for norm in [Norm::L1(2), Norm::L2(2)] {
        let sp = HorizontalSpace::polarized(Arc::new(presets::heisenberg()), norm)?;
        let path = DistanceEstimator::new(&sp, DistanceOptions::default()).estimate(&target)?.path;
        println!("{:?} geodesic of length {:.6}", sp.norm(), path.length(sp.norm()));
        for m in [2, 4, 8] {
            let counts: Vec<String> = [0.5, 2.0 * 2f64.sqrt() / PI, 0.95, 1.0]
                .iter()
                .map(|&r| Ok(format!("R={r:.4}: {}", count_irregular_segments(&sp, &path, m, r)?)))
                .collect::<Result<_, nilcone::path::PathError>>()?;
            println!("  M = {m}: {}", counts.join(", "));
        }
    }
    Ok(())
}
