//! Solving the boundary value problem for normal extremals by shooting.

use std::sync::Arc;

use nilcone::algebra::{presets, GroupElement};
use nilcone::norm::Norm;
use nilcone::pmp::shoot::{shoot, ShootOptions};
use nilcone::space::HorizontalSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("h3, l2", presets::heisenberg(), Norm::L2(2), vec![0.0, 0.0, 1.0]),
        ("h3, l1", presets::heisenberg(), Norm::L1(2), vec![0.0, 0.0, 1.0]),
        ("h3, l2", presets::heisenberg(), Norm::L2(2), vec![1.0, 0.5, 0.3]),
        ("free3, l2", presets::free_rank3(), Norm::L2(3), vec![0.4, -0.3, 0.2, 0.3, -0.1, 0.2]),
    ];
    for (name, alg, norm, target) in cases {
        let sp = HorizontalSpace::polarized(Arc::new(alg), norm)?;
        let t = std::time::Instant::now();
        let r = shoot(&sp, &GroupElement::new(target.clone()), &ShootOptions::default())?;
        println!(
            "{name:>9} → {target:?}: length {:.6}, covector {:?}, residual {:.1e}, won by restart {}, {} restarts converged ({:.2?})",
            r.length,
            r.covector.iter().map(|x| (x * 1e6).round() / 1e6).collect::<Vec<_>>(),
            r.residual,
            r.restart,
            r.converged_restarts,
            t.elapsed()
        );
    }
    Ok(())
}
