//! Abnormal extremals built from singular witnesses: every horizontal
//! momentum vanishes and the maximum principle holds with ν = 0.

use std::sync::Arc;

use nilcone::algebra::presets;
use nilcone::nonsingular::{abnormal_from_witness, classify, ClassifyOptions, Verdict};
use nilcone::norm::Norm;
use nilcone::pmp::is_abnormal;
use nilcone::space::HorizontalSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, alg) in [("R x h3", presets::r_times_heisenberg()), ("h3 x h3", presets::heisenberg_squared())] {
        let p = alg.p();
        for norm in [Norm::L1(p), Norm::L2(p), Norm::Linf(p)] {
            let sp = HorizontalSpace::polarized(Arc::new(alg.clone()), norm)?;
            let Verdict::Singular { witness, covector } = classify(sp.algebra(), &ClassifyOptions::default()).verdict else {
                unreachable!("{name} is singular");
            };
            let (_, ext, path) = abnormal_from_witness(&sp, &witness, &covector)?;
            let res = ext.residuals(sp.algebra(), sp.norm(), 1.0, 100);
            let check = is_abnormal(&ext.trajectory(sp.algebra(), 1.0, 99));
            println!(
                "{name:>8} {:?}: control {:?}, endpoint {:?}, ODE {:.1e}, Hamiltonian {:.1e}, max |h_i| {:.1e}, abnormal {}",
                sp.norm(),
                ext.u,
                path.endpoint(&sp).coords,
                res.ode,
                res.max_hamiltonian,
                check.residual,
                check.abnormal
            );
        }
    }
    Ok(())
}
