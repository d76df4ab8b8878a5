//! Non-singularity verdicts for the preset algebras, with witnesses for the
//! singular ones.

use nilcone::algebra::presets;
use nilcone::nonsingular::{classify, witness_residual, ClassifyOptions, Verdict};

fn main() {
    let opts = ClassifyOptions::default();
    let algebras = [
        ("h3", presets::heisenberg()),
        ("R x h3", presets::r_times_heisenberg()),
        ("h3 x h3", presets::heisenberg_squared()),
        ("h5", presets::heisenberg5()),
        ("quaternionic", presets::quaternionic()),
        ("free rank 3", presets::free_rank3()),
    ];
    for (name, alg) in algebras {
        let rep = classify(&alg, &opts);
        match &rep.verdict {
            Verdict::NonSingular { epsilon } => println!("{name:>13}: non-singular, σ_min ≥ {epsilon:.6} ({})", rep.method),
            Verdict::Singular { witness, covector } => println!(
                "{name:>13}: singular, u = {witness:?}, ξ = {covector:?}, |ξᵀM(u)| = {:.1e} ({})",
                witness_residual(&alg, witness, covector),
                rep.method
            ),
            Verdict::Undecidable { observed, certified } => {
                println!("{name:>13}: undecidable, observed {observed:.3e}, certified {certified:.3e}")
            }
        }
    }
}
