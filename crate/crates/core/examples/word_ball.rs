//! Exact word metrics by breadth-first search: sphere sizes, growth degree
//! and single word lengths.

use nilcone::bfs::{bfs_ball, word_length, DEFAULT_BUDGET};
use nilcone::lattice::{GeneratingSet, Lattice};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let radius: usize = std::env::args().nth(1).map_or(Ok(20), |s| s.parse())?;
    for (lattice, gens) in [("h3z", "standard"), ("zxh3z", "skew"), ("z2", "standard")] {
        let l = Lattice::preset(lattice)?;
        let s = GeneratingSet::preset(&l, gens)?;
        let r = if lattice == "zxh3z" { radius.min(12) } else { radius };
        let t = std::time::Instant::now();
        let ball = bfs_ball(&l, &s, r, DEFAULT_BUDGET)?;
        println!(
            "{lattice} ({gens}): |B({r})| = {}, growth degree over [{}, {r}] = {:.3} ({:.2?})",
            ball.len(),
            r / 2,
            ball.growth_degree(r / 2, r).unwrap_or(f64::NAN),
            t.elapsed()
        );
        println!("  sphere sizes {:?}", &ball.sphere_sizes()[..ball.sphere_sizes().len().min(8)]);
    }
    let l = Lattice::h3z();
    let s = GeneratingSet::preset(&l, "standard")?;
    for z in [1, 4, 16, 64, 256] {
        println!("ρ(0, 0, {z}) = {}", word_length(&l, &s, &[0, 0, z], DEFAULT_BUDGET)?);
    }
    Ok(())
}
