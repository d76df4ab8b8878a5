//! Word metrics on lattices by breadth-first search of the Cayley graph.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{Elem, GeneratingSet, Lattice, LatticeError};

/// Default element budget.
pub const DEFAULT_BUDGET: usize = 200_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BfsError {
    #[error("element budget {budget} exceeded after completing radius {completed_radius}")]
    BudgetExceeded { completed_radius: usize, budget: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Exact word lengths on a ball `B(n)`.
#[derive(Debug, Clone)]
pub struct BallTable {
    radius: usize,
    lengths: HashMap<Elem, u32>,
    /// `spheres[r]`, sorted.
    spheres: Vec<Vec<Elem>>,
}

impl BallTable {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn word_length(&self, g: &[i64]) -> Option<u32> {
        self.lengths.get(g).copied()
    }

    pub fn sphere(&self, r: usize) -> &[Elem] {
        self.spheres.get(r).map_or(&[], Vec::as_slice)
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.spheres.iter().map(Vec::len).collect()
    }

    pub fn ball_size(&self, r: usize) -> usize {
        self.spheres.iter().take(r + 1).map(Vec::len).sum()
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// Elements in order of word length, then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = (&Elem, u32)> {
        self.spheres
            .iter()
            .enumerate()
            .flat_map(|(r, s)| s.iter().map(move |g| (g, r as u32)))
    }

    /// `coord_1..coord_n,word_length`.
    pub fn to_csv(&self) -> String {
        let n = self.spheres[0][0].len();
        let mut out = String::new();
        for a in 1..=n {
            let _ = write!(out, "x{a},");
        }
        out.push_str("word_length\n");
        for (g, r) in self.iter() {
            for x in g {
                let _ = write!(out, "{x},");
            }
            let _ = writeln!(out, "{r}");
        }
        out
    }

    /// Least-squares slope of `log |B(r)|` against `log r` for `r ∈ [lo, hi]`.
    pub fn growth_degree(&self, lo: usize, hi: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = (lo.max(1)..=hi.min(self.radius))
            .map(|r| ((r as f64).ln(), (self.ball_size(r) as f64).ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Some(sxy / sxx)
    }
}

/// Neighbors `g·s` of a layer not yet in `seen`, deduplicated and sorted.
fn expand(lattice: &Lattice, gens: &GeneratingSet, layer: &[Elem], seen: &HashMap<Elem, u32>) -> Vec<Elem> {
    let n = lattice.rank();
    let mut next: Vec<Elem> = layer
        .par_chunks(1024)
        .flat_map_iter(|chunk| {
            let mut out = Vec::new();
            let mut buf = vec![0; n];
            for g in chunk {
                for s in gens.elements() {
                    lattice.multiply_into(g, s, &mut buf);
                    if !seen.contains_key(&buf) {
                        out.push(buf.clone());
                    }
                }
            }
            out
        })
        .collect();
    next.par_sort_unstable();
    next.dedup();
    next
}

/// All elements of word length at most `radius`.
pub fn bfs_ball(lattice: &Lattice, gens: &GeneratingSet, radius: usize, budget: usize) -> Result<BallTable, BfsError> {
    if let Some(s) = gens.elements().first() {
        if s.len() != lattice.rank() {
            return Err(LatticeError::DimensionMismatch { expected: lattice.rank(), got: s.len() }.into());
        }
    }
    let id = lattice.identity();
    let mut lengths = HashMap::new();
    lengths.insert(id.clone(), 0);
    let mut spheres = vec![vec![id]];
    for r in 1..=radius {
        let next = expand(lattice, gens, &spheres[r - 1], &lengths);
        if lengths.len() + next.len() > budget {
            return Err(BfsError::BudgetExceeded { completed_radius: r - 1, budget });
        }
        lengths.reserve(next.len());
        for g in &next {
            lengths.insert(g.clone(), r as u32);
        }
        spheres.push(next);
    }
    Ok(BallTable {
        radius,
        lengths,
        spheres,
    })
}

/// `ρ_S(g)` by bidirectional search from the identity and from `g`.
pub fn word_length(lattice: &Lattice, gens: &GeneratingSet, g: &[i64], budget: usize) -> Result<u32, BfsError> {
    if g.len() != lattice.rank() {
        return Err(LatticeError::DimensionMismatch { expected: lattice.rank(), got: g.len() }.into());
    }
    let id = lattice.identity();
    if g == id.as_slice() {
        return Ok(0);
    }
    let mut seen = [HashMap::new(), HashMap::new()];
    seen[0].insert(id.clone(), 0u32);
    seen[1].insert(g.to_vec(), 0u32);
    let mut layers = [vec![id], vec![g.to_vec()]];
    let mut depth = [0u32, 0u32];
    loop {
        let side = if layers[0].len() <= layers[1].len() { 0 } else { 1 };
        let next = expand(lattice, gens, &layers[side], &seen[side]);
        depth[side] += 1;
        let d = depth[side];
        let other = &seen[1 - side];
        let best = next.iter().filter_map(|x| other.get(x).map(|e| d + e)).min();
        if let Some(b) = best {
            return Ok(b);
        }
        if seen[0].len() + seen[1].len() + next.len() > budget {
            return Err(BfsError::BudgetExceeded { completed_radius: (depth[0] + depth[1] - 1) as usize, budget });
        }
        for x in &next {
            seen[side].insert(x.clone(), d);
        }
        layers[side] = next;
    }
}
