//! Direct minimization of path length over `k`-segment horizontal paths with
//! a fixed endpoint.
//!
//! In a 2-step group the endpoint of displacements `a_1..a_k ∈ V` is
//! `Σ a_i + ½ Σ_{i<j} [a_i, a_j]`, a quadratic map, so its Jacobian is exact
//! and cheap. The optimizer alternates projected (sub)gradient steps on the
//! total length with Gauss–Newton repair back onto the endpoint constraint.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::PmpError;
use crate::algebra::GroupElement;
use crate::linalg;
use crate::path::{box_path, HorizontalPath};
use crate::space::HorizontalSpace;

/// Optimized moves with their length and endpoint error.
type Descent = (Vec<Vec<f64>>, f64, f64);

/// Endpoint tolerance for accepted paths.
pub const ENDPOINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    pub segments: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            segments: 32,
            restarts: 4,
            iterations: 1500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizedPath {
    pub path: HorizontalPath,
    pub length: f64,
    /// Max-norm endpoint error in exponential coordinates.
    pub residual: f64,
    /// Index of the seed that produced the result.
    pub seed_index: usize,
}

/// Working form: displacements in `V`-coordinates.
struct Problem<'a> {
    space: &'a HorizontalSpace,
    target: Vec<f64>,
    /// Horizontal parts of the embedded basis columns.
    cols: Vec<Vec<f64>>,
}

impl<'a> Problem<'a> {
    fn new(space: &'a HorizontalSpace, target: &GroupElement) -> Self {
        Self {
            space,
            target: target.coords.clone(),
            cols: space.columns().to_vec(),
        }
    }

    fn q(&self) -> usize {
        self.cols.len()
    }

    fn n(&self) -> usize {
        self.space.algebra().n()
    }

    fn embed(&self, v: &[f64]) -> Vec<f64> {
        self.space.embed(v)
    }

    /// `[a, b]` (central part only, full length `n`).
    fn bracket(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        self.space.algebra().bracket(a, b).expect("length n")
    }

    fn endpoint(&self, moves: &[Vec<f64>]) -> Vec<f64> {
        let alg = self.space.algebra();
        let mut x = vec![0.0; self.n()];
        for v in moves {
            alg.mul_assign(&mut x, &self.embed(v));
        }
        x
    }

    fn residual(&self, moves: &[Vec<f64>]) -> Vec<f64> {
        self.endpoint(moves).iter().zip(&self.target).map(|(a, b)| a - b).collect()
    }

    fn length(&self, moves: &[Vec<f64>]) -> f64 {
        moves.iter().map(|v| self.space.norm().value(v)).sum()
    }

    /// `∂F/∂v_i · e_b = B e_b + ½ [B e_b, S_{>i} − S_{<i}]`.
    fn jacobian(&self, moves: &[Vec<f64>]) -> DMatrix<f64> {
        let (n, q, k) = (self.n(), self.q(), moves.len());
        let emb: Vec<Vec<f64>> = moves.iter().map(|v| self.embed(v)).collect();
        let total: Vec<f64> = (0..n).map(|a| emb.iter().map(|e| e[a]).sum()).collect();
        let mut before = vec![0.0; n];
        let mut jac = DMatrix::zeros(n, k * q);
        for i in 0..k {
            let d: Vec<f64> = (0..n).map(|a| total[a] - before[a] - emb[i][a] - before[a]).collect();
            for b in 0..q {
                let col = &self.cols[b];
                let br = self.bracket(col, &d);
                for a in 0..n {
                    jac[(a, i * q + b)] = col[a] + 0.5 * br[a];
                }
            }
            for a in 0..n {
                before[a] += emb[i][a];
            }
        }
        jac
    }

    fn flatten(moves: &[Vec<f64>]) -> DVector<f64> {
        DVector::from_iterator(moves.iter().map(Vec::len).sum(), moves.iter().flatten().copied())
    }

    fn unflatten(&self, v: &DVector<f64>) -> Vec<Vec<f64>> {
        v.as_slice().chunks(self.q()).map(<[f64]>::to_vec).collect()
    }

    fn residual_norm(r: &[f64]) -> f64 {
        r.iter().fold(0.0f64, |a, b| a.max(b.abs()))
    }

    /// Gauss–Newton projection onto the endpoint constraint.
    fn repair(&self, moves: &mut Vec<Vec<f64>>) -> f64 {
        let mut res = self.residual(moves);
        let mut err = Self::residual_norm(&res);
        for _ in 0..30 {
            if err <= ENDPOINT_TOL * 1e-3 {
                break;
            }
            let jac = self.jacobian(moves);
            let step = linalg::min_norm_solve(&jac, &DVector::from_column_slice(&res));
            let mut x = Self::flatten(moves);
            x -= step;
            let cand = self.unflatten(&x);
            let r2 = self.residual(&cand);
            let e2 = Self::residual_norm(&r2);
            if e2.is_nan() || e2 >= err {
                break;
            }
            *moves = cand;
            res = r2;
            err = e2;
        }
        err
    }

    fn gradient(&self, moves: &[Vec<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            moves.iter().map(Vec::len).sum(),
            moves.iter().flat_map(|v| {
                if v.iter().all(|x| *x == 0.0) {
                    vec![0.0; v.len()]
                } else {
                    self.space.norm().subgradient(v)
                }
            }),
        )
    }

    /// Projected descent from a seed. Returns the best feasible iterate.
    fn descend(&self, mut moves: Vec<Vec<f64>>, iterations: usize) -> Option<Descent> {
        let mut err = self.repair(&mut moves);
        if err > ENDPOINT_TOL {
            return None;
        }
        let mut len = self.length(&moves);
        let mut alpha = 0.1 * len.max(1e-3) / moves.len() as f64;
        let mut stall = 0;
        for _ in 0..iterations {
            let jac = self.jacobian(&moves);
            let grad = self.gradient(&moves);
            let dir = -linalg::project_null(&jac, &grad);
            let dn = dir.norm();
            if dn <= 1e-14 {
                break;
            }
            let mut accepted = false;
            while alpha * dn > 1e-15 * len.max(1.0) {
                let x = Self::flatten(&moves) + &dir * alpha;
                let mut cand = self.unflatten(&x);
                let e = self.repair(&mut cand);
                let l = self.length(&cand);
                if e <= ENDPOINT_TOL && l < len - 1e-15 * len {
                    if len - l < 1e-13 * len {
                        stall += 1;
                    } else {
                        stall = 0;
                    }
                    moves = cand;
                    len = l;
                    err = e;
                    alpha *= 1.6;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted || stall > 20 {
                break;
            }
        }
        Some((moves, len, err))
    }
}

/// Straight lift of `π(g)` followed by commutator boxes correcting the
/// central defect.
pub fn lift_box_seed(space: &HorizontalSpace, g: &GroupElement) -> Result<Vec<Vec<f64>>, PmpError> {
    let alg = space.algebra();
    let (n, p, q) = (alg.n(), alg.p(), space.q());
    let lift = space
        .lift_min_norm(g)
        .map_err(|e| PmpError::SeedInfeasible(e.to_string()))?;
    let straight = GroupElement::new(space.embed(&lift));
    let defect = alg
        .multiply(&alg.inverse(&straight), g)
        .map_err(|e| PmpError::SeedInfeasible(e.to_string()))?;
    let mut moves = vec![];
    if lift.iter().any(|x| *x != 0.0) {
        moves.push(lift);
    }
    let z = &defect.coords[p..];
    if z.iter().all(|x| *x == 0.0) {
        return Ok(moves);
    }
    // unit basis directions and their brackets
    let units: Vec<Vec<f64>> = (0..q)
        .map(|b| {
            let mut e = vec![0.0; q];
            e[b] = 1.0;
            let r = space.norm().value(&e);
            e.iter_mut().for_each(|x| *x /= r);
            e
        })
        .collect();
    let mut pairs = Vec::new();
    let mut cols = Vec::new();
    for a in 0..q {
        for b in (a + 1)..q {
            let br = alg
                .bracket(&space.embed(&units[a]), &space.embed(&units[b]))
                .expect("length n");
            if br[p..].iter().any(|x| *x != 0.0) {
                pairs.push((a, b));
                cols.push(br[p..].to_vec());
            }
        }
    }
    if pairs.is_empty() {
        return Err(PmpError::SeedInfeasible("V does not generate the center".into()));
    }
    let m = n - p;
    let mat = DMatrix::from_fn(m, pairs.len(), |r, c| cols[c][r]);
    let coef = linalg::min_norm_solve(&mat, &DVector::from_column_slice(z));
    let check = &mat * &coef - DVector::from_column_slice(z);
    if check.amax() > 1e-9 * (1.0 + z.iter().fold(0.0f64, |a, b| a.max(b.abs()))) {
        return Err(PmpError::SeedInfeasible("central defect outside the bracket span".into()));
    }
    for (&(a, b), &r) in pairs.iter().zip(coef.iter()) {
        if r == 0.0 {
            continue;
        }
        let (x, y) = if r > 0.0 { (&units[a], &units[b]) } else { (&units[b], &units[a]) };
        let bx = box_path(space.norm(), x, y, r.abs()).expect("unit inputs");
        for s in bx.segments {
            moves.push(s.direction.iter().map(|d| d * s.duration).collect());
        }
    }
    Ok(moves)
}

/// Splits the moves into at least `k` pieces, longest first.
fn refine(mut moves: Vec<Vec<f64>>, norm: &crate::norm::Norm, k: usize) -> Vec<Vec<f64>> {
    if moves.is_empty() {
        return moves;
    }
    while moves.len() < k {
        let (idx, _) = moves
            .iter()
            .enumerate()
            .map(|(i, v)| (i, norm.value(v)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let half: Vec<f64> = moves[idx].iter().map(|x| 0.5 * x).collect();
        moves[idx] = half.clone();
        moves.insert(idx, half);
    }
    moves
}

fn to_path(space: &HorizontalSpace, moves: &[Vec<f64>]) -> HorizontalPath {
    HorizontalPath::from_displacements(space.norm(), moves)
}

/// Minimizes length over paths to `g`, starting from the lift-and-box seed,
/// any `extra_seeds`, and `restarts` random perturbations.
pub fn optimize(
    space: &HorizontalSpace,
    g: &GroupElement,
    extra_seeds: &[Vec<Vec<f64>>],
    opts: &OptimizeOptions,
) -> Result<OptimizedPath, PmpError> {
    let prob = Problem::new(space, g);
    if g.coords.iter().all(|x| *x == 0.0) {
        return Ok(OptimizedPath {
            path: HorizontalPath::new(),
            length: 0.0,
            residual: 0.0,
            seed_index: 0,
        });
    }
    let base = lift_box_seed(space, g)?;
    let k = opts.segments.max(1);
    let mut seeds = vec![refine(base.clone(), space.norm(), k)];
    for s in extra_seeds {
        seeds.push(refine(s.clone(), space.norm(), k));
    }
    let scale = prob.length(&base) / k as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.restarts {
        let mut s = refine(base.clone(), space.norm(), k);
        for v in &mut s {
            for x in v.iter_mut() {
                *x += rng.gen_range(-0.5..0.5) * scale;
            }
        }
        seeds.push(s);
    }
    let results: Vec<Option<Descent>> = seeds
        .into_par_iter()
        .map(|s| {
            // seeds already feasible keep their length if descent fails
            prob.descend(s, opts.iterations)
        })
        .collect();
    let best = results
        .into_iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|(m, l, e)| (i, m, l, e)))
        .fold(None::<(usize, Vec<Vec<f64>>, f64, f64)>, |acc, cur| match acc {
            Some(a) if a.2 <= cur.2 => Some(a),
            _ => Some(cur),
        });
    let (seed_index, moves, _, _) = best.ok_or(PmpError::NoConvergence(f64::INFINITY))?;
    let path = to_path(space, &moves);
    let end = path.endpoint(space);
    let residual = end.max_abs_diff(g);
    Ok(OptimizedPath {
        length: path.length(space.norm()),
        path,
        residual,
        seed_index,
    })
}

/// Repairs a nearly feasible path onto the endpoint `g` without optimizing.
pub fn repair_path(space: &HorizontalSpace, g: &GroupElement, moves: Vec<Vec<f64>>) -> Option<(HorizontalPath, f64)> {
    let prob = Problem::new(space, g);
    let mut moves = moves;
    let err = prob.repair(&mut moves);
    (err <= ENDPOINT_TOL).then(|| (to_path(space, &moves), err))
}
