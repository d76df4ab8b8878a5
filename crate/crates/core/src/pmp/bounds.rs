//! Lower bounds for the cone distance and the constant `K₁`.
//!
//! `K₁` is the supremum of `‖x⁻¹y‖` over pairs of points of the unit ball
//! with `x⁻¹y` central (Euclidean norm on central coordinates). Splitting a
//! horizontally closed loop of length 2 into two halves produces such a pair,
//! and every pair arises this way, so `K₁ = 4 · sup |z(γ)|` over closed unit
//! length loops `γ`, where `z(γ)` is the central endpoint. The estimator
//! maximizes this over polygonal loops; it is a lower estimate of `K₁`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::GroupElement;
use crate::linalg::norm2;
use crate::space::HorizontalSpace;

/// Pieces per sampled loop.
const LOOP_SEGMENTS: usize = 48;
const ASCENT_STEPS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K1Estimate {
    pub value: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    /// Which bound attained the maximum.
    pub central: bool,
}

/// Central endpoint of a loop of displacements in `V∞` coordinates.
fn loop_center(space: &HorizontalSpace, moves: &[Vec<f64>]) -> Vec<f64> {
    let alg = space.algebra();
    let (n, p) = (alg.n(), alg.p());
    let mut acc = vec![0.0; n];
    for v in moves {
        let mut e = vec![0.0; n];
        e[..p].copy_from_slice(v);
        alg.mul_assign(&mut acc, &e);
    }
    acc[p..].to_vec()
}

/// Closes the loop and rescales it to unit length; returns `|z|`.
fn normalize(space: &HorizontalSpace, moves: &mut [Vec<f64>]) -> f64 {
    let p = space.algebra().p();
    let k = moves.len() as f64;
    let mean: Vec<f64> = (0..p).map(|a| moves.iter().map(|v| v[a]).sum::<f64>() / k).collect();
    for v in moves.iter_mut() {
        v.iter_mut().zip(&mean).for_each(|(x, m)| *x -= m);
    }
    let len: f64 = moves.iter().map(|v| space.norm().value(v)).sum();
    if len <= 0.0 {
        return 0.0;
    }
    for v in moves.iter_mut() {
        v.iter_mut().for_each(|x| *x /= len);
    }
    norm2(&loop_center(space, moves))
}

/// Gradient of `½|z|²` with respect to the displacements.
fn ascent_direction(space: &HorizontalSpace, moves: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let alg = space.algebra();
    let (n, p) = (alg.n(), alg.p());
    let z = loop_center(space, moves);
    let mut total = vec![0.0; n];
    for v in moves {
        total[..p].iter_mut().zip(v).for_each(|(t, x)| *t += x);
    }
    let mut before = vec![0.0; n];
    let mut out = Vec::with_capacity(moves.len());
    for v in moves {
        // ∂z/∂a_i · δ = ½ [δ, S_{>i} − S_{<i}]
        let d: Vec<f64> = (0..n).map(|a| if a < p { total[a] - 2.0 * before[a] - v[a] } else { 0.0 }).collect();
        let grad: Vec<f64> = (0..p)
            .map(|b| {
                let mut e = vec![0.0; n];
                e[b] = 1.0;
                let br = alg.bracket(&e, &d).expect("length n");
                0.5 * br[p..].iter().zip(&z).map(|(x, y)| x * y).sum::<f64>()
            })
            .collect();
        out.push(grad);
        before[..p].iter_mut().zip(v).for_each(|(t, x)| *t += x);
    }
    out
}

fn ascend(space: &HorizontalSpace, mut moves: Vec<Vec<f64>>) -> f64 {
    let mut best = normalize(space, &mut moves);
    let mut eta = 0.5;
    for _ in 0..ASCENT_STEPS {
        if best == 0.0 {
            break;
        }
        let dir = ascent_direction(space, &moves);
        let scale = 1.0 / best;
        let mut cand: Vec<Vec<f64>> = moves
            .iter()
            .zip(&dir)
            .map(|(v, d)| v.iter().zip(d).map(|(x, y)| x + eta * scale * y).collect())
            .collect();
        let val = normalize(space, &mut cand);
        if val > best {
            best = val;
            moves = cand;
            eta *= 1.3;
        } else {
            eta *= 0.5;
            if eta < 1e-9 {
                break;
            }
        }
    }
    best
}

/// Deterministic sample `i`: regular polygons in coordinate planes first,
/// then random loops.
fn sample_loop(space: &HorizontalSpace, i: usize, seed: u64) -> Vec<Vec<f64>> {
    let p = space.algebra().p();
    let k = LOOP_SEGMENTS;
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|a| ((a + 1)..p).map(move |b| (a, b))).collect();
    if i < pairs.len() {
        let (a, b) = pairs[i];
        return (0..k)
            .map(|s| {
                let th = std::f64::consts::TAU * s as f64 / k as f64;
                let mut v = vec![0.0; p];
                v[a] = th.cos();
                v[b] = th.sin();
                v
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x2545_f491_4f6c_dd1d));
    // a random ellipse-like loop in a random 2-plane plus noise
    let u: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let w: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (0..k)
        .map(|s| {
            let th = std::f64::consts::TAU * s as f64 / k as f64;
            (0..p)
                .map(|a| th.cos() * u[a] + th.sin() * w[a] + 0.2 * rng.gen_range(-1.0..1.0))
                .collect()
        })
        .collect()
}

/// Lower estimate of `K₁` for the cone of `space` from `samples` loops.
/// Nondecreasing in `samples` for a fixed seed.
pub fn estimate_k1(space: &HorizontalSpace, samples: usize, seed: u64) -> K1Estimate {
    let alg = space.algebra();
    if alg.center_dim() == 0 || alg.structure().next().is_none() {
        return K1Estimate { value: 0.0, samples };
    }
    let cone = space.cone_space().expect("cone of a valid space");
    let mut best = 0.0f64;
    for i in 0..samples {
        let r = ascend(&cone, sample_loop(&cone, i, seed));
        best = best.max(r);
    }
    K1Estimate {
        value: 4.0 * best,
        samples,
    }
}

/// `max(‖π(g)‖∞, √(‖c‖ / K₁))` where `g = exp(Y_g) c` with `Y_g` a minimal
/// lift of `π(g)`. The central term is only used on polarized spaces and
/// inherits the estimated status of `K₁`.
pub fn distance_lower_bound(space: &HorizontalSpace, g: &GroupElement, k1: &K1Estimate) -> LowerBound {
    let alg = space.algebra();
    let p = alg.p();
    let proj = space.cone_norm().value(&g.coords[..p]);
    let mut out = LowerBound {
        value: proj,
        central: false,
    };
    if !space.is_polarized() || k1.value <= 0.0 {
        return out;
    }
    let Ok(lift) = space.lift_min_norm(g) else {
        return out;
    };
    let straight = GroupElement::new(space.embed(&lift));
    let Ok(c) = alg.multiply(&alg.inverse(&straight), g) else {
        return out;
    };
    let central = (norm2(&c.coords[p..]) / k1.value).sqrt();
    if central > out.value {
        out = LowerBound {
            value: central,
            central: true,
        };
    }
    out
}
