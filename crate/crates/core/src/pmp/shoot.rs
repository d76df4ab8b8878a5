//! Two-point shooting for normal extremals.
//!
//! Unknowns are the initial momenta `h0 = w / ‖w‖_*`, the constant central
//! covector `ξ_c` and the horizon `T`. A damped least-squares iteration with
//! finite-difference Jacobians drives the endpoint onto the target; restarts
//! run in parallel and the shortest converged extremal wins.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::paths_opt::repair_path;
use super::{Flow, PmpError};
use crate::algebra::GroupElement;
use crate::path::HorizontalPath;
use crate::space::HorizontalSpace;

/// Endpoint tolerance for a converged restart.
pub const SHOOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct ShootOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Number of chords used to turn a smooth extremal into a path.
    pub chords: usize,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            iterations: 150,
            seed: 0,
            chords: 2048,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShootResult {
    /// Full initial covector `(h0, ξ_c)` at the identity.
    pub covector: Vec<f64>,
    pub horizon: f64,
    /// Endpoint error of the extremal itself.
    pub residual: f64,
    /// Feasible path built from the extremal.
    pub path: HorizontalPath,
    pub length: f64,
    pub restart: usize,
    pub converged_restarts: usize,
}

struct Shooter<'a> {
    space: &'a HorizontalSpace,
    target: &'a [f64],
    weights: Vec<f64>,
    p: usize,
}

impl<'a> Shooter<'a> {
    fn h0(&self, w: &[f64]) -> Option<Vec<f64>> {
        let d = self.space.norm().dual_value(w);
        (d.is_finite() && d > 0.0).then(|| w.iter().map(|x| x / d).collect())
    }

    fn endpoint(&self, z: &[f64]) -> Option<Vec<f64>> {
        let p = self.p;
        let h0 = self.h0(&z[..p])?;
        let t = z[z.len() - 1];
        if !(t.is_finite() && t >= 0.0) {
            return None;
        }
        let flow = Flow::new(self.space.algebra(), self.space.norm(), &z[p..z.len() - 1]);
        flow.run(&h0, t, 1, 2048, |_, _, _, _| {}).ok()
    }

    fn residual(&self, z: &[f64]) -> Option<Vec<f64>> {
        let e = self.endpoint(z)?;
        Some(
            e.iter()
                .zip(self.target)
                .zip(&self.weights)
                .map(|((a, b), w)| (a - b) * w)
                .collect(),
        )
    }

    fn raw_error(&self, z: &[f64]) -> f64 {
        self.endpoint(z).map_or(f64::INFINITY, |e| {
            e.iter().zip(self.target).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        })
    }

    /// Levenberg–Marquardt from `z`; returns the final point and its error.
    fn solve(&self, mut z: Vec<f64>, iterations: usize) -> (Vec<f64>, f64) {
        let Some(mut r) = self.residual(&z) else {
            return (z, f64::INFINITY);
        };
        let mut cost = r.iter().map(|x| x * x).sum::<f64>();
        let mut lambda = 1e-3;
        let k = z.len();
        for _ in 0..iterations {
            if self.raw_error(&z) <= SHOOT_TOL * 1e-2 {
                break;
            }
            let mut jac = DMatrix::zeros(r.len(), k);
            let mut ok = true;
            for c in 0..k {
                let h = 1e-7 * (1.0 + z[c].abs());
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[c] += h;
                zm[c] -= h;
                if c == k - 1 && zm[c] < 0.0 {
                    zm[c] = z[c];
                }
                let (Some(rp), Some(rm)) = (self.residual(&zp), self.residual(&zm)) else {
                    ok = false;
                    break;
                };
                let dz = zp[c] - zm[c];
                for a in 0..r.len() {
                    jac[(a, c)] = (rp[a] - rm[a]) / dz;
                }
            }
            if !ok {
                break;
            }
            let jt = jac.transpose();
            let jtj = &jt * &jac;
            let g = &jt * DVector::from_column_slice(&r);
            let mut improved = false;
            for _ in 0..12 {
                let mut a = jtj.clone();
                for d in 0..k {
                    a[(d, d)] += lambda * (jtj[(d, d)] + 1e-12);
                }
                let Some(step) = a.lu().solve(&(-&g)) else {
                    lambda *= 10.0;
                    continue;
                };
                let cand: Vec<f64> = z.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                if let Some(rc) = self.residual(&cand) {
                    let c2 = rc.iter().map(|x| x * x).sum::<f64>();
                    if c2 < cost {
                        z = cand;
                        r = rc;
                        cost = c2;
                        lambda = (lambda / 3.0).max(1e-12);
                        improved = true;
                        break;
                    }
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        let err = self.raw_error(&z);
        (z, err)
    }
}

/// Shoots from the identity to `target` along normal extremals.
pub fn shoot(space: &HorizontalSpace, target: &GroupElement, opts: &ShootOptions) -> Result<ShootResult, PmpError> {
    if !space.is_polarized() {
        return Err(PmpError::NotPolarized);
    }
    let alg = space.algebra();
    let (n, p) = (alg.n(), alg.p());
    if target.coords.len() != n {
        return Err(PmpError::DimensionMismatch { expected: n, got: target.coords.len() });
    }
    if target.coords.iter().all(|x| *x == 0.0) {
        return Ok(ShootResult {
            covector: vec![0.0; n],
            horizon: 0.0,
            residual: 0.0,
            path: HorizontalPath::new(),
            length: 0.0,
            restart: 0,
            converged_restarts: 0,
        });
    }
    if target.coords[p..].iter().all(|x| *x == 0.0) {
        // exp(V): the straight segment is optimal
        let horiz = target.coords[..p].to_vec();
        let path = HorizontalPath::from_displacements(space.norm(), std::slice::from_ref(&horiz));
        let mut covector = space.norm().subgradient(&horiz);
        covector.resize(n, 0.0);
        let length = path.length(space.norm());
        return Ok(ShootResult {
            covector,
            horizon: length,
            residual: 0.0,
            path,
            length,
            restart: 0,
            converged_restarts: 0,
        });
    }
    let weights = (0..n)
        .map(|a| if a < p { 1.0 } else { 1.0 / (1.0 + target.coords[a].abs()) })
        .collect();
    let shooter = Shooter {
        space,
        target: &target.coords,
        weights,
        p,
    };
    let horiz = &target.coords[..p];
    let horiz_len = space.norm().value(horiz);
    let central = target.coords[p..].iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let base_t = horiz_len + 3.0 * central.sqrt();
    let dir = space.norm().subgradient(horiz);

    let starts: Vec<Vec<f64>> = (0..opts.restarts.max(1))
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9e37_79b9).wrapping_add(i as u64));
            let mut z = Vec::with_capacity(n + 1);
            if i == 0 && horiz_len > 0.0 {
                z.extend_from_slice(&dir);
                z.extend(std::iter::repeat_n(0.0, n - p));
                z.push(horiz_len);
                return z;
            }
            for &d in &dir[..p] {
                let noise: f64 = rng.gen_range(-1.0..1.0);
                z.push(if horiz_len > 0.0 { d + 0.5 * noise } else { noise });
            }
            for _ in p..n {
                let mag = 10f64.powf(rng.gen_range(-2.0..2.0));
                z.push(if rng.gen_bool(0.5) { mag } else { -mag });
            }
            z.push(base_t * rng.gen_range(0.8..1.6));
            z
        })
        .collect();

    let runs: Vec<(usize, Vec<f64>, f64)> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, z)| {
            let (z, e) = shooter.solve(z, opts.iterations);
            (i, z, e)
        })
        .collect();
    let best_err = runs.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let mut converged: Vec<&(usize, Vec<f64>, f64)> = runs.iter().filter(|r| r.2 <= SHOOT_TOL).collect();
    if converged.is_empty() {
        return Err(PmpError::NoConvergence(best_err));
    }
    let count = converged.len();
    converged.sort_by(|a, b| {
        let (ta, tb) = (a.1[n], b.1[n]);
        ta.partial_cmp(&tb).unwrap().then(a.0.cmp(&b.0))
    });
    // try candidates in order of horizon until one yields a feasible path
    for (idx, z, err) in converged {
        let h0 = shooter.h0(&z[..p]).expect("converged start is valid");
        let xi_c = &z[p..n];
        let t = z[n];
        let Some(path) = extremal_path(space, &h0, xi_c, t, opts.chords, target) else {
            continue;
        };
        let mut covector = h0;
        covector.extend_from_slice(xi_c);
        return Ok(ShootResult {
            covector,
            horizon: t,
            residual: *err,
            length: path.length(space.norm()),
            path,
            restart: *idx,
            converged_restarts: count,
        });
    }
    Err(PmpError::NoConvergence(best_err))
}

/// Converts an extremal into a horizontal path ending exactly at `target`.
pub(crate) fn extremal_path(
    space: &HorizontalSpace,
    h0: &[f64],
    xi_c: &[f64],
    horizon: f64,
    chords: usize,
    target: &GroupElement,
) -> Option<HorizontalPath> {
    let alg = space.algebra();
    let p = alg.p();
    let flow = Flow::new(alg, space.norm(), xi_c);
    let moves: Vec<Vec<f64>> = match flow.bang_arcs(h0, horizon) {
        Some(arcs) => arcs
            .ok()?
            .into_iter()
            .map(|(v, tau)| v.iter().map(|x| x * tau).collect())
            .collect(),
        None => {
            let chords = chords.max(1);
            let mut pts: Vec<Vec<f64>> = Vec::with_capacity(chords + 1);
            flow.run(h0, horizon, chords, 2048usize.div_ceil(chords), |_, x, _, _| {
                pts.push(x[..p].to_vec())
            })
            .ok()?;
            pts.windows(2)
                .map(|w| w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect())
                .collect()
        }
    };
    repair_path(space, target, moves).map(|(path, _)| path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::presets;
    use crate::norm::Norm;
    use std::sync::Arc;

    fn h3(norm: Norm) -> HorizontalSpace {
        HorizontalSpace::polarized(Arc::new(presets::heisenberg()), norm).unwrap()
    }

    #[test]
    fn l2_center() {
        let sp = h3(Norm::L2(2));
        let g = GroupElement::new(vec![0.0, 0.0, 1.0]);
        let r = shoot(&sp, &g, &ShootOptions::default()).unwrap();
        let exact = 2.0 * std::f64::consts::PI.sqrt();
        assert!((r.horizon - exact).abs() < 1e-5, "{}", r.horizon);
        assert!((r.length - exact).abs() < 1e-5, "{}", r.length);
        assert!(r.path.endpoint(&sp).max_abs_diff(&g) < 1e-8);
    }

    #[test]
    fn straight_target() {
        let sp = h3(Norm::L1(2));
        let g = GroupElement::new(vec![1.0, -2.0, 0.0]);
        let r = shoot(&sp, &g, &ShootOptions { restarts: 4, ..Default::default() }).unwrap();
        assert!((r.horizon - 3.0).abs() < 1e-9);
    }

    #[test]
    fn l1_center() {
        let sp = h3(Norm::L1(2));
        let g = GroupElement::new(vec![0.0, 0.0, 1.0]);
        let r = shoot(&sp, &g, &ShootOptions::default()).unwrap();
        assert!((r.horizon - 4.0).abs() < 1e-3, "{}", r.horizon);
        assert!(r.path.endpoint(&sp).max_abs_diff(&g) < 1e-8);
    }

    #[test]
    fn identity_is_free() {
        let sp = h3(Norm::L2(2));
        let r = shoot(&sp, &GroupElement::new(vec![0.0; 3]), &ShootOptions::default()).unwrap();
        assert_eq!(r.length, 0.0);
    }
}
