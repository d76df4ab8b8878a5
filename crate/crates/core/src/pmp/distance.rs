//! Distance estimates combining certified lower bounds with witnessed upper
//! bounds.
//!
//! Dispatch by structure:
//! - abelian or `g ∈ exp(V)`: the straight segment is optimal;
//! - `p = 2, n = 3` (Heisenberg type, polarized): exact planar isoperimetry;
//! - `p = 3, n = 4` with `rank Ω = 2`: `ℝ × plane` duality bounds;
//! - otherwise shooting plus direct path optimization against the projection
//!   and `K₁` bounds.

use std::sync::OnceLock;

use serde::Serialize;

use super::bounds::{distance_lower_bound, estimate_k1, K1Estimate};
use super::paths_opt::{optimize, repair_path, OptimizeOptions};
use super::planar::{planar_distance, split_distance};
use super::shoot::{shoot, ShootOptions};
use super::PmpError;
use crate::algebra::GroupElement;
use crate::path::HorizontalPath;
use crate::space::HorizontalSpace;

/// Chords used when an optimal arc is curved.
const ARC_CHORDS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    Trivial,
    Projection,
    CentralK1,
    PlanarExact,
    SplitDuality,
    Straight,
    PlanarPath,
    SplitLift,
    Shooting,
    Paths,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceEstimate {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: BoundMethod,
    pub upper_method: BoundMethod,
    /// Path realizing `upper`.
    #[serde(skip)]
    pub path: HorizontalPath,
    /// Initial covector of the shooting extremal, when shooting won.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covector: Option<Vec<f64>>,
}

impl DistanceEstimate {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    fn zero() -> Self {
        Self {
            lower: 0.0,
            upper: 0.0,
            lower_method: BoundMethod::Trivial,
            upper_method: BoundMethod::Trivial,
            path: HorizontalPath::new(),
            covector: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DistanceOptions {
    pub segments: usize,
    pub restarts: usize,
    pub seed: u64,
    pub k1_samples: usize,
    /// Whether the generic route runs the shooting solver.
    pub shoot: bool,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            segments: 64,
            restarts: 32,
            seed: 0,
            k1_samples: 8,
            shoot: true,
        }
    }
}

/// Reusable estimator; caches the `K₁` estimate.
pub struct DistanceEstimator<'a> {
    space: &'a HorizontalSpace,
    opts: DistanceOptions,
    k1: OnceLock<K1Estimate>,
}

impl<'a> DistanceEstimator<'a> {
    pub fn new(space: &'a HorizontalSpace, opts: DistanceOptions) -> Self {
        Self {
            space,
            opts,
            k1: OnceLock::new(),
        }
    }

    pub fn space(&self) -> &HorizontalSpace {
        self.space
    }

    pub fn k1(&self) -> K1Estimate {
        *self
            .k1
            .get_or_init(|| estimate_k1(self.space, self.opts.k1_samples, self.opts.seed))
    }

    pub fn estimate(&self, g: &GroupElement) -> Result<DistanceEstimate, PmpError> {
        let space = self.space;
        let alg = space.algebra();
        let (n, p) = (alg.n(), alg.p());
        if g.coords.len() != n {
            return Err(PmpError::DimensionMismatch { expected: n, got: g.coords.len() });
        }
        if g.coords.iter().all(|x| *x == 0.0) {
            return Ok(DistanceEstimate::zero());
        }
        if let Some(est) = self.straight(g) {
            return Ok(est);
        }
        if space.is_polarized() {
            if let Some(sol) = planar_distance(alg, space.norm(), &g.coords, ARC_CHORDS.max(self.opts.segments)) {
                let moves: Vec<Vec<f64>> = sol.moves.iter().map(|d| d.to_vec()).collect();
                if let Some((path, _)) = repair_path(space, g, moves) {
                    let upper = path.length(space.norm());
                    return Ok(DistanceEstimate {
                        lower: sol.length.min(upper),
                        upper,
                        lower_method: BoundMethod::PlanarExact,
                        upper_method: BoundMethod::PlanarPath,
                        path,
                        covector: None,
                    });
                }
            }
            if let Some(split) = split_distance(alg, space.norm(), &g.coords, ARC_CHORDS.max(self.opts.segments)) {
                if let Some((path, _)) = repair_path(space, g, split.moves.clone()) {
                    let upper = path.length(space.norm());
                    let (lower, lower_method) = self.best_lower(g, split.lower, BoundMethod::SplitDuality);
                    return Ok(DistanceEstimate {
                        lower: lower.min(upper),
                        upper,
                        lower_method,
                        upper_method: BoundMethod::SplitLift,
                        path,
                        covector: None,
                    });
                }
            }
        }
        self.generic(g, p)
    }

    /// Straight segment when the target lies in `exp(V)`.
    fn straight(&self, g: &GroupElement) -> Option<DistanceEstimate> {
        let space = self.space;
        let lift = space.lift_min_norm(g).ok()?;
        let straight = GroupElement::new(space.embed(&lift));
        if straight.max_abs_diff(g) > 1e-14 * (1.0 + g.coords.iter().fold(0.0f64, |a, b| a.max(b.abs()))) {
            return None;
        }
        let path = HorizontalPath::from_displacements(space.norm(), &[lift]);
        let upper = path.length(space.norm());
        let lower = space.cone_norm().value(&g.coords[..space.algebra().p()]);
        Some(DistanceEstimate {
            lower: lower.min(upper),
            upper,
            lower_method: BoundMethod::Projection,
            upper_method: BoundMethod::Straight,
            path,
            covector: None,
        })
    }

    fn best_lower(&self, g: &GroupElement, other: f64, method: BoundMethod) -> (f64, BoundMethod) {
        let lb = distance_lower_bound(self.space, g, &self.k1());
        let lb_method = if lb.central { BoundMethod::CentralK1 } else { BoundMethod::Projection };
        if other >= lb.value {
            (other, method)
        } else {
            (lb.value, lb_method)
        }
    }

    fn generic(&self, g: &GroupElement, _p: usize) -> Result<DistanceEstimate, PmpError> {
        let space = self.space;
        let mut best: Option<(f64, HorizontalPath, BoundMethod, Option<Vec<f64>>)> = None;
        if self.opts.shoot && space.is_polarized() {
            let sopts = ShootOptions {
                restarts: self.opts.restarts,
                seed: self.opts.seed,
                ..Default::default()
            };
            if let Ok(r) = shoot(space, g, &sopts) {
                best = Some((r.length, r.path, BoundMethod::Shooting, Some(r.covector)));
            }
        }
        let popts = OptimizeOptions {
            segments: self.opts.segments,
            restarts: (self.opts.restarts / 8).max(1),
            seed: self.opts.seed,
            ..Default::default()
        };
        match optimize(space, g, &[], &popts) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.length < b.0) {
                    best = Some((r.length, r.path, BoundMethod::Paths, None));
                }
            }
            Err(e) if best.is_none() => return Err(e),
            Err(_) => {}
        }
        let (upper, path, upper_method, covector) = best.ok_or(PmpError::NoConvergence(f64::INFINITY))?;
        let lb = distance_lower_bound(space, g, &self.k1());
        Ok(DistanceEstimate {
            lower: lb.value.min(upper),
            upper,
            lower_method: if lb.central { BoundMethod::CentralK1 } else { BoundMethod::Projection },
            upper_method,
            path,
            covector,
        })
    }
}

/// One-shot estimate of the distance from the identity to `g`.
pub fn estimate_distance(
    space: &HorizontalSpace,
    g: &GroupElement,
    opts: &DistanceOptions,
) -> Result<DistanceEstimate, PmpError> {
    DistanceEstimator::new(space, *opts).estimate(g)
}

/// Upper bound from direct path optimization alone, with the generic lower
/// bounds.
pub fn distance_upper_via_paths(
    space: &HorizontalSpace,
    g: &GroupElement,
    segments: usize,
    restarts: usize,
) -> Result<DistanceEstimate, PmpError> {
    if g.coords.iter().all(|x| *x == 0.0) {
        return Ok(DistanceEstimate::zero());
    }
    let r = optimize(
        space,
        g,
        &[],
        &OptimizeOptions {
            segments,
            restarts,
            ..Default::default()
        },
    )?;
    let lb = distance_lower_bound(space, g, &estimate_k1(space, 8, 0));
    Ok(DistanceEstimate {
        lower: lb.value.min(r.length),
        upper: r.length,
        lower_method: if lb.central { BoundMethod::CentralK1 } else { BoundMethod::Projection },
        upper_method: BoundMethod::Paths,
        path: r.path,
        covector: None,
    })
}

/// Shooting alone, with the generic lower bounds.
pub fn shoot_distance(space: &HorizontalSpace, g: &GroupElement, restarts: usize) -> Result<DistanceEstimate, PmpError> {
    let r = shoot(
        space,
        g,
        &ShootOptions {
            restarts,
            ..Default::default()
        },
    )?;
    if r.length == 0.0 {
        return Ok(DistanceEstimate::zero());
    }
    let lb = distance_lower_bound(space, g, &estimate_k1(space, 8, 0));
    Ok(DistanceEstimate {
        lower: lb.value.min(r.length),
        upper: r.length,
        lower_method: if lb.central { BoundMethod::CentralK1 } else { BoundMethod::Projection },
        upper_method: BoundMethod::Shooting,
        path: r.path,
        covector: Some(r.covector),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::presets;
    use crate::norm::Norm;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn sp(alg: crate::algebra::NilpotentAlgebra, norm: Norm) -> HorizontalSpace {
        HorizontalSpace::polarized(Arc::new(alg), norm).unwrap()
    }

    #[test]
    fn heisenberg_closed_forms() {
        let s = sp(presets::heisenberg(), Norm::L2(2));
        let g = GroupElement::new(vec![0.0, 0.0, 1.0]);
        let e = estimate_distance(&s, &g, &DistanceOptions::default()).unwrap();
        let exact = 2.0 * PI.sqrt();
        assert!((e.lower - exact).abs() < 1e-6 * exact && (e.upper - exact).abs() < 1e-4 * exact);
        assert!(e.path.endpoint(&s).max_abs_diff(&g) < 1e-8);

        let s = sp(presets::heisenberg(), Norm::L1(2));
        let e = estimate_distance(&s, &g, &DistanceOptions::default()).unwrap();
        assert!((e.lower - 4.0).abs() < 1e-9 && (e.upper - 4.0).abs() < 1e-9);
        assert_eq!(e.path.simplified().len(), 4);
    }

    #[test]
    fn straight_and_identity() {
        let s = sp(presets::heisenberg(), Norm::L2(2));
        let e = estimate_distance(&s, &GroupElement::new(vec![3.0, 4.0, 0.0]), &DistanceOptions::default()).unwrap();
        assert_eq!(e.upper_method, BoundMethod::Straight);
        assert!((e.upper - 5.0).abs() < 1e-12 && (e.lower - 5.0).abs() < 1e-12);
        let z = estimate_distance(&s, &GroupElement::new(vec![0.0; 3]), &DistanceOptions::default()).unwrap();
        assert_eq!(z.upper, 0.0);
    }

    #[test]
    fn generic_route_sandwich() {
        let s = sp(presets::heisenberg_squared(), Norm::L2(4));
        let g = GroupElement::new(vec![0.3, -0.2, 0.1, 0.4, 0.5, -0.3]);
        let opts = DistanceOptions {
            restarts: 8,
            segments: 24,
            ..Default::default()
        };
        let e = estimate_distance(&s, &g, &opts).unwrap();
        assert!(e.lower <= e.upper);
        assert!(e.path.endpoint(&s).max_abs_diff(&g) < 1e-8);
    }

    #[test]
    fn split_route() {
        let s = sp(presets::r_times_heisenberg(), Norm::L1(3));
        let g = GroupElement::new(vec![1.0, 0.0, 0.0, 1.0]);
        let e = estimate_distance(&s, &g, &DistanceOptions::default()).unwrap();
        assert_eq!(e.upper_method, BoundMethod::SplitLift);
        assert!(e.gap() < 1e-6 * e.upper);
    }
}
