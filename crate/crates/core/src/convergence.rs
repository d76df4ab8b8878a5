//! Discrepancy between word metrics and the cone metric.
//!
//! Two proxies are measured: the pointwise `D(n) = sup |ρ_S(g) − d∞(g)|` over
//! spheres `{ρ_S = n}`, and a sampled Hausdorff distance between the rescaled
//! word ball `δ_{1/n} B(n)` and the unit cone ball.

use std::fs;
use std::sync::atomic::{AtomicU64, Ordering};
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::GroupElement;
use crate::bfs::{bfs_ball, BallTable, BfsError, DEFAULT_BUDGET};
use crate::lattice::{Elem, GeneratingSet, Lattice, LatticeError, LatticeSpec};
use crate::pmp::distance::{DistanceEstimator, DistanceOptions};
use crate::pmp::{integrate_extremal, ExtremalState, PmpError};
use crate::space::HorizontalSpace;

/// Points whose estimator gap exceeds this are skipped.
pub const MAX_GAP: f64 = 0.5;
/// Skipped fraction above which a row is flagged unreliable.
pub const MAX_SKIPPED_FRACTION: f64 = 0.1;

#[derive(Debug, Error)]
pub enum ConvergenceError {
    #[error(transparent)]
    Bfs(#[from] BfsError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Pmp(#[from] PmpError),
    #[error("empty point cloud")]
    EmptyCloud,
    #[error("need at least 3 rows with D > 0 to fit, got {0}")]
    TooFewRows(usize),
    #[error("estimator gap above {MAX_GAP} at every sampled point of radius {n}")]
    EstimatorGapTooWide { n: usize },
    #[error("radius {n} is beyond the computed ball (radius {radius})")]
    RadiusOutsideBall { n: usize, radius: usize },
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for ConvergenceError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

/// Sphere sampling policy.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SamplePolicy {
    /// Spheres up to this size are used in full.
    pub full_threshold: usize,
    /// Sample size for larger spheres.
    pub sample: usize,
    pub seed: u64,
}

impl Default for SamplePolicy {
    fn default() -> Self {
        Self {
            full_threshold: 100_000,
            sample: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pointwise,
    Hausdorff,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub n: usize,
    pub discrepancy: f64,
    pub samples: usize,
    pub skipped: usize,
    pub method: Method,
    pub unreliable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub alpha: f64,
    pub stderr: f64,
    pub used: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyProfile {
    pub rows: Vec<ProfileRow>,
    /// Fit of `D(n) ~ n^{−α}`, `None` when fewer than three rows are usable.
    pub fit: Option<Fit>,
    /// Fit of the rescaled profile `D(n)/n`.
    pub scaled_fit: Option<Fit>,
    /// All rows have `D(n) = 0`.
    pub exact_agreement: bool,
}

/// Negated least-squares slope of `log D` against `log n`, excluding rows
/// with `D = 0`.
pub fn fit_exponent(rows: &[(f64, f64)]) -> Result<Fit, ConvergenceError> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.0 > 0.0 && r.1 > 0.0)
        .map(|r| (r.0.ln(), r.1.ln()))
        .collect();
    let excluded = rows.len() - pts.len();
    if pts.len() < 3 {
        return Err(ConvergenceError::TooFewRows(pts.len()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let sse: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let stderr = (sse / (k - 2.0) / sxx).sqrt();
    Ok(Fit {
        alpha: -slope,
        stderr,
        used: pts.len(),
        excluded,
    })
}

/// Word ball plus the cone distance estimator for one lattice.
pub struct Comparison {
    lattice: Lattice,
    cone: HorizontalSpace,
    table: BallTable,
    opts: DistanceOptions,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointwiseResult {
    pub n: usize,
    pub discrepancy: f64,
    pub samples: usize,
    pub skipped: usize,
    pub unreliable: bool,
}

impl Comparison {
    /// Runs BFS up to `radius`.
    pub fn new(
        lattice: Lattice,
        gens: &GeneratingSet,
        radius: usize,
        budget: usize,
        opts: DistanceOptions,
    ) -> Result<Self, ConvergenceError> {
        let cone = gens.cone_space(&lattice)?;
        let table = bfs_ball(&lattice, gens, radius, budget)?;
        Ok(Self {
            lattice,
            cone,
            table,
            opts,
        })
    }

    pub fn table(&self) -> &BallTable {
        &self.table
    }

    pub fn cone(&self) -> &HorizontalSpace {
        &self.cone
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Deterministic sample of the sphere of radius `n`.
    pub fn sphere_sample(&self, n: usize, policy: &SamplePolicy) -> Result<Vec<&Elem>, ConvergenceError> {
        if n > self.table.radius() {
            return Err(ConvergenceError::RadiusOutsideBall { n, radius: self.table.radius() });
        }
        let sphere = self.table.sphere(n);
        if sphere.len() <= policy.full_threshold {
            return Ok(sphere.iter().collect());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(policy.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut idx = sample(&mut rng, sphere.len(), policy.sample.min(sphere.len())).into_vec();
        idx.sort_unstable();
        Ok(idx.into_iter().map(|i| &sphere[i]).collect())
    }

    /// `max |ρ_S(g) − d∞(embed g)|` over the sampled sphere; `d∞` is the
    /// midpoint of the estimator bounds and points with a wide gap are
    /// skipped.
    pub fn pointwise(&self, n: usize, policy: &SamplePolicy) -> Result<PointwiseResult, ConvergenceError> {
        let points = self.sphere_sample(n, policy)?;
        let est = DistanceEstimator::new(&self.cone, self.opts);
        est.k1();
        let values: Vec<Option<f64>> = points
            .par_iter()
            .map(|g| {
                let e = est.estimate(&self.lattice.embed(g).ok()?).ok()?;
                (e.gap() <= MAX_GAP).then(|| (n as f64 - e.midpoint()).abs())
            })
            .collect();
        let skipped = values.iter().filter(|v| v.is_none()).count();
        if !points.is_empty() && skipped == points.len() {
            return Err(ConvergenceError::EstimatorGapTooWide { n });
        }
        let discrepancy = values.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        Ok(PointwiseResult {
            n,
            discrepancy,
            samples: points.len(),
            skipped,
            unreliable: !points.is_empty() && skipped as f64 > MAX_SKIPPED_FRACTION * points.len() as f64,
        })
    }

    /// `δ_{1/n}` of (a sample of at most `count` points of) the ball `B(n)`.
    pub fn scaled_ball_cloud(&self, n: usize, count: usize, seed: u64) -> Result<Vec<GroupElement>, ConvergenceError> {
        if n > self.table.radius() {
            return Err(ConvergenceError::RadiusOutsideBall { n, radius: self.table.radius() });
        }
        let ball: Vec<&Elem> = self.table.iter().take_while(|(_, r)| (*r as usize) <= n).map(|(g, _)| g).collect();
        let chosen: Vec<&Elem> = if ball.len() <= count {
            ball
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = sample(&mut rng, ball.len(), count).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| ball[i]).collect()
        };
        let alg = self.lattice.algebra();
        let s = 1.0 / n.max(1) as f64;
        chosen
            .into_iter()
            .map(|g| Ok(alg.dilate(s, &self.lattice.embed(g)?).expect("positive factor")))
            .collect()
    }

    /// Hausdorff distance between `δ_{1/n} B(n)` and a unit cone ball sample.
    pub fn hausdorff(&self, n: usize, count: usize, seed: u64) -> Result<f64, ConvergenceError> {
        let word = self.scaled_ball_cloud(n, count, seed)?;
        let cone = unit_ball_cloud(&self.cone, count, seed)?;
        let est = DistanceEstimator::new(&self.cone, self.opts);
        est.k1();
        let alg = self.lattice.algebra();
        let p = alg.p();
        // π is 1-Lipschitz onto the cone norm
        let projected = |x: &GroupElement, y: &GroupElement| {
            let d: Vec<f64> = (0..p).map(|a| y.coords[a] - x.coords[a]).collect();
            self.cone.cone_norm().value(&d)
        };
        hausdorff_discrepancy_bounded(&word, &cone, projected, |x, y| {
            let d = alg.multiply(&alg.inverse(x), y).expect("same dimension");
            est.estimate(&d).map_or(f64::INFINITY, |e| e.midpoint())
        })
    }
}

/// Symmetric Hausdorff distance under `dist`.
pub fn hausdorff_discrepancy<F>(a: &[GroupElement], b: &[GroupElement], dist: F) -> Result<f64, ConvergenceError>
where
    F: Fn(&GroupElement, &GroupElement) -> f64 + Sync,
{
    hausdorff_discrepancy_bounded(a, b, |_, _| 0.0, dist)
}

/// [`hausdorff_discrepancy`] with a cheap `lower ≤ dist` used to skip
/// evaluations that cannot change the result.
pub fn hausdorff_discrepancy_bounded<L, F>(
    a: &[GroupElement],
    b: &[GroupElement],
    lower: L,
    dist: F,
) -> Result<f64, ConvergenceError>
where
    L: Fn(&GroupElement, &GroupElement) -> f64 + Sync,
    F: Fn(&GroupElement, &GroupElement) -> f64 + Sync,
{
    if a.is_empty() || b.is_empty() {
        return Err(ConvergenceError::EmptyCloud);
    }
    // nonnegative floats order like their bit patterns
    let running = AtomicU64::new(0f64.to_bits());
    let directed = |x: &[GroupElement], y: &[GroupElement], flip: bool| {
        x.par_iter().for_each(|p| {
            let bound = |q: &GroupElement| if flip { lower(q, p) } else { lower(p, q) };
            let exact = |q: &GroupElement| if flip { dist(q, p) } else { dist(p, q) };
            let mut cands: Vec<(f64, &GroupElement)> = y.iter().map(|q| (bound(q).max(0.0), q)).collect();
            cands.sort_by(|s, t| s.0.total_cmp(&t.0));
            let mut best = f64::INFINITY;
            for (lb, q) in cands {
                let floor = f64::from_bits(running.load(Ordering::Relaxed));
                if lb >= best || best <= floor {
                    break;
                }
                best = best.min(exact(q));
            }
            running.fetch_max(best.max(0.0).to_bits(), Ordering::Relaxed);
        });
    };
    directed(a, b, false);
    directed(b, a, true);
    Ok(f64::from_bits(running.load(Ordering::Relaxed)))
}

/// Points of the unit cone ball: dilates of straight segments over a grid of
/// directions, plus endpoints of normal extremals of length at most 1.
pub fn unit_ball_cloud(space: &HorizontalSpace, count: usize, seed: u64) -> Result<Vec<GroupElement>, ConvergenceError> {
    if count == 0 {
        return Err(ConvergenceError::EmptyCloud);
    }
    let alg = space.algebra();
    let (n, p) = (alg.n(), alg.p());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direction = |rng: &mut ChaCha8Rng, k: usize, total: usize| -> Vec<f64> {
        if p == 2 {
            let th = std::f64::consts::TAU * k as f64 / total as f64;
            vec![th.cos(), th.sin()]
        } else {
            (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    };
    let straight = if n == p { count } else { count / 3 };
    let radial = ((straight as f64).sqrt().ceil() as usize).max(1);
    let angular = straight.div_ceil(radial).max(1);
    let mut out = vec![GroupElement::new(vec![0.0; n])];
    'outer: for a in 0..angular {
        let u = direction(&mut rng, a, angular);
        let r = space.norm().value(&u);
        for t in 1..=radial {
            if out.len() >= straight {
                break 'outer;
            }
            let s = t as f64 / radial as f64 / r;
            let mut x = vec![0.0; n];
            x[..p].iter_mut().zip(&u).for_each(|(a, b)| *a = b * s);
            out.push(GroupElement::new(x));
        }
    }
    let mut k = 0;
    while out.len() < count && n > p {
        let w = direction(&mut rng, k, count);
        let d = space.norm().dual_value(&w);
        let mut xi: Vec<f64> = w.iter().map(|v| v / d).collect();
        for _ in p..n {
            let mag = 10f64.powf(rng.gen_range(-1.0..2.0));
            xi.push(if rng.gen_bool(0.5) { mag } else { -mag });
        }
        let horizon = rng.gen_range(0.05..1.0);
        k += 1;
        if let Ok(traj) = integrate_extremal(alg, space.norm(), &ExtremalState::normal_at_identity(xi), horizon, 1) {
            out.push(GroupElement::new(traj.endpoint().to_vec()));
        }
        if k > 20 * count {
            break;
        }
    }
    Ok(out)
}

/// Lattice reference in an experiment config: a preset name or a custom law.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeConfig {
    Preset(String),
    Custom(LatticeSpec),
}

/// Generators: a preset name or explicit elements.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorsConfig {
    Preset(String),
    List(Vec<Elem>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorConfig {
    #[serde(default = "default_segments")]
    pub segments: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

fn default_segments() -> usize {
    64
}

fn default_restarts() -> usize {
    8
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            segments: default_segments(),
            restarts: default_restarts(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub lattice: LatticeConfig,
    #[serde(default = "default_generators")]
    pub generators: GeneratorsConfig,
    pub schedule: Vec<usize>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub sampling: SamplePolicy,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// Points per cloud for the Hausdorff proxy and dumps; 0 disables dumps.
    #[serde(default)]
    pub cloud_points: usize,
}

fn default_generators() -> GeneratorsConfig {
    GeneratorsConfig::Preset("standard".into())
}

fn default_methods() -> Vec<Method> {
    vec![Method::Pointwise]
}

fn default_budget() -> usize {
    DEFAULT_BUDGET
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConvergenceError> {
        serde_json::from_str(text).map_err(|e| ConvergenceError::Config(e.to_string()))
    }

    pub fn lattice(&self) -> Result<Lattice, ConvergenceError> {
        Ok(match &self.lattice {
            LatticeConfig::Preset(name) => Lattice::preset(name)?,
            LatticeConfig::Custom(spec) => Lattice::from_spec(spec)?,
        })
    }

    pub fn generators(&self, lattice: &Lattice) -> Result<GeneratingSet, ConvergenceError> {
        Ok(match &self.generators {
            GeneratorsConfig::Preset(name) => GeneratingSet::preset(lattice, name)?,
            GeneratorsConfig::List(list) => GeneratingSet::new(lattice, list)?,
        })
    }
}

/// Runs the configured schedule. When `out_dir` is given, writes
/// `profile.csv`, `fit.json` and optional `cloud_<n>.csv`; rows already
/// computed are written even if a later radius fails.
pub fn run_experiment(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<DiscrepancyProfile, ConvergenceError> {
    let mut schedule = config.schedule.clone();
    schedule.sort_unstable();
    schedule.dedup();
    let radius = *schedule.last().ok_or_else(|| ConvergenceError::Config("empty schedule".into()))?;
    let lattice = config.lattice()?;
    let gens = config.generators(&lattice)?;
    let opts = DistanceOptions {
        segments: config.estimator.segments,
        restarts: config.estimator.restarts,
        seed: config.seed,
        ..Default::default()
    };
    let cmp = Comparison::new(lattice, &gens, radius, config.budget, opts)?;
    let policy = SamplePolicy {
        seed: config.seed,
        ..config.sampling
    };
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
    }
    let mut rows = Vec::new();
    let mut failure = None;
    for &n in &schedule {
        for &method in &config.methods {
            let row = match method {
                Method::Pointwise => cmp.pointwise(n, &policy).map(|r| ProfileRow {
                    n,
                    discrepancy: r.discrepancy,
                    samples: r.samples,
                    skipped: r.skipped,
                    method,
                    unreliable: r.unreliable,
                }),
                Method::Hausdorff => {
                    let count = config.cloud_points.max(1);
                    cmp.hausdorff(n, count, config.seed).map(|d| ProfileRow {
                        n,
                        discrepancy: d,
                        samples: count,
                        skipped: 0,
                        method,
                        unreliable: !d.is_finite(),
                    })
                }
            };
            match row {
                Ok(r) => rows.push(r),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        if failure.is_some() {
            break;
        }
        if let (Some(dir), true) = (out_dir, config.cloud_points > 0) {
            let cloud = cmp.scaled_ball_cloud(n, config.cloud_points, config.seed)?;
            fs::write(dir.join(format!("cloud_{n}.csv")), cloud_csv(&cloud))?;
        }
    }
    let profile = build_profile(rows);
    if let Some(dir) = out_dir {
        write_profile(&profile, dir)?;
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(profile),
    }
}

fn build_profile(rows: Vec<ProfileRow>) -> DiscrepancyProfile {
    let primary: Vec<&ProfileRow> = {
        let first = rows.first().map(|r| r.method);
        rows.iter().filter(|r| Some(r.method) == first).collect()
    };
    let pts: Vec<(f64, f64)> = primary.iter().map(|r| (r.n as f64, r.discrepancy)).collect();
    let scaled: Vec<(f64, f64)> = pts.iter().map(|&(n, d)| (n, d / n)).collect();
    DiscrepancyProfile {
        exact_agreement: !rows.is_empty() && rows.iter().all(|r| r.discrepancy == 0.0),
        fit: fit_exponent(&pts).ok(),
        scaled_fit: fit_exponent(&scaled).ok(),
        rows,
    }
}

fn cloud_csv(points: &[GroupElement]) -> String {
    let mut out = String::new();
    if let Some(p) = points.first() {
        let header: Vec<String> = (1..=p.coords.len()).map(|a| format!("x{a}")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
    }
    for p in points {
        let row: Vec<String> = p.coords.iter().map(|c| format!("{c}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes `profile.csv` and `fit.json`.
pub fn write_profile(profile: &DiscrepancyProfile, dir: &Path) -> Result<(), ConvergenceError> {
    let mut csv = String::from("n,method,D,samples,skipped,unreliable\n");
    for r in &profile.rows {
        let method = match r.method {
            Method::Pointwise => "pointwise",
            Method::Hausdorff => "hausdorff",
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, method, r.discrepancy, r.samples, r.skipped, r.unreliable
        ));
    }
    fs::write(dir.join("profile.csv"), csv)?;
    let fit = serde_json::json!({
        "alpha": profile.fit.map(|f| f.alpha),
        "stderr": profile.fit.map(|f| f.stderr),
        "fit": profile.fit,
        "scaled_fit": profile.scaled_fit,
        "exact_agreement": profile.exact_agreement,
        "unreliable_rows": profile.rows.iter().filter(|r| r.unreliable).count(),
    });
    fs::write(
        dir.join("fit.json"),
        serde_json::to_string_pretty(&fit).map_err(|e| ConvergenceError::Io(e.to_string()))?,
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits() {
        let exact: Vec<(f64, f64)> = (1..8).map(|n| (n as f64, 3.0 / n as f64)).collect();
        let f = fit_exponent(&exact).unwrap();
        assert!((f.alpha - 1.0).abs() < 1e-12 && f.stderr < 1e-12);
        let half: Vec<(f64, f64)> = (1..8).map(|n| (n as f64, 2.0 / (n as f64).sqrt())).collect();
        assert!((fit_exponent(&half).unwrap().alpha - 0.5).abs() < 1e-12);
        let flat: Vec<(f64, f64)> = (1..8).map(|n| (n as f64, 0.7)).collect();
        assert!(fit_exponent(&flat).unwrap().alpha.abs() < 1e-12);
        assert!(matches!(fit_exponent(&[(1.0, 0.0), (2.0, 1.0)]), Err(ConvergenceError::TooFewRows(1))));
    }

    #[test]
    fn hausdorff_definition() {
        let a: Vec<GroupElement> = (0..5).map(|i| GroupElement::new(vec![i as f64, 0.0])).collect();
        let dist = |x: &GroupElement, y: &GroupElement| x.max_abs_diff(y);
        assert_eq!(hausdorff_discrepancy(&a, &a, dist).unwrap(), 0.0);
        let mut b = a.clone();
        b.push(GroupElement::new(vec![2.0, 0.3]));
        assert!((hausdorff_discrepancy(&a, &b, dist).unwrap() - 0.3).abs() < 1e-15);
        assert!(hausdorff_discrepancy(&[], &b, dist).is_err());
    }

    #[test]
    fn abelian_pointwise_is_zero() {
        let l = Lattice::zd(2);
        let s = GeneratingSet::preset(&l, "standard").unwrap();
        let c = Comparison::new(l, &s, 6, DEFAULT_BUDGET, DistanceOptions::default()).unwrap();
        for n in 0..=6 {
            assert_eq!(c.pointwise(n, &SamplePolicy::default()).unwrap().discrepancy, 0.0);
        }
    }

    #[test]
    fn abelian_hausdorff_is_lattice_scale() {
        let l = Lattice::zd(2);
        let s = GeneratingSet::preset(&l, "standard").unwrap();
        let c = Comparison::new(l, &s, 10, DEFAULT_BUDGET, DistanceOptions::default()).unwrap();
        let d = c.hausdorff(10, 400, 0).unwrap();
        assert!(d <= 0.2, "{d}");
    }

    #[test]
    fn heisenberg_center_direction() {
        let l = Lattice::h3z();
        let s = GeneratingSet::preset(&l, "standard").unwrap();
        let c = Comparison::new(l, &s, 8, DEFAULT_BUDGET, DistanceOptions::default()).unwrap();
        // d∞(0,0,m) = 4√m for the L1 cone norm
        for m in [1i64, 4] {
            let rho = c.table().word_length(&[0, 0, m]).unwrap() as f64;
            let est = DistanceEstimator::new(c.cone(), DistanceOptions::default())
                .estimate(&GroupElement::new(vec![0.0, 0.0, m as f64]))
                .unwrap();
            assert!((est.midpoint() - 4.0 * (m as f64).sqrt()).abs() < 1e-9);
            assert!(rho >= est.lower - 1e-9);
        }
        let r = c.pointwise(6, &SamplePolicy::default()).unwrap();
        assert_eq!(r.skipped, 0);
        assert!(r.discrepancy < 3.0);
    }

    #[test]
    fn experiment_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::from_json(r#"{"lattice":"z2","schedule":[2,3,4]}"#).unwrap();
        let p = run_experiment(&cfg, Some(dir.path())).unwrap();
        assert!(p.exact_agreement && p.fit.is_none());
        assert!(dir.path().join("profile.csv").exists());
        let fit: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
        assert_eq!(fit["exact_agreement"], true);
    }
}
