//! Acceptance suite: one PASS/FAIL line per criterion, with runtimes.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nilcone::algebra::{presets, GroupElement, NilpotentAlgebra};
use nilcone::bfs::{bfs_ball, DEFAULT_BUDGET};
use nilcone::convergence::{run_experiment, ExperimentConfig, GeneratorsConfig, LatticeConfig, Method};
use nilcone::lattice::{GeneratingSet, Lattice};
use nilcone::nonsingular::{abnormal_from_witness, classify, ClassifyOptions, Verdict};
use nilcone::norm::Norm;
use nilcone::path::{count_irregular_segments, HorizontalPath};
use nilcone::pmp::distance::{shoot_distance, DistanceEstimator, DistanceOptions};
use nilcone::pmp::{is_abnormal, ABNORMAL_TOL};
use nilcone::scalar::{ratio, Exact};
use nilcone::space::HorizontalSpace;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn h3(norm: Norm) -> HorizontalSpace {
    HorizontalSpace::polarized(Arc::new(presets::heisenberg()), norm).unwrap()
}

fn center() -> GroupElement {
    GroupElement::new(vec![0.0, 0.0, 1.0])
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn l2_distance() -> Outcome {
    let sp = h3(Norm::L2(2));
    let exact = 2.0 * PI.sqrt();
    let est = DistanceEstimator::new(&sp, DistanceOptions::default()).estimate(&center()).unwrap();
    let shot = shoot_distance(&sp, &center(), 32).unwrap();
    let (rl, ru, rs) = (rel(est.lower, exact), rel(est.upper, exact), rel(shot.upper, exact));
    outcome(
        rl <= 1e-3 && ru <= 1e-3 && rs <= 1e-3,
        format!(
            "lower {:.7} ({:?}), upper {:.7} ({:?}), shooting {:.7}; target 2√π = {exact:.7}",
            est.lower, est.lower_method, est.upper, est.upper_method, shot.upper
        ),
    )
}

/// Four unit sides along distinct axis directions.
fn is_unit_square(path: &HorizontalPath) -> bool {
    let s = path.simplified();
    let mut dirs: Vec<(i64, i64)> = s
        .segments
        .iter()
        .map(|seg| (seg.direction[0].round() as i64, seg.direction[1].round() as i64))
        .collect();
    let axis = s.segments.iter().all(|seg| {
        let d = &seg.direction;
        (d[0].abs() - 1.0).abs() + d[1].abs() < 1e-9 || d[0].abs() + (d[1].abs() - 1.0).abs() < 1e-9
    });
    let sides = s.segments.iter().all(|seg| (seg.duration - 1.0).abs() < 1e-6);
    dirs.sort_unstable();
    dirs.dedup();
    s.len() == 4 && axis && sides && dirs.len() == 4
}

fn l1_distance() -> Outcome {
    let sp = h3(Norm::L1(2));
    let est = DistanceEstimator::new(&sp, DistanceOptions::default()).estimate(&center()).unwrap();
    let square = is_unit_square(&est.path);
    let err = (est.lower - 4.0).abs().max((est.upper - 4.0).abs());
    outcome(
        err <= 1e-3 && square,
        format!(
            "lower {:.7}, upper {:.7}, witness has {} segments, square: {square}",
            est.lower,
            est.upper,
            est.path.simplified().len()
        ),
    )
}

fn segment_counting() -> Outcome {
    let l1 = h3(Norm::L1(2));
    let l2 = h3(Norm::L2(2));
    let opts = DistanceOptions::default();
    let sq = DistanceEstimator::new(&l1, opts).estimate(&center()).unwrap().path;
    let circ = DistanceEstimator::new(&l2, opts).estimate(&center()).unwrap().path;
    let r2 = 2.0 * SQRT_2 / PI;
    let a = count_irregular_segments(&l1, &sq, 4, 1.0).unwrap();
    let b = count_irregular_segments(&l2, &circ, 4, r2).unwrap();
    // regular 4096-gon traced from the start vertex as an independent circle
    let k = 4096;
    let moves: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let th = 2.0 * PI * (i as f64 + 0.5) / k as f64;
            vec![-th.sin(), th.cos()]
        })
        .collect();
    let polygon = HorizontalPath::from_displacements(l2.norm(), &moves);
    let c = count_irregular_segments(&l2, &polygon, 4, r2).unwrap();
    outcome(a == 0 && b == 0 && c == 0, format!("I(l1, 4, 1) = {a}, I(l2, 4, 2√2/π) = {b}, polygon check = {c}"))
}

/// Classifies `alg` under the 10 s per-algebra budget.
fn singular_witness_ok(alg: NilpotentAlgebra, norm: Norm) -> (bool, String) {
    let start = Instant::now();
    let opts = ClassifyOptions::default();
    let sp = HorizontalSpace::polarized(Arc::new(alg), norm).unwrap();
    let rep = classify(sp.algebra(), &opts);
    match rep.verdict {
        Verdict::Singular { witness, covector } => {
            let (_, ext, _) = abnormal_from_witness(&sp, &witness, &covector).unwrap();
            let check = is_abnormal(&ext.trajectory(sp.algebra(), 1.0, 99));
            (
                check.abnormal && !check.degenerate && check.residual <= ABNORMAL_TOL && start.elapsed() < Duration::from_secs(10),
                format!("singular u = {witness:?}, ξ = {covector:?}, residual {:.1e}", check.residual),
            )
        }
        other => (false, format!("expected singular, got {other:?}")),
    }
}

fn nonsingular_verdicts() -> Outcome {
    let start = Instant::now();
    let h = classify(&presets::heisenberg(), &ClassifyOptions::default());
    let h_ok = matches!(h.verdict, Verdict::NonSingular { epsilon } if (epsilon - 1.0).abs() <= 1e-9)
        && start.elapsed() < Duration::from_secs(10);
    let (a, da) = singular_witness_ok(presets::r_times_heisenberg(), Norm::L2(3));
    let (b, db) = singular_witness_ok(presets::heisenberg_squared(), Norm::L2(4));
    outcome(h_ok && a && b, format!("h3 {:?}; ℝ×h3 {da}; h3×h3 {db}", h.verdict))
}

fn abnormal_pmp() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    let mut ok = true;
    for norm in [Norm::L2(3), Norm::L1(3), Norm::Linf(3)] {
        let sp = HorizontalSpace::polarized(Arc::new(presets::r_times_heisenberg()), norm).unwrap();
        // λ₀(t) = (exp(tW), Z*)
        let (_, ext, _) = abnormal_from_witness(&sp, &[0.0, 0.0, 1.0], &[1.0]).unwrap();
        let res = ext.residuals(sp.algebra(), sp.norm(), 1.0, 100);
        ok &= res.ode <= 1e-10 && res.max_hamiltonian <= 1e-10;
        worst = (worst.0.max(res.ode), worst.1.max(res.max_hamiltonian));
    }
    outcome(ok, format!("max ODE residual {:.1e}, max Hamiltonian {:.1e} over l2, l1, l∞", worst.0, worst.1))
}

fn homogeneity() -> Outcome {
    let sp = h3(Norm::L2(2));
    let alg = sp.algebra();
    let est = DistanceEstimator::new(&sp, DistanceOptions::default());
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..10 {
        let g = GroupElement::new((0..3).map(|_| rng.gen_range(-2.0..2.0)).collect());
        let d = est.estimate(&g).unwrap().midpoint();
        for t in [0.5, 2.0, 5.0] {
            let dt = est.estimate(&alg.dilate(t, &g).unwrap()).unwrap().midpoint();
            let r = dt / (t * d);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    outcome(lo >= 0.999 && hi <= 1.001, format!("ratios in [{lo:.6}, {hi:.6}] over 30 pairs"))
}

fn word_metric() -> Outcome {
    let l = Lattice::h3z();
    let s = GeneratingSet::preset(&l, "standard").unwrap();
    let t = bfs_ball(&l, &s, 20, DEFAULT_BUDGET).unwrap();
    let (b1, b2) = (t.ball_size(1), t.ball_size(2));
    let deg = t.growth_degree(8, 20).unwrap();
    let symmetric = t
        .iter()
        .filter(|(_, r)| *r <= 6)
        .all(|(g, r)| t.word_length(&l.inverse(g).unwrap()) == Some(r));
    outcome(
        b1 == 5 && b2 == 17 && (3.7..=4.3).contains(&deg) && symmetric,
        format!("|B(1)| = {b1}, |B(2)| = {b2}, growth degree {deg:.4}, ρ(g) = ρ(g⁻¹) on B(6): {symmetric}"),
    )
}

fn experiment(lattice: &str, gens: &str, schedule: Vec<usize>) -> ExperimentConfig {
    ExperimentConfig {
        lattice: LatticeConfig::Preset(lattice.into()),
        generators: GeneratorsConfig::Preset(gens.into()),
        schedule,
        methods: vec![Method::Pointwise],
        sampling: Default::default(),
        estimator: Default::default(),
        seed: 0,
        budget: DEFAULT_BUDGET,
        cloud_points: 0,
    }
}

fn discrepancy() -> Outcome {
    let h = run_experiment(&experiment("h3z", "standard", vec![8, 12, 16, 20, 24]), None).unwrap();
    let max_all = h.rows.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
    let max_early = h.rows.iter().filter(|r| r.n <= 12).map(|r| r.discrepancy).fold(0.0, f64::max);
    let profile: Vec<String> = h.rows.iter().map(|r| format!("{}:{:.3}", r.n, r.discrepancy)).collect();
    let bounded = max_all - max_early <= 1.0 && h.rows.iter().all(|r| !r.unreliable);

    let skew = run_experiment(&experiment("zxh3z", "skew", vec![4, 6, 8, 10]), None).unwrap();
    let skew_rows: Vec<String> = skew.rows.iter().map(|r| format!("{}:{:.3}", r.n, r.discrepancy)).collect();
    let reported = skew.fit.is_some();
    let fit = skew
        .fit
        .map_or("no fit".to_string(), |f| format!("α = {:.3} ± {:.3} ({} rows, {} excluded)", f.alpha, f.stderr, f.used, f.excluded));

    let z2 = run_experiment(&experiment("z2", "standard", vec![4, 8, 12, 16]), None).unwrap();
    let zero = z2.exact_agreement && z2.rows.iter().all(|r| r.discrepancy == 0.0);
    outcome(
        bounded && reported && zero,
        format!(
            "H3Z D = [{}], growth {:.3}; skew D = [{}], {fit}; Z² D ≡ 0: {zero}",
            profile.join(", "),
            max_all - max_early,
            skew_rows.join(", ")
        ),
    )
}

fn random_exact(rng: &mut ChaCha8Rng, n: usize) -> GroupElement<Exact> {
    GroupElement {
        coords: (0..n).map(|_| ratio(rng.gen_range(-50..=50), rng.gen_range(1..=12))).collect(),
    }
}

fn exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let algebras = [presets::heisenberg(), presets::quaternionic(), presets::free_rank3(), presets::heisenberg_squared()];
    let (mut assoc, mut hom, mut dil) = (true, true, true);
    for i in 0..1000 {
        let alg = &algebras[i % algebras.len()];
        let n = alg.n();
        let (a, b, c) = (random_exact(&mut rng, n), random_exact(&mut rng, n), random_exact(&mut rng, n));
        let left = alg.multiply(&alg.multiply(&a, &b).unwrap(), &c).unwrap();
        let right = alg.multiply(&a, &alg.multiply(&b, &c).unwrap()).unwrap();
        assoc &= left == right;
        let ab = alg.project(&alg.multiply(&a, &b).unwrap()).coeffs;
        let sum: Vec<Exact> = alg.project(&a).coeffs.iter().zip(&alg.project(&b).coeffs).map(|(x, y)| x + y).collect();
        hom &= ab == sum;
        let (s, t) = (ratio(rng.gen_range(1..=9), rng.gen_range(1..=9)), ratio(rng.gen_range(1..=9), rng.gen_range(1..=9)));
        let st = &s * &t;
        dil &= alg.dilate(s, &alg.dilate(t, &a).unwrap()).unwrap() == alg.dilate(st, &a).unwrap();
        let id: GroupElement<Exact> = alg.identity();
        assoc &= id.coords.iter().all(Zero::is_zero);
    }
    outcome(assoc && hom && dil, format!("10³ triples: associativity {assoc}, π homomorphism {hom}, δ_s∘δ_t = δ_st {dil}"))
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check, Duration); 9] = [
        ("h3 l2 distance to (0,0,1) is 2√π", l2_distance, Duration::from_secs(30)),
        ("h3 l1 distance to (0,0,1) is 4 along a square", l1_distance, Duration::from_secs(30)),
        ("no irregular segments at M = 4", segment_counting, Duration::from_secs(1)),
        ("non-singularity verdicts and witnesses", nonsingular_verdicts, Duration::from_secs(30)),
        ("abnormal extremal satisfies the maximum principle", abnormal_pmp, Duration::from_secs(5)),
        ("distance is homogeneous under dilations", homogeneity, Duration::from_secs(300)),
        ("word metric on H3Z", word_metric, Duration::from_secs(120)),
        ("bounded discrepancy on H3Z, skew fit, Z² control", discrepancy, Duration::from_secs(1800)),
        ("exact group laws", exactness, Duration::from_secs(5)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let pass = out.pass && took <= *limit;
        failed += usize::from(!pass);
        println!(
            "criterion {}: {} {name} [{:.2}s, limit {}s] {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs(),
            out.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
