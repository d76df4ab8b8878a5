//! Non-singularity of 2-step algebras and abnormal extremals from singular
//! witnesses.
//!
//! The algebra is non-singular iff the `(n−p) × p` matrix
//! `M(u)_{k,a} = Σ_i u_i c_ia^k` has rank `n − p` for every `u ≠ 0`. A
//! singular pair `(u, ξ)` with `ξᵀ M(u) = 0` is equivalently a kernel vector
//! `u` of the skew matrix `Ω(ξ)`.

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::NilpotentAlgebra;
use crate::linalg::{self, norm2};
use crate::path::HorizontalPath;
use crate::pmp::{AbnormalExtremal, ExtremalState};
use crate::scalar::Exact;
use crate::space::HorizontalSpace;

/// Minimum certified to call an algebra non-singular.
pub const NONSINGULAR_THRESHOLD: f64 = 1e-6;
/// Residual a singular witness must reach.
pub const WITNESS_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NonsingularError {
    #[error("witness fails certification: |ξᵀM(u)| = {0:.3e}")]
    WitnessNotSingular(f64),
    #[error("witness has the wrong shape: {0}")]
    BadWitness(String),
    #[error("the space must be V∞ itself")]
    NotPolarized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    /// `σ_min(M(u)) ≥ epsilon` on the unit sphere.
    NonSingular { epsilon: f64 },
    Singular { witness: Vec<f64>, covector: Vec<f64> },
    /// Neither certificate reached; `observed` is the smallest sampled value,
    /// `certified` the proven lower bound.
    Undecidable { observed: f64, certified: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub samples: usize,
    pub restarts: usize,
    /// How the verdict was reached.
    pub method: String,
    /// Number of `σ_min` evaluations.
    pub evaluations: usize,
}

impl SingularityReport {
    pub fn is_singular(&self) -> bool {
        matches!(self.verdict, Verdict::Singular { .. })
    }

    pub fn is_nonsingular(&self) -> bool {
        matches!(self.verdict, Verdict::NonSingular { .. })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub samples: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            samples: 100_000,
            restarts: 64,
            seed: 0,
        }
    }
}

/// `M(u)` as a dense matrix.
fn m_matrix(alg: &NilpotentAlgebra, u: &[f64]) -> DMatrix<f64> {
    linalg::to_matrix(&alg.singularity_matrix(u).expect("length p"))
}

/// `min_{|ξ|=1} |ξᵀ M(u)|` together with the minimizing `ξ`.
pub fn sigma_min(alg: &NilpotentAlgebra, u: &[f64]) -> (f64, Vec<f64>) {
    let mt = m_matrix(alg, u).transpose();
    let (xi, s) = linalg::min_right_singular(&mt);
    (s, xi.iter().copied().collect())
}

/// `|ξᵀ M(u)|`.
pub fn witness_residual(alg: &NilpotentAlgebra, u: &[f64], xi: &[f64]) -> f64 {
    let m = alg.singularity_matrix(u).expect("length p");
    let p = alg.p();
    let row: Vec<f64> = (0..p).map(|a| m.iter().zip(xi).map(|(r, x)| r[a] * x).sum()).collect();
    norm2(&row)
}

fn normalize(v: &mut [f64]) {
    let r = norm2(v);
    if r > 0.0 {
        v.iter_mut().for_each(|x| *x /= r);
    }
}

/// Flips the sign so the first non-negligible entry is positive.
fn canonical_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    for x in v.iter_mut() {
        if x.abs() <= 1e-15 {
            *x = 0.0;
        }
    }
}

/// Orthonormal basis of the numerical kernel of `Ω(ξ)`.
fn omega_kernel(alg: &NilpotentAlgebra, xi: &[f64]) -> Vec<Vec<f64>> {
    let om = linalg::to_matrix(&alg.omega(xi));
    let p = alg.p();
    let svd = om.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let scale = svd.singular_values.max().max(1.0);
    (0..p)
        .filter(|&r| svd.singular_values[r] <= 1e-10 * scale)
        .map(|r| vt.row(r).iter().copied().collect())
        .collect()
}

/// Canonical witness from a singular covector: `u` is the normalized
/// projection of the first coordinate axis not orthogonal to `ker Ω(ξ)`.
fn witness_from_covector(alg: &NilpotentAlgebra, xi: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut xi = xi.to_vec();
    normalize(&mut xi);
    canonical_sign(&mut xi);
    let kernel = omega_kernel(alg, &xi);
    let p = alg.p();
    let mut u = if kernel.is_empty() {
        let (v, _) = linalg::min_right_singular(&linalg::to_matrix(&alg.omega(&xi)));
        v.iter().copied().collect()
    } else {
        let mut found = None;
        for a in 0..p {
            let mut proj = vec![0.0; p];
            for k in &kernel {
                let c = k[a];
                for (pv, kv) in proj.iter_mut().zip(k) {
                    *pv += c * kv;
                }
            }
            if norm2(&proj) > 1e-8 {
                found = Some(proj);
                break;
            }
        }
        found?
    };
    normalize(&mut u);
    canonical_sign(&mut u);
    // refresh ξ against the final u for the smallest residual
    let (_, xi2) = sigma_min(alg, &u);
    let mut xi2 = xi2;
    canonical_sign(&mut xi2);
    let better = if witness_residual(alg, &u, &xi2) < witness_residual(alg, &u, &xi) { xi2 } else { xi };
    Some((u, better))
}

/// Alternating minimization of `|Ω(ξ) u|` over both unit spheres.
fn alternate(alg: &NilpotentAlgebra, mut u: Vec<f64>, iters: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let mut best = (f64::INFINITY, u.clone(), Vec::new());
    for _ in 0..iters {
        let (s, xi) = sigma_min(alg, &u);
        if s < best.0 {
            best = (s, u.clone(), xi.clone());
        }
        if s <= WITNESS_TOL * 1e-3 {
            break;
        }
        let (v, _) = linalg::min_right_singular(&linalg::to_matrix(&alg.omega(&xi)));
        u = v.iter().copied().collect();
    }
    best
}

fn try_witness(alg: &NilpotentAlgebra, xi: &[f64]) -> Option<Verdict> {
    let (u, xi) = witness_from_covector(alg, xi)?;
    if witness_residual(alg, &u, &xi) <= WITNESS_TOL {
        Some(Verdict::Singular { witness: u, covector: xi })
    } else {
        None
    }
}

/// Low-discrepancy grid on the unit sphere of `ℝ^p`: points of a uniform grid
/// on the faces of the cube `[−1,1]^p`, pushed radially outward. Returns the
/// points and a bound on the chordal covering radius.
fn cube_sphere_grid(p: usize, target: usize) -> (Vec<Vec<f64>>, f64) {
    if p == 1 {
        return (vec![vec![1.0], vec![-1.0]], 0.0);
    }
    let per_face = (target / (2 * p)).max(1);
    let k = ((per_face as f64).powf(1.0 / (p - 1) as f64).floor() as usize).max(2);
    let spacing = 2.0 / (k - 1) as f64;
    let mut pts = Vec::new();
    for axis in 0..p {
        for sign in [1.0, -1.0] {
            let mut idx = vec![0usize; p - 1];
            loop {
                let mut v = Vec::with_capacity(p);
                let mut it = idx.iter();
                for a in 0..p {
                    if a == axis {
                        v.push(sign);
                    } else {
                        v.push(-1.0 + spacing * *it.next().unwrap() as f64);
                    }
                }
                normalize(&mut v);
                pts.push(v);
                let mut d = 0;
                while d < p - 1 {
                    idx[d] += 1;
                    if idx[d] < k {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == p - 1 {
                    break;
                }
            }
        }
    }
    // radial projection from outside the unit ball is 1-Lipschitz
    let radius = 0.5 * spacing * ((p - 1) as f64).sqrt();
    (pts, radius)
}

/// Upper bound on `max_{|u|=1} ‖M(u)‖₂`, the Lipschitz constant of `σ_min`.
fn lipschitz(alg: &NilpotentAlgebra) -> f64 {
    alg.structure().map(|(_, _, _, c)| c * c).sum::<f64>().sqrt()
}

/// Exact symmetric matrix `Q` with `Pf(Ω(ξ)) = ξᵀ Q ξ` for `p = 4`.
fn pfaffian_form(alg: &NilpotentAlgebra) -> Vec<Vec<Exact>> {
    let (n, p) = (alg.n(), alg.p());
    let m = n - p;
    let a = |i: usize, j: usize, k: usize| alg.constant_exact(i, j, p + k);
    let half = Exact::new(1.into(), 2.into());
    let mut q = vec![vec![Exact::zero(); m]; m];
    for (k, row) in q.iter_mut().enumerate() {
        for (l, cell) in row.iter_mut().enumerate() {
            let prod = |i1, j1, i2, j2| a(i1, j1, k) * a(i2, j2, l) + a(i1, j1, l) * a(i2, j2, k);
            *cell = (prod(0, 1, 2, 3) - prod(0, 2, 1, 3) + prod(0, 3, 1, 2)) * half.clone();
        }
    }
    q
}

fn det_exact(mut a: Vec<Vec<Exact>>) -> Exact {
    let n = a.len();
    let mut det = Exact::from_integer(1.into());
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Exact::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let pv = a[col][col].clone();
        det *= pv.clone();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / pv.clone();
            let (top, rest) = a.split_at_mut(r);
            for (dst, src) in rest[0][col..n].iter_mut().zip(&top[col][col..n]) {
                *dst -= f.clone() * src.clone();
            }
        }
    }
    det
}

/// Sylvester's criterion: `Some(+1)` positive definite, `Some(-1)` negative
/// definite, `None` otherwise.
fn definiteness(q: &[Vec<Exact>]) -> Option<i8> {
    let m = q.len();
    let minors: Vec<Exact> = (1..=m)
        .map(|d| det_exact(q[..d].iter().map(|r| r[..d].to_vec()).collect()))
        .collect();
    if minors.iter().all(Signed::is_positive) {
        return Some(1);
    }
    let alternating = minors
        .iter()
        .enumerate()
        .all(|(d, v)| if d % 2 == 0 { v.is_negative() } else { v.is_positive() });
    alternating.then_some(-1)
}

/// Real root of the indefinite Pfaffian form on the unit sphere.
fn pfaffian_root(q: &[Vec<Exact>]) -> Vec<f64> {
    let m = q.len();
    let qf = DMatrix::from_fn(m, m, |i, j| num_traits::ToPrimitive::to_f64(&q[i][j]).unwrap_or(0.0));
    let eig = qf.symmetric_eigen();
    let (mut lo, mut hi) = (0, 0);
    for i in 0..m {
        if eig.eigenvalues[i] < eig.eigenvalues[lo] {
            lo = i;
        }
        if eig.eigenvalues[i] > eig.eigenvalues[hi] {
            hi = i;
        }
    }
    let (lmin, lmax) = (eig.eigenvalues[lo], eig.eigenvalues[hi]);
    if lmin >= 0.0 {
        return eig.eigenvectors.column(lo).iter().copied().collect();
    }
    if lmax <= 0.0 {
        return eig.eigenvectors.column(hi).iter().copied().collect();
    }
    // lmax a² + lmin b² = 0
    let a = (-lmin).sqrt();
    let b = lmax.sqrt();
    let v: Vec<f64> = (0..m)
        .map(|r| a * eig.eigenvectors[(r, hi)] + b * eig.eigenvectors[(r, lo)])
        .collect();
    let mut v = v;
    normalize(&mut v);
    v
}

/// Decides non-singularity.
///
/// Witnesses are sought first along the coordinate axes, then by alternating
/// minimization from seeded random starts. Without a witness, `n − p = 1`
/// gives the exact `ε = σ_min(Ω(1))`, `p = 4` is decided exactly through the
/// Pfaffian quadratic form, and otherwise a sphere grid with a Lipschitz
/// covering bound certifies `ε`.
pub fn classify(alg: &NilpotentAlgebra, opts: &ClassifyOptions) -> SingularityReport {
    let (n, p) = (alg.n(), alg.p());
    let m = n - p;
    let mut evaluations = 0usize;
    let report = |verdict, method: &str, evaluations| SingularityReport {
        verdict,
        samples: opts.samples,
        restarts: opts.restarts,
        method: method.to_string(),
        evaluations,
    };
    if m == 0 {
        return report(Verdict::NonSingular { epsilon: f64::INFINITY }, "trivial-center", 0);
    }
    if p < m {
        let mut u = vec![0.0; p];
        u[0] = 1.0;
        let (_, mut xi) = sigma_min(alg, &u);
        canonical_sign(&mut xi);
        return report(Verdict::Singular { witness: u, covector: xi }, "dimension-count", 1);
    }

    // witness search
    let mut best_seen = f64::INFINITY;
    for a in 0..p {
        let mut u = vec![0.0; p];
        u[a] = 1.0;
        let (s, xi) = sigma_min(alg, &u);
        evaluations += 1;
        best_seen = best_seen.min(s);
        if s <= WITNESS_TOL {
            if let Some(v) = try_witness(alg, &xi) {
                return report(v, "axis-witness", evaluations);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.restarts {
        let mut u: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
        normalize(&mut u);
        let (s, _, xi) = alternate(alg, u, 60);
        evaluations += 60;
        best_seen = best_seen.min(s);
        if s <= 1e-9 {
            if let Some(v) = try_witness(alg, &xi) {
                return report(v, "alternating-witness", evaluations);
            }
        }
    }

    if m == 1 {
        let om = linalg::to_matrix(&alg.omega(&[1.0]));
        let eps = *linalg::singular_values(&om).last().expect("p >= 1");
        let verdict = if eps > NONSINGULAR_THRESHOLD {
            Verdict::NonSingular { epsilon: eps }
        } else {
            Verdict::Undecidable { observed: eps.min(best_seen), certified: eps }
        };
        return report(verdict, "exact-rank-one-center", evaluations);
    }

    if p == 4 {
        let q = pfaffian_form(alg);
        if definiteness(&q).is_some() {
            let qf = DMatrix::from_fn(m, m, |i, j| num_traits::ToPrimitive::to_f64(&q[i][j]).unwrap_or(0.0));
            let min_eig = qf.symmetric_eigen().eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
            // σ_min(Ω) ≥ |Pf| / ‖Ω‖₂ and ‖Ω(ξ)‖₂ ≤ L for unit ξ
            let eps = min_eig / lipschitz(alg);
            return report(Verdict::NonSingular { epsilon: eps }, "exact-pfaffian", evaluations);
        }
        let xi = pfaffian_root(&q);
        if let Some(v) = try_witness(alg, &xi) {
            return report(v, "pfaffian-root-witness", evaluations);
        }
    }

    let (grid, radius) = cube_sphere_grid(p, opts.samples);
    let observed = {
        use rayon::prelude::*;
        grid.par_iter()
            .map(|u| sigma_min(alg, u).0)
            .reduce(|| f64::INFINITY, f64::min)
    };
    evaluations += grid.len();
    let observed = observed.min(best_seen);
    let certified = observed - lipschitz(alg) * radius;
    let verdict = if certified > NONSINGULAR_THRESHOLD {
        Verdict::NonSingular { epsilon: certified }
    } else {
        Verdict::Undecidable { observed, certified }
    };
    report(verdict, "sphere-grid", evaluations)
}

/// The abnormal extremal `λ(t) = (exp(t u*), (0, ξ*))` with `ν = 0`, and the
/// straight unit-speed path along `u*` of duration 1.
pub fn abnormal_from_witness(
    space: &HorizontalSpace,
    u: &[f64],
    xi: &[f64],
) -> Result<(ExtremalState, AbnormalExtremal, HorizontalPath), NonsingularError> {
    if !space.is_polarized() {
        return Err(NonsingularError::NotPolarized);
    }
    let alg = space.algebra();
    let (n, p) = (alg.n(), alg.p());
    if u.len() != p || xi.len() != n - p {
        return Err(NonsingularError::BadWitness(format!(
            "expected u in R^{p} and ξ in R^{}, got {} and {}",
            n - p,
            u.len(),
            xi.len()
        )));
    }
    let (nu, nx) = (norm2(u), norm2(xi));
    if nu == 0.0 || nx == 0.0 {
        return Err(NonsingularError::WitnessNotSingular(f64::INFINITY));
    }
    let un: Vec<f64> = u.iter().map(|v| v / nu).collect();
    let xn: Vec<f64> = xi.iter().map(|v| v / nx).collect();
    let res = witness_residual(alg, &un, &xn);
    if res > WITNESS_TOL {
        return Err(NonsingularError::WitnessNotSingular(res));
    }
    let scale = space.cone_norm().value(&un);
    let u_star: Vec<f64> = un.iter().map(|v| v / scale).collect();
    let ext = AbnormalExtremal {
        u: u_star.clone(),
        xi_center: xn,
    };
    let state = ext.state_at(alg, 0.0);
    let mut path = HorizontalPath::new();
    path.push(space.norm(), u_star, 1.0).expect("unit direction");
    Ok((state, ext, path))
}

/// `M(u)` written through `Ω`: `ξᵀ M(u) = uᵀ Ω(ξ)`.
pub fn pairing_via_omega(alg: &NilpotentAlgebra, u: &[f64], xi: &[f64]) -> Vec<f64> {
    let om = alg.omega(xi);
    (0..alg.p()).map(|a| (0..alg.p()).map(|i| u[i] * om[i][a]).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::presets;
    use crate::norm::Norm;
    use crate::pmp::is_abnormal;
    use std::sync::Arc;

    fn opts() -> ClassifyOptions {
        ClassifyOptions {
            samples: 20_000,
            restarts: 16,
            seed: 1,
        }
    }

    #[test]
    fn matrix_examples() {
        let h3 = presets::heisenberg();
        assert_eq!(h3.singularity_matrix(&[2.0, 5.0]).unwrap(), vec![vec![-5.0, 2.0]]);
        let rh = presets::r_times_heisenberg();
        assert_eq!(rh.singularity_matrix(&[0.0, 0.0, 1.0]).unwrap(), vec![vec![0.0; 3]]);
        let hh = presets::heisenberg_squared();
        let m = hh.singularity_matrix(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(m, vec![vec![0.0, 1.0, 0.0, 0.0], vec![0.0; 4]]);
        assert_eq!(linalg::rank(&m, 1e-12), 1);
    }

    #[test]
    fn pairing_matches_omega() {
        let alg = presets::quaternionic();
        let u = [0.3, -1.0, 0.2, 0.7];
        let xi = [0.5, -0.1, 0.9];
        let m = alg.singularity_matrix(&u).unwrap();
        let direct: Vec<f64> = (0..4).map(|a| (0..3).map(|k| xi[k] * m[k][a]).sum()).collect();
        let via = pairing_via_omega(&alg, &u, &xi);
        assert!(direct.iter().zip(&via).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn heisenberg_nonsingular_with_unit_epsilon() {
        let r = classify(&presets::heisenberg(), &opts());
        assert_eq!(r.verdict, Verdict::NonSingular { epsilon: 1.0 });
    }

    #[test]
    fn r_times_heisenberg_witness() {
        let r = classify(&presets::r_times_heisenberg(), &opts());
        assert_eq!(
            r.verdict,
            Verdict::Singular {
                witness: vec![0.0, 0.0, 1.0],
                covector: vec![1.0]
            }
        );
    }

    #[test]
    fn heisenberg_squared_witness() {
        let r = classify(&presets::heisenberg_squared(), &opts());
        assert_eq!(
            r.verdict,
            Verdict::Singular {
                witness: vec![1.0, 0.0, 0.0, 0.0],
                covector: vec![0.0, 1.0]
            }
        );
    }

    #[test]
    fn quaternionic_is_nonsingular_and_free_is_singular() {
        let q = classify(&presets::quaternionic(), &opts());
        assert!(q.is_nonsingular(), "{q:?}");
        assert_eq!(q.method, "exact-pfaffian");
        let f = classify(&presets::free_rank3(), &opts());
        assert!(f.is_singular());
        let h5 = classify(&presets::heisenberg5(), &opts());
        assert!(h5.is_nonsingular(), "{h5:?}");
    }

    #[test]
    fn witness_extremals_are_abnormal() {
        for alg in [presets::r_times_heisenberg(), presets::heisenberg_squared()] {
            let alg = Arc::new(alg);
            let r = classify(&alg, &opts());
            let Verdict::Singular { witness, covector } = r.verdict else {
                panic!("expected singular")
            };
            let space = HorizontalSpace::polarized(alg.clone(), Norm::L2(alg.p())).unwrap();
            let (state, ext, path) = abnormal_from_witness(&space, &witness, &covector).unwrap();
            assert_eq!(state.nu, 0.0);
            assert!(path.endpoint(&space).max_abs_diff(&crate::algebra::GroupElement::new(ext.state_at(&alg, 1.0).x)) < 1e-15);
            let tr = ext.trajectory(&alg, 1.0, 100);
            let chk = is_abnormal(&tr);
            assert!(chk.abnormal && chk.residual <= 1e-12);
            let res = ext.residuals(&alg, space.norm(), 1.0, 100);
            assert!(res.ode <= 1e-10 && res.max_hamiltonian <= 1e-10 && res.maximality <= 1e-10);
        }
    }

    #[test]
    fn heisenberg_rejects_every_witness() {
        let alg = Arc::new(presets::heisenberg());
        let space = HorizontalSpace::polarized(alg, Norm::L2(2)).unwrap();
        for (u, xi) in [([1.0, 0.0], [1.0]), ([0.6, 0.8], [-1.0])] {
            assert!(matches!(
                abnormal_from_witness(&space, &u, &xi),
                Err(NonsingularError::WitnessNotSingular(_))
            ));
        }
    }

    #[test]
    fn verdict_invariant_under_rescaling_and_basis_change() {
        let g = vec![
            vec![1.0, 0.5, 0.0, 0.2],
            vec![0.0, 1.0, -0.3, 0.0],
            vec![0.1, 0.0, 2.0, 0.0],
            vec![0.0, 0.4, 0.0, 1.0],
        ];
        for alg in [presets::heisenberg_squared(), presets::quaternionic()] {
            let base = classify(&alg, &opts()).is_singular();
            assert_eq!(classify(&alg.scaled(3.5).unwrap(), &opts()).is_singular(), base);
            assert_eq!(classify(&alg.change_horizontal_basis(&g).unwrap(), &opts()).is_singular(), base);
        }
    }

    #[test]
    fn grid_covers_sphere() {
        let (pts, r) = cube_sphere_grid(3, 5000);
        assert!(pts.len() >= 2000);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            normalize(&mut v);
            let d = pts
                .iter()
                .map(|q| norm2(&[v[0] - q[0], v[1] - q[1], v[2] - q[2]]))
                .fold(f64::INFINITY, f64::min);
            assert!(d <= r + 1e-12);
        }
    }
}
