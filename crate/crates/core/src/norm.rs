//! Norms on the horizontal space, with dual-support oracles.
//!
//! Polyhedral norms (`l1`, `l∞`, symmetric polytopes) are evaluated exactly
//! through their facet normals: `‖x‖ = max_f ⟨a_f, x⟩`. The maximiser of a
//! linear functional over the unit ball is then always a vertex, which keeps
//! bang-bang controls finite.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, dot};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("dimension mismatch: norm on R^{expected}, vector in R^{got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dual support of the zero covector is undefined")]
    ZeroCovector,
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
    #[error("invalid quadratic form: {0}")]
    InvalidQuadratic(String),
    #[error("norm spec: {0}")]
    Spec(String),
}

const TIE_TOL: f64 = 1e-12;

/// Origin-symmetric convex polytope used as a unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Vec<f64>>,
}

/// Positive definite quadratic form, `‖v‖ = sqrt(vᵀ Q v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    dim: usize,
    gram: Vec<Vec<f64>>,
    inverse: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Norm {
    L1(usize),
    L2(usize),
    Linf(usize),
    Polytope(Polytope),
    /// Euclidean norm in a non-orthonormal basis; arises when projecting `l2`
    /// from a tilted horizontal space.
    Quadratic(QuadraticForm),
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Calls `f` on every `k`-subset of `0..m` in lexicographic order.
pub(crate) fn for_each_combination(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        match (0..k).rev().find(|&i| idx[i] < m - k + i) {
            None => return,
            Some(i) => {
                idx[i] += 1;
                for j in (i + 1)..k {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        }
    }
}

impl Polytope {
    /// Builds the polytope from a symmetric vertex list. Points that are not
    /// extreme are dropped; facets are found by enumerating `dim`-subsets.
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self, NormError> {
        let dim = vertices
            .first()
            .map(Vec::len)
            .ok_or_else(|| NormError::InvalidPolytope("no vertices".into()))?;
        if dim == 0 || vertices.iter().any(|v| v.len() != dim) {
            return Err(NormError::InvalidPolytope("inconsistent vertex dimensions".into()));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(NormError::InvalidPolytope("non-finite coordinate".into()));
        }
        let scale = vertices.iter().flatten().fold(0.0f64, |a, &b| a.max(b.abs()));
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12 * scale.max(1.0));
        for v in &vertices {
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            if !vertices.iter().any(|w| close(w, &neg)) {
                return Err(NormError::InvalidPolytope(format!("{v:?} has no antipode")));
            }
        }
        let mut uniq: Vec<Vec<f64>> = Vec::new();
        for v in vertices {
            if v.iter().all(|x| *x == 0.0) {
                continue;
            }
            if !uniq.iter().any(|w| close(w, &v)) {
                uniq.push(v);
            }
        }
        if linalg::rank(&uniq, 1e-12) < dim {
            return Err(NormError::InvalidPolytope("vertices do not span".into()));
        }
        let facets = facets_of(&uniq, dim);
        if facets.is_empty() {
            return Err(NormError::InvalidPolytope("no facets found".into()));
        }
        let extreme: Vec<Vec<f64>> = uniq
            .into_iter()
            .filter(|v| {
                let active: Vec<Vec<f64>> = facets
                    .iter()
                    .filter(|a| (dot(a, v) - 1.0).abs() <= 1e-9)
                    .cloned()
                    .collect();
                linalg::rank(&active, 1e-9) == dim
            })
            .collect();
        Ok(Self {
            dim,
            vertices: extreme,
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Facet normals `a` with `‖x‖ = max ⟨a, x⟩`.
    pub fn facets(&self) -> &[Vec<f64>] {
        &self.facets
    }
}

fn facets_of(points: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for_each_combination(points.len(), dim, |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| points[i].clone()).collect();
        let Some(normal) = linalg::solve(&a, &vec![1.0; dim]) else {
            return;
        };
        if points.iter().any(|v| dot(&normal, v) > 1.0 + 1e-9) {
            return;
        }
        let scale = normal.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        if !out
            .iter()
            .any(|w| w.iter().zip(&normal).all(|(x, y)| (x - y).abs() <= 1e-9 * scale))
        {
            out.push(normal);
        }
    });
    out.sort_by(|a, b| lex_cmp(a, b));
    out
}

impl QuadraticForm {
    pub fn new(gram: Vec<Vec<f64>>) -> Result<Self, NormError> {
        let dim = gram.len();
        if dim == 0 || gram.iter().any(|r| r.len() != dim) {
            return Err(NormError::InvalidQuadratic("gram matrix must be square".into()));
        }
        let m = linalg::to_matrix(&gram);
        if (&m - m.transpose()).amax() > 1e-10 * m.amax().max(1.0) {
            return Err(NormError::InvalidQuadratic("gram matrix must be symmetric".into()));
        }
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| NormError::InvalidQuadratic("not positive definite".into()))?;
        let inv = chol.inverse();
        let inverse = (0..dim).map(|i| (0..dim).map(|j| inv[(i, j)]).collect()).collect();
        Ok(Self { dim, gram, inverse })
    }

    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    fn apply(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
        m.iter().map(|r| dot(r, v)).collect()
    }
}

impl Norm {
    pub fn dim(&self) -> usize {
        match self {
            Norm::L1(d) | Norm::L2(d) | Norm::Linf(d) => *d,
            Norm::Polytope(p) => p.dim,
            Norm::Quadratic(q) => q.dim,
        }
    }

    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Self, NormError> {
        Ok(Norm::Polytope(Polytope::new(vertices)?))
    }

    pub fn quadratic(gram: Vec<Vec<f64>>) -> Result<Self, NormError> {
        Ok(Norm::Quadratic(QuadraticForm::new(gram)?))
    }

    fn check(&self, v: &[f64]) -> Result<(), NormError> {
        if v.len() != self.dim() {
            return Err(NormError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, v: &[f64]) -> Result<f64, NormError> {
        self.check(v)?;
        Ok(self.value(v))
    }

    /// Unchecked evaluation; `v` must have the right length.
    pub fn value(&self, v: &[f64]) -> f64 {
        match self {
            Norm::L1(_) => v.iter().map(|x| x.abs()).sum(),
            Norm::L2(_) => linalg::norm2(v),
            Norm::Linf(_) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Norm::Polytope(p) => p
                .facets
                .iter()
                .map(|a| dot(a, v))
                .fold(0.0, f64::max),
            Norm::Quadratic(q) => dot(v, &QuadraticForm::apply(&q.gram, v)).max(0.0).sqrt(),
        }
    }

    /// Dual norm `max_{‖u‖ ≤ 1} ⟨ξ, u⟩`.
    pub fn dual_value(&self, xi: &[f64]) -> f64 {
        match self {
            Norm::L1(_) => xi.iter().fold(0.0, |m, x| m.max(x.abs())),
            Norm::L2(_) => linalg::norm2(xi),
            Norm::Linf(_) => xi.iter().map(|x| x.abs()).sum(),
            Norm::Polytope(p) => p
                .vertices
                .iter()
                .map(|v| dot(v, xi))
                .fold(f64::NEG_INFINITY, f64::max),
            Norm::Quadratic(q) => dot(xi, &QuadraticForm::apply(&q.inverse, xi)).max(0.0).sqrt(),
        }
    }

    /// Unit vector maximising `⟨ξ, u⟩`; ties go to the lexicographically
    /// smallest optimal vertex.
    pub fn dual_support(&self, xi: &[f64]) -> Result<Vec<f64>, NormError> {
        self.check(xi)?;
        if xi.iter().all(|x| *x == 0.0) {
            return Err(NormError::ZeroCovector);
        }
        Ok(match self {
            Norm::L2(_) => {
                let r = linalg::norm2(xi);
                xi.iter().map(|x| x / r).collect()
            }
            Norm::Quadratic(q) => {
                let w = QuadraticForm::apply(&q.inverse, xi);
                let r = dot(xi, &w).sqrt();
                w.iter().map(|x| x / r).collect()
            }
            Norm::Linf(_) => {
                let scale = xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                xi.iter()
                    .map(|&x| if x > TIE_TOL * scale { 1.0 } else { -1.0 })
                    .collect()
            }
            _ => {
                let verts = self.vertex_list().expect("polyhedral");
                best_vertex(&verts, xi)
            }
        })
    }

    /// Vertices of the unit ball for polyhedral norms.
    pub fn vertex_list(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            Norm::L1(d) => {
                let mut out = Vec::with_capacity(2 * d);
                for i in 0..*d {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; *d];
                        v[i] = s;
                        out.push(v);
                    }
                }
                Some(out)
            }
            Norm::Linf(d) => Some(
                (0..(1usize << d))
                    .map(|mask| (0..*d).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect())
                    .collect(),
            ),
            Norm::Polytope(p) => Some(p.vertices.clone()),
            _ => None,
        }
    }

    /// Facet normals for polyhedral norms.
    pub fn facet_list(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            Norm::L1(d) => Norm::Linf(*d).vertex_list(),
            Norm::Linf(d) => Norm::L1(*d).vertex_list(),
            Norm::Polytope(p) => Some(p.facets.clone()),
            _ => None,
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        matches!(self, Norm::L1(_) | Norm::Linf(_) | Norm::Polytope(_))
    }

    /// A subgradient of the norm at `v` (zero at the origin).
    pub fn subgradient(&self, v: &[f64]) -> Vec<f64> {
        if v.iter().all(|x| *x == 0.0) {
            return vec![0.0; v.len()];
        }
        match self {
            Norm::L2(_) => {
                let r = linalg::norm2(v);
                v.iter().map(|x| x / r).collect()
            }
            Norm::Quadratic(q) => {
                let w = QuadraticForm::apply(&q.gram, v);
                let r = dot(v, &w).sqrt();
                w.iter().map(|x| x / r).collect()
            }
            Norm::L1(_) => v.iter().map(|x| if *x > 0.0 { 1.0 } else if *x < 0.0 { -1.0 } else { 0.0 }).collect(),
            _ => {
                let facets = self.facet_list().expect("polyhedral");
                best_vertex(&facets, v)
            }
        }
    }

    /// The norm `y ↦ ‖M y‖` for an invertible square `M`.
    pub fn pullback(&self, m: &[Vec<f64>]) -> Result<Norm, NormError> {
        let d = self.dim();
        if m.len() != d || m.iter().any(|r| r.len() != d) {
            return Err(NormError::DimensionMismatch { expected: d, got: m.len() });
        }
        match self {
            Norm::L2(_) | Norm::Quadratic(_) => {
                let q = match self {
                    Norm::Quadratic(q) => q.gram.clone(),
                    _ => identity(d),
                };
                let mm = linalg::to_matrix(m);
                let qm = linalg::to_matrix(&q);
                let g = mm.transpose() * qm * &mm;
                Norm::quadratic((0..d).map(|i| (0..d).map(|j| 0.5 * (g[(i, j)] + g[(j, i)])).collect()).collect())
            }
            _ => {
                let inv = linalg::to_matrix(m)
                    .try_inverse()
                    .ok_or_else(|| NormError::InvalidPolytope("singular pullback".into()))?;
                let verts = self
                    .vertex_list()
                    .expect("polyhedral")
                    .into_iter()
                    .map(|v| (0..d).map(|i| (0..d).map(|j| inv[(i, j)] * v[j]).sum()).collect())
                    .collect();
                Norm::polytope(verts)
            }
        }
    }
}

pub(crate) fn identity(d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn best_vertex(verts: &[Vec<f64>], xi: &[f64]) -> Vec<f64> {
    let vals: Vec<f64> = verts.iter().map(|v| dot(v, xi)).collect();
    let best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * best.abs().max(1.0);
    verts
        .iter()
        .zip(&vals)
        .filter(|(_, &val)| val >= best - tol)
        .map(|(v, _)| v)
        .min_by(|a, b| lex_cmp(a, b))
        .expect("non-empty vertex list")
        .clone()
}

/// Norm description as stored on disk. The dimension comes from the
/// algebra the norm is attached to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
}

impl NormSpec {
    pub fn from_json(text: &str) -> Result<Self, NormError> {
        serde_json::from_str(text).map_err(|e| NormError::Spec(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, NormError> {
        let text = fs::read_to_string(path).map_err(|e| NormError::Spec(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn build(&self, dim: usize) -> Result<Norm, NormError> {
        let norm = match self.variant.to_ascii_lowercase().as_str() {
            "l1" => Norm::L1(dim),
            "l2" => Norm::L2(dim),
            "linf" => Norm::Linf(dim),
            "polytope" => {
                let verts = self
                    .vertices
                    .clone()
                    .ok_or_else(|| NormError::Spec("polytope needs vertices".into()))?;
                Norm::polytope(verts)?
            }
            other => return Err(NormError::Spec(format!("unknown variant {other:?}"))),
        };
        if norm.dim() != dim {
            return Err(NormError::DimensionMismatch {
                expected: dim,
                got: norm.dim(),
            });
        }
        Ok(norm)
    }

    pub fn of(norm: &Norm) -> Self {
        let (variant, vertices) = match norm {
            Norm::L1(_) => ("l1", None),
            Norm::L2(_) => ("l2", None),
            Norm::Linf(_) => ("linf", None),
            Norm::Polytope(p) => ("polytope", Some(p.vertices.clone())),
            Norm::Quadratic(_) => ("quadratic", None),
        };
        NormSpec {
            variant: variant.into(),
            vertices,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diamond() -> Norm {
        Norm::polytope(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap()
    }

    #[test]
    fn norm_eval_examples() {
        assert_eq!(Norm::L1(2).eval(&[3.0, -4.0]).unwrap(), 7.0);
        assert_eq!(Norm::L2(2).eval(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(Norm::Linf(2).eval(&[3.0, -4.0]).unwrap(), 4.0);
        assert!((diamond().eval(&[3.0, -4.0]).unwrap() - 7.0).abs() < 1e-12);
        assert!(matches!(
            Norm::L1(2).eval(&[1.0]),
            Err(NormError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dual_support_examples() {
        let u = Norm::L2(2).dual_support(&[3.0, 4.0]).unwrap();
        assert!((u[0] - 0.6).abs() < 1e-15 && (u[1] - 0.8).abs() < 1e-15);
        assert_eq!(Norm::L1(2).dual_support(&[3.0, 4.0]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(Norm::L1(2).dual_support(&[1.0, 1.0]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(diamond().dual_support(&[1.0, 1.0]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(Norm::L1(2).dual_support(&[0.0, 0.0]), Err(NormError::ZeroCovector));
    }

    #[test]
    fn polytope_validation() {
        assert!(matches!(
            Norm::polytope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            Err(NormError::InvalidPolytope(_))
        ));
        assert!(matches!(
            Norm::polytope(vec![vec![1.0, 1.0], vec![-1.0, -1.0]]),
            Err(NormError::InvalidPolytope(_))
        ));
        // interior points are discarded
        let p = Norm::polytope(vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
            vec![0.25, 0.25],
            vec![-0.25, -0.25],
        ])
        .unwrap();
        assert_eq!(p.vertex_list().unwrap().len(), 4);
    }

    #[test]
    fn polytope_in_three_dimensions() {
        let cube = Norm::polytope(Norm::Linf(3).vertex_list().unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            assert!((cube.value(&v) - Norm::Linf(3).value(&v)).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_support_attains_dual_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let norms = [Norm::L1(3), Norm::L2(3), Norm::Linf(3), Norm::quadratic(vec![
            vec![2.0, 0.5, 0.0],
            vec![0.5, 1.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ])
        .unwrap()];
        for norm in &norms {
            for _ in 0..50 {
                let xi: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let u = norm.dual_support(&xi).unwrap();
                assert!((norm.value(&u) - 1.0).abs() < 1e-12);
                assert!((dot(&u, &xi) - norm.dual_value(&xi)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pullback_rotates_ball() {
        let m = vec![vec![1.0, 1.0], vec![-1.0, 1.0]];
        let n = Norm::L1(2).pullback(&m).unwrap();
        assert!((n.value(&[1.0, 0.0]) - 2.0).abs() < 1e-12);
        let q = Norm::L2(2).pullback(&m).unwrap();
        assert!((q.value(&[1.0, 0.0]) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spec_builds_norms() {
        let spec = NormSpec::from_json(r#"{"variant":"polytope","vertices":[[1,0],[-1,0],[0,1],[0,-1]]}"#).unwrap();
        assert!((spec.build(2).unwrap().value(&[3.0, -4.0]) - 7.0).abs() < 1e-12);
        assert!(NormSpec::from_json(r#"{"variant":"l2"}"#).unwrap().build(3).is_ok());
        assert!(NormSpec::from_json(r#"{"variant":"l7"}"#).unwrap().build(3).is_err());
    }

    #[test]
    fn combinations_enumerated() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
        let mut count = 0;
        for_each_combination(3, 3, |_| count += 1);
        assert_eq!(count, 1);
    }
}
