//! Simply connected 2-step nilpotent Lie groups in exponential coordinates.
//!
//! The basis `X_1..X_n` is split as `X_1..X_p` (the horizontal layer `V∞`)
//! and `X_{p+1}..X_n` (the derived algebra). Brackets of horizontal vectors
//! land in the centre, everything else brackets to zero, so the BCH product
//! truncates to `log(gh) = log g + log h + ½[log g, log h]`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Exact, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("antisymmetry violated at c_{{{i}{j}}}^{k}: c_ij^k must equal -c_ji^k")]
    AntisymmetryViolation { i: usize, j: usize, k: usize },
    #[error("entry ({i},{j},{k}) is not 2-step: need i,j <= p < k")]
    NotTwoStep { i: usize, j: usize, k: usize },
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dilation factor must be positive")]
    NonPositiveDilation,
    #[error("algebra spec: {0}")]
    Spec(String),
}

/// One structure constant `c_ij^k`, 1-based as in the algebra spec file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

/// On-disk algebra description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub n: usize,
    pub p: usize,
    pub brackets: Vec<Bracket>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl AlgebraSpec {
    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        serde_json::from_str(text).map_err(|e| AlgebraError::Spec(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, AlgebraError> {
        let text = fs::read_to_string(path)
            .map_err(|e| AlgebraError::Spec(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<NilpotentAlgebra, AlgebraError> {
        let mut alg = validate_structure(&self.brackets, self.n, self.p)?;
        if let Some(names) = &self.names {
            if names.len() != self.n {
                return Err(AlgebraError::BadDimensions(format!(
                    "{} names for dimension {}",
                    names.len(),
                    self.n
                )));
            }
            alg.names = Some(names.clone());
        }
        Ok(alg)
    }
}

/// Internal 0-based constant with its exact twin.
#[derive(Debug, Clone)]
struct Entry {
    i: usize,
    j: usize,
    k: usize,
    c: f64,
    exact: Exact,
}

/// Validated 2-step nilpotent Lie algebra. Immutable after construction.
#[derive(Debug, Clone)]
pub struct NilpotentAlgebra {
    n: usize,
    p: usize,
    /// Antisymmetric closure, 0-based, zero entries dropped.
    entries: Vec<Entry>,
    /// Dense `c[i][j][k - p]` for hot loops.
    dense: Vec<f64>,
    names: Option<Vec<String>>,
}

/// Checks a raw structure-constant list and completes its antisymmetric
/// closure. Indices are 1-based.
pub fn validate_structure(
    raw: &[Bracket],
    n: usize,
    p: usize,
) -> Result<NilpotentAlgebra, AlgebraError> {
    if p < 1 || p > n {
        return Err(AlgebraError::BadDimensions(format!(
            "need 1 <= p <= n, got n={n}, p={p}"
        )));
    }
    let mut given: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
    for b in raw {
        let Bracket { i, j, k, c } = *b;
        if !c.is_finite() {
            return Err(AlgebraError::BadDimensions(format!(
                "non-finite constant at ({i},{j},{k})"
            )));
        }
        for idx in [i, j, k] {
            if idx < 1 || idx > n {
                return Err(AlgebraError::BadDimensions(format!(
                    "index {idx} outside 1..={n}"
                )));
            }
        }
        if i > p || j > p || k <= p {
            return Err(AlgebraError::NotTwoStep { i, j, k });
        }
        if i == j && c != 0.0 {
            return Err(AlgebraError::AntisymmetryViolation { i, j, k });
        }
        if let Some(prev) = given.insert((i, j, k), c) {
            if prev != c {
                return Err(AlgebraError::AntisymmetryViolation { i, j, k });
            }
        }
    }
    let mut closure: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
    for (&(i, j, k), &c) in &given {
        if let Some(&other) = given.get(&(j, i, k)) {
            if other != -c {
                return Err(AlgebraError::AntisymmetryViolation { i, j, k });
            }
        }
        if c != 0.0 {
            closure.insert((i - 1, j - 1, k - 1), c);
            closure.insert((j - 1, i - 1, k - 1), -c);
        }
    }
    let m = n - p;
    let mut dense = vec![0.0; p * p * m];
    let entries = closure
        .into_iter()
        .map(|((i, j, k), c)| {
            dense[(i * p + j) * m + (k - p)] = c;
            Entry {
                i,
                j,
                k,
                c,
                exact: <Exact as Scalar>::from_f64(c),
            }
        })
        .collect();
    Ok(NilpotentAlgebra {
        n,
        p,
        entries,
        dense,
        names: None,
    })
}

/// Point of the group in exponential coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement<S = f64> {
    pub coords: Vec<S>,
}

/// Element of `V∞`, the span of `X_1..X_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalVector<S = f64> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> GroupElement<S> {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }
}

impl GroupElement<f64> {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn to_exact(&self) -> GroupElement<Exact> {
        GroupElement {
            coords: self.coords.iter().map(|&c| Exact::from_f64(c)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl GroupElement<Exact> {
    pub fn to_f64(&self) -> GroupElement<f64> {
        GroupElement {
            coords: self.coords.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl NilpotentAlgebra {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Dimension of the derived algebra, `n - p`.
    pub fn center_dim(&self) -> usize {
        self.n - self.p
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// `c_ij^k` with 0-based indices; zero outside the stored closure.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        if i >= self.p || j >= self.p || k < self.p || k >= self.n {
            return 0.0;
        }
        self.dense[(i * self.p + j) * (self.n - self.p) + (k - self.p)]
    }

    /// The closure as 1-based brackets with `i < j`.
    pub fn brackets(&self) -> Vec<Bracket> {
        self.entries
            .iter()
            .filter(|e| e.i < e.j)
            .map(|e| Bracket {
                i: e.i + 1,
                j: e.j + 1,
                k: e.k + 1,
                c: e.c,
            })
            .collect()
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        AlgebraSpec {
            n: self.n,
            p: self.p,
            brackets: self.brackets(),
            names: self.names.clone(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rescales every structure constant by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, AlgebraError> {
        let raw: Vec<Bracket> = self
            .brackets()
            .into_iter()
            .map(|b| Bracket {
                c: b.c * factor,
                ..b
            })
            .collect();
        validate_structure(&raw, self.n, self.p)
    }

    fn check_len(&self, len: usize) -> Result<(), AlgebraError> {
        if len != self.n {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.n,
                got: len,
            });
        }
        Ok(())
    }

    pub fn element(&self, coords: Vec<f64>) -> Result<GroupElement, AlgebraError> {
        self.check_len(coords.len())?;
        Ok(GroupElement { coords })
    }

    pub fn identity<S: Scalar>(&self) -> GroupElement<S> {
        GroupElement {
            coords: vec![S::zero(); self.n],
        }
    }

    /// `[A, B]_k = Σ_{i,j<=p} A_i B_j c_ij^k` for `k > p`.
    pub fn bracket<S: Scalar>(&self, a: &[S], b: &[S]) -> Result<Vec<S>, AlgebraError> {
        self.check_len(a.len())?;
        self.check_len(b.len())?;
        let mut out = vec![S::zero(); self.n];
        for e in &self.entries {
            if a[e.i].is_zero() || b[e.j].is_zero() {
                continue;
            }
            let c = S::from_exact(&e.exact);
            out[e.k] = out[e.k].clone() + c * a[e.i].clone() * b[e.j].clone();
        }
        Ok(out)
    }

    /// BCH product in exponential coordinates.
    pub fn multiply<S: Scalar>(
        &self,
        g: &GroupElement<S>,
        h: &GroupElement<S>,
    ) -> Result<GroupElement<S>, AlgebraError> {
        let br = self.bracket(&g.coords, &h.coords)?;
        let coords = g
            .coords
            .iter()
            .zip(&h.coords)
            .zip(br)
            .map(|((a, b), c)| a.clone() + b.clone() + c.half())
            .collect();
        Ok(GroupElement { coords })
    }

    /// `g^{-1} = -log g`.
    pub fn inverse<S: Scalar>(&self, g: &GroupElement<S>) -> GroupElement<S> {
        GroupElement {
            coords: g.coords.iter().map(|c| -c.clone()).collect(),
        }
    }

    /// `g^{-1} h^{-1} g h`, which equals `exp([log g, log h])`.
    pub fn commutator<S: Scalar>(
        &self,
        g: &GroupElement<S>,
        h: &GroupElement<S>,
    ) -> Result<GroupElement<S>, AlgebraError> {
        let gi = self.inverse(g);
        let hi = self.inverse(h);
        let left = self.multiply(&gi, &hi)?;
        let right = self.multiply(g, h)?;
        self.multiply(&left, &right)
    }

    /// `δ_t`: horizontal coordinates times `t`, central ones times `t²`.
    pub fn dilate<S: Scalar>(&self, t: S, g: &GroupElement<S>) -> Result<GroupElement<S>, AlgebraError> {
        if t <= S::zero() {
            return Err(AlgebraError::NonPositiveDilation);
        }
        self.check_len(g.coords.len())?;
        let t2 = t.clone() * t.clone();
        let coords = g
            .coords
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                if idx < self.p {
                    c.clone() * t.clone()
                } else {
                    c.clone() * t2.clone()
                }
            })
            .collect();
        Ok(GroupElement { coords })
    }

    /// `π(g)`: the first `p` exponential coordinates.
    pub fn project<S: Scalar>(&self, g: &GroupElement<S>) -> HorizontalVector<S> {
        HorizontalVector {
            coeffs: g.coords[..self.p].to_vec(),
        }
    }

    /// Central coordinates `x_{p+1}..x_n`.
    pub fn central_part<'a, S: Scalar>(&self, g: &'a GroupElement<S>) -> &'a [S] {
        &g.coords[self.p..]
    }

    /// Embeds a horizontal vector as the element `exp(Σ v_i X_i)`.
    pub fn exp_horizontal(&self, v: &[f64]) -> GroupElement {
        let mut coords = vec![0.0; self.n];
        coords[..self.p].copy_from_slice(&v[..self.p]);
        GroupElement { coords }
    }

    // ---- f64 fast paths on raw slices -------------------------------

    /// The antisymmetric closure as 0-based `(i, j, k, c)` tuples.
    pub(crate) fn structure(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        self.entries.iter().map(|e| (e.i, e.j, e.k, e.c))
    }

    /// Exact value of `c_ij^k` (0-based), zero when absent.
    pub(crate) fn constant_exact(&self, i: usize, j: usize, k: usize) -> Exact {
        self.entries
            .iter()
            .find(|e| e.i == i && e.j == j && e.k == k)
            .map_or_else(<Exact as Scalar>::zero, |e| e.exact.clone())
    }

    /// In-place `x <- x · y` on full coordinate slices.
    pub(crate) fn mul_assign(&self, x: &mut [f64], y: &[f64]) {
        let mut add = vec![0.0; self.n];
        for e in &self.entries {
            add[e.k] += 0.5 * e.c * x[e.i] * y[e.j];
        }
        for k in 0..self.n {
            x[k] += y[k] + add[k];
        }
    }

    /// Skew matrix `Ω(ξ)_{ij} = Σ_k ξ_k c_ij^k` for a central covector `ξ`.
    pub fn omega(&self, xi: &[f64]) -> Vec<Vec<f64>> {
        let p = self.p;
        let mut out = vec![vec![0.0; p]; p];
        for e in &self.entries {
            out[e.i][e.j] += xi[e.k - p] * e.c;
        }
        out
    }

    /// `(n-p) x p` matrix with entries `Σ_i u_i c_{ia}^k`.
    pub fn singularity_matrix(&self, u: &[f64]) -> Result<Vec<Vec<f64>>, AlgebraError> {
        if u.len() != self.p {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.p,
                got: u.len(),
            });
        }
        let p = self.p;
        let mut out = vec![vec![0.0; p]; self.n - p];
        for e in &self.entries {
            out[e.k - p][e.j] += u[e.i] * e.c;
        }
        Ok(out)
    }

    /// Rewrites the algebra in the horizontal basis `X'_a = Σ_b g[b][a] X_b`.
    pub fn change_horizontal_basis(&self, g: &[Vec<f64>]) -> Result<Self, AlgebraError> {
        let p = self.p;
        if g.len() != p || g.iter().any(|r| r.len() != p) {
            return Err(AlgebraError::BadDimensions("basis change must be p x p".into()));
        }
        let mut raw = Vec::new();
        for a in 0..p {
            for b in (a + 1)..p {
                for k in p..self.n {
                    let mut c = 0.0;
                    for i in 0..p {
                        for j in 0..p {
                            c += g[i][a] * g[j][b] * self.constant(i, j, k);
                        }
                    }
                    if c != 0.0 {
                        raw.push(Bracket {
                            i: a + 1,
                            j: b + 1,
                            k: k + 1,
                            c,
                        });
                    }
                }
            }
        }
        validate_structure(&raw, self.n, self.p)
    }

    /// True when the horizontal layer generates the whole algebra, i.e. the
    /// brackets `[X_i, X_j]` span the centre.
    pub fn is_bracket_generating(&self) -> bool {
        let m = self.n - self.p;
        if m == 0 {
            return true;
        }
        let mut rows = Vec::new();
        for i in 0..self.p {
            for j in (i + 1)..self.p {
                rows.push((0..m).map(|k| self.dense[(i * self.p + j) * m + k]).collect::<Vec<_>>());
            }
        }
        crate::linalg::rank(&rows, 1e-12) == m
    }
}

/// Algebras used throughout the examples and tests.
pub mod presets {
    use super::*;

    fn build(n: usize, p: usize, raw: &[(usize, usize, usize, f64)], names: &[&str]) -> NilpotentAlgebra {
        let raw: Vec<Bracket> = raw
            .iter()
            .map(|&(i, j, k, c)| Bracket { i, j, k, c })
            .collect();
        let mut alg = validate_structure(&raw, n, p).expect("preset is valid");
        alg.names = Some(names.iter().map(|s| s.to_string()).collect());
        alg
    }

    /// `h₃`: `[X, Y] = Z`.
    pub fn heisenberg() -> NilpotentAlgebra {
        build(3, 2, &[(1, 2, 3, 1.0)], &["X", "Y", "Z"])
    }

    /// `ℝ × h₃` with horizontal basis `X, Y, W` and `[X, Y] = Z`.
    pub fn r_times_heisenberg() -> NilpotentAlgebra {
        build(4, 3, &[(1, 2, 4, 1.0)], &["X", "Y", "W", "Z"])
    }

    /// `ℝ × h₃` with the abelian factor first: basis `T, X, Y, Z`.
    pub fn line_times_heisenberg() -> NilpotentAlgebra {
        build(4, 3, &[(2, 3, 4, 1.0)], &["T", "X", "Y", "Z"])
    }

    /// `h₃ × h₃`: `[X₁, X₂] = Z₁`, `[X₃, X₄] = Z₂`.
    pub fn heisenberg_squared() -> NilpotentAlgebra {
        build(
            6,
            4,
            &[(1, 2, 5, 1.0), (3, 4, 6, 1.0)],
            &["X1", "X2", "X3", "X4", "Z1", "Z2"],
        )
    }

    /// Five-dimensional Heisenberg algebra `[X₁, X₂] = [X₃, X₄] = Z`.
    pub fn heisenberg5() -> NilpotentAlgebra {
        build(
            5,
            4,
            &[(1, 2, 5, 1.0), (3, 4, 5, 1.0)],
            &["X1", "X2", "X3", "X4", "Z"],
        )
    }

    /// Quaternionic H-type algebra, `p = 4`, three-dimensional centre.
    pub fn quaternionic() -> NilpotentAlgebra {
        build(
            7,
            4,
            &[
                (1, 2, 5, 1.0),
                (3, 4, 5, 1.0),
                (1, 3, 6, 1.0),
                (4, 2, 6, 1.0),
                (1, 4, 7, 1.0),
                (2, 3, 7, 1.0),
            ],
            &["X1", "X2", "X3", "X4", "Z1", "Z2", "Z3"],
        )
    }

    /// Free 2-step algebra on three generators.
    pub fn free_rank3() -> NilpotentAlgebra {
        build(
            6,
            3,
            &[(1, 2, 4, 1.0), (1, 3, 5, 1.0), (2, 3, 6, 1.0)],
            &["X1", "X2", "X3", "Z12", "Z13", "Z23"],
        )
    }

    /// `ℝ^d` as a (trivially) 2-step algebra.
    pub fn abelian(d: usize) -> NilpotentAlgebra {
        validate_structure(&[], d, d).expect("abelian algebra is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b(i: usize, j: usize, k: usize, c: f64) -> Bracket {
        Bracket { i, j, k, c }
    }

    #[test]
    fn heisenberg_validates() {
        let alg = validate_structure(&[b(1, 2, 3, 1.0)], 3, 2).unwrap();
        assert_eq!(alg.constant(0, 1, 2), 1.0);
        assert_eq!(alg.constant(1, 0, 2), -1.0);
    }

    #[test]
    fn antisymmetry_violation_detected() {
        let err = validate_structure(&[b(1, 2, 3, 1.0), b(2, 1, 3, 1.0)], 3, 2).unwrap_err();
        assert!(matches!(err, AlgebraError::AntisymmetryViolation { .. }));
        // consistent redundant data is fine
        assert!(validate_structure(&[b(1, 2, 3, 1.0), b(2, 1, 3, -1.0)], 3, 2).is_ok());
    }

    #[test]
    fn non_two_step_rejected() {
        let err = validate_structure(&[b(1, 3, 2, 1.0)], 3, 2).unwrap_err();
        assert!(matches!(err, AlgebraError::NotTwoStep { .. }));
        let err = validate_structure(&[b(3, 1, 3, 1.0)], 3, 2).unwrap_err();
        assert!(matches!(err, AlgebraError::NotTwoStep { .. }));
    }

    #[test]
    fn bad_dimensions_rejected() {
        assert!(matches!(
            validate_structure(&[b(1, 2, 4, 1.0)], 3, 2),
            Err(AlgebraError::BadDimensions(_))
        ));
        assert!(matches!(
            validate_structure(&[], 3, 0),
            Err(AlgebraError::BadDimensions(_))
        ));
        assert!(matches!(
            validate_structure(&[], 3, 4),
            Err(AlgebraError::BadDimensions(_))
        ));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = AlgebraSpec::from_json(
            r#"{"n":3,"p":2,"brackets":[{"i":1,"j":2,"k":3,"c":1}],"names":["X","Y","Z"]}"#,
        )
        .unwrap();
        let alg = spec.validate().unwrap();
        assert_eq!(alg.names().unwrap()[2], "Z");
        assert_eq!(alg.to_spec().brackets, spec.brackets);
    }

    #[test]
    fn bracket_examples() {
        let h = presets::heisenberg();
        assert_eq!(h.bracket(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(h.bracket(&[1.0, 1.0, 0.0], &[1.0, -1.0, 5.0]).unwrap(), vec![0.0, 0.0, -2.0]);
        assert_eq!(h.bracket(&[3.0, -2.0, 7.0], &[3.0, -2.0, 7.0]).unwrap(), vec![0.0; 3]);
        assert!(matches!(
            h.bracket(&[1.0, 0.0], &[0.0, 1.0, 0.0]),
            Err(AlgebraError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bch_examples() {
        let h = presets::heisenberg();
        let x = h.element(vec![1.0, 0.0, 0.0]).unwrap();
        let y = h.element(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(h.multiply(&x, &y).unwrap().coords, vec![1.0, 1.0, 0.5]);
        assert_eq!(h.multiply(&y, &x).unwrap().coords, vec![1.0, 1.0, -0.5]);
        assert_eq!(h.multiply(&x, &h.identity()).unwrap(), x);
    }

    #[test]
    fn inverse_examples() {
        let h = presets::heisenberg();
        let g = h.element(vec![1.0, 1.0, 0.5]).unwrap();
        assert_eq!(h.inverse(&g).coords, vec![-1.0, -1.0, -0.5]);
        assert_eq!(h.inverse(&h.identity::<f64>()), h.identity());
        let g = h.element(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(h.multiply(&g, &h.inverse(&g)).unwrap().is_identity());
    }

    #[test]
    fn commutator_examples() {
        let h = presets::heisenberg();
        let x = h.element(vec![1.0, 0.0, 0.0]).unwrap();
        let y = h.element(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(h.commutator(&x, &y).unwrap().coords, vec![0.0, 0.0, 1.0]);
        assert!(h.commutator(&x, &x).unwrap().is_identity());
        let g = h.element(vec![2.0, 0.0, 7.0]).unwrap();
        let k = h.element(vec![0.0, 3.0, -1.0]).unwrap();
        assert_eq!(h.commutator(&g, &k).unwrap().coords, vec![0.0, 0.0, 6.0]);
    }

    #[test]
    fn dilation_examples() {
        let h = presets::heisenberg();
        let g = h.element(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(h.dilate(2.0, &g).unwrap().coords, vec![2.0, 2.0, 4.0]);
        assert_eq!(h.dilate(1.0, &g).unwrap(), g);
        assert_eq!(h.dilate(0.0, &g), Err(AlgebraError::NonPositiveDilation));
        assert_eq!(h.dilate(-1.0, &g), Err(AlgebraError::NonPositiveDilation));
    }

    #[test]
    fn dilation_is_automorphism_on_random_pairs() {
        let alg = presets::quaternionic();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let g = GroupElement::new((0..7).map(|_| rng.gen_range(-3.0..3.0)).collect());
            let k = GroupElement::new((0..7).map(|_| rng.gen_range(-3.0..3.0)).collect());
            let t = rng.gen_range(0.1..4.0);
            let lhs = alg.dilate(t, &alg.multiply(&g, &k).unwrap()).unwrap();
            let rhs = alg
                .multiply(&alg.dilate(t, &g).unwrap(), &alg.dilate(t, &k).unwrap())
                .unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }
    }

    #[test]
    fn projection_examples() {
        let h = presets::heisenberg();
        let g = h.element(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(h.project(&g).coeffs, vec![1.0, 2.0]);
        assert_eq!(h.project(&h.identity::<f64>()).coeffs, vec![0.0, 0.0]);
        let z = h.element(vec![0.0, 0.0, 9.0]).unwrap();
        assert_eq!(h.project(&z).coeffs, vec![0.0, 0.0]);
    }

    #[test]
    fn exact_backend_matches() {
        let h = presets::heisenberg();
        let x = GroupElement {
            coords: vec![ratio(1, 3), ratio(0, 1), ratio(0, 1)],
        };
        let y = GroupElement {
            coords: vec![ratio(0, 1), ratio(1, 5), ratio(1, 7)],
        };
        let xy = h.multiply(&x, &y).unwrap();
        assert_eq!(xy.coords[2], ratio(1, 7) + ratio(1, 30));
    }

    #[test]
    fn fast_mul_matches_generic() {
        let alg = presets::free_rank3();
        let g = GroupElement::new(vec![1.0, -2.0, 0.5, 3.0, 1.0, -1.0]);
        let k = GroupElement::new(vec![0.3, 0.7, -1.5, 2.0, 0.0, 4.0]);
        let mut x = g.coords.clone();
        alg.mul_assign(&mut x, &k.coords);
        assert!(GroupElement::new(x).max_abs_diff(&alg.multiply(&g, &k).unwrap()) < 1e-15);
    }

    #[test]
    fn bracket_generation() {
        assert!(presets::heisenberg().is_bracket_generating());
        assert!(presets::quaternionic().is_bracket_generating());
        let bad = validate_structure(&[b(1, 2, 3, 1.0)], 4, 2).unwrap();
        assert!(!bad.is_bracket_generating());
    }
}
