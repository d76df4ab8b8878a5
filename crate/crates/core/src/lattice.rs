//! Nilpotent lattices with integer coordinates and their generating sets.
//!
//! Every lattice here is `ℤ^p × ℤ^m` with the law
//! `(x, z)(x', z') = (x + x', z + z' + β(x, x'))` for an integer bilinear
//! map `β`. The embedding `(x, z) ↦ (x, z − ½β(x, x))` into exponential
//! coordinates is a homomorphism onto a lattice of the algebra with
//! `c_ij^k = β_ij^k − β_ji^k`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{validate_structure, AlgebraError, Bracket, GroupElement, NilpotentAlgebra};
use crate::norm::Norm;
use crate::scalar::{ratio, Exact};
use crate::space::{HorizontalSpace, SpaceError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("element has {got} coordinates, lattice rank is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cocycle entry ({i},{j},{k}) out of range")]
    BadCocycle { i: usize, j: usize, k: usize },
    #[error("unknown lattice preset {0:?}")]
    UnknownPreset(String),
    #[error("unknown generating set {0:?} for this lattice")]
    UnknownGenerators(String),
    #[error("generating set is empty")]
    EmptyGenerators,
    #[error("generators do not span the abelianization")]
    NotGenerating,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Integer coordinates of a lattice element.
pub type Elem = Vec<i64>;

/// One entry `β_ij^k`, 1-based with `i, j ≤ p < k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub b: i64,
}

/// On-disk description of a custom lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n: usize,
    pub p: usize,
    pub cocycle: Vec<CocycleEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeKind {
    Zd(usize),
    H3Z,
    ZxH3Z,
    Custom,
}

#[derive(Debug, Clone)]
pub struct Lattice {
    kind: LatticeKind,
    n: usize,
    p: usize,
    /// 0-based `(i, j, k, β)`.
    cocycle: Vec<(usize, usize, usize, i64)>,
    algebra: Arc<NilpotentAlgebra>,
}

impl Lattice {
    pub fn from_spec(spec: &LatticeSpec) -> Result<Self, LatticeError> {
        Self::build(LatticeKind::Custom, spec.n, spec.p, &spec.cocycle)
    }

    fn build(kind: LatticeKind, n: usize, p: usize, entries: &[CocycleEntry]) -> Result<Self, LatticeError> {
        let mut cocycle = Vec::new();
        let mut brackets: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
        for e in entries {
            if e.i < 1 || e.j < 1 || e.i > p || e.j > p || e.k <= p || e.k > n {
                return Err(LatticeError::BadCocycle { i: e.i, j: e.j, k: e.k });
            }
            if e.b == 0 {
                continue;
            }
            cocycle.push((e.i - 1, e.j - 1, e.k - 1, e.b));
            if e.i != e.j {
                let (lo, hi, sign) = if e.i < e.j { (e.i, e.j, 1.0) } else { (e.j, e.i, -1.0) };
                *brackets.entry((lo, hi, e.k)).or_insert(0.0) += sign * e.b as f64;
            }
        }
        let raw: Vec<Bracket> = brackets
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|((i, j, k), c)| Bracket { i, j, k, c })
            .collect();
        let algebra = validate_structure(&raw, n, p)?;
        Ok(Self {
            kind,
            n,
            p,
            cocycle,
            algebra: Arc::new(algebra),
        })
    }

    /// `ℤ^d` with the standard law.
    pub fn zd(d: usize) -> Self {
        Self::build(LatticeKind::Zd(d), d, d, &[]).expect("valid preset")
    }

    /// Integer Heisenberg group, `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`.
    pub fn h3z() -> Self {
        Self::build(LatticeKind::H3Z, 3, 2, &[CocycleEntry { i: 1, j: 2, k: 3, b: 1 }]).expect("valid preset")
    }

    /// `ℤ × H₃(ℤ)` with coordinates `(t, x, y, z)`.
    pub fn z_times_h3z() -> Self {
        Self::build(LatticeKind::ZxH3Z, 4, 3, &[CocycleEntry { i: 2, j: 3, k: 4, b: 1 }]).expect("valid preset")
    }

    /// `"h3z"`, `"zxh3z"` or `"z<d>"`.
    pub fn preset(name: &str) -> Result<Self, LatticeError> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "h3z" => Ok(Self::h3z()),
            "zxh3z" => Ok(Self::z_times_h3z()),
            _ => lower
                .strip_prefix('z')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|d| *d >= 1)
                .map(Self::zd)
                .ok_or(LatticeError::UnknownPreset(name.to_string())),
        }
    }

    pub fn kind(&self) -> &LatticeKind {
        &self.kind
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn algebra(&self) -> &NilpotentAlgebra {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> Arc<NilpotentAlgebra> {
        Arc::clone(&self.algebra)
    }

    pub fn identity(&self) -> Elem {
        vec![0; self.n]
    }

    fn check(&self, g: &[i64]) -> Result<(), LatticeError> {
        if g.len() != self.n {
            return Err(LatticeError::DimensionMismatch { expected: self.n, got: g.len() });
        }
        Ok(())
    }

    /// Product written into `out` (hot path, no checks).
    pub fn multiply_into(&self, g: &[i64], h: &[i64], out: &mut [i64]) {
        for a in 0..self.n {
            out[a] = g[a] + h[a];
        }
        for &(i, j, k, b) in &self.cocycle {
            out[k] += b * g[i] * h[j];
        }
    }

    pub fn multiply(&self, g: &[i64], h: &[i64]) -> Result<Elem, LatticeError> {
        self.check(g)?;
        self.check(h)?;
        let mut out = vec![0; self.n];
        self.multiply_into(g, h, &mut out);
        Ok(out)
    }

    pub fn inverse(&self, g: &[i64]) -> Result<Elem, LatticeError> {
        self.check(g)?;
        // (x, z)⁻¹ = (−x, −z + β(x, x))
        let mut out: Elem = g.iter().map(|v| -v).collect();
        for &(i, j, k, b) in &self.cocycle {
            out[k] += b * g[i] * g[j];
        }
        Ok(out)
    }

    /// `β(x, x)` per central coordinate.
    fn beta_diag(&self, g: &[i64]) -> Vec<i64> {
        let mut d = vec![0; self.n];
        for &(i, j, k, b) in &self.cocycle {
            d[k] += b * g[i] * g[j];
        }
        d
    }

    /// Exponential coordinates `(x, z − ½β(x, x))`.
    pub fn embed(&self, g: &[i64]) -> Result<GroupElement, LatticeError> {
        self.check(g)?;
        let d = self.beta_diag(g);
        Ok(GroupElement::new(
            (0..self.n).map(|a| g[a] as f64 - 0.5 * d[a] as f64).collect(),
        ))
    }

    pub fn embed_exact(&self, g: &[i64]) -> Result<GroupElement<Exact>, LatticeError> {
        self.check(g)?;
        let d = self.beta_diag(g);
        Ok(GroupElement {
            coords: (0..self.n).map(|a| ratio(2 * g[a] - d[a], 2)).collect(),
        })
    }
}

/// Symmetric generating set without the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingSet {
    elements: Vec<Elem>,
}

impl GeneratingSet {
    /// Symmetric closure of `gens`, deduplicated and sorted.
    pub fn new(lattice: &Lattice, gens: &[Elem]) -> Result<Self, LatticeError> {
        let mut all = Vec::new();
        for g in gens {
            all.push(lattice.multiply(g, &lattice.identity())?);
            all.push(lattice.inverse(g)?);
        }
        let id = lattice.identity();
        all.retain(|g| *g != id);
        all.sort();
        all.dedup();
        if all.is_empty() {
            return Err(LatticeError::EmptyGenerators);
        }
        let rows: Vec<Vec<f64>> = all.iter().map(|g| g[..lattice.p()].iter().map(|&x| x as f64).collect()).collect();
        if crate::linalg::rank(&rows, 1e-9) < lattice.p() {
            return Err(LatticeError::NotGenerating);
        }
        Ok(Self { elements: all })
    }

    /// Named sets: `standard` for every lattice; `product` and `skew` for
    /// `ℤ × H₃(ℤ)`.
    pub fn preset(lattice: &Lattice, name: &str) -> Result<Self, LatticeError> {
        let unit = |a: usize| {
            let mut e = lattice.identity();
            e[a] = 1;
            e
        };
        let gens: Vec<Elem> = match (lattice.kind(), name) {
            (_, "standard") => (0..lattice.p()).map(unit).collect(),
            (LatticeKind::ZxH3Z, "product") => (0..3).map(unit).collect(),
            // ℤ-factor mixed into both Heisenberg generators
            (LatticeKind::ZxH3Z, "skew") => vec![vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![0, 1, 0, 0]],
            _ => return Err(LatticeError::UnknownGenerators(name.to_string())),
        };
        Self::new(lattice, &gens)
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The polarized cone space: `V∞` with unit ball `conv(π(embed S))`.
    pub fn cone_space(&self, lattice: &Lattice) -> Result<HorizontalSpace, LatticeError> {
        let p = lattice.p();
        let verts: Vec<Vec<f64>> = self
            .elements
            .iter()
            .map(|g| g[..p].iter().map(|&x| x as f64).collect())
            .collect();
        let norm = Norm::polytope(verts).map_err(SpaceError::from)?;
        Ok(HorizontalSpace::polarized(lattice.algebra_arc(), norm)?)
    }
}
