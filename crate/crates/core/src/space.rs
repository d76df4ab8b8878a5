//! Bracket-generating subspaces `V ⊆ 𝔫` carrying a norm, and the projected
//! norm on `V∞` whose unit ball is `π(B_‖·‖(1))`.

use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, GroupElement, NilpotentAlgebra};
use crate::linalg::{self, dot};
use crate::norm::{self, Norm, NormError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("π restricted to V is not onto V∞ (rank {rank} < p = {p})")]
    NotSurjective { rank: usize, p: usize },
    #[error("no point of V projects onto the requested vector")]
    InfeasibleFiber,
    #[error("basis columns must have length n = {0}")]
    BadBasis(usize),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Subspace `V` given by `q` basis columns in `𝔫`, with a norm on the
/// coefficient vectors.
#[derive(Debug, Clone)]
pub struct HorizontalSpace {
    algebra: Arc<NilpotentAlgebra>,
    /// `q` columns, each an `n`-vector.
    columns: Vec<Vec<f64>>,
    norm: Norm,
    cone: Norm,
    polarized: bool,
}

impl HorizontalSpace {
    pub fn new(
        algebra: Arc<NilpotentAlgebra>,
        columns: Vec<Vec<f64>>,
        norm: Norm,
    ) -> Result<Self, SpaceError> {
        let (n, p) = (algebra.n(), algebra.p());
        let q = columns.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(SpaceError::BadBasis(n));
        }
        if norm.dim() != q {
            return Err(NormError::DimensionMismatch {
                expected: q,
                got: norm.dim(),
            }
            .into());
        }
        // top p x q block
        let top: Vec<Vec<f64>> = (0..p).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        let rank = linalg::rank(&top, 1e-12);
        if rank < p {
            return Err(SpaceError::NotSurjective { rank, p });
        }
        let polarized = q == p
            && columns
                .iter()
                .enumerate()
                .all(|(a, c)| c.iter().enumerate().all(|(i, &x)| x == if i == a { 1.0 } else { 0.0 }));
        let cone = if polarized {
            norm.clone()
        } else {
            projected(&norm, &top)?
        };
        Ok(Self {
            algebra,
            columns,
            norm,
            cone,
            polarized,
        })
    }

    /// `V = V∞` with the given norm on the first `p` coordinates.
    pub fn polarized(algebra: Arc<NilpotentAlgebra>, norm: Norm) -> Result<Self, SpaceError> {
        let (n, p) = (algebra.n(), algebra.p());
        let columns = (0..p)
            .map(|a| (0..n).map(|i| if i == a { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(algebra, columns, norm)
    }

    pub fn algebra(&self) -> &NilpotentAlgebra {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> Arc<NilpotentAlgebra> {
        Arc::clone(&self.algebra)
    }

    pub fn q(&self) -> usize {
        self.columns.len()
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    /// The projected norm `‖·‖∞` on `V∞`.
    pub fn cone_norm(&self) -> &Norm {
        &self.cone
    }

    pub fn is_polarized(&self) -> bool {
        self.polarized
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// The cone space `(V∞, ‖·‖∞)` of this space.
    pub fn cone_space(&self) -> Result<HorizontalSpace, SpaceError> {
        HorizontalSpace::polarized(self.algebra_arc(), self.cone.clone())
    }

    /// `B v ∈ 𝔫` for coefficients `v`.
    pub fn embed(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.algebra.n()];
        for (c, &x) in self.columns.iter().zip(v) {
            if x != 0.0 {
                for (o, &ci) in out.iter_mut().zip(c) {
                    *o += x * ci;
                }
            }
        }
        out
    }

    /// `π(B v)`.
    pub fn project_coeffs(&self, v: &[f64]) -> Vec<f64> {
        let p = self.algebra.p();
        (0..p).map(|i| self.columns.iter().zip(v).map(|(c, x)| c[i] * x).sum()).collect()
    }

    /// `min { ‖v‖ : v ∈ V, π(v) = w }`.
    pub fn projected_norm(&self, w: &[f64]) -> Result<f64, SpaceError> {
        Ok(self.cone.eval(w)?)
    }

    /// Minimal-norm `Y_g ∈ V` with `π(Y_g) = π(g)`, as coefficients.
    pub fn lift_min_norm(&self, g: &GroupElement) -> Result<Vec<f64>, SpaceError> {
        let p = self.algebra.p();
        if g.coords.len() != self.algebra.n() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.algebra.n(),
                got: g.coords.len(),
            }
            .into());
        }
        let w = &g.coords[..p];
        self.lift_vector(w)
    }

    pub(crate) fn lift_vector(&self, w: &[f64]) -> Result<Vec<f64>, SpaceError> {
        let q = self.q();
        if w.iter().all(|x| *x == 0.0) {
            return Ok(vec![0.0; q]);
        }
        if self.polarized {
            return Ok(w.to_vec());
        }
        let top: Vec<Vec<f64>> = (0..self.algebra.p())
            .map(|i| self.columns.iter().map(|c| c[i]).collect())
            .collect();
        match &self.norm {
            Norm::L2(_) | Norm::Quadratic(_) => {
                let ginv = match &self.norm {
                    Norm::Quadratic(qf) => linalg::to_matrix(qf.gram()).try_inverse().ok_or(SpaceError::InfeasibleFiber)?,
                    _ => nalgebra::DMatrix::identity(q, q),
                };
                let c = linalg::to_matrix(&top);
                let m = &c * &ginv * c.transpose();
                let y = m
                    .lu()
                    .solve(&nalgebra::DVector::from_column_slice(w))
                    .ok_or(SpaceError::InfeasibleFiber)?;
                let v = ginv * c.transpose() * y;
                Ok(v.iter().copied().collect())
            }
            _ => lift_polyhedral(&self.norm, &self.cone, &top, w),
        }
    }

    /// Straight segment direction `Y_g / ‖Y_g‖` of the canonical ray through
    /// `π(g)`, `None` when `π(g) = 0`.
    pub fn geodesic_ray_direction(&self, g: &GroupElement) -> Result<Option<Vec<f64>>, SpaceError> {
        let y = self.lift_min_norm(g)?;
        let r = self.norm.value(&y);
        if r == 0.0 {
            return Ok(None);
        }
        Ok(Some(y.iter().map(|x| x / r).collect()))
    }
}

fn projected(norm: &Norm, top: &[Vec<f64>]) -> Result<Norm, SpaceError> {
    let q = norm.dim();
    match norm {
        Norm::L2(_) | Norm::Quadratic(_) => {
            let ginv = match norm {
                Norm::Quadratic(qf) => linalg::to_matrix(qf.gram()).try_inverse().ok_or(SpaceError::InfeasibleFiber)?,
                _ => nalgebra::DMatrix::identity(q, q),
            };
            let c = linalg::to_matrix(top);
            let m = (&c * ginv * c.transpose()).try_inverse().ok_or(SpaceError::InfeasibleFiber)?;
            let p = top.len();
            Ok(Norm::quadratic(
                (0..p).map(|i| (0..p).map(|j| 0.5 * (m[(i, j)] + m[(j, i)])).collect()).collect(),
            )?)
        }
        _ => {
            let verts = norm.vertex_list().expect("polyhedral");
            let projected = verts
                .iter()
                .map(|v| top.iter().map(|row| dot(row, v)).collect())
                .collect();
            Ok(Norm::polytope(projected)?)
        }
    }
}

fn lift_polyhedral(norm: &Norm, cone: &Norm, top: &[Vec<f64>], w: &[f64]) -> Result<Vec<f64>, SpaceError> {
    let p = top.len();
    let facets = cone.facet_list().expect("polyhedral cone");
    let (facet, r) = facets
        .iter()
        .map(|a| (a, dot(a, w)))
        .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
        .ok_or(SpaceError::InfeasibleFiber)?;
    let verts: Vec<Vec<f64>> = norm
        .vertex_list()
        .expect("polyhedral")
        .into_iter()
        .filter(|v| {
            let pv: Vec<f64> = top.iter().map(|row| dot(row, v)).collect();
            (dot(facet, &pv) - 1.0).abs() <= 1e-9
        })
        .collect();
    let images: Vec<Vec<f64>> = verts
        .iter()
        .map(|v| top.iter().map(|row| dot(row, v)).collect())
        .collect();
    let mut found = None;
    norm::for_each_combination(verts.len(), p, |idx| {
        if found.is_some() {
            return;
        }
        let a: Vec<Vec<f64>> = (0..p).map(|i| idx.iter().map(|&s| images[s][i]).collect()).collect();
        if let Some(lambda) = linalg::solve(&a, w) {
            if lambda.iter().all(|&l| l >= -1e-12 * r.max(1.0)) {
                let q = verts[0].len();
                let mut v = vec![0.0; q];
                for (&s, &l) in idx.iter().zip(&lambda) {
                    for (vi, &x) in v.iter_mut().zip(&verts[s]) {
                        *vi += l.max(0.0) * x;
                    }
                }
                found = Some(v);
            }
        }
    });
    found.ok_or(SpaceError::InfeasibleFiber)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::presets;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tilted(norm: Norm) -> HorizontalSpace {
        // V = span{X + Z, Y} in h3
        HorizontalSpace::new(
            Arc::new(presets::heisenberg()),
            vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]],
            norm,
        )
        .unwrap()
    }

    #[test]
    fn polarized_projected_norm_is_the_norm() {
        let h = HorizontalSpace::polarized(Arc::new(presets::heisenberg()), Norm::L1(2)).unwrap();
        assert!(h.is_polarized());
        assert_eq!(h.projected_norm(&[3.0, -4.0]).unwrap(), 7.0);
        assert_eq!(h.projected_norm(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn tilted_space_examples() {
        let h = tilted(Norm::L2(2));
        assert!(!h.is_polarized());
        assert!((h.projected_norm(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-14);
        let g = GroupElement::new(vec![1.0, 1.0, 0.0]);
        let y = h.lift_min_norm(&g).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-14 && (y[1] - 1.0).abs() < 1e-14);
        assert!((h.norm().value(&y) - 2f64.sqrt()).abs() < 1e-14);
        let z = GroupElement::new(vec![0.0, 0.0, 5.0]);
        assert_eq!(h.lift_min_norm(&z).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn lift_attains_projected_norm_for_redundant_space() {
        // q = 3 > p = 2: V = span{X, Y, X + Y + Z}
        let alg = Arc::new(presets::heisenberg());
        let cols = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 1.0]];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for norm in [Norm::L1(3), Norm::L2(3), Norm::Linf(3)] {
            let h = HorizontalSpace::new(alg.clone(), cols.clone(), norm).unwrap();
            for _ in 0..50 {
                let w = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                let g = GroupElement::new(vec![w[0], w[1], 0.3]);
                let y = h.lift_min_norm(&g).unwrap();
                let back = h.project_coeffs(&y);
                assert!((back[0] - w[0]).abs() < 1e-10 && (back[1] - w[1]).abs() < 1e-10);
                let pn = h.projected_norm(&w).unwrap();
                assert!((h.norm().value(&y) - pn).abs() < 1e-10, "{:?}", h.norm());
            }
        }
    }

    #[test]
    fn projected_norm_is_a_norm() {
        let alg = Arc::new(presets::heisenberg());
        let cols = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, -2.0, 1.0]];
        let h = HorizontalSpace::new(alg, cols, Norm::L1(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let a = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let b = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let t: f64 = rng.gen_range(0.0..5.0);
            let na = h.projected_norm(&a).unwrap();
            let nb = h.projected_norm(&b).unwrap();
            let nab = h.projected_norm(&[a[0] + b[0], a[1] + b[1]]).unwrap();
            assert!(nab <= na + nb + 1e-12);
            assert!((h.projected_norm(&[t * a[0], t * a[1]]).unwrap() - t * na).abs() < 1e-10);
            assert!((h.projected_norm(&[-a[0], -a[1]]).unwrap() - na).abs() < 1e-12);
        }
    }

    #[test]
    fn non_surjective_space_rejected() {
        let err = HorizontalSpace::new(
            Arc::new(presets::heisenberg()),
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]],
            Norm::L2(2),
        )
        .unwrap_err();
        assert_eq!(err, SpaceError::NotSurjective { rank: 1, p: 2 });
    }
}
