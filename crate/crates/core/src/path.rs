//! Horizontal paths with piecewise-constant controls.

use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::GroupElement;
use crate::norm::Norm;
use crate::scalar::{Exact, Scalar};
use crate::space::HorizontalSpace;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("direction has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("zero direction with positive duration")]
    ZeroDirection,
    #[error("duration must be finite and nonnegative, got {0}")]
    BadDuration(f64),
    #[error("number of pieces must be at least 1")]
    ZeroPieces,
    #[error("ratio R must lie in (0, 1], got {0}")]
    BadRatio(f64),
    #[error("direction has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed path CSV: {0}")]
    Csv(String),
}

/// One piece `t ↦ exp(t · direction)` run for `duration`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub direction: Vec<f64>,
    pub duration: f64,
}

/// Concatenation of straight horizontal segments, directions in the
/// coordinates of a [`HorizontalSpace`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HorizontalPath {
    pub segments: Vec<Segment>,
}

const UNIT_TOL: f64 = 1e-9;

impl HorizontalPath {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a path from displacement vectors `v_i`; each becomes the segment
    /// `(v_i / ‖v_i‖, ‖v_i‖)`. Zero displacements are dropped.
    pub fn from_displacements(norm: &Norm, moves: &[Vec<f64>]) -> Self {
        let mut path = Self::new();
        for v in moves {
            path.push_displacement(norm, v);
        }
        path
    }

    pub fn push_displacement(&mut self, norm: &Norm, v: &[f64]) {
        let r = norm.value(v);
        if r > 0.0 {
            self.segments.push(Segment {
                direction: v.iter().map(|x| x / r).collect(),
                duration: r,
            });
        }
    }

    /// Appends a unit-norm segment.
    pub fn push(&mut self, norm: &Norm, direction: Vec<f64>, duration: f64) -> Result<(), PathError> {
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(PathError::BadDuration(duration));
        }
        if direction.len() != norm.dim() {
            return Err(PathError::DimensionMismatch {
                expected: norm.dim(),
                got: direction.len(),
            });
        }
        if duration > 0.0 {
            let r = norm.value(&direction);
            if r == 0.0 {
                return Err(PathError::ZeroDirection);
            }
            if (r - 1.0).abs() > UNIT_TOL {
                return Err(PathError::NotUnit(r));
            }
        }
        self.segments.push(Segment { direction, duration });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// `Σ duration · ‖direction‖`.
    pub fn length(&self, norm: &Norm) -> f64 {
        self.segments
            .iter()
            .map(|s| s.duration * norm.value(&s.direction))
            .sum()
    }

    /// Total time; equals the length when directions are unit vectors.
    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn concat(&self, other: &HorizontalPath) -> HorizontalPath {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        HorizontalPath { segments }
    }

    /// The reversed path, ending at the inverse of this path's endpoint.
    pub fn reversed(&self) -> HorizontalPath {
        HorizontalPath {
            segments: self
                .segments
                .iter()
                .rev()
                .map(|s| Segment {
                    direction: s.direction.iter().map(|x| -x).collect(),
                    duration: s.duration,
                })
                .collect(),
        }
    }

    /// Image under the dilation `δ_t`: durations scale by `t`.
    pub fn scaled(&self, t: f64) -> HorizontalPath {
        HorizontalPath {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    direction: s.direction.clone(),
                    duration: s.duration * t,
                })
                .collect(),
        }
    }

    /// Merges consecutive segments sharing a direction and drops empty ones.
    pub fn simplified(&self) -> HorizontalPath {
        let mut out: Vec<Segment> = Vec::new();
        for s in &self.segments {
            if s.duration == 0.0 {
                continue;
            }
            match out.last_mut() {
                Some(last)
                    if last
                        .direction
                        .iter()
                        .zip(&s.direction)
                        .all(|(a, b)| (a - b).abs() <= 1e-12) =>
                {
                    last.duration += s.duration;
                }
                _ => out.push(s.clone()),
            }
        }
        HorizontalPath { segments: out }
    }

    /// Endpoint `exp(t_1 v_1) ⋯ exp(t_m v_m)` starting from the identity.
    pub fn endpoint(&self, space: &HorizontalSpace) -> GroupElement {
        let alg = space.algebra();
        let mut x = vec![0.0; alg.n()];
        for s in &self.segments {
            let y: Vec<f64> = space.embed(&s.direction).iter().map(|c| c * s.duration).collect();
            alg.mul_assign(&mut x, &y);
        }
        GroupElement::new(x)
    }

    /// Endpoint computed in rational arithmetic from the exact values of the
    /// stored floats.
    pub fn endpoint_exact(&self, space: &HorizontalSpace) -> GroupElement<Exact> {
        let alg = space.algebra();
        let mut acc: GroupElement<Exact> = alg.identity();
        for s in &self.segments {
            let t = Exact::from_f64(s.duration);
            let mut coords = vec![Exact::zero(); alg.n()];
            for (col, &d) in space.columns().iter().zip(&s.direction) {
                let dt = Exact::from_f64(d) * t.clone();
                for (c, &b) in coords.iter_mut().zip(col) {
                    if b != 0.0 {
                        *c = c.clone() + dt.clone() * Exact::from_f64(b);
                    }
                }
            }
            acc = alg
                .multiply(&acc, &GroupElement { coords })
                .expect("dimensions agree");
        }
        acc
    }

    /// Group elements reached after each segment, starting with the identity.
    pub fn vertices(&self, space: &HorizontalSpace) -> Vec<GroupElement> {
        let alg = space.algebra();
        let mut x = vec![0.0; alg.n()];
        let mut out = vec![GroupElement::new(x.clone())];
        for s in &self.segments {
            let y: Vec<f64> = space.embed(&s.direction).iter().map(|c| c * s.duration).collect();
            alg.mul_assign(&mut x, &y);
            out.push(GroupElement::new(x.clone()));
        }
        out
    }

    /// Splits the path into `m` consecutive pieces of equal length.
    pub fn subdivide(&self, norm: &Norm, m: usize) -> Result<Vec<HorizontalPath>, PathError> {
        if m == 0 {
            return Err(PathError::ZeroPieces);
        }
        if m == 1 {
            return Ok(vec![self.clone()]);
        }
        let total = self.length(norm);
        let piece = total / m as f64;
        let mut out = vec![HorizontalPath::new(); m];
        let mut idx = 0;
        let mut filled = 0.0;
        for s in &self.segments {
            let speed = norm.value(&s.direction);
            let mut left = s.duration;
            while left > 0.0 {
                if idx == m - 1 || speed == 0.0 {
                    out[idx].segments.push(Segment {
                        direction: s.direction.clone(),
                        duration: left,
                    });
                    filled += left * speed;
                    break;
                }
                let room = (piece - filled) / speed;
                // snap tiny remainders so pieces end on segment breaks
                if left <= room * (1.0 + 1e-12) {
                    out[idx].segments.push(Segment {
                        direction: s.direction.clone(),
                        duration: left,
                    });
                    filled += left * speed;
                    if filled >= piece * (1.0 - 1e-12) {
                        idx += 1;
                        filled = 0.0;
                    }
                    break;
                }
                if room > 0.0 {
                    out[idx].segments.push(Segment {
                        direction: s.direction.clone(),
                        duration: room,
                    });
                }
                left -= room;
                idx += 1;
                filled = 0.0;
            }
        }
        Ok(out)
    }

    /// Writes one CSV row `dir_1,…,dir_q,duration` per segment.
    pub fn to_csv(&self) -> String {
        let q = self.segments.first().map_or(0, |s| s.direction.len());
        let mut out = String::new();
        let header: Vec<String> = (1..=q).map(|i| format!("d{i}")).collect();
        let _ = writeln!(out, "{}{}duration", header.join(","), if q > 0 { "," } else { "" });
        for s in &self.segments {
            for d in &s.direction {
                let _ = write!(out, "{d},");
            }
            let _ = writeln!(out, "{}", s.duration);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, PathError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        lines.next().ok_or_else(|| PathError::Csv("missing header".into()))?;
        let mut segments = Vec::new();
        for line in lines {
            let vals: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>().map_err(|e| PathError::Csv(e.to_string())))
                .collect::<Result<_, _>>()?;
            let (dur, dir) = vals.split_last().ok_or_else(|| PathError::Csv("empty row".into()))?;
            segments.push(Segment {
                direction: dir.to_vec(),
                duration: *dur,
            });
        }
        Ok(Self { segments })
    }
}

/// Four-segment commutator path `(−X,√r), (−Y,√r), (X,√r), (Y,√r)` reaching
/// `exp(r[X,Y])` with length `4√r`.
pub fn box_path(norm: &Norm, x: &[f64], y: &[f64], r: f64) -> Result<HorizontalPath, PathError> {
    for v in [x, y] {
        let nv = norm.eval(v).map_err(|_| PathError::DimensionMismatch {
            expected: norm.dim(),
            got: v.len(),
        })?;
        if (nv - 1.0).abs() > UNIT_TOL {
            return Err(PathError::NotUnit(nv));
        }
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(PathError::BadDuration(r));
    }
    if r == 0.0 {
        return Ok(HorizontalPath::new());
    }
    let s = r.sqrt();
    let neg = |v: &[f64]| v.iter().map(|c| -c).collect::<Vec<_>>();
    Ok(HorizontalPath {
        segments: vec![
            Segment { direction: neg(x), duration: s },
            Segment { direction: neg(y), duration: s },
            Segment { direction: x.to_vec(), duration: s },
            Segment { direction: y.to_vec(), duration: s },
        ],
    })
}

/// Number of pieces `h_i` of an `m`-fold equal-length subdivision whose
/// projection is short: `‖π(h_i)‖∞ < R · length(c) / m`.
///
/// The piece length stands in for `d(h_i)`; comparisons carry a relative
/// slack of `1e-12` so that pieces exactly on the threshold count as regular.
pub fn count_irregular_segments(
    space: &HorizontalSpace,
    path: &HorizontalPath,
    m: usize,
    ratio: f64,
) -> Result<usize, PathError> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(PathError::BadRatio(ratio));
    }
    let pieces = path.subdivide(space.norm(), m)?;
    let piece_len = path.length(space.norm()) / m as f64;
    let p = space.algebra().p();
    let threshold = ratio * piece_len * (1.0 - 1e-12);
    Ok(pieces
        .iter()
        .filter(|c| {
            let h = c.endpoint(space);
            let pn = space.cone_norm().value(&h.coords[..p]);
            pn < threshold
        })
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::presets;
    use std::sync::Arc;

    fn h3(norm: Norm) -> HorizontalSpace {
        HorizontalSpace::polarized(Arc::new(presets::heisenberg()), norm).unwrap()
    }

    #[test]
    fn endpoint_examples() {
        let sp = h3(Norm::L1(2));
        assert!(HorizontalPath::new().endpoint(&sp).is_identity());
        let c = HorizontalPath::from_displacements(
            sp.norm(),
            &[vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        );
        assert_eq!(c.endpoint(&sp).coords, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn box_path_examples() {
        let sp = h3(Norm::L2(2));
        let e1 = [1.0, 0.0];
        let e2 = [0.0, 1.0];
        let b = box_path(sp.norm(), &e1, &e2, 1.0).unwrap();
        assert_eq!(b.endpoint(&sp).coords, vec![0.0, 0.0, 1.0]);
        assert_eq!(b.length(sp.norm()), 4.0);
        let b4 = box_path(sp.norm(), &e1, &e2, 4.0).unwrap();
        assert_eq!(b4.endpoint(&sp).coords, vec![0.0, 0.0, 4.0]);
        assert_eq!(b4.length(sp.norm()), 8.0);
        assert!(box_path(sp.norm(), &e1, &e2, 0.0).unwrap().is_empty());
        assert_eq!(
            box_path(sp.norm(), &[2.0, 0.0], &e2, 1.0),
            Err(PathError::NotUnit(2.0))
        );
    }

    #[test]
    fn box_path_exact_in_rationals() {
        let sp = h3(Norm::L2(2));
        let b = box_path(sp.norm(), &[1.0, 0.0], &[0.0, 1.0], 2.25).unwrap();
        let end = b.endpoint_exact(&sp);
        assert_eq!(end.coords[2], crate::scalar::ratio(9, 4));
        assert!(end.coords[0].is_zero() && end.coords[1].is_zero());
    }

    #[test]
    fn subdivide_reproduces_endpoint() {
        let sp = h3(Norm::L2(2));
        let c = HorizontalPath::from_displacements(
            sp.norm(),
            &[vec![0.3, 0.1], vec![-0.2, 0.5], vec![0.7, -0.4]],
        );
        let whole = c.endpoint(&sp);
        for m in 1..6 {
            let pieces = c.subdivide(sp.norm(), m).unwrap();
            assert_eq!(pieces.len(), m);
            let mut acc = GroupElement::new(vec![0.0; 3]);
            for piece in &pieces {
                assert!((piece.length(sp.norm()) - c.length(sp.norm()) / m as f64).abs() < 1e-12);
                acc = sp.algebra().multiply(&acc, &piece.endpoint(&sp)).unwrap();
            }
            assert!(acc.max_abs_diff(&whole) < 1e-14);
        }
        assert_eq!(c.subdivide(sp.norm(), 0), Err(PathError::ZeroPieces));
    }

    #[test]
    fn straight_path_has_no_irregular_pieces() {
        let sp = h3(Norm::L2(2));
        let c = HorizontalPath::from_displacements(sp.norm(), &[vec![3.0, 4.0]]);
        for m in 1..8 {
            assert_eq!(count_irregular_segments(&sp, &c, m, 1.0).unwrap(), 0);
        }
        assert_eq!(count_irregular_segments(&sp, &c, 2, 0.0), Err(PathError::BadRatio(0.0)));
    }

    #[test]
    fn csv_round_trip() {
        let c = HorizontalPath::from_displacements(&Norm::L1(2), &[vec![0.5, 0.5], vec![-2.0, 0.0]]);
        let text = c.to_csv();
        assert!(text.starts_with("d1,d2,duration\n"));
        assert_eq!(HorizontalPath::from_csv(&text).unwrap(), c);
    }

    #[test]
    fn reversal_inverts_endpoint() {
        let sp = h3(Norm::L2(2));
        let c = HorizontalPath::from_displacements(sp.norm(), &[vec![0.3, 0.1], vec![-0.2, 0.5]]);
        let g = c.endpoint(&sp);
        let gi = c.reversed().endpoint(&sp);
        assert!(sp.algebra().multiply(&g, &gi).unwrap().coords.iter().all(|x| x.abs() < 1e-15));
    }
}
