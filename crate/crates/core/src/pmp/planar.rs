//! Exact distances when the horizontal layer is a plane, or a plane times an
//! abnormal line.
//!
//! On a group with `p = 2` and one central direction, the central coordinate
//! of a horizontal path is `c · A`, where `A` is the signed area between the
//! projected curve and its chord. The distance is therefore the minimal
//! length of a plane curve from `0` to `P` bounding area `A`. Minimizers are
//! arcs of the isoperimetrix `J(B*)` (the dual unit ball turned by a quarter
//! turn), so the problem reduces to a one-parameter search over chords of
//! that convex set.
//!
//! When `p = 3` and `Ω` has a one-dimensional kernel `k`, weak duality gives
//! `d(g) ≥ μ t + D_μ(P, A)` for every `μ`, where `D_μ` is the planar distance
//! for the gauge `N_μ(w) = min_τ N(τ k + w) − μ τ`, whose dual set is the
//! slice of `B*` at height `μ`. The bound is concave in `μ` and maximized by
//! golden-section search; a matching path is built from the planar
//! minimizer.

use std::f64::consts::PI;

use crate::algebra::NilpotentAlgebra;
use crate::linalg::{self, dot};
use crate::norm::Norm;

type V2 = [f64; 2];

fn cross(a: V2, b: V2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: V2, b: V2) -> V2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn len(a: V2) -> f64 {
    a[0].hypot(a[1])
}

fn dot2(a: V2, b: V2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Quarter turn `J(x, y) = (−y, x)`.
fn quarter(a: V2) -> V2 {
    [-a[1], a[0]]
}

fn reflect(a: V2) -> V2 {
    [a[0], -a[1]]
}

/// Signed area `½ Σ_{i<j} d_i × d_j` swept by a chain of displacements.
pub fn chain_area(moves: &[V2]) -> f64 {
    let mut acc = [0.0, 0.0];
    let mut area = 0.0;
    for &d in moves {
        area += 0.5 * cross(acc, d);
        acc = [acc[0] + d[0], acc[1] + d[1]];
    }
    area
}

/// Shape part of a planar gauge.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `N(v) = max_i ⟨η_i, v⟩` for a convex polygon with counterclockwise
    /// vertices `η_i` containing the origin in its interior.
    Polygon(Vec<V2>),
    /// `N(v) = |M v|` for an invertible `M` (row-major).
    Ellipse([[f64; 2]; 2]),
}

/// Convex gauge `N(v) = ⟨offset, v⟩ + shape(v)` on the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarGauge {
    pub shape: Shape,
    pub offset: V2,
}

fn ccw_sorted(mut pts: Vec<V2>) -> Vec<V2> {
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / pts.len() as f64;
    pts.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.partial_cmp(&tb).unwrap()
    });
    pts
}

fn polygon_area(v: &[V2]) -> f64 {
    let k = v.len();
    (0..k).map(|i| cross(v[i], v[(i + 1) % k])).sum::<f64>() * 0.5
}

fn polygon_centroid(v: &[V2]) -> V2 {
    let k = v.len();
    let a = polygon_area(v);
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..k {
        let (p, q) = (v[i], v[(i + 1) % k]);
        let w = cross(p, q);
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    [cx / (6.0 * a), cy / (6.0 * a)]
}

impl PlanarGauge {
    /// Gauge of a norm on `ℝ²`.
    pub fn from_norm(norm: &Norm) -> Option<Self> {
        if norm.dim() != 2 {
            return None;
        }
        let shape = match norm {
            Norm::L2(_) => Shape::Ellipse([[1.0, 0.0], [0.0, 1.0]]),
            Norm::Quadratic(q) => {
                let g = linalg::to_matrix(q.gram());
                let l = g.cholesky()?.l();
                // vᵀ G v = |Lᵀ v|²
                Shape::Ellipse([[l[(0, 0)], l[(1, 0)]], [l[(0, 1)], l[(1, 1)]]])
            }
            _ => {
                let facets = norm.facet_list()?;
                Shape::Polygon(ccw_sorted(facets.iter().map(|f| [f[0], f[1]]).collect()))
            }
        };
        Some(Self {
            shape,
            offset: [0.0, 0.0],
        })
    }

    /// Gauge whose dual set is the convex polygon `dual` (any order).
    pub fn from_dual_polygon(dual: Vec<V2>) -> Self {
        let sorted = ccw_sorted(dual);
        let c = polygon_centroid(&sorted);
        Self {
            shape: Shape::Polygon(sorted.into_iter().map(|p| sub(p, c)).collect()),
            offset: c,
        }
    }

    pub fn value(&self, v: V2) -> f64 {
        dot2(self.offset, v) + shape_value(&self.shape, v)
    }

    fn reflected(&self) -> Self {
        let shape = match &self.shape {
            Shape::Polygon(s) => Shape::Polygon(s.iter().rev().map(|&p| reflect(p)).collect()),
            Shape::Ellipse(m) => Shape::Ellipse([[m[0][0], -m[0][1]], [m[1][0], -m[1][1]]]),
        };
        Self {
            shape,
            offset: reflect(self.offset),
        }
    }
}

fn shape_value(shape: &Shape, v: V2) -> f64 {
    match shape {
        Shape::Polygon(s) => s.iter().map(|&e| dot2(e, v)).fold(f64::NEG_INFINITY, f64::max),
        Shape::Ellipse(m) => len([m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DidoKind {
    Trivial,
    Straight,
    Staircase,
    Arc,
    LoopMinusEdge,
    FullLoop,
}

/// Minimal-length curve from `0` to `P` bounding signed area `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct DidoSolution {
    /// Optimal length (exact up to root-finding tolerance).
    pub length: f64,
    /// Feasible polygonal curve as displacements; its gauge length is at
    /// least `length` and equals it for polygonal gauges.
    pub moves: Vec<V2>,
    pub kind: DidoKind,
}

impl DidoSolution {
    pub fn path_length(&self, gauge: &PlanarGauge) -> f64 {
        self.moves.iter().map(|&d| gauge.value(d)).sum()
    }
}

/// Solves the planar isoperimetric problem for `gauge`. `segments` is the
/// number of chords used to realize curved arcs. `None` when a degenerate
/// polygonal gauge defeats the chord search.
pub fn dido(gauge: &PlanarGauge, target: V2, area: f64, segments: usize) -> Option<DidoSolution> {
    if area < 0.0 {
        let mut sol = dido(&gauge.reflected(), reflect(target), -area, segments)?;
        sol.moves.iter_mut().for_each(|d| *d = reflect(*d));
        return Some(sol);
    }
    let mut sol = match &gauge.shape {
        Shape::Polygon(s) => dido_polygon(s, target, area)?,
        Shape::Ellipse(m) => dido_ellipse(*m, target, area, segments),
    };
    sol.length += dot2(gauge.offset, target);
    Some(sol)
}

// ---- Euclidean and quadratic gauges --------------------------------

/// Exact Euclidean length for chord `c > 0` and area `a ≥ 0`, together with
/// the turning angle of the optimal circular arc.
fn euclid_arc(c: f64, a: f64) -> (f64, f64) {
    if a == 0.0 {
        return (c, 0.0);
    }
    let ratio = a / (c * c);
    let f = |phi: f64| (phi - phi.sin()) / (8.0 * (phi / 2.0).sin().powi(2));
    let phi = bisect_increasing(f, ratio, 0.0, 2.0 * PI);
    (c * phi / (2.0 * (phi / 2.0).sin()), phi)
}

/// Root of an increasing function `f(x) = y` on `(lo, hi)`.
fn bisect_increasing(f: impl Fn(f64) -> f64, y: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Equal chords along a circular arc from `0` to `c·(1,0)` (or a closed
/// regular polygon when `c = 0`) bounding area `a > 0` exactly.
fn regular_chain(c: f64, a: f64, n: usize) -> Vec<V2> {
    let nf = n as f64;
    let (radius, total) = if c == 0.0 {
        ((2.0 * a / (nf * (2.0 * PI / nf).sin())).sqrt(), 2.0 * PI)
    } else {
        let g = |phi: f64| (nf * (phi / nf).sin() - phi.sin()) / (8.0 * (phi / 2.0).sin().powi(2));
        let phi = bisect_increasing(g, a / (c * c), 0.0, 2.0 * PI);
        (c / (2.0 * (phi / 2.0).sin()), phi)
    };
    let step = total / nf;
    let chord = 2.0 * radius * (step / 2.0).sin();
    let start = if c == 0.0 { 0.0 } else { -total / 2.0 + step / 2.0 };
    (0..n)
        .map(|k| {
            let th = start + k as f64 * step;
            [chord * th.cos(), chord * th.sin()]
        })
        .collect()
}

fn dido_ellipse(m: [[f64; 2]; 2], target: V2, area: f64, segments: usize) -> DidoSolution {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let apply = |v: V2| [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
    let inv = |v: V2| {
        [
            (m[1][1] * v[0] - m[0][1] * v[1]) / det,
            (-m[1][0] * v[0] + m[0][0] * v[1]) / det,
        ]
    };
    let p = apply(target);
    let a = area * det;
    let (c, sign) = (len(p), a.signum());
    let a = a.abs();
    if a == 0.0 {
        let kind = if c == 0.0 { DidoKind::Trivial } else { DidoKind::Straight };
        let moves = if c == 0.0 { vec![] } else { vec![target] };
        return DidoSolution { length: c, moves, kind };
    }
    let (length, kind) = if c == 0.0 {
        (2.0 * (PI * a).sqrt(), DidoKind::FullLoop)
    } else {
        (euclid_arc(c, a).0, DidoKind::Arc)
    };
    let (cos, sin) = if c == 0.0 { (1.0, 0.0) } else { (p[0] / c, p[1] / c) };
    let moves = regular_chain(c, a, segments.max(3))
        .into_iter()
        .map(|d| {
            let d = [d[0], sign * d[1]];
            inv([cos * d[0] - sin * d[1], sin * d[0] + cos * d[1]])
        })
        .collect();
    DidoSolution { length, moves, kind }
}

// ---- polygonal gauges ------------------------------------------------

struct Chord {
    /// Euclidean chord length.
    c: f64,
    /// Area of the part below the chord.
    a: f64,
    /// Gauge length of the arc below the chord.
    l: f64,
    points: Vec<V2>,
}

/// Clips the isoperimetrix `iso` (counterclockwise) below the line
/// `⟨y, nrm⟩ = u` and returns the lower arc from its left to right end.
fn chord_at(iso: &[V2], shape: &Shape, nrm: V2, u: f64) -> Option<Chord> {
    let k = iso.len();
    let f: Vec<f64> = iso.iter().map(|&v| dot2(v, nrm) - u).collect();
    let enter = (0..k).find(|&i| f[i] > 0.0 && f[(i + 1) % k] <= 0.0)?;
    let lerp = |i: usize| {
        let j = (i + 1) % k;
        let t = f[i] / (f[i] - f[j]);
        [iso[i][0] + t * (iso[j][0] - iso[i][0]), iso[i][1] + t * (iso[j][1] - iso[i][1])]
    };
    let mut points = vec![lerp(enter)];
    let mut i = (enter + 1) % k;
    while f[(i + 1) % k] <= 0.0 {
        points.push(iso[i]);
        i = (i + 1) % k;
        if i == enter {
            return None;
        }
    }
    points.push(iso[i]);
    points.push(lerp(i));
    points.dedup_by(|a, b| len(sub(*a, *b)) <= 1e-15);
    let c = len(sub(*points.last().unwrap(), points[0]));
    let l = points.windows(2).map(|w| shape_value(shape, sub(w[1], w[0]))).sum();
    let a = polygon_area(&points);
    Some(Chord { c, a, l, points })
}

fn moves_of(points: &[V2], scale: f64) -> Vec<V2> {
    points
        .windows(2)
        .map(|w| [scale * (w[1][0] - w[0][0]), scale * (w[1][1] - w[0][1])])
        .filter(|d| d[0] != 0.0 || d[1] != 0.0)
        .collect()
}

fn dido_polygon(dual: &[V2], target: V2, area: f64) -> Option<DidoSolution> {
    let shape = Shape::Polygon(dual.to_vec());
    let iso: Vec<V2> = dual.iter().map(|&v| quarter(v)).collect();
    let iso_area = polygon_area(&iso);
    let k = iso.len();
    let perimeter: f64 = (0..k).map(|i| shape_value(&shape, sub(iso[(i + 1) % k], iso[i]))).sum();
    let plen = len(target);
    if plen == 0.0 && area == 0.0 {
        return Some(DidoSolution { length: 0.0, moves: vec![], kind: DidoKind::Trivial });
    }
    let straight = shape_value(&shape, target);
    // horizontal part below rounding noise: close the loop, then step over
    if plen <= 1e-9 * area.sqrt() {
        let s = (area / iso_area).sqrt();
        let mut pts = iso.clone();
        pts.push(iso[0]);
        let mut moves = moves_of(&pts, s);
        if plen > 0.0 {
            moves.push(target);
        }
        return Some(DidoSolution { length: s * perimeter + straight, moves, kind: DidoKind::FullLoop });
    }
    if area == 0.0 {
        return Some(DidoSolution { length: straight, moves: vec![target], kind: DidoKind::Straight });
    }
    let dir = [target[0] / plen, target[1] / plen];
    let nrm = quarter(dir);
    let levels: Vec<f64> = iso.iter().map(|&v| dot2(v, nrm)).collect();
    let u_min = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let u_max = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = u_max - u_min;
    let eval = |u: f64| chord_at(&iso, &shape, nrm, u);
    let area_of = |ch: &Chord| plen * plen * ch.a / (ch.c * ch.c);

    // staircases: near a bottom vertex the ratio a/c² is constant
    let bottom_tol = 1e-12 * span;
    let bottom: Vec<usize> = (0..k).filter(|&i| levels[i] <= u_min + bottom_tol).collect();
    if bottom.len() == 1 {
        let b = bottom[0];
        let d_in = sub(iso[b], iso[(b + k - 1) % k]);
        let d_out = sub(iso[(b + 1) % k], iso[b]);
        // target = s1 d_in + s2 d_out
        let det = cross(d_in, d_out);
        let s1 = cross(target, d_out) / det;
        let s2 = cross(d_in, target) / det;
        let stair = 0.5 * s1 * s2 * det;
        if area <= stair * (1.0 + 1e-12) {
            let t = (0.5 * (area / stair + 1.0)).clamp(0.0, 1.0);
            let moves: Vec<V2> = [
                [t * s1 * d_in[0], t * s1 * d_in[1]],
                [s2 * d_out[0], s2 * d_out[1]],
                [(1.0 - t) * s1 * d_in[0], (1.0 - t) * s1 * d_in[1]],
            ]
            .into_iter()
            .filter(|d| d[0] != 0.0 || d[1] != 0.0)
            .collect();
            return Some(DidoSolution { length: straight, moves, kind: DidoKind::Staircase });
        }
    }

    // flat top edge parallel to the target
    let top: Vec<usize> = (0..k).filter(|&i| levels[i] >= u_max - 1e-12 * span).collect();
    if top.len() == 2 {
        {
            let top_len = len(sub(iso[top[0]], iso[top[1]]));
            if area >= plen * plen * iso_area / (top_len * top_len) * (1.0 - 1e-12) {
                let s = (area / iso_area).sqrt();
                // start at the left end of the top edge, run counterclockwise
                // around to the right end, then back along the edge
                let (right, left) = if dot2(iso[top[0]], dir) > dot2(iso[top[1]], dir) {
                    (top[0], top[1])
                } else {
                    (top[1], top[0])
                };
                let mut pts = vec![iso[left]];
                let mut i = left;
                while i != right {
                    i = (i + 1) % k;
                    pts.push(iso[i]);
                }
                let mut moves = moves_of(&pts, s);
                let back = s * top_len - plen;
                if back > 0.0 {
                    moves.push([-back * dir[0], -back * dir[1]]);
                }
                return Some(DidoSolution {
                    length: s * perimeter - shape_value(&shape, [-target[0], -target[1]]),
                    moves,
                    kind: DidoKind::LoopMinusEdge,
                });
            }
        }
    }

    // general arcs: A(u) = area on a grid, refined by bisection
    const GRID: usize = 256;
    let us: Vec<f64> = (0..=GRID)
        .map(|i| {
            let t = i as f64 / GRID as f64;
            (u_min + span * t).clamp(u_min + 1e-13 * span, u_max - 1e-13 * span)
        })
        .collect();
    let vals: Vec<Option<f64>> = us.iter().map(|&u| eval(u).map(|c| area_of(&c) - area)).collect();
    let mut best: Option<(f64, f64)> = None;
    for i in 0..GRID {
        let (Some(fa), Some(fb)) = (vals[i], vals[i + 1]) else { continue };
        if fa == 0.0 || fa.signum() != fb.signum() {
            let (mut lo, mut hi, mut flo) = (us[i], us[i + 1], fa);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let Some(fm) = eval(mid).map(|c| area_of(&c) - area) else { break };
                if fm.signum() == flo.signum() && fm != 0.0 {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let u = 0.5 * (lo + hi);
            if let Some(ch) = eval(u) {
                let l = plen * ch.l / ch.c;
                if best.is_none_or(|(bl, _)| l < bl) {
                    best = Some((l, u));
                }
            }
        }
    }
    let (length, u) = best?;
    let ch = eval(u)?;
    let s = plen / ch.c;
    let mut moves = moves_of(&ch.points, s);
    // remove the residual chord mismatch so the curve ends exactly at target
    let end = moves.iter().fold([0.0, 0.0], |a, d| [a[0] + d[0], a[1] + d[1]]);
    if let Some(last) = moves.last_mut() {
        last[0] += target[0] - end[0];
        last[1] += target[1] - end[1];
    }
    Some(DidoSolution { length, moves, kind: DidoKind::Arc })
}

// ---- planar groups ------------------------------------------------

/// Distance on a group with `p = 2`, `n = 3` and `c_12^3 ≠ 0`; `None` for
/// other algebras or norms without a planar gauge.
pub fn planar_distance(alg: &NilpotentAlgebra, norm: &Norm, g: &[f64], segments: usize) -> Option<DidoSolution> {
    if alg.p() != 2 || alg.n() != 3 {
        return None;
    }
    let c = alg.constant(0, 1, 2);
    if c == 0.0 {
        return None;
    }
    let gauge = PlanarGauge::from_norm(norm)?;
    dido(&gauge, [g[0], g[1]], g[2] / c, segments)
}

// ---- a plane times an abnormal line --------------------------------

/// Result of the duality bound on `ℝ × plane` groups.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Horizontal displacements of a path realizing `upper`.
    pub moves: Vec<Vec<f64>>,
    pub mu: f64,
}

/// Orthonormal frame `k̂, e₁, e₂` adapted to `ker Ω`, with `c = ω(e₁, e₂)`.
struct SplitFrame {
    basis: [[f64; 3]; 3],
    c: f64,
}

fn split_frame(alg: &NilpotentAlgebra) -> Option<SplitFrame> {
    if alg.p() != 3 || alg.n() != 4 {
        return None;
    }
    let om = alg.omega(&[1.0]);
    let w = [om[1][2], om[2][0], om[0][1]];
    let wn = len([w[0], w[1]]).hypot(w[2]);
    if wn == 0.0 {
        return None;
    }
    // Ω is the cross product with ±w, so w spans the kernel
    let k = [w[0] / wn, w[1] / wn, w[2] / wn];
    let seed = if k[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = seed[0] * k[0] + seed[1] * k[1] + seed[2] * k[2];
    let mut e1 = [seed[0] - d * k[0], seed[1] - d * k[1], seed[2] - d * k[2]];
    let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|x| *x /= n1);
    let e2 = [
        k[1] * e1[2] - k[2] * e1[1],
        k[2] * e1[0] - k[0] * e1[2],
        k[0] * e1[1] - k[1] * e1[0],
    ];
    let c = (0..3).map(|i| (0..3).map(|j| e1[i] * om[i][j] * e2[j]).sum::<f64>()).sum::<f64>();
    Some(SplitFrame { basis: [k, e1, e2], c })
}

/// `min_τ N(τ, w) − μ τ` and the interval of minimizers.
fn line_min(norm: &Norm, mu: f64, w: V2) -> (f64, f64, f64) {
    let f = |t: f64| norm.value(&[t, w[0], w[1]]) - mu * t;
    if let Some(facets) = norm.facet_list() {
        // max of lines α τ + β
        let lines: Vec<(f64, f64)> = facets.iter().map(|a| (a[0] - mu, a[1] * w[0] + a[2] * w[1])).collect();
        let mut cands = vec![0.0];
        for (i, &(a1, b1)) in lines.iter().enumerate() {
            for &(a2, b2) in &lines[i + 1..] {
                if a1 != a2 {
                    cands.push((b2 - b1) / (a1 - a2));
                }
            }
        }
        let val = |t: f64| lines.iter().map(|&(a, b)| a * t + b).fold(f64::NEG_INFINITY, f64::max);
        let m = cands.iter().map(|&t| val(t)).fold(f64::INFINITY, f64::min);
        let tol = 1e-12 * (1.0 + m.abs());
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for &(a, b) in &lines {
            if a > 0.0 {
                hi = hi.min((m + tol - b) / a);
            } else if a < 0.0 {
                lo = lo.max((m + tol - b) / a);
            }
        }
        return (m, lo, hi);
    }
    // smooth convex: golden section on a bracket
    let scale = 1.0 + len(w) * 1e3;
    let (mut a, mut b) = (-scale, scale);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (f(t), t, t)
}

/// Dual slice `{η : (μ, η) ∈ B*}` as a planar gauge, `None` when degenerate.
fn slice_gauge(norm: &Norm, mu: f64) -> Option<PlanarGauge> {
    match norm {
        Norm::L2(_) | Norm::Quadratic(_) => {
            let gram = match norm {
                Norm::Quadratic(q) => linalg::to_matrix(q.gram()),
                _ => nalgebra::DMatrix::identity(3, 3),
            };
            let h = gram.try_inverse()?;
            let hww = h.view((1, 1), (2, 2)).into_owned();
            let hwt = h.view((1, 0), (2, 1)).into_owned();
            let hww_inv = hww.clone().try_inverse()?;
            let center = -(&hww_inv * &hwt) * mu;
            let r2 = 1.0 - mu * mu * h[(0, 0)] + mu * mu * (hwt.transpose() * &hww_inv * &hwt)[(0, 0)];
            if r2 <= 0.0 {
                return None;
            }
            // support of {ζ : ζᵀ H ζ ≤ r²} is r |Lᵀ w| where H⁻¹ = L Lᵀ
            let l = hww_inv.cholesky()?.l();
            let r = r2.sqrt();
            Some(PlanarGauge {
                shape: Shape::Ellipse([[r * l[(0, 0)], r * l[(1, 0)]], [r * l[(0, 1)], r * l[(1, 1)]]]),
                offset: [center[0], center[1]],
            })
        }
        _ => {
            let verts = norm.vertex_list()?;
            let facets = norm.facet_list()?;
            let bound = 2.0 * facets.iter().map(|f| crate::linalg::norm2(f)).fold(0.0, f64::max) + 1.0;
            let mut poly: Vec<V2> = vec![[-bound, -bound], [bound, -bound], [bound, bound], [-bound, bound]];
            for v in &verts {
                let (a, rhs) = ([v[1], v[2]], 1.0 - mu * v[0]);
                poly = clip(&poly, a, rhs);
                if poly.len() < 3 {
                    return None;
                }
            }
            if polygon_area(&poly) <= 1e-14 * bound * bound {
                return None;
            }
            Some(PlanarGauge::from_dual_polygon(poly))
        }
    }
}

/// Sutherland–Hodgman clip of a convex polygon by `⟨a, y⟩ ≤ rhs`.
fn clip(poly: &[V2], a: V2, rhs: f64) -> Vec<V2> {
    let k = poly.len();
    let mut out = Vec::with_capacity(k + 1);
    for i in 0..k {
        let (p, q) = (poly[i], poly[(i + 1) % k]);
        let (fp, fq) = (dot2(a, p) - rhs, dot2(a, q) - rhs);
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out.dedup_by(|x, y| len(sub(*x, *y)) <= 1e-15);
    if out.len() > 1 && len(sub(out[0], *out.last().unwrap())) <= 1e-15 {
        out.pop();
    }
    out
}

/// Lower and upper distance bounds on `ℝ × plane` groups (`p = 3`,
/// `n = 4`, `Ω` of rank 2); `None` for other algebras.
pub fn split_distance(alg: &NilpotentAlgebra, norm: &Norm, g: &[f64], segments: usize) -> Option<SplitEstimate> {
    let frame = split_frame(alg)?;
    let b = frame.basis;
    // columns k̂, e1, e2
    let m: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| b[j][i]).collect()).collect();
    let local = norm.pullback(&m).ok()?;
    let x = &g[..3];
    let t = dot(x, &b[0]);
    let target = [dot(x, &b[1]), dot(x, &b[2])];
    let area = g[3] / frame.c;
    let to_global = |tau: f64, w: V2| -> Vec<f64> { (0..3).map(|i| tau * b[0][i] + w[0] * b[1][i] + w[1] * b[2][i]).collect() };

    let mu_hi = local.value(&[1.0, 0.0, 0.0]);
    let mu_lo = -local.value(&[-1.0, 0.0, 0.0]);
    let bound_at = |mu: f64| -> Option<(f64, PlanarGauge, DidoSolution)> {
        let gauge = slice_gauge(&local, mu)?;
        let sol = dido(&gauge, target, area, segments)?;
        Some((mu * t + sol.length, gauge, sol))
    };
    // every μ gives a valid bound; keep the best one evaluated
    let best_mu = std::cell::Cell::new((f64::NEG_INFINITY, f64::NAN));
    let value = |mu: f64| {
        let v = bound_at(mu).map_or(f64::NEG_INFINITY, |v| v.0);
        if v > best_mu.get().0 {
            best_mu.set((v, mu));
        }
        v
    };
    // the slice degenerates at the ends of the range
    let shrink = 1e-6 * (mu_hi - mu_lo);
    let (mut a, mut bb) = (mu_lo + shrink, mu_hi - shrink);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (bb - r * (bb - a), a + r * (bb - a));
    let (mut fc, mut fd) = (value(c), value(d));
    for _ in 0..64 {
        if fc > fd {
            bb = d;
            d = c;
            fd = fc;
            c = bb - r * (bb - a);
            fc = value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (bb - a);
            fd = value(d);
        }
    }
    value(0.5 * (a + bb));
    // polytope optima often sit at the ends
    for mu in [mu_lo, mu_hi, mu_lo + 1e-12 * (mu_hi - mu_lo), mu_hi - 1e-12 * (mu_hi - mu_lo)] {
        value(mu);
    }
    let (_, mu) = best_mu.get();
    if mu.is_nan() {
        return None;
    }
    let (lower, _, sol) = bound_at(mu)?;
    let lower = lower.max(norm.value(x));

    // lift the planar minimizer: τ_e from the argmin intervals, summing to t
    let parts: Vec<(f64, f64, V2)> = sol
        .moves
        .iter()
        .map(|&w| {
            let (_, lo, hi) = line_min(&local, mu, w);
            (lo, hi, w)
        })
        .collect();
    let sum_lo: f64 = parts.iter().map(|p| p.0).sum();
    let sum_hi: f64 = parts.iter().map(|p| p.1).sum();
    let mut moves: Vec<Vec<f64>> = Vec::new();
    let residual = if sum_lo.is_finite() && sum_hi.is_finite() {
        let theta = if sum_hi > sum_lo { ((t - sum_lo) / (sum_hi - sum_lo)).clamp(0.0, 1.0) } else { 0.5 };
        let mut used = 0.0;
        for &(lo, hi, w) in &parts {
            let tau = lo + theta * (hi - lo);
            used += tau;
            moves.push(to_global(tau, w));
        }
        t - used
    } else {
        for &(_, _, w) in &parts {
            moves.push(to_global(0.0, w));
        }
        t
    };
    if residual != 0.0 {
        moves.push(to_global(residual, [0.0, 0.0]));
    }
    let upper = moves.iter().map(|v| norm.value(v)).sum::<f64>();
    Some(SplitEstimate {
        lower: lower.min(upper),
        upper,
        moves,
        mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::presets;

    fn h3() -> NilpotentAlgebra {
        presets::heisenberg()
    }

    #[test]
    fn loops_bound_expected_areas() {
        // closed curves of length 1: square (l1), circle (l2), diamond (linf)
        for (norm, area) in [(Norm::L1(2), 1.0 / 16.0), (Norm::L2(2), 1.0 / (4.0 * PI)), (Norm::Linf(2), 1.0 / 8.0)] {
            let sol = planar_distance(&h3(), &norm, &[0.0, 0.0, area], 1024).unwrap();
            assert!((sol.length - 1.0).abs() < 1e-12, "{norm:?}: {}", sol.length);
            assert_eq!(sol.kind, DidoKind::FullLoop);
            assert!((chain_area(&sol.moves) - area).abs() < 1e-14);
        }
    }

    #[test]
    fn center_distances() {
        let l2 = planar_distance(&h3(), &Norm::L2(2), &[0.0, 0.0, 1.0], 64).unwrap();
        assert!((l2.length - 2.0 * PI.sqrt()).abs() < 1e-12);
        let gauge = PlanarGauge::from_norm(&Norm::L2(2)).unwrap();
        assert!(l2.path_length(&gauge) <= 3.550 && l2.path_length(&gauge) >= l2.length);
        let l1 = planar_distance(&h3(), &Norm::L1(2), &[0.0, 0.0, 1.0], 64).unwrap();
        assert!((l1.length - 4.0).abs() < 1e-12);
        assert_eq!(l1.moves.len(), 4);
    }

    #[test]
    fn rounding_noise_off_the_center() {
        // l1 center: d(0, 0, z) = 4√z
        let g = [1.1102230246251565e-16, 8.164311994315686e-17, 1.0 / 36.0];
        let sol = planar_distance(&h3(), &Norm::L1(2), &g, 1024).unwrap();
        assert!((sol.length - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(sol.kind, DidoKind::FullLoop);
    }

    #[test]
    fn polygon_paths_realize_their_length_and_area() {
        let targets = [[1.0, 0.3, 0.2], [-0.4, 2.0, -1.1], [0.5, 0.5, 3.0], [2.0, 0.0, 0.01], [0.0, 1.0, -0.4]];
        for norm in [Norm::L1(2), Norm::Linf(2), Norm::polytope(vec![vec![1.0, 0.2], vec![-1.0, -0.2], vec![0.3, 1.0], vec![-0.3, -1.0], vec![1.0, 1.0], vec![-1.0, -1.0]]).unwrap()] {
            let gauge = PlanarGauge::from_norm(&norm).unwrap();
            for g in targets {
                let sol = planar_distance(&h3(), &norm, &g, 64).unwrap();
                let end = sol.moves.iter().fold([0.0, 0.0], |a, d| [a[0] + d[0], a[1] + d[1]]);
                assert!((end[0] - g[0]).abs() < 1e-12 && (end[1] - g[1]).abs() < 1e-12);
                assert!((chain_area(&sol.moves) - g[2]).abs() < 1e-9, "{norm:?} {g:?}");
                assert!((sol.path_length(&gauge) - sol.length).abs() < 1e-9);
                assert!(sol.length >= norm.value(&g[..2]) - 1e-12);
            }
        }
    }

    #[test]
    fn l1_staircase_region() {
        // |A| ≤ |xy|/2 keeps the distance at ‖P‖₁
        let sol = planar_distance(&h3(), &Norm::L1(2), &[1.0, 0.5, 0.2], 64).unwrap();
        assert_eq!(sol.kind, DidoKind::Staircase);
        assert!((sol.length - 1.5).abs() < 1e-15);
        let sol = planar_distance(&h3(), &Norm::L1(2), &[1.0, 0.5, 0.3], 64).unwrap();
        assert!(sol.length > 1.5);
    }

    #[test]
    fn euclidean_arc_closed_form() {
        // half circle of radius 1: chord 2, area π/2, length π
        let (l, phi) = euclid_arc(2.0, PI / 2.0);
        assert!((l - PI).abs() < 1e-12 && (phi - PI).abs() < 1e-12);
        let sol = planar_distance(&h3(), &Norm::L2(2), &[2.0, 0.0, -PI / 2.0], 512).unwrap();
        assert!((sol.length - PI).abs() < 1e-12);
        assert!((chain_area(&sol.moves) + PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_gauge_matches_transformed_problem() {
        let norm = Norm::quadratic(vec![vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap();
        // |(2x, y)|: the map (x,y) ↦ (2x, y) doubles areas
        let sol = planar_distance(&h3(), &norm, &[0.0, 0.0, 1.0], 256).unwrap();
        assert!((sol.length - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((chain_area(&sol.moves) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_gauge_offset() {
        let gauge = PlanarGauge::from_dual_polygon(vec![[2.0, 1.0], [0.0, 1.0], [0.0, -1.0], [2.0, -1.0]]);
        let sol = dido(&gauge, [1.0, 0.0], 0.5, 64).unwrap();
        assert!((sol.path_length(&gauge) - sol.length).abs() < 1e-9);
        assert!((chain_area(&sol.moves) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn split_euclidean_is_pythagorean() {
        let alg = presets::line_times_heisenberg();
        let norm = Norm::L2(3);
        let est = split_distance(&alg, &norm, &[0.7, 0.0, 0.0, 1.0], 1024).unwrap();
        let expect = (0.49 + 4.0 * PI).sqrt();
        assert!((est.lower - expect).abs() < 1e-6, "{} vs {expect}", est.lower);
        assert!((est.upper - expect).abs() < 1e-4, "{} vs {expect}", est.upper);
    }

    #[test]
    fn split_polytope_bounds_are_tight() {
        let alg = presets::line_times_heisenberg();
        for norm in [Norm::L1(3), Norm::Linf(3)] {
            for g in [[0.5, 0.2, -0.3, 0.8], [2.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.1]] {
                let est = split_distance(&alg, &norm, &g, 64).unwrap();
                assert!(est.lower <= est.upper + 1e-12);
                assert!(est.upper - est.lower < 1e-6, "{norm:?} {g:?}: {est:?}");
            }
        }
    }
}
