//! Pontryagin extremals for the time-optimal problem on a polarized 2-step
//! group with a norm on `V∞`.
//!
//! Coordinates are exponential coordinates `x`, covectors `ξ` are expressed in
//! the dual coordinate basis. The left-invariant fields are
//! `X_i = ∂_i + ½ Σ_j Σ_{k>p} x_j c_ji^k ∂_k`, so the momenta read
//! `h_i = ξ_i + ½ Σ x_j ξ_k c_ji^k` and, for a control `u`,
//! `ḣ = −Ω(ξ_c) u` with `Ω(ξ_c)_ij = Σ_k ξ_k c_ij^k`. The central covector
//! `ξ_c` is constant along every extremal.

use thiserror::Error;

/// Bang arc: vertex control and duration.
type BangArc = (Vec<f64>, f64);

use crate::algebra::NilpotentAlgebra;
use crate::norm::Norm;

pub mod bounds;
pub mod distance;
pub mod paths_opt;
pub mod planar;
pub mod shoot;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PmpError {
    #[error("horizontal momenta vanished at t = {0}")]
    MomentaVanished(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("time horizon must be finite and nonnegative, got {0}")]
    BadHorizon(f64),
    #[error("no restart reached the endpoint tolerance (best residual {0:.3e})")]
    NoConvergence(f64),
    #[error("no feasible seed path: {0}")]
    SeedInfeasible(String),
    #[error("shooting needs the polarized horizontal space")]
    NotPolarized,
}

/// Point of the cotangent bundle with the abnormal multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalState {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    /// `0` for abnormal, `−1` for normal extremals.
    pub nu: f64,
    pub t: f64,
}

impl ExtremalState {
    /// Normal state at the identity with covector `xi`.
    pub fn normal_at_identity(xi: Vec<f64>) -> Self {
        Self {
            x: vec![0.0; xi.len()],
            xi,
            nu: -1.0,
            t: 0.0,
        }
    }
}

/// `h_i(λ) = ⟨λ, X_i(x)⟩` for `i ≤ p`.
pub fn horizontal_momenta(alg: &NilpotentAlgebra, s: &ExtremalState) -> Vec<f64> {
    let p = alg.p();
    let mut h = s.xi[..p].to_vec();
    for (j, i, k, c) in alg.structure() {
        h[i] += 0.5 * s.x[j] * s.xi[k] * c;
    }
    h
}

/// Right-hand side of the extremal equations for a fixed control `u`:
/// returns `(ẋ, ξ̇)`.
pub fn vector_field(alg: &NilpotentAlgebra, x: &[f64], xi: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (n, p) = (alg.n(), alg.p());
    let mut dx = vec![0.0; n];
    dx[..p].copy_from_slice(u);
    let mut dxi = vec![0.0; n];
    for (j, i, k, c) in alg.structure() {
        dx[k] += 0.5 * x[j] * u[i] * c;
        dxi[j] -= 0.5 * xi[k] * u[i] * c;
    }
    (dx, dxi)
}

/// Recorded point along an extremal.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub u: Vec<f64>,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub nu: f64,
}

impl Trajectory {
    pub fn endpoint(&self) -> &[f64] {
        &self.samples.last().expect("non-empty trajectory").x
    }

    pub fn horizon(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// CSV with columns `t, x1.., xi1.., u1..`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(first) = self.samples.first() {
            let mut head = vec!["t".to_string()];
            head.extend((1..=first.x.len()).map(|i| format!("x{i}")));
            head.extend((1..=first.xi.len()).map(|i| format!("xi{i}")));
            head.extend((1..=first.u.len()).map(|i| format!("u{i}")));
            out.push_str(&head.join(","));
            out.push('\n');
        }
        for s in &self.samples {
            let row: Vec<String> = std::iter::once(s.t)
                .chain(s.x.iter().copied())
                .chain(s.xi.iter().copied())
                .chain(s.u.iter().copied())
                .map(|v| v.to_string())
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Result of [`is_abnormal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbnormalityCheck {
    pub abnormal: bool,
    /// `max_t max_i |h_i(λ(t))|`.
    pub residual: f64,
    /// Zero-length trajectory; abnormal only vacuously.
    pub degenerate: bool,
}

pub const ABNORMAL_TOL: f64 = 1e-10;

/// Abnormality test: every horizontal momentum vanishes along the samples.
pub fn is_abnormal(traj: &Trajectory) -> AbnormalityCheck {
    let degenerate = traj.samples.len() < 2 || traj.horizon() == 0.0;
    let residual = traj
        .samples
        .iter()
        .flat_map(|s| s.h.iter())
        .fold(0.0f64, |a, &b| a.max(b.abs()));
    AbnormalityCheck {
        abnormal: degenerate || residual <= ABNORMAL_TOL,
        residual,
        degenerate,
    }
}

/// Compiled data for fast integration with a fixed central covector.
pub(crate) struct Flow<'a> {
    alg: &'a NilpotentAlgebra,
    norm: &'a Norm,
    /// `(j, i, k, c)` entries of the closure.
    entries: Vec<(usize, usize, usize, f64)>,
    /// `Ω(ξ_c)` row-major.
    omega: Vec<f64>,
    vertices: Option<Vec<Vec<f64>>>,
    p: usize,
    n: usize,
}

impl<'a> Flow<'a> {
    pub(crate) fn new(alg: &'a NilpotentAlgebra, norm: &'a Norm, xi_c: &[f64]) -> Self {
        let p = alg.p();
        let omega = alg.omega(xi_c).into_iter().flatten().collect();
        Self {
            alg,
            norm,
            entries: alg.structure().collect(),
            omega,
            vertices: norm.vertex_list(),
            p,
            n: alg.n(),
        }
    }

    fn control(&self, h: &[f64], u: &mut [f64]) -> bool {
        match self.norm {
            Norm::L2(_) => {
                let r = h.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r == 0.0 {
                    return false;
                }
                u.iter_mut().zip(h).for_each(|(a, b)| *a = b / r);
                true
            }
            _ => match self.norm.dual_support(h) {
                Ok(v) => {
                    u.copy_from_slice(&v);
                    true
                }
                Err(_) => false,
            },
        }
    }

    /// `ḣ = −Ω u`.
    fn hdot(&self, u: &[f64], out: &mut [f64]) {
        let p = self.p;
        for (o, row) in out[..p].iter_mut().zip(self.omega.chunks(p)) {
            *o = -row.iter().zip(u).map(|(w, v)| w * v).sum::<f64>();
        }
    }

    fn xdot(&self, x: &[f64], u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[..self.p].copy_from_slice(u);
        for &(j, i, k, c) in &self.entries {
            out[k] += 0.5 * x[j] * u[i] * c;
        }
    }

    /// Recovers `ξ` from `(x, h, ξ_c)`: `ξ_i = h_i − ½ Σ x_j ξ_k c_ji^k`.
    fn xi_of(&self, x: &[f64], h: &[f64], xi_c: &[f64]) -> Vec<f64> {
        let p = self.p;
        let mut xi = vec![0.0; self.n];
        xi[..p].copy_from_slice(h);
        xi[p..].copy_from_slice(xi_c);
        for &(j, i, k, c) in &self.entries {
            xi[i] -= 0.5 * x[j] * xi_c[k - p] * c;
        }
        xi
    }

    /// Integrates from the identity with initial momenta `h0`; `record` is
    /// called at `samples + 1` uniformly spaced times.
    pub(crate) fn run(
        &self,
        h0: &[f64],
        horizon: f64,
        samples: usize,
        substeps: usize,
        mut record: impl FnMut(f64, &[f64], &[f64], &[f64]),
    ) -> Result<Vec<f64>, PmpError> {
        let mut x = vec![0.0; self.n];
        let mut h = h0.to_vec();
        if self.vertices.is_some() {
            self.run_polyhedral(&mut x, &mut h, horizon, samples, &mut record, &mut |_, _| {})?;
        } else {
            self.run_rk4(&mut x, &mut h, horizon, samples, substeps, &mut record)?;
        }
        Ok(x)
    }

    fn run_rk4(
        &self,
        x: &mut [f64],
        h: &mut [f64],
        horizon: f64,
        samples: usize,
        substeps: usize,
        record: &mut impl FnMut(f64, &[f64], &[f64], &[f64]),
    ) -> Result<(), PmpError> {
        let (n, p) = (self.n, self.p);
        let samples = samples.max(1);
        let sub = substeps.max(1);
        let dt = horizon / (samples * sub) as f64;
        let mut u = vec![0.0; p];
        let (mut kx, mut kh) = (vec![vec![0.0; n]; 4], vec![vec![0.0; p]; 4]);
        let (mut xs, mut hs) = (vec![0.0; n], vec![0.0; p]);
        let h_scale = h.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if !self.control(h, &mut u) || h_scale == 0.0 {
            return Err(PmpError::MomentaVanished(0.0));
        }
        record(0.0, x, h, &u);
        for s in 0..samples {
            for m in 0..sub {
                let t = ((s * sub + m) as f64) * dt;
                for stage in 0..4 {
                    let f = [0.0, 0.5, 0.5, 1.0][stage];
                    for a in 0..n {
                        xs[a] = x[a] + if stage == 0 { 0.0 } else { f * dt * kx[stage - 1][a] };
                    }
                    for a in 0..p {
                        hs[a] = h[a] + if stage == 0 { 0.0 } else { f * dt * kh[stage - 1][a] };
                    }
                    if !self.control(&hs, &mut u) {
                        return Err(PmpError::MomentaVanished(t));
                    }
                    let (kx_s, kh_s) = (&mut kx[stage], &mut kh[stage]);
                    self.xdot(&xs, &u, kx_s);
                    self.hdot(&u, kh_s);
                }
                for a in 0..n {
                    x[a] += dt / 6.0 * (kx[0][a] + 2.0 * kx[1][a] + 2.0 * kx[2][a] + kx[3][a]);
                }
                for a in 0..p {
                    h[a] += dt / 6.0 * (kh[0][a] + 2.0 * kh[1][a] + 2.0 * kh[2][a] + kh[3][a]);
                }
            }
            let t = ((s + 1) * sub) as f64 * dt;
            if h.iter().fold(0.0f64, |a, b| a.max(b.abs())) <= 1e-14 * h_scale || !self.control(h, &mut u) {
                return Err(PmpError::MomentaVanished(t));
            }
            record(t, x, h, &u);
        }
        Ok(())
    }

    /// Bang arcs `(vertex, duration)` of a polytope-norm extremal, `None` for
    /// smooth norms.
    pub(crate) fn bang_arcs(&self, h0: &[f64], horizon: f64) -> Option<Result<Vec<BangArc>, PmpError>> {
        let verts = self.vertices.as_ref()?;
        let mut x = vec![0.0; self.n];
        let mut h = h0.to_vec();
        let mut arcs: Vec<(usize, f64)> = Vec::new();
        let res = self.run_polyhedral(&mut x, &mut h, horizon, 1, &mut |_, _, _, _| {}, &mut |a, tau| {
            match arcs.last_mut() {
                Some(last) if last.0 == a => last.1 += tau,
                _ => arcs.push((a, tau)),
            }
        });
        Some(res.map(|_| arcs.into_iter().map(|(a, tau)| (verts[a].clone(), tau)).collect()))
    }

    /// Chooses the active vertex at a switching point: among the maximizers of
    /// `⟨h, v⟩`, one that stays maximal under its own flow, smallest
    /// lexicographically.
    fn choose_vertex(&self, h: &[f64]) -> Option<usize> {
        let verts = self.vertices.as_ref().expect("polyhedral");
        let scale = h.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if scale == 0.0 {
            return None;
        }
        let vals: Vec<f64> = verts.iter().map(|v| crate::linalg::dot(h, v)).collect();
        let best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-12 * scale.max(best.abs());
        let tied: Vec<usize> = (0..verts.len()).filter(|&a| vals[a] >= best - tol).collect();
        if tied.len() == 1 {
            return Some(tied[0]);
        }
        let mut hd = vec![0.0; self.p];
        let mut stable: Vec<usize> = tied
            .iter()
            .copied()
            .filter(|&a| {
                self.hdot(&verts[a], &mut hd);
                let own = crate::linalg::dot(&hd, &verts[a]);
                tied.iter().all(|&b| crate::linalg::dot(&hd, &verts[b]) <= own + 1e-12 * scale.max(1.0))
            })
            .collect();
        if stable.is_empty() {
            stable = tied;
        }
        stable
            .into_iter()
            .min_by(|&a, &b| verts[a].partial_cmp(&verts[b]).unwrap())
    }

    /// Exact flow for polytope norms: on each switching interval the control
    /// is a constant vertex, `h` is affine and `x` moves by right
    /// multiplication with `exp(τ u)`.
    fn run_polyhedral(
        &self,
        x: &mut [f64],
        h: &mut [f64],
        horizon: f64,
        samples: usize,
        record: &mut impl FnMut(f64, &[f64], &[f64], &[f64]),
        arc: &mut impl FnMut(usize, f64),
    ) -> Result<(), PmpError> {
        let verts = self.vertices.as_ref().expect("polyhedral");
        let p = self.p;
        let samples = samples.max(1);
        let mut t = 0.0;
        let mut active = self.choose_vertex(h).ok_or(PmpError::MomentaVanished(0.0))?;
        record(0.0, x, h, &verts[active]);
        let mut hd = vec![0.0; p];
        let mut step = vec![0.0; self.n];
        let min_step = 1e-13 * horizon.max(1e-300);
        for s in 1..=samples {
            let target = horizon * s as f64 / samples as f64;
            while t < target {
                let v = &verts[active];
                self.hdot(v, &mut hd);
                // first time another vertex overtakes the active one
                let mut next = target - t;
                let gv = crate::linalg::dot(h, v);
                let dv = crate::linalg::dot(&hd, v);
                for (b, w) in verts.iter().enumerate() {
                    if b == active {
                        continue;
                    }
                    let gap = crate::linalg::dot(h, w) - gv;
                    let rate = crate::linalg::dot(&hd, w) - dv;
                    if rate > 0.0 {
                        let tau = (-gap / rate).max(0.0);
                        if tau < next {
                            next = tau;
                        }
                    }
                }
                let switching = next < target - t;
                let tau = if switching { next.max(min_step).min(target - t) } else { target - t };
                for a in 0..p {
                    step[a] = tau * v[a];
                }
                self.alg.mul_assign(x, &step);
                arc(active, tau);
                for a in 0..p {
                    h[a] += tau * hd[a];
                }
                t += tau;
                if switching {
                    active = self.choose_vertex(h).ok_or(PmpError::MomentaVanished(t))?;
                }
            }
            t = target;
            record(t, x, h, &verts[active]);
        }
        Ok(())
    }
}

/// Integrates the extremal starting at `s0` (based at the identity) for time
/// `horizon`, recording `steps + 1` samples.
///
/// Smooth norms use RK4 with at least 2048 internal steps; polytope norms are
/// integrated exactly between switching times, which are solved for in closed
/// form because the momenta are affine on each bang arc.
pub fn integrate_extremal(
    alg: &NilpotentAlgebra,
    norm: &Norm,
    s0: &ExtremalState,
    horizon: f64,
    steps: usize,
) -> Result<Trajectory, PmpError> {
    let (n, p) = (alg.n(), alg.p());
    for len in [s0.x.len(), s0.xi.len()] {
        if len != n {
            return Err(PmpError::DimensionMismatch { expected: n, got: len });
        }
    }
    if norm.dim() != p {
        return Err(PmpError::DimensionMismatch { expected: p, got: norm.dim() });
    }
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(PmpError::BadHorizon(horizon));
    }
    let xi_c = s0.xi[p..].to_vec();
    let flow = Flow::new(alg, norm, &xi_c);
    let h0 = horizontal_momenta(alg, s0);
    let steps = steps.max(1);
    let substeps = 2048usize.div_ceil(steps);
    // integrate in the frame based at the identity, then translate
    let base = crate::algebra::GroupElement::new(s0.x.clone());
    let translated = s0.x.iter().any(|v| *v != 0.0);
    let mut samples = Vec::with_capacity(steps + 1);
    flow.run(&h0, horizon, steps, substeps, |t, x, h, u| {
        let xi = flow.xi_of(x, h, &xi_c);
        samples.push(Sample {
            t: s0.t + t,
            x: x.to_vec(),
            xi,
            u: u.to_vec(),
            h: h.to_vec(),
        });
    })?;
    if translated {
        for smp in &mut samples {
            let g = alg
                .multiply(&base, &crate::algebra::GroupElement::new(smp.x.clone()))
                .expect("dimensions agree");
            smp.x = g.coords;
            let state = ExtremalState {
                x: smp.x.clone(),
                xi: vec![0.0; n],
                nu: s0.nu,
                t: smp.t,
            };
            // momenta are left-invariant; rebuild ξ at the translated point
            let mut xi = smp.h.clone();
            xi.extend_from_slice(&xi_c);
            for (j, i, k, c) in alg.structure() {
                xi[i] -= 0.5 * state.x[j] * xi_c[k - p] * c;
            }
            smp.xi = xi;
        }
    }
    Ok(Trajectory { samples, nu: s0.nu })
}

/// The straight abnormal extremal `λ(t) = (exp(t u), (0, ξ_c))` with `ν = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbnormalExtremal {
    pub u: Vec<f64>,
    pub xi_center: Vec<f64>,
}

/// Residuals of the maximum principle along sampled times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmpResiduals {
    /// Max deviation of `(ẋ, ξ̇)` from the extremal vector field.
    pub ode: f64,
    /// Max of `|max_{‖v‖=1} h_v(λ) + ν|`.
    pub max_hamiltonian: f64,
    /// Max of `|h_u(λ) − max_{‖v‖=1} h_v(λ)|` for the applied control.
    pub maximality: f64,
    /// Max of `|h_i|`.
    pub momenta: f64,
}

impl AbnormalExtremal {
    pub fn state_at(&self, alg: &NilpotentAlgebra, t: f64) -> ExtremalState {
        let (n, p) = (alg.n(), alg.p());
        let mut x = vec![0.0; n];
        for (a, u) in x.iter_mut().zip(&self.u) {
            *a = t * u;
        }
        let mut xi = vec![0.0; n];
        xi[p..].copy_from_slice(&self.xi_center);
        ExtremalState { x, xi, nu: 0.0, t }
    }

    pub fn trajectory(&self, alg: &NilpotentAlgebra, horizon: f64, steps: usize) -> Trajectory {
        let samples = (0..=steps)
            .map(|s| {
                let t = horizon * s as f64 / steps.max(1) as f64;
                let st = self.state_at(alg, t);
                let h = horizontal_momenta(alg, &st);
                Sample {
                    t,
                    x: st.x,
                    xi: st.xi,
                    u: self.u.clone(),
                    h,
                }
            })
            .collect();
        Trajectory { samples, nu: 0.0 }
    }

    /// Checks the ODE against the analytic derivative `(ẋ, ξ̇) = (u, 0)` and
    /// the maximum condition at `count` times in `[0, horizon]`.
    pub fn residuals(&self, alg: &NilpotentAlgebra, norm: &Norm, horizon: f64, count: usize) -> PmpResiduals {
        let n = alg.n();
        let mut res = PmpResiduals {
            ode: 0.0,
            max_hamiltonian: 0.0,
            maximality: 0.0,
            momenta: 0.0,
        };
        let mut expected_dx = vec![0.0; n];
        expected_dx[..self.u.len()].copy_from_slice(&self.u);
        for s in 0..count {
            let t = horizon * s as f64 / (count.max(2) - 1) as f64;
            let st = self.state_at(alg, t);
            let (dx, dxi) = vector_field(alg, &st.x, &st.xi, &self.u);
            let ode = dx
                .iter()
                .zip(&expected_dx)
                .map(|(a, b)| (a - b).abs())
                .chain(dxi.iter().map(|v| v.abs()))
                .fold(0.0f64, f64::max);
            let h = horizontal_momenta(alg, &st);
            let hmax = norm.dual_value(&h);
            let hu = crate::linalg::dot(&h, &self.u);
            res.ode = res.ode.max(ode);
            res.max_hamiltonian = res.max_hamiltonian.max((hmax + st.nu).abs());
            res.maximality = res.maximality.max((hmax - hu).abs());
            res.momenta = res.momenta.max(h.iter().fold(0.0f64, |a, b| a.max(b.abs())));
        }
        res
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::presets;
    use std::f64::consts::PI;

    #[test]
    fn momenta_examples() {
        let alg = presets::heisenberg();
        let s = ExtremalState {
            x: vec![0.0; 3],
            xi: vec![2.0, -3.0, 7.0],
            nu: -1.0,
            t: 0.0,
        };
        assert_eq!(horizontal_momenta(&alg, &s), vec![2.0, -3.0]);
        let s = ExtremalState {
            x: vec![1.0, 0.0, 0.0],
            xi: vec![0.0, 0.0, 1.0],
            nu: -1.0,
            t: 0.0,
        };
        assert_eq!(horizontal_momenta(&alg, &s), vec![0.0, 0.5]);
    }

    #[test]
    fn straight_extremal() {
        let alg = presets::heisenberg();
        let s0 = ExtremalState::normal_at_identity(vec![1.0, 0.0, 0.0]);
        let tr = integrate_extremal(&alg, &Norm::L2(2), &s0, 1.0, 16).unwrap();
        let end = tr.endpoint();
        assert!((end[0] - 1.0).abs() < 1e-14 && end[1].abs() < 1e-14 && end[2].abs() < 1e-14);
        let s0 = ExtremalState::normal_at_identity(vec![0.6, -0.8, 0.0]);
        let tr = integrate_extremal(&alg, &Norm::L2(2), &s0, 2.5, 16).unwrap();
        assert!((tr.endpoint()[0] - 1.5).abs() < 1e-13 && (tr.endpoint()[1] + 2.0).abs() < 1e-13);
    }

    #[test]
    fn circle_extremal_reaches_center() {
        let alg = presets::heisenberg();
        let s0 = ExtremalState::normal_at_identity(vec![1.0, 0.0, 2.0 * PI]);
        let tr = integrate_extremal(&alg, &Norm::L2(2), &s0, 1.0, 100).unwrap();
        let end = tr.endpoint();
        assert!(end[0].abs() < 1e-6 && end[1].abs() < 1e-6);
        assert!((end[2] - 1.0 / (4.0 * PI)).abs() < 1e-6);
        assert!(!is_abnormal(&tr).abnormal);
    }

    #[test]
    fn hamiltonian_conserved_l2() {
        let alg = presets::heisenberg5();
        let mut xi = vec![0.3, -0.2, 0.5, 0.1, 1.7];
        xi.truncate(alg.n());
        let s0 = ExtremalState::normal_at_identity(xi);
        let norm = Norm::L2(alg.p());
        let tr = integrate_extremal(&alg, &norm, &s0, 3.0, 2048).unwrap();
        let h0 = norm.dual_value(&tr.samples[0].h);
        for s in &tr.samples {
            assert!((norm.dual_value(&s.h) - h0).abs() < 1e-8);
            let st = ExtremalState { x: s.x.clone(), xi: s.xi.clone(), nu: -1.0, t: s.t };
            let h = horizontal_momenta(&alg, &st);
            assert!(h.iter().zip(&s.h).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    #[test]
    fn l1_extremal_is_square() {
        // h = (1/2, -1/2) with ξ_c = 4 gives four bang arcs of length 1/4
        let alg = presets::heisenberg();
        let s0 = ExtremalState::normal_at_identity(vec![0.5, -0.5, 4.0]);
        let tr = integrate_extremal(&alg, &Norm::L1(2), &s0, 1.0, 8).unwrap();
        let end = tr.endpoint();
        assert!(end[0].abs() < 1e-12 && end[1].abs() < 1e-12, "{end:?}");
        assert!((end[2] - 1.0 / 16.0).abs() < 1e-12);
        let h0 = Norm::L1(2).dual_value(&tr.samples[0].h);
        for s in &tr.samples {
            assert!((Norm::L1(2).dual_value(&s.h) - h0).abs() < 1e-12);
        }
    }

    #[test]
    fn vanishing_momenta_reported() {
        let alg = presets::heisenberg();
        let s0 = ExtremalState::normal_at_identity(vec![0.0, 0.0, 1.0]);
        assert_eq!(
            integrate_extremal(&alg, &Norm::L2(2), &s0, 1.0, 4),
            Err(PmpError::MomentaVanished(0.0))
        );
    }

    #[test]
    fn translated_start_matches_left_translation() {
        let alg = presets::heisenberg();
        let norm = Norm::L2(2);
        let base = vec![0.4, -1.0, 2.0];
        let tr0 = integrate_extremal(&alg, &norm, &ExtremalState::normal_at_identity(vec![0.0, 1.0, 3.0]), 1.3, 64).unwrap();
        // same momenta at a translated base point
        let mut xi = vec![0.0, 1.0, 3.0];
        for (j, i, k, c) in alg.structure() {
            xi[i] -= 0.5 * base[j] * xi[k] * c;
        }
        let s = ExtremalState { x: base.clone(), xi, nu: -1.0, t: 0.0 };
        let tr = integrate_extremal(&alg, &norm, &s, 1.3, 64).unwrap();
        let expect = alg
            .multiply(&crate::algebra::GroupElement::new(base), &crate::algebra::GroupElement::new(tr0.endpoint().to_vec()))
            .unwrap();
        assert!(expect.coords.iter().zip(tr.endpoint()).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
