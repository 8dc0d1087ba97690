//! Propagation of the coherence vector under piecewise-constant controls.

use alloc::vec::Vec;

use crate::coherence::{is_physical, CoherenceVector, DEFAULT_PHYSICAL_TOL};
use crate::generator::{lindblad_superop, DissipationMatrix, HamiltonianVector, Superoperator};
use crate::linalg::Mat3;

/// Slack on `‖ρ⃗‖²` before a sampled state is flagged as leaving the ball.
pub const VIOLATION_TOL: f64 = 1e-8;
const TAYLOR_ORDER: usize = 18;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("segment {index} has invalid duration {duration}")]
    BadDuration { index: usize, duration: f64 },
    #[error("control value of segment {0} is not finite")]
    BadControl(usize),
    #[error("sampling step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("initial state lies outside the Bloch ball (|v|^2 = {0})")]
    Unphysical(f64),
}

/// `exp(m)` by scaling and squaring around a truncated Taylor series.
pub fn expm(m: &Mat3) -> Mat3 {
    let norm = m.abs().row_sum().max();
    if norm == 0.0 {
        return Mat3::identity();
    }
    let mut s = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > 0.5 {
        scaled_norm *= 0.5;
        s += 1;
    }
    let a = m / libm::pow(2.0, s as f64);
    // Horner form of Σ aᵏ/k!.
    let mut acc = Mat3::identity();
    for k in (1..=TAYLOR_ORDER).rev() {
        acc = Mat3::identity() + a * acc / k as f64;
    }
    for _ in 0..s {
        acc = acc * acc;
    }
    acc
}

/// `exp(l·t)·v0`.
pub fn propagate(l: &Superoperator, v0: &CoherenceVector, t: f64) -> CoherenceVector {
    if t == 0.0 {
        return *v0;
    }
    CoherenceVector(expm(&(l.0 * t)) * v0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub u: f64,
}

/// Ordered piecewise-constant control values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlSchedule {
    segments: Vec<Segment>,
}

impl ControlSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self, DynamicsError> {
        for (index, s) in segments.iter().enumerate() {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(DynamicsError::BadDuration { index, duration: s.duration });
            }
            if !s.u.is_finite() {
                return Err(DynamicsError::BadControl(index));
            }
        }
        Ok(ControlSchedule { segments })
    }

    pub fn constant(duration: f64, u: f64) -> Result<Self, DynamicsError> {
        Self::new(alloc::vec![Segment { duration, u }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }
}

/// Sampled path. `controls[k]` is the control acting just before `times[k]`
/// (the first segment's value at `t = 0`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CoherenceVector>,
    pub purities: Vec<f64>,
    pub controls: Vec<f64>,
    /// First sampled time at which the state left the Bloch ball.
    pub violation: Option<f64>,
    pub max_norm: f64,
}

impl Trajectory {
    pub fn push(&mut self, t: f64, v: CoherenceVector, u: f64) {
        let p = v.purity();
        if self.violation.is_none() && !is_physical(&v, VIOLATION_TOL) {
            self.violation = Some(t);
        }
        self.max_norm = self.max_norm.max(libm::sqrt(p));
        self.times.push(t);
        self.states.push(v);
        self.purities.push(p);
        self.controls.push(u);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&CoherenceVector> {
        self.states.last()
    }

    pub fn exits_ball(&self) -> bool {
        self.violation.is_some()
    }
}

/// Evolution under `dρ⃗/dt = −(u·ℋ + 𝒟) ρ⃗`, sampled every `dt` and at every
/// segment boundary.
pub fn evolve_schedule(
    h: &HamiltonianVector,
    d: &DissipationMatrix,
    sched: &ControlSchedule,
    v0: &CoherenceVector,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    evolve_with(|u| lindblad_superop(h, d, u), sched, v0, dt)
}

/// Same sampling as [`evolve_schedule`] for an arbitrary control-dependent
/// generator.
pub fn evolve_with<F>(generator: F, sched: &ControlSchedule, v0: &CoherenceVector, dt: f64) -> Result<Trajectory, DynamicsError>
where
    F: Fn(f64) -> Superoperator,
{
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DynamicsError::BadStep(dt));
    }
    if !is_physical(v0, DEFAULT_PHYSICAL_TOL) {
        return Err(DynamicsError::Unphysical(v0.purity()));
    }
    let mut traj = Trajectory::default();
    let u0 = sched.segments.first().map_or(0.0, |s| s.u);
    traj.push(0.0, *v0, u0);

    let mut t0 = 0.0;
    let mut start = *v0;
    for seg in &sched.segments {
        let l = generator(seg.u);
        let step = expm(&(l.0 * dt));
        let mut v = start;
        let mut k = 1usize;
        // Interior samples by repeated stepping; the boundary state comes from
        // a single exponential over the whole segment.
        while (k as f64) * dt < seg.duration * (1.0 - 1e-12) {
            v = CoherenceVector(step * v.0);
            traj.push(t0 + k as f64 * dt, v, seg.u);
            k += 1;
        }
        start = propagate(&l, &start, seg.duration);
        t0 += seg.duration;
        traj.push(t0, start, seg.u);
    }
    Ok(traj)
}

/// `⟨S_z⟩ = Tr(σ_z ρ)/2 = ρ_3`.
pub fn expectation_sz(v: &CoherenceVector) -> f64 {
    v.0[2]
}

/// `[(lⁿ v0)_3 for n = 1..=max_order]`, the time derivatives of `⟨S_z⟩` at 0.
pub fn sz_derivatives(l: &Superoperator, v0: &CoherenceVector, max_order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_order);
    let mut v = v0.0;
    for _ in 0..max_order {
        v = l.0 * v;
        out.push(v[2]);
    }
    out
}
