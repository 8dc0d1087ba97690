//! Spin in a stochastic magnetic field `B⃗(t) = (β₁(t), 0, B₃ + β₃(t))`.
//!
//! The field fluctuations have two-time correlations `W_ij(t)` from one of
//! three families. Averaging over them in the convolutionless Markovian
//! limit gives a time-independent generator whose coefficients are computed
//! here in closed form. A Monte Carlo sampler of the unitary single-field
//! dynamics checks that limit.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::coherence::{CoherenceVector, DEFAULT_PHYSICAL_TOL};
use crate::dynamics::{propagate, Trajectory};
use crate::generator::{dissipation_from_kossakowski, DissipationMatrix, KossakowskiMatrix, Superoperator};
use crate::linalg::{Mat3, SymMat3, Vec3};

/// Largest max-norm deviation still counted as Markovian agreement.
pub const WEAK_COUPLING_BOUND: f64 = 0.02;
/// Monte Carlo requires `n_samples` at least this large.
pub const MIN_SAMPLES: usize = 100;
/// Spacing of the checkpoints used by the standard-error test.
pub const CHECKPOINT_SPACING: f64 = 0.5;
const COV_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum StochasticError {
    #[error("covariance [[w11, w13], [w13, w33]] is not positive semidefinite")]
    InvalidCovariance,
    #[error("amplitudes must be finite")]
    NonFinite,
    #[error("exponential family needs a positive correlation time, got {0}")]
    InvalidTau(f64),
    #[error("step {dt} is too coarse for correlation time {tau} (need dt <= tau/10)")]
    StepTooCoarse { dt: f64, tau: f64 },
    #[error("step and final time must be positive and finite")]
    BadTimeGrid,
    #[error("need at least {MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error("initial state lies outside the Bloch ball (|v|^2 = {0})")]
    Unphysical(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `W11 = W13 = 0`; only `β₃` fluctuates, as white noise of strength `w33`.
    Zero,
    /// `W_ij(t) = w_ij δ(t)`.
    White,
    /// `W_ij(t) = w_ij e^{−t/τ}`.
    Exponential,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Zero => "zero",
            Family::White => "white",
            Family::Exponential => "exponential",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "zero" => Some(Family::Zero),
            "white" => Some(Family::White),
            "exponential" => Some(Family::Exponential),
            _ => None,
        }
    }
}

/// Correlation family and amplitudes of `(β₁, β₃)`. `W(t)` is symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationModel {
    family: Family,
    w11: f64,
    w13: f64,
    w33: f64,
    tau: f64,
}

impl CorrelationModel {
    /// `tau` is only read for the exponential family. For the zero family
    /// `w11` and `w13` are forced to 0.
    pub fn new(family: Family, w11: f64, w13: f64, w33: f64, tau: f64) -> Result<Self, StochasticError> {
        let (w11, w13) = if family == Family::Zero { (0.0, 0.0) } else { (w11, w13) };
        if ![w11, w13, w33].iter().all(|w| w.is_finite()) {
            return Err(StochasticError::NonFinite);
        }
        let scale = w11.abs().max(w33.abs()).max(1.0);
        if w11 < -COV_TOL * scale || w33 < -COV_TOL * scale || w11 * w33 - w13 * w13 < -COV_TOL * scale * scale {
            return Err(StochasticError::InvalidCovariance);
        }
        if family == Family::Exponential && !(tau.is_finite() && tau > 0.0) {
            return Err(StochasticError::InvalidTau(tau));
        }
        Ok(CorrelationModel { family, w11, w13, w33, tau })
    }

    pub fn zero(w33: f64) -> Result<Self, StochasticError> {
        Self::new(Family::Zero, 0.0, 0.0, w33, 0.0)
    }

    pub fn white(w11: f64, w13: f64, w33: f64) -> Result<Self, StochasticError> {
        Self::new(Family::White, w11, w13, w33, 0.0)
    }

    pub fn exponential(w11: f64, w13: f64, w33: f64, tau: f64) -> Result<Self, StochasticError> {
        Self::new(Family::Exponential, w11, w13, w33, tau)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn w11(&self) -> f64 {
        self.w11
    }

    pub fn w13(&self) -> f64 {
        self.w13
    }

    pub fn w33(&self) -> f64 {
        self.w33
    }

    pub fn tau(&self) -> Option<f64> {
        (self.family == Family::Exponential).then_some(self.tau)
    }

    /// Lower Cholesky factor of the amplitude covariance.
    fn cholesky(&self) -> [[f64; 2]; 2] {
        let l11 = libm::sqrt(self.w11.max(0.0));
        let l21 = if l11 > 0.0 { self.w13 / l11 } else { 0.0 };
        let l22 = libm::sqrt((self.w33 - l21 * l21).max(0.0));
        [[l11, 0.0], [l21, l22]]
    }
}

/// Markovian coefficients of the averaged generator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpinFieldCoefficients {
    pub c11: f64,
    pub c12: f64,
    pub c13: f64,
    pub c23: f64,
    pub c33: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub b3: f64,
}

impl SpinFieldCoefficients {
    /// The Kossakowski matrix with `c22 = 0`.
    pub fn kossakowski(&self) -> KossakowskiMatrix {
        KossakowskiMatrix(SymMat3::from_six([self.c11, 0.0, self.c33, self.c12, self.c13, self.c23]))
    }
}

/// Closed forms of the coefficient integrals.
///
/// White noise uses `∫₀^∞ δ(s) f(s) ds = f(0)/2`.
pub fn coefficients(model: &CorrelationModel, b3: f64) -> SpinFieldCoefficients {
    let CorrelationModel { w11, w13, w33, tau, .. } = *model;
    let (c11, c12, c13, c23, c33, omega2) = match model.family {
        Family::Zero => (0.0, 0.0, 0.0, 0.0, w33, 0.0),
        Family::White => (w11, 0.0, w13, 0.0, w33, 0.0),
        Family::Exponential => {
            let x = 2.0 * b3 * tau;
            let g = 1.0 + x * x;
            (
                2.0 * w11 * tau / g,
                2.0 * w11 * b3 * tau * tau / g,
                w13 * tau * (1.0 / g + 1.0),
                2.0 * w13 * b3 * tau * tau / g,
                2.0 * w33 * tau,
                w13 * tau * (1.0 / g - 1.0),
            )
        }
    };
    SpinFieldCoefficients { c11, c12, c13, c23, c33, omega1: c23, omega2, omega3: -c12, b3 }
}

/// Sign attached to the frequency shifts `ω_k` in the Hamiltonian part.
///
/// `Published` is the form quoted with the model. `Reversed` flips every
/// `ω_k`; it is the form a second-order cumulant average of the unitary
/// dynamics produces, and it is the one Monte Carlo agrees with when the
/// shifts matter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ShiftConvention {
    #[default]
    Published,
    Reversed,
}

impl ShiftConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShiftConvention::Published => "published",
            ShiftConvention::Reversed => "reversed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "published" => Some(ShiftConvention::Published),
            "reversed" => Some(ShiftConvention::Reversed),
            _ => None,
        }
    }

    fn sign(&self) -> f64 {
        match self {
            ShiftConvention::Published => 1.0,
            ShiftConvention::Reversed => -1.0,
        }
    }
}

/// `(ℋ, 𝒟)` with the control `u` multiplying only `b3`.
pub fn build_spin_generator(coeffs: &SpinFieldCoefficients, u: f64) -> (Mat3, DissipationMatrix) {
    build_spin_generator_with(coeffs, u, ShiftConvention::Published)
}

pub fn build_spin_generator_with(
    coeffs: &SpinFieldCoefficients,
    u: f64,
    convention: ShiftConvention,
) -> (Mat3, DissipationMatrix) {
    let s = convention.sign();
    let (w1, w2, w3) = (s * coeffs.omega1, s * coeffs.omega2, s * coeffs.omega3);
    let z = u * coeffs.b3 + w3;
    let h = Mat3::new(0.0, z, w2, -z, 0.0, w1, -w2, -w1, 0.0) * 2.0;
    (h, dissipation_from_kossakowski(&coeffs.kossakowski()))
}

/// `−(ℋ + 𝒟)` for the averaged spin.
pub fn spin_superop(coeffs: &SpinFieldCoefficients, u: f64, convention: ShiftConvention) -> Superoperator {
    let (h, d) = build_spin_generator_with(coeffs, u, convention);
    Superoperator(-(h + d.matrix()))
}

/// Complete positivity of the averaged generator: `c12 = c23 = 0` and `C ⪰ 0`.
pub fn cp_admissible(coeffs: &SpinFieldCoefficients, tol: f64) -> bool {
    coeffs.c12.abs() < tol && coeffs.c23.abs() < tol && coeffs.kossakowski().0.min_eigenvalue() >= -tol
}

/// Exact rotation of `r` under `dr/dt = 2 b × r` for time `dt`.
fn rotate(r: &Vec3, b: &Vec3, dt: f64) -> Vec3 {
    let nb = b.norm();
    if nb == 0.0 {
        return *r;
    }
    let k = b / nb;
    let theta = 2.0 * nb * dt;
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    r * c + k.cross(r) * s + k * (k.dot(r) * (1.0 - c))
}

fn time_grid(dt: f64, t_final: f64) -> Result<Vec<f64>, StochasticError> {
    if !(dt.is_finite() && dt > 0.0 && t_final.is_finite() && t_final >= 0.0) {
        return Err(StochasticError::BadTimeGrid);
    }
    let n = libm::ceil(t_final / dt - 1e-9).max(0.0) as usize;
    let mut times = Vec::with_capacity(n + 1);
    times.push(0.0);
    for k in 1..=n {
        times.push(if k == n { t_final } else { k as f64 * dt });
    }
    Ok(times)
}

fn check_inputs(model: &CorrelationModel, v0: &CoherenceVector, dt: f64) -> Result<(), StochasticError> {
    if !crate::coherence::is_physical(v0, DEFAULT_PHYSICAL_TOL) {
        return Err(StochasticError::Unphysical(v0.purity()));
    }
    if let Some(tau) = model.tau() {
        if dt > tau / 10.0 {
            return Err(StochasticError::StepTooCoarse { dt, tau });
        }
    }
    Ok(())
}

/// One field realization; fills `out` with the state at every grid time.
fn sample_path(model: &CorrelationModel, b3: f64, u: f64, v0: &CoherenceVector, times: &[f64], rng: &mut ChaCha8Rng, out: &mut Vec<Vec3>) {
    out.clear();
    let l = model.cholesky();
    let normal2 = |rng: &mut ChaCha8Rng| -> [f64; 2] {
        let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
        [l[0][0] * a, l[1][0] * a + l[1][1] * b]
    };
    let mut r = v0.0;
    out.push(r);
    // OU state, drawn from the stationary law.
    let mut x = if model.family == Family::Exponential { normal2(rng) } else { [0.0; 2] };
    for w in times.windows(2) {
        let h = w[1] - w[0];
        let beta = match model.family {
            Family::Exponential => {
                let a = libm::exp(-h / model.tau);
                let q = libm::sqrt((1.0 - a * a).max(0.0));
                let z = normal2(rng);
                let next = [a * x[0] + q * z[0], a * x[1] + q * z[1]];
                let mid = [0.5 * (x[0] + next[0]), 0.5 * (x[1] + next[1])];
                x = next;
                mid
            }
            Family::White | Family::Zero => {
                let z = normal2(rng);
                let s = 1.0 / libm::sqrt(h);
                [z[0] * s, z[1] * s]
            }
        };
        let field = Vec3::new(beta[0], 0.0, u * b3 + beta[1]);
        r = rotate(&r, &field, h);
        out.push(r);
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A single realization of the unitary dynamics in a sampled field.
pub fn mc_sample(
    model: &CorrelationModel,
    b3: f64,
    u: f64,
    v0: &CoherenceVector,
    dt: f64,
    t_final: f64,
    seed: u64,
) -> Result<Trajectory, StochasticError> {
    check_inputs(model, v0, dt)?;
    let times = time_grid(dt, t_final)?;
    let mut path = Vec::new();
    sample_path(model, b3, u, v0, &times, &mut stream_rng(seed, 0), &mut path);
    let mut traj = Trajectory::default();
    for (t, r) in times.iter().zip(&path) {
        traj.push(*t, CoherenceVector(*r), u);
    }
    Ok(traj)
}

/// Ensemble mean against the averaged generator at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    pub mean: [f64; 3],
    pub reference: [f64; 3],
    pub standard_error: [f64; 3],
}

impl Checkpoint {
    pub fn within(&self, k: f64) -> bool {
        (0..3).all(|i| (self.mean[i] - self.reference[i]).abs() <= k * self.standard_error[i] + 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub n_samples: usize,
    /// Largest componentwise deviation over every sampled time.
    pub max_deviation: f64,
    /// Time average of the per-time componentwise maximum deviation.
    pub mean_deviation: f64,
    pub max_standard_error: f64,
    /// Largest `|deviation| / standard error` over the checkpoints.
    pub max_z: f64,
    /// Every checkpoint component lies within three standard errors.
    pub within_3se: bool,
    /// `max_deviation` stays under [`WEAK_COUPLING_BOUND`].
    pub markovian: bool,
    pub checkpoints: Vec<Checkpoint>,
}

/// Averages `n_samples` realizations and compares them with the averaged
/// generator. The reference uses the coefficients at the field actually
/// applied, `u·b3`. Sample `i` draws from stream `i` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn mc_validate(
    model: &CorrelationModel,
    b3: f64,
    u: f64,
    v0: &CoherenceVector,
    dt: f64,
    t_final: f64,
    n_samples: usize,
    seed: u64,
    convention: ShiftConvention,
) -> Result<McReport, StochasticError> {
    if n_samples < MIN_SAMPLES {
        return Err(StochasticError::TooFewSamples(n_samples));
    }
    check_inputs(model, v0, dt)?;
    let times = time_grid(dt, t_final)?;
    let m = times.len();
    let mut sum = alloc::vec![Vec3::zeros(); m];
    let mut sum_sq = alloc::vec![Vec3::zeros(); m];
    let mut path = Vec::with_capacity(m);
    for i in 0..n_samples {
        sample_path(model, b3, u, v0, &times, &mut stream_rng(seed, i as u64), &mut path);
        for (k, r) in path.iter().enumerate() {
            sum[k] += r;
            sum_sq[k] += r.component_mul(r);
        }
    }

    let coeffs = coefficients(model, u * b3);
    let l = spin_superop(&coeffs, 1.0, convention);
    let n = n_samples as f64;
    let mut max_dev: f64 = 0.0;
    let mut dev_total = 0.0;
    let mut max_se: f64 = 0.0;
    let mut max_z: f64 = 0.0;
    let mut checkpoints = Vec::new();
    let mut next_check = 0.0;
    for (k, &t) in times.iter().enumerate() {
        let mean = sum[k] / n;
        let var = (sum_sq[k] / n - mean.component_mul(&mean)).map(|x| x.max(0.0)) * (n / (n - 1.0));
        let se = var.map(|x| libm::sqrt(x / n));
        let reference = propagate(&l, v0, t).0;
        let dev = (mean - reference).abs();
        max_dev = max_dev.max(dev.max());
        dev_total += dev.max();
        max_se = max_se.max(se.max());
        if t >= next_check - 1e-9 || k + 1 == m {
            let cp = Checkpoint { t, mean: mean.into(), reference: reference.into(), standard_error: se.into() };
            for i in 0..3 {
                if se[i] > 0.0 {
                    max_z = max_z.max(dev[i] / se[i]);
                }
            }
            checkpoints.push(cp);
            next_check += CHECKPOINT_SPACING;
        }
    }
    Ok(McReport {
        n_samples,
        max_deviation: max_dev,
        mean_deviation: dev_total / m as f64,
        max_standard_error: max_se,
        max_z,
        within_3se: checkpoints.iter().all(|c| c.within(3.0)),
        markovian: max_dev <= WEAK_COUPLING_BOUND,
        checkpoints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::sz_derivatives;

    /// Adaptive Simpson quadrature.
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
        fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                return left + right + delta / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    /// Quadrature of the coefficient integrands for the exponential family.
    fn quadrature(w11: f64, w13: f64, w33: f64, tau: f64, b3: f64) -> [f64; 6] {
        let upper = 60.0 * tau;
        let q = |g: &dyn Fn(f64) -> f64| simpson(&|s: f64| libm::exp(-s / tau) * g(s), 0.0, upper, 1e-13);
        let w = 2.0 * b3;
        [
            2.0 * w11 * q(&|s| libm::cos(w * s)),
            w11 * q(&|s| libm::sin(w * s)),
            w13 * q(&|s| libm::cos(w * s) + 1.0),
            w13 * q(&|s| libm::sin(w * s)),
            2.0 * w33 * q(&|_| 1.0),
            w13 * q(&|s| libm::cos(w * s) - 1.0),
        ]
    }

    fn as_array(c: &SpinFieldCoefficients) -> [f64; 6] {
        [c.c11, c.c12, c.c13, c.c23, c.c33, c.omega2]
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let mut worst: f64 = 0.0;
        for &tau in &[0.1, 0.5, 1.0, 2.0] {
            for &b3 in &[-1.5, 0.0, 0.3, 1.0, 2.5] {
                let m = CorrelationModel::exponential(1.0, 0.4, 0.8, tau).unwrap();
                let closed = as_array(&coefficients(&m, b3));
                let num = quadrature(1.0, 0.4, 0.8, tau, b3);
                for i in 0..6 {
                    worst = worst.max((closed[i] - num[i]).abs());
                }
            }
        }
        assert!(worst < 1e-10, "{worst:e}");
    }

    #[test]
    fn family_examples() {
        let z = coefficients(&CorrelationModel::zero(0.0).unwrap(), 1.0);
        assert_eq!(as_array(&z), [0.0; 6]);
        assert_eq!((z.omega1, z.omega3), (0.0, 0.0));

        let w = coefficients(&CorrelationModel::white(0.7, 0.0, 0.3).unwrap(), 1.0);
        assert_eq!(as_array(&w), [0.7, 0.0, 0.0, 0.0, 0.3, 0.0]);

        let (w11, w13, w33, tau) = (0.9, 0.2, 0.5, 0.4);
        let e = coefficients(&CorrelationModel::exponential(w11, w13, w33, tau).unwrap(), 0.0);
        assert_eq!(as_array(&e), [2.0 * w11 * tau, 0.0, 2.0 * w13 * tau, 0.0, 2.0 * w33 * tau, 0.0]);
    }

    #[test]
    fn parity_in_field() {
        let m = CorrelationModel::exponential(1.0, 0.3, 0.6, 0.7).unwrap();
        for &b3 in &[0.2, 1.0, 3.0] {
            let p = coefficients(&m, b3);
            let n = coefficients(&m, -b3);
            assert!((p.c12 + n.c12).abs() < 1e-12 && (p.c23 + n.c23).abs() < 1e-12);
            for (a, b) in [(p.c11, n.c11), (p.c13, n.c13), (p.c33, n.c33), (p.omega2, n.omega2)] {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn white_is_short_time_limit() {
        // w_exp = w_white / (2τ).
        let white = coefficients(&CorrelationModel::white(0.8, 0.3, 0.5).unwrap(), 1.0);
        let tau = 1e-7;
        let s = 1.0 / (2.0 * tau);
        let exp = coefficients(&CorrelationModel::exponential(0.8 * s, 0.3 * s, 0.5 * s, tau).unwrap(), 1.0);
        for (a, b) in as_array(&white).iter().zip(as_array(&exp)) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn covariance_validation() {
        assert_eq!(CorrelationModel::white(1.0, 2.0, 1.0), Err(StochasticError::InvalidCovariance));
        assert_eq!(CorrelationModel::white(-1.0, 0.0, 1.0), Err(StochasticError::InvalidCovariance));
        assert!(matches!(CorrelationModel::exponential(1.0, 0.0, 1.0, 0.0), Err(StochasticError::InvalidTau(_))));
        assert!(CorrelationModel::white(1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn generator_examples() {
        let b3 = 1.3;
        let z = coefficients(&CorrelationModel::zero(0.0).unwrap(), b3);
        let (h, d) = build_spin_generator(&z, 1.0);
        assert_eq!(h, Mat3::new(0.0, 2.0 * b3, 0.0, -2.0 * b3, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(d.0, SymMat3::zero());

        let w = coefficients(&CorrelationModel::white(1.0, 0.4, 0.5).unwrap(), b3);
        let (_, d) = build_spin_generator(&w, 0.0);
        assert!((d.0.get(0, 2) + 0.8).abs() < 1e-15);

        let e = coefficients(&CorrelationModel::exponential(1.0, 0.2, 1.0, 0.5).unwrap(), 1.0);
        let (_, d) = build_spin_generator(&e, 1.0);
        let explicit = SymMat3::from_six([e.c33, e.c11 + e.c33, e.c11, -e.c12, -e.c13, -e.c23]) * 2.0;
        assert!(d.0.max_abs_diff(&explicit) < 1e-14);
    }

    #[test]
    fn control_only_scales_field() {
        let e = coefficients(&CorrelationModel::exponential(1.0, 0.2, 1.0, 0.5).unwrap(), 1.0);
        let (h1, d1) = build_spin_generator(&e, 1.0);
        let (h0, d0) = build_spin_generator(&e, 0.0);
        assert_eq!(d0, d1);
        let diff = h1 - h0;
        assert_eq!(diff, Mat3::new(0.0, 2.0, 0.0, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn admissibility() {
        assert!(cp_admissible(&coefficients(&CorrelationModel::zero(0.5).unwrap(), 1.0), 1e-12));
        assert!(cp_admissible(&coefficients(&CorrelationModel::white(1.0, 0.9, 1.0).unwrap(), 1.0), 1e-12));
        assert!(!cp_admissible(&coefficients(&CorrelationModel::exponential(1.0, 0.0, 1.0, 0.5).unwrap(), 1.0), 1e-12));
    }

    #[test]
    fn polarization_rate() {
        let (w13, tau, b3) = (0.2, 0.5, 1.0);
        let e = coefficients(&CorrelationModel::exponential(1.0, w13, 1.0, tau).unwrap(), b3);
        let l = spin_superop(&e, 1.0, ShiftConvention::Published);
        let d1 = sz_derivatives(&l, &CoherenceVector::new(0.5, 0.0, 0.0), 1)[0];
        let x = 2.0 * b3 * tau;
        assert!((d1 - 2.0 * w13 * tau / (1.0 + x * x)).abs() < 1e-12);
        assert!((d1 - (e.omega2 + e.c13)).abs() < 1e-12);
    }

    #[test]
    fn noiseless_sample_is_precession() {
        let m = CorrelationModel::white(0.0, 0.0, 0.0).unwrap();
        let v0 = CoherenceVector::new(0.5, 0.0, 0.0);
        let traj = mc_sample(&m, 0.8, 1.0, &v0, 0.01, 2.0, 1).unwrap();
        for (t, v) in traj.times.iter().zip(&traj.states) {
            let phase = 2.0 * 0.8 * t;
            assert!((v.0[0] - 0.5 * libm::cos(phase)).abs() < 1e-10);
            assert!((v.0[1] - 0.5 * libm::sin(phase)).abs() < 1e-10);
        }
    }

    #[test]
    fn samples_are_unitary() {
        let v0 = CoherenceVector::new(0.3, -0.2, 0.1);
        for m in [CorrelationModel::white(1.0, 0.3, 0.5).unwrap(), CorrelationModel::exponential(1.0, 0.3, 0.5, 0.5).unwrap()] {
            let traj = mc_sample(&m, 1.0, 1.0, &v0, 0.01, 3.0, 9).unwrap();
            for p in &traj.purities {
                assert!((p - v0.purity()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sampler_preconditions() {
        let m = CorrelationModel::exponential(1.0, 0.0, 1.0, 0.5).unwrap();
        let v0 = CoherenceVector::new(0.5, 0.0, 0.0);
        assert!(matches!(mc_sample(&m, 1.0, 1.0, &v0, 0.1, 1.0, 0), Err(StochasticError::StepTooCoarse { .. })));
        assert!(matches!(
            mc_validate(&m, 1.0, 1.0, &v0, 0.01, 1.0, 10, 0, ShiftConvention::Published),
            Err(StochasticError::TooFewSamples(10))
        ));
    }

    #[test]
    fn noiseless_validation_is_exact() {
        let m = CorrelationModel::white(0.0, 0.0, 0.0).unwrap();
        let r = mc_validate(&m, 0.7, 1.0, &CoherenceVector::new(0.5, 0.0, 0.0), 0.01, 5.0, 100, 3, ShiftConvention::Published).unwrap();
        assert!(r.max_deviation < 1e-9);
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = CorrelationModel::exponential(1.0, 0.2, 0.5, 0.5).unwrap();
        let v0 = CoherenceVector::new(0.5, 0.0, 0.0);
        let a = mc_sample(&m, 1.0, 1.0, &v0, 0.01, 1.0, 42).unwrap();
        let b = mc_sample(&m, 1.0, 1.0, &v0, 0.01, 1.0, 42).unwrap();
        assert_eq!(a, b);
    }
}
