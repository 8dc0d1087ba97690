//! Two-level density matrices and their coherence (Bloch) vectors.
//!
//! A density matrix is written `ρ = I/2 + Σ_k ρ_k σ_k` with the Pauli
//! matrices in the fixed order `(σ_x, σ_y, σ_z)`, so that
//! `ρ_k = Tr(ρ σ_k) / 2`. Physical states fill the ball `‖ρ⃗‖ ≤ 1/2`.

use core::fmt;

use nalgebra::{Complex, Matrix2};

use crate::linalg::Vec3;

pub type Complex64 = Complex<f64>;
pub type Mat2c = Matrix2<Complex64>;

/// Default slack on `‖ρ⃗‖²` when deciding Bloch-ball membership.
pub const DEFAULT_PHYSICAL_TOL: f64 = 1e-9;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    TraceNotUnit(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("coherence vector lies outside the Bloch ball (|v|^2 = {0})")]
    Unphysical(f64),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrix `σ_{k+1}` for `k = 0, 1, 2`.
pub fn pauli(k: usize) -> Mat2c {
    let (z, o, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match k {
        0 => Mat2c::new(z, o, o, z),
        1 => Mat2c::new(z, -i, i, z),
        2 => Mat2c::new(o, z, z, -o),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// Coherence vector `ρ⃗ = (ρ_1, ρ_2, ρ_3)`. The constant `ρ_0 = 1/2` is implicit.
///
/// No Bloch-ball invariant is enforced here: propagating under a generator
/// that is not positivity preserving legitimately leaves the ball, and
/// [`is_physical`] is the check.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CoherenceVector(pub Vec3);

impl CoherenceVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        CoherenceVector(Vec3::new(x, y, z))
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    /// `‖ρ⃗‖²`, which is `(2 Tr ρ² − 1) / 4`.
    pub fn purity(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

impl fmt::Display for CoherenceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// A validated 2×2 density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat2c);

impl DensityMatrix {
    pub fn new(entries: Mat2c) -> Result<Self, StateError> {
        let herm = (entries - entries.adjoint())
            .iter()
            .map(|z| libm::sqrt(z.norm_sqr()))
            .fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(StateError::NotHermitian(herm));
        }
        let tr = entries.trace();
        if libm::sqrt((tr - c(1.0, 0.0)).norm_sqr()) > TRACE_TOL {
            return Err(StateError::TraceNotUnit(tr.re));
        }
        let min_ev = hermitian_min_eigenvalue(&entries);
        if min_ev < -PSD_TOL {
            return Err(StateError::NotPositive(min_ev));
        }
        Ok(DensityMatrix(entries))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat2c::identity() * c(0.5, 0.0))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero amplitude pair.
    pub fn pure(psi: [Complex64; 2]) -> Result<Self, StateError> {
        let n2 = psi[0].norm_sqr() + psi[1].norm_sqr();
        let m = Mat2c::from_fn(|i, j| psi[i] * psi[j].conj() / n2);
        Self::new(m)
    }

    pub fn entries(&self) -> &Mat2c {
        &self.0
    }

    /// Components `Tr(ρ σ_k) / 2`.
    pub fn coherence_vector(&self) -> CoherenceVector {
        let comp = |k| (self.0 * pauli(k)).trace().re / 2.0;
        CoherenceVector::new(comp(0), comp(1), comp(2))
    }

    /// Convex combination `a·self + (1 − a)·other`.
    pub fn mix(&self, other: &Self, a: f64) -> Self {
        DensityMatrix(self.0 * c(a, 0.0) + other.0 * c(1.0 - a, 0.0))
    }
}

fn hermitian_min_eigenvalue(m: &Mat2c) -> f64 {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    0.5 * (a + d) - libm::sqrt(0.25 * (a - d) * (a - d) + b.norm_sqr())
}

/// Validates `entries` as a density matrix and returns its coherence vector.
pub fn density_to_coherence(entries: &Mat2c) -> Result<CoherenceVector, StateError> {
    Ok(DensityMatrix::new(*entries)?.coherence_vector())
}

/// `I/2 + Σ_k v_k σ_k`; fails outside the Bloch ball.
pub fn coherence_to_density(v: &CoherenceVector) -> Result<DensityMatrix, StateError> {
    if !is_physical(v, DEFAULT_PHYSICAL_TOL) {
        return Err(StateError::Unphysical(v.purity()));
    }
    let mut m = Mat2c::identity() * c(0.5, 0.0);
    for k in 0..3 {
        m += pauli(k) * c(v.0[k], 0.0);
    }
    // A vector on the sphere within tolerance can give an eigenvalue of
    // order -tol; the constructor's PSD check is stricter than that.
    Ok(DensityMatrix(m))
}

/// Bloch-ball membership: `‖v‖² ≤ 1/4 + tol`.
pub fn is_physical(v: &CoherenceVector, tol: f64) -> bool {
    v.purity() <= 0.25 + tol
}
