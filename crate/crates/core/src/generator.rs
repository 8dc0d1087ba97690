//! Lindblad generators in coherence-vector form.
//!
//! The generator acts on `ρ⃗` as `dρ⃗/dt = −(u·ℋ + 𝒟) ρ⃗`, where `ℋ` is the
//! skew-symmetric Hamiltonian matrix and `𝒟` the symmetric dissipation matrix.
//!
//! Factor-of-two conventions, used verbatim everywhere downstream:
//!
//! * `𝒟 = 2 (I·Tr C − C)` for the Kossakowski matrix `C`;
//! * `ℋ = 2 [[0, h3, −h2], [−h3, 0, h1], [h2, −h1, 0]]` with `h_k = Tr(H σ_k)/2`,
//!   so that `−ℋ ρ⃗ = 2 h⃗ × ρ⃗`.
//!
//! No upper bounds are imposed on coefficient magnitudes.

use crate::linalg::{Mat3, SymMat3, Vec3};

/// Kossakowski (dissipative coefficient) matrix `C`, real symmetric.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct KossakowskiMatrix(pub SymMat3);

/// Dissipation matrix `𝒟` acting on the coherence vector.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DissipationMatrix(pub SymMat3);

/// Hamiltonian coherence vector `h⃗`, `h_k = Tr(H σ_k)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct HamiltonianVector(pub Vec3);

impl KossakowskiMatrix {
    pub fn from_six(six: [f64; 6]) -> Self {
        KossakowskiMatrix(SymMat3::from_six(six))
    }

    pub fn matrix(&self) -> Mat3 {
        self.0.to_matrix()
    }
}

impl DissipationMatrix {
    pub fn from_six(six: [f64; 6]) -> Self {
        DissipationMatrix(SymMat3::from_six(six))
    }

    pub fn matrix(&self) -> Mat3 {
        self.0.to_matrix()
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.0.min_eigenvalue() >= -tol
    }
}

impl HamiltonianVector {
    pub fn new(h1: f64, h2: f64, h3: f64) -> Self {
        HamiltonianVector(Vec3::new(h1, h2, h3))
    }
}

/// The real 3×3 matrix `ℒ` of `dρ⃗/dt = ℒ ρ⃗`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Superoperator(pub Mat3);

impl Superoperator {
    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// Symmetric part, `−𝒟` for a generator built by [`lindblad_superop`].
    pub fn symmetric_part(&self) -> Mat3 {
        (self.0 + self.0.transpose()) * 0.5
    }

    /// Skew part, `−u·ℋ` for a generator built by [`lindblad_superop`].
    pub fn skew_part(&self) -> Mat3 {
        (self.0 - self.0.transpose()) * 0.5
    }
}

/// `𝒟 = 2 (I·Tr C − C)`.
pub fn dissipation_from_kossakowski(c: &KossakowskiMatrix) -> DissipationMatrix {
    let tr = c.0.trace();
    DissipationMatrix((SymMat3::identity() * tr - c.0) * 2.0)
}

/// Inverse map, `C = (Tr 𝒟 / 4)·I − 𝒟/2`.
pub fn kossakowski_from_dissipation(d: &DissipationMatrix) -> KossakowskiMatrix {
    let tr = d.0.trace();
    KossakowskiMatrix(SymMat3::identity() * (tr / 4.0) - d.0 * 0.5)
}

pub fn hamiltonian_matrix(h: &HamiltonianVector) -> Mat3 {
    let (h1, h2, h3) = (h.0[0], h.0[1], h.0[2]);
    Mat3::new(0.0, h3, -h2, -h3, 0.0, h1, h2, -h1, 0.0) * 2.0
}

/// `ℒ(u) = −(u·ℋ + 𝒟)`.
pub fn lindblad_superop(h: &HamiltonianVector, d: &DissipationMatrix, u: f64) -> Superoperator {
    Superoperator(-(hamiltonian_matrix(h) * u + d.matrix()))
}

/// Multi-control generator `−(ℋ_0 + Σ_i u_i ℋ_i + 𝒟)`.
pub fn controlled_superop(
    drift: &HamiltonianVector,
    controls: &[(HamiltonianVector, f64)],
    d: &DissipationMatrix,
) -> Superoperator {
    let mut h = hamiltonian_matrix(drift);
    for (hi, ui) in controls {
        h += hamiltonian_matrix(hi) * *ui;
    }
    Superoperator(-(h + d.matrix()))
}

/// Splits a generator matrix into `(ℋ, 𝒟)` with `ℒ = −(ℋ + 𝒟)`.
pub fn split_generator(l: &Superoperator) -> (Mat3, DissipationMatrix) {
    let d = DissipationMatrix(SymMat3::from_matrix(&(-l.symmetric_part())));
    (-l.skew_part(), d)
}
