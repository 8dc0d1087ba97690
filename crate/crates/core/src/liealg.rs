//! Lie closure of real 3×3 generator sets and the rank-condition verdict.
//!
//! Matrices are compared under the trace inner product `⟨X, Y⟩ = Tr(XᵀY)`.

use alloc::vec::Vec;

use crate::cones::{Cone, ConeError, ParamSubspace};
use crate::generator::{dissipation_from_kossakowski, hamiltonian_matrix, DissipationMatrix, HamiltonianVector, KossakowskiMatrix};
use crate::linalg::Mat3;

/// Default admission threshold, relative to the candidate's norm.
pub const DEFAULT_LIE_TOL: f64 = 1e-9;
/// Brackets below this fraction of the largest input norm count as zero.
const ZERO_BRACKET: f64 = 1e-12;
const TRACELESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LieError {
    #[error("parameters are not {0:?}-feasible (min eigenvalue {1:e})")]
    InfeasibleParameters(Cone, f64),
    #[error(transparent)]
    Subspace(#[from] ConeError),
}

/// Commutator `xy − yx`.
pub fn bracket(x: &Mat3, y: &Mat3) -> Mat3 {
    x * y - y * x
}

/// Canonical matrix unit `E_ij` (zero-based indices).
pub fn matrix_unit(i: usize, j: usize) -> Mat3 {
    let mut m = Mat3::zeros();
    m[(i, j)] = 1.0;
    m
}

fn inner(x: &Mat3, y: &Mat3) -> f64 {
    x.component_mul(y).sum()
}

/// An orthonormal basis of the Lie algebra generated by some matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LieClosure {
    pub basis: Vec<Mat3>,
    pub dim: usize,
    pub is_transitive: bool,
}

impl LieClosure {
    /// Part of `x` orthogonal to the span.
    pub fn residual(&self, x: &Mat3) -> Mat3 {
        residual(&self.basis, x)
    }

    /// Whether `x` lies in the span, relative to its norm.
    pub fn contains(&self, x: &Mat3, tol: f64) -> bool {
        self.residual(x).norm() <= tol * x.norm().max(f64::MIN_POSITIVE)
    }

    /// Whether every element of `other` lies in this span.
    pub fn contains_all(&self, other: &[Mat3], tol: f64) -> bool {
        other.iter().all(|x| self.contains(x, tol))
    }
}

fn residual(basis: &[Mat3], x: &Mat3) -> Mat3 {
    let mut r = *x;
    // Twice for numerical orthogonality.
    for _ in 0..2 {
        for b in basis {
            r -= b * inner(b, &r);
        }
    }
    r
}

/// Lie algebra generated by `generators`.
///
/// Candidates are admitted when their residual after projection exceeds
/// `tol·‖candidate‖`. New elements are bracketed against the whole basis,
/// breadth first, until nothing new appears.
pub fn lie_closure(generators: &[Mat3], tol: f64) -> LieClosure {
    let scale = generators.iter().map(|g| g.norm()).fold(0.0, f64::max);
    let mut basis: Vec<Mat3> = Vec::new();
    let admit = |basis: &mut Vec<Mat3>, x: &Mat3| -> bool {
        if basis.len() >= 9 {
            return false;
        }
        let nx = x.norm();
        if nx <= ZERO_BRACKET * scale || nx == 0.0 {
            return false;
        }
        let r = residual(basis, x);
        let nr = r.norm();
        if nr > tol * nx {
            basis.push(r / nr);
            true
        } else {
            false
        }
    };
    for g in generators {
        admit(&mut basis, g);
    }
    let mut frontier = 0;
    while frontier < basis.len() {
        let end = basis.len();
        for i in frontier..end {
            let mut j = 0;
            while j < basis.len() {
                let b = bracket(&basis[i], &basis[j]);
                admit(&mut basis, &b);
                j += 1;
            }
        }
        frontier = end;
    }
    let dim = basis.len();
    let mut closure = LieClosure { basis, dim, is_transitive: false };
    closure.is_transitive = accessibility_verdict(&closure);
    closure
}

/// Rank condition: the closure is `gl(3)` or `sl(3)`.
pub fn accessibility_verdict(closure: &LieClosure) -> bool {
    closure.dim == 9
        || (closure.dim == 8 && closure.basis.iter().all(|b| b.trace().abs() <= TRACELESS_TOL))
}

/// `{𝒟, ℋ + 𝒟}` for a single control switching the Hamiltonian on and off.
pub fn controlled_generators(h: &HamiltonianVector, d: &DissipationMatrix) -> [Mat3; 2] {
    let dm = d.matrix();
    [dm, hamiltonian_matrix(h) + dm]
}

/// `{ℋ_0 + 𝒟, ℋ_1, …, ℋ_m}` for drift plus several controls.
pub fn drift_control_generators(
    drift: &HamiltonianVector,
    controls: &[HamiltonianVector],
    d: &DissipationMatrix,
) -> Vec<Mat3> {
    let mut out = Vec::with_capacity(controls.len() + 1);
    out.push(hamiltonian_matrix(drift) + d.matrix());
    out.extend(controls.iter().map(hamiltonian_matrix));
    out
}

/// Accessibility under positivity and under complete positivity for one
/// parameter subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessReport {
    pub dim_p: usize,
    pub dim_cp: usize,
    pub accessible_p: bool,
    pub accessible_cp: bool,
    pub basis_p: Vec<Mat3>,
    pub basis_cp: Vec<Mat3>,
    /// The two verdicts disagree.
    pub differ: bool,
}

/// Builds both generators from `theta_p` and `theta_cp` in `v` and compares
/// the closures of `{𝒟, ℋ + 𝒟}`. Each coordinate set must be feasible for
/// its cone within `feas_tol`.
pub fn compare_accessibility(
    v: &ParamSubspace,
    h: &HamiltonianVector,
    theta_p: &[f64],
    theta_cp: &[f64],
    feas_tol: f64,
    lie_tol: f64,
) -> Result<AccessReport, LieError> {
    let closure = |theta: &[f64], cone: Cone| -> Result<LieClosure, LieError> {
        let c = v.point(theta)?;
        let m = cone.test_matrix(&c).min_eigenvalue();
        if m < -feas_tol {
            return Err(LieError::InfeasibleParameters(cone, m));
        }
        let d = dissipation_from_kossakowski(&KossakowskiMatrix(c));
        Ok(lie_closure(&controlled_generators(h, &d), lie_tol))
    };
    let p = closure(theta_p, Cone::Positive)?;
    let cp = closure(theta_cp, Cone::CompletelyPositive)?;
    Ok(AccessReport {
        dim_p: p.dim,
        dim_cp: cp.dim,
        accessible_p: p.is_transitive,
        accessible_cp: cp.is_transitive,
        differ: p.is_transitive != cp.is_transitive,
        basis_p: p.basis,
        basis_cp: cp.basis,
    })
}
