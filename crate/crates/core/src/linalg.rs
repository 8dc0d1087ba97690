//! Small dense linear algebra shared by every module.
//!
//! All objects in this crate are 3×3 (or 6-vectors identifying symmetric
//! 3×3 matrices), so everything here is written for those fixed sizes.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3, Vector6};

pub type Mat3 = Matrix3<f64>;
pub type Vec3 = Vector3<f64>;
pub type Vec6 = Vector6<f64>;

/// Real symmetric 3×3 matrix.
///
/// Stored once per entry pair in the order `(c11, c22, c33, c12, c13, c23)`,
/// which is also the serialized 6-vector form used by every file format.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SymMat3([f64; 6]);

impl SymMat3 {
    pub const fn from_six(entries: [f64; 6]) -> Self {
        SymMat3(entries)
    }

    pub const fn zero() -> Self {
        SymMat3([0.0; 6])
    }

    pub const fn identity() -> Self {
        SymMat3([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    }

    pub const fn diag(a: f64, b: f64, c: f64) -> Self {
        SymMat3([a, b, c, 0.0, 0.0, 0.0])
    }

    /// Symmetric matrix unit: `E_ii` for `i == j`, otherwise `E_ij + E_ji`.
    /// Indices are zero-based.
    pub fn unit(i: usize, j: usize) -> Self {
        let mut six = [0.0; 6];
        six[Self::slot(i, j)] = 1.0;
        SymMat3(six)
    }

    fn slot(i: usize, j: usize) -> usize {
        match (i.min(j), i.max(j)) {
            (0, 0) => 0,
            (1, 1) => 1,
            (2, 2) => 2,
            (0, 1) => 3,
            (0, 2) => 4,
            (1, 2) => 5,
            _ => panic!("symmetric matrix index ({i}, {j}) out of range"),
        }
    }

    /// Builds from a dense matrix, averaging the two off-diagonal triangles.
    pub fn from_matrix(m: &Mat3) -> Self {
        let off = |i: usize, j: usize| 0.5 * (m[(i, j)] + m[(j, i)]);
        SymMat3([m[(0, 0)], m[(1, 1)], m[(2, 2)], off(0, 1), off(0, 2), off(1, 2)])
    }

    pub fn six(&self) -> [f64; 6] {
        self.0
    }

    pub fn as_vec6(&self) -> Vec6 {
        Vec6::from_row_slice(&self.0)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[Self::slot(i, j)]
    }

    pub fn to_matrix(&self) -> Mat3 {
        let [a, b, c, ab, ac, bc] = self.0;
        Mat3::new(a, ab, ac, ab, b, bc, ac, bc, c)
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    /// Euclidean norm of the 6-vector form.
    pub fn norm6(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|x| x * x).sum())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let ev = self.to_matrix().symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2]];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn eigen(&self) -> SymmetricEigen<f64, nalgebra::U3> {
        self.to_matrix().symmetric_eigen()
    }

    /// `Oᵀ S O`.
    pub fn conjugate(&self, o: &Mat3) -> Self {
        Self::from_matrix(&(o.transpose() * self.to_matrix() * o))
    }

    pub fn quadratic_form(&self, w: &Vec3) -> f64 {
        w.dot(&(self.to_matrix() * w))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Add for SymMat3 {
    type Output = SymMat3;
    fn add(self, rhs: SymMat3) -> SymMat3 {
        let mut out = self.0;
        out.iter_mut().zip(rhs.0).for_each(|(a, b)| *a += b);
        SymMat3(out)
    }
}

impl Sub for SymMat3 {
    type Output = SymMat3;
    fn sub(self, rhs: SymMat3) -> SymMat3 {
        self + (-rhs)
    }
}

impl Neg for SymMat3 {
    type Output = SymMat3;
    fn neg(self) -> SymMat3 {
        self * -1.0
    }
}

impl Mul<f64> for SymMat3 {
    type Output = SymMat3;
    fn mul(self, k: f64) -> SymMat3 {
        SymMat3(self.0.map(|x| x * k))
    }
}

/// Singular values of the matrix whose columns are `vectors`, descending.
pub fn singular_values(vectors: &[Vec6]) -> Vec<f64> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_fn(6, vectors.len(), |r, c| vectors[c][r]);
    let mut sv: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank of a collection of 6-vectors: each vector is normalized,
/// then singular values above `rel * largest` are counted.
pub fn numerical_rank(vectors: &[Vec6], rel: f64) -> usize {
    let unit: Vec<Vec6> = vectors
        .iter()
        .filter(|v| v.norm() > 0.0)
        .map(|v| v / v.norm())
        .collect();
    let sv = singular_values(&unit);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > rel * top).count(),
        _ => 0,
    }
}

pub(crate) fn normalize(x: &mut [f64]) -> f64 {
    let n = libm::sqrt(x.iter().map(|v| v * v).sum());
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}
