//! Positivity and complete-positivity cones over a parameter subspace.
//!
//! A phenomenological model fixes which entries of the Kossakowski matrix
//! `C` are free; that is a linear subspace `𝒱` of the 6-dimensional space
//! of real symmetric 3×3 matrices. Complete positivity asks `C ⪰ 0`,
//! positivity asks `𝒟(C) ⪰ 0`. Intersecting `𝒱` with each cone and looking
//! at the spans of the intersections gives the case label and the
//! dimensions `n_p`, `n_cp`.
//!
//! Everything reduces to smallest eigenvalues of 3×3 matrices, so the
//! feasibility questions are answered by direct search over the unit sphere
//! of subspace coordinates: a dense grid for `n ≤ 3` plus seeded
//! multistart pattern-search ascent of `λ_min`, followed by projection of
//! boundary points onto the face they touch.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::generator::{dissipation_from_kossakowski, KossakowskiMatrix};
use crate::linalg::{normalize, numerical_rank, singular_values, Mat3, SymMat3, Vec3, Vec6};

/// Search and threshold settings for the cone analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Feasibility slack on `λ_min`.
    pub tol: f64,
    /// Upper edge of the band `[−tol, boundary_band]` treated as "on the boundary".
    pub boundary_band: f64,
    /// Relative singular-value threshold for span dimensions.
    pub rank_rel: f64,
    /// Grid size on the coordinate sphere (used for `n = 2, 3`).
    pub grid_points: usize,
    pub multistarts: usize,
    /// Random coordinate draws for the isotropic-span split test.
    pub draws: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            tol: 1e-9,
            boundary_band: 1e-6,
            rank_rel: 1e-7,
            grid_points: 10_000,
            multistarts: 200,
            draws: 32,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConeError {
    #[error("parameter subspace needs at least one basis element")]
    EmptyBasis,
    #[error("parameter subspace has {0} basis elements, at most 6 allowed")]
    TooManyElements(usize),
    #[error("basis elements are linearly dependent (smallest singular value {0:e})")]
    DependentBasis(f64),
    #[error("expected {expected} coordinates, got {got}")]
    CoordinateMismatch { expected: usize, got: usize },
    #[error("no local ascent converged for the {0} cone")]
    OptimizationFailed(Cone),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cone {
    /// `𝒟(C) ⪰ 0`.
    Positive,
    /// `C ⪰ 0`.
    CompletelyPositive,
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cone::Positive => "positive",
            Cone::CompletelyPositive => "completely positive",
        })
    }
}

impl Cone {
    /// The matrix whose semidefiniteness defines membership.
    pub fn test_matrix(&self, c: &SymMat3) -> SymMat3 {
        match self {
            Cone::CompletelyPositive => *c,
            Cone::Positive => dissipation_from_kossakowski(&KossakowskiMatrix(*c)).0,
        }
    }
}

/// `λ_min(C) ≥ −tol`.
pub fn is_completely_positive(c: &KossakowskiMatrix, tol: f64) -> bool {
    c.0.min_eigenvalue() >= -tol
}

/// `λ_min(𝒟(C)) ≥ −tol`.
pub fn is_positive(c: &KossakowskiMatrix, tol: f64) -> bool {
    dissipation_from_kossakowski(c).0.min_eigenvalue() >= -tol
}

/// Linear subspace of symmetric matrices spanned by a basis `B_1..B_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSubspace {
    basis: Vec<SymMat3>,
}

impl ParamSubspace {
    pub fn new(basis: Vec<SymMat3>) -> Result<Self, ConeError> {
        match basis.len() {
            0 => return Err(ConeError::EmptyBasis),
            n if n > 6 => return Err(ConeError::TooManyElements(n)),
            _ => {}
        }
        let cols: Vec<Vec6> = basis.iter().map(SymMat3::as_vec6).collect();
        let sv = singular_values(&cols);
        let smallest = sv.get(basis.len() - 1).copied().unwrap_or(0.0);
        if smallest <= 1e-10 * sv[0].max(1.0) {
            return Err(ConeError::DependentBasis(smallest));
        }
        Ok(ParamSubspace { basis })
    }

    pub fn from_six_rows(rows: &[[f64; 6]]) -> Result<Self, ConeError> {
        Self::new(rows.iter().copied().map(SymMat3::from_six).collect())
    }

    /// Subspace in which exactly the listed entries `(i, j)` (zero-based) are free.
    pub fn free_entries(entries: &[(usize, usize)]) -> Result<Self, ConeError> {
        Self::new(entries.iter().map(|&(i, j)| SymMat3::unit(i, j)).collect())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SymMat3] {
        &self.basis
    }

    /// `Σ_k x_k B_k`.
    pub fn point(&self, coords: &[f64]) -> Result<SymMat3, ConeError> {
        if coords.len() != self.dim() {
            return Err(ConeError::CoordinateMismatch { expected: self.dim(), got: coords.len() });
        }
        Ok(self.combine(coords))
    }

    fn combine(&self, coords: &[f64]) -> SymMat3 {
        self.basis
            .iter()
            .zip(coords)
            .fold(SymMat3::zero(), |acc, (b, &x)| acc + *b * x)
    }

    /// Every basis element conjugated by the same orthogonal `O`: `Oᵀ B O`.
    pub fn conjugated(&self, o: &Mat3) -> Self {
        ParamSubspace { basis: self.basis.iter().map(|b| b.conjugate(o)).collect() }
    }
}

/// Best value of `λ_min` over the coordinate sphere and the feasible points found.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibleExtent {
    pub extent: f64,
    /// Coordinates (unit norm) where `extent` was attained.
    pub argmax: Vec<f64>,
    /// Feasible members of `𝒱` (as Kossakowski matrices) found by the search.
    pub witnesses: Vec<SymMat3>,
}

struct Objective<'a> {
    space: &'a ParamSubspace,
    cone: Cone,
}

impl Objective<'_> {
    fn value(&self, unit: &[f64]) -> f64 {
        self.cone.test_matrix(&self.space.combine(unit)).min_eigenvalue()
    }

    fn test_matrices(&self) -> Vec<SymMat3> {
        self.space.basis.iter().map(|b| self.cone.test_matrix(b)).collect()
    }
}

struct Ascent {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

const MIN_STEP: f64 = 1e-12;
const MAX_EVALS: usize = 40_000;

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if normalize(&mut x) > 1e-12 {
            return x;
        }
    }
}

/// Pattern-search ascent of `λ_min` on the unit sphere. Polls coordinate
/// directions and fresh random directions, doubling the step on success and
/// halving it otherwise.
fn ascend(obj: &Objective<'_>, start: &[f64], rng: &mut ChaCha8Rng) -> Ascent {
    let n = start.len();
    let mut x = start.to_vec();
    normalize(&mut x);
    let mut value = obj.value(&x);
    let mut step = 0.25;
    let mut evals = 1;
    let mut cand = vec![0.0; n];
    while step > MIN_STEP && evals < MAX_EVALS {
        let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(4 * n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            dirs.push(e);
        }
        for _ in 0..n {
            dirs.push(random_unit(rng, n));
        }
        let mut improved = false;
        'poll: for d in &dirs {
            for sign in [1.0, -1.0] {
                for ((c, xi), di) in cand.iter_mut().zip(&x).zip(d) {
                    *c = xi + sign * step * di;
                }
                if normalize(&mut cand) == 0.0 {
                    continue;
                }
                let v = obj.value(&cand);
                evals += 1;
                if v > value {
                    x.copy_from_slice(&cand);
                    value = v;
                    improved = true;
                    break 'poll;
                }
            }
        }
        step = if improved { (step * 2.0).min(0.5) } else { step * 0.5 };
    }
    Ascent { x, value, converged: step <= MIN_STEP }
}

/// Deterministic near-uniform points on the coordinate sphere for `n ≤ 3`.
fn sphere_grid(n: usize, count: usize) -> Vec<Vec<f64>> {
    use core::f64::consts::PI;
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / count as f64;
                vec![libm::cos(t), libm::sin(t)]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - libm::sqrt(5.0));
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = libm::sqrt((1.0 - z * z).max(0.0));
                    let phi = golden * k as f64;
                    vec![r * libm::cos(phi), r * libm::sin(phi), z]
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

/// Coordinates of the smallest face of the cone that contains the feasible
/// `candidates`.
///
/// The normalized sum of the candidates lies in the relative interior of
/// their convex hull, so the kernel `V` of its test matrix is the common
/// kernel of the face. The face, intersected with the subspace, is the
/// linear set `{x : T(x) V = 0}`. Returns an orthonormal coordinate basis
/// of that set and the projected center.
fn face_of(tests: &[SymMat3], obj: &Objective<'_>, candidates: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = tests.len();
    let mut center = vec![0.0; n];
    for c in candidates {
        center.iter_mut().zip(c).for_each(|(a, b)| *a += b);
    }
    normalize(&mut center);

    let eig = obj.cone.test_matrix(&obj.space.combine(&center)).eigen();
    let scale = eig.eigenvalues.max().max(1e-300);
    let kernel: Vec<Vec3> = (0..3)
        .filter(|&i| eig.eigenvalues[i] <= 1e-6 * scale)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();

    let identity = || (0..n).map(|k| {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        e
    }).collect::<Vec<_>>();
    if kernel.is_empty() {
        return (identity(), center);
    }
    // Constraint matrix of x ↦ T(x) V, its Gram matrix, and the null space.
    let rows = 3 * kernel.len();
    let a = DMatrix::from_fn(rows, n, |r, col| (tests[col].to_matrix() * kernel[r / 3])[r % 3]);
    let gram = a.transpose() * &a;
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.max().max(0.0);
    let basis_scale = tests.iter().map(SymMat3::norm6).fold(0.0, f64::max);
    let thr = (1e-6 * libm::sqrt(top).max(basis_scale)).powi(2);
    let face: Vec<Vec<f64>> = (0..n)
        .filter(|&i| eig.eigenvalues[i] <= thr)
        .map(|i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    let mut projected = vec![0.0; n];
    for f in &face {
        let dot: f64 = f.iter().zip(&center).map(|(a, b)| a * b).sum();
        projected.iter_mut().zip(f).for_each(|(p, fi)| *p += dot * fi);
    }
    normalize(&mut projected);
    (face, projected)
}

fn project_onto(face: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for f in face {
        let dot: f64 = f.iter().zip(x).map(|(a, b)| a * b).sum();
        y.iter_mut().zip(f).for_each(|(p, fi)| *p += dot * fi);
    }
    y
}

/// Maximal `λ_min` of the cone's test matrix over unit coordinate vectors,
/// with the feasible points found along the way.
pub fn feasible_extent(space: &ParamSubspace, cone: Cone) -> Result<FeasibleExtent, ConeError> {
    feasible_extent_with(space, cone, &SearchConfig::default())
}

pub fn feasible_extent_with(
    space: &ParamSubspace,
    cone: Cone,
    cfg: &SearchConfig,
) -> Result<FeasibleExtent, ConeError> {
    let n = space.dim();
    let obj = Objective { space, cone };
    let tests = obj.test_matrices();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ cone_salt(cone));

    let grid: Vec<(Vec<f64>, f64)> = sphere_grid(n, cfg.grid_points.max(1))
        .into_iter()
        .map(|x| {
            let v = obj.value(&x);
            (x, v)
        })
        .collect();

    let mut best: (Vec<f64>, f64) = (vec![0.0; n], f64::NEG_INFINITY);
    let mut endpoints: Vec<(Vec<f64>, f64)> = Vec::new();

    if n == 1 {
        // The sphere is {+1, −1}; the grid is exhaustive.
        endpoints.extend(grid.iter().cloned());
    } else {
        let mut seeds: Vec<Vec<f64>> = {
            let mut ranked: Vec<&(Vec<f64>, f64)> = grid.iter().collect();
            ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
            ranked.iter().take(20).map(|(x, _)| x.clone()).collect()
        };
        seeds.extend((0..cfg.multistarts).map(|_| random_unit(&mut rng, n)));
        let mut any_converged = false;
        for s in &seeds {
            let a = ascend(&obj, s, &mut rng);
            any_converged |= a.converged;
            endpoints.push((a.x, a.value));
        }
        if !any_converged {
            return Err(ConeError::OptimizationFailed(cone));
        }
    }
    for (x, v) in grid.iter().chain(endpoints.iter()) {
        if *v > best.1 {
            best = (x.clone(), *v);
        }
    }
    let extent = best.1;

    let mut witnesses: Vec<Vec<f64>> = Vec::new();
    if extent >= -cfg.tol {
        let candidates: Vec<Vec<f64>> = endpoints
            .iter()
            .chain(grid.iter())
            .filter(|(_, v)| *v >= -cfg.tol)
            .map(|(x, _)| x.clone())
            .collect();
        let (face, center) = face_of(&tests, &obj, &candidates);
        if !face.is_empty() && obj.value(&center) >= -cfg.tol {
            witnesses.push(center.clone());
            // The center is relatively interior, so small moves inside the
            // face stay feasible; these span the face.
            for f in &face {
                for sign in [1.0, -1.0] {
                    let mut eps = 0.5;
                    while eps > 1e-8 {
                        let mut y: Vec<f64> = center.iter().zip(f).map(|(c, fi)| c + sign * eps * fi).collect();
                        if normalize(&mut y) > 0.0 && obj.value(&y) >= -cfg.tol {
                            witnesses.push(y);
                            break;
                        }
                        eps *= 0.5;
                    }
                }
            }
            for c in &candidates {
                let mut y = project_onto(&face, c);
                if normalize(&mut y) > 1e-6 && obj.value(&y) >= -cfg.tol {
                    witnesses.push(y);
                }
            }
        } else {
            witnesses = candidates;
        }
    }
    dedup_points(&mut witnesses);
    Ok(FeasibleExtent {
        extent,
        argmax: best.0,
        witnesses: witnesses.iter().map(|x| space.combine(x)).collect(),
    })
}

fn cone_salt(cone: Cone) -> u64 {
    match cone {
        Cone::Positive => 0x9e37_79b9_7f4a_7c15,
        Cone::CompletelyPositive => 0xc2b2_ae3d_27d4_eb4f,
    }
}

fn dedup_points(points: &mut Vec<Vec<f64>>) {
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points.drain(..) {
        let dup = kept.iter().any(|q| {
            p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) < 1e-9
        });
        if !dup {
            kept.push(p);
        }
    }
    *points = kept;
}

/// The six intersection patterns of a subspace with the two cones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    /// Only the null matrix is positive.
    One,
    /// Positive members exist, all on the boundary; no completely positive members.
    TwoA,
    /// Positive members in the interior; no completely positive members.
    TwoB,
    /// Both kinds exist, both only on the boundaries.
    ThreeA,
    /// Positive members in the interior, completely positive only on the boundary.
    ThreeB,
    /// Both kinds reach the interiors.
    ThreeC,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::One => "1",
            CaseLabel::TwoA => "2a",
            CaseLabel::TwoB => "2b",
            CaseLabel::ThreeA => "3a",
            CaseLabel::ThreeB => "3b",
            CaseLabel::ThreeC => "3c",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "1" => CaseLabel::One,
            "2a" => CaseLabel::TwoA,
            "2b" => CaseLabel::TwoB,
            "3a" => CaseLabel::ThreeA,
            "3b" => CaseLabel::ThreeB,
            "3c" => CaseLabel::ThreeC,
            _ => return None,
        })
    }

    /// Whether `(n, n_p, n_cp)` respects the dimension table for this case.
    pub fn admits(&self, n: usize, n_p: usize, n_cp: usize) -> bool {
        let ordered = n_cp <= n_p && n_p <= n;
        ordered
            && match self {
                CaseLabel::One => n <= 5 && n_p == 0 && n_cp == 0,
                CaseLabel::TwoA => n <= 5 && n_p <= 3 && n_cp == 0,
                CaseLabel::TwoB => n <= 5 && n_p == n && n_cp == 0,
                CaseLabel::ThreeA => n <= 4 && n_p <= 2 && n_cp == 1,
                CaseLabel::ThreeB => n <= 5 && n_p == n && n_cp <= 3,
                CaseLabel::ThreeC => n_p == n && n_cp == n,
            }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeAnalysis {
    pub case_label: CaseLabel,
    pub n: usize,
    pub n_p: usize,
    pub n_cp: usize,
    pub witnesses_p: Vec<SymMat3>,
    pub witnesses_cp: Vec<SymMat3>,
    pub extent_p: f64,
    pub extent_cp: f64,
    /// Set when an extent falls inside the boundary band without being a
    /// numerical zero, so the boundary verdict is not clear-cut.
    pub ambiguous: bool,
}

pub fn classify_subspace(space: &ParamSubspace) -> Result<ConeAnalysis, ConeError> {
    classify_subspace_with(space, &SearchConfig::default())
}

pub fn classify_subspace_with(
    space: &ParamSubspace,
    cfg: &SearchConfig,
) -> Result<ConeAnalysis, ConeError> {
    let p = feasible_extent_with(space, Cone::Positive, cfg)?;
    let cp = feasible_extent_with(space, Cone::CompletelyPositive, cfg)?;

    let nonzero = |e: f64| e >= -cfg.tol;
    let boundary = |e: f64| e <= cfg.boundary_band;
    let fuzzy = |e: f64| e > cfg.tol && e <= cfg.boundary_band;

    let (p_on, cp_on) = (nonzero(p.extent), nonzero(cp.extent));
    let (p_bd, cp_bd) = (boundary(p.extent), boundary(cp.extent));
    let mut ambiguous = (p_on && fuzzy(p.extent)) || (cp_on && fuzzy(cp.extent));

    let case_label = match (p_on, cp_on) {
        (false, _) => CaseLabel::One,
        (true, false) if p_bd => CaseLabel::TwoA,
        (true, false) => CaseLabel::TwoB,
        (true, true) => match (p_bd, cp_bd) {
            (true, true) => CaseLabel::ThreeA,
            (false, true) => CaseLabel::ThreeB,
            (false, false) => CaseLabel::ThreeC,
            (true, false) => {
                // An interior completely positive point is interior for
                // positivity too; only numerical noise lands here.
                ambiguous = true;
                CaseLabel::ThreeA
            }
        },
    };

    let witnesses_cp = if cp_on { cp.witnesses } else { Vec::new() };
    let mut witnesses_p = if p_on { p.witnesses } else { Vec::new() };
    // S_cp ⊆ S_p.
    witnesses_p.extend(witnesses_cp.iter().copied());

    let rank = |w: &[SymMat3]| {
        let v: Vec<Vec6> = w.iter().map(SymMat3::as_vec6).collect();
        numerical_rank(&v, cfg.rank_rel)
    };
    let n_p = rank(&witnesses_p);
    let n_cp = rank(&witnesses_cp);

    Ok(ConeAnalysis {
        case_label,
        n: space.dim(),
        n_p,
        n_cp,
        witnesses_p,
        witnesses_cp,
        extent_p: p.extent,
        extent_cp: cp.extent,
        ambiguous,
    })
}

/// Span of the directions on which every quadratic form `wᵀ B_k w` vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotropicSpan {
    /// Orthonormal basis, built by Gram–Schmidt from the isotropic directions
    /// in the order found (mutually orthogonal directions pass unchanged).
    pub k_basis: Vec<Vec3>,
    pub k_dim: usize,
}

/// Levenberg–Marquardt on the residuals `wᵀ B̂_k w` and `wᵀw − 1`.
fn isotropic_solve(forms: &[Mat3], start: Vec3) -> Option<Vec3> {
    let residuals = |w: &Vec3| -> Vec<f64> {
        let mut r: Vec<f64> = forms.iter().map(|b| w.dot(&(b * w))).collect();
        r.push(w.norm_squared() - 1.0);
        r
    };
    let cost = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
    let mut w = start.normalize();
    let mut r = residuals(&w);
    let mut mu = 1e-3;
    for _ in 0..200 {
        if r[..forms.len()].iter().all(|x| x.abs() < 1e-13) {
            return Some(w.normalize());
        }
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vec3::zeros();
        for (k, b) in forms.iter().enumerate() {
            let g = (b + b.transpose()) * w;
            jtj += g * g.transpose();
            jtr += g * r[k];
        }
        let g = w * 2.0;
        jtj += g * g.transpose();
        jtr += g * r[forms.len()];

        let mut accepted = false;
        for _ in 0..30 {
            let lhs = jtj + Matrix3::identity() * mu;
            let Some(step) = lhs.cholesky().map(|ch| ch.solve(&(-jtr))) else {
                mu *= 10.0;
                continue;
            };
            let trial = (w + step).normalize();
            let rt = residuals(&trial);
            if cost(&rt) < cost(&r) {
                w = trial;
                r = rt;
                mu = (mu / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    let ok = r[..forms.len()].iter().all(|x| x.abs() < 1e-10);
    ok.then(|| w.normalize())
}

/// Multistart search for isotropic directions, deflating each start
/// against the directions already found.
pub fn isotropic_span(space: &ParamSubspace) -> IsotropicSpan {
    isotropic_span_with(space, &SearchConfig::default())
}

pub fn isotropic_span_with(space: &ParamSubspace, cfg: &SearchConfig) -> IsotropicSpan {
    let forms: Vec<Mat3> = space
        .basis
        .iter()
        .map(|b| b.to_matrix() / b.norm6().max(1e-300))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1507_7091);
    // The common kernel of the forms is isotropic exactly. Directions there
    // are double roots of every residual, so the solver only finds them to
    // about the square root of machine precision; take them from an SVD.
    let kernel = common_kernel(&forms);
    let mut basis: Vec<Vec3> = kernel.clone();
    for _ in 0..64 {
        if basis.len() == 3 {
            break;
        }
        let mut start = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        for b in &basis {
            start -= b * b.dot(&start);
        }
        if start.norm() < 1e-8 {
            continue;
        }
        let Some(w) = isotropic_solve(&forms, start) else { continue };
        // Isotropy survives removing a kernel component.
        let mut resid = w;
        for k in &kernel {
            resid -= k * k.dot(&resid);
        }
        for _ in 0..2 {
            for b in &basis {
                resid -= b * b.dot(&resid);
            }
        }
        if resid.norm() > 1e-6 {
            basis.push(resid.normalize());
        }
    }
    // Present the basis in a canonical orientation: largest component positive.
    for b in basis.iter_mut() {
        let i = b.iamax();
        if b[i] < 0.0 {
            *b = -*b;
        }
    }
    IsotropicSpan { k_dim: basis.len(), k_basis: basis }
}

fn common_kernel(forms: &[Mat3]) -> Vec<Vec3> {
    let stacked = DMatrix::from_fn(3 * forms.len(), 3, |r, c| forms[r / 3][(r % 3, c)]);
    let svd = stacked.svd(false, true);
    let Some(v_t) = svd.v_t else { return Vec::new() };
    (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= 1e-10)
        .map(|i| Vec3::new(v_t[(i, 0)], v_t[(i, 1)], v_t[(i, 2)]))
        .collect()
}

/// Outcome of the isotropic-span test for `n_p > n_cp ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitCondition {
    /// `dim K = 1` and `C w ≠ 0` for generic `C ∈ 𝒱`.
    Condition1,
    /// `dim K = 2` and some orthonormal `w1, w2 ∈ K` have `w1ᵀ C w2 ≠ 0`.
    Condition2,
    None,
}

impl SplitCondition {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitCondition::Condition1 => "condition1",
            SplitCondition::Condition2 => "condition2",
            SplitCondition::None => "none",
        }
    }

    pub fn holds(&self) -> bool {
        !matches!(self, SplitCondition::None)
    }
}

impl fmt::Display for SplitCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitReport {
    pub verdict: SplitCondition,
    pub span: IsotropicSpan,
    /// Draws (out of `draws`) on which the condition held.
    pub votes: usize,
    pub draws: usize,
}

const GENERIC_TOL: f64 = 1e-8;

/// Tests the two isotropic-span conditions on `draws` random coordinate
/// vectors from `[−1, 1]^n`, deciding by majority.
pub fn split_condition(space: &ParamSubspace) -> SplitReport {
    split_condition_with(space, &SearchConfig::default())
}

pub fn split_condition_with(space: &ParamSubspace, cfg: &SearchConfig) -> SplitReport {
    let span = isotropic_span_with(space, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7e57_0001);
    let draws = cfg.draws.max(1);
    let mut votes = 0;
    let check: Option<(SplitCondition, &dyn Fn(&Mat3) -> bool)> = match span.k_dim {
        1 => Some((SplitCondition::Condition1, &|c: &Mat3| (c * span.k_basis[0]).norm() > GENERIC_TOL)),
        2 => Some((SplitCondition::Condition2, &|c: &Mat3| {
            let (a, b) = (&span.k_basis[0], &span.k_basis[1]);
            // max over orthonormal pairs (w1, w2) spanning K of |w1ᵀ C w2|
            let (aa, bb, ab) = (a.dot(&(c * a)), b.dot(&(c * b)), a.dot(&(c * b)));
            libm::sqrt(0.25 * (aa - bb) * (aa - bb) + ab * ab) > GENERIC_TOL
        })),
        _ => None,
    };
    let verdict = match check {
        Some((cond, test)) => {
            for _ in 0..draws {
                let theta: Vec<f64> = (0..space.dim()).map(|_| rng.random_range(-1.0..=1.0)).collect();
                if test(&space.combine(&theta).to_matrix()) {
                    votes += 1;
                }
            }
            if 2 * votes > draws { cond } else { SplitCondition::None }
        }
        None => SplitCondition::None,
    };
    SplitReport { verdict, span, votes, draws }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern_eq13() -> ParamSubspace {
        // c22 structurally zero; c11, c33, c12, c13, c23 free.
        ParamSubspace::free_entries(&[(0, 0), (2, 2), (0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn membership_examples() {
        let id = KossakowskiMatrix(SymMat3::identity());
        assert!(is_completely_positive(&id, 0.0));
        assert!(!is_completely_positive(&KossakowskiMatrix(SymMat3::diag(1.0, 1.0, -0.1)), 1e-12));
        // [[1, .5], [.5, 0]] block has negative determinant.
        let c = KossakowskiMatrix::from_six([1.0, 0.0, 1.0, 0.5, 0.0, 0.0]);
        assert!(!is_completely_positive(&c, 1e-12));

        assert!(is_positive(&id, 0.0));
        let c = KossakowskiMatrix::from_six([1.0, 0.0, 1.0, 0.1, 0.0, 0.0]);
        assert!(is_positive(&c, 1e-12));
        assert!(!is_positive(&KossakowskiMatrix(-SymMat3::identity()), 1e-12));
    }

    #[test]
    fn subspace_validation() {
        assert_eq!(ParamSubspace::new(Vec::new()), Err(ConeError::EmptyBasis));
        let dep = ParamSubspace::new(vec![SymMat3::identity(), SymMat3::identity() * 2.0]);
        assert!(matches!(dep, Err(ConeError::DependentBasis(_))));
        let seven = vec![SymMat3::identity(); 7];
        assert_eq!(ParamSubspace::new(seven), Err(ConeError::TooManyElements(7)));
        let v = ParamSubspace::new(vec![SymMat3::identity()]).unwrap();
        assert!(matches!(v.point(&[1.0, 2.0]), Err(ConeError::CoordinateMismatch { .. })));
    }

    #[test]
    fn extent_of_identity_ray() {
        let v = ParamSubspace::new(vec![SymMat3::identity()]).unwrap();
        let e = feasible_extent(&v, Cone::CompletelyPositive).unwrap();
        assert!((e.extent - 1.0).abs() < 1e-12);
        assert_eq!(e.argmax, vec![1.0]);
        assert!(e.witnesses.iter().all(|w| w.max_abs_diff(&SymMat3::identity()) < 1e-12));
    }

    #[test]
    fn extent_of_indefinite_ray() {
        let v = ParamSubspace::new(vec![SymMat3::diag(1.0, -1.0, 0.0)]).unwrap();
        let e = feasible_extent(&v, Cone::CompletelyPositive).unwrap();
        assert!(e.extent < 0.0);
        assert!(e.witnesses.is_empty());
    }

    #[test]
    fn classify_examples() {
        let a = classify_subspace(&ParamSubspace::new(vec![SymMat3::identity()]).unwrap()).unwrap();
        assert_eq!((a.case_label, a.n, a.n_p, a.n_cp), (CaseLabel::ThreeC, 1, 1, 1));

        let b = classify_subspace(&ParamSubspace::new(vec![SymMat3::diag(1.0, -1.0, 0.0)]).unwrap())
            .unwrap();
        assert_eq!((b.case_label, b.n_p, b.n_cp), (CaseLabel::One, 0, 0));

        let c = classify_subspace(&pattern_eq13()).unwrap();
        assert_eq!((c.case_label, c.n, c.n_p, c.n_cp), (CaseLabel::ThreeB, 5, 5, 3));
        assert!(!c.ambiguous);
    }

    #[test]
    fn isotropic_examples() {
        let k = isotropic_span(&ParamSubspace::new(vec![SymMat3::identity()]).unwrap());
        assert_eq!(k.k_dim, 0);

        let k = isotropic_span(&pattern_eq13());
        assert_eq!(k.k_dim, 1);
        assert!((k.k_basis[0] - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-8);

        let k = isotropic_span(&ParamSubspace::free_entries(&[(0, 0)]).unwrap());
        assert_eq!(k.k_dim, 2);
        for w in &k.k_basis {
            assert!(w[0].abs() < 1e-6);
        }
    }

    #[test]
    fn isotropic_basis_vectors_are_isotropic() {
        for v in [pattern_eq13(), ParamSubspace::free_entries(&[(0, 0), (1, 2)]).unwrap()] {
            let k = isotropic_span(&v);
            for w in &k.k_basis {
                for b in v.basis() {
                    assert!(b.quadratic_form(w).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn non_orthogonal_isotropic_lines() {
        // w1 = 0 and w2 = ±2 w3: two lines at an angle, spanning the (e2, e3) plane.
        let v = ParamSubspace::new(vec![SymMat3::diag(1.0, 0.0, 0.0), SymMat3::diag(0.0, 1.0, -4.0)])
            .unwrap();
        assert_eq!(isotropic_span(&v).k_dim, 2);
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_condition(&pattern_eq13()).verdict, SplitCondition::Condition1);
        let id = ParamSubspace::new(vec![SymMat3::identity()]).unwrap();
        assert_eq!(split_condition(&id).verdict, SplitCondition::None);
        let block = ParamSubspace::free_entries(&[(0, 0), (1, 1), (0, 1)]).unwrap();
        let r = split_condition(&block);
        assert_eq!(r.span.k_dim, 1);
        assert_eq!(r.verdict, SplitCondition::None);
        let plane = ParamSubspace::free_entries(&[(0, 0), (1, 2)]).unwrap();
        assert_eq!(split_condition(&plane).verdict, SplitCondition::Condition2);
    }

    #[test]
    fn tangent_subspace_psd_span() {
        // All symmetric matrices with a zero (3,3) entry: the PSD members span 3 dimensions.
        let t = ParamSubspace::free_entries(&[(0, 0), (1, 1), (0, 1), (0, 2), (1, 2)]).unwrap();
        let e = feasible_extent(&t, Cone::CompletelyPositive).unwrap();
        let v: Vec<Vec6> = e.witnesses.iter().map(SymMat3::as_vec6).collect();
        assert_eq!(numerical_rank(&v, 1e-7), 3);
    }
}
