//! JSON input and output schemas.
//!
//! Inputs are parsed strictly: unknown keys are rejected and errors name
//! the offending field path.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qaccess_core::cones::{ConeAnalysis, IsotropicSpan, SplitReport};
use qaccess_core::dynamics::{ControlSchedule, Segment, Trajectory};
use qaccess_core::liealg::{AccessReport, LieClosure};
use qaccess_core::stochastic::{CorrelationModel, Family, McReport, ShiftConvention, SpinFieldCoefficients};
use qaccess_core::{CoherenceVector, HamiltonianVector, KossakowskiMatrix, Mat3, ParamSubspace, SymMat3};

use crate::error::CliError;

/// Parses `text` as `T`, reporting the JSON path of the first problem.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            CliError::input(format!("invalid input: {}", e.inner()))
        } else {
            CliError::input(format!("invalid field `{path}`: {}", e.inner()))
        }
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn matrix_rows(m: &Mat3) -> [[f64; 3]; 3] {
    [0, 1, 2].map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]])
}

fn finite(name: &str, xs: &[f64]) -> Result<(), CliError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(CliError::input(format!("invalid field `{name}`: values must be finite")))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceInput {
    pub basis: Vec<[f64; 6]>,
}

impl SubspaceInput {
    pub fn subspace(&self) -> Result<ParamSubspace, CliError> {
        for row in &self.basis {
            finite("basis", row)?;
        }
        ParamSubspace::from_six_rows(&self.basis).map_err(|e| CliError::input(format!("invalid field `basis`: {e}")))
    }
}

/// `{"c": [6], "h": [3]}`, or the comparison form with a subspace and two
/// coordinate sets.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum LieInput {
    Generator(GeneratorInput),
    Compare(CompareInput),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorInput {
    pub c: [f64; 6],
    pub h: [f64; 3],
}

impl GeneratorInput {
    pub fn kossakowski(&self) -> Result<KossakowskiMatrix, CliError> {
        finite("c", &self.c)?;
        Ok(KossakowskiMatrix(SymMat3::from_six(self.c)))
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianVector, CliError> {
        finite("h", &self.h)?;
        Ok(HamiltonianVector::new(self.h[0], self.h[1], self.h[2]))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CompareInput {
    pub basis: Vec<[f64; 6]>,
    pub h: [f64; 3],
    pub theta_p: Vec<f64>,
    pub theta_cp: Vec<f64>,
}

/// The untagged form hides field-level messages, so each variant is tried
/// on its own and the error of the closer match is reported.
pub fn parse_lie_input(text: &str) -> Result<LieInput, CliError> {
    let value: serde_json::Value = parse(text)?;
    let is_compare = value.get("basis").is_some() || value.get("theta_p").is_some();
    if is_compare {
        parse::<CompareInput>(text).map(LieInput::Compare)
    } else {
        parse::<GeneratorInput>(text).map(LieInput::Generator)
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentInput {
    pub duration: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveInput {
    pub c: [f64; 6],
    pub h: [f64; 3],
    pub v0: [f64; 3],
    pub dt: f64,
    #[serde(default)]
    pub schedule: Vec<SegmentInput>,
}

impl EvolveInput {
    pub fn schedule(&self) -> Result<ControlSchedule, CliError> {
        ControlSchedule::new(self.schedule.iter().map(|s| Segment { duration: s.duration, u: s.u }).collect())
            .map_err(|e| CliError::input(format!("invalid field `schedule`: {e}")))
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    Zero,
    White,
    Exponential,
}

impl From<FamilyName> for Family {
    fn from(f: FamilyName) -> Family {
        match f {
            FamilyName::Zero => Family::Zero,
            FamilyName::White => Family::White,
            FamilyName::Exponential => Family::Exponential,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, Default, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ConventionName {
    #[default]
    Published,
    Reversed,
}

impl From<ConventionName> for ShiftConvention {
    fn from(c: ConventionName) -> ShiftConvention {
        match c {
            ConventionName::Published => ShiftConvention::Published,
            ConventionName::Reversed => ShiftConvention::Reversed,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelInput {
    pub family: FamilyName,
    #[serde(default)]
    pub w11: f64,
    #[serde(default)]
    pub w13: f64,
    #[serde(default)]
    pub w33: f64,
    #[serde(default)]
    pub tau: Option<f64>,
}

impl ModelInput {
    pub fn model(&self) -> Result<CorrelationModel, CliError> {
        finite("w", &[self.w11, self.w13, self.w33])?;
        let family: Family = self.family.into();
        if family == Family::Exponential && self.tau.is_none() {
            return Err(CliError::input("invalid field `tau`: required for the exponential family"));
        }
        CorrelationModel::new(family, self.w11, self.w13, self.w33, self.tau.unwrap_or(0.0))
            .map_err(|e| CliError::domain(e.to_string()))
    }
}

/// Model fields plus the operating point.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpinFieldInput {
    pub family: FamilyName,
    #[serde(default)]
    pub w11: f64,
    #[serde(default)]
    pub w13: f64,
    #[serde(default)]
    pub w33: f64,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default = "one")]
    pub b3: f64,
    #[serde(default = "one")]
    pub u: f64,
    #[serde(default)]
    pub convention: ConventionName,
}

fn one() -> f64 {
    1.0
}

impl SpinFieldInput {
    pub fn model_input(&self) -> ModelInput {
        ModelInput { family: self.family, w11: self.w11, w13: self.w13, w33: self.w33, tau: self.tau }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloInput {
    pub model: ModelInput,
    pub b3: f64,
    #[serde(default = "one")]
    pub u: f64,
    pub v0: [f64; 3],
    pub dt: f64,
    pub t_final: f64,
    pub n_samples: usize,
    #[serde(default)]
    pub convention: ConventionName,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsotropicSpanOut {
    pub k_dim: usize,
    pub k_basis: Vec<[f64; 3]>,
}

impl From<&IsotropicSpan> for IsotropicSpanOut {
    fn from(s: &IsotropicSpan) -> Self {
        IsotropicSpanOut { k_dim: s.k_dim, k_basis: s.k_basis.iter().map(|v| [v[0], v[1], v[2]]).collect() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyOut {
    pub case: String,
    pub n: usize,
    pub n_p: usize,
    pub n_cp: usize,
    pub extent_p: f64,
    pub extent_cp: f64,
    pub witnesses_p: Vec<[f64; 6]>,
    pub witnesses_cp: Vec<[f64; 6]>,
    pub ambiguous: bool,
    pub isotropic_span: IsotropicSpanOut,
    pub split_condition: String,
    pub split_votes: usize,
    pub split_draws: usize,
}

impl ClassifyOut {
    pub fn new(a: &ConeAnalysis, s: &SplitReport) -> Self {
        ClassifyOut {
            case: a.case_label.as_str().to_string(),
            n: a.n,
            n_p: a.n_p,
            n_cp: a.n_cp,
            extent_p: a.extent_p,
            extent_cp: a.extent_cp,
            witnesses_p: a.witnesses_p.iter().map(SymMat3::six).collect(),
            witnesses_cp: a.witnesses_cp.iter().map(SymMat3::six).collect(),
            ambiguous: a.ambiguous,
            isotropic_span: (&s.span).into(),
            split_condition: s.verdict.as_str().to_string(),
            split_votes: s.votes,
            split_draws: s.draws,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureOut {
    pub dim: usize,
    pub accessible: bool,
    pub basis: Vec<[[f64; 3]; 3]>,
}

impl From<&LieClosure> for ClosureOut {
    fn from(c: &LieClosure) -> Self {
        ClosureOut { dim: c.dim, accessible: c.is_transitive, basis: c.basis.iter().map(matrix_rows).collect() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareOut {
    pub dim_p: usize,
    pub dim_cp: usize,
    pub accessible_p: bool,
    pub accessible_cp: bool,
    pub differ: bool,
    pub basis_p: Vec<[[f64; 3]; 3]>,
    pub basis_cp: Vec<[[f64; 3]; 3]>,
}

impl From<&AccessReport> for CompareOut {
    fn from(r: &AccessReport) -> Self {
        CompareOut {
            dim_p: r.dim_p,
            dim_cp: r.dim_cp,
            accessible_p: r.accessible_p,
            accessible_cp: r.accessible_cp,
            differ: r.differ,
            basis_p: r.basis_p.iter().map(matrix_rows).collect(),
            basis_cp: r.basis_cp.iter().map(matrix_rows).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryOut {
    pub t: Vec<f64>,
    pub states: Vec<[f64; 3]>,
    pub purity: Vec<f64>,
    pub u: Vec<f64>,
    pub violation: Option<f64>,
    pub max_norm: f64,
}

impl From<&Trajectory> for TrajectoryOut {
    fn from(t: &Trajectory) -> Self {
        TrajectoryOut {
            t: t.times.clone(),
            states: t.states.iter().map(CoherenceVector::to_array).collect(),
            purity: t.purities.clone(),
            u: t.controls.clone(),
            violation: t.violation,
            max_norm: t.max_norm,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpinFieldOut {
    pub family: String,
    pub c11: f64,
    pub c12: f64,
    pub c13: f64,
    pub c23: f64,
    pub c33: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub b3: f64,
    pub u: f64,
    pub convention: String,
    pub cp_admissible: bool,
    pub hamiltonian: [[f64; 3]; 3],
    pub dissipation: [f64; 6],
    pub lie_dim: usize,
    pub accessible: bool,
    /// The dissipative coefficients are evaluated once at `b3` and held
    /// fixed when the control switches the field.
    pub dissipation_fixed_under_switching: bool,
}

impl SpinFieldOut {
    pub fn new(
        family: Family,
        c: &SpinFieldCoefficients,
        u: f64,
        convention: ShiftConvention,
        cp_admissible: bool,
        hamiltonian: &Mat3,
        dissipation: &SymMat3,
        closure: &LieClosure,
    ) -> Self {
        SpinFieldOut {
            family: family.as_str().to_string(),
            c11: c.c11,
            c12: c.c12,
            c13: c.c13,
            c23: c.c23,
            c33: c.c33,
            omega1: c.omega1,
            omega2: c.omega2,
            omega3: c.omega3,
            b3: c.b3,
            u,
            convention: convention.as_str().to_string(),
            cp_admissible,
            hamiltonian: matrix_rows(hamiltonian),
            dissipation: dissipation.six(),
            lie_dim: closure.dim,
            accessible: closure.is_transitive,
            dissipation_fixed_under_switching: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckpointOut {
    pub t: f64,
    pub mean: [f64; 3],
    pub reference: [f64; 3],
    pub standard_error: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloOut {
    pub n_samples: usize,
    pub seed: u64,
    pub convention: String,
    pub max_deviation: f64,
    pub mean_deviation: f64,
    pub max_standard_error: f64,
    pub max_z: f64,
    pub within_3se: bool,
    pub markovian: bool,
    pub checkpoints: Vec<CheckpointOut>,
}

impl MonteCarloOut {
    pub fn new(r: &McReport, seed: u64, convention: ShiftConvention) -> Self {
        MonteCarloOut {
            n_samples: r.n_samples,
            seed,
            convention: convention.as_str().to_string(),
            max_deviation: r.max_deviation,
            mean_deviation: r.mean_deviation,
            max_standard_error: r.max_standard_error,
            max_z: r.max_z,
            within_3se: r.within_3se,
            markovian: r.markovian,
            checkpoints: r
                .checkpoints
                .iter()
                .map(|c| CheckpointOut { t: c.t, mean: c.mean, reference: c.reference, standard_error: c.standard_error })
                .collect(),
        }
    }
}
