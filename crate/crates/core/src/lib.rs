//! Positivity versus complete positivity for two-level Markovian dynamics,
//! and what the choice does to accessibility.
//!
//! The crate is `no_std` (with `alloc`). All matrices are 3×3 real, acting
//! on the coherence vector of a qubit.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod coherence;
pub mod cones;
pub mod dynamics;
pub mod generator;
pub mod liealg;
pub mod linalg;
pub mod stochastic;

pub use coherence::{CoherenceVector, DensityMatrix};
pub use cones::{CaseLabel, Cone, ConeAnalysis, ParamSubspace, SearchConfig, SplitCondition};
pub use generator::{DissipationMatrix, HamiltonianVector, KossakowskiMatrix, Superoperator};
pub use linalg::{Mat3, SymMat3, Vec3};
pub use liealg::{AccessReport, LieClosure};
pub use dynamics::{ControlSchedule, Segment, Trajectory};
pub use stochastic::{CorrelationModel, Family, ShiftConvention, SpinFieldCoefficients};
