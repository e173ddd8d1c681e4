//! Wave breaking in the nonlocal Whitham-type equation
//! `u_t + u u_x + K ∗ u_x = 0`.
//!
//! * [`kernels`]: phase velocities `c(κ)`, kernel evaluation and hypothesis checks.
//! * [`initial_data`]: smooth periodic profiles with prescribed `(inf u0', sup u0')`.
//! * [`solver`]: integrating-factor pseudospectral solver with extrema tracking.
//! * [`theory`]: breaking region, classical condition, `t*`, `T*` and the Riccati envelope.
//! * [`ode`]: the comparison ODE system, trajectory events and phase portraits.
//! * [`batch`]: order-preserving batch evaluation (rayon behind the `parallel` feature).
//! * [`report`]: CSV and key=value serialization of simulation output.

pub mod batch;
pub mod fourier;
pub mod initial_data;
pub mod kernels;
pub mod ode;
pub mod quadrature;
pub mod report;
pub mod solver;
pub mod theory;

pub use initial_data::{build_profile, measured_extrema, InitialCondition};
pub use kernels::{check_admissibility, kernel_eval, multiplier, KernelAdmissibility, PhaseVelocity};
pub use ode::{integrate, portrait, Trajectory, Window};
pub use solver::{run, ExtremaSample, SimReport, SolverConfig, Verdict};
pub use theory::{classify, in_omega, seliger, RegionLabel, SlopePair};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Kernel(#[from] kernels::KernelError),
    #[error(transparent)]
    InitialData(#[from] initial_data::InitialDataError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Theory(#[from] theory::TheoryError),
    #[error(transparent)]
    Ode(#[from] ode::OdeError),
    #[error(transparent)]
    Report(#[from] report::ReportError),
}
