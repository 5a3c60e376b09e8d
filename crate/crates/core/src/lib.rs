//! Spectral incompressible Navier-Stokes approximations on the periodic
//! 3-torus, with executable checks of their a priori estimates and the
//! construction of regularity epochs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod dynamics;
pub mod epochs;
pub mod error;
pub mod estimates;
pub mod fft;
pub mod field;
pub mod io;
pub mod nonlinear;
pub mod quadrature;

pub use convergence::{cauchy_diagnostic, convergence_sweep, ConvergenceReport, PairDiagnostic};
pub use dynamics::{
    galerkin_rhs, mollified_rhs, run, step, BlowUp, Sample, Scheme, SolverConfig, Stepper, System,
    Tolerances, Trajectory,
};
pub use epochs::{
    build_epoch_cover, epoch_report, find_small_dirichlet_time, local_interval, regularity_integrals,
    riccati_global_bound, theta, Epoch, EpochReport, SampledSet,
};
pub use error::{Error, Result};
pub use estimates::{
    agmon_check, ddn_residual, ds_bound_check, energy_check, estimate_agmon_constant,
    weak_form_residual, DerivedConstants, InequalityReport, Verdict,
};
pub use field::{
    leray_project, make_field, mollify, norms, Datum, FourierField, MollifierSymbol, NormBundle,
    SpectralField, VOLUME,
};
pub use nonlinear::{nonlinear_term, pressure_gradient, Convection};
