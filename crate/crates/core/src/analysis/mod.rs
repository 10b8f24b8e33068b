//! Second-moment analysis of the shot-noise processes: closed forms,
//! quadrature references, Monte Carlo estimators, quadratic variation and
//! scaling-limit diagnostics.

pub mod closed_form;
pub mod convergence;
pub mod estimators;
pub mod numeric;
pub mod qv;

pub use closed_form::{
    autocorrelation_closed_form, cov_closed_form_independent, cov_closed_form_logdecay,
    cov_closed_form_powerlaw, cov_poly_numeric, var_poly,
};
pub use convergence::{convergence_report, ConvergenceReport, ConvergenceSetup, ScaleDiagnostics};
pub use estimators::{empirical_cov, empirical_cov_matrix, sample_mean, shape_moments, EstimatorReport};
pub use numeric::cov_quadrature;
pub use qv::{empirical_qv, expected_increment_sq, expected_qv, expected_qv_sweep, log_log_slope};
