//! α-continuity studies and measured inequality constants.

mod convergence;
mod inequalities;
mod ode;
mod rates;
mod ubar;

pub use convergence::{
    convergence_study, ConvergenceConfig, ConvergenceRow, ConvergenceStudy, MemberFailure,
    TimeCheck, CONTROL_LIMIT, MONOTONE_SLACK, RATIO_SPREAD_LIMIT,
};
pub use inequalities::{
    embedding_family, hls_sigma_sweep, hls_target_exponent, random_family,
    transport_commutator_sweep, velocity_product_sweep, verify_commutator_kpv, verify_hls,
    verify_kpv_family, verify_transport_commutator, verify_velocity_product, KpvExponents,
};
pub use ode::{
    integrate_comparison, ode_battery, random_ode_specs, verify_ode_comparison, Forcing,
    OdeComparisonSpec, ODE_ATOL, ODE_RTOL,
};
pub use rates::{fit_rate, BoundModel, RateFit};
pub use ubar::{compute_u_bar_parts, u_bar_i, UBarParts};
