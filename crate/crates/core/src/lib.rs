//! Exact positivity certificates for power-series coefficients and numerical
//! verification of residual contraction bounds for the Newton and Halley
//! iterations computing `(1 - z)^{1/p}`.
//!
//! * [`series`]: truncated power series over exact rationals or complex doubles.
//! * [`theorem`]: weight sequences, the `b`/`c` recurrences and [`certify`].
//! * [`root_maps`]: the residual maps `f_p`, `g_p`, their weights, and the iterations.
//! * [`verification`]: disk sampling, bound reports, and Taylor-prefix agreement.
//! * [`cli`]: the `rootcert` command line.

pub mod cli;
pub mod rational;
pub mod root_maps;
pub mod series;
pub mod theorem;
pub mod verification;

pub use rational::Rational;
pub use root_maps::{
    f_eval, g_eval, halley_step, halley_weights, map_series, newton_step, newton_weights,
    run_iteration, IterationStep, IterationTrace, MapError, MapKind, Method, RootIteration,
    RootParameter, SeriesRoute,
};
pub use series::{Coeff, Series, SeriesError, DEFAULT_ORDER};
pub use theorem::{
    certify, compute_b, compute_c_from_convolution, compute_c_from_differences, detect_ell,
    Hypothesis, PositivityCertificate, TheoremError, WeightSequence,
};
pub use verification::{
    binomial_root_series, check_map_contraction, check_no_pole_no_zero, check_prefix_agreement,
    check_residual_bounds, estimate_convergence_order, iterate_series, sample_disk, BoundReport,
    DiskSamplingPlan, OrderEstimate, PrefixAgreement, VerifyError,
};
