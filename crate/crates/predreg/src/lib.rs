//! Damped multivariate predictive regression for stock returns.
//!
//! The pipeline goes: ingest a date-indexed market table ([`data`]), derive
//! ratios and returns and align them into a lagged predictor panel, check
//! persistence with ADF unit-root tests and tame it with the damping
//! transform `(e^{-x²/2}, x e^{-x²/2})` ([`stationarity`]), estimate the
//! model suite by least squares with t/F inference ([`regression`],
//! [`models`]), forecast out of sample with recursive expanding windows
//! ([`forecast`]) and score everything by per-horizon and pooled RMSE
//! ([`evaluation`]). [`synthetic`] holds seeded generators and the
//! normal-equation oracle used to cross-check the solver.
//!
//! Monte Carlo components use ChaCha8 with pre-assigned substreams, so every
//! seeded result is bit-reproducible at any parallelism degree.

pub mod data;
pub mod error;
pub mod evaluation;
pub mod forecast;
pub mod models;
pub mod regression;
pub mod stationarity;
pub mod synthetic;

pub use data::{summarize, Frequency, ObservationTable, Period, PredictorPanel, Schema, SummaryStats};
pub use error::{Error, Result};
pub use evaluation::{compare_models, rmse_per_horizon, rmse_pooled, RmseReport, RmseRow};
pub use forecast::{recursive_forecast, window_counts, ForecastRecord, ForecastRun};
pub use models::{fit_model, ModelSpec, RatioKind, MODEL_NAMES};
pub use regression::{
    build_design, f_test, ols_fit, t_test, DesignMatrix, FTestDecision, OlsFit, TTestDecision,
};
pub use stationarity::{
    adf_test, appendix_moment_check, damping_transform, rolling_first_diff_std,
    simulate_random_walk, AdfResult, DampedSeries, Deterministic, MomentCheckReport,
};
pub use synthetic::{
    generate, normal_equation_oracle, ExactModelCoefficients, Generated, GeneratorKind,
    GeneratorSpec,
};
