//! Unit-root diagnostics and the nonstationarity-damping transform.
//!
//! The ADF test here regresses the first difference on the lagged level plus
//! optional deterministic terms and lagged differences, and converts the
//! t-ratio into a p-value with the MacKinnon (1994) response-surface
//! polynomials. Rejection decisions are derived from the p-value so they are
//! consistent with it by construction.
//!
//! Monte Carlo helpers use ChaCha8 with a 64-bit seed; independent work items
//! are pre-assigned counter-based substreams (`set_stream`) so aggregates are
//! bit-reproducible for a fixed seed regardless of evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::regression::{ols_fit, DesignMatrix};

/// Deterministic terms included in the ADF regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deterministic {
    /// No constant, no trend: the displayed textbook regression.
    None,
    /// Constant only (default).
    Constant,
    /// Constant and linear trend.
    ConstantTrend,
}

impl Deterministic {
    fn term_count(&self) -> usize {
        match self {
            Deterministic::None => 0,
            Deterministic::Constant => 1,
            Deterministic::ConstantTrend => 2,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Deterministic::None => "none",
            Deterministic::Constant => "constant",
            Deterministic::ConstantTrend => "constant+trend",
        }
    }
}

impl std::str::FromStr for Deterministic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "n" => Ok(Deterministic::None),
            "constant" | "c" => Ok(Deterministic::Constant),
            "constant+trend" | "ct" | "trend" => Ok(Deterministic::ConstantTrend),
            other => Err(Error::Config(format!(
                "unknown deterministic mode '{other}' (expected none|constant|constant+trend)"
            ))),
        }
    }
}

/// Rejection decision at one significance level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelDecision {
    pub level: f64,
    pub reject: bool,
}

/// Outcome of an augmented Dickey-Fuller regression.
#[derive(Debug, Clone)]
pub struct AdfResult {
    /// Slope on the lagged level (rho - 1).
    pub gamma_hat: f64,
    pub se_gamma: f64,
    /// `gamma_hat / se_gamma`.
    pub t_stat: f64,
    pub p_value: f64,
    pub deterministic: Deterministic,
    pub lag_order: usize,
    /// One decision per requested level, `reject = p_value < level`.
    pub reject_at: Vec<LevelDecision>,
}

impl AdfResult {
    pub fn is_rejected_at(&self, level: f64) -> Option<bool> {
        self.reject_at
            .iter()
            .find(|d| d.level == level)
            .map(|d| d.reject)
    }
}

/// Default lag order: `floor(12 * (n/100)^0.25)`, the standard small-sample rule.
pub fn default_lag_order(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Augmented Dickey-Fuller test of the unit-root null against stationarity.
///
/// Regresses `Δx_t` on `x_{t-1}`, the chosen deterministic terms, and
/// `lag_order` lagged differences. `lag_order = None` applies
/// [`default_lag_order`]. Null is rejected at a level when the MacKinnon
/// p-value falls below it.
pub fn adf_test(
    series: &[f64],
    deterministic: Deterministic,
    lag_order: Option<usize>,
    levels: &[f64],
) -> Result<AdfResult> {
    let n = series.len();
    let lag_order = lag_order.unwrap_or_else(|| default_lag_order(n));
    let det_terms = deterministic.term_count();
    let params = det_terms + 1 + lag_order;
    // Need at least params + 2 regression rows for a nonzero-dof fit.
    let min_len = lag_order + params + 3;
    if n < min_len {
        return Err(Error::InsufficientData {
            needed: min_len,
            got: n,
        });
    }
    if series.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateSeries {
            context: "ADF regression",
        });
    }

    let diffs: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    // Response rows are diffs[lag_order ..]; row i regresses on level
    // series[i], lagged diffs, and deterministic terms.
    let rows = diffs.len() - lag_order;
    let mut labels = Vec::with_capacity(params);
    match deterministic {
        Deterministic::None => {}
        Deterministic::Constant => labels.push("const".to_string()),
        Deterministic::ConstantTrend => {
            labels.push("const".to_string());
            labels.push("trend".to_string());
        }
    }
    labels.push("level".to_string());
    for l in 1..=lag_order {
        labels.push(format!("dlag{l}"));
    }

    let mut x = Vec::with_capacity(rows * params);
    let mut y = Vec::with_capacity(rows);
    for r in 0..rows {
        let i = r + lag_order;
        match deterministic {
            Deterministic::None => {}
            Deterministic::Constant => x.push(1.0),
            Deterministic::ConstantTrend => {
                x.push(1.0);
                x.push((r + 1) as f64);
            }
        }
        x.push(series[i]);
        for l in 1..=lag_order {
            x.push(diffs[i - l]);
        }
        y.push(diffs[i]);
    }

    let design = DesignMatrix::from_rows(labels, rows, params, x, y)?;
    let fit = ols_fit(&design).map_err(|e| match e {
        Error::SingularDesign { .. } => Error::DegenerateSeries {
            context: "ADF regression",
        },
        other => other,
    })?;

    let level_idx = det_terms; // "level" follows the deterministic columns
    let gamma_hat = fit.coefficient(level_idx);
    let se_gamma = fit.std_error(level_idx);
    let t_stat = gamma_hat / se_gamma;
    let p_value = mackinnon_p_value(t_stat, deterministic);
    let reject_at = levels
        .iter()
        .map(|&level| LevelDecision {
            level,
            reject: p_value < level,
        })
        .collect();

    Ok(AdfResult {
        gamma_hat,
        se_gamma,
        t_stat,
        p_value,
        deterministic,
        lag_order,
        reject_at,
    })
}

// MacKinnon (1994) response-surface coefficients for the Dickey-Fuller t
// distribution, single-series case, as tabulated for the three deterministic
// specifications. The p-value is Phi(poly(tau)) with the small-p polynomial
// below tau_star and the large-p polynomial above it; outside [tau_min,
// tau_max] the p-value saturates at 0 or 1.
struct Surface {
    tau_min: f64,
    tau_max: f64,
    tau_star: f64,
    small_p: [f64; 3],
    large_p: [f64; 4],
}

const SURFACE_NONE: Surface = Surface {
    tau_min: -19.04,
    tau_max: f64::INFINITY,
    tau_star: -1.04,
    small_p: [0.6344, 1.2378, 3.2496e-2],
    large_p: [0.4797, 9.3557e-1, -6.999e-2, 3.3066e-2],
};

const SURFACE_CONSTANT: Surface = Surface {
    tau_min: -18.83,
    tau_max: 2.74,
    tau_star: -1.61,
    small_p: [2.1659, 1.4412, 3.8269e-2],
    large_p: [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2],
};

const SURFACE_CONSTANT_TREND: Surface = Surface {
    tau_min: -16.18,
    tau_max: 0.7,
    tau_star: -2.89,
    small_p: [3.2512, 1.6047, 4.9588e-2],
    large_p: [2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2],
};

fn polyval(coeffs: &[f64], x: f64) -> f64 {
    // coeffs in ascending order of power
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Approximate asymptotic p-value for a Dickey-Fuller t statistic.
pub fn mackinnon_p_value(t_stat: f64, deterministic: Deterministic) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let surface = match deterministic {
        Deterministic::None => &SURFACE_NONE,
        Deterministic::Constant => &SURFACE_CONSTANT,
        Deterministic::ConstantTrend => &SURFACE_CONSTANT_TREND,
    };
    if t_stat > surface.tau_max {
        return 1.0;
    }
    if t_stat < surface.tau_min {
        return 0.0;
    }
    let arg = if t_stat <= surface.tau_star {
        polyval(&surface.small_p, t_stat)
    } else {
        polyval(&surface.large_p, t_stat)
    };
    let normal = Normal::new(0.0, 1.0).unwrap();
    normal.cdf(arg)
}

/// The damping pair: `mu = exp(-x²/2)` shrinks toward zero as the predictor
/// wanders, `nu = x·mu` is the damped level.
#[derive(Debug, Clone, PartialEq)]
pub struct DampedSeries {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

/// Scalar damping transform. `mu` is even in `x`, `nu` odd, `|nu| <= e^{-1/2}`.
#[inline]
pub fn damp(x: f64) -> (f64, f64) {
    let mu = (-0.5 * x * x).exp();
    (mu, x * mu)
}

/// Elementwise damping transform of a series.
pub fn damping_transform(x: &[f64]) -> DampedSeries {
    let mut mu = Vec::with_capacity(x.len());
    let mut nu = Vec::with_capacity(x.len());
    for &v in x {
        let (m, n) = damp(v);
        mu.push(m);
        nu.push(n);
    }
    DampedSeries { mu, nu }
}

/// Standard deviation of the first differences over an expanding prefix
/// window. Element `t` of the output is the population std of the first
/// `t + 1` differences; output is one shorter than the input.
pub fn rolling_first_diff_std(s: &[f64]) -> Result<Vec<f64>> {
    if s.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: s.len(),
        });
    }
    let diffs: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = Vec::with_capacity(diffs.len());
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (i, &d) in diffs.iter().enumerate() {
        sum += d;
        sum_sq += d * d;
        let k = (i + 1) as f64;
        let var = (sum_sq / k - (sum / k).powi(2)).max(0.0);
        out.push(var.sqrt());
    }
    Ok(out)
}

/// Simulate one random-walk path `X_t = X_{t-1} + u_t`, `u_t ~ N(0, sigma²)`,
/// starting from `X_0 = 0`. The output holds `X_1 .. X_n`.
pub fn simulate_random_walk(n: usize, sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Config("random walk length must be positive".into()));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::Config(format!(
            "random walk step std must be positive, got {sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let z: f64 = StandardNormal.sample(&mut rng);
        x += sigma * z;
        out.push(x);
    }
    Ok(out)
}

/// One horizon of the damped-moment check.
#[derive(Debug, Clone)]
pub struct MomentCheckRow {
    pub horizon: usize,
    /// Monte Carlo estimate of `E[exp(-X_t²)]` with `X_t ~ N(0, t)`.
    pub estimate: f64,
    pub std_error: f64,
    /// `1 / sqrt(2t + 1)`.
    pub theory: f64,
    pub z_score: f64,
}

/// Monte Carlo verification that `E[exp(-X_t²)] = 1/sqrt(2t+1)` for a
/// unit-variance random walk at horizon `t`.
#[derive(Debug, Clone)]
pub struct MomentCheckReport {
    pub paths: usize,
    pub seed: u64,
    pub rows: Vec<MomentCheckRow>,
}

/// Closed-form second moment of the damping factor at horizon `t`.
pub fn damped_moment_theory(t: usize) -> f64 {
    1.0 / ((2 * t + 1) as f64).sqrt()
}

/// Estimate `E[exp(-X_t²)]` by Monte Carlo for each horizon and compare with
/// the closed form. `X_t ~ N(0, t)` is drawn directly; path `i` of horizon
/// index `h` uses ChaCha8 substream `(h << 32) | i`, so the report is
/// bit-identical for a fixed seed at any parallelism degree.
pub fn appendix_moment_check(
    horizons: &[usize],
    paths: usize,
    seed: u64,
) -> Result<MomentCheckReport> {
    if paths < 1000 {
        return Err(Error::Config(format!(
            "moment check needs at least 1000 paths, got {paths}"
        )));
    }
    let rows = horizons
        .iter()
        .enumerate()
        .map(|(h_idx, &t)| {
            let theory = damped_moment_theory(t);
            if t == 0 {
                // X_0 = 0 exactly: every path evaluates to 1.
                return MomentCheckRow {
                    horizon: 0,
                    estimate: 1.0,
                    std_error: 0.0,
                    theory,
                    z_score: 0.0,
                };
            }
            let scale = (t as f64).sqrt();
            let values: Vec<f64> = (0..paths)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(((h_idx as u64) << 32) | i as u64);
                    let z: f64 = StandardNormal.sample(&mut rng);
                    let x = scale * z;
                    (-x * x).exp()
                })
                .collect();
            // Sequential reduction keeps the aggregate order-independent.
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let std_error = (var / n).sqrt();
            let z_score = if std_error > 0.0 {
                (mean - theory) / std_error
            } else {
                0.0
            };
            MomentCheckRow {
                horizon: t,
                estimate: mean,
                std_error,
                theory,
                z_score,
            }
        })
        .collect();
    Ok(MomentCheckReport {
        paths,
        seed,
        rows,
    })
}
