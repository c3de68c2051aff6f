//! Design-matrix construction, ordinary least squares, and classical
//! inference.
//!
//! Fits are solved through a thin QR factorization rather than explicit
//! normal equations: the damped columns are highly collinear for
//! small-magnitude ratios (`mu` near 1, `nu` near `x`), where forming `X'X`
//! squares the condition number. Designs whose estimated reciprocal condition
//! number falls below [`RCOND_MIN`] are rejected outright, naming the
//! offending column, instead of silently dropping it.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use crate::data::PredictorPanel;
use crate::error::{Error, Result};
use crate::models::ModelSpec;

/// Reciprocal-condition threshold below which a design is treated as rank
/// deficient.
pub const RCOND_MIN: f64 = 1e-12;

/// Labeled regressor matrix with its response vector.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    labels: Vec<String>,
    x: DMatrix<f64>,
    y: DVector<f64>,
}

impl DesignMatrix {
    /// Build from an explicit matrix and response. Labels must be unique and
    /// match the column count; every entry must be finite.
    pub fn new(labels: Vec<String>, x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if labels.len() != x.ncols() {
            return Err(Error::Config(format!(
                "{} labels for {} columns",
                labels.len(),
                x.ncols()
            )));
        }
        if y.len() != x.nrows() {
            return Err(Error::Config(format!(
                "response has {} rows, design has {}",
                y.len(),
                x.nrows()
            )));
        }
        for (i, a) in labels.iter().enumerate() {
            for b in labels.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::Config(format!("duplicate column label '{a}'")));
                }
            }
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("design contains non-finite entries".into()));
        }
        Ok(DesignMatrix { labels, x, y })
    }

    /// Build from row-major data.
    pub fn from_rows(
        labels: Vec<String>,
        rows: usize,
        cols: usize,
        data: Vec<f64>,
        y: Vec<f64>,
    ) -> Result<Self> {
        Self::new(
            labels,
            DMatrix::from_row_slice(rows, cols, &data),
            DVector::from_vec(y),
        )
    }

    pub fn nrows(&self) -> usize {
        self.x.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.x.ncols()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.y
    }
}

/// Assemble the regression design for a model over the panel's usable rows.
///
/// Column order is fixed: return lags, then cay when the model includes it,
/// then a `(mu, nu)` pair per ratio.
pub fn build_design(panel: &PredictorPanel, spec: &ModelSpec) -> Result<DesignMatrix> {
    build_design_through(panel, spec, panel.usable_rows().end - 1)
}

/// Same as [`build_design`] but restricted to responses at table rows
/// `<= last_row`. Used by the expanding-window forecaster.
pub fn build_design_through(
    panel: &PredictorPanel,
    spec: &ModelSpec,
    last_row: usize,
) -> Result<DesignMatrix> {
    if spec.requires_cay() && !panel.has_cay() {
        return Err(Error::MissingCay);
    }
    if spec.max_return_lag() > panel.return_lags() {
        return Err(Error::Config(format!(
            "model needs {} return lags but the panel was built with {}",
            spec.max_return_lag(),
            panel.return_lags()
        )));
    }
    let labels = spec.column_labels();
    let cols = labels.len();
    let rows: Vec<usize> = panel
        .usable_rows()
        .filter(|&t| t <= last_row)
        .collect();
    if rows.is_empty() {
        return Err(Error::InsufficientData {
            needed: panel.usable_rows().start + 1,
            got: last_row + 1,
        });
    }
    let mut data = Vec::with_capacity(rows.len() * cols);
    let mut y = Vec::with_capacity(rows.len());
    for &t in &rows {
        let row = spec.regressor_row(
            |lag| panel.return_at(t - lag),
            |ratio| ratio.value_at(panel, t - 1),
            || panel.cay_at(t - 1).expect("cay presence checked above"),
        );
        data.extend_from_slice(&row);
        y.push(panel.return_at(t));
    }
    DesignMatrix::from_rows(labels, rows.len(), cols, data, y)
}

/// An estimated least-squares fit with classical inference.
#[derive(Debug, Clone)]
pub struct OlsFit {
    labels: Vec<String>,
    coefficients: Vec<f64>,
    std_errors: Vec<f64>,
    t_stats: Vec<f64>,
    p_values: Vec<f64>,
    cov: DMatrix<f64>,
    ssr: f64,
    sigma2: f64,
    n: usize,
    dof: usize,
    f_stat: f64,
    f_p_value: f64,
    adj_r2: Option<f64>,
}

impl OlsFit {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, idx: usize) -> f64 {
        self.coefficients[idx]
    }

    pub fn std_error(&self, idx: usize) -> f64 {
        self.std_errors[idx]
    }

    pub fn t_stats(&self) -> &[f64] {
        &self.t_stats
    }

    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }

    /// Coefficient covariance matrix `sigma² (X'X)^{-1}`.
    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn ssr(&self) -> f64 {
        self.ssr
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn n_observations(&self) -> usize {
        self.n
    }

    /// Residual degrees of freedom, `n - m`.
    pub fn dof(&self) -> usize {
        self.dof
    }

    /// F statistic for the all-coefficients-zero null.
    pub fn f_stat(&self) -> f64 {
        self.f_stat
    }

    pub fn f_p_value(&self) -> f64 {
        self.f_p_value
    }

    /// `1 - (ssr/dof) / (tss/(n-1))` with the total sum of squares about the
    /// response mean; `None` when the response has no variance.
    pub fn adjusted_r2(&self) -> Option<f64> {
        self.adj_r2
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownCoefficient {
                label: label.to_string(),
                available: self.labels.join(", "),
            })
    }

    pub fn coefficient_by_label(&self, label: &str) -> Result<f64> {
        Ok(self.coefficients[self.label_index(label)?])
    }

    /// Linear prediction for one regressor row (same column order as the fit).
    pub fn predict(&self, row: &[f64]) -> f64 {
        debug_assert_eq!(row.len(), self.coefficients.len());
        row.iter()
            .zip(self.coefficients.iter())
            .map(|(x, c)| x * c)
            .sum()
    }
}

fn t_p_value(t: f64, dof: usize) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, dof as f64).expect("positive dof");
    2.0 * (1.0 - dist.cdf(t.abs()))
}

fn f_p_value_from(f: f64, num_dof: usize, den_dof: usize) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    if !f.is_finite() {
        return 0.0;
    }
    let dist = FisherSnedecor::new(num_dof as f64, den_dof as f64).expect("positive dofs");
    1.0 - dist.cdf(f)
}

/// Estimate the design by least squares via thin QR.
///
/// Errors when observations do not exceed parameters, or when the estimated
/// reciprocal condition number of `R` falls below [`RCOND_MIN`] (reported with
/// the first column whose pivot collapses, i.e. the dependent one).
pub fn ols_fit(design: &DesignMatrix) -> Result<OlsFit> {
    let n = design.nrows();
    let m = design.ncols();
    if n <= m {
        return Err(Error::InsufficientObservations { n, m });
    }

    let qr = design.x.clone().qr();
    let q = qr.q();
    let r = qr.r();

    // Cheap rank probe: ratio of extreme |R| diagonals. A collapsed pivot at
    // column k means column k is numerically dependent on columns 0..k.
    let diag: Vec<f64> = (0..m).map(|i| r[(i, i)].abs()).collect();
    let max_diag = diag.iter().cloned().fold(0.0_f64, f64::max);
    if max_diag == 0.0 {
        return Err(Error::SingularDesign {
            column: design.labels[0].clone(),
            rcond: 0.0,
        });
    }
    let (worst_col, min_diag) = diag
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, &d)| (i, d))
        .unwrap();
    let rcond = min_diag / max_diag;
    if rcond < RCOND_MIN {
        return Err(Error::SingularDesign {
            column: design.labels[worst_col].clone(),
            rcond,
        });
    }

    // Solve R xi = Q'y by back substitution.
    let qty = q.transpose() * &design.y;
    let mut xi = vec![0.0_f64; m];
    for i in (0..m).rev() {
        let mut acc = qty[i];
        for j in (i + 1)..m {
            acc -= r[(i, j)] * xi[j];
        }
        xi[i] = acc / r[(i, i)];
    }

    let xi_vec = DVector::from_vec(xi.clone());
    let residuals = &design.y - &design.x * &xi_vec;
    let ssr = residuals.dot(&residuals);
    let dof = n - m;
    let sigma2 = ssr / dof as f64;

    // (X'X)^{-1} = R^{-1} R^{-T}; invert R column by column.
    let mut rinv = DMatrix::<f64>::zeros(m, m);
    for col in 0..m {
        for i in (0..=col).rev() {
            let mut acc = if i == col { 1.0 } else { 0.0 };
            for j in (i + 1)..=col {
                acc -= r[(i, j)] * rinv[(j, col)];
            }
            rinv[(i, col)] = acc / r[(i, i)];
        }
    }
    let xtx_inv = &rinv * rinv.transpose();
    let cov = xtx_inv * sigma2;

    let mut std_errors = Vec::with_capacity(m);
    let mut t_stats = Vec::with_capacity(m);
    let mut p_values = Vec::with_capacity(m);
    for i in 0..m {
        let se = cov[(i, i)].max(0.0).sqrt();
        let t = if se > 0.0 {
            xi[i] / se
        } else if xi[i] == 0.0 {
            0.0
        } else {
            f64::INFINITY * xi[i].signum()
        };
        std_errors.push(se);
        t_stats.push(t);
        p_values.push(t_p_value(t, dof));
    }

    // All-coefficients-zero null: the restricted model predicts zero, so its
    // SSR is the uncentered sum of squares of the response.
    let ssr_zero = design.y.dot(&design.y);
    let f_stat = if ssr_zero <= ssr {
        0.0
    } else if ssr == 0.0 {
        f64::INFINITY
    } else {
        ((ssr_zero - ssr) / m as f64) / (ssr / dof as f64)
    };
    let f_p = f_p_value_from(f_stat, m, dof);

    let y_mean = design.y.iter().sum::<f64>() / n as f64;
    let tss = design.y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>();
    let adj_r2 = if tss > 0.0 {
        Some(1.0 - (ssr / dof as f64) / (tss / (n - 1) as f64))
    } else {
        None
    };

    Ok(OlsFit {
        labels: design.labels.clone(),
        coefficients: xi,
        std_errors,
        t_stats,
        p_values,
        cov,
        ssr,
        sigma2,
        n,
        dof,
        f_stat,
        f_p_value: f_p,
        adj_r2,
    })
}

/// Outcome of a two-sided coefficient t-test.
#[derive(Debug, Clone)]
pub struct TTestDecision {
    pub label: String,
    pub statistic: f64,
    pub p_value: f64,
    pub level: f64,
    pub reject: bool,
}

/// Two-sided test of a single coefficient against zero.
pub fn t_test(fit: &OlsFit, label: &str, level: f64) -> Result<TTestDecision> {
    let idx = fit.label_index(label)?;
    let statistic = fit.t_stats[idx];
    let p_value = fit.p_values[idx];
    Ok(TTestDecision {
        label: label.to_string(),
        statistic,
        p_value,
        level,
        reject: p_value < level,
    })
}

/// Outcome of a nested-model F-test.
#[derive(Debug, Clone)]
pub struct FTestDecision {
    pub statistic: f64,
    pub p_value: f64,
    pub numerator_dof: usize,
    pub denominator_dof: usize,
    pub level: f64,
    pub reject: bool,
}

/// F-test of `q` restrictions: `F = ((SSR_r - SSR_ur)/q) / (SSR_ur/dof_ur)`.
///
/// The restricted model must be nested in the unrestricted one; a restricted
/// SSR below the unrestricted SSR (beyond rounding) is rejected.
pub fn f_test(
    unrestricted: &OlsFit,
    restricted: &OlsFit,
    q: usize,
    level: f64,
) -> Result<FTestDecision> {
    if q == 0 {
        return Err(Error::Config("restriction count must be positive".into()));
    }
    let ssr_ur = unrestricted.ssr();
    let ssr_r = restricted.ssr();
    let tolerance = 1e-9 * ssr_ur.max(1.0);
    if ssr_r < ssr_ur - tolerance {
        return Err(Error::NonNested {
            restricted: ssr_r,
            unrestricted: ssr_ur,
        });
    }
    let dof = unrestricted.dof();
    let statistic = if ssr_r <= ssr_ur {
        0.0
    } else if ssr_ur == 0.0 {
        f64::INFINITY
    } else {
        ((ssr_r - ssr_ur) / q as f64) / (ssr_ur / dof as f64)
    };
    let p_value = f_p_value_from(statistic, q, dof);
    Ok(FTestDecision {
        statistic,
        p_value,
        numerator_dof: q,
        denominator_dof: dof,
        level,
        reject: p_value < level,
    })
}
