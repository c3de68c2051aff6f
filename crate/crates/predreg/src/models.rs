//! The model catalogue: damped multivariate regressions and the two
//! benchmarks (historical mean, autoregression), plus the fixed named
//! configurations used for the quarterly and monthly exercises.

use crate::data::PredictorPanel;
use crate::error::{Error, Result};
use crate::regression::{build_design, ols_fit, OlsFit};
use crate::stationarity::damp;

/// A lagged ratio predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    DividendYield,
    EarningsPrice,
    BookToMarket,
}

impl RatioKind {
    pub const ALL: [RatioKind; 3] = [
        RatioKind::DividendYield,
        RatioKind::EarningsPrice,
        RatioKind::BookToMarket,
    ];

    /// Short label used in design-column names and printed tables.
    pub fn tag(&self) -> &'static str {
        match self {
            RatioKind::DividendYield => "dy",
            RatioKind::EarningsPrice => "ep",
            RatioKind::BookToMarket => "bm",
        }
    }

    /// Ratio level at a table row.
    pub(crate) fn value_at(&self, panel: &PredictorPanel, row: usize) -> f64 {
        match self {
            RatioKind::DividendYield => panel.dy_at(row),
            RatioKind::EarningsPrice => panel.ep_at(row),
            RatioKind::BookToMarket => panel.bm_at(row),
        }
    }
}

/// Declarative model specification.
///
/// Neither regression carries a standalone intercept by default: the damped
/// `alpha·mu` terms act as quasi-intercepts. `intercept` opts one in.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// `y_t = mu + e_t`, re-estimated per window like any other model.
    HistoricalMean,
    /// `y_t = theta_1 y_{t-1} + ... + theta_p y_{t-p} + e_t`.
    Autoregressive { lags: usize, intercept: bool },
    /// Return lags, optional linear cay term, and a damped `(mu, nu)` pair
    /// per ratio.
    Damped {
        lags: usize,
        ratios: Vec<RatioKind>,
        include_cay: bool,
        intercept: bool,
    },
}

/// Names accepted by [`ModelSpec::named`].
pub const MODEL_NAMES: [&str; 7] = [
    "model-1-1",
    "model-1-2",
    "model-1-3",
    "model-1-4",
    "model-2-1",
    "model-2-2",
    "model-2-3",
];

impl ModelSpec {
    /// Look up one of the named configurations.
    ///
    /// The `1-x` family is the quarterly exercise (1-1 damped with cay,
    /// 1-2 historical mean, 1-3 AR(4), 1-4 damped without cay); the `2-x`
    /// family is the monthly one (2-1 damped without cay, 2-2 historical
    /// mean, 2-3 AR(4)). Monthly keeps four return lags rather than twelve
    /// to avoid overfitting.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "model-1-1" => Ok(ModelSpec::Damped {
                lags: 4,
                ratios: RatioKind::ALL.to_vec(),
                include_cay: true,
                intercept: false,
            }),
            "model-1-2" | "model-2-2" => Ok(ModelSpec::HistoricalMean),
            "model-1-3" | "model-2-3" => Ok(ModelSpec::Autoregressive {
                lags: 4,
                intercept: false,
            }),
            "model-1-4" | "model-2-1" => Ok(ModelSpec::Damped {
                lags: 4,
                ratios: RatioKind::ALL.to_vec(),
                include_cay: false,
                intercept: false,
            }),
            other => Err(Error::UnknownModel {
                name: other.to_string(),
                valid: MODEL_NAMES.join(", "),
            }),
        }
    }

    /// Opt a standalone intercept column in or out (no effect on the
    /// historical mean, which is an intercept already).
    pub fn with_intercept(self, intercept: bool) -> Self {
        match self {
            ModelSpec::HistoricalMean => ModelSpec::HistoricalMean,
            ModelSpec::Autoregressive { lags, .. } => {
                ModelSpec::Autoregressive { lags, intercept }
            }
            ModelSpec::Damped {
                lags,
                ratios,
                include_cay,
                ..
            } => ModelSpec::Damped {
                lags,
                ratios,
                include_cay,
                intercept,
            },
        }
    }

    fn has_intercept(&self) -> bool {
        match self {
            ModelSpec::HistoricalMean => true,
            ModelSpec::Autoregressive { intercept, .. } => *intercept,
            ModelSpec::Damped { intercept, .. } => *intercept,
        }
    }

    /// Validate the structural invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::HistoricalMean => Ok(()),
            ModelSpec::Autoregressive { lags, .. } => {
                if *lags == 0 {
                    Err(Error::Config("autoregression needs at least one lag".into()))
                } else {
                    Ok(())
                }
            }
            ModelSpec::Damped { ratios, .. } => {
                if ratios.is_empty() {
                    Err(Error::Config("damped model needs at least one ratio".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn requires_cay(&self) -> bool {
        matches!(
            self,
            ModelSpec::Damped {
                include_cay: true,
                ..
            }
        )
    }

    /// Deepest return lag the model reads.
    pub fn max_return_lag(&self) -> usize {
        match self {
            ModelSpec::HistoricalMean => 0,
            ModelSpec::Autoregressive { lags, .. } => *lags,
            ModelSpec::Damped { lags, .. } => *lags,
        }
    }

    /// Number of estimated parameters.
    pub fn parameter_count(&self) -> usize {
        match self {
            ModelSpec::HistoricalMean => 1,
            ModelSpec::Autoregressive { lags, intercept } => lags + usize::from(*intercept),
            ModelSpec::Damped {
                lags,
                ratios,
                include_cay,
                intercept,
            } => {
                lags + usize::from(*include_cay) + 2 * ratios.len() + usize::from(*intercept)
            }
        }
    }

    /// Design-column labels in estimation order.
    pub fn column_labels(&self) -> Vec<String> {
        let mut labels = Vec::with_capacity(self.parameter_count());
        if self.has_intercept() {
            labels.push("const".to_string());
        }
        match self {
            ModelSpec::HistoricalMean => {}
            ModelSpec::Autoregressive { lags, .. } => {
                labels.extend((1..=*lags).map(|l| format!("y_lag{l}")));
            }
            ModelSpec::Damped {
                lags,
                ratios,
                include_cay,
                ..
            } => {
                labels.extend((1..=*lags).map(|l| format!("y_lag{l}")));
                if *include_cay {
                    labels.push("cay".to_string());
                }
                for r in ratios {
                    labels.push(format!("{}_mu", r.tag()));
                    labels.push(format!("{}_nu", r.tag()));
                }
            }
        }
        labels
    }

    /// Assemble one regressor row. `lag(l)` supplies the return `l` periods
    /// back, `ratio(k)` the lagged ratio level, `cay()` the lagged cay value.
    /// Shared by in-sample estimation and the forecaster so the two can never
    /// disagree on column order.
    pub(crate) fn regressor_row(
        &self,
        lag: impl Fn(usize) -> f64,
        ratio: impl Fn(RatioKind) -> f64,
        cay: impl Fn() -> f64,
    ) -> Vec<f64> {
        let mut row = Vec::with_capacity(self.parameter_count());
        if self.has_intercept() {
            row.push(1.0);
        }
        match self {
            ModelSpec::HistoricalMean => {}
            ModelSpec::Autoregressive { lags, .. } => row.extend((1..=*lags).map(lag)),
            ModelSpec::Damped {
                lags,
                ratios,
                include_cay,
                ..
            } => {
                row.extend((1..=*lags).map(&lag));
                if *include_cay {
                    row.push(cay());
                }
                for &r in ratios {
                    let (mu, nu) = damp(ratio(r));
                    row.push(mu);
                    row.push(nu);
                }
            }
        }
        row
    }
}

/// Fit a model specification on a panel by least squares.
pub fn fit_model(panel: &PredictorPanel, spec: &ModelSpec) -> Result<OlsFit> {
    spec.validate()?;
    let design = build_design(panel, spec)?;
    ols_fit(&design)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{summarize, Frequency, ObservationTable, Period};

    fn synthetic_table(n: usize) -> ObservationTable {
        // Deterministic but non-trivial price/dividend paths.
        let periods = (0..n)
            .map(|i| Period::synthetic(Frequency::Quarterly, i))
            .collect();
        let price: Vec<f64> = (0..n)
            .map(|i| 100.0 + 10.0 * ((i as f64) * 0.7).sin() + (i % 5) as f64)
            .collect();
        let dividends: Vec<f64> = (0..n).map(|i| 1.0 + 0.2 * ((i % 7) as f64)).collect();
        let earnings: Vec<f64> = (0..n).map(|i| 5.0 + ((i * 3) % 11) as f64 * 0.1).collect();
        let bm: Vec<f64> = (0..n).map(|i| 0.4 + 0.03 * ((i % 9) as f64)).collect();
        let cay: Vec<f64> = (0..n).map(|i| 0.01 * (((i * 5) % 13) as f64 - 6.0)).collect();
        ObservationTable::new(
            Frequency::Quarterly,
            periods,
            price,
            dividends,
            earnings,
            bm,
            Some(cay),
        )
        .unwrap()
    }

    #[test]
    fn named_specs() {
        assert_eq!(
            ModelSpec::named("model-1-1").unwrap(),
            ModelSpec::Damped {
                lags: 4,
                ratios: RatioKind::ALL.to_vec(),
                include_cay: true,
                intercept: false
            }
        );
        assert_eq!(
            ModelSpec::named("model-2-1").unwrap(),
            ModelSpec::Damped {
                lags: 4,
                ratios: RatioKind::ALL.to_vec(),
                include_cay: false,
                intercept: false
            }
        );
        assert_eq!(ModelSpec::named("model-1-2").unwrap(), ModelSpec::HistoricalMean);
        assert_eq!(
            ModelSpec::named("model-2-3").unwrap(),
            ModelSpec::Autoregressive { lags: 4, intercept: false }
        );
        match ModelSpec::named("model-9-9").unwrap_err() {
            Error::UnknownModel { valid, .. } => {
                for name in MODEL_NAMES {
                    assert!(valid.contains(name));
                }
            }
            other => panic!("expected UnknownModel, got {other:?}"),
        }
    }

    #[test]
    fn column_counts() {
        assert_eq!(ModelSpec::named("model-1-1").unwrap().column_labels().len(), 11);
        assert_eq!(ModelSpec::named("model-2-1").unwrap().column_labels().len(), 10);
        assert_eq!(ModelSpec::named("model-1-3").unwrap().column_labels().len(), 4);
        assert_eq!(ModelSpec::HistoricalMean.column_labels().len(), 1);
    }

    #[test]
    fn damped_has_2q_plus_cay_more_columns_than_ar() {
        let ar = ModelSpec::Autoregressive { lags: 4, intercept: false };
        for include_cay in [false, true] {
            let damped = ModelSpec::Damped {
                lags: 4,
                ratios: RatioKind::ALL.to_vec(),
                include_cay,
                intercept: false,
            };
            assert_eq!(
                damped.parameter_count(),
                ar.parameter_count() + 2 * 3 + usize::from(include_cay)
            );
        }
    }

    #[test]
    fn historical_mean_equals_sample_mean() {
        let table = synthetic_table(60);
        let panel = table.build_panel(4).unwrap();
        let fit = fit_model(&panel, &ModelSpec::HistoricalMean).unwrap();
        let mean = summarize(&panel.y()).unwrap().mean;
        assert!((fit.coefficient(0) - mean).abs() < 1e-12);
    }

    #[test]
    fn ar_fit_identical_to_lags_only_design() {
        let table = synthetic_table(80);
        let panel = table.build_panel(4).unwrap();
        let spec = ModelSpec::Autoregressive { lags: 4, intercept: false };
        let via_model = fit_model(&panel, &spec).unwrap();
        let via_design = ols_fit(&build_design(&panel, &spec).unwrap()).unwrap();
        assert_eq!(via_model.coefficients(), via_design.coefficients());
    }

    #[test]
    fn cay_model_on_cayless_panel_errors() {
        let table = synthetic_table(60);
        let no_cay = ObservationTable::new(
            Frequency::Quarterly,
            table.periods().to_vec(),
            table.price().to_vec(),
            table.dividends().to_vec(),
            table.earnings().to_vec(),
            table.book_to_market().to_vec(),
            None,
        )
        .unwrap();
        let panel = no_cay.build_panel(4).unwrap();
        let spec = ModelSpec::named("model-1-1").unwrap();
        assert!(matches!(
            fit_model(&panel, &spec).unwrap_err(),
            Error::MissingCay
        ));
    }

    #[test]
    fn ar_recovers_simulated_ar1() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        // AR(1) with phi = 0.5 fed through an AR(4) fit: theta_1 near 0.5,
        // the rest near zero.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(123);
        let n = 10_000;
        let mut y = vec![0.0_f64; n];
        for i in 1..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            y[i] = 0.5 * y[i - 1] + 0.05 * z;
        }
        // Embed the series as exact returns of a dividend-free price path:
        // P_t = P_{t-1} (1 + y_t), so the derived stock return is y_t itself.
        let mut price = vec![100.0_f64];
        for &r in y.iter().skip(1) {
            let next = price.last().unwrap() * (1.0 + r);
            price.push(next);
        }
        let periods = (0..n)
            .map(|i| Period::synthetic(Frequency::Quarterly, i))
            .collect();
        let table = ObservationTable::new(
            Frequency::Quarterly,
            periods,
            price,
            vec![0.0; n],
            vec![1.0; n],
            vec![0.5; n],
            None,
        )
        .unwrap();
        let panel = table.build_panel(4).unwrap();
        let fit = fit_model(&panel, &ModelSpec::Autoregressive { lags: 4, intercept: false }).unwrap();
        assert!((fit.coefficient(0) - 0.5).abs() < 0.03, "theta1 = {}", fit.coefficient(0));
        for i in 1..4 {
            assert!(fit.coefficient(i).abs() < 0.03, "theta{} = {}", i + 1, fit.coefficient(i));
        }
    }

    #[test]
    fn intercept_is_opt_in() {
        let spec = ModelSpec::named("model-1-4").unwrap();
        assert_eq!(spec.column_labels().len(), 10);
        assert_ne!(spec.column_labels()[0], "const");

        let with = spec.clone().with_intercept(true);
        assert_eq!(with.column_labels().len(), 11);
        assert_eq!(with.column_labels()[0], "const");
        assert_eq!(with.parameter_count(), spec.parameter_count() + 1);

        // Fitting with the intercept engaged produces a "const" coefficient.
        let table = synthetic_table(80);
        let panel = table.build_panel(4).unwrap();
        let fit = fit_model(&panel, &with).unwrap();
        assert!(fit.label_index("const").is_ok());

        // The historical mean is already an intercept; the flag is a no-op.
        assert_eq!(
            ModelSpec::HistoricalMean.with_intercept(true),
            ModelSpec::HistoricalMean
        );
    }

    #[test]
    fn model_spec_validation() {
        assert!(ModelSpec::Autoregressive { lags: 0, intercept: false }.validate().is_err());
        assert!(ModelSpec::Damped {
            lags: 0,
            ratios: vec![],
            include_cay: false,
            intercept: false
        }
        .validate()
        .is_err());
        assert!(ModelSpec::Damped {
            lags: 0,
            ratios: vec![RatioKind::DividendYield],
            include_cay: false,
            intercept: false
        }
        .validate()
        .is_ok());
    }
}
