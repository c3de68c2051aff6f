//! Recursive (expanding-window) multi-step out-of-sample forecasting.
//!
//! Window `r` stands at table row `n + r - 1` (1-based), fits the model on
//! every usable response up to that row, and predicts horizons `1..=h_max`.
//! Lagged-return slots are filled recursively with this window's own earlier
//! predictions once the lag reaches past the window's end; ratio and cay
//! predictors are frozen at their last observed values inside the window,
//! because future ratios are unknown at forecast time.

use rayon::prelude::*;

use crate::data::{Frequency, PredictorPanel};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::regression::{build_design_through, ols_fit};

/// Count the expanding windows: `R = N - n - h_max + 1`, and the total number
/// of grid records `R * h_max`.
pub fn window_counts(total: usize, initial: usize, h_max: usize) -> Result<(usize, usize)> {
    if h_max == 0 {
        return Err(Error::Config("horizon must be at least 1".into()));
    }
    if total < initial + h_max {
        return Err(Error::Config(format!(
            "total sample {total} does not cover initial size {initial} plus horizon {h_max}"
        )));
    }
    let windows = total - initial - h_max + 1;
    Ok((windows, windows * h_max))
}

/// One cell of the forecast grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRecord {
    /// Window index `r`, 1-based.
    pub window: usize,
    /// Horizon `j`, 1-based.
    pub horizon: usize,
    /// Table row of the forecast target (0-based).
    pub target_row: usize,
    /// Period label of the target row.
    pub period: String,
    pub predicted: f64,
    pub realized: Option<f64>,
}

/// The full (window, horizon) forecast grid for one model.
#[derive(Debug, Clone)]
pub struct ForecastRun {
    pub model: String,
    pub frequency: Frequency,
    /// Initial in-sample size `n` in table rows.
    pub initial_size: usize,
    pub h_max: usize,
    pub window_count: usize,
    /// Records ordered by `(window, horizon)`.
    pub records: Vec<ForecastRecord>,
}

impl ForecastRun {
    pub fn records_at_horizon(&self, horizon: usize) -> impl Iterator<Item = &ForecastRecord> {
        self.records.iter().filter(move |r| r.horizon == horizon)
    }
}

/// Run the recursive forecast over every window.
///
/// `initial_size` is the number of leading table rows used for the first fit;
/// it must leave the model at least ten observations of estimation headroom.
/// Windows are mutually independent and evaluated in parallel; the
/// grid is assembled in `(window, horizon)` order regardless of scheduling.
pub fn recursive_forecast(
    panel: &PredictorPanel,
    spec: &ModelSpec,
    label: &str,
    initial_size: usize,
    h_max: usize,
) -> Result<ForecastRun> {
    spec.validate()?;
    let total = panel.period_count();
    let (window_count, _) = window_counts(total, initial_size, h_max)?;
    if initial_size < spec.parameter_count() + 10 {
        return Err(Error::Config(format!(
            "initial size {initial_size} leaves no estimation headroom for {} parameters",
            spec.parameter_count()
        )));
    }
    if spec.requires_cay() && !panel.has_cay() {
        return Err(Error::MissingCay);
    }

    let per_window: Vec<Result<Vec<ForecastRecord>>> = (1..=window_count)
        .into_par_iter()
        .map(|r| forecast_window(panel, spec, r, initial_size, h_max))
        .collect();

    let mut records = Vec::with_capacity(window_count * h_max);
    for (i, res) in per_window.into_iter().enumerate() {
        let window_records = res.map_err(|e| Error::WindowFit {
            window: i + 1,
            source: Box::new(e),
        })?;
        records.extend(window_records);
    }

    Ok(ForecastRun {
        model: label.to_string(),
        frequency: panel.frequency(),
        initial_size,
        h_max,
        window_count,
        records,
    })
}

fn forecast_window(
    panel: &PredictorPanel,
    spec: &ModelSpec,
    window: usize,
    initial_size: usize,
    h_max: usize,
) -> Result<Vec<ForecastRecord>> {
    // 0-based row of the window's standing point; the fit sees responses
    // up to and including it.
    let origin = initial_size + window - 2;
    let design = build_design_through(panel, spec, origin)?;
    let fit = ols_fit(&design)?;

    let total = panel.period_count();
    let mut predictions: Vec<f64> = Vec::with_capacity(h_max);
    let mut records = Vec::with_capacity(h_max);
    for horizon in 1..=h_max {
        let target = origin + horizon;
        let row = spec.regressor_row(
            |lag| {
                let source = target - lag;
                if source > origin {
                    // A return not yet observed at the origin: feed back the
                    // prediction made for it earlier in this window.
                    predictions[source - origin - 1]
                } else {
                    panel.return_at(source)
                }
            },
            |ratio| ratio.value_at(panel, origin),
            || panel.cay_at(origin).expect("cay presence checked by caller"),
        );
        let predicted = fit.predict(&row);
        predictions.push(predicted);
        let realized = if target < total {
            Some(panel.return_at(target))
        } else {
            None
        };
        records.push(ForecastRecord {
            window,
            horizon,
            target_row: target,
            period: panel.period(target).label().to_string(),
            predicted,
            realized,
        });
    }
    Ok(records)
}
