//! RMSE evaluation of forecast grids: per horizon, pooled over the whole
//! grid, and side-by-side model comparison.

use crate::error::{Error, Result};
use crate::forecast::ForecastRun;

/// Root-mean-squared error over the horizon-`j` records of a run.
pub fn rmse_per_horizon(run: &ForecastRun, horizon: usize) -> Result<f64> {
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for rec in run.records_at_horizon(horizon) {
        let realized = rec.realized.ok_or(Error::MissingRealized {
            window: rec.window,
            horizon: rec.horizon,
        })?;
        sum_sq += (realized - rec.predicted).powi(2);
        count += 1;
    }
    if count == 0 {
        return Err(Error::Config(format!(
            "run has no records at horizon {horizon}"
        )));
    }
    Ok((sum_sq / count as f64).sqrt())
}

/// Pooled RMSE over every `(window, horizon)` record, flat `1/(R·h_max)`
/// weighting.
pub fn rmse_pooled(run: &ForecastRun) -> Result<f64> {
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for rec in &run.records {
        let realized = rec.realized.ok_or(Error::MissingRealized {
            window: rec.window,
            horizon: rec.horizon,
        })?;
        sum_sq += (realized - rec.predicted).powi(2);
        count += 1;
    }
    if count == 0 {
        return Err(Error::Config("run has no records".into()));
    }
    Ok((sum_sq / count as f64).sqrt())
}

/// One model's row in a comparison report.
#[derive(Debug, Clone)]
pub struct RmseRow {
    pub model: String,
    /// RMSE at horizon `j` (index `j - 1`).
    pub per_horizon: Vec<f64>,
    pub pooled: f64,
    /// Record count behind each per-horizon cell.
    pub counts: Vec<usize>,
}

/// RMSE comparison across models sharing one forecast configuration.
#[derive(Debug, Clone)]
pub struct RmseReport {
    pub h_max: usize,
    pub rows: Vec<RmseRow>,
}

impl RmseReport {
    /// Index of the row with the smallest RMSE at a horizon.
    pub fn min_at_horizon(&self, horizon: usize) -> Option<usize> {
        position_of_min(self.rows.iter().map(|r| r.per_horizon[horizon - 1]))
    }

    /// Index of the row with the smallest pooled RMSE.
    pub fn min_pooled(&self) -> Option<usize> {
        position_of_min(self.rows.iter().map(|r| r.pooled))
    }
}

fn position_of_min(values: impl Iterator<Item = f64>) -> Option<usize> {
    values
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("RMSE values are finite"))
        .map(|(i, _)| i)
}

/// Tabulate per-horizon and pooled RMSE for runs that share a frequency,
/// initial size, and horizon cap.
pub fn compare_models(runs: &[ForecastRun]) -> Result<RmseReport> {
    let first = runs.first().ok_or_else(|| {
        Error::Config("model comparison needs at least one forecast run".into())
    })?;
    for run in runs.iter().skip(1) {
        if run.frequency != first.frequency
            || run.initial_size != first.initial_size
            || run.h_max != first.h_max
        {
            return Err(Error::Config(format!(
                "run '{}' was produced under a different configuration than '{}'",
                run.model, first.model
            )));
        }
    }
    let mut rows = Vec::with_capacity(runs.len());
    for run in runs {
        let mut per_horizon = Vec::with_capacity(run.h_max);
        let mut counts = Vec::with_capacity(run.h_max);
        for j in 1..=run.h_max {
            per_horizon.push(rmse_per_horizon(run, j)?);
            counts.push(run.records_at_horizon(j).count());
        }
        rows.push(RmseRow {
            model: run.model.clone(),
            per_horizon,
            pooled: rmse_pooled(run)?,
            counts,
        });
    }
    Ok(RmseReport {
        h_max: first.h_max,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Frequency;
    use crate::forecast::ForecastRecord;
    use approx::assert_relative_eq;

    fn run_from(pairs: &[(usize, usize, f64, f64)]) -> ForecastRun {
        let h_max = pairs.iter().map(|p| p.1).max().unwrap();
        let window_count = pairs.iter().map(|p| p.0).max().unwrap();
        ForecastRun {
            model: "test".into(),
            frequency: Frequency::Quarterly,
            initial_size: 10,
            h_max,
            window_count,
            records: pairs
                .iter()
                .map(|&(w, j, pred, real)| ForecastRecord {
                    window: w,
                    horizon: j,
                    target_row: 10 + w + j,
                    period: format!("p{w}-{j}"),
                    predicted: pred,
                    realized: Some(real),
                })
                .collect(),
        }
    }

    #[test]
    fn perfect_forecast_is_zero() {
        let run = run_from(&[(1, 1, 0.05, 0.05), (2, 1, -0.01, -0.01)]);
        assert_eq!(rmse_per_horizon(&run, 1).unwrap(), 0.0);
        assert_eq!(rmse_pooled(&run).unwrap(), 0.0);
    }

    #[test]
    fn constant_offset_gives_abs_c() {
        let c = -0.037;
        let realized = [0.01, -0.02, 0.05, 0.0];
        let pairs: Vec<(usize, usize, f64, f64)> = realized
            .iter()
            .enumerate()
            .map(|(i, &r)| (i + 1, 1, r + c, r))
            .collect();
        let run = run_from(&pairs);
        assert!((rmse_per_horizon(&run, 1).unwrap() - c.abs()).abs() < 1e-12);
        assert!((rmse_pooled(&run).unwrap() - c.abs()).abs() < 1e-12);
    }

    #[test]
    fn single_record_is_abs_error() {
        let run = run_from(&[(1, 1, 0.02, 0.05)]);
        assert_relative_eq!(rmse_pooled(&run).unwrap(), 0.03, max_relative = 1e-12);
    }

    #[test]
    fn pooled_squared_is_count_weighted_mean_of_horizon_squares() {
        let pairs: Vec<(usize, usize, f64, f64)> = (1..=6)
            .flat_map(|w| {
                (1..=3).map(move |j| {
                    let pred = 0.01 * (w as f64) - 0.003 * (j as f64);
                    let real = 0.005 * (j as f64) + 0.002 * (w as f64);
                    (w, j, pred, real)
                })
            })
            .collect();
        let run = run_from(&pairs);
        let pooled = rmse_pooled(&run).unwrap();
        let mut weighted = 0.0;
        let mut total = 0usize;
        for j in 1..=3 {
            let r = rmse_per_horizon(&run, j).unwrap();
            let count = run.records_at_horizon(j).count();
            weighted += r * r * count as f64;
            total += count;
        }
        assert_relative_eq!(
            pooled * pooled,
            weighted / total as f64,
            max_relative = 1e-12
        );
    }

    #[test]
    fn rmse_invariant_under_record_permutation() {
        let pairs = [
            (1, 1, 0.01, 0.03),
            (2, 1, -0.04, 0.02),
            (3, 1, 0.015, 0.0),
        ];
        let run = run_from(&pairs);
        let mut reversed = pairs;
        reversed.reverse();
        let run_rev = run_from(&reversed);
        assert_eq!(
            rmse_pooled(&run).unwrap(),
            rmse_pooled(&run_rev).unwrap()
        );
    }

    #[test]
    fn missing_realized_names_the_record() {
        let mut run = run_from(&[(1, 1, 0.0, 0.0), (2, 1, 0.0, 0.0)]);
        run.records[1].realized = None;
        match rmse_per_horizon(&run, 1).unwrap_err() {
            Error::MissingRealized { window, horizon } => {
                assert_eq!((window, horizon), (2, 1));
            }
            other => panic!("expected MissingRealized, got {other:?}"),
        }
    }

    #[test]
    fn compare_models_requires_shared_configuration() {
        let a = run_from(&[(1, 1, 0.0, 0.1)]);
        let mut b = run_from(&[(1, 1, 0.05, 0.1)]);
        b.model = "other".into();
        let report = compare_models(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.min_pooled(), Some(1));
        assert_eq!(report.min_at_horizon(1), Some(1));

        // Identical runs produce identical rows.
        let report = compare_models(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(report.rows[0].pooled, report.rows[1].pooled);
        assert_eq!(report.rows[0].per_horizon, report.rows[1].per_horizon);

        b.initial_size = 99;
        assert!(compare_models(&[a, b]).is_err());
    }
}
