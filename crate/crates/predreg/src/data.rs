//! Raw observation ingestion, ratio construction, lag alignment and summary
//! statistics.
//!
//! The unit of input is an [`ObservationTable`]: a date-indexed table of price
//! levels, dividend and earnings flows, the book-to-market ratio, and an
//! optional consumption-wealth ratio. From it we derive the dividend yield
//! `D_t / P_{t-1}`, the earnings-to-price ratio `E_t / P_t` and the stock
//! return `(P_t - P_{t-1} + D_t) / P_{t-1}`, then align everything into a
//! [`PredictorPanel`] where each predictor is lagged exactly one period
//! relative to the response.

use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Sampling frequency of the input data. Declared, never inferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frequency {
    Quarterly,
    Monthly,
}

impl Frequency {
    pub fn as_str(&self) -> &'static str {
        match self {
            Frequency::Quarterly => "quarterly",
            Frequency::Monthly => "monthly",
        }
    }

    fn period_example(&self) -> &'static str {
        match self {
            Frequency::Quarterly => "1952Q1",
            Frequency::Monthly => "1952-01",
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quarterly" | "q" => Ok(Frequency::Quarterly),
            "monthly" | "m" => Ok(Frequency::Monthly),
            other => Err(Error::Config(format!(
                "unknown frequency '{other}' (expected 'quarterly' or 'monthly')"
            ))),
        }
    }
}

/// One time stamp: an ordinal for ordering plus the original label for output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Period {
    ordinal: i64,
    label: String,
}

impl Period {
    /// Parse a period label under the declared frequency.
    ///
    /// Quarterly accepts `1952Q1` or `1952-Q1`; monthly accepts `1952-01`.
    pub fn parse(label: &str, frequency: Frequency, row: usize) -> Result<Self> {
        let trimmed = label.trim();
        let err = || Error::BadPeriod {
            row,
            value: label.to_string(),
            frequency: frequency.as_str(),
            expected: frequency.period_example(),
        };
        match frequency {
            Frequency::Quarterly => {
                let up = trimmed.to_ascii_uppercase();
                let (year, quarter) = up.split_once('Q').ok_or_else(err)?;
                let year: i64 = year.trim_end_matches('-').parse().map_err(|_| err())?;
                let quarter: i64 = quarter.parse().map_err(|_| err())?;
                if !(1..=4).contains(&quarter) {
                    return Err(err());
                }
                Ok(Period {
                    ordinal: year * 4 + (quarter - 1),
                    label: trimmed.to_string(),
                })
            }
            Frequency::Monthly => {
                let (year, month) = trimmed.split_once('-').ok_or_else(err)?;
                let year: i64 = year.parse().map_err(|_| err())?;
                let month: i64 = month.parse().map_err(|_| err())?;
                if !(1..=12).contains(&month) {
                    return Err(err());
                }
                Ok(Period {
                    ordinal: year * 12 + (month - 1),
                    label: trimmed.to_string(),
                })
            }
        }
    }

    /// Fabricate the period `offset` steps after an arbitrary fixed origin.
    /// Used by synthetic generators.
    pub fn synthetic(frequency: Frequency, offset: usize) -> Self {
        match frequency {
            Frequency::Quarterly => {
                let ordinal = 1900 * 4 + offset as i64;
                let year = ordinal.div_euclid(4);
                let quarter = ordinal.rem_euclid(4) + 1;
                Period {
                    ordinal,
                    label: format!("{year}Q{quarter}"),
                }
            }
            Frequency::Monthly => {
                let ordinal = 1900 * 12 + offset as i64;
                let year = ordinal.div_euclid(12);
                let month = ordinal.rem_euclid(12) + 1;
                Period {
                    ordinal,
                    label: format!("{year}-{month:02}"),
                }
            }
        }
    }

    pub fn ordinal(&self) -> i64 {
        self.ordinal
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Column-name mapping from the input header onto the table roles.
#[derive(Debug, Clone)]
pub struct Schema {
    pub date: String,
    pub price: String,
    pub dividends: String,
    pub earnings: String,
    pub bm: String,
    /// `None` means "do not look for a cay column".
    pub cay: Option<String>,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            date: "date".into(),
            price: "price".into(),
            dividends: "dividends".into(),
            earnings: "earnings".into(),
            bm: "bm".into(),
            cay: Some("cay".into()),
        }
    }
}

/// Validated raw market observations, sorted by period.
#[derive(Debug, Clone)]
pub struct ObservationTable {
    frequency: Frequency,
    periods: Vec<Period>,
    price: Vec<f64>,
    dividends: Vec<f64>,
    earnings: Vec<f64>,
    book_to_market: Vec<f64>,
    cay: Option<Vec<f64>>,
}

impl ObservationTable {
    /// Build a table from columns, enforcing the invariants: strictly
    /// increasing periods, positive prices, finite values, equal lengths,
    /// cay present for all rows or absent entirely.
    pub fn new(
        frequency: Frequency,
        periods: Vec<Period>,
        price: Vec<f64>,
        dividends: Vec<f64>,
        earnings: Vec<f64>,
        book_to_market: Vec<f64>,
        cay: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = periods.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        for (name, len) in [
            ("price", price.len()),
            ("dividends", dividends.len()),
            ("earnings", earnings.len()),
            ("bm", book_to_market.len()),
        ] {
            if len != n {
                return Err(Error::ColumnLength {
                    column: name.into(),
                    got: len,
                    expected: n,
                });
            }
        }
        if let Some(c) = &cay {
            if c.len() != n {
                return Err(Error::ColumnLength {
                    column: "cay".into(),
                    got: c.len(),
                    expected: n,
                });
            }
        }
        for i in 1..n {
            if periods[i].ordinal == periods[i - 1].ordinal {
                return Err(Error::DuplicatePeriod {
                    period: periods[i].label.clone(),
                });
            }
            if periods[i].ordinal < periods[i - 1].ordinal {
                return Err(Error::UnsortedPeriod {
                    period: periods[i].label.clone(),
                });
            }
        }
        for (row, &p) in price.iter().enumerate() {
            if p.is_nan() || p <= 0.0 {
                return Err(Error::NonPositivePrice { row, value: p });
            }
        }
        let check_finite = |name: &str, col: &[f64]| -> Result<()> {
            for (row, v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::BadValue {
                        row,
                        column: name.into(),
                        value: v.to_string(),
                    });
                }
            }
            Ok(())
        };
        check_finite("price", &price)?;
        check_finite("dividends", &dividends)?;
        check_finite("earnings", &earnings)?;
        check_finite("bm", &book_to_market)?;
        if let Some(c) = &cay {
            check_finite("cay", c)?;
        }
        Ok(ObservationTable {
            frequency,
            periods,
            price,
            dividends,
            earnings,
            book_to_market,
            cay,
        })
    }

    /// Load a comma-separated file with a header row under the given schema.
    pub fn from_csv(path: &Path, schema: &Schema, frequency: Frequency) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let headers = reader.headers()?.clone();
        let find = |name: &str| -> Result<usize> {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn {
                    column: name.to_string(),
                })
        };
        let date_idx = find(&schema.date)?;
        let price_idx = find(&schema.price)?;
        let div_idx = find(&schema.dividends)?;
        let earn_idx = find(&schema.earnings)?;
        let bm_idx = find(&schema.bm)?;
        // An explicitly mapped cay column must exist; the default schema only
        // picks it up when the header actually has one.
        let cay_idx = match &schema.cay {
            Some(name) => headers.iter().position(|h| h == name),
            None => None,
        };

        let mut periods = Vec::new();
        let mut price = Vec::new();
        let mut dividends = Vec::new();
        let mut earnings = Vec::new();
        let mut bm = Vec::new();
        let mut cay: Vec<f64> = Vec::new();

        for (row, record) in reader.records().enumerate() {
            let record = record?;
            let cell = |idx: usize, name: &str| -> Result<f64> {
                let raw = record.get(idx).unwrap_or("");
                let parsed: f64 = raw.parse().map_err(|_| Error::BadValue {
                    row,
                    column: name.to_string(),
                    value: raw.to_string(),
                })?;
                if !parsed.is_finite() {
                    return Err(Error::BadValue {
                        row,
                        column: name.to_string(),
                        value: raw.to_string(),
                    });
                }
                Ok(parsed)
            };
            periods.push(Period::parse(
                record.get(date_idx).unwrap_or(""),
                frequency,
                row,
            )?);
            price.push(cell(price_idx, "price")?);
            dividends.push(cell(div_idx, "dividends")?);
            earnings.push(cell(earn_idx, "earnings")?);
            bm.push(cell(bm_idx, "bm")?);
            if let Some(idx) = cay_idx {
                cay.push(cell(idx, "cay")?);
            }
        }

        let cay = if cay_idx.is_some() { Some(cay) } else { None };
        ObservationTable::new(frequency, periods, price, dividends, earnings, bm, cay)
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn periods(&self) -> &[Period] {
        &self.periods
    }

    pub fn price(&self) -> &[f64] {
        &self.price
    }

    pub fn dividends(&self) -> &[f64] {
        &self.dividends
    }

    pub fn earnings(&self) -> &[f64] {
        &self.earnings
    }

    pub fn book_to_market(&self) -> &[f64] {
        &self.book_to_market
    }

    pub fn cay(&self) -> Option<&[f64]> {
        self.cay.as_deref()
    }

    pub fn has_cay(&self) -> bool {
        self.cay.is_some()
    }

    /// Dividend yield `D_t / P_{t-1}`. Element `i` of the output is the yield
    /// at table row `i + 1`; the output is one shorter than the table.
    pub fn dividend_yield(&self) -> Result<Vec<f64>> {
        if self.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: self.len(),
            });
        }
        self.price
            .windows(2)
            .zip(self.dividends.iter().skip(1))
            .enumerate()
            .map(|(i, (w, &d))| {
                if w[0] <= 0.0 {
                    Err(Error::Domain(format!("price at row {i} is not positive")))
                } else {
                    Ok(d / w[0])
                }
            })
            .collect()
    }

    /// Earnings-to-price ratio `E_t / P_t`, same length as the table.
    pub fn earnings_price(&self) -> Result<Vec<f64>> {
        self.earnings
            .iter()
            .zip(self.price.iter())
            .enumerate()
            .map(|(i, (&e, &p))| {
                if p <= 0.0 {
                    Err(Error::Domain(format!("price at row {i} is not positive")))
                } else {
                    Ok(e / p)
                }
            })
            .collect()
    }

    /// Stock return `(P_t - P_{t-1} + D_t) / P_{t-1}`. Element `i` is the
    /// return at table row `i + 1`; one shorter than the table.
    pub fn stock_return(&self) -> Result<Vec<f64>> {
        if self.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: self.len(),
            });
        }
        self.price
            .windows(2)
            .zip(self.dividends.iter().skip(1))
            .enumerate()
            .map(|(i, (w, &d))| {
                if w[0] <= 0.0 {
                    Err(Error::Domain(format!("price at row {i} is not positive")))
                } else {
                    Ok((w[1] - w[0] + d) / w[0])
                }
            })
            .collect()
    }

    /// Derive ratios and returns, shift predictors by one period, and mark
    /// the usable response range. `return_lags` is the deepest return lag the
    /// panel must support.
    pub fn build_panel(&self, return_lags: usize) -> Result<PredictorPanel> {
        let n = self.len();
        let usable_start = (return_lags + 1).max(2);
        if n <= usable_start {
            return Err(Error::InsufficientData {
                needed: usable_start + 1,
                got: n,
            });
        }
        Ok(PredictorPanel {
            frequency: self.frequency,
            return_lags,
            usable: usable_start..n,
            returns: self.stock_return()?,
            dy: self.dividend_yield()?,
            ep: self.earnings_price()?,
            bm: self.book_to_market.clone(),
            cay: self.cay.clone(),
            periods: self.periods.clone(),
        })
    }
}

/// Response/predictor series aligned so every predictor is lagged one period
/// relative to the response.
///
/// Rows are addressed by table-row index. A row `t` is *usable* when the
/// return at `t`, the `return_lags` returns before it, and the previous-period
/// ratios all exist: `t` in `max(return_lags + 1, 2) .. len`.
#[derive(Debug, Clone)]
pub struct PredictorPanel {
    frequency: Frequency,
    return_lags: usize,
    usable: Range<usize>,
    /// Return at table row `i + 1`.
    returns: Vec<f64>,
    /// Dividend yield at table row `i + 1`.
    dy: Vec<f64>,
    /// Earnings-price at table row `i`.
    ep: Vec<f64>,
    bm: Vec<f64>,
    cay: Option<Vec<f64>>,
    periods: Vec<Period>,
}

impl PredictorPanel {
    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn return_lags(&self) -> usize {
        self.return_lags
    }

    pub fn has_cay(&self) -> bool {
        self.cay.is_some()
    }

    /// Number of table rows backing the panel.
    pub fn period_count(&self) -> usize {
        self.periods.len()
    }

    /// Table-row indices with a full set of lags.
    pub fn usable_rows(&self) -> Range<usize> {
        self.usable.clone()
    }

    pub fn usable_len(&self) -> usize {
        self.usable.len()
    }

    pub fn period(&self, row: usize) -> &Period {
        &self.periods[row]
    }

    /// Stock return at table row `t` (t >= 1).
    pub fn return_at(&self, t: usize) -> f64 {
        self.returns[t - 1]
    }

    /// Dividend yield at table row `t` (t >= 1).
    pub fn dy_at(&self, t: usize) -> f64 {
        self.dy[t - 1]
    }

    /// Earnings-price ratio at table row `t`.
    pub fn ep_at(&self, t: usize) -> f64 {
        self.ep[t]
    }

    /// Book-to-market ratio at table row `t`.
    pub fn bm_at(&self, t: usize) -> f64 {
        self.bm[t]
    }

    /// Consumption-wealth ratio at table row `t`, when present.
    pub fn cay_at(&self, t: usize) -> Option<f64> {
        self.cay.as_ref().map(|c| c[t])
    }

    /// Response vector over the usable range.
    pub fn y(&self) -> Vec<f64> {
        self.usable.clone().map(|t| self.return_at(t)).collect()
    }

    /// One-period-lagged dividend yield aligned with `y`.
    pub fn x_dy(&self) -> Vec<f64> {
        self.usable.clone().map(|t| self.dy_at(t - 1)).collect()
    }

    /// One-period-lagged earnings-price ratio aligned with `y`.
    pub fn x_ep(&self) -> Vec<f64> {
        self.usable.clone().map(|t| self.ep_at(t - 1)).collect()
    }

    /// One-period-lagged book-to-market ratio aligned with `y`.
    pub fn x_bm(&self) -> Vec<f64> {
        self.usable.clone().map(|t| self.bm_at(t - 1)).collect()
    }

    /// One-period-lagged consumption-wealth ratio aligned with `y`.
    pub fn x_cay(&self) -> Option<Vec<f64>> {
        self.cay
            .as_ref()
            .map(|c| self.usable.clone().map(|t| c[t - 1]).collect())
    }
}

/// Population moments plus the lag-1 autocorrelation of a series.
///
/// Moments divide by `n`; kurtosis is raw (normal = 3). On a constant series
/// the scale-dependent fields are `None` rather than NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub mean: f64,
    pub std_dev: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub lag1_autocorr: Option<f64>,
}

/// Summarize a series: mean, population standard deviation, skewness, raw
/// kurtosis and lag-1 autocorrelation `r1 = Σ(s_t-m)(s_{t+1}-m) / Σ(s_t-m)²`.
pub fn summarize(s: &[f64]) -> Result<SummaryStats> {
    let n = s.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean = s.iter().sum::<f64>() / nf;
    let m2 = s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
    let std_dev = m2.sqrt();
    if m2 == 0.0 {
        return Ok(SummaryStats {
            mean,
            std_dev: 0.0,
            skewness: None,
            kurtosis: None,
            lag1_autocorr: None,
        });
    }
    let m3 = s.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / nf;
    let m4 = s.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / nf;
    let denom = s.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let numer = s
        .windows(2)
        .map(|w| (w[0] - mean) * (w[1] - mean))
        .sum::<f64>();
    Ok(SummaryStats {
        mean,
        std_dev,
        skewness: Some(m3 / m2.powf(1.5)),
        kurtosis: Some(m4 / (m2 * m2)),
        lag1_autocorr: Some(numer / denom),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table(price: Vec<f64>, dividends: Vec<f64>) -> ObservationTable {
        let n = price.len();
        let periods = (0..n)
            .map(|i| Period::synthetic(Frequency::Quarterly, i))
            .collect();
        ObservationTable::new(
            Frequency::Quarterly,
            periods,
            price,
            dividends,
            vec![5.0; n],
            vec![0.5; n],
            None,
        )
        .unwrap()
    }

    #[test]
    fn dividend_yield_direct_substitution() {
        let t = table(vec![100.0, 110.0], vec![0.0, 2.0]);
        let dy = t.dividend_yield().unwrap();
        assert_eq!(dy.len(), 1);
        assert_relative_eq!(dy[0], 0.02);
    }

    #[test]
    fn dividend_yield_constant_series() {
        let t = table(vec![50.0; 10], vec![1.0; 10]);
        let dy = t.dividend_yield().unwrap();
        assert_eq!(dy.len(), 9);
        for v in dy {
            assert_relative_eq!(v, 0.02);
        }
    }

    #[test]
    fn earnings_price_direct_and_zero() {
        let n = 3;
        let periods = (0..n)
            .map(|i| Period::synthetic(Frequency::Quarterly, i))
            .collect();
        let t = ObservationTable::new(
            Frequency::Quarterly,
            periods,
            vec![100.0, 100.0, 100.0],
            vec![0.0; 3],
            vec![5.0, 0.0, 5.0],
            vec![0.5; 3],
            None,
        )
        .unwrap();
        let ep = t.earnings_price().unwrap();
        assert_relative_eq!(ep[0], 0.05);
        assert_relative_eq!(ep[1], 0.0);
    }

    #[test]
    fn stock_return_direct_substitution() {
        let t = table(vec![100.0, 105.0], vec![0.0, 2.0]);
        let sr = t.stock_return().unwrap();
        assert_relative_eq!(sr[0], 0.07);
    }

    #[test]
    fn stock_return_flat_price_no_dividends() {
        let t = table(vec![80.0; 6], vec![0.0; 6]);
        for v in t.stock_return().unwrap() {
            assert_relative_eq!(v, 0.0);
        }
    }

    #[test]
    fn stock_return_scale_invariant() {
        let p = vec![100.0, 104.0, 99.0, 101.5];
        let d = vec![1.0, 1.1, 1.2, 1.3];
        let base = table(p.clone(), d.clone()).stock_return().unwrap();
        let c = 7.25;
        let scaled = table(
            p.iter().map(|v| v * c).collect(),
            d.iter().map(|v| v * c).collect(),
        )
        .stock_return()
        .unwrap();
        for (a, b) in base.iter().zip(scaled.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn rejects_duplicate_period() {
        let periods = vec![
            Period::synthetic(Frequency::Quarterly, 0),
            Period::synthetic(Frequency::Quarterly, 1),
            Period::synthetic(Frequency::Quarterly, 1),
        ];
        let err = ObservationTable::new(
            Frequency::Quarterly,
            periods,
            vec![1.0; 3],
            vec![0.0; 3],
            vec![0.0; 3],
            vec![0.0; 3],
            None,
        )
        .unwrap_err();
        match err {
            Error::DuplicatePeriod { period } => assert_eq!(period, "1900Q2"),
            other => panic!("expected DuplicatePeriod, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unsorted_and_nonpositive_price() {
        let periods = vec![
            Period::synthetic(Frequency::Quarterly, 1),
            Period::synthetic(Frequency::Quarterly, 0),
        ];
        let err = ObservationTable::new(
            Frequency::Quarterly,
            periods,
            vec![1.0; 2],
            vec![0.0; 2],
            vec![0.0; 2],
            vec![0.0; 2],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnsortedPeriod { .. }));

        let periods = vec![
            Period::synthetic(Frequency::Quarterly, 0),
            Period::synthetic(Frequency::Quarterly, 1),
        ];
        let err = ObservationTable::new(
            Frequency::Quarterly,
            periods,
            vec![1.0, -2.0],
            vec![0.0; 2],
            vec![0.0; 2],
            vec![0.0; 2],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonPositivePrice { row: 1, .. }));
    }

    #[test]
    fn empty_file_is_integrity_error() {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "date,price,dividends,earnings,bm").unwrap();
        let err = ObservationTable::from_csv(f.path(), &Schema::default(), Frequency::Quarterly)
            .unwrap_err();
        assert!(matches!(err, Error::EmptyInput));
    }

    #[test]
    fn missing_column_names_the_column() {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "date,price,dividends,bm").unwrap();
        writeln!(f, "1952Q1,100,1,0.5").unwrap();
        let err = ObservationTable::from_csv(f.path(), &Schema::default(), Frequency::Quarterly)
            .unwrap_err();
        match err {
            Error::MissingColumn { column } => assert_eq!(column, "earnings"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn duplicated_date_in_file_names_the_date() {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "date,price,dividends,earnings,bm").unwrap();
        writeln!(f, "1952Q1,100,1,5,0.5").unwrap();
        writeln!(f, "1952Q1,101,1,5,0.5").unwrap();
        let err = ObservationTable::from_csv(f.path(), &Schema::default(), Frequency::Quarterly)
            .unwrap_err();
        match err {
            Error::DuplicatePeriod { period } => assert_eq!(period, "1952Q1"),
            other => panic!("expected DuplicatePeriod, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_value_is_row_level_error() {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "date,price,dividends,earnings,bm").unwrap();
        writeln!(f, "1952Q1,100,1,5,0.5").unwrap();
        writeln!(f, "1952Q2,100,nan,5,0.5").unwrap();
        let err = ObservationTable::from_csv(f.path(), &Schema::default(), Frequency::Quarterly)
            .unwrap_err();
        match err {
            Error::BadValue { row, column, .. } => {
                assert_eq!(row, 1);
                assert_eq!(column, "dividends");
            }
            other => panic!("expected BadValue, got {other:?}"),
        }
    }

    #[test]
    fn csv_loads_with_cay_and_reports_frequency() {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "date,price,dividends,earnings,bm,cay").unwrap();
        for i in 0..8 {
            let year = 1952 + i / 4;
            let q = i % 4 + 1;
            writeln!(f, "{year}Q{q},{},1,5,0.5,0.01", 100.0 + i as f64).unwrap();
        }
        let t = ObservationTable::from_csv(f.path(), &Schema::default(), Frequency::Quarterly)
            .unwrap();
        assert_eq!(t.len(), 8);
        assert!(t.has_cay());
        assert_eq!(t.frequency(), Frequency::Quarterly);
    }

    #[test]
    fn panel_usable_counts() {
        // 271 rows, 4 return lags: 271 - 1 (return diff) - 4 (lags) = 266.
        let t = table(
            (0..271).map(|i| 100.0 + (i % 7) as f64).collect(),
            vec![1.0; 271],
        );
        let panel = t.build_panel(4).unwrap();
        assert_eq!(panel.usable_len(), 266);
        assert_eq!(panel.y().len(), 266);

        let t6 = table(vec![100.0, 101.0, 99.0, 102.0, 98.0, 103.0], vec![1.0; 6]);
        assert_eq!(t6.build_panel(4).unwrap().usable_len(), 1);

        let t5 = table(vec![100.0, 101.0, 99.0, 102.0, 98.0], vec![1.0; 5]);
        assert!(matches!(
            t5.build_panel(4).unwrap_err(),
            Error::InsufficientData { .. }
        ));
    }

    #[test]
    fn panel_shift_consistency() {
        let t = table(
            (0..30).map(|i| 100.0 + ((i * 13) % 11) as f64).collect(),
            (0..30).map(|i| 1.0 + 0.1 * (i % 5) as f64).collect(),
        );
        let panel = t.build_panel(4).unwrap();
        let dy = t.dividend_yield().unwrap();
        let ep = t.earnings_price().unwrap();
        let x_dy = panel.x_dy();
        let x_ep = panel.x_ep();
        for (i, t_row) in panel.usable_rows().enumerate() {
            // dy[k] is the yield at table row k+1, so the lag at row t is dy[t-2].
            assert_eq!(x_dy[i], dy[t_row - 2]);
            assert_eq!(x_ep[i], ep[t_row - 1]);
        }
    }

    #[test]
    fn summarize_hand_computed() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        let stats = summarize(&s).unwrap();
        assert_relative_eq!(stats.mean, 3.0);
        assert_relative_eq!(stats.std_dev, 2.0_f64.sqrt());
        assert_relative_eq!(stats.lag1_autocorr.unwrap(), 0.4);
        assert_relative_eq!(stats.skewness.unwrap(), 0.0);
        assert_relative_eq!(stats.kurtosis.unwrap(), 1.7);
    }

    #[test]
    fn summarize_constant_series_flags_undefined() {
        let stats = summarize(&[2.5; 10]).unwrap();
        assert_eq!(stats.std_dev, 0.0);
        assert!(stats.skewness.is_none());
        assert!(stats.kurtosis.is_none());
        assert!(stats.lag1_autocorr.is_none());
    }

    #[test]
    fn summarize_normal_kurtosis_near_three() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240811);
        let s: Vec<f64> = (0..100_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let stats = summarize(&s).unwrap();
        assert!((stats.kurtosis.unwrap() - 3.0).abs() < 0.1);
        assert!(stats.mean.abs() < 0.02);
    }

    #[test]
    fn period_parsing() {
        let p = Period::parse("1952Q1", Frequency::Quarterly, 0).unwrap();
        assert_eq!(p.ordinal(), 1952 * 4);
        let p = Period::parse("1952-Q3", Frequency::Quarterly, 0).unwrap();
        assert_eq!(p.ordinal(), 1952 * 4 + 2);
        let p = Period::parse("1920-12", Frequency::Monthly, 0).unwrap();
        assert_eq!(p.ordinal(), 1920 * 12 + 11);
        assert!(Period::parse("1952-13", Frequency::Monthly, 0).is_err());
        assert!(Period::parse("1952Q5", Frequency::Quarterly, 0).is_err());
    }
}
