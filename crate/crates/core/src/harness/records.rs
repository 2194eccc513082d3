use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::ExperimentRecord;
use crate::error::{Error, Result};
use crate::numeric::linear_fit;

pub fn write_records<W: Write>(w: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(r: R) -> Result<Vec<ExperimentRecord>> {
    let mut input = csv::Reader::from_reader(r);
    let header: Vec<String> = input.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != super::CSV_HEADER {
        return Err(Error::InvalidConfig(format!("unexpected CSV header: {}", header.join(","))));
    }
    Ok(input.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Mean squared error over the successful repetitions of one method at one `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatePoint {
    pub method: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub mean_squared_error: f64,
    pub reps: usize,
}

/// Groups by `(method, N)`, keeping methods in first-appearance order and
/// `N` ascending. Failed records are skipped.
pub fn aggregate(records: &[ExperimentRecord]) -> Vec<AggregatePoint> {
    let mut methods: Vec<&str> = Vec::new();
    for r in records {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    let mut out = Vec::new();
    for m in methods {
        let mut ns: Vec<usize> = records.iter().filter(|r| r.method == m).map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        for n in ns {
            let errs: Vec<f64> = records
                .iter()
                .filter(|r| r.method == m && r.n == n && r.is_ok() && r.squared_error.is_finite())
                .map(|r| r.squared_error)
                .collect();
            if errs.is_empty() {
                continue;
            }
            out.push(AggregatePoint {
                method: m.to_string(),
                n,
                mean_squared_error: errs.iter().sum::<f64>() / errs.len() as f64,
                reps: errs.len(),
            });
        }
    }
    out
}

pub fn write_aggregate<W: Write>(w: W, points: &[AggregatePoint]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for p in points {
        out.serialize(p)?;
    }
    out.flush()?;
    Ok(())
}

/// Least-squares line through the aggregated series of one method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub r_squared: f64,
}

fn fit_with(records: &[ExperimentRecord], method: &str, x_of: impl Fn(usize) -> f64) -> Result<RateFit> {
    let points: Vec<AggregatePoint> = aggregate(records)
        .into_iter()
        .filter(|p| p.method == method && p.mean_squared_error > 0.0)
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{method}: {} usable N values, need 3",
            points.len()
        )));
    }
    let x: Vec<f64> = points.iter().map(|p| x_of(p.n)).collect();
    let y: Vec<f64> = points.iter().map(|p| p.mean_squared_error.ln()).collect();
    let f = linear_fit(&x, &y);
    Ok(RateFit {
        slope: f.slope,
        intercept: f.intercept,
        stderr: f.stderr,
        r_squared: f.r_squared,
    })
}

/// `log(mean error)` against `log N`.
pub fn fit_rate(records: &[ExperimentRecord], method: &str) -> Result<RateFit> {
    fit_with(records, method, |n| (n as f64).ln())
}

/// `log(mean error)` against `N`, for geometric convergence.
pub fn fit_semilog(records: &[ExperimentRecord], method: &str) -> Result<RateFit> {
    fit_with(records, method, |n| n as f64)
}
