use std::fmt;

use super::SampleBatch;
use crate::distributions::CurveGrid;
use crate::error::{Error, Result};

/// Standardized deviation at or above which [`compare`] fails.
pub const COMPARE_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatKind {
    MarginalCdf,
    Histogram,
    Moment,
    IntervalProbability,
}

/// Empirical estimates with standard errors. For histograms `x` holds the
/// bin edges (one more than `values`); otherwise it is the evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalStat {
    pub kind: StatKind,
    pub indices: Vec<usize>,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
}

/// Binomial standard error, floored at `1/n` so that grid points beyond all
/// samples still carry a positive error.
fn binomial_se(p: f64, n: usize) -> f64 {
    let n = n as f64;
    (p * (1.0 - p) / n).sqrt().max(1.0 / n)
}

/// Fraction of samples whose `l`-th largest eigenvalue is `<= x`, per grid
/// point.
pub fn empirical_cdf(batch: &SampleBatch, l: usize, grid: &[f64]) -> Result<EmpiricalStat> {
    let mut v = batch.ordered(l)?;
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let values: Vec<f64> = grid
        .iter()
        .map(|&x| v.partition_point(|&s| s <= x) as f64 / n as f64)
        .collect();
    Ok(EmpiricalStat {
        kind: StatKind::MarginalCdf,
        indices: vec![l],
        x: grid.to_vec(),
        stderr: values.iter().map(|&p| binomial_se(p, n)).collect(),
        values,
    })
}

/// Probability mass per bin of the `l`-th largest eigenvalue; samples outside
/// the edges are counted in the first or last bin.
pub fn empirical_histogram(batch: &SampleBatch, l: usize, edges: &[f64]) -> Result<EmpiricalStat> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::arg(
            "histogram edges must be increasing, at least two",
        ));
    }
    let v = batch.ordered(l)?;
    let bins = edges.len() - 1;
    let mut counts = vec![0usize; bins];
    for x in &v {
        let b = edges.partition_point(|e| e <= x).clamp(1, bins) - 1;
        counts[b] += 1;
    }
    let n = v.len();
    let values: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(EmpiricalStat {
        kind: StatKind::Histogram,
        indices: vec![l],
        x: edges.to_vec(),
        stderr: values.iter().map(|&p| binomial_se(p, n)).collect(),
        values,
    })
}

/// Sample mean of a per-draw statistic (e.g. the trace or determinant),
/// with its standard error.
pub fn empirical_mean(batch: &SampleBatch, f: impl Fn(&[f64]) -> f64) -> EmpiricalStat {
    let n = batch.count() as f64;
    let xs: Vec<f64> = batch.samples().map(f).collect();
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    EmpiricalStat {
        kind: StatKind::Moment,
        indices: vec![],
        x: vec![],
        values: vec![mean],
        stderr: vec![(var / n).sqrt().max(f64::MIN_POSITIVE)],
    }
}

/// Fraction of draws with every eigenvalue in `[a, b]`.
pub fn empirical_interval_probability(batch: &SampleBatch, a: f64, b: f64) -> EmpiricalStat {
    let n = batch.count();
    let hits = batch
        .samples()
        .filter(|s| s.iter().all(|&x| x >= a && x <= b))
        .count();
    let p = hits as f64 / n as f64;
    EmpiricalStat {
        kind: StatKind::IntervalProbability,
        indices: vec![],
        x: vec![a, b],
        values: vec![p],
        stderr: vec![binomial_se(p, n)],
    }
}

/// Outcome of [`compare`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub points: usize,
    pub max_deviation: f64,
    /// Grid position and abscissa of the largest deviation.
    pub worst_index: usize,
    pub worst_x: f64,
    pub analytic: f64,
    pub empirical: f64,
    pub passed: bool,
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: max standardized deviation {:.3} at x = {} (analytic {:.6e}, empirical {:.6e}) over {} points",
            if self.passed { "PASS" } else { "FAIL" },
            self.max_deviation,
            self.worst_x,
            self.analytic,
            self.empirical,
            self.points
        )
    }
}

/// Largest `|analytic - empirical| / stderr` over a shared grid; passes when
/// it stays below [`COMPARE_THRESHOLD`]. Histograms pair with
/// [`EigenDistribution::bin_masses`](crate::EigenDistribution::bin_masses).
pub fn compare(analytic: &CurveGrid, empirical: &EmpiricalStat) -> Result<CompareReport> {
    let n = analytic.values.len();
    // histogram edges carry one more abscissa than bins
    let extra = usize::from(empirical.kind == StatKind::Histogram);
    if n == 0
        || empirical.values.len() != n
        || empirical.x.len() != n + extra
        || analytic.x.len() != n
    {
        return Err(Error::arg(format!(
            "grid mismatch: {n} analytic points vs {} empirical",
            empirical.values.len()
        )));
    }
    if let Some(i) = (0..n).find(|&i| {
        let (a, b) = (analytic.x[i], empirical.x[i]);
        (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0)
    }) {
        return Err(Error::arg(format!(
            "grid mismatch at point {i}: {} vs {}",
            analytic.x[i], empirical.x[i]
        )));
    }
    let mut worst = (0, -1.0);
    for i in 0..n {
        let d = (analytic.values[i] - empirical.values[i]).abs() / empirical.stderr[i];
        if d > worst.1 || d.is_nan() {
            worst = (i, if d.is_nan() { f64::INFINITY } else { d });
        }
    }
    let (i, d) = worst;
    Ok(CompareReport {
        points: n,
        max_deviation: d,
        worst_index: i,
        worst_x: analytic.x[i],
        analytic: analytic.values[i],
        empirical: empirical.values[i],
        passed: d < COMPARE_THRESHOLD,
    })
}
