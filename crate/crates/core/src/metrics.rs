//! Experiment metrics: relative SSE improvement, relative extra cost, deviation
//! from a reference solution and per-problem aggregation of paired runs.

use std::time::Duration;

use crate::error::{invalid, Result};

/// A relative quantity whose denominator may have been zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relative {
    pub value: f64,
    /// Set when the denominator was zero; `value` is then 0.
    pub degenerate: bool,
}

impl Relative {
    fn checked(num: f64, den: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        if den == 0.0 {
            Self {
                value: 0.0,
                degenerate: true,
            }
        } else {
            Self {
                value: f(num, den),
                degenerate: false,
            }
        }
    }
}

/// `1 - sse_bkm / sse_kmpp`.
pub fn delta_sse(sse_kmpp: f64, sse_bkm: f64) -> Relative {
    Relative::checked(sse_bkm, sse_kmpp, |b, k| 1.0 - b / k)
}

/// `cpu_bkm / cpu_kmpp - 1`.
pub fn delta_cpu(cpu_kmpp: Duration, cpu_bkm: Duration) -> Relative {
    Relative::checked(cpu_bkm.as_secs_f64(), cpu_kmpp.as_secs_f64(), |b, k| {
        b / k - 1.0
    })
}

/// `sse / sse_good - 1`; negative when `sse` beats the reference.
pub fn delta_good(sse: f64, sse_good: f64) -> Result<f64> {
    if sse_good.is_nan() || sse_good <= 0.0 {
        return Err(invalid("sse_good", "must be > 0"));
    }
    Ok(sse / sse_good - 1.0)
}

/// Equal-width histogram of `values` over `[lo, hi]` (values outside are
/// clamped into the end bins).
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<usize> {
    let mut h = vec![0; bins];
    if bins == 0 {
        return h;
    }
    let width = (hi - lo) / bins as f64;
    for &v in values {
        let b = if width > 0.0 {
            (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1)
        } else {
            0
        };
        h[b] += 1;
    }
    h
}

/// Number of local maxima in a histogram. A plateau counts once; a peak must
/// rise above both neighbours (or the border).
pub fn count_modes(hist: &[usize]) -> usize {
    // collapse runs of equal counts so plateaus behave like single bins
    let mut runs: Vec<usize> = Vec::with_capacity(hist.len());
    for &h in hist {
        if runs.last() != Some(&h) {
            runs.push(h);
        }
    }
    (0..runs.len())
        .filter(|&i| {
            let left = if i == 0 { 0 } else { runs[i - 1] };
            let right = runs.get(i + 1).copied().unwrap_or(0);
            runs[i] > 0 && runs[i] > left && runs[i] > right
        })
        .count()
}

/// One k-means++ run and the breathing k-means run seeded from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedRun {
    pub sse_kmpp: f64,
    pub sse_bkm: f64,
    pub cpu_kmpp: Duration,
    /// Includes the k-means++ time of the same run.
    pub cpu_bkm: Duration,
    pub rng_seed: u64,
}

impl PairedRun {
    pub fn delta_sse(&self) -> Relative {
        delta_sse(self.sse_kmpp, self.sse_bkm)
    }

    pub fn delta_cpu(&self) -> Relative {
        delta_cpu(self.cpu_kmpp, self.cpu_bkm)
    }
}

/// Mean and relative (population) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    /// Population std divided by the mean; 0 when the mean is 0.
    pub rel_std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let rel_std = if mean != 0.0 {
            var.sqrt() / mean.abs()
        } else {
            0.0
        };
        Self { mean, rel_std }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStats {
    pub sse_kmpp: MeanStd,
    pub sse_bkm: MeanStd,
    pub mean_delta_sse: f64,
    pub mean_delta_cpu: f64,
    pub runs: usize,
}

/// Column statistics over a non-empty list of paired runs.
pub fn aggregate(runs: &[PairedRun]) -> Result<RunStats> {
    if runs.is_empty() {
        return Err(invalid("runs", "need at least one run"));
    }
    let col = |f: &dyn Fn(&PairedRun) -> f64| runs.iter().map(f).collect::<Vec<_>>();
    let n = runs.len() as f64;
    Ok(RunStats {
        sse_kmpp: MeanStd::of(&col(&|r| r.sse_kmpp)),
        sse_bkm: MeanStd::of(&col(&|r| r.sse_bkm)),
        mean_delta_sse: runs.iter().map(|r| r.delta_sse().value).sum::<f64>() / n,
        mean_delta_cpu: runs.iter().map(|r| r.delta_cpu().value).sum::<f64>() / n,
        runs: runs.len(),
    })
}

/// Per-problem report; the statistics can be recomputed from `runs`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub problem: String,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub stats: RunStats,
    pub runs: Vec<PairedRun>,
}

impl ExperimentReport {
    pub fn new(
        problem: impl Into<String>,
        n: usize,
        d: usize,
        k: usize,
        runs: Vec<PairedRun>,
    ) -> Result<Self> {
        Ok(Self {
            problem: problem.into(),
            n,
            d,
            k,
            stats: aggregate(&runs)?,
            runs,
        })
    }
}
