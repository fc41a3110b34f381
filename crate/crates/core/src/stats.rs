//! Estimators over simulation records.
//!
//! Dispersion of the per-realization estimators is the across-realization
//! standard deviation (error bars), not a standard error. Correlation
//! estimators report a standard error.

use serde::Serialize;
use thiserror::Error;

use crate::sim::{RealizationRecord, Trace, Traffic, TRACE_ACTIVE, TRACE_INTERIOR, TRACE_SINR_OK};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("no realizations with interior links to estimate from")]
    EmptyInput,
    #[error("no packets were delivered by interior links")]
    NoDeliveredPackets,
    #[error("series has zero variance; correlation is undefined")]
    DegenerateVariance,
    #[error("trace of {slots} slots is too short for lag {lag}")]
    TraceTooShort { slots: usize, lag: usize },
    #[error("trace has no interference values (use full tracing)")]
    MissingInterference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std_dev: f64,
}

impl MeanStd {
    /// Sample mean and (n−1) standard deviation; a single value has zero spread.
    pub fn from_values(values: &[f64]) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::EmptyInput);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std_dev = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(MeanStd { mean, std_dev })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Per realization: share of (interior link, slot) pairs with a non-empty
/// queue at the start of the slot, ignoring the first `warmup` slots.
pub fn estimate_nonempty(
    records: &[RealizationRecord],
    warmup: usize,
) -> Result<MeanStd, StatsError> {
    let values: Vec<f64> = records
        .iter()
        .filter_map(|r| {
            let links: u64 = r
                .interior_series
                .iter()
                .skip(warmup)
                .map(|&v| v as u64)
                .sum();
            let busy: u64 = r
                .nonempty_series
                .iter()
                .skip(warmup)
                .map(|&v| v as u64)
                .sum();
            (links > 0).then(|| busy as f64 / links as f64)
        })
        .collect();
    MeanStd::from_values(&values)
}

/// Per realization: mean delay of packets delivered by interior links that
/// arrived at or after slot `warmup`.
pub fn estimate_delay(records: &[RealizationRecord], warmup: usize) -> Result<MeanStd, StatsError> {
    let values: Vec<f64> = records
        .iter()
        .filter_map(|r| {
            let (mut count, mut total) = (0u64, 0u64);
            for d in r.links.iter().flat_map(|l| &l.delivered) {
                if d.interior && d.arrival_slot >= warmup as u64 {
                    count += 1;
                    total += d.delay();
                }
            }
            (count > 0).then(|| total as f64 / count as f64)
        })
        .collect();
    if values.is_empty() {
        return Err(StatsError::NoDeliveredPackets);
    }
    MeanStd::from_values(&values)
}

/// Per realization: fraction of interior transmission attempts that succeeded.
pub fn estimate_success(records: &[RealizationRecord]) -> Result<MeanStd, StatsError> {
    let values: Vec<f64> = records
        .iter()
        .filter(|r| r.interior_attempts > 0)
        .map(|r| r.interior_successes as f64 / r.interior_attempts as f64)
        .collect();
    MeanStd::from_values(&values)
}

/// Per realization: time-average number of packets queued at an interior link.
pub fn estimate_queue_length(
    records: &[RealizationRecord],
    warmup: usize,
) -> Result<MeanStd, StatsError> {
    let values: Vec<f64> = records
        .iter()
        .filter_map(|r| {
            let links: u64 = r
                .interior_series
                .iter()
                .skip(warmup)
                .map(|&v| v as u64)
                .sum();
            let queued: u64 = r.queued_series.iter().skip(warmup).sum();
            (links > 0).then(|| queued as f64 / links as f64)
        })
        .collect();
    MeanStd::from_values(&values)
}

/// Share of all arrivals still queued when the runs ended.
pub fn stranded_fraction(records: &[RealizationRecord]) -> f64 {
    let (mut arrivals, mut stranded) = (0u64, 0u64);
    for l in records.iter().flat_map(|r| &r.links) {
        arrivals += l.arrivals;
        stranded += l.stranded.len() as u64;
    }
    if arrivals == 0 {
        0.0
    } else {
        stranded as f64 / arrivals as f64
    }
}

/// Streaming first and second moments of (x, y) pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairMoments {
    pub n: u64,
    mean_x: f64,
    mean_y: f64,
    m2x: f64,
    m2y: f64,
    cxy: f64,
}

impl PairMoments {
    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        let n = self.n as f64;
        let dx = x - self.mean_x;
        self.mean_x += dx / n;
        let dy = y - self.mean_y;
        self.mean_y += dy / n;
        self.m2x += dx * (x - self.mean_x);
        self.m2y += dy * (y - self.mean_y);
        self.cxy += dx * (y - self.mean_y);
    }

    /// Combines two disjoint samples.
    pub fn merge(&self, other: &PairMoments) -> PairMoments {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let dx = other.mean_x - self.mean_x;
        let dy = other.mean_y - self.mean_y;
        PairMoments {
            n: self.n + other.n,
            mean_x: self.mean_x + dx * nb / n,
            mean_y: self.mean_y + dy * nb / n,
            m2x: self.m2x + other.m2x + dx * dx * na * nb / n,
            m2y: self.m2y + other.m2y + dy * dy * na * nb / n,
            cxy: self.cxy + other.cxy + dx * dy * na * nb / n,
        }
    }

    pub fn pearson(&self) -> Result<f64, StatsError> {
        if self.n < 2 {
            return Err(StatsError::EmptyInput);
        }
        // Relative guard: a constant series accumulates only rounding noise.
        let scale =
            |m: f64, m2: f64| m2 <= 1e-24 * (self.n as f64) * m.powi(2).max(f64::MIN_POSITIVE);
        if self.m2x <= 0.0
            || self.m2y <= 0.0
            || scale(self.mean_x, self.m2x)
            || scale(self.mean_y, self.m2y)
        {
            return Err(StatsError::DegenerateVariance);
        }
        Ok((self.cxy / (self.m2x * self.m2y).sqrt()).clamp(-1.0, 1.0))
    }

    /// Sample mean of x·y.
    pub fn mean_product(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        self.cxy / self.n as f64 + self.mean_x * self.mean_y
    }

    pub fn mean_x(&self) -> f64 {
        self.mean_x
    }

    pub fn mean_y(&self) -> f64 {
        self.mean_y
    }
}

/// Which per-slot quantity of a trace to correlate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    /// Interference power at the receiver, over every interior slot pair.
    Interference,
    /// SINR-success indicator, over slot pairs in which the link transmitted
    /// both times.
    Success,
}

/// Moments of `(X_t, X_{t+lag})` pooled over the traced links.
pub fn pair_moments(trace: &Trace, lag: usize, series: Series) -> Result<PairMoments, StatsError> {
    if lag == 0 || trace.num_slots <= lag + 2 {
        return Err(StatsError::TraceTooShort {
            slots: trace.num_slots,
            lag,
        });
    }
    if series == Series::Interference && trace.interference.is_none() {
        return Err(StatsError::MissingInterference);
    }
    let mut m = PairMoments::default();
    for k in 0..trace.width() {
        link_pairs(trace, k, lag, series, |x, y| m.push(x, y));
    }
    Ok(m)
}

fn link_pairs(trace: &Trace, k: usize, lag: usize, series: Series, mut f: impl FnMut(f64, f64)) {
    let need = match series {
        Series::Interference => TRACE_INTERIOR,
        Series::Success => TRACE_INTERIOR | TRACE_ACTIVE,
    };
    let value = |s: usize| match series {
        Series::Interference => trace.interference_at(s, k).unwrap_or(f64::NAN),
        Series::Success => (trace.flags_at(s, k) & TRACE_SINR_OK != 0) as u8 as f64,
    };
    for s in 0..trace.num_slots - lag {
        if trace.flags_at(s, k) & need == need && trace.flags_at(s + lag, k) & need == need {
            f(value(s), value(s + lag));
        }
    }
}

/// Pooled Pearson coefficient with the Fisher-transform standard error
/// (1 − r²)/√(n − 3). That error assumes independent pairs.
pub fn pearson_over_slots(
    trace: &Trace,
    lag: usize,
    series: Series,
) -> Result<Estimate, StatsError> {
    fisher(&pair_moments(trace, lag, series)?)
}

fn fisher(m: &PairMoments) -> Result<Estimate, StatsError> {
    let r = m.pearson()?;
    if m.n <= 3 {
        return Err(StatsError::EmptyInput);
    }
    Ok(Estimate {
        estimate: r,
        std_error: (1.0 - r * r) / ((m.n - 3) as f64).sqrt(),
    })
}

/// Mean of per-link coefficients and its standard error. Links with a
/// degenerate series are skipped.
pub fn pearson_per_link(trace: &Trace, lag: usize, series: Series) -> Result<Estimate, StatsError> {
    pair_moments(trace, lag, series)?;
    let coeffs: Vec<f64> = (0..trace.width())
        .filter_map(|k| {
            let mut m = PairMoments::default();
            link_pairs(trace, k, lag, series, |x, y| m.push(x, y));
            m.pearson().ok()
        })
        .collect();
    if coeffs.is_empty() {
        return Err(StatsError::DegenerateVariance);
    }
    let ms = MeanStd::from_values(&coeffs)?;
    Ok(Estimate {
        estimate: ms.mean,
        std_error: ms.std_dev / (coeffs.len() as f64).sqrt(),
    })
}

/// Pearson coefficient of the pooled groups with a delete-one-group
/// jackknife standard error. Groups are independent units such as
/// realizations; pairs inside a group may be dependent.
pub fn pearson_jackknife(groups: &[PairMoments]) -> Result<Estimate, StatsError> {
    let groups: Vec<&PairMoments> = groups.iter().filter(|g| g.n > 0).collect();
    if groups.len() < 2 {
        return Err(StatsError::EmptyInput);
    }
    let total = groups
        .iter()
        .fold(PairMoments::default(), |acc, g| acc.merge(g));
    let r = total.pearson()?;
    let leave_out: Vec<f64> = (0..groups.len())
        .map(|i| {
            groups
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(PairMoments::default(), |acc, (_, g)| acc.merge(g))
                .pearson()
        })
        .collect::<Result<_, _>>()?;
    let g = leave_out.len() as f64;
    let mean = leave_out.iter().sum::<f64>() / g;
    let var = leave_out.iter().map(|v| (v - mean).powi(2)).sum::<f64>() * (g - 1.0) / g;
    Ok(Estimate {
        estimate: r,
        std_error: var.sqrt(),
    })
}

/// Lag-`lag` autocorrelation of a single series with the Fisher standard error.
pub fn pearson_series(x: &[f64], lag: usize) -> Result<Estimate, StatsError> {
    if lag == 0 || x.len() <= lag + 2 {
        return Err(StatsError::TraceTooShort {
            slots: x.len(),
            lag,
        });
    }
    let mut m = PairMoments::default();
    for (a, b) in x.iter().zip(&x[lag..]) {
        m.push(*a, *b);
    }
    fisher(&m)
}

/// Per-realization moments of a traced series, in record order.
pub fn realization_moments(
    records: &[RealizationRecord],
    lag: usize,
    series: Series,
) -> Result<Vec<PairMoments>, StatsError> {
    records
        .iter()
        .filter_map(|r| r.trace.as_ref())
        .map(|t| pair_moments(t, lag, series))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimEstimates {
    pub nonempty_prob: MeanStd,
    pub mean_delay: Option<MeanStd>,
    pub success_prob: Option<MeanStd>,
    pub queue_length: MeanStd,
    pub interference_corr: Option<Estimate>,
    pub success_corr: Option<Estimate>,
    pub stranded_fraction: f64,
}

/// Aggregates a run. Correlations are computed for backlogged runs with
/// traces, pooled over realizations with jackknife errors.
pub fn summarize(
    records: &[RealizationRecord],
    traffic: Traffic,
    warmup: usize,
    lag: usize,
) -> Result<SimEstimates, StatsError> {
    let mean_delay = match estimate_delay(records, warmup) {
        Ok(d) => Some(d),
        Err(StatsError::NoDeliveredPackets) => None,
        Err(e) => return Err(e),
    };
    let corr = |series| {
        if traffic != Traffic::Backlogged {
            return None;
        }
        realization_moments(records, lag, series)
            .ok()
            .and_then(|g| pearson_jackknife(&g).ok())
    };
    Ok(SimEstimates {
        nonempty_prob: estimate_nonempty(records, warmup)?,
        mean_delay,
        success_prob: estimate_success(records).ok(),
        queue_length: estimate_queue_length(records, warmup)?,
        interference_corr: corr(Series::Interference),
        success_corr: corr(Series::Success),
        stranded_fraction: stranded_fraction(records),
    })
}
