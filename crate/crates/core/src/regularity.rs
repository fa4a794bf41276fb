//! Decay-rate estimation and Sobolev-type partial sums for coefficient
//! sequences.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fewest nonzero points accepted by a log-log fit.
pub const MIN_FIT_POINTS: usize = 10;
/// Dyadic block ratio at or above which a series is declared divergent.
pub const DIVERGENT_RATIO: f64 = 0.999;
/// Dyadic block ratio below which a series is declared convergent.
pub const CONVERGENT_RATIO: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub index: u64,
    pub weight: f64,
    pub value: Complex64,
}

/// Coefficients `u_m` with their Sobolev weights `w_m` (`1 + m^2` or
/// `1 + lambda_m`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffSequence {
    entries: Vec<CoeffEntry>,
}

impl CoeffSequence {
    /// Indices must be strictly increasing and weights positive and
    /// nondecreasing.
    pub fn new(entries: Vec<CoeffEntry>) -> Result<Self> {
        for w in entries.windows(2) {
            if w[1].index <= w[0].index {
                return Err(Error::InvalidConfig(format!(
                    "indices must increase strictly ({} then {})",
                    w[0].index, w[1].index
                )));
            }
            if w[1].weight < w[0].weight {
                return Err(Error::InvalidConfig(format!(
                    "weights must be nondecreasing ({} then {})",
                    w[0].weight, w[1].weight
                )));
            }
        }
        if let Some(e) = entries.iter().find(|e| !(e.weight > 0.0 && e.weight.is_finite())) {
            return Err(Error::InvalidConfig(format!(
                "weight at index {} must be positive, got {}",
                e.index, e.weight
            )));
        }
        Ok(Self { entries })
    }

    /// Sequence over `indices` with the angular weight `1 + m^2`.
    pub fn with_angular_weights(indices: impl IntoIterator<Item = u64>, value: impl Fn(u64) -> Complex64) -> Result<Self> {
        Self::new(
            indices
                .into_iter()
                .map(|m| CoeffEntry {
                    index: m,
                    weight: 1.0 + (m as f64) * (m as f64),
                    value: value(m),
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[CoeffEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Least-squares fit of `ln|value|` against `ln(index)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
    pub zeros_skipped: usize,
}

/// Fits `ln y = slope * ln x + intercept` over points with `x, y > 0`;
/// points with `y == 0` are counted and skipped.
pub fn log_log_fit(points: impl IntoIterator<Item = (f64, f64)>) -> Result<DecayFit> {
    let mut zeros = 0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (x, y) in points {
        if y == 0.0 {
            zeros += 1;
            continue;
        }
        xs.push(x.ln());
        ys.push(y.abs().ln());
    }
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{n} nonzero points, at least {MIN_FIT_POINTS} needed"
        )));
    }
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::FitUnstable("all indices coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res <= f64::EPSILON * n as f64 {
        1.0
    } else {
        0.0
    };
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
        points: n,
        zeros_skipped: zeros,
    })
}

/// Decay exponent of `|u_m|` over the indices in `fit_range`.
pub fn decay_exponent(seq: &CoeffSequence, fit_range: RangeInclusive<u64>) -> Result<DecayFit> {
    log_log_fit(
        seq.entries
            .iter()
            .filter(|e| fit_range.contains(&e.index))
            .map(|e| (e.index as f64, e.value.norm())),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Convergent,
    Divergent,
    Inconclusive,
}

/// Partial sums of a positive series and the verdict of the dyadic-block
/// test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostic {
    /// Partial sums; may reach `+inf` for divergent series with
    /// exponential growth.
    pub partial_sums: Vec<f64>,
    /// Natural logarithm of each partial sum, always finite once a nonzero
    /// term has appeared.
    pub ln_partial_sums: Vec<f64>,
    /// Ratios of consecutive complete dyadic block sums.
    pub block_ratios: Vec<f64>,
    pub verdict: Verdict,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Classifies `sum_m exp(ln_terms[m])` by comparing sums over the dyadic
/// index blocks `[2^j, 2^(j+1))`. Indices must be positive and increasing.
pub fn series_verdict(terms: &[(u64, f64)]) -> SeriesDiagnostic {
    let mut ln_partial_sums = Vec::with_capacity(terms.len());
    let mut acc = f64::NEG_INFINITY;
    for &(_, t) in terms {
        acc = log_add(acc, t);
        ln_partial_sums.push(acc);
    }
    let partial_sums = ln_partial_sums.iter().map(|l| l.exp()).collect();

    // Block j holds indices in [2^j, 2^(j+1)); a block counts as complete
    // once an index past its end has been seen.
    let mut blocks: Vec<(u32, f64)> = Vec::new();
    for &(m, t) in terms.iter().filter(|(m, _)| *m > 0) {
        let j = 63 - m.leading_zeros();
        match blocks.last_mut() {
            Some((bj, s)) if *bj == j => *s = log_add(*s, t),
            _ => blocks.push((j, t)),
        }
    }
    let last_index = terms.last().map(|&(m, _)| m).unwrap_or(0);
    let complete: Vec<(u32, f64)> = blocks
        .into_iter()
        .filter(|&(j, _)| (1u64 << (j + 1)) - 1 <= last_index)
        .collect();
    let block_ratios: Vec<f64> = complete
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| {
            if w[1].1 == f64::NEG_INFINITY {
                0.0
            } else {
                (w[1].1 - w[0].1).exp()
            }
        })
        .collect();
    let verdict = match block_ratios.last() {
        None => Verdict::Inconclusive,
        Some(&q) if q >= DIVERGENT_RATIO => Verdict::Divergent,
        Some(&q) if q < CONVERGENT_RATIO => Verdict::Convergent,
        Some(_) => Verdict::Inconclusive,
    };
    SeriesDiagnostic {
        partial_sums,
        ln_partial_sums,
        block_ratios,
        verdict,
    }
}

/// Partial sums of `sum w_m^s |u_m|^2` over the first `n_terms` entries.
pub fn sobolev_partial_sums(seq: &CoeffSequence, s: f64, n_terms: usize) -> SeriesDiagnostic {
    let terms: Vec<(u64, f64)> = seq
        .entries
        .iter()
        .take(n_terms)
        .map(|e| (e.index, s * e.weight.ln() + 2.0 * e.value.norm().ln()))
        .collect();
    series_verdict(&terms)
}
