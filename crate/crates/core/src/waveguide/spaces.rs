use num_complex::Complex64;
use serde::Serialize;

use super::TransverseBasis;
use crate::error::{Error, Result};
use crate::regularity::{series_verdict, SeriesDiagnostic};

/// Partial sums of `sum e^{2L sqrt(lambda_n)} (1 + lambda_n)^s |u_n|^2` over
/// the first `n_max` modes, with a block-ratio verdict.
///
/// `coeffs[i]` belongs to the `i`-th mode of `basis`; the series is indexed
/// from 1 in that order. Terms are summed in logarithmic form, so the weight
/// may overflow `f64` without harm.
pub fn weighted_membership(
    coeffs: &[Complex64],
    basis: &TransverseBasis,
    s: f64,
    length: f64,
    n_max: usize,
) -> Result<SeriesDiagnostic> {
    if !(length >= 0.0 && length.is_finite() && s.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "weighted space needs a finite L >= 0 and finite s, got L = {length}, s = {s}"
        )));
    }
    let first = basis.first_index();
    let terms = coeffs
        .iter()
        .take(n_max)
        .enumerate()
        .map(|(i, u)| {
            let lambda = basis.eigenvalue(first + i)?;
            let ln_u = if u.norm() == 0.0 { f64::NEG_INFINITY } else { u.norm().ln() };
            let t = 2.0 * length * lambda.sqrt() + s * (1.0 + lambda).ln() + 2.0 * ln_u;
            Ok((i as u64 + 1, t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(series_verdict(&terms))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SourceVerdict {
    WellPosed { statement: String },
    /// Traces grow like `e^{rate sqrt(lambda_n)}`.
    BlowUp { rate: f64, statement: String },
}

impl SourceVerdict {
    pub fn is_well_posed(&self) -> bool {
        matches!(self, Self::WellPosed { .. })
    }
}

/// Whether a source at distance `d` from the interface yields data in the
/// weighted space of a super-critical slab of length `L`. Data decay like
/// `e^{-d sqrt(lambda_n)}`, the weight grows like `e^{2L sqrt(lambda_n)}`.
pub fn source_distance_check(length: f64, distance: f64, s: f64) -> Result<SourceVerdict> {
    if !(length > 0.0 && distance > 0.0 && length.is_finite() && distance.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "slab length and source distance must be positive, got L = {length}, d = {distance}"
        )));
    }
    if distance >= 2.0 * length {
        Ok(SourceVerdict::WellPosed {
            statement: format!("well-posed: (f, g) in G^{s}_L with L = {length}"),
        })
    } else {
        let rate = 2.0 * length - distance;
        Ok(SourceVerdict::BlowUp {
            rate,
            statement: format!(
                "exponential blow-up rate {rate} sqrt(lambda_n); traces are not distributions of finite order"
            ),
        })
    }
}
