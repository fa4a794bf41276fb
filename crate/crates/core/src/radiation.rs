//! Limiting absorption in one dimension: which outgoing condition a
//! negative medium selects.
//!
//! With absorption `epsilon + i eta`, `mu + i gamma` the wave number
//! `k = (omega^2 epsilon mu)^{1/2}` has positive imaginary part, so only
//! `e^{i k x}` stays bounded as `x -> inf`. For a positive medium `k -> +k`
//! and the bounded solution tends to `e^{i k x}`, which satisfies
//! `u' - i k u = 0`. For a negative medium `k -> -k` and it tends to
//! `e^{-i k x}`, which satisfies the reversed condition `u' + i k u = 0`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular distance from the positive real axis below which
/// [`branch_sqrt`] refuses to pick a side.
pub const CUT_GUARD: f64 = 1e-14;

/// Square root with the cut on the nonnegative real axis:
/// `sqrt(|z|) e^{i arg(z) / 2}` with `arg z` in `(0, 2 pi)`, so the result
/// always has positive imaginary part.
pub fn branch_sqrt(z: Complex64) -> Result<Complex64> {
    let mut arg = z.im.atan2(z.re);
    if arg < 0.0 {
        arg += TAU;
    }
    if !(z.norm() > 0.0) || arg < CUT_GUARD || TAU - arg < CUT_GUARD {
        return Err(Error::BranchCut(format!("z = {z}")));
    }
    // the principal root has the same modulus and differs at most by sign
    let s = z.sqrt();
    Ok(if s.im > 0.0 { s } else { -s })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaterialSign {
    Positive,
    Negative,
}

/// Lossy material: permittivity `epsilon + i eta`, permeability `mu + i gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorbingMedium {
    pub epsilon: f64,
    pub mu: f64,
    pub omega: f64,
    pub eta: f64,
    pub gamma: f64,
}

impl AbsorbingMedium {
    pub fn new(epsilon: f64, mu: f64, omega: f64, eta: f64, gamma: f64) -> Result<Self> {
        let all_finite = [epsilon, mu, omega, eta, gamma].iter().all(|v| v.is_finite());
        if !all_finite || !(omega > 0.0 && eta > 0.0 && gamma > 0.0) {
            return Err(Error::InvalidConfig(
                "omega, eta and gamma must be positive and finite".into(),
            ));
        }
        if epsilon == 0.0 || mu == 0.0 || (epsilon > 0.0) != (mu > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon and mu must be nonzero with the same sign, got {epsilon} and {mu}"
            )));
        }
        Ok(Self {
            epsilon,
            mu,
            omega,
            eta,
            gamma,
        })
    }

    pub fn sign(&self) -> MaterialSign {
        if self.epsilon > 0.0 {
            MaterialSign::Positive
        } else {
            MaterialSign::Negative
        }
    }

    /// Lossless wave number `omega sqrt(epsilon mu)`.
    pub fn lossless_wavenumber(&self) -> f64 {
        self.omega * (self.epsilon * self.mu).sqrt()
    }
}

/// `(omega^2 (epsilon + i eta)(mu + i gamma))^{1/2}` on the branch of
/// [`branch_sqrt`]. The real part carries the sign of the material.
pub fn absorbing_wavenumber(m: &AbsorbingMedium) -> Result<Complex64> {
    let eps = Complex64::new(m.epsilon, m.eta);
    let mu = Complex64::new(m.mu, m.gamma);
    let k = branch_sqrt(m.omega * m.omega * eps * mu)?;
    debug_assert!(k.im > 0.0);
    Ok(k)
}

/// `1e-1, 1e-2, ..., 1e-8`.
pub fn default_absorption_sequence() -> Vec<f64> {
    (1..=8).map(|j| 10f64.powi(-j)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitRecord {
    pub sign: MaterialSign,
    /// `+k` or `-k`.
    pub limit: f64,
    /// `(eta, k_{eta, eta})`.
    pub values: Vec<(f64, Complex64)>,
    /// `|k_{eta, eta} - limit|`.
    pub deviations: Vec<f64>,
    /// `ln(dev_j / dev_{j+1}) / ln(eta_j / eta_{j+1})` for consecutive entries.
    pub rates: Vec<f64>,
    /// Deviations strictly decrease over the last five entries.
    pub monotone_tail: bool,
}

/// Follows `k_{eta, eta}` for a material with `omega = 1`,
/// `epsilon = mu = +-k`, as the absorption runs through `etas`.
pub fn limiting_k(sign: MaterialSign, k: f64, etas: &[f64]) -> Result<LimitRecord> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidConfig(format!("wave number must be positive, got {k}")));
    }
    if etas.is_empty() || etas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig(
            "absorption sequence must be nonempty and strictly decreasing".into(),
        ));
    }
    let signed = match sign {
        MaterialSign::Positive => k,
        MaterialSign::Negative => -k,
    };
    let values = etas
        .iter()
        .map(|&eta| {
            let m = AbsorbingMedium::new(signed, signed, 1.0, eta, eta)?;
            Ok((eta, absorbing_wavenumber(&m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let deviations: Vec<f64> = values.iter().map(|(_, kv)| (kv - signed).norm()).collect();
    let rates = deviations
        .windows(2)
        .zip(etas.windows(2))
        .map(|(d, e)| (d[0] / d[1]).ln() / (e[0] / e[1]).ln())
        .collect();
    let tail = &deviations[deviations.len().saturating_sub(5)..];
    let monotone_tail = tail.windows(2).all(|w| w[1] < w[0]);
    Ok(LimitRecord {
        sign,
        limit: signed,
        values,
        deviations,
        rates,
        monotone_tail,
    })
}

/// One-dimensional profiles for `x > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadiationProfile {
    /// `e^{i k x}`: the limit in a positive medium.
    OutgoingPositive { k: f64 },
    /// `e^{-i k x}`: the limit in a negative medium.
    OutgoingNegative { k: f64 },
    /// `e^{i k x} + e^{-i k x}`.
    Superposition { k: f64 },
}

impl RadiationProfile {
    pub fn wavenumber(&self) -> f64 {
        match *self {
            Self::OutgoingPositive { k } | Self::OutgoingNegative { k } | Self::Superposition { k } => k,
        }
    }

    /// `(u(x), u'(x))`.
    pub fn evaluate(&self, x: f64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        let k = self.wavenumber();
        let plus = (i * k * x).exp();
        let minus = (-i * k * x).exp();
        match self {
            Self::OutgoingPositive { .. } => (plus, i * k * plus),
            Self::OutgoingNegative { .. } => (minus, -i * k * minus),
            Self::Superposition { .. } => (plus + minus, i * k * (plus - minus)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiationResidual {
    /// `|u' - i k u|`.
    pub sommerfeld: f64,
    /// `|u' + i k u|`.
    pub reversed: f64,
}

/// Pointwise residuals of both outgoing conditions at `x > 0`.
pub fn radiation_residual(profile: RadiationProfile, x: f64) -> Result<RadiationResidual> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(x));
    }
    let k = profile.wavenumber();
    let (u, du) = profile.evaluate(x);
    let iku = Complex64::i() * k * u;
    Ok(RadiationResidual {
        sommerfeld: (du - iku).norm(),
        reversed: (du + iku).norm(),
    })
}
