use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the equalities `kappa = -1` and `k+ = k-`.
pub const REGIME_TOLERANCE: f64 = 1e-12;

/// The three regimes of a sign-changing transmission problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseLabel {
    /// `kappa != -1`
    Standard,
    /// `kappa = -1` and `k+ != k-`
    Critical,
    /// `kappa = -1` and `k+ = k-`
    #[serde(rename = "supercritical")]
    SuperCritical,
}

impl std::str::FromStr for CaseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "standard" => Ok(Self::Standard),
            "critical" => Ok(Self::Critical),
            "supercritical" => Ok(Self::SuperCritical),
            other => Err(Error::InvalidConfig(format!("unknown case label '{other}'"))),
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Standard => "standard",
            Self::Critical => "critical",
            Self::SuperCritical => "supercritical",
        })
    }
}

/// Contrast and wave numbers on both sides of the interface. The `+` side
/// is the positive (exterior or unbounded) medium, the `-` side the
/// negative one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub kappa: f64,
    pub k_plus: f64,
    pub k_minus: f64,
}

impl Medium {
    /// A sign-changing medium: `kappa < 0` and positive wave numbers.
    pub fn new(kappa: f64, k_plus: f64, k_minus: f64) -> Result<Self> {
        let m = Self::unchecked_sign(kappa, k_plus, k_minus)?;
        if kappa >= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "contrast must be negative, got {kappa}"
            )));
        }
        Ok(m)
    }

    /// Like [`Medium::new`] but also accepts a positive contrast, for the
    /// diagnostics that make sense in the classical case.
    pub fn unchecked_sign(kappa: f64, k_plus: f64, k_minus: f64) -> Result<Self> {
        if !kappa.is_finite() || kappa == 0.0 {
            return Err(Error::InvalidConfig(format!(
                "contrast must be finite and nonzero, got {kappa}"
            )));
        }
        for (name, k) in [("k_plus", k_plus), ("k_minus", k_minus)] {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {k}"
                )));
            }
        }
        Ok(Self {
            kappa,
            k_plus,
            k_minus,
        })
    }

    /// Contrast from the two principal coefficients, `kappa = sigma+ / sigma-`.
    pub fn from_coefficients(sigma_plus: f64, sigma_minus: f64, k_plus: f64, k_minus: f64) -> Result<Self> {
        if sigma_minus == 0.0 {
            return Err(Error::InvalidConfig("sigma_minus must be nonzero".into()));
        }
        Self::new(sigma_plus / sigma_minus, k_plus, k_minus)
    }

    pub fn classify(&self) -> CaseLabel {
        classify(self.kappa, self.k_plus, self.k_minus)
    }
}

pub fn classify(kappa: f64, k_plus: f64, k_minus: f64) -> CaseLabel {
    classify_with_tolerance(kappa, k_plus, k_minus, REGIME_TOLERANCE)
}

/// [`classify`] with a caller-chosen relative tolerance.
pub fn classify_with_tolerance(kappa: f64, k_plus: f64, k_minus: f64, tolerance: f64) -> CaseLabel {
    if (kappa + 1.0).abs() > tolerance {
        CaseLabel::Standard
    } else if (k_plus - k_minus).abs() > tolerance * k_plus.max(k_minus) {
        CaseLabel::Critical
    } else {
        CaseLabel::SuperCritical
    }
}
