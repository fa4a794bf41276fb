use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaled::ScaledValue;

/// Whether an order is an integer `n` (cylindrical problems in the plane)
/// or a half-integer `l + 1/2` (spherical problems in space).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderKind {
    Integer,
    HalfInteger,
}

/// A nonnegative integer or half-integer Bessel order, stored as twice its
/// value so that equality and hashing are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Order {
    twice: u32,
}

impl Order {
    pub fn integer(n: u32) -> Self {
        Self { twice: 2 * n }
    }

    /// The order `l + 1/2`.
    pub fn half_integer(l: u32) -> Self {
        Self { twice: 2 * l + 1 }
    }

    /// Order `twice / 2`.
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    /// Parses a real value that must be a nonnegative integer or half-integer.
    pub fn new(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !value.is_finite() || value < 0.0 || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(Error::InvalidOrder(value));
        }
        Ok(Self {
            twice: twice as u32,
        })
    }

    pub fn value(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn twice(&self) -> u32 {
        self.twice
    }

    pub fn kind(&self) -> OrderKind {
        if self.twice % 2 == 0 {
            OrderKind::Integer
        } else {
            OrderKind::HalfInteger
        }
    }

    pub fn is_integer(&self) -> bool {
        self.kind() == OrderKind::Integer
    }

    /// Position of this order in the ladder that starts at 0 (integers) or
    /// at -1/2 (half-integers).
    pub(crate) fn ladder_index(&self) -> usize {
        match self.kind() {
            OrderKind::Integer => (self.twice / 2) as usize,
            OrderKind::HalfInteger => (self.twice as usize + 1) / 2,
        }
    }

    /// Lowest order of the ladder this order belongs to.
    pub(crate) fn ladder_base(&self) -> f64 {
        match self.kind() {
            OrderKind::Integer => 0.0,
            OrderKind::HalfInteger => -0.5,
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// `Gamma(twice / 2)` for `twice >= 1`, by exact factorial and double
/// factorial products.
pub(crate) fn gamma_half(twice: u32) -> ScaledValue {
    debug_assert!(twice >= 1);
    if twice % 2 == 0 {
        let n = twice / 2;
        (1..n).fold(ScaledValue::ONE, |acc, k| acc.scale_real(k as f64))
    } else {
        // Gamma(l + 1/2) = sqrt(pi) (2l - 1)!! / 2^l
        let l = (twice - 1) / 2;
        (1..=l).fold(
            ScaledValue::from_real(std::f64::consts::PI.sqrt()),
            |acc, k| acc.scale_real((2 * k - 1) as f64 / 2.0),
        )
    }
}

/// `x^nu` for `x > 0` and an integer or half-integer `nu`, using repeated
/// squaring so the rounding error grows only logarithmically with `nu`.
pub(crate) fn pow_order(x: f64, twice_nu: i64) -> ScaledValue {
    let base = ScaledValue::from_real(x);
    let whole = base.powi((twice_nu.div_euclid(2)) as i32);
    if twice_nu.rem_euclid(2) == 1 {
        whole * base.sqrt()
    } else {
        whole
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_half_integers() {
        assert_eq!(Order::new(3.0).unwrap(), Order::integer(3));
        assert_eq!(Order::new(2.5).unwrap(), Order::half_integer(2));
        assert_eq!(Order::new(0.5).unwrap().kind(), OrderKind::HalfInteger);
        assert!(matches!(Order::new(-1.0), Err(Error::InvalidOrder(_))));
        assert!(matches!(Order::new(0.25), Err(Error::InvalidOrder(_))));
        assert!(matches!(Order::new(f64::NAN), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn ladder_positions() {
        assert_eq!(Order::integer(4).ladder_index(), 4);
        assert_eq!(Order::half_integer(0).ladder_index(), 1);
        assert_eq!(Order::half_integer(3).ladder_index(), 4);
    }

    #[test]
    fn gamma_matches_known_values() {
        let pi = std::f64::consts::PI;
        assert!((gamma_half(1).to_f64() - pi.sqrt()).abs() < 1e-15);
        assert!((gamma_half(2).to_f64() - 1.0).abs() < 1e-15);
        assert!((gamma_half(10).to_f64() - 24.0).abs() < 1e-13);
        // Gamma(7/2) = 15 sqrt(pi) / 8
        assert!((gamma_half(7).to_f64() - 15.0 * pi.sqrt() / 8.0).abs() < 1e-14);
        // Gamma(301) = 300! overflows f64 but not the scaled form.
        let ln_fact: f64 = (1..=300).map(|k| (k as f64).ln()).sum();
        assert!((gamma_half(602).ln_abs() - ln_fact).abs() < 1e-10);
    }

    #[test]
    fn half_integer_powers() {
        assert!((pow_order(4.0, 3).to_f64() - 8.0).abs() < 1e-14);
        assert!((pow_order(0.5, 400).ln_abs() - 200.0 * 0.5f64.ln()).abs() < 1e-12);
        assert!((pow_order(2.0, -2).to_f64() - 0.5).abs() < 1e-16);
    }
}
