//! Complex numbers with an explicit natural-exponent, for quantities such as
//! `H_n(r)` or `e^{L sqrt(lambda)}` that leave the `f64` range.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Exponent gap (base e) beyond which the smaller addend is below one ulp.
const ADD_CUTOFF: i64 = 40;

/// A complex value stored as `mantissa * e^exponent`.
///
/// Canonical form: either the mantissa is exactly zero (and the exponent is
/// zero), or `e^-1 <= |mantissa| < e`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    mantissa: Complex64,
    exponent: i64,
}

impl Default for ScaledValue {
    fn default() -> Self {
        Self::ZERO
    }
}

impl ScaledValue {
    pub const ZERO: Self = Self {
        mantissa: Complex64::new(0.0, 0.0),
        exponent: 0,
    };
    pub const ONE: Self = Self {
        mantissa: Complex64::new(1.0, 0.0),
        exponent: 0,
    };

    /// Builds `mantissa * e^exponent` and normalizes it.
    pub fn new(mantissa: Complex64, exponent: i64) -> Self {
        let mut v = Self { mantissa, exponent };
        v.normalize();
        v
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0)
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), 0)
    }

    /// `e^z`, exact in the exponent bookkeeping for any finite `z`.
    pub fn exp(z: Complex64) -> Self {
        let k = z.re.floor();
        let frac = z.re - k;
        Self::new(Complex64::from_polar(frac.exp(), z.im), k as i64)
    }

    /// Real value `e^x` for a possibly huge `x`.
    pub fn exp_real(x: f64) -> Self {
        Self::exp(Complex64::new(x, 0.0))
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.re.is_finite() && self.mantissa.im.is_finite()
    }

    /// Converts back to a plain complex number; overflows to infinity and
    /// underflows to zero outside the `f64` range.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let e = self.exponent as f64;
        if e.abs() < 700.0 {
            return self.mantissa * e.exp();
        }
        // Split the factor so that intermediate values stay representable
        // as long as the final one is.
        let half = (e / 2.0).exp();
        self.mantissa * half * (e - e / 2.0).exp()
    }

    /// Real part as a plain `f64`.
    pub fn to_f64(&self) -> f64 {
        self.to_complex().re
    }

    /// `ln |value|`, finite for every nonzero value.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.exponent as f64
    }

    pub fn abs(&self) -> Self {
        Self::new(Complex64::new(self.mantissa.norm(), 0.0), self.exponent)
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    pub fn re(&self) -> Self {
        Self::new(Complex64::new(self.mantissa.re, 0.0), self.exponent)
    }

    pub fn im(&self) -> Self {
        Self::new(Complex64::new(self.mantissa.im, 0.0), self.exponent)
    }

    pub fn conj(&self) -> Self {
        Self {
            mantissa: self.mantissa.conj(),
            exponent: self.exponent,
        }
    }

    /// Multiplies by a plain complex factor.
    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.mantissa * factor, self.exponent)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self::new(self.mantissa * factor, self.exponent)
    }

    pub fn recip(&self) -> Self {
        Self::new(self.mantissa.inv(), -self.exponent)
    }

    pub fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let mut base = *self;
        let mut acc = Self::ONE;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        let m = if self.exponent % 2 == 0 {
            self.mantissa
        } else {
            self.mantissa * std::f64::consts::E
        };
        let e = self.exponent.div_euclid(2);
        Self::new(m.sqrt(), e)
    }

    /// `self / other` as a plain complex number; meaningful whenever the
    /// quotient itself is representable.
    pub fn ratio(&self, other: &Self) -> Complex64 {
        (*self / *other).to_complex()
    }

    fn normalize(&mut self) {
        let a = self.mantissa.norm();
        if a == 0.0 {
            self.mantissa = Complex64::new(0.0, 0.0);
            self.exponent = 0;
            return;
        }
        if !a.is_finite() {
            return;
        }
        if (-1.0..1.0).contains(&a.ln()) {
            return;
        }
        let k = a.ln().round();
        // Two half-steps keep e^{-k} representable for subnormal mantissas.
        let h = (-k / 2.0).exp();
        self.mantissa = self.mantissa * h * (-k - (-k / 2.0)).exp();
        self.exponent += k as i64;
        debug_assert!({
            let a = self.mantissa.norm();
            a >= (-1.0f64).exp() * (1.0 - 1e-15) && a < std::f64::consts::E * (1.0 + 1e-15)
        });
    }
}

impl From<Complex64> for ScaledValue {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

impl From<f64> for ScaledValue {
    fn from(x: f64) -> Self {
        Self::from_real(x)
    }
}

impl Mul for ScaledValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Div for ScaledValue {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl Add for ScaledValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = big.exponent - small.exponent;
        if gap > ADD_CUTOFF {
            return big;
        }
        let m = big.mantissa + small.mantissa * (-(gap as f64)).exp();
        Self::new(m, big.exponent)
    }
}

impl Sub for ScaledValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ScaledValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl fmt::Display for ScaledValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:e}{:+e}i)·e^{}",
            self.mantissa.re, self.mantissa.im, self.exponent
        )
    }
}
