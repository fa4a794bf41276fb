//! Large-order power-series forms of `J`, `Y`, `H` and their derivatives, and
//! the leading Debye forms for order and argument growing together.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bessel::Family;
use super::order::{gamma_half, pow_order, Order};
use crate::error::{Error, Result};
use crate::scaled::ScaledValue;

/// Number of correction terms kept after the leading one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeriesTruncation(u32);

impl SeriesTruncation {
    pub const DEFAULT: Self = Self(3);

    pub fn new(n: i64) -> Result<Self> {
        if n < 0 || n > u32::MAX as i64 {
            return Err(Error::InvalidTruncation(n));
        }
        Ok(Self(n as u32))
    }

    pub fn get(&self) -> u32 {
        self.0
    }
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LargeOrderFunction {
    J,
    JPrime,
    Y,
    YPrime,
    H,
    HPrime,
}

/// Bracket `sum_k t_k w_k` where `t_k` follows the given ratio and `w_k` is
/// the derivative weight.
fn bracket(terms: usize, ratio: impl Fn(usize) -> f64, weight: impl Fn(usize) -> f64) -> f64 {
    let mut t = 1.0;
    let mut sum = weight(0);
    for k in 1..=terms {
        t *= ratio(k);
        sum += t * weight(k);
    }
    sum
}

/// Cylindrical large-order form at order `nu >= 1/2`.
fn cylindrical(function: LargeOrderFunction, order: Order, r: f64, n: SeriesTruncation) -> ScaledValue {
    let nu = order.value();
    let twice = order.twice() as i64;
    let q = (r / 2.0) * (r / 2.0);
    let n = n.get() as usize;
    match function {
        LargeOrderFunction::J | LargeOrderFunction::JPrime => {
            let ratio = |k: usize| -q / (k as f64 * (nu + k as f64));
            if function == LargeOrderFunction::J {
                // (r/2)^nu / Gamma(nu + 1)
                let pre = pow_order(r / 2.0, twice) / gamma_half(order.twice() + 2);
                pre.scale_real(bracket(n, ratio, |_| 1.0))
            } else {
                // (r/2)^(nu-1) / (2 Gamma(nu))
                let pre = (pow_order(r / 2.0, twice - 2) / gamma_half(order.twice())).scale_real(0.5);
                pre.scale_real(bracket(n, ratio, |k| (nu + 2.0 * k as f64) / nu))
            }
        }
        _ => {
            // Integer orders carry only the finitely many terms with k < n.
            let terms = if order.is_integer() {
                n.min((nu as usize).saturating_sub(1))
            } else {
                n
            };
            let ratio = |k: usize| q / (k as f64 * (nu - k as f64));
            let y_pre = (gamma_half(order.twice()) * pow_order(2.0 / r, twice)).scale_real(-1.0 / PI);
            let (y, y_prime) = (
                || y_pre.scale_real(bracket(terms, ratio, |_| 1.0)),
                || {
                    // d/dr of the Y form: -(nu / r) times the reweighted bracket.
                    y_pre.scale_real(-nu / r * bracket(terms, ratio, |k| (nu - 2.0 * k as f64) / nu))
                },
            );
            match function {
                LargeOrderFunction::Y => y(),
                LargeOrderFunction::YPrime => y_prime(),
                LargeOrderFunction::H => y().scale(Complex64::i()),
                LargeOrderFunction::HPrime => y_prime().scale(Complex64::i()),
                _ => unreachable!(),
            }
        }
    }
}

/// Large-order series of a cylindrical (order `nu >= 1`) or spherical (order
/// `l >= 0`) function, truncated after `n` correction terms.
pub fn large_order(
    function: LargeOrderFunction,
    family: Family,
    order: Order,
    r: f64,
    n: SeriesTruncation,
) -> Result<ScaledValue> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(r));
    }
    match family {
        Family::Cylindrical => {
            if order.value() < 1.0 {
                return Err(Error::InvalidOrder(order.value()));
            }
            Ok(cylindrical(function, order, r, n))
        }
        Family::Spherical => {
            if !order.is_integer() {
                return Err(Error::InvalidOrder(order.value()));
            }
            let half = Order::half_integer(order.twice() / 2);
            let pre = (PI / (2.0 * r)).sqrt();
            let (value_fn, slope_fn) = match function {
                LargeOrderFunction::J | LargeOrderFunction::JPrime => {
                    (LargeOrderFunction::J, LargeOrderFunction::JPrime)
                }
                LargeOrderFunction::Y | LargeOrderFunction::YPrime => {
                    (LargeOrderFunction::Y, LargeOrderFunction::YPrime)
                }
                LargeOrderFunction::H | LargeOrderFunction::HPrime => {
                    (LargeOrderFunction::H, LargeOrderFunction::HPrime)
                }
            };
            let value = cylindrical(value_fn, half, r, n);
            Ok(match function {
                LargeOrderFunction::J | LargeOrderFunction::Y | LargeOrderFunction::H => {
                    value.scale_real(pre)
                }
                _ => {
                    let slope = cylindrical(slope_fn, half, r, n);
                    (slope - value.scale_real(1.0 / (2.0 * r))).scale_real(pre)
                }
            })
        }
    }
}

pub fn large_order_j(order: Order, r: f64, n: SeriesTruncation) -> Result<ScaledValue> {
    large_order(LargeOrderFunction::J, Family::Cylindrical, order, r, n)
}

pub fn large_order_h(order: Order, r: f64, n: SeriesTruncation) -> Result<ScaledValue> {
    large_order(LargeOrderFunction::H, Family::Cylindrical, order, r, n)
}

pub fn large_order_j_spherical(l: u32, r: f64, n: SeriesTruncation) -> Result<ScaledValue> {
    large_order(LargeOrderFunction::J, Family::Spherical, Order::integer(l), r, n)
}

pub fn large_order_h_spherical(l: u32, r: f64, n: SeriesTruncation) -> Result<ScaledValue> {
    large_order(LargeOrderFunction::H, Family::Spherical, Order::integer(l), r, n)
}

pub fn large_order_y_spherical(l: u32, r: f64, n: SeriesTruncation) -> Result<ScaledValue> {
    large_order(LargeOrderFunction::Y, Family::Spherical, Order::integer(l), r, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DebyeKind {
    J,
    JPrime,
    H,
    HPrime,
}

/// Leading Debye form of `C_n(n z)` for `0 < z < 1`, with `z = sech(alpha)`.
///
/// Accuracy degrades like `1/n` and more slowly as `z -> 1`, where the
/// turning point is approached.
pub fn debye(kind: DebyeKind, n: f64, z: f64) -> Result<ScaledValue> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(z));
    }
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidOrder(n));
    }
    let tanh = (1.0 - z * z).sqrt();
    let alpha = ((1.0 + tanh) / z).ln();
    // sinh(2 alpha) = 2 tanh(alpha) / sech(alpha)^2
    let sinh2 = 2.0 * tanh / (z * z);
    let decay = ScaledValue::exp_real(n * (tanh - alpha));
    let growth = decay.recip();
    Ok(match kind {
        DebyeKind::J => decay.scale_real(1.0 / (2.0 * PI * n * tanh).sqrt()),
        DebyeKind::JPrime => decay.scale_real((sinh2 / (4.0 * PI * n)).sqrt()),
        DebyeKind::H => growth.scale(Complex64::new(0.0, -1.0 / (PI * n * tanh / 2.0).sqrt())),
        DebyeKind::HPrime => growth.scale(Complex64::new(0.0, (sinh2 / (PI * n)).sqrt())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::bessel::{evaluate, spherical, Spherical};

    fn trunc(n: i64) -> SeriesTruncation {
        SeriesTruncation::new(n).unwrap()
    }

    #[test]
    fn negative_truncation_is_rejected() {
        assert_eq!(SeriesTruncation::new(-1), Err(Error::InvalidTruncation(-1)));
    }

    #[test]
    fn zeroth_order_is_the_prefactor() {
        // r^n / (2^n n!) at n = 5, r = 1
        let v = large_order_j(Order::integer(5), 1.0, trunc(0)).unwrap().to_f64();
        assert!((v - 1.0 / (32.0 * 120.0)).abs() < 1e-18);
        // -(i/pi) 2^n (n-1)! / r^n at n = 4, r = 2
        let h = large_order_h(Order::integer(4), 2.0, trunc(0)).unwrap().to_complex();
        assert!((h - Complex64::new(0.0, -6.0 / PI)).norm() < 1e-14);
    }

    #[test]
    fn spherical_prefactors_use_double_factorials() {
        // j_3(r) ~ r^3 / 7!!
        let v = large_order_j_spherical(3, 0.5, trunc(0)).unwrap().to_f64();
        assert!((v - 0.125 / 105.0).abs() < 1e-16);
        // h_3(r) ~ -i 5!! / r^4
        let h = large_order_h_spherical(3, 0.5, trunc(0)).unwrap().to_complex();
        assert!((h - Complex64::new(0.0, -15.0 * 16.0)).norm() < 1e-11);
    }

    #[test]
    fn converges_to_exact_values_at_large_order() {
        for n in [40u32, 80, 160] {
            let o = Order::integer(n);
            let v = evaluate(o, 1.0).unwrap();
            let j = large_order_j(o, 1.0, trunc(3)).unwrap();
            let h = large_order_h(o, 1.0, trunc(3)).unwrap();
            assert!((v.j.ratio(&j) - 1.0).norm() < 1.0 / (n as f64).powi(4));
            assert!((v.h().ratio(&h) - 1.0).norm() < 1.0 / (n as f64).powi(4));
        }
        let exact = spherical(100, 2.0, Spherical::H).unwrap();
        let approx = large_order_h_spherical(100, 2.0, trunc(3)).unwrap();
        assert!((exact.ratio(&approx) - 1.0).norm() < 1e-8);
    }

    #[test]
    fn debye_rejects_arguments_outside_the_unit_interval() {
        assert!(debye(DebyeKind::J, 10.0, 1.0).is_err());
        assert!(debye(DebyeKind::J, 10.0, 0.0).is_err());
        assert!(debye(DebyeKind::H, 10.0, 1.5).is_err());
        assert!(debye(DebyeKind::J, 10.0, 0.99).unwrap().is_finite());
    }

    #[test]
    fn debye_ratios_approach_one() {
        let mut last = f64::INFINITY;
        for n in [50u32, 200, 800] {
            let z = 0.4;
            let v = evaluate(Order::integer(n), n as f64 * z).unwrap();
            let d = debye(DebyeKind::J, n as f64, z).unwrap();
            let err = (v.j.ratio(&d) - 1.0).norm();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-3);
    }
}
