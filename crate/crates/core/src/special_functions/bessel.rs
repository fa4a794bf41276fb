//! Cylindrical and spherical Bessel functions of integer and half-integer
//! order for real positive arguments.
//!
//! `J` comes from a downward (Miller) recurrence normalized by a sum rule or by
//! the closed forms at order ±1/2. `Y` is built upward from its two lowest
//! orders, which is the stable direction. Intermediate values are rescaled by
//! `e^-300` whenever they pass `e^300`, and the rescale count goes into the
//! exponent of the returned [`ScaledValue`].

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::order::{gamma_half, pow_order, Order};
use crate::error::{Error, Result};
use crate::scaled::ScaledValue;

pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const RESCALE_LN: i64 = 300;
const TINY_ARGUMENT: f64 = 1e-8;
const NEAR_ZERO: f64 = 1e-13;
const CF1_MAX_ITERATIONS: usize = 10_000;

fn big() -> f64 {
    (RESCALE_LN as f64).exp()
}

fn small() -> f64 {
    (-(RESCALE_LN as f64)).exp()
}

/// Which cylindrical function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cylinder {
    J,
    Y,
    H,
}

/// Which spherical function or derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spherical {
    J,
    Y,
    H,
    JPrime,
    YPrime,
    HPrime,
}

/// Function whose logarithmic derivative is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RatioKind {
    J,
    H,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Cylindrical,
    Spherical,
}

/// `J_nu`, `Y_nu` and their derivatives at one point, all in scaled form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderFunctions {
    pub j: ScaledValue,
    pub dj: ScaledValue,
    pub y: ScaledValue,
    pub dy: ScaledValue,
}

impl CylinderFunctions {
    pub fn h(&self) -> ScaledValue {
        self.j + self.y.scale(Complex64::i())
    }

    pub fn dh(&self) -> ScaledValue {
        self.dj + self.dy.scale(Complex64::i())
    }
}

fn check_argument(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(r))
    }
}

/// `J` at the requested order and one rung below (`J_1` when the order is 0),
/// plus `Y` at the two lowest rungs of the ladder.
struct JRun {
    j: ScaledValue,
    j_lower: ScaledValue,
    y_base: (f64, f64),
}

/// Leading term `(r/2)^mu / Gamma(mu + 1)`, exact to `O(r^2)`.
fn leading_j(twice_mu: i64, r: f64) -> ScaledValue {
    pow_order(r / 2.0, twice_mu) / gamma_half((twice_mu + 2) as u32)
}

fn half_integer_base(r: f64) -> (f64, f64, f64, f64) {
    let pre = (2.0 / (PI * r)).sqrt();
    let (s, c) = r.sin_cos();
    // (J_{-1/2}, J_{1/2}, Y_{-1/2}, Y_{1/2})
    (pre * c, pre * s, pre * s, -pre * c)
}

fn tiny_argument_run(order: Order, r: f64) -> JRun {
    let twice = order.twice() as i64;
    let j = leading_j(twice, r);
    if order.is_integer() {
        let j_lower = if twice == 0 {
            ScaledValue::from_real(r / 2.0)
        } else {
            leading_j(twice - 2, r)
        };
        let y0 = FRAC_2_PI * ((r / 2.0).ln() + EULER_GAMMA);
        let y1 = -FRAC_2_PI / r;
        JRun {
            j,
            j_lower,
            y_base: (y0, y1),
        }
    } else {
        let (_, _, ym, yp) = half_integer_base(r);
        JRun {
            j,
            j_lower: leading_j(twice - 2, r),
            y_base: (ym, yp),
        }
    }
}

fn miller_run(order: Order, r: f64) -> JRun {
    let base = order.ladder_base();
    let m_nu = order.ladder_index();
    let x = order.value().max(r);
    let mut m_top = (x + 30.0 + (60.0 * x).sqrt()).ceil() as usize;
    m_top = m_top.max(m_nu + 2);
    if m_top % 2 == 1 {
        m_top += 1;
    }

    // f[m] holds the unnormalized value at ladder rung m in units fixed by
    // the rescale count c[m].
    let mut f = vec![0.0f64; m_top + 2];
    let mut c = vec![0i64; m_top + 2];
    f[m_top] = 1.0;
    let mut count = 0i64;
    let (big, small) = (big(), small());
    for m in (1..=m_top).rev() {
        let mu = base + m as f64;
        let next = (2.0 * mu / r) * f[m] - f[m + 1];
        f[m - 1] = next;
        if next.abs() > big {
            count += 1;
            f[m - 1] *= small;
            f[m] *= small;
            c[m] = count;
        }
        c[m - 1] = count;
    }

    // Values in the final units; anything two rescales down is negligible.
    let g: Vec<f64> = f
        .iter()
        .zip(&c)
        .map(|(&v, &cm)| match count - cm {
            0 => v,
            1 => v * small,
            _ => 0.0,
        })
        .collect();

    let at = |m: usize, scale: f64| {
        ScaledValue::from_real(f[m] * scale)
            * ScaledValue::new(Complex64::new(1.0, 0.0), -RESCALE_LN * (count - c[m]))
    };

    if order.is_integer() {
        // J_0 + 2 sum J_{2k} = 1
        let norm = g[0] + 2.0 * g[2..].iter().step_by(2).sum::<f64>();
        let s0: f64 = (1..=m_top / 2)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * g[2 * k] / k as f64
            })
            .sum();
        let s1: f64 = (1..=m_top / 2)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * (g[2 * k - 1] - g[2 * k + 1]) / k as f64
            })
            .sum();
        let j0 = g[0] / norm;
        let j1 = g[1] / norm;
        let log_term = (r / 2.0).ln() + EULER_GAMMA;
        let y0 = FRAC_2_PI * (log_term * j0 - 2.0 * s0 / norm);
        let y1 = FRAC_2_PI * (log_term * j1 - j0 / r + s1 / norm);
        let inv = 1.0 / norm;
        let lower = if m_nu == 0 { 1 } else { m_nu - 1 };
        JRun {
            j: at(m_nu, inv),
            j_lower: at(lower, inv),
            y_base: (y0, y1),
        }
    } else {
        let (jm, jp, ym, yp) = half_integer_base(r);
        // Least-squares match of the two lowest rungs to the closed forms.
        let scale = (jm * g[0] + jp * g[1]) / (g[0] * g[0] + g[1] * g[1]);
        JRun {
            j: at(m_nu, scale),
            j_lower: at(m_nu - 1, scale),
            y_base: (ym, yp),
        }
    }
}

/// `Y` at the requested rung and one below (`Y_1` for order 0), by upward
/// recurrence from the two lowest rungs.
fn y_upward(order: Order, r: f64, y_base: (f64, f64)) -> (ScaledValue, ScaledValue) {
    let base = order.ladder_base();
    let m_nu = order.ladder_index();
    let (y0, y1) = y_base;
    if m_nu == 0 {
        return (ScaledValue::from_real(y0), ScaledValue::from_real(y1));
    }
    let (mut prev, mut cur) = (y0, y1);
    let mut count = 0i64;
    let (big, small) = (big(), small());
    for m in 1..m_nu {
        let mu = base + m as f64;
        let next = (2.0 * mu / r) * cur - prev;
        prev = cur;
        cur = next;
        if cur.abs() > big {
            cur *= small;
            prev *= small;
            count += 1;
        }
    }
    let unit = ScaledValue::new(Complex64::new(1.0, 0.0), RESCALE_LN * count);
    (
        ScaledValue::from_real(cur) * unit,
        ScaledValue::from_real(prev) * unit,
    )
}

/// `C'_nu = C_{nu-1} - (nu/r) C_nu`, or `-C_1` at order 0.
fn derivative_from_lower(order: Order, r: f64, c: ScaledValue, lower: ScaledValue) -> ScaledValue {
    if order.twice() == 0 {
        -lower
    } else {
        lower - c.scale_real(order.value() / r)
    }
}

/// Evaluates `J`, `J'`, `Y`, `Y'` together; this is the cheapest way to get
/// more than one of them.
pub fn evaluate(order: Order, r: f64) -> Result<CylinderFunctions> {
    check_argument(r)?;
    let run = if r < TINY_ARGUMENT {
        tiny_argument_run(order, r)
    } else {
        miller_run(order, r)
    };
    let (y, y_lower) = y_upward(order, r, run.y_base);
    Ok(CylinderFunctions {
        j: run.j,
        dj: derivative_from_lower(order, r, run.j, run.j_lower),
        y,
        dy: derivative_from_lower(order, r, y, y_lower),
    })
}

/// `J_nu(r)`; `r = 0` is handled analytically.
pub fn bessel_j(order: Order, r: f64) -> Result<ScaledValue> {
    if r == 0.0 {
        return Ok(if order.twice() == 0 {
            ScaledValue::ONE
        } else {
            ScaledValue::ZERO
        });
    }
    check_argument(r)?;
    let run = if r < TINY_ARGUMENT {
        tiny_argument_run(order, r)
    } else {
        miller_run(order, r)
    };
    Ok(run.j)
}

pub fn bessel_y(order: Order, r: f64) -> Result<ScaledValue> {
    Ok(evaluate(order, r)?.y)
}

/// `H_nu = J_nu + i Y_nu` (first kind).
pub fn hankel1(order: Order, r: f64) -> Result<ScaledValue> {
    Ok(evaluate(order, r)?.h())
}

pub fn derivative(order: Order, r: f64, which: Cylinder) -> Result<ScaledValue> {
    let v = evaluate(order, r)?;
    Ok(match which {
        Cylinder::J => v.dj,
        Cylinder::Y => v.dy,
        Cylinder::H => v.dh(),
    })
}

/// Spherical functions `j_l = sqrt(pi / 2r) J_{l+1/2}` and relatives.
pub fn spherical(l: u32, r: f64, which: Spherical) -> Result<ScaledValue> {
    let v = evaluate(Order::half_integer(l), r)?;
    let pre = (PI / (2.0 * r)).sqrt();
    let inv_2r = 1.0 / (2.0 * r);
    let value = |c: ScaledValue| c.scale_real(pre);
    let slope = |c: ScaledValue, dc: ScaledValue| (dc - c.scale_real(inv_2r)).scale_real(pre);
    Ok(match which {
        Spherical::J => value(v.j),
        Spherical::Y => value(v.y),
        Spherical::H => value(v.h()),
        Spherical::JPrime => slope(v.j, v.dj),
        Spherical::YPrime => slope(v.y, v.dy),
        Spherical::HPrime => slope(v.h(), v.dh()),
    })
}

/// `J'_nu / J_nu` by the first continued fraction, evaluated with the modified
/// Lentz method.
fn cf1(nu: f64, r: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let xi = 1.0 / r;
    let xi2 = 2.0 * xi;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..CF1_MAX_ITERATIONS {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    h
}

/// `C'(r) / C(r)` for `C` in `{J, H}`, cylindrical or spherical.
///
/// The `J` ratio never divides two scaled values. Zeros of `J` can only
/// occur for `r > nu`; there the ratio is refused when `|J| < 1e-13 |H|`.
pub fn ratio_cprime_c(order: Order, r: f64, kind: RatioKind, family: Family) -> Result<Complex64> {
    check_argument(r)?;
    let cyl_order = match family {
        Family::Cylindrical => order,
        Family::Spherical => {
            if !order.is_integer() {
                return Err(Error::InvalidOrder(order.value()));
            }
            Order::half_integer(order.twice() / 2)
        }
    };
    let nu = cyl_order.value();
    let correction = match family {
        Family::Cylindrical => 0.0,
        Family::Spherical => 1.0 / (2.0 * r),
    };
    let ratio = match kind {
        RatioKind::J => {
            if r > nu {
                let v = evaluate(cyl_order, r)?;
                let h = v.h();
                if (v.j.ln_abs() - h.ln_abs()) < NEAR_ZERO.ln() {
                    return Err(Error::NearZeroDenominator { order: nu, r });
                }
            }
            Complex64::new(cf1(nu, r), 0.0)
        }
        RatioKind::H => {
            // (J' + iY') / (J + iY) with real and imaginary parts formed
            // separately: for nu >> r the imaginary part is the Wronskian over
            // |H|^2, far below the rounding level of the real part.
            let v = evaluate(cyl_order, r)?;
            let modulus_sq = v.j * v.j + v.y * v.y;
            let re = (v.dj * v.j + v.dy * v.y).ratio(&modulus_sq).re;
            let im = (v.j * v.dy - v.dj * v.y).ratio(&modulus_sq).re;
            Complex64::new(re, im)
        }
    };
    Ok(ratio - correction)
}

/// `|J Y' - J' Y - 2/(pi r)| * (pi r / 2)`.
pub fn wronskian_residual(order: Order, r: f64) -> Result<f64> {
    let v = evaluate(order, r)?;
    let w = (v.j * v.dy - v.dj * v.y).to_f64();
    Ok((w * PI * r / 2.0 - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn j(n: f64, r: f64) -> f64 {
        bessel_j(Order::new(n).unwrap(), r).unwrap().to_f64()
    }

    fn y(n: f64, r: f64) -> f64 {
        bessel_y(Order::new(n).unwrap(), r).unwrap().to_f64()
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(j(0.0, 0.0), 1.0);
        assert_eq!(j(1.0, 0.0), 0.0);
        assert_eq!(j(2.5, 0.0), 0.0);
        assert!(bessel_y(Order::integer(0), 0.0).is_err());
    }

    #[test]
    fn small_argument_limits() {
        assert_relative_eq!(j(0.0, 1e-12), 1.0, max_relative = 1e-15);
        assert!(j(1.0, 1e-12).abs() < 1e-11);
        assert_relative_eq!(j(1.0, 1e-6), 5e-7, max_relative = 1e-12);
    }

    #[test]
    fn closed_forms_of_order_one_half() {
        for &r in &[0.3, 1.0, 7.5, 40.0] {
            let pre = (2.0 / (PI * r)).sqrt();
            assert_relative_eq!(j(0.5, r), pre * r.sin(), max_relative = 1e-14);
            assert_relative_eq!(y(0.5, r), -pre * r.cos(), max_relative = 1e-14);
            // J_{3/2} = pre (sin r / r - cos r)
            assert_relative_eq!(j(1.5, r), pre * (r.sin() / r - r.cos()), max_relative = 1e-12);
        }
    }

    #[test]
    fn order_zero_derivative_is_minus_j1() {
        let d = derivative(Order::integer(0), 1.0, Cylinder::J).unwrap().to_f64();
        assert_relative_eq!(d, -j(1.0, 1.0), max_relative = 1e-15);
    }

    #[test]
    fn hankel_combines_components() {
        let o = Order::integer(0);
        let h = hankel1(o, 2.0).unwrap().to_complex();
        assert_relative_eq!(h.re, j(0.0, 2.0), max_relative = 1e-15);
        assert_relative_eq!(h.im, y(0.0, 2.0), max_relative = 1e-15);
    }

    #[test]
    fn spherical_closed_forms() {
        let j0 = spherical(0, 1.0, Spherical::J).unwrap().to_f64();
        assert_relative_eq!(j0, 1f64.sin(), max_relative = 1e-14);
        let h0 = spherical(0, 2.0, Spherical::H).unwrap().to_complex();
        let expect = -Complex64::i() * Complex64::from_polar(1.0, 2.0) / 2.0;
        assert!((h0 - expect).norm() < 1e-14 * expect.norm());
        let y0 = y(0.5, 1.0);
        assert_relative_eq!(y0, -(1f64.cos()) * (2.0 / PI).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn cf1_matches_recurrence_quotient() {
        for &(n, r) in &[(0.0, 1.0), (3.0, 0.5), (10.0, 25.0), (40.5, 3.0)] {
            let o = Order::new(n).unwrap();
            let v = evaluate(o, r).unwrap();
            let q = v.dj.ratio(&v.j).re;
            assert_relative_eq!(cf1(n, r), q, max_relative = 1e-11);
        }
    }

    #[test]
    fn ratio_near_a_zero_is_refused() {
        // First zero of J_0.
        let z = 2.404_825_557_695_773;
        let err = ratio_cprime_c(Order::integer(0), z, RatioKind::J, Family::Cylindrical);
        assert!(matches!(err, Err(Error::NearZeroDenominator { .. })));
    }

    #[test]
    fn large_order_values_do_not_overflow() {
        let v = evaluate(Order::integer(300), 0.5).unwrap();
        assert!(v.j.is_finite() && v.y.is_finite());
        assert!(v.j.ln_abs() < -1000.0);
        assert!(v.y.ln_abs() > 1000.0);
        assert!(wronskian_residual(Order::integer(300), 0.5).unwrap() < 1e-12);
    }

    #[test]
    fn wronskian_examples() {
        assert!(wronskian_residual(Order::integer(0), 1.0).unwrap() < 1e-12);
        assert!(wronskian_residual(Order::integer(25), 0.3).unwrap() < 1e-11);
        assert!(wronskian_residual(Order::integer(50), 40.0).unwrap() < 1e-11);
        assert!(wronskian_residual(Order::integer(7), 3.0).unwrap() < 1e-12);
    }
}
