//! Arbitrary-precision power-series evaluation of `J` and `Y`, used as the
//! ground truth for the double-precision engine.
//!
//! Each call owns its big-number workspace. Summation stops once a geometric
//! tail bound is below `10^-digits` relative to the partial sum, and the
//! working precision is raised until two precisions agree, which certifies
//! that cancellation has not eaten the requested digits.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_complex::Complex64;

use super::order::Order;
use crate::error::{Error, Result};
use crate::scaled::ScaledValue;

const RM: RoundingMode = RoundingMode::ToEven;
const MAX_DIGITS: u32 = 100;
const MAX_ORDER: f64 = 300.0;
const MAX_ARGUMENT: f64 = 100.0;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// A real number carried at high precision together with the number of
/// decimal digits it is certified to.
#[derive(Clone, Debug)]
pub struct HighPrecision {
    value: BigFloat,
    digits: u32,
}

impl HighPrecision {
    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.value
    }

    /// Nearest `f64` (overflows to infinity, underflows to zero).
    pub fn to_f64(&self) -> f64 {
        bigfloat_to_f64(&self.value)
    }

    /// Scaled form that keeps the full double-precision mantissa even when
    /// the value is far outside the `f64` range.
    pub fn to_scaled(&self) -> ScaledValue {
        if self.value.is_zero() {
            return ScaledValue::ZERO;
        }
        let p = self.value.mantissa_max_bit_len().unwrap_or(128).max(128);
        let mut cc = consts();
        let ln_abs = self.value.abs().ln(p, RM, &mut cc);
        let k = bigfloat_to_f64(&ln_abs).round();
        let shift = BigFloat::from_f64(-k, p).exp(p, RM, &mut cc);
        let m = bigfloat_to_f64(&self.value.mul(&shift, p, RM));
        ScaledValue::new(Complex64::new(m, 0.0), k as i64)
    }

    /// Decimal mantissa in `[1, 10)` with `digits` significant digits and the
    /// matching power of ten.
    pub fn to_decimal(&self) -> (String, i64) {
        if self.value.is_zero() {
            return ("0".to_string(), 0);
        }
        let digits = self.digits.max(1) as usize;
        let p = self.value.mantissa_max_bit_len().unwrap_or(128).max(128) + 64;
        let mut cc = consts();
        let ten = BigFloat::from_u64(10, p);
        let ln10 = ten.ln(p, RM, &mut cc);
        let log10 = self.value.abs().ln(p, RM, &mut cc).div(&ln10, p, RM);
        let mut e10 = bigfloat_to_f64(&log10).floor() as i64;
        let scale_to = |e: i64| -> BigFloat {
            // |value| * 10^(digits - 1 - e), rounded to an integer
            let shift = digits as i64 - 1 - e;
            let pow = ten.powi(shift.unsigned_abs() as usize, p, RM);
            let a = self.value.abs();
            if shift >= 0 {
                a.mul(&pow, p, RM)
            } else {
                a.div(&pow, p, RM)
            }
        };
        let mut scaled = scale_to(e10);
        let limit = ten.powi(digits, p, RM);
        let half = BigFloat::from_f64(0.5, p);
        let mut int = scaled.add(&half, p, RM).floor();
        if int.cmp(&limit).map_or(false, |c| c >= 0) {
            e10 += 1;
            scaled = scale_to(e10);
            int = scaled.add(&half, p, RM).floor();
        }
        let mut text = int
            .format(astro_float::Radix::Dec, RM, &mut cc)
            .ok()
            .and_then(|s| integer_digits(&s))
            .unwrap_or_default();
        text.truncate(digits);
        while text.len() < digits {
            text.push('0');
        }
        let sign = if self.value.is_negative() { "-" } else { "" };
        let mantissa = if digits > 1 {
            format!("{sign}{}.{}", &text[..1], &text[1..])
        } else {
            format!("{sign}{text}")
        };
        (mantissa, e10)
    }
}

/// Extracts the digits of an integer from astro-float's decimal formatting,
/// which prints `d.ddd e+N`.
fn integer_digits(s: &str) -> Option<String> {
    let (mant, exp) = match s.find('e') {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let mant = mant.trim_start_matches('-');
    let (int_part, frac_part) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    let mut digits: String = format!("{int_part}{frac_part}");
    let point = int_part.len() as i64 + exp;
    if point < 0 {
        return Some("0".into());
    }
    let point = point as usize;
    if digits.len() < point {
        digits.extend(std::iter::repeat('0').take(point - digits.len()));
    }
    digits.truncate(point);
    let trimmed = digits.trim_start_matches('0');
    Some(if trimmed.is_empty() { "0".into() } else { trimmed.into() })
}

fn consts() -> Consts {
    Consts::new().expect("constant cache allocation")
}

/// Rounds a big float to the nearest `f64` through its raw binary parts
/// (`0.m * 2^e`).
fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _, sign, exponent, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    if words.iter().all(|&w| w == 0) {
        return 0.0;
    }
    let top = words.len() - 1;
    let hi = words[top] as f64;
    let lo = if top > 0 { words[top - 1] as f64 } else { 0.0 };
    let frac = (hi + lo / 2f64.powi(64)) / 2f64.powi(64);
    let magnitude = frac * 2f64.powi(exponent.clamp(-1100, 1100));
    let magnitude = if exponent > 1100 {
        f64::INFINITY
    } else if exponent < -1100 {
        0.0
    } else {
        magnitude
    };
    if sign == Sign::Neg {
        -magnitude
    } else {
        magnitude
    }
}

fn check_inputs(order: Order, r: f64, digits: u32) -> Result<()> {
    if digits == 0 || digits > MAX_DIGITS {
        return Err(Error::PrecisionUnreachable(format!(
            "{digits} digits requested; the oracle supports 1 to {MAX_DIGITS}"
        )));
    }
    if order.value() > MAX_ORDER {
        return Err(Error::PrecisionUnreachable(format!(
            "order {} above the oracle limit {MAX_ORDER}",
            order.value()
        )));
    }
    if !(r.is_finite() && (0.0..=MAX_ARGUMENT).contains(&r)) {
        return Err(Error::Domain(r));
    }
    Ok(())
}

/// Bits needed for `digits` decimal digits after losing `loss10` digits to
/// cancellation.
fn bits_for(digits: u32, loss10: f64) -> usize {
    (((digits as f64 + loss10.max(0.0) + 10.0) * LOG2_10).ceil() as usize + 64).next_multiple_of(64)
}

/// `log10` of the largest term `(r/2)^(2k+nu) / (k! Gamma(nu+k+1))` relative to
/// `1`, a cancellation-loss estimate valid for all the series below.
fn peak_log10(nu: f64, r: f64) -> f64 {
    let q = (r / 2.0) * (r / 2.0);
    let mut log_t = 0.0f64;
    let mut peak = 0.0f64;
    let mut k = 1.0;
    while k < 10.0 + r * 2.0 {
        log_t += (q / (k * (nu + k).max(1.0))).ln();
        peak = peak.max(log_t);
        k += 1.0;
    }
    peak / std::f64::consts::LN_10
}

/// Runs `eval` at increasing precision until two consecutive precisions
/// agree to `digits + 5` digits.
fn certified(
    digits: u32,
    loss10: f64,
    eval: impl Fn(usize, &mut Consts) -> Result<BigFloat>,
) -> Result<HighPrecision> {
    let mut cc = consts();
    let mut p = bits_for(digits, loss10);
    let mut prev = eval(p, &mut cc)?;
    for _ in 0..6 {
        let next_p = p + 128 + p / 2;
        let next = eval(next_p, &mut cc)?;
        let diff = prev.sub(&next, next_p, RM).abs();
        let tol = BigFloat::from_f64(10f64.powi(-(digits as i32 + 5)), next_p)
            .mul(&next.abs(), next_p, RM);
        if next.is_zero() && prev.is_zero() || diff.cmp(&tol).map_or(false, |c| c <= 0) {
            return Ok(HighPrecision {
                value: next,
                digits,
            });
        }
        prev = next;
        p = next_p;
    }
    Err(Error::PrecisionUnreachable(
        "precision escalation did not stabilize".into(),
    ))
}

/// Sums `first * prod ratio(k)` until the tail is certified below
/// `10^-(digits+5)` of the partial sum. `ratio_bound(k)` must bound every
/// later term ratio once it drops below one half.
fn sum_series(
    p: usize,
    digits: u32,
    first: BigFloat,
    mut next_term: impl FnMut(usize, &BigFloat) -> BigFloat,
    ratio_bound: impl Fn(usize) -> f64,
) -> Result<BigFloat> {
    let tol = 10f64.powi(-(digits as i32 + 5));
    let mut term = first.clone();
    let mut sum = first;
    for k in 1..200_000usize {
        term = next_term(k, &term);
        sum = sum.add(&term, p, RM);
        let q = ratio_bound(k + 1);
        if q < 0.5 && (term.is_zero() || relative(&term, &sum, p) * q / (1.0 - q) <= tol) {
            return Ok(sum);
        }
    }
    Err(Error::PrecisionUnreachable(
        "series tail could not be certified".into(),
    ))
}

/// `|term / sum|` as an `f64`; the quotient stays representable even when
/// both operands underflow `f64`.
fn relative(term: &BigFloat, sum: &BigFloat, p: usize) -> f64 {
    if sum.is_zero() {
        return f64::INFINITY;
    }
    bigfloat_to_f64(&term.div(sum, p, RM)).abs()
}

fn big(x: f64, p: usize) -> BigFloat {
    BigFloat::from_f64(x, p)
}

fn int(n: u64, p: usize) -> BigFloat {
    BigFloat::from_u64(n, p)
}

/// `J_nu(r)` by direct summation of its power series.
pub fn series_oracle_j(order: Order, r: f64, digits: u32) -> Result<HighPrecision> {
    check_inputs(order, r, digits)?;
    if r == 0.0 {
        let v = if order.twice() == 0 { 1 } else { 0 };
        return Ok(HighPrecision {
            value: int(v, 128),
            digits,
        });
    }
    let nu = order.value();
    certified(digits, peak_log10(nu, r), |p, cc| j_series(order, r, p, digits, cc))
}

fn j_series(order: Order, r: f64, p: usize, digits: u32, cc: &mut Consts) -> Result<BigFloat> {
    let half_r = big(r, p).div(&int(2, p), p, RM);
    let q = half_r.mul(&half_r, p, RM).neg();
    let twice = order.twice() as u64;
    // first = (r/2)^nu / Gamma(nu + 1)
    let mut first = half_r.powi((twice / 2) as usize, p, RM);
    let mut gamma = int(1, p);
    if twice % 2 == 0 {
        for k in 2..=twice / 2 {
            gamma = gamma.mul(&int(k, p), p, RM);
        }
    } else {
        first = first.mul(&half_r.sqrt(p, RM), p, RM);
        // Gamma(l + 3/2) = sqrt(pi) (2l + 1)!! / 2^(l+1)
        let l = (twice - 1) / 2;
        gamma = cc.pi(p, RM).sqrt(p, RM);
        for k in 0..=l {
            gamma = gamma.mul(&int(2 * k + 1, p), p, RM).div(&int(2, p), p, RM);
        }
    }
    let first = first.div(&gamma, p, RM);
    let nu = order.value();
    let rr = (r / 2.0) * (r / 2.0);
    sum_series(
        p,
        digits,
        first,
        |k, t| {
            // t_k = t_{k-1} * (-(r/2)^2) * 2 / (k (2 nu + 2k))
            let den = int(k as u64, p).mul(&int(twice + 2 * k as u64, p), p, RM);
            t.mul(&q, p, RM).mul(&int(2, p), p, RM).div(&den, p, RM)
        },
        |k| rr / (k as f64 * (nu + k as f64)),
    )
}

/// Euler's constant by the Brent–McMillan sums, accurate to `p` bits.
fn euler_gamma(p: usize, cc: &mut Consts) -> BigFloat {
    let digits = p as f64 / LOG2_10;
    let n = (digits * std::f64::consts::LN_10 / 4.0).ceil() as u64 + 2;
    let wp = p + (2.0 * n as f64 * std::f64::consts::LOG2_E).ceil() as usize + 64;
    let nn = int(n * n, wp);
    let mut a = int(n, wp).ln(wp, RM, cc).neg();
    let mut b = int(1, wp);
    let mut u = a.clone();
    let mut v = b.clone();
    let k_max = (3.6 * n as f64).ceil() as u64 + 10;
    for k in 1..=k_max {
        let kk = int(k, wp);
        b = b.mul(&nn, wp, RM).div(&kk.mul(&kk, wp, RM), wp, RM);
        a = a.mul(&nn, wp, RM).div(&kk, wp, RM).add(&b, wp, RM).div(&kk, wp, RM);
        u = u.add(&a, wp, RM);
        v = v.add(&b, wp, RM);
    }
    u.div(&v, p, RM)
}

/// `Y_nu(r)`: the Neumann series with harmonic numbers and Euler's constant
/// for integer orders, and the finite-prefactor series of `J_{-nu}` for
/// half-integer orders.
pub fn series_oracle_y(order: Order, r: f64, digits: u32) -> Result<HighPrecision> {
    check_inputs(order, r, digits)?;
    if r == 0.0 {
        return Err(Error::Domain(r));
    }
    let nu = order.value();
    // The leading finite sum of the integer-order form can reach
    // (n-1)! (2/r)^n; the peak estimate already bounds the entire part.
    let loss = peak_log10(nu, r);
    if order.is_integer() {
        let y_loss = loss + 2.0 * peak_log10(0.0, r);
        certified(digits, y_loss, |p, cc| y_integer(order, r, p, digits, cc))
    } else {
        certified(digits, 2.0 * peak_log10(0.0, r), |p, cc| {
            y_half_integer(order, r, p, digits, cc)
        })
    }
}

fn y_integer(order: Order, r: f64, p: usize, digits: u32, cc: &mut Consts) -> Result<BigFloat> {
    let n = (order.twice() / 2) as u64;
    let pi = cc.pi(p, RM);
    let half_r = big(r, p).div(&int(2, p), p, RM);
    let q = half_r.mul(&half_r, p, RM);
    let gamma = euler_gamma(p, cc);
    let j = j_series(order, r, p, digits + 5, cc)?;

    // (2/pi)(ln(r/2) + gamma) J_n
    let log_part = half_r
        .ln(p, RM, cc)
        .add(&gamma, p, RM)
        .mul(&j, p, RM)
        .mul(&int(2, p), p, RM)
        .div(&pi, p, RM);

    // (1/pi) sum_{k<n} (n-k-1)!/k! (r/2)^(2k-n)
    let mut finite = int(0, p);
    if n > 0 {
        // k = 0 term: (n-1)! (r/2)^-n
        let mut fact = int(1, p);
        for m in 2..n {
            fact = fact.mul(&int(m, p), p, RM);
        }
        let mut t = fact.div(&half_r.powi(n as usize, p, RM), p, RM);
        finite = t.clone();
        for k in 1..n {
            // ratio: q / (k (n - k))
            let den = int(k, p).mul(&int(n - k, p), p, RM);
            t = t.mul(&q, p, RM).div(&den, p, RM);
            finite = finite.add(&t, p, RM);
        }
    }
    let finite = finite.div(&pi, p, RM);

    // (1/pi) sum_k (-1)^k (r/2)^(2k+n) (H_k + H_{n+k}) / (k! (n+k)!)
    let mut harm_n = int(0, p);
    for m in 1..=n {
        harm_n = harm_n.add(&int(1, p).div(&int(m, p), p, RM), p, RM);
    }
    let mut fact_n = int(1, p);
    for m in 2..=n {
        fact_n = fact_n.mul(&int(m, p), p, RM);
    }
    let base = half_r.powi(n as usize, p, RM).div(&fact_n, p, RM);
    let mut harm_k = int(0, p);
    let mut harm_nk = harm_n.clone();
    let mut sum = base.mul(&harm_nk, p, RM);
    let mut t = base;
    let rr = r * r / 4.0;
    let tol = 10f64.powi(-(digits as i32 + 5));
    let mut k = 0u64;
    loop {
        k += 1;
        let den = int(k, p).mul(&int(n + k, p), p, RM);
        t = t.mul(&q, p, RM).div(&den, p, RM).neg();
        harm_k = harm_k.add(&int(1, p).div(&int(k, p), p, RM), p, RM);
        harm_nk = harm_nk.add(&int(1, p).div(&int(n + k, p), p, RM), p, RM);
        let term = t.mul(&harm_k.add(&harm_nk, p, RM), p, RM);
        sum = sum.add(&term, p, RM);
        let qk = rr / ((k + 1) as f64 * (n + k + 1) as f64) * (1.0 + 1.0 / (k + 1) as f64);
        if qk < 0.5 && relative(&term, &sum, p) * qk / (1.0 - qk) <= tol {
            break;
        }
        if k > 200_000 {
            return Err(Error::PrecisionUnreachable(
                "Neumann series tail could not be certified".into(),
            ));
        }
    }
    let series = sum.div(&pi, p, RM);
    Ok(log_part.sub(&finite, p, RM).sub(&series, p, RM))
}

fn y_half_integer(order: Order, r: f64, p: usize, digits: u32, cc: &mut Consts) -> Result<BigFloat> {
    // Y_{l+1/2}(r) = -(2l-1)!! / r^l * sqrt(2 / (pi r)) * sum_k t_k,
    // t_0 = 1, t_k = t_{k-1} (-r^2/2) / (k (2k - 2l - 1)).
    let l = ((order.twice() - 1) / 2) as i64;
    let pi = cc.pi(p, RM);
    let rb = big(r, p);
    let mut dfact = int(1, p);
    for m in (1..2 * l).step_by(2) {
        dfact = dfact.mul(&int(m as u64, p), p, RM);
    }
    let pre = dfact
        .div(&rb.powi(l as usize, p, RM), p, RM)
        .mul(
            &int(2, p).div(&pi.mul(&rb, p, RM), p, RM).sqrt(p, RM),
            p,
            RM,
        )
        .neg();
    let step = rb.mul(&rb, p, RM).div(&int(2, p), p, RM).neg();
    let sum = sum_series(
        p,
        digits,
        int(1, p),
        |k, t| {
            let den = BigFloat::from_i64(k as i64 * (2 * k as i64 - 2 * l - 1), p);
            t.mul(&step, p, RM).div(&den, p, RM)
        },
        |k| {
            let d = (2 * k as i64 - 2 * l - 1) as f64;
            if d <= 0.0 {
                f64::INFINITY
            } else {
                r * r / (2.0 * k as f64 * d)
            }
        },
    )?;
    Ok(pre.mul(&sum, p, RM))
}

/// One golden-value row: `nu,r,value_mantissa,value_exponent,digits`, with a
/// decimal mantissa in `[1, 10)` and a power-of-ten exponent.
pub fn golden_csv_row(order: Order, r: f64, value: &HighPrecision) -> String {
    let (mantissa, exponent) = value.to_decimal();
    format!(
        "{},{},{},{},{}",
        order.value(),
        r,
        mantissa,
        exponent,
        value.digits()
    )
}

pub const GOLDEN_CSV_HEADER: &str = "nu,r,value_mantissa,value_exponent,digits";
