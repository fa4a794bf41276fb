use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::waveguide::TransverseBasis;

/// `e^{i n theta} / sqrt(2 pi)`.
pub fn fourier(n: i64, theta: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), n as f64 * theta)
}

/// Normalized associated Legendre values
/// `sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(x)` for `0 <= m <= l <= l_max`,
/// stored as `table[l][m]`. `P_l^m` carries the Condon-Shortley phase.
///
/// Built by the three-term recurrence in `l` at fixed `m`, with the
/// normalization folded into the coefficients; no factorial is formed, so
/// the table stays finite for large degrees.
pub fn legendre_table(l_max: u32, x: f64) -> Vec<Vec<f64>> {
    let l_max = l_max as usize;
    let sin = (1.0 - x * x).max(0.0).sqrt();
    let mut table: Vec<Vec<f64>> = (0..=l_max).map(|l| vec![0.0; l + 1]).collect();
    let mut diagonal = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=l_max {
        if m > 0 {
            diagonal *= -((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * sin;
        }
        table[m][m] = diagonal;
        if m == l_max {
            break;
        }
        table[m + 1][m] = x * ((2 * m + 3) as f64).sqrt() * diagonal;
        for l in m + 2..=l_max {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let lp = lf - 1.0;
            let a_prev = ((4.0 * lp * lp - 1.0) / (lp * lp - mf * mf)).sqrt();
            table[l][m] = a * (x * table[l - 1][m] - table[l - 2][m] / a_prev);
        }
    }
    table
}

/// `psi_{l,m}(theta, phi)` from a precomputed [`legendre_table`] at
/// `cos(theta)`; negative orders use `psi_{l,-m} = (-1)^m conj(psi_{l,m})`.
pub(crate) fn harmonic_from_table(table: &[Vec<f64>], l: u32, m: i32, phi: f64) -> Complex64 {
    let am = m.unsigned_abs();
    let p = table[l as usize][am as usize];
    let sign = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
    Complex64::from_polar(sign * p, m as f64 * phi)
}

pub(crate) fn check_degree(l: u32, m: i32) -> Result<()> {
    if m.unsigned_abs() > l {
        return Err(Error::IndexOutOfRange(format!(
            "spherical harmonic order {m} exceeds degree {l}"
        )));
    }
    Ok(())
}

pub(crate) fn check_polar_angle(theta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::RegionMismatch(format!(
            "polar angle {theta} outside [0, pi]"
        )));
    }
    Ok(())
}

/// `psi_{l,m}(theta, phi)`, orthonormal on the unit sphere.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    check_degree(l, m)?;
    check_polar_angle(theta)?;
    Ok(harmonic_from_table(&legendre_table(l, theta.cos()), l, m, phi))
}

/// One member of a Hilbert basis of the interface.
#[derive(Clone, Copy, Debug)]
pub enum AngularFunction<'a> {
    Fourier { n: i64, theta: f64 },
    SphericalHarmonic { l: u32, m: i32, theta: f64, phi: f64 },
    Transverse { n: usize, y: f64, basis: &'a TransverseBasis },
}

pub fn angular_basis(f: AngularFunction<'_>) -> Result<Complex64> {
    match f {
        AngularFunction::Fourier { n, theta } => Ok(fourier(n, theta)),
        AngularFunction::SphericalHarmonic { l, m, theta, phi } => spherical_harmonic(l, m, theta, phi),
        AngularFunction::Transverse { n, y, basis } => Ok(basis.eigenfunction(n, y)?.into()),
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let prev = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - prev) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}
