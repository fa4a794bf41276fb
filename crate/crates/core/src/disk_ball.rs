//! Per-mode systems for a negative disk (`d = 2`) or ball (`d = 3`) of radius
//! `R` embedded in a positive medium.
//!
//! Mode `m` couples the interior coefficient `u-` (normalized by `J_m(k- R)`)
//! and the exterior coefficient `u+` (normalized by `H_m(k+ R)`) through
//!
//! ```text
//! [ 1                 -1                  ] [u-]   [f]
//! [ k- J'_m/J_m(k-R)  -kappa k+ H'_m/H_m(k+R) ] [u+] = [g]
//! ```
//!
//! with spherical `j`, `h` in three dimensions. Normal derivatives point out
//! of the disk.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regime::{CaseLabel, Medium};
use crate::regularity::log_log_fit;
use crate::report::{finite_statement, KernelDescription, RegularityLoss, RegularityReport};
use crate::special_functions::{ratio_cprime_c, Family, Order, RatioKind};

/// Smallest determinant accepted, relative to `|a| + |b|`.
pub const DETERMINANT_MARGIN: f64 = 1e-14;
/// Default slope-fit window.
pub const DEFAULT_FIT_RANGE: RangeInclusive<u32> = 20..=100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dimension {
    Two,
    Three,
}

impl TryFrom<u8> for Dimension {
    type Error = Error;

    fn try_from(d: u8) -> Result<Self> {
        match d {
            2 => Ok(Self::Two),
            3 => Ok(Self::Three),
            d => Err(Error::InvalidConfig(format!(
                "dimension must be 2 or 3, got {d}"
            ))),
        }
    }
}

impl From<Dimension> for u8 {
    fn from(d: Dimension) -> u8 {
        match d {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskBallConfig {
    pub dimension: Dimension,
    pub radius: f64,
    pub medium: Medium,
    /// Overrides the computed regime for labels and predictions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forced_case: Option<CaseLabel>,
}

impl DiskBallConfig {
    pub fn new(dimension: Dimension, radius: f64, kappa: f64, k_plus: f64, k_minus: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            dimension,
            radius,
            medium: Medium::new(kappa, k_plus, k_minus)?,
            forced_case: None,
        })
    }

    pub fn with_forced_case(mut self, case: CaseLabel) -> Self {
        self.forced_case = Some(case);
        self
    }

    /// Same medium, different radius.
    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "radius must be positive, got {radius}"
            )));
        }
        self.radius = radius;
        Ok(self)
    }
}

pub fn classify_case(config: &DiskBallConfig) -> CaseLabel {
    config.forced_case.unwrap_or_else(|| config.medium.classify())
}

/// One 2x2 modal system with its right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSystem2 {
    pub mode: i64,
    pub matrix: [[Complex64; 2]; 2],
    pub determinant: Complex64,
    pub rhs: [Complex64; 2],
}

impl ModeSystem2 {
    /// Closed-form inverse `(1/D) [[b, 1], [-a, 1]]`.
    pub fn inverse(&self) -> [[Complex64; 2]; 2] {
        let one = Complex64::new(1.0, 0.0);
        let a = self.matrix[1][0];
        let b = self.matrix[1][1];
        let inv_d = one / self.determinant;
        [[b * inv_d, inv_d], [-a * inv_d, inv_d]]
    }

    /// `(u-, u+)`.
    pub fn solve(&self) -> [Complex64; 2] {
        mat_vec(&self.inverse(), &self.rhs)
    }

    /// Componentwise relative residual
    /// `max_i |(A x - b)_i| / (sum_j |A_ij| |x_j| + |b_i|)`.
    ///
    /// The inverse grows like a power of `m`, so an absolute residual
    /// measures the conditioning rather than the solver.
    pub fn residual(&self, x: &[Complex64; 2]) -> f64 {
        let ax = mat_vec(&self.matrix, x);
        (0..2)
            .map(|i| {
                let scale = self.matrix[i][0].norm() * x[0].norm()
                    + self.matrix[i][1].norm() * x[1].norm()
                    + self.rhs[i].norm();
                if scale == 0.0 {
                    0.0
                } else {
                    (ax[i] - self.rhs[i]).norm() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn mat_vec(m: &[[Complex64; 2]; 2], x: &[Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * x[0] + m[0][1] * x[1],
        m[1][0] * x[0] + m[1][1] * x[1],
    ]
}

fn mode_order(config: &DiskBallConfig, m: i64) -> Result<(Order, Family)> {
    match config.dimension {
        // J_{-n} = (-1)^n J_n, so the logarithmic derivatives only see |n|.
        Dimension::Two => Ok((Order::integer(m.unsigned_abs() as u32), Family::Cylindrical)),
        Dimension::Three => {
            if m < 0 {
                return Err(Error::IndexOutOfRange(format!(
                    "spherical degree must be nonnegative, got {m}"
                )));
            }
            Ok((Order::integer(m as u32), Family::Spherical))
        }
    }
}

/// Second-row entries `(a, b)` with `a = k- C'/C` for the interior function
/// and `b = -kappa k+ H'/H` for the exterior one.
fn row_two(config: &DiskBallConfig, m: i64) -> Result<(Complex64, Complex64)> {
    let (order, family) = mode_order(config, m)?;
    let Medium {
        kappa,
        k_plus,
        k_minus,
    } = config.medium;
    let r = config.radius;
    let a = ratio_cprime_c(order, k_minus * r, RatioKind::J, family)? * k_minus;
    let b = ratio_cprime_c(order, k_plus * r, RatioKind::H, family)? * (-kappa * k_plus);
    Ok((a, b))
}

pub fn build_system(config: &DiskBallConfig, m: i64, f: Complex64, g: Complex64) -> Result<ModeSystem2> {
    let (a, b) = row_two(config, m)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(ModeSystem2 {
        mode: m,
        matrix: [[one, -one], [a, b]],
        determinant: a + b,
        rhs: [f, g],
    })
}

/// Determinant value and its size relative to the entries it cancels from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeDeterminant {
    pub value: Complex64,
    pub margin: f64,
}

/// `D = a + b`; errors if it is indistinguishable from zero, which would
/// contradict the unique solvability of every mode.
pub fn determinant(config: &DiskBallConfig, m: i64) -> Result<ModeDeterminant> {
    let (a, b) = row_two(config, m)?;
    let value = a + b;
    let margin = value.norm() / (a.norm() + b.norm());
    if !(margin > DETERMINANT_MARGIN) {
        return Err(Error::SingularMode {
            mode: m.unsigned_abs() as usize,
            determinant: value.norm(),
        });
    }
    Ok(ModeDeterminant { value, margin })
}

/// `(u-_m, u+_m)` for data `(f_m, g_m)`.
pub fn solve_mode(config: &DiskBallConfig, m: i64, f: Complex64, g: Complex64) -> Result<(Complex64, Complex64)> {
    determinant(config, m)?;
    let system = build_system(config, m, f, g)?;
    let x = system.solve();
    Ok((x[0], x[1]))
}

/// `M(p) = [[kappa m^p, R m^(p-1)], [-m^p, R m^(p-1)]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticMatrix {
    pub p: i32,
    pub kappa: f64,
    pub radius: f64,
}

impl AsymptoticMatrix {
    pub fn at(&self, m: f64) -> [[f64; 2]; 2] {
        let mp = m.powi(self.p);
        let mq = self.radius * m.powi(self.p - 1);
        [[self.kappa * mp, mq], [-mp, mq]]
    }
}

/// Leading-order form of the inverse: prefactor and matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversePrediction {
    pub prefactor: f64,
    pub matrix: AsymptoticMatrix,
}

impl InversePrediction {
    pub fn at(&self, m: f64) -> [[f64; 2]; 2] {
        let mut e = self.matrix.at(m);
        for row in e.iter_mut() {
            for v in row.iter_mut() {
                *v *= self.prefactor;
            }
        }
        e
    }
}

pub fn inverse_prediction(config: &DiskBallConfig) -> InversePrediction {
    let Medium {
        kappa,
        k_plus,
        k_minus,
    } = config.medium;
    let r = config.radius;
    let (prefactor, p) = match (classify_case(config), config.dimension) {
        (CaseLabel::Standard, _) => (1.0 / (kappa + 1.0), 0),
        (CaseLabel::Critical, Dimension::Two) => (2.0 / (r * r * (k_plus * k_plus - k_minus * k_minus)), 2),
        (CaseLabel::SuperCritical, Dimension::Two) => (1.0 / (r * r * k_plus * k_plus), 3),
        (_, Dimension::Three) => (-1.0, 1),
    };
    InversePrediction {
        prefactor,
        matrix: AsymptoticMatrix {
            p,
            kappa,
            radius: r,
        },
    }
}

/// Case-appropriate prefactor times `M(p)` at mode `m`.
pub fn predicted_matrix(config: &DiskBallConfig, m: u32) -> [[f64; 2]; 2] {
    inverse_prediction(config).at(m as f64)
}

/// Log-log slopes of the four inverse entries over a mode range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub modes: (u32, u32),
    pub slopes: [[f64; 2]; 2],
    pub r_squared: [[f64; 2]; 2],
    /// Slopes implied by the asymptotic inverse: `[[p, p-1], [p, p-1]]`.
    pub predicted: [[i32; 2]; 2],
    /// Entries (1,2) and (2,2) of the inverse agree at every mode.
    pub second_column_coincides: bool,
    /// Per-mode inverse entries used in the fit.
    pub series: Vec<(u32, [[Complex64; 2]; 2])>,
}

impl SlopeReport {
    pub fn max_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.slopes[i][j] - self.predicted[i][j] as f64).abs());
            }
        }
        worst
    }
}

/// Fits the slope of `log |(A_m^-1)_{ij}|` against `log m`.
///
/// Ranges with fewer than ten modes or starting below mode 10 are refused
/// as fit-unstable: the asymptotic regime is not reached there.
pub fn inverse_entry_slopes(config: &DiskBallConfig, modes: RangeInclusive<u32>) -> Result<SlopeReport> {
    let (lo, hi) = (*modes.start(), *modes.end());
    if modes.is_empty() {
        return Err(Error::InvalidConfig(format!("empty mode range {lo}..{hi}")));
    }
    let count = (hi - lo + 1) as usize;
    if count < crate::regularity::MIN_FIT_POINTS {
        return Err(Error::FitUnstable(format!(
            "{count} modes in {lo}..{hi}; at least {} are needed",
            crate::regularity::MIN_FIT_POINTS
        )));
    }
    if lo < 10 {
        return Err(Error::FitUnstable(format!(
            "range starts at mode {lo}, inside the pre-asymptotic regime (below 10)"
        )));
    }
    let zero = Complex64::new(0.0, 0.0);
    let series = modes
        .map(|m| Ok((m, build_system(config, m as i64, zero, zero)?.inverse())))
        .collect::<Result<Vec<_>>>()?;
    let mut slopes = [[0.0; 2]; 2];
    let mut r_squared = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let fit = log_log_fit(series.iter().map(|(m, inv)| (*m as f64, inv[i][j].norm())))?;
            slopes[i][j] = fit.slope;
            r_squared[i][j] = fit.r_squared;
        }
    }
    let second_column_coincides = series
        .iter()
        .all(|(_, inv)| (inv[0][1] - inv[1][1]).norm() <= 1e-12 * inv[1][1].norm());
    let p = inverse_prediction(config).matrix.p;
    Ok(SlopeReport {
        modes: (lo, hi),
        slopes,
        r_squared,
        predicted: [[p, p - 1], [p, p - 1]],
        second_column_coincides,
        series,
    })
}

/// Order of regularity lost: `{0, 2, 3}` in the plane and `{0, 1, 1}` in
/// space for the standard, critical and super-critical cases.
pub fn regularity_loss(config: &DiskBallConfig) -> RegularityReport {
    let case = classify_case(config);
    let p = match (config.dimension, case) {
        (_, CaseLabel::Standard) => 0,
        (Dimension::Two, CaseLabel::Critical) => 2,
        (Dimension::Two, CaseLabel::SuperCritical) => 3,
        (Dimension::Three, _) => 1,
    };
    RegularityReport {
        geometry: match config.dimension {
            Dimension::Two => "disk".into(),
            Dimension::Three => "ball".into(),
        },
        case,
        loss: RegularityLoss::Finite(p),
        kernel: KernelDescription::Empty,
        statement: finite_statement(p),
        notice: None,
    }
}

/// Limit of the planar determinant as `R -> infinity` with `n / R = xi`:
/// `sqrt(xi^2 - k-^2) + kappa sqrt(xi^2 - k+^2)`.
pub fn curvature_limit(xi: f64, kappa: f64, k_plus: f64, k_minus: f64) -> Result<f64> {
    if !(xi > k_plus.max(k_minus)) {
        return Err(Error::Domain(xi));
    }
    Ok((xi * xi - k_minus * k_minus).sqrt() + kappa * (xi * xi - k_plus * k_plus).sqrt())
}

/// `(n, |D_n(n / xi) - limit|)` for each `n`, on planar disks of radius
/// `n / xi`.
pub fn curvature_convergence(xi: f64, kappa: f64, k_plus: f64, k_minus: f64, n_list: &[u32]) -> Result<Vec<(u32, f64)>> {
    let limit = curvature_limit(xi, kappa, k_plus, k_minus)?;
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("mode list must be ascending".into()));
    }
    n_list
        .iter()
        .map(|&n| {
            let config = DiskBallConfig::new(Dimension::Two, n as f64 / xi, kappa, k_plus, k_minus)?;
            let (a, b) = row_two(&config, n as i64)?;
            Ok((n, ((a + b) - limit).norm()))
        })
        .collect()
}
