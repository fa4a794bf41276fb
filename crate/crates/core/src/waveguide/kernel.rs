use num_complex::Complex64;
use serde::Serialize;

use super::unbounded::kernel_scan_unbounded;
use super::{beta, Geometry, Side, TransverseBasis, WaveguideConfig};
use crate::error::{Error, Result};
use crate::regime::{CaseLabel, Medium};
use crate::report::{finite_statement, KernelDescription, KernelEntry, RegularityLoss, RegularityReport};

/// Subintervals per spectral gap in the sign-change scan.
const SCAN_SUBINTERVALS: usize = 400;
/// Relative width at which bisection stops.
const BISECTION_TOLERANCE: f64 = 1e-12;
/// Interface samples used by [`KernelMode::transmission_residual`].
const INTERFACE_SAMPLES: usize = 50;
/// Modes examined by [`regularity_report`] when listing kernels.
pub const DEFAULT_SCAN_LIMIT: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// Evanescent on both sides of the interface.
    SurfacePlasmon,
    /// Oscillating inside the slab, evanescent in the positive medium.
    TrappedMode,
}

impl KernelKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::SurfacePlasmon => "surface_plasmon",
            Self::TrappedMode => "trapped_mode",
        }
    }
}

/// A nontrivial solution with zero data, `G(x, y) = X(x) psi_n(y)`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelMode {
    #[serde(rename = "n")]
    pub mode: usize,
    /// Eigenvalue at which the profile is built: the root of the dispersion
    /// relation, within the matching tolerance of `lambda_n`.
    pub lambda: f64,
    #[serde(rename = "type")]
    pub kind: KernelKind,
    pub beta_plus: Complex64,
    pub beta_minus: Complex64,
    #[serde(skip)]
    kappa: f64,
    #[serde(skip)]
    geometry: Geometry,
    #[serde(skip)]
    basis: TransverseBasis,
}

impl KernelMode {
    pub(crate) fn new(config: &WaveguideConfig, mode: usize, lambda: f64) -> Result<Self> {
        let m = &config.medium;
        let beta_plus = beta(lambda, m.k_plus, Side::Plus)?;
        let beta_minus = beta(lambda, m.k_minus, Side::Minus)?;
        let kind = if beta_minus.re == 0.0 {
            KernelKind::SurfacePlasmon
        } else {
            KernelKind::TrappedMode
        };
        Ok(Self {
            mode,
            lambda,
            kind,
            beta_plus,
            beta_minus,
            kappa: m.kappa,
            geometry: config.geometry,
            basis: config.basis.clone(),
        })
    }

    /// `X(x)`: on the half-line `e^{-i beta+ x}` for `x < 0` and
    /// `e^{-i beta- x}` for `x > 0`; on the slab `2i sin(beta- L) e^{-i beta+ x}`
    /// for `x < 0` and `2i sin(beta- (L - x))` on `[0, L]`.
    pub fn profile(&self, x: f64) -> Result<Complex64> {
        Ok(self.profile_and_slope(x)?.0)
    }

    fn profile_and_slope(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let i = Complex64::i();
        let (bp, bm) = (self.beta_plus, self.beta_minus);
        match self.geometry {
            Geometry::HalfLine => {
                let b = if x < 0.0 { bp } else { bm };
                let v = (-i * b * x).exp();
                Ok((v, -i * b * v))
            }
            Geometry::Slab { length } => {
                if x < 0.0 {
                    let v = 2.0 * i * (bm * length).sin() * (-i * bp * x).exp();
                    Ok((v, -i * bp * v))
                } else if x <= length {
                    let v = 2.0 * i * (bm * (length - x)).sin();
                    Ok((v, -2.0 * i * bm * (bm * (length - x)).cos()))
                } else {
                    Err(Error::RegionMismatch(format!(
                        "x = {x} lies beyond the slab wall at {length}"
                    )))
                }
            }
        }
    }

    pub fn field(&self, x: f64, y: f64) -> Result<Complex64> {
        Ok(self.profile(x)? * self.basis.eigenfunction(self.mode, y)?)
    }

    /// Largest of `|u- - u+|` and `|d_n u- - kappa d_n u+|` over interface
    /// samples, relative to the size of the traces. Bases without
    /// eigenfunctions are checked on the profile alone.
    pub fn transmission_residual(&self) -> Result<f64> {
        let (out, d_out) = self.one_sided(-0.0)?;
        let (inn, d_in) = self.profile_and_slope(0.0)?;
        let jump = (inn - out).norm();
        let flux = (d_in - self.kappa * d_out).norm();
        let scale = inn.norm().max(out.norm()) + d_in.norm().max(self.kappa.abs() * d_out.norm());
        let relative = (jump + flux) / scale;
        let Some(width) = self.basis.length() else {
            return Ok(relative);
        };
        let mut worst = 0.0f64;
        let mut peak = 0.0f64;
        for k in 0..INTERFACE_SAMPLES {
            let y = width * (k as f64 + 0.5) / INTERFACE_SAMPLES as f64;
            let psi = self.basis.eigenfunction(self.mode, y)?;
            worst = worst.max((jump + flux) * psi.abs());
            peak = peak.max(scale * psi.abs());
        }
        Ok(if peak == 0.0 { 0.0 } else { worst / peak })
    }

    /// The positive-side profile and slope at `x`, approached from `x < 0`.
    fn one_sided(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let i = Complex64::i();
        let bp = self.beta_plus;
        let amplitude = match self.geometry {
            Geometry::HalfLine => Complex64::new(1.0, 0.0),
            Geometry::Slab { length } => 2.0 * i * (self.beta_minus * length).sin(),
        };
        let v = amplitude * (-i * bp * x).exp();
        Ok((v, -i * bp * v))
    }

    /// Value at the slab wall; zero by construction.
    pub fn wall_value(&self) -> Option<Complex64> {
        match self.geometry {
            Geometry::Slab { length } => self.profile(length).ok(),
            Geometry::HalfLine => None,
        }
    }

    /// The profile decays away from the interface in every unbounded
    /// direction: `Im beta+ > 0` always, and `Im beta- < 0` on the half-line.
    pub fn is_localized(&self) -> bool {
        let plus = self.beta_plus.im > 0.0;
        match self.geometry {
            Geometry::HalfLine => plus && self.beta_minus.im < 0.0,
            Geometry::Slab { .. } => plus,
        }
    }
}

/// A bracketed root of a real dispersion function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DispersionRoot {
    pub lambda: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
}

/// `t cos(t L) + kappa s sin(t L)` with `t = sqrt(k-^2 - lambda)` and
/// `s = sqrt(lambda - k+^2)`; proportional to the slab determinant for
/// `k+^2 < lambda < k-^2`.
pub fn trapped_mode_function(medium: &Medium, length: f64, lambda: f64) -> f64 {
    let t = (medium.k_minus * medium.k_minus - lambda).max(0.0).sqrt();
    let s = (lambda - medium.k_plus * medium.k_plus).max(0.0).sqrt();
    t * (t * length).cos() + medium.kappa * s * (t * length).sin()
}

/// `s- + kappa s+ tanh(s- L)` with `s+- = sqrt(lambda - k+-^2)`: the slab
/// determinant for `lambda > max(k+^2, k-^2)`, divided by `2i cosh(s- L)`.
///
/// Evaluated as `(kappa + 1) s+ + (k+^2 - k-^2)/(s- + s+) - 2 kappa s+ / (e^{2 s- L} + 1)`
/// so that the cancellation at `kappa = -1` leaves no spurious zeros.
pub fn plasmon_function(medium: &Medium, length: f64, lambda: f64) -> f64 {
    let (kp2, km2) = (medium.k_plus * medium.k_plus, medium.k_minus * medium.k_minus);
    let sm = (lambda - km2).max(0.0).sqrt();
    let sp = (lambda - kp2).max(0.0).sqrt();
    let sum = sm + sp;
    let difference = if sum > 0.0 { (kp2 - km2) / sum } else { 0.0 };
    let tail = 2.0 / ((2.0 * sm * length).exp() + 1.0);
    (medium.kappa + 1.0) * sp + difference - medium.kappa * sp * tail
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > BISECTION_TOLERANCE * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign-change roots of `f` on `(lo, hi)`; each gap between consecutive
/// breakpoints is split into [`SCAN_SUBINTERVALS`] pieces.
fn scan_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, breakpoints: &[f64], exclusion: f64) -> Vec<DispersionRoot> {
    let mut knots = vec![lo];
    knots.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
    knots.push(hi);
    let mut grid = Vec::with_capacity(knots.len() * SCAN_SUBINTERVALS);
    for w in knots.windows(2) {
        for j in 0..SCAN_SUBINTERVALS {
            grid.push(w[0] + (w[1] - w[0]) * j as f64 / SCAN_SUBINTERVALS as f64);
        }
    }
    grid.push(hi);
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for k in 0..grid.len() - 1 {
        let (a, b) = (grid[k], grid[k + 1]);
        let (fa, fb) = (values[k], values[k + 1]);
        // an exact zero on the grid counts only if the sign changes across it
        let root = if fa == 0.0 {
            (k > 0 && values[k - 1] * fb < 0.0).then_some(a)
        } else if fa * fb < 0.0 {
            Some(bisect(&f, a, b))
        } else {
            None
        };
        if let Some(r) = root {
            let inside = r - lo > exclusion * lo.abs().max(1.0) && hi - r > exclusion * hi.abs().max(1.0);
            if inside && roots.last().map_or(true, |p: &DispersionRoot| p.lambda != r) {
                roots.push(DispersionRoot {
                    lambda: r,
                    residual: f(r).abs(),
                    bracket: (a, b),
                });
            }
        }
    }
    roots
}

fn slab_length(config: &WaveguideConfig) -> Result<f64> {
    match config.geometry {
        Geometry::Slab { length } => Ok(length),
        Geometry::HalfLine => Err(Error::InvalidConfig(
            "operation requires the slab geometry".into(),
        )),
    }
}

fn spectral_breakpoints(basis: &TransverseBasis, lo: f64, hi: f64) -> Vec<f64> {
    basis.modes_between(lo, hi).into_iter().map(|(_, l)| l).collect()
}

/// Roots of [`trapped_mode_function`] in `(k+^2, k-^2)`, independent of the
/// transverse spectrum.
pub fn trapped_mode_roots(config: &WaveguideConfig) -> Result<Vec<DispersionRoot>> {
    let length = slab_length(config)?;
    let m = config.medium;
    let (lo, hi) = (m.k_plus * m.k_plus, m.k_minus * m.k_minus);
    if lo >= hi {
        return Ok(Vec::new());
    }
    let breaks = spectral_breakpoints(&config.basis, lo, hi);
    Ok(scan_roots(
        |l| trapped_mode_function(&m, length, l),
        lo,
        hi,
        &breaks,
        config.tolerances.cutoff,
    ))
}

/// Roots of [`plasmon_function`] in `(max(k+^2, k-^2), lambda_max)`.
pub fn plasmon_roots(config: &WaveguideConfig, lambda_max: f64) -> Result<Vec<DispersionRoot>> {
    let length = slab_length(config)?;
    let m = config.medium;
    let lo = m.k_plus.max(m.k_minus).powi(2);
    if !(lambda_max > lo) {
        return Ok(Vec::new());
    }
    let breaks = spectral_breakpoints(&config.basis, lo, lambda_max);
    Ok(scan_roots(
        |l| plasmon_function(&m, length, l),
        lo,
        lambda_max,
        &breaks,
        config.tolerances.cutoff,
    ))
}

fn match_roots(config: &WaveguideConfig, roots: &[DispersionRoot]) -> Result<Vec<KernelMode>> {
    let tol = config.tolerances.matching;
    let mut out = Vec::new();
    for r in roots {
        let window = tol * r.lambda;
        for (n, lambda_n) in config.basis.modes_between(r.lambda - 2.0 * window, r.lambda + 2.0 * window) {
            if (lambda_n - r.lambda).abs() <= window {
                out.push(KernelMode::new(config, n, r.lambda)?);
            }
        }
    }
    out.sort_by_key(|k| k.mode);
    Ok(out)
}

/// Trapped modes of the slab: roots in `(k+^2, k-^2)` that coincide with a
/// transverse eigenvalue. Empty unless `k+ < k-`; any sign of `kappa` is
/// accepted.
pub fn trapped_mode_scan(config: &WaveguideConfig) -> Result<Vec<KernelMode>> {
    match_roots(config, &trapped_mode_roots(config)?)
}

/// Surface plasmons of the slab with eigenvalue below `lambda_max`.
pub fn plasmon_scan(config: &WaveguideConfig, lambda_max: f64) -> Result<Vec<KernelMode>> {
    match_roots(config, &plasmon_roots(config, lambda_max)?)
}

fn entries(modes: &[KernelMode]) -> Vec<KernelEntry> {
    modes
        .iter()
        .map(|k| KernelEntry {
            mode: k.mode,
            lambda: k.lambda,
            kind: k.kind.label().to_string(),
        })
        .collect()
}

/// Order of regularity lost and kernel, scanning modes up to `scan_limit`.
pub fn regularity_report(config: &WaveguideConfig, scan_limit: usize) -> Result<RegularityReport> {
    let case = config.case();
    match config.geometry {
        Geometry::HalfLine => {
            let scan = kernel_scan_unbounded(config, scan_limit)?;
            let (loss, statement, notice) = match case {
                CaseLabel::Standard => (RegularityLoss::Finite(0), finite_statement(0), None),
                CaseLabel::Critical => (RegularityLoss::Finite(2), finite_statement(2), None),
                CaseLabel::SuperCritical => (
                    RegularityLoss::IllPosed,
                    "strongly ill-posed: no data space gives uniqueness".to_string(),
                    Some(
                        "every mode with lambda_n > max(k+^2, k-^2) carries a surface plasmon; the kernel is infinite-dimensional"
                            .to_string(),
                    ),
                ),
            };
            let kernel = if scan.kernel.is_empty() {
                KernelDescription::Empty
            } else if scan.infinite_dimensional || case == CaseLabel::SuperCritical {
                KernelDescription::InfiniteDimensional {
                    listed: scan.kernel.clone(),
                }
            } else {
                KernelDescription::Finite {
                    modes: entries(&scan.modes),
                }
            };
            let notice = notice.or_else(|| {
                matches!(kernel, KernelDescription::Finite { .. })
                    .then(|| "finite-dimensional kernel: uniqueness fails on the listed modes".to_string())
            });
            Ok(RegularityReport {
                geometry: "halfline".into(),
                case,
                loss,
                kernel,
                statement,
                notice,
            })
        }
        Geometry::Slab { .. } => {
            let (loss, statement, mut notice) = match case {
                CaseLabel::Standard => (RegularityLoss::Finite(0), finite_statement(0), None),
                CaseLabel::Critical => (RegularityLoss::Finite(2), finite_statement(2), None),
                CaseLabel::SuperCritical => (
                    RegularityLoss::Infinite,
                    "data (f, g) in G^s_L x G^{s-1}_L give traces (u-, u+) in H^s x H^s; infinitely many orders lost"
                        .to_string(),
                    Some(
                        "data must lie in the weighted space G^s_L = { sum e^{2L sqrt(lambda_n)} (1 + lambda_n)^s |u_n|^2 < inf }"
                            .to_string(),
                    ),
                ),
            };
            let lambda_max = config
                .basis
                .modes(scan_limit)
                .last()
                .map_or(0.0, |(_, l)| l * (1.0 + 2.0 * config.tolerances.matching));
            let mut modes = trapped_mode_scan(config)?;
            modes.extend(plasmon_scan(config, lambda_max)?);
            modes.sort_by_key(|k| k.mode);
            let kernel = if modes.is_empty() {
                KernelDescription::Empty
            } else {
                let text = "exceptional modes: finite-dimensional kernel of trapped modes or surface plasmons";
                notice = Some(match notice {
                    Some(n) => format!("{n}; {text}"),
                    None => text.to_string(),
                });
                KernelDescription::Finite {
                    modes: entries(&modes),
                }
            };
            Ok(RegularityReport {
                geometry: "slab".into(),
                case,
                loss,
                kernel,
                statement,
                notice,
            })
        }
    }
}
