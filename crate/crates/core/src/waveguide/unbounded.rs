use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::KernelMode;
use super::{Geometry, ModeBetas, WaveguideConfig};
use crate::error::{Error, Result};
use crate::regime::CaseLabel;

const SINGULAR_MARGIN: f64 = 1e-14;

/// Mode system on the half-line:
///
/// ```text
/// [ -1          1    ] [u+]   [ f  ]
/// [ kappa beta+ -beta- ] [u-] = [ i g ]
/// ```
///
/// for `u+ e^{-i beta+ x}` on `x < 0` and `u- e^{-i beta- x}` on `x > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnboundedSystem {
    pub betas: ModeBetas,
    pub kappa: f64,
    pub matrix: [[Complex64; 2]; 2],
    /// `beta- - kappa beta+`.
    pub determinant: Complex64,
    pub rhs: [Complex64; 2],
}

impl UnboundedSystem {
    /// `(-1/D) [[beta-, 1], [kappa beta+, 1]]`.
    pub fn inverse(&self) -> [[Complex64; 2]; 2] {
        let c = -1.0 / self.determinant;
        let one = Complex64::new(1.0, 0.0);
        [
            [self.betas.minus * c, one * c],
            [self.betas.plus * self.kappa * c, one * c],
        ]
    }

    /// `(u+, u-)`.
    pub fn solve(&self) -> [Complex64; 2] {
        crate::disk_ball::mat_vec(&self.inverse(), &self.rhs)
    }

    /// Componentwise relative residual
    /// `max_i |(A x - b)_i| / (sum_j |A_ij| |x_j| + |b_i|)`.
    pub fn residual(&self, x: &[Complex64; 2]) -> f64 {
        (0..2)
            .map(|i| {
                let ax = self.matrix[i][0] * x[0] + self.matrix[i][1] * x[1];
                let scale = self.matrix[i][0].norm() * x[0].norm()
                    + self.matrix[i][1].norm() * x[1].norm()
                    + self.rhs[i].norm();
                if scale == 0.0 {
                    0.0
                } else {
                    (ax - self.rhs[i]).norm() / scale
                }
            })
            .fold(0.0, f64::max)
    }

    fn margin(&self) -> f64 {
        let scale = self.betas.minus.norm() + self.kappa.abs() * self.betas.plus.norm();
        self.determinant.norm() / scale
    }
}

fn require_half_line(config: &WaveguideConfig) -> Result<()> {
    match config.geometry {
        Geometry::HalfLine => Ok(()),
        Geometry::Slab { .. } => Err(Error::InvalidConfig(
            "operation requires the half-line geometry".into(),
        )),
    }
}

pub fn unbounded_system(config: &WaveguideConfig, n: usize, f: Complex64, g: Complex64) -> Result<UnboundedSystem> {
    require_half_line(config)?;
    let betas = config.betas(n)?;
    let kappa = config.medium.kappa;
    let one = Complex64::new(1.0, 0.0);
    Ok(UnboundedSystem {
        betas,
        kappa,
        matrix: [[-one, one], [betas.plus * kappa, -betas.minus]],
        determinant: -betas.kappa_plus_minus_minus(&config.medium),
        rhs: [f, Complex64::i() * g],
    })
}

/// `beta-_n - kappa beta+_n`; exactly zero for every evanescent mode when
/// `kappa = -1` and `k+ = k-`.
pub fn det_unbounded(config: &WaveguideConfig, n: usize) -> Result<Complex64> {
    require_half_line(config)?;
    Ok(-config.betas(n)?.kappa_plus_minus_minus(&config.medium))
}

/// `(u+_n, u-_n)` for data `(f_n, g_n)`.
pub fn solve_unbounded(config: &WaveguideConfig, n: usize, f: Complex64, g: Complex64) -> Result<(Complex64, Complex64)> {
    let system = unbounded_system(config, n, f, g)?;
    if !(system.margin() > SINGULAR_MARGIN) {
        return Err(Error::SingularMode {
            mode: n,
            determinant: system.determinant.norm(),
        });
    }
    let [up, um] = system.solve();
    Ok((up, um))
}

/// Leading behaviour of `beta- - kappa beta+` as `lambda -> inf`:
/// `-i (1 + kappa) sqrt(lambda)` or, at `kappa = -1`,
/// `-i (k+^2 - k-^2) / (2 sqrt(lambda))`.
pub fn unbounded_det_asymptotic(config: &WaveguideConfig, lambda: f64) -> Result<Complex64> {
    let m = &config.medium;
    let root = lambda.sqrt();
    match config.case() {
        CaseLabel::Standard => Ok(Complex64::new(0.0, -(1.0 + m.kappa) * root)),
        CaseLabel::Critical => Ok(Complex64::new(
            0.0,
            -(m.k_plus * m.k_plus - m.k_minus * m.k_minus) / (2.0 * root),
        )),
        CaseLabel::SuperCritical => Ok(Complex64::new(0.0, 0.0)),
    }
}

/// Leading behaviour of the inverse, rows `(u+, u-)`, columns acting on
/// `(f, i g)`.
pub fn unbounded_inverse_prediction(config: &WaveguideConfig, lambda: f64) -> Result<[[Complex64; 2]; 2]> {
    let m = &config.medium;
    let (prefactor, p) = match config.case() {
        CaseLabel::Standard => (1.0 / (1.0 + m.kappa), 0),
        CaseLabel::Critical => (2.0 / (m.k_plus * m.k_plus - m.k_minus * m.k_minus), 2),
        CaseLabel::SuperCritical => {
            return Err(Error::InvalidConfig(
                "every evanescent mode is singular; there is no asymptotic inverse".into(),
            ))
        }
    };
    let lp = lambda.powf(p as f64 / 2.0);
    let lq = lambda.powf((p as f64 - 1.0) / 2.0);
    let c = |re: f64, im: f64| Complex64::new(re, im) * prefactor;
    Ok([[c(-lp, 0.0), c(0.0, -lq)], [c(m.kappa * lp, 0.0), c(0.0, -lq)]])
}

/// Where `beta- = kappa beta+` could hold for `kappa != -1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelCandidate {
    /// `(kappa^2 k+^2 - k-^2) / (kappa^2 - 1)`.
    pub lambda_star: f64,
    /// `lambda_star > max(k+^2, k-^2)`, i.e. both sides evanescent.
    pub admissible: bool,
    pub nearest_mode: usize,
    pub nearest_lambda: f64,
    /// `nearest_lambda - lambda_star`.
    pub gap: f64,
    pub matched: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnboundedKernelReport {
    pub case: CaseLabel,
    pub kernel: Vec<usize>,
    /// Every mode above the evanescence threshold is singular.
    pub infinite_dimensional: bool,
    pub candidate: Option<KernelCandidate>,
    pub modes: Vec<KernelMode>,
}

/// Singular modes up to `n_max`.
///
/// The kernel is decided by the medium itself, not by a forced case label.
pub fn kernel_scan_unbounded(config: &WaveguideConfig, n_max: usize) -> Result<UnboundedKernelReport> {
    require_half_line(config)?;
    let m = config.medium;
    let threshold = m.k_plus.max(m.k_minus).powi(2);
    let actual = m.classify();
    let mut candidate = None;
    // (mode, lambda used for the kernel field)
    let kernel: Vec<(usize, f64)> = match actual {
        CaseLabel::SuperCritical => config
            .basis
            .modes(n_max)
            .filter(|&(_, lambda)| lambda > threshold)
            .collect(),
        CaseLabel::Critical => Vec::new(),
        CaseLabel::Standard => {
            let k2 = m.kappa * m.kappa;
            let lambda_star = (k2 * m.k_plus * m.k_plus - m.k_minus * m.k_minus) / (k2 - 1.0);
            let admissible = m.kappa < 0.0 && lambda_star > threshold;
            let (nearest_mode, nearest_lambda) = config.basis.nearest(lambda_star);
            let tol = config.tolerances.matching * lambda_star.abs();
            // The field is built at the exact root, not at the matched eigenvalue.
            let matched_modes: Vec<(usize, f64)> = if admissible {
                config
                    .basis
                    .modes(n_max)
                    .filter(|&(_, lambda)| (lambda - lambda_star).abs() <= tol)
                    .map(|(n, _)| (n, lambda_star))
                    .collect()
            } else {
                Vec::new()
            };
            candidate = Some(KernelCandidate {
                lambda_star,
                admissible,
                nearest_mode,
                nearest_lambda,
                gap: nearest_lambda - lambda_star,
                matched: !matched_modes.is_empty(),
            });
            matched_modes
        }
    };
    let modes = kernel
        .iter()
        .map(|&(n, lambda)| KernelMode::new(config, n, lambda))
        .collect::<Result<Vec<_>>>()?;
    Ok(UnboundedKernelReport {
        case: config.case(),
        infinite_dimensional: actual == CaseLabel::SuperCritical && config.basis.last_index().is_none(),
        kernel: kernel.into_iter().map(|(n, _)| n).collect(),
        candidate,
        modes,
    })
}
