//! Flat-interface waveguides `R x Gamma`: a negative medium on `x > 0`
//! (unbounded, or a slab `(0, L)` closed by a Dirichlet wall) facing a
//! positive medium on `x < 0`.
//!
//! Each transverse mode `psi_n` decouples into a small linear system whose
//! coefficients only involve `lambda_n` through the propagation constants
//! `beta+-`. Normal derivatives on the interface point out of the negative
//! medium, i.e. along `-x`.

mod basis;
mod kernel;
mod slab;
mod spaces;
mod unbounded;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regime::{CaseLabel, Medium};

pub use basis::TransverseBasis;
pub use kernel::{
    plasmon_function, plasmon_scan, regularity_report, trapped_mode_function, trapped_mode_scan,
    KernelKind, KernelMode, DEFAULT_SCAN_LIMIT,
};
pub use slab::{
    det_slab, det_slab_expanded, slab_det_asymptotic, slab_inverse_prediction, slab_system, solve_slab,
    SlabSystem,
};
pub use spaces::{source_distance_check, weighted_membership, SourceVerdict};
pub use unbounded::{
    det_unbounded, kernel_scan_unbounded, solve_unbounded, unbounded_det_asymptotic,
    unbounded_inverse_prediction, unbounded_system, KernelCandidate, UnboundedKernelReport,
    UnboundedSystem,
};

/// Relative distance from a cut-off `lambda = k^2` below which a mode is refused.
pub const CUTOFF_TOLERANCE: f64 = 1e-10;
/// Relative distance at which a root of a dispersion relation is taken to
/// coincide with a transverse eigenvalue.
pub const MATCH_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveguideTolerances {
    pub cutoff: f64,
    pub matching: f64,
}

impl Default for WaveguideTolerances {
    fn default() -> Self {
        Self {
            cutoff: CUTOFF_TOLERANCE,
            matching: MATCH_TOLERANCE,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// Negative medium on `(0, inf)`.
    HalfLine,
    /// Negative medium on `(0, length)` with `u- = 0` at `x = length`.
    Slab { length: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveguideConfig {
    pub basis: TransverseBasis,
    pub medium: Medium,
    pub geometry: Geometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forced_case: Option<CaseLabel>,
    #[serde(default)]
    pub tolerances: WaveguideTolerances,
}

impl WaveguideConfig {
    /// A sign-changing waveguide (`kappa < 0`).
    pub fn new(basis: TransverseBasis, kappa: f64, k_plus: f64, k_minus: f64, geometry: Geometry) -> Result<Self> {
        Self::build(basis, Medium::new(kappa, k_plus, k_minus)?, geometry)
    }

    /// Also accepts `kappa > 0`, for which trapped modes may still exist.
    pub fn with_any_contrast(
        basis: TransverseBasis,
        kappa: f64,
        k_plus: f64,
        k_minus: f64,
        geometry: Geometry,
    ) -> Result<Self> {
        Self::build(basis, Medium::unchecked_sign(kappa, k_plus, k_minus)?, geometry)
    }

    fn build(basis: TransverseBasis, medium: Medium, geometry: Geometry) -> Result<Self> {
        let config = Self {
            basis,
            medium,
            geometry,
            forced_case: None,
            tolerances: WaveguideTolerances::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_forced_case(mut self, case: CaseLabel) -> Self {
        self.forced_case = Some(case);
        self
    }

    pub fn with_tolerances(mut self, tolerances: WaveguideTolerances) -> Result<Self> {
        self.tolerances = tolerances;
        self.validate()?;
        Ok(self)
    }

    /// Checks the basis, the geometry and that no transverse eigenvalue sits
    /// on a cut-off.
    pub fn validate(&self) -> Result<()> {
        self.basis.validate()?;
        let m = &self.medium;
        Medium::unchecked_sign(m.kappa, m.k_plus, m.k_minus)?;
        if let Geometry::Slab { length } = self.geometry {
            if !(length.is_finite() && length > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "slab length must be positive, got {length}"
                )));
            }
        }
        let t = self.tolerances;
        if !(t.cutoff >= 0.0 && t.matching >= 0.0) {
            return Err(Error::InvalidConfig("tolerances must be nonnegative".into()));
        }
        let k2_max = m.k_plus.max(m.k_minus).powi(2);
        for (n, lambda) in self.basis.modes_between(-1.0, k2_max * (1.0 + 2.0 * t.cutoff) + 1.0) {
            for k in [m.k_plus, m.k_minus] {
                check_cutoff(lambda, k, t.cutoff).map_err(|e| with_mode(e, n))?;
            }
        }
        Ok(())
    }

    pub fn case(&self) -> CaseLabel {
        self.forced_case.unwrap_or_else(|| self.medium.classify())
    }

    /// `(lambda_n, beta+_n, beta-_n)`.
    pub fn betas(&self, n: usize) -> Result<ModeBetas> {
        let lambda = self.basis.eigenvalue(n)?;
        let tol = self.tolerances.cutoff;
        let m = &self.medium;
        let plus = beta_with_tolerance(lambda, m.k_plus, Side::Plus, tol).map_err(|e| with_mode(e, n))?;
        let minus = beta_with_tolerance(lambda, m.k_minus, Side::Minus, tol).map_err(|e| with_mode(e, n))?;
        Ok(ModeBetas {
            mode: n,
            lambda,
            plus,
            minus,
        })
    }
}

fn with_mode(e: Error, n: usize) -> Error {
    match e {
        Error::Cutoff {
            lambda, k_squared, ..
        } => Error::Cutoff {
            mode: Some(n),
            lambda,
            k_squared,
        },
        other => other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

fn check_cutoff(lambda: f64, k: f64, tol: f64) -> Result<()> {
    let k2 = k * k;
    if (lambda - k2).abs() <= tol * k2 {
        return Err(Error::Cutoff {
            mode: None,
            lambda,
            k_squared: k2,
        });
    }
    Ok(())
}

/// Propagation constant: `sqrt(k^2 - lambda)` below cut-off, and
/// `+i sqrt(lambda - k^2)` (plus side) or `-i sqrt(lambda - k^2)` (minus
/// side) above it, so that `Im beta+ >= 0 >= Im beta-`.
pub fn beta(lambda: f64, k: f64, side: Side) -> Result<Complex64> {
    beta_with_tolerance(lambda, k, side, CUTOFF_TOLERANCE)
}

fn beta_with_tolerance(lambda: f64, k: f64, side: Side, tol: f64) -> Result<Complex64> {
    check_cutoff(lambda, k, tol)?;
    let k2 = k * k;
    Ok(if lambda < k2 {
        Complex64::new((k2 - lambda).sqrt(), 0.0)
    } else {
        let s = (lambda - k2).sqrt();
        match side {
            Side::Plus => Complex64::new(0.0, s),
            Side::Minus => Complex64::new(0.0, -s),
        }
    })
}

/// Propagation constants of one transverse mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeBetas {
    pub mode: usize,
    pub lambda: f64,
    pub plus: Complex64,
    pub minus: Complex64,
}

impl ModeBetas {
    /// `kappa beta+ - beta-`, with the near-cancellation at `kappa = -1` of
    /// two evanescent constants rewritten as
    /// `(k+^2 - k-^2) / (s- + s+)`.
    pub(crate) fn kappa_plus_minus_minus(&self, medium: &Medium) -> Complex64 {
        let Medium {
            kappa,
            k_plus,
            k_minus,
        } = *medium;
        if self.plus.re == 0.0 && self.minus.re == 0.0 {
            let sp = self.plus.im;
            let sm = -self.minus.im;
            let diff = (k_plus * k_plus - k_minus * k_minus) / (sm + sp);
            Complex64::new(0.0, (kappa + 1.0) * sp + diff)
        } else {
            self.plus * kappa - self.minus
        }
    }

    /// `kappa beta+ + beta-`.
    pub(crate) fn kappa_plus_plus_minus(&self, medium: &Medium) -> Complex64 {
        self.plus * medium.kappa + self.minus
    }
}
