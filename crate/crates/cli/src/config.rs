use std::ops::RangeInclusive;
use std::path::Path;

use serde::Deserialize;
use signflip::disk_ball::{DiskBallConfig, Dimension};
use signflip::regime::{classify_with_tolerance, CaseLabel, Medium, REGIME_TOLERANCE};
use signflip::waveguide::{
    Geometry, TransverseBasis, WaveguideConfig, WaveguideTolerances, CUTOFF_TOLERANCE, MATCH_TOLERANCE,
};

use crate::error::CliError;

/// Allowed deviation of a fitted slope from its predicted order.
pub const SLOPE_TOLERANCE: f64 = 0.1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Used when no subcommand is given on the command line.
    #[serde(default)]
    pub command: Option<String>,
    pub geometry: GeometryBlock,
    pub medium: MediumBlock,
    /// `"a..b"`, inclusive.
    #[serde(default)]
    pub modes: Option<String>,
    #[serde(default)]
    pub force_case: Option<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub curvature: Option<CurvatureBlock>,
    #[serde(default)]
    pub field: Option<FieldBlock>,
    #[serde(default)]
    pub special: Option<SpecialBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeometryBlock {
    Disk { radius: f64 },
    Ball { radius: f64 },
    Halfline { basis: TransverseBasis },
    Slab { length: f64, basis: TransverseBasis },
}

/// Exactly one way of describing the two media.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MediumBlock {
    Contrast(ContrastMedium),
    Coefficients(CoefficientMedium),
    Material(MaterialMedium),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContrastMedium {
    pub kappa: f64,
    pub k_plus: f64,
    pub k_minus: f64,
}

/// `kappa = sigma+ / sigma-`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientMedium {
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub k_plus: f64,
    pub k_minus: f64,
}

/// Permittivity and permeability on each side at angular frequency
/// `omega`: `sigma = 1 / mu` and `k = omega sqrt(epsilon mu)`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialMedium {
    pub epsilon_plus: f64,
    pub mu_plus: f64,
    pub epsilon_minus: f64,
    pub mu_minus: f64,
    pub omega: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_regime")]
    pub regime: f64,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    #[serde(default = "default_matching")]
    pub matching: f64,
    #[serde(default = "default_slope")]
    pub slope: f64,
}

fn default_regime() -> f64 {
    REGIME_TOLERANCE
}
fn default_cutoff() -> f64 {
    CUTOFF_TOLERANCE
}
fn default_matching() -> f64 {
    MATCH_TOLERANCE
}
fn default_slope() -> f64 {
    SLOPE_TOLERANCE
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            regime: REGIME_TOLERANCE,
            cutoff: CUTOFF_TOLERANCE,
            matching: MATCH_TOLERANCE,
            slope: SLOPE_TOLERANCE,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureBlock {
    pub xi: f64,
    pub n_list: Vec<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    /// Explicit modal data; when absent, `decay` generates
    /// `f = e^{-decay * order}`, `g = 0` over the mode range.
    #[serde(default)]
    pub data: Option<Vec<DataEntry>>,
    #[serde(default)]
    pub decay: Option<f64>,
    pub grid: Grid,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    64
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataEntry {
    /// Fourier index, spherical degree or transverse mode.
    #[serde(default)]
    pub n: Option<i64>,
    #[serde(default)]
    pub l: Option<u32>,
    #[serde(default)]
    pub m: Option<i32>,
    #[serde(default)]
    pub f: [f64; 2],
    #[serde(default)]
    pub g: [f64; 2],
}

/// Each axis is `[min, max, count]`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x: (f64, f64, usize),
    pub y: (f64, f64, usize),
    #[serde(default)]
    pub z: Option<(f64, f64, usize)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialBlock {
    pub function: String,
    pub orders: Vec<f64>,
    pub radii: Vec<f64>,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_modes(text: &str) -> Result<RangeInclusive<u32>, CliError> {
    let bad = || CliError::Config(format!("mode range must look like 'a..b', got '{text}'"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(CliError::Config(format!("empty mode range {a}..{b}")));
    }
    Ok(a..=b)
}

impl RunConfig {
    /// Medium with any sign of the contrast.
    pub fn medium(&self) -> Result<Medium, CliError> {
        let m = match &self.medium {
            MediumBlock::Contrast(c) => Medium::unchecked_sign(c.kappa, c.k_plus, c.k_minus)?,
            MediumBlock::Coefficients(c) => {
                if c.sigma_minus == 0.0 {
                    return Err(CliError::Config("sigma_minus must be nonzero".into()));
                }
                Medium::unchecked_sign(c.sigma_plus / c.sigma_minus, c.k_plus, c.k_minus)?
            }
            MediumBlock::Material(c) => {
                if c.mu_plus == 0.0 || c.mu_minus == 0.0 {
                    return Err(CliError::Config("permeabilities must be nonzero".into()));
                }
                let k = |eps: f64, mu: f64| -> Result<f64, CliError> {
                    if eps * mu <= 0.0 {
                        return Err(CliError::Config(
                            "epsilon and mu must share their sign on each side".into(),
                        ));
                    }
                    Ok(c.omega * (eps * mu).sqrt())
                };
                Medium::unchecked_sign(c.mu_minus / c.mu_plus, k(c.epsilon_plus, c.mu_plus)?, k(c.epsilon_minus, c.mu_minus)?)?
            }
        };
        Ok(m)
    }

    /// Forced label if any, else the label under the regime tolerance.
    pub fn case(&self, forced: Option<CaseLabel>, medium: &Medium) -> Result<CaseLabel, CliError> {
        let configured = self.force_case.as_deref().map(str::parse::<CaseLabel>).transpose()?;
        Ok(forced.or(configured).unwrap_or_else(|| {
            classify_with_tolerance(medium.kappa, medium.k_plus, medium.k_minus, self.tolerances.regime)
        }))
    }

    pub fn is_disk_ball(&self) -> bool {
        matches!(self.geometry, GeometryBlock::Disk { .. } | GeometryBlock::Ball { .. })
    }

    pub fn disk_ball(&self, case: CaseLabel) -> Result<DiskBallConfig, CliError> {
        let (dimension, radius) = match self.geometry {
            GeometryBlock::Disk { radius } => (Dimension::Two, radius),
            GeometryBlock::Ball { radius } => (Dimension::Three, radius),
            _ => return Err(CliError::Config("this command needs a disk or ball geometry".into())),
        };
        let m = self.medium()?;
        Ok(DiskBallConfig::new(dimension, radius, m.kappa, m.k_plus, m.k_minus)?.with_forced_case(case))
    }

    /// Waveguide configuration; a positive contrast is accepted only when
    /// `any_contrast` is set.
    pub fn waveguide(&self, case: CaseLabel, any_contrast: bool) -> Result<WaveguideConfig, CliError> {
        let (basis, geometry) = match &self.geometry {
            GeometryBlock::Halfline { basis } => (basis.clone(), Geometry::HalfLine),
            GeometryBlock::Slab { length, basis } => (basis.clone(), Geometry::Slab { length: *length }),
            _ => return Err(CliError::Config("this command needs a halfline or slab geometry".into())),
        };
        let m = self.medium()?;
        let config = if any_contrast {
            WaveguideConfig::with_any_contrast(basis, m.kappa, m.k_plus, m.k_minus, geometry)?
        } else {
            WaveguideConfig::new(basis, m.kappa, m.k_plus, m.k_minus, geometry)?
        };
        let tolerances = WaveguideTolerances {
            cutoff: self.tolerances.cutoff,
            matching: self.tolerances.matching,
        };
        Ok(config.with_tolerances(tolerances)?.with_forced_case(case))
    }
}
