//! Shared randomized inverse-consistency trial.

use num_complex::Complex64;
use signflip::disk_ball::{build_system, DiskBallConfig, Dimension};
use signflip::waveguide::{slab_system, unbounded_system, Geometry, TransverseBasis, WaveguideConfig};
use signflip::Error;

#[derive(Clone, Copy, Debug)]
pub enum Family {
    Disk,
    Ball,
    HalfLine,
    Slab,
}

#[derive(Clone, Copy, Debug)]
pub enum Regime {
    Standard,
    Critical,
    SuperCritical,
}

#[derive(Clone, Copy, Debug)]
pub struct Trial {
    pub family: Family,
    pub regime: Regime,
    /// Used as is in the standard regime.
    pub kappa: f64,
    pub k_plus: f64,
    pub k_minus: f64,
    /// Radius or slab length.
    pub size: f64,
    pub mode: usize,
    pub f: Complex64,
    pub g: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Outcome {
    /// Worst of the inverse defect and the solve residual, with the
    /// tolerance that applies to this geometry.
    Checked { defect: f64, tolerance: f64 },
    /// Bessel zero, cut-off or kernel mode: the system is not solvable.
    Refused,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        match *self {
            Outcome::Checked { defect, tolerance } => defect < tolerance,
            Outcome::Refused => true,
        }
    }
}

/// `max_ij |(A B - I)_ij| / sum_k |A_ik| |B_kj|` for 2x2 matrices.
pub fn defect2(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let product = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            let scale = a[i][0].norm() * b[0][j].norm() + a[i][1].norm() * b[1][j].norm();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product - target).norm() / scale);
        }
    }
    worst
}

fn refusal(e: Error) -> Result<Outcome, String> {
    match e {
        Error::NearZeroDenominator { .. } | Error::Cutoff { .. } | Error::SingularMode { .. } => Ok(Outcome::Refused),
        other => Err(other.to_string()),
    }
}

pub fn run(t: &Trial) -> Result<Outcome, String> {
    let (kappa, kp, km) = match t.regime {
        Regime::Standard => (t.kappa, t.k_plus, t.k_minus),
        Regime::Critical => (-1.0, t.k_plus, t.k_minus + 0.5),
        Regime::SuperCritical => (-1.0, t.k_plus, t.k_plus),
    };
    match t.family {
        Family::Disk | Family::Ball => {
            let dimension = if matches!(t.family, Family::Disk) { Dimension::Two } else { Dimension::Three };
            let config = DiskBallConfig::new(dimension, t.size, kappa, kp, km).map_err(|e| e.to_string())?;
            let system = match build_system(&config, t.mode as i64, t.f, t.g) {
                Ok(s) => s,
                Err(e) => return refusal(e),
            };
            let defect = defect2(&system.matrix, &system.inverse()).max(system.residual(&system.solve()));
            Ok(Outcome::Checked { defect, tolerance: 1e-10 })
        }
        Family::HalfLine | Family::Slab => {
            let geometry = if matches!(t.family, Family::HalfLine) {
                Geometry::HalfLine
            } else {
                Geometry::Slab { length: t.size }
            };
            let basis = TransverseBasis::dirichlet(1.0 + 0.1 * t.size).map_err(|e| e.to_string())?;
            let config = match WaveguideConfig::new(basis, kappa, kp, km, geometry) {
                Ok(c) => c,
                Err(e) => return refusal(e),
            };
            let n = t.mode.max(1);
            if matches!(t.family, Family::HalfLine) {
                let system = unbounded_system(&config, n, t.f, t.g).map_err(|e| e.to_string())?;
                let margin = system.betas.minus.norm() + kappa.abs() * system.betas.plus.norm();
                if system.determinant.norm() <= 1e-14 * margin {
                    return Ok(Outcome::Refused);
                }
                let defect = defect2(&system.matrix, &system.inverse()).max(system.residual(&system.solve()));
                Ok(Outcome::Checked { defect, tolerance: 1e-10 })
            } else {
                let system = slab_system(&config, n, t.f, t.g).map_err(|e| e.to_string())?;
                let defect = system.inverse_defect().max(system.residual(&system.solve()));
                Ok(Outcome::Checked { defect, tolerance: 1e-9 })
            }
        }
    }
}
