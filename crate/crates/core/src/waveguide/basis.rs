use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenpairs `(lambda_n, psi_n)` of the transverse Laplacian on the
/// waveguide cross-section.
///
/// Only the eigenvalues enter the modal systems, so an arbitrary
/// cross-section can be described by its eigenvalue list; such a basis has
/// no eigenfunction evaluator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransverseBasis {
    /// `(0, length)` with `psi(0) = psi(length) = 0`; modes `n >= 1`.
    Dirichlet { length: f64 },
    /// `(0, length)` with `psi'(0) = psi'(length) = 0`; modes `n >= 0`.
    Neumann { length: f64 },
    /// Nondecreasing positive eigenvalues, modes indexed from 0.
    UserList { eigenvalues: Vec<f64> },
}

impl TransverseBasis {
    pub fn dirichlet(length: f64) -> Result<Self> {
        let b = Self::Dirichlet { length };
        b.validate()?;
        Ok(b)
    }

    pub fn neumann(length: f64) -> Result<Self> {
        let b = Self::Neumann { length };
        b.validate()?;
        Ok(b)
    }

    pub fn user_list(eigenvalues: Vec<f64>) -> Result<Self> {
        let b = Self::UserList { eigenvalues };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Dirichlet { length } | Self::Neumann { length } => {
                if !(length.is_finite() && *length > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "cross-section length must be positive, got {length}"
                    )));
                }
            }
            Self::UserList { eigenvalues } => {
                if eigenvalues.is_empty() {
                    return Err(Error::InvalidConfig("empty eigenvalue list".into()));
                }
                if eigenvalues.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                    return Err(Error::InvalidConfig(
                        "eigenvalues must be positive and finite".into(),
                    ));
                }
                if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidConfig(
                        "eigenvalues must be listed in nondecreasing order".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn first_index(&self) -> usize {
        match self {
            Self::Dirichlet { .. } => 1,
            Self::Neumann { .. } | Self::UserList { .. } => 0,
        }
    }

    /// Last valid index, or `None` for an infinite basis.
    pub fn last_index(&self) -> Option<usize> {
        match self {
            Self::UserList { eigenvalues } => Some(eigenvalues.len() - 1),
            _ => None,
        }
    }

    pub fn eigenvalue(&self, n: usize) -> Result<f64> {
        if n < self.first_index() || self.last_index().is_some_and(|last| n > last) {
            return Err(Error::IndexOutOfRange(format!(
                "mode {n} is not in the transverse basis"
            )));
        }
        Ok(match self {
            Self::Dirichlet { length } | Self::Neumann { length } => {
                let w = n as f64 * PI / length;
                w * w
            }
            Self::UserList { eigenvalues } => eigenvalues[n],
        })
    }

    /// `(n, lambda_n)` for every mode from the first up to `n_max`.
    pub fn modes(&self, n_max: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let last = self.last_index().map_or(n_max, |l| l.min(n_max));
        (self.first_index()..=last).filter_map(move |n| self.eigenvalue(n).ok().map(|l| (n, l)))
    }

    /// Modes with `lo < lambda_n < hi`.
    pub fn modes_between(&self, lo: f64, hi: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        let mut n = self.first_index();
        while let Ok(l) = self.eigenvalue(n) {
            if l >= hi {
                break;
            }
            if l > lo {
                out.push((n, l));
            }
            n += 1;
        }
        out
    }

    /// The mode whose eigenvalue is closest to `lambda` (lowest index on ties).
    pub fn nearest(&self, lambda: f64) -> (usize, f64) {
        match self {
            Self::Dirichlet { length } | Self::Neumann { length } => {
                let guess = (lambda.max(0.0).sqrt() * length / PI).round() as usize;
                let lo = guess.saturating_sub(1).max(self.first_index());
                (lo..=guess + 1)
                    .map(|n| (n, self.eigenvalue(n).expect("index within infinite basis")))
                    .min_by(|a, b| (a.1 - lambda).abs().total_cmp(&(b.1 - lambda).abs()))
                    .expect("nonempty candidate range")
            }
            Self::UserList { eigenvalues } => eigenvalues
                .iter()
                .copied()
                .enumerate()
                .min_by(|a, b| (a.1 - lambda).abs().total_cmp(&(b.1 - lambda).abs()))
                .expect("validated nonempty list"),
        }
    }

    /// `L^2`-normalized eigenfunction `psi_n(y)`.
    pub fn eigenfunction(&self, n: usize, y: f64) -> Result<f64> {
        self.eigenvalue(n)?;
        match self {
            Self::Dirichlet { length } => {
                Ok((2.0 / length).sqrt() * (n as f64 * PI * y / length).sin())
            }
            Self::Neumann { length } if n == 0 => Ok(1.0 / length.sqrt()),
            Self::Neumann { length } => {
                Ok((2.0 / length).sqrt() * (n as f64 * PI * y / length).cos())
            }
            Self::UserList { .. } => Err(Error::InvalidConfig(
                "a basis given by its eigenvalues alone has no eigenfunction evaluator".into(),
            )),
        }
    }

    /// Width of the cross-section, when known.
    pub fn length(&self) -> Option<f64> {
        match self {
            Self::Dirichlet { length } | Self::Neumann { length } => Some(*length),
            Self::UserList { .. } => None,
        }
    }
}
