//! Modal analysis of scalar transmission problems whose principal
//! coefficient changes sign across an interface.
//!
//! The crate solves the per-mode linear systems for a negative disk or ball
//! and for flat-interface waveguides, classifies well-posedness and the
//! order of regularity lost, locates kernel modes, and provides the
//! overflow-safe special functions these computations need.
//!
//! ```
//! use num_complex::Complex64;
//! use signflip::disk_ball::{classify_case, determinant, inverse_entry_slopes, solve_mode, Dimension, DiskBallConfig};
//! use signflip::regime::CaseLabel;
//!
//! // Negative unit disk with contrast -3 and equal wavenumbers.
//! let disk = DiskBallConfig::new(Dimension::Two, 1.0, -3.0, 2.0, 2.0)?;
//! assert_eq!(classify_case(&disk), CaseLabel::Standard);
//!
//! let d = determinant(&disk, 40)?;
//! assert!(d.value.norm() > 0.0);
//! let (u_minus, u_plus) = solve_mode(&disk, 40, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))?;
//! assert!((u_minus - u_plus - 1.0).norm() < 1e-12);
//!
//! // Inverse entries grow like m^p with p = [[0, -1], [0, -1]] here.
//! let fit = inverse_entry_slopes(&disk, 20..=100)?;
//! assert!(fit.max_deviation() < 0.1);
//! # Ok::<(), signflip::Error>(())
//! ```

pub mod disk_ball;
pub mod error;
pub mod field;
pub mod radiation;
pub mod regime;
pub mod regularity;
pub mod report;
pub mod scaled;
pub mod special_functions;
pub mod waveguide;

pub use error::{Error, Result};
pub use scaled::ScaledValue;
