use num_complex::Complex64;
use serde::Serialize;

use super::{Geometry, ModeBetas, WaveguideConfig};
use crate::error::{Error, Result};
use crate::regime::{CaseLabel, Medium};
use crate::scaled::ScaledValue;

const SINGULAR_MARGIN: f64 = 1e-14;

/// Mode system on the slab `(0, L)`:
///
/// ```text
/// [ -1          1            1           ] [u+  ]   [ f   ]
/// [ kappa beta+ beta-        -beta-       ] [u-_+] = [ i g ]
/// [ 0           e^{i beta- L} e^{-i beta- L} ] [u-_-]   [ 0   ]
/// ```
///
/// for `u+ e^{-i beta+ x}` on `x < 0` and
/// `u-_+ e^{i beta- x} + u-_- e^{-i beta- x}` on `(0, L)`. The exponentials
/// reach `e^{L sqrt(lambda)}`, so everything is kept in scaled form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlabSystem {
    pub betas: ModeBetas,
    pub medium: Medium,
    pub length: f64,
    /// `e^{i beta- L}`.
    pub forward: ScaledValue,
    /// `e^{-i beta- L}`.
    pub backward: ScaledValue,
    pub determinant: ScaledValue,
    pub rhs: [Complex64; 3],
}

impl SlabSystem {
    pub fn matrix(&self) -> [[ScaledValue; 3]; 3] {
        let s = ScaledValue::from_complex;
        let b = self.betas.minus;
        [
            [s((-1.0).into()), ScaledValue::ONE, ScaledValue::ONE],
            [s(self.betas.plus * self.medium.kappa), s(b), s(-b)],
            [ScaledValue::ZERO, self.forward, self.backward],
        ]
    }

    /// Transposed cofactor matrix.
    pub fn adjugate(&self) -> [[ScaledValue; 3]; 3] {
        let (a, b) = (self.forward, self.backward);
        let bm = self.betas.minus;
        let p = self.betas.plus * self.medium.kappa;
        let pmb = self.betas.kappa_plus_minus_minus(&self.medium);
        let ppb = self.betas.kappa_plus_plus_minus(&self.medium);
        let s = ScaledValue::from_complex;
        [
            [(a + b).scale(bm), a - b, s(-2.0 * bm)],
            [-b.scale(p), -b, s(pmb)],
            [a.scale(p), a, s(-ppb)],
        ]
    }

    pub fn inverse(&self) -> [[ScaledValue; 3]; 3] {
        let inv_d = self.determinant.recip();
        self.adjugate().map(|row| row.map(|v| v * inv_d))
    }

    /// `(u+, u-_+, u-_-)`.
    pub fn solve(&self) -> [ScaledValue; 3] {
        let inv = self.inverse();
        let rhs = self.rhs.map(ScaledValue::from_complex);
        inv.map(|row| row[0] * rhs[0] + row[1] * rhs[1] + row[2] * rhs[2])
    }

    /// Componentwise relative residual
    /// `max_i |(A x - b)_i| / (sum_j |A_ij| |x_j| + |b_i|)`.
    pub fn residual(&self, x: &[ScaledValue; 3]) -> f64 {
        let rhs = self.rhs.map(ScaledValue::from_complex);
        relative_defect(&self.matrix(), |j| x[j], |i| rhs[i])
    }

    /// `max_ij |(A A^-1 - I)_ij|`, each entry relative to
    /// `sum_k |A_ik| |A^-1_kj|`.
    pub fn inverse_defect(&self) -> f64 {
        let a = self.matrix();
        let inv = self.inverse();
        (0..3)
            .map(|j| {
                relative_defect(&a, |k| inv[k][j], |i| {
                    if i == j {
                        ScaledValue::ONE
                    } else {
                        ScaledValue::ZERO
                    }
                })
            })
            .fold(0.0, f64::max)
    }

    fn margin(&self) -> f64 {
        let pmb = self.betas.kappa_plus_minus_minus(&self.medium);
        let ppb = self.betas.kappa_plus_plus_minus(&self.medium);
        let scale = self.forward.abs().scale_real(pmb.norm()) + self.backward.abs().scale_real(ppb.norm());
        self.determinant.ratio(&scale).norm()
    }
}

fn relative_defect(
    a: &[[ScaledValue; 3]; 3],
    x: impl Fn(usize) -> ScaledValue,
    b: impl Fn(usize) -> ScaledValue,
) -> f64 {
    (0..3)
        .map(|i| {
            let mut ax = ScaledValue::ZERO;
            let mut scale = b(i).abs();
            for (j, aij) in a[i].iter().enumerate() {
                ax = ax + *aij * x(j);
                scale = scale + (*aij * x(j)).abs();
            }
            if scale.is_zero() {
                0.0
            } else {
                (ax - b(i)).ratio(&scale).norm()
            }
        })
        .fold(0.0, f64::max)
}

fn slab_length(config: &WaveguideConfig) -> Result<f64> {
    match config.geometry {
        Geometry::Slab { length } => Ok(length),
        Geometry::HalfLine => Err(Error::InvalidConfig(
            "operation requires the slab geometry".into(),
        )),
    }
}

fn exponentials(betas: &ModeBetas, length: f64) -> (ScaledValue, ScaledValue) {
    let z = Complex64::i() * betas.minus * length;
    (ScaledValue::exp(z), ScaledValue::exp(-z))
}

/// `-2 beta- cos(beta- L) + 2 i kappa beta+ sin(beta- L)` with the
/// trigonometric functions expanded into `e^{+-i beta- L}` and like
/// exponentials collected:
/// `(kappa beta+ - beta-) e^{i beta- L} - (kappa beta+ + beta-) e^{-i beta- L}`.
pub fn det_slab_expanded(config: &WaveguideConfig, n: usize) -> Result<ScaledValue> {
    let length = slab_length(config)?;
    let betas = config.betas(n)?;
    Ok(grouped_determinant(&betas, &config.medium, length))
}

fn grouped_determinant(betas: &ModeBetas, medium: &Medium, length: f64) -> ScaledValue {
    let (a, b) = exponentials(betas, length);
    a.scale(betas.kappa_plus_minus_minus(medium)) - b.scale(betas.kappa_plus_plus_minus(medium))
}

/// Slab determinant. When `kappa = -1`, `k+ = k-` and the mode is
/// evanescent it equals `2 beta+ e^{i beta+ L}`, which is used directly.
pub fn det_slab(config: &WaveguideConfig, n: usize) -> Result<ScaledValue> {
    let length = slab_length(config)?;
    let betas = config.betas(n)?;
    Ok(determinant(&betas, &config.medium, length))
}

fn determinant(betas: &ModeBetas, medium: &Medium, length: f64) -> ScaledValue {
    let evanescent = betas.lambda > medium.k_plus.max(medium.k_minus).powi(2);
    if medium.classify() == CaseLabel::SuperCritical && evanescent {
        ScaledValue::exp(Complex64::i() * betas.plus * length).scale(2.0 * betas.plus)
    } else {
        grouped_determinant(betas, medium, length)
    }
}

pub fn slab_system(config: &WaveguideConfig, n: usize, f: Complex64, g: Complex64) -> Result<SlabSystem> {
    let length = slab_length(config)?;
    let betas = config.betas(n)?;
    let (forward, backward) = exponentials(&betas, length);
    Ok(SlabSystem {
        betas,
        medium: config.medium,
        length,
        forward,
        backward,
        determinant: determinant(&betas, &config.medium, length),
        rhs: [f, Complex64::i() * g, Complex64::new(0.0, 0.0)],
    })
}

/// `(u+_n, u-_{n,+}, u-_{n,-})` for data `(f_n, g_n)`.
pub fn solve_slab(config: &WaveguideConfig, n: usize, f: Complex64, g: Complex64) -> Result<[ScaledValue; 3]> {
    let system = slab_system(config, n, f, g)?;
    if !(system.margin() > SINGULAR_MARGIN) {
        return Err(Error::SingularMode {
            mode: n,
            determinant: system.determinant.to_f64(),
        });
    }
    Ok(system.solve())
}

/// Leading behaviour of the slab determinant as `lambda -> inf`:
/// `i (1 + kappa) sqrt(lambda) e^{L sqrt(lambda)}`,
/// `i (k+^2 - k-^2) / (2 sqrt(lambda)) e^{L sqrt(lambda)}` at `kappa = -1`,
/// and `2 i sqrt(lambda) e^{-L sqrt(lambda)}` when also `k+ = k-`.
pub fn slab_det_asymptotic(config: &WaveguideConfig, lambda: f64) -> Result<ScaledValue> {
    let length = slab_length(config)?;
    let m = &config.medium;
    let root = lambda.sqrt();
    let grow = ScaledValue::exp_real(length * root);
    Ok(match config.case() {
        CaseLabel::Standard => grow.scale(Complex64::new(0.0, (1.0 + m.kappa) * root)),
        CaseLabel::Critical => grow.scale(Complex64::new(
            0.0,
            (m.k_plus * m.k_plus - m.k_minus * m.k_minus) / (2.0 * root),
        )),
        CaseLabel::SuperCritical => ScaledValue::exp_real(-length * root).scale(Complex64::new(0.0, 2.0 * root)),
    })
}

/// Leading behaviour of the first two columns of the slab inverse, rows
/// `(u+, u-_+, u-_-)`.
pub fn slab_inverse_prediction(config: &WaveguideConfig, lambda: f64) -> Result<[[ScaledValue; 2]; 3]> {
    let length = slab_length(config)?;
    let m = &config.medium;
    let root = lambda.sqrt();
    let (prefactor, p) = match config.case() {
        CaseLabel::Standard => (ScaledValue::from_real(1.0 / (1.0 + m.kappa)), 0),
        CaseLabel::Critical => (
            ScaledValue::from_real(2.0 / (m.k_plus * m.k_plus - m.k_minus * m.k_minus)),
            2,
        ),
        CaseLabel::SuperCritical => (ScaledValue::exp_real(2.0 * length * root).scale_real(0.5), 0),
    };
    let lp = lambda.powf(p as f64 / 2.0);
    let lq = lambda.powf((p as f64 - 1.0) / 2.0);
    let decay = ScaledValue::exp_real(-2.0 * length * root);
    let c = |re: f64, im: f64| prefactor.scale(Complex64::new(re, im));
    Ok([
        [c(-lp, 0.0), c(0.0, -lq)],
        [c(-m.kappa * lp, 0.0) * decay, c(0.0, lq) * decay],
        [c(m.kappa * lp, 0.0), c(0.0, -lq)],
    ])
}
