//! Reconstruction of fields from modal coefficients, and checks of the
//! transmission conditions in physical space.
//!
//! Radial factors are normalized to one on the interface:
//! `C(k- r) / C(k- R)` inside and `H(k+ r) / H(k+ R)` outside, each evaluated
//! as a ratio of scaled values of the same order. Normal derivatives on the
//! interface point out of the negative medium.

mod angular;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disk_ball::{solve_mode, Dimension, DiskBallConfig};
use crate::error::{Error, Result};
use crate::scaled::ScaledValue;
use crate::special_functions::{bessel_j, evaluate as cylinder, spherical, Order, Spherical};
use crate::waveguide::{solve_slab, solve_unbounded, Geometry, KernelMode, WaveguideConfig};

pub use angular::{
    angular_basis, fourier, gauss_legendre, legendre_table, spherical_harmonic, AngularFunction,
};

/// Relative size of the highest-order contribution above which an
/// evaluation is flagged as possibly under-resolved.
pub const TRUNCATION_WARNING: f64 = 1e-10;
/// Relative contribution below which a mode counts as negligible when
/// choosing a truncation.
pub const NEGLIGIBLE_CONTRIBUTION: f64 = 1e-12;
/// Consecutive negligible orders that end an automatic truncation.
pub const NEGLIGIBLE_RUN: usize = 3;
/// Radii below this are evaluated as the limit at the centre.
pub const CENTRE_GUARD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldGeometry {
    Disk2d,
    Ball3d,
    HalfLine,
    Slab,
}

/// Label of one interface basis function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModeIndex {
    Fourier { n: i64 },
    Spherical { l: u32, m: i32 },
    Transverse { n: usize },
}

impl ModeIndex {
    /// `|n|`, `l` or `n`: the index the radial or normal factor depends on.
    pub fn order(&self) -> u64 {
        match *self {
            Self::Fourier { n } => n.unsigned_abs(),
            Self::Spherical { l, .. } => l as u64,
            Self::Transverse { n } => n as u64,
        }
    }
}

/// Modal data `(f_i, g_i)` of the transmission problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataTerm {
    pub index: ModeIndex,
    pub f: Complex64,
    pub g: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coefficients {
    /// Disk, ball and half-line: one amplitude per side.
    TwoSided { negative: Complex64, positive: Complex64 },
    /// Slab: `u+` outside, `u-_+ e^{i beta- x} + u-_- e^{-i beta- x}` inside.
    Slab {
        positive: ScaledValue,
        forward: ScaledValue,
        backward: ScaledValue,
    },
}

impl Coefficients {
    fn is_finite(&self) -> bool {
        match self {
            Self::TwoSided { negative, positive } => negative.is_finite() && positive.is_finite(),
            Self::Slab {
                positive,
                forward,
                backward,
            } => positive.is_finite() && forward.is_finite() && backward.is_finite(),
        }
    }

    /// Interface traces `(u-, u+)` of this mode.
    fn traces(&self) -> (ScaledValue, ScaledValue) {
        match *self {
            Self::TwoSided { negative, positive } => {
                (ScaledValue::from_complex(negative), ScaledValue::from_complex(positive))
            }
            Self::Slab {
                positive,
                forward,
                backward,
            } => (forward + backward, positive),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModalTerm {
    pub index: ModeIndex,
    pub coefficients: Coefficients,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FieldSetting {
    DiskBall(DiskBallConfig),
    Waveguide(WaveguideConfig),
}

impl FieldSetting {
    pub fn geometry(&self) -> FieldGeometry {
        match self {
            Self::DiskBall(c) => match c.dimension {
                Dimension::Two => FieldGeometry::Disk2d,
                Dimension::Three => FieldGeometry::Ball3d,
            },
            Self::Waveguide(c) => match c.geometry {
                Geometry::HalfLine => FieldGeometry::HalfLine,
                Geometry::Slab { .. } => FieldGeometry::Slab,
            },
        }
    }

    fn kappa(&self) -> f64 {
        match self {
            Self::DiskBall(c) => c.medium.kappa,
            Self::Waveguide(c) => c.medium.kappa,
        }
    }

    fn check_index(&self, index: ModeIndex) -> Result<()> {
        match (self.geometry(), index) {
            (FieldGeometry::Disk2d, ModeIndex::Fourier { .. }) => Ok(()),
            (FieldGeometry::Ball3d, ModeIndex::Spherical { l, m }) => angular::check_degree(l, m),
            (FieldGeometry::HalfLine | FieldGeometry::Slab, ModeIndex::Transverse { n }) => {
                let Self::Waveguide(c) = self else { unreachable!() };
                c.basis.eigenvalue(n).map(|_| ())
            }
            (g, i) => Err(Error::InvalidConfig(format!(
                "mode {i:?} does not belong to a {g:?} field"
            ))),
        }
    }
}

/// Side of the interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Negative,
    Positive,
}

/// Evaluation point in the coordinates native to the geometry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Point {
    Polar { r: f64, theta: f64 },
    Spherical { r: f64, theta: f64, phi: f64 },
    Planar { x: f64, y: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldValue {
    pub value: Complex64,
    pub region: Region,
    /// Size of the highest-order contribution relative to the sum of the
    /// magnitudes of all contributions.
    pub tail: f64,
    pub truncation_warning: bool,
}

/// A truncated modal series on both sides of the interface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModalField {
    setting: FieldSetting,
    terms: Vec<ModalTerm>,
}

fn slab_length(setting: &FieldSetting) -> Option<f64> {
    match setting {
        FieldSetting::Waveguide(WaveguideConfig {
            geometry: Geometry::Slab { length },
            ..
        }) => Some(*length),
        _ => None,
    }
}

impl ModalField {
    pub fn new(setting: FieldSetting, mut terms: Vec<ModalTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidTruncation(0));
        }
        let slab = setting.geometry() == FieldGeometry::Slab;
        for t in &terms {
            setting.check_index(t.index)?;
            if !t.coefficients.is_finite() {
                return Err(Error::InvalidConfig(format!("non-finite coefficient for {:?}", t.index)));
            }
            if slab != matches!(t.coefficients, Coefficients::Slab { .. }) {
                return Err(Error::InvalidConfig(format!(
                    "coefficient layout of {:?} does not match the geometry",
                    t.index
                )));
            }
        }
        terms.sort_by_key(|t| (t.index.order(), t.index));
        Ok(Self { setting, terms })
    }

    /// Solves every mode present in `data`.
    pub fn solve(setting: FieldSetting, data: &[DataTerm]) -> Result<Self> {
        let terms = data
            .iter()
            .map(|d| solve_term(&setting, d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(setting, terms)
    }

    /// Solves order by order, `0, 1, 2, ...` up to `max_order`, and stops
    /// after [`NEGLIGIBLE_RUN`] consecutive orders whose largest coefficient
    /// is below [`NEGLIGIBLE_CONTRIBUTION`] times the running coefficient sum.
    pub fn solve_truncated(
        setting: FieldSetting,
        data: impl Fn(ModeIndex) -> (Complex64, Complex64),
        max_order: u64,
    ) -> Result<TruncatedField> {
        let mut terms = Vec::new();
        let mut running = 0.0;
        let mut quiet = 0;
        let mut converged = false;
        for order in 0..=max_order {
            let mut largest = 0.0f64;
            for index in indices_of_order(&setting, order) {
                if setting.check_index(index).is_err() {
                    continue;
                }
                let (f, g) = data(index);
                let term = solve_term(&setting, &DataTerm { index, f, g })?;
                let (neg, pos) = term.coefficients.traces();
                let size = neg.to_complex().norm().max(pos.to_complex().norm());
                largest = largest.max(size);
                running += size;
                terms.push(term);
            }
            if largest <= NEGLIGIBLE_CONTRIBUTION * running {
                quiet += 1;
                if quiet == NEGLIGIBLE_RUN {
                    converged = true;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        Ok(TruncatedField {
            field: Self::new(setting, terms)?,
            converged,
        })
    }

    /// Kernel function of a waveguide as a single-mode field.
    pub fn kernel(config: WaveguideConfig, mode: &KernelMode) -> Result<Self> {
        let i = Complex64::i();
        let coefficients = match config.geometry {
            Geometry::HalfLine => Coefficients::TwoSided {
                negative: 1.0.into(),
                positive: 1.0.into(),
            },
            Geometry::Slab { length } => {
                let phase = i * mode.beta_minus * length;
                Coefficients::Slab {
                    positive: ScaledValue::exp(phase) - ScaledValue::exp(-phase),
                    forward: -ScaledValue::exp(-phase),
                    backward: ScaledValue::exp(phase),
                }
            }
        };
        let index = ModeIndex::Transverse { n: mode.mode };
        Self::new(FieldSetting::Waveguide(config), vec![ModalTerm { index, coefficients }])
    }

    pub fn setting(&self) -> &FieldSetting {
        &self.setting
    }

    pub fn geometry(&self) -> FieldGeometry {
        self.setting.geometry()
    }

    /// Terms ordered by increasing order.
    pub fn terms(&self) -> &[ModalTerm] {
        &self.terms
    }

    pub fn truncation(&self) -> usize {
        self.terms.len()
    }

    pub fn max_order(&self) -> u64 {
        self.terms.last().map_or(0, |t| t.index.order())
    }

    /// Region containing `point`; interface points are assigned to the
    /// negative side.
    pub fn region_of(&self, point: Point) -> Result<Region> {
        let g = self.geometry();
        match (g, point) {
            (FieldGeometry::Disk2d, Point::Polar { r, .. }) | (FieldGeometry::Ball3d, Point::Spherical { r, .. }) => {
                let FieldSetting::DiskBall(c) = &self.setting else { unreachable!() };
                if !(r >= 0.0 && r.is_finite()) {
                    return Err(Error::RegionMismatch(format!("radius {r}")));
                }
                Ok(if r <= c.radius { Region::Negative } else { Region::Positive })
            }
            (FieldGeometry::HalfLine, Point::Planar { x, .. }) => {
                Ok(if x >= 0.0 { Region::Negative } else { Region::Positive })
            }
            (FieldGeometry::Slab, Point::Planar { x, .. }) => {
                let length = slab_length(&self.setting).expect("slab setting");
                if x > length {
                    Err(Error::RegionMismatch(format!(
                        "x = {x} lies beyond the slab wall at {length}"
                    )))
                } else if x >= 0.0 {
                    Ok(Region::Negative)
                } else {
                    Ok(Region::Positive)
                }
            }
            (g, p) => Err(Error::RegionMismatch(format!("{p:?} is not a point of a {g:?} field"))),
        }
    }

    /// Series value at `point`, on the side that contains it.
    pub fn evaluate(&self, point: Point) -> Result<FieldValue> {
        let region = self.region_of(point)?;
        self.evaluate_in(region, point)
    }

    /// Series value of the side `region` at `point`, which must lie in the
    /// closure of that side.
    pub fn evaluate_in(&self, region: Region, point: Point) -> Result<FieldValue> {
        let at = self.region_of(point)?;
        let on_interface = match point {
            Point::Polar { r, .. } | Point::Spherical { r, .. } => {
                let FieldSetting::DiskBall(c) = &self.setting else { unreachable!() };
                r == c.radius
            }
            Point::Planar { x, .. } => x == 0.0,
        };
        if at != region && !on_interface {
            return Err(Error::RegionMismatch(format!(
                "{point:?} is not in the closure of the {region:?} side"
            )));
        }
        let angular = self.angular_evaluator(point)?;
        let mut radial_cache: BTreeMap<u64, ScaledValue> = BTreeMap::new();
        let mut contributions: Vec<(u64, Complex64)> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let order = t.index.order();
            let c = match t.coefficients {
                Coefficients::TwoSided { negative, positive } => {
                    let radial = match radial_cache.get(&order) {
                        Some(v) => *v,
                        None => {
                            let v = self.normal_factor(region, order, point)?;
                            radial_cache.insert(order, v);
                            v
                        }
                    };
                    let amp = if region == Region::Negative { negative } else { positive };
                    (radial.scale(amp)).to_complex()
                }
                Coefficients::Slab {
                    positive,
                    forward,
                    backward,
                } => {
                    let Point::Planar { x, .. } = point else { unreachable!() };
                    let betas = self.waveguide_config().betas(order as usize)?;
                    let i = Complex64::i();
                    match region {
                        Region::Positive => (positive * ScaledValue::exp(-i * betas.plus * x)).to_complex(),
                        Region::Negative => (forward * ScaledValue::exp(i * betas.minus * x)
                            + backward * ScaledValue::exp(-i * betas.minus * x))
                        .to_complex(),
                    }
                }
            };
            contributions.push((order, c * angular(t.index)?));
        }
        Ok(summarize(region, &contributions))
    }

    fn waveguide_config(&self) -> &WaveguideConfig {
        match &self.setting {
            FieldSetting::Waveguide(c) => c,
            FieldSetting::DiskBall(_) => unreachable!("waveguide-only path"),
        }
    }

    /// Radial (disk, ball) or normal (half-line) factor of one order.
    fn normal_factor(&self, region: Region, order: u64, point: Point) -> Result<ScaledValue> {
        match (&self.setting, point) {
            (FieldSetting::DiskBall(c), Point::Polar { r, .. } | Point::Spherical { r, .. }) => {
                radial_factor(c, region, order, r)
            }
            (FieldSetting::Waveguide(c), Point::Planar { x, .. }) => {
                let b = c.betas(order as usize)?;
                let beta = if region == Region::Negative { b.minus } else { b.plus };
                Ok(ScaledValue::exp(-Complex64::i() * beta * x))
            }
            _ => Err(Error::RegionMismatch(format!("{point:?}"))),
        }
    }

    fn angular_evaluator(&self, point: Point) -> Result<impl Fn(ModeIndex) -> Result<Complex64> + '_> {
        let table = match point {
            Point::Spherical { theta, .. } => {
                angular::check_polar_angle(theta)?;
                Some(legendre_table(self.max_order() as u32, theta.cos()))
            }
            _ => None,
        };
        Ok(move |index: ModeIndex| match (index, point) {
            (ModeIndex::Fourier { n }, Point::Polar { theta, .. }) => Ok(fourier(n, theta)),
            (ModeIndex::Spherical { l, m }, Point::Spherical { phi, .. }) => Ok(angular::harmonic_from_table(
                table.as_ref().expect("table built for spherical points"),
                l,
                m,
                phi,
            )),
            (ModeIndex::Transverse { n }, Point::Planar { y, .. }) => {
                Ok(self.waveguide_config().basis.eigenfunction(n, y)?.into())
            }
            (i, p) => Err(Error::RegionMismatch(format!("{p:?} cannot evaluate {i:?}"))),
        })
    }

    /// Per-term interface traces and normal derivatives `(u, d_n u)` on
    /// both sides, from the term-by-term differentiated series.
    fn interface_terms(&self) -> Result<Vec<InterfaceTerm>> {
        let i = Complex64::i();
        let mut factors: BTreeMap<u64, (Complex64, Complex64)> = BTreeMap::new();
        self.terms
            .iter()
            .map(|t| {
                let order = t.index.order();
                let (neg_log, pos_log) = match factors.get(&order) {
                    Some(v) => *v,
                    None => {
                        let v = self.log_derivatives(order)?;
                        factors.insert(order, v);
                        v
                    }
                };
                let (u_neg, du_neg, u_pos) = match t.coefficients {
                    Coefficients::TwoSided { negative, positive } => (negative, negative * neg_log, positive),
                    Coefficients::Slab {
                        positive,
                        forward,
                        backward,
                    } => {
                        let beta = self.waveguide_config().betas(order as usize)?.minus;
                        // d_n = -d_x on the slab face
                        let slope = (forward - backward).scale(-i * beta);
                        ((forward + backward).to_complex(), slope.to_complex(), positive.to_complex())
                    }
                };
                Ok(InterfaceTerm {
                    index: t.index,
                    negative: u_neg,
                    negative_normal: du_neg,
                    positive: u_pos,
                    positive_normal: u_pos * pos_log,
                })
            })
            .collect()
    }

    /// `(d_n C / C)` on the negative and positive side at the interface.
    fn log_derivatives(&self, order: u64) -> Result<(Complex64, Complex64)> {
        let i = Complex64::i();
        match &self.setting {
            FieldSetting::DiskBall(c) => {
                let (r, km, kp) = (c.radius, c.medium.k_minus, c.medium.k_plus);
                match c.dimension {
                    Dimension::Two => {
                        let inner = cylinder(Order::integer(order as u32), km * r)?;
                        let outer = cylinder(Order::integer(order as u32), kp * r)?;
                        Ok((inner.dj.ratio(&inner.j) * km, outer.dh().ratio(&outer.h()) * kp))
                    }
                    Dimension::Three => {
                        let l = order as u32;
                        let j = spherical(l, km * r, Spherical::J)?;
                        let dj = spherical(l, km * r, Spherical::JPrime)?;
                        let h = spherical(l, kp * r, Spherical::H)?;
                        let dh = spherical(l, kp * r, Spherical::HPrime)?;
                        Ok((dj.ratio(&j) * km, dh.ratio(&h) * kp))
                    }
                }
            }
            FieldSetting::Waveguide(c) => {
                let b = c.betas(order as usize)?;
                // e^{-i beta x} with d_n = -d_x
                Ok((i * b.minus, i * b.plus))
            }
        }
    }

    /// Interface sample points: `samples` angles on the circle,
    /// `samples x 2 samples` Gauss-Legendre by uniform nodes on the sphere, or
    /// `samples` midpoints of the cross-section.
    fn interface_points(&self, samples: usize) -> Result<Vec<(Point, f64)>> {
        if samples == 0 {
            return Err(Error::InvalidConfig("at least one sample point is needed".into()));
        }
        match &self.setting {
            FieldSetting::DiskBall(c) => match c.dimension {
                Dimension::Two => {
                    let w = 2.0 * PI / samples as f64;
                    Ok((0..samples)
                        .map(|j| (Point::Polar { r: c.radius, theta: j as f64 * w }, w))
                        .collect())
                }
                Dimension::Three => {
                    let nphi = 2 * samples;
                    let wphi = 2.0 * PI / nphi as f64;
                    let mut out = Vec::with_capacity(samples * nphi);
                    for (x, w) in gauss_legendre(samples) {
                        let theta = x.clamp(-1.0, 1.0).acos();
                        for j in 0..nphi {
                            let phi = j as f64 * wphi;
                            out.push((Point::Spherical { r: c.radius, theta, phi }, w * wphi));
                        }
                    }
                    Ok(out)
                }
            },
            FieldSetting::Waveguide(c) => {
                let width = c.basis.length().ok_or_else(|| {
                    Error::InvalidConfig("the transverse basis has no eigenfunction evaluator".into())
                })?;
                let h = width / samples as f64;
                Ok((0..samples)
                    .map(|j| (Point::Planar { x: 0.0, y: (j as f64 + 0.5) * h }, h))
                    .collect())
            }
        }
    }
}

/// Result of [`ModalField::solve_truncated`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedField {
    pub field: ModalField,
    /// The negligible-run rule fired before `max_order`.
    pub converged: bool,
}

struct InterfaceTerm {
    index: ModeIndex,
    negative: Complex64,
    negative_normal: Complex64,
    positive: Complex64,
    positive_normal: Complex64,
}

fn indices_of_order(setting: &FieldSetting, order: u64) -> Vec<ModeIndex> {
    match setting.geometry() {
        FieldGeometry::Disk2d if order == 0 => vec![ModeIndex::Fourier { n: 0 }],
        FieldGeometry::Disk2d => {
            let n = order as i64;
            vec![ModeIndex::Fourier { n: -n }, ModeIndex::Fourier { n }]
        }
        FieldGeometry::Ball3d => {
            let l = order as u32;
            (-(l as i32)..=l as i32).map(|m| ModeIndex::Spherical { l, m }).collect()
        }
        FieldGeometry::HalfLine | FieldGeometry::Slab => vec![ModeIndex::Transverse { n: order as usize }],
    }
}

fn solve_term(setting: &FieldSetting, d: &DataTerm) -> Result<ModalTerm> {
    setting.check_index(d.index)?;
    let coefficients = match (setting, d.index) {
        (FieldSetting::DiskBall(c), ModeIndex::Fourier { n }) => {
            let (negative, positive) = solve_mode(c, n, d.f, d.g)?;
            Coefficients::TwoSided { negative, positive }
        }
        (FieldSetting::DiskBall(c), ModeIndex::Spherical { l, .. }) => {
            let (negative, positive) = solve_mode(c, l as i64, d.f, d.g)?;
            Coefficients::TwoSided { negative, positive }
        }
        (FieldSetting::Waveguide(c), ModeIndex::Transverse { n }) => match c.geometry {
            Geometry::HalfLine => {
                let (positive, negative) = solve_unbounded(c, n, d.f, d.g)?;
                Coefficients::TwoSided { negative, positive }
            }
            Geometry::Slab { .. } => {
                let [positive, forward, backward] = solve_slab(c, n, d.f, d.g)?;
                Coefficients::Slab {
                    positive,
                    forward,
                    backward,
                }
            }
        },
        _ => unreachable!("index checked against the geometry"),
    };
    Ok(ModalTerm {
        index: d.index,
        coefficients,
    })
}

/// `C(k r) / C(k R)` for the side's function `C`.
fn radial_factor(c: &DiskBallConfig, region: Region, order: u64, r: f64) -> Result<ScaledValue> {
    let big_r = c.radius;
    if region == Region::Negative {
        let k = c.medium.k_minus;
        if r < CENTRE_GUARD {
            // only the order-zero function is nonzero at the centre
            if order != 0 {
                return Ok(ScaledValue::ZERO);
            }
            let at_interface = match c.dimension {
                Dimension::Two => bessel_j(Order::integer(0), k * big_r)?,
                Dimension::Three => spherical(0, k * big_r, Spherical::J)?,
            };
            return Ok(at_interface.recip());
        }
        let (num, den) = match c.dimension {
            Dimension::Two => {
                let o = Order::integer(order as u32);
                (bessel_j(o, k * r)?, bessel_j(o, k * big_r)?)
            }
            Dimension::Three => {
                let l = order as u32;
                (spherical(l, k * r, Spherical::J)?, spherical(l, k * big_r, Spherical::J)?)
            }
        };
        Ok(num / den)
    } else {
        let k = c.medium.k_plus;
        let (num, den) = match c.dimension {
            Dimension::Two => {
                let o = Order::integer(order as u32);
                (cylinder(o, k * r)?.h(), cylinder(o, k * big_r)?.h())
            }
            Dimension::Three => {
                let l = order as u32;
                (spherical(l, k * r, Spherical::H)?, spherical(l, k * big_r, Spherical::H)?)
            }
        };
        Ok(num / den)
    }
}

fn summarize(region: Region, contributions: &[(u64, Complex64)]) -> FieldValue {
    let value: Complex64 = contributions.iter().map(|(_, c)| c).sum();
    let magnitude: f64 = contributions.iter().map(|(_, c)| c.norm()).sum();
    let top = contributions.last().map_or(0, |(o, _)| *o);
    let last: f64 = contributions
        .iter()
        .filter(|(o, _)| *o == top)
        .map(|(_, c)| c.norm())
        .sum();
    let tail = if magnitude > 0.0 { last / magnitude } else { 0.0 };
    FieldValue {
        value,
        region,
        tail,
        truncation_warning: contributions.len() > 1 && tail > TRUNCATION_WARNING,
    }
}

/// Largest pointwise violations of `u- - u+ = f` and
/// `d_n u- - kappa d_n u+ = g` over the interface samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransmissionResidual {
    pub jump: f64,
    pub flux: f64,
    /// Largest sum of the magnitudes of the terms entering a jump or flux
    /// sample. Rounding alone leaves residuals of order `1e-16` times this.
    pub jump_scale: f64,
    pub flux_scale: f64,
    pub samples: usize,
    /// Some sample had a highest-order contribution above
    /// [`TRUNCATION_WARNING`].
    pub truncation_warning: bool,
}

/// Checks the transmission conditions for `field` against the data it was
/// solved from. `samples` sets the interface grid (see the geometry notes on
/// [`ModalField`] sampling: angles, Gauss-Legendre rows, or midpoints).
pub fn transmission_residual(field: &ModalField, data: &[DataTerm], samples: usize) -> Result<TransmissionResidual> {
    for d in data {
        field.setting.check_index(d.index)?;
    }
    let kappa = field.setting.kappa();
    let terms = field.interface_terms()?;
    let points = field.interface_points(samples)?;
    let mut jump = 0.0f64;
    let mut flux = 0.0f64;
    let (mut jump_scale, mut flux_scale) = (0.0f64, 0.0f64);
    let mut warning = false;
    for (p, _) in &points {
        let angular = field.angular_evaluator(*p)?;
        let mut parts: Vec<(u64, Complex64)> = Vec::with_capacity(terms.len());
        let (mut j, mut q) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let (mut js, mut qs) = (0.0, 0.0);
        for t in &terms {
            let psi = angular(t.index)?;
            let tj = (t.negative - t.positive) * psi;
            j += tj;
            q += (t.negative_normal - kappa * t.positive_normal) * psi;
            js += (t.negative.norm() + t.positive.norm()) * psi.norm();
            qs += (t.negative_normal.norm() + kappa.abs() * t.positive_normal.norm()) * psi.norm();
            parts.push((t.index.order(), tj));
        }
        for d in data {
            let psi = angular(d.index)?;
            j -= d.f * psi;
            q -= d.g * psi;
            js += d.f.norm() * psi.norm();
            qs += d.g.norm() * psi.norm();
        }
        jump = jump.max(j.norm());
        flux = flux.max(q.norm());
        jump_scale = jump_scale.max(js);
        flux_scale = flux_scale.max(qs);
        warning |= summarize(Region::Negative, &parts).truncation_warning;
    }
    Ok(TransmissionResidual {
        jump,
        flux,
        jump_scale,
        flux_scale,
        samples: points.len(),
        truncation_warning: warning,
    })
}

/// Interface `L^2` norm of one side's trace, by quadrature, against the
/// `l^2` norm of its coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParsevalCheck {
    pub region: Region,
    pub quadrature_norm_sq: f64,
    pub coefficient_norm_sq: f64,
    pub relative_error: f64,
    pub points: usize,
}

/// Quadrature uses `4 max(N, order + 1)` nodes per angular direction, where
/// `N` is the number of stored modes; this integrates every product of two
/// stored basis functions exactly.
pub fn parseval_check(field: &ModalField, region: Region) -> Result<ParsevalCheck> {
    let terms = field.interface_terms()?;
    let nodes = 4 * field.truncation().max(field.max_order() as usize + 1);
    let points = field.interface_points(nodes)?;
    let coefficient_norm_sq: f64 = terms
        .iter()
        .map(|t| if region == Region::Negative { t.negative } else { t.positive }.norm_sqr())
        .sum();
    let mut quadrature_norm_sq = 0.0;
    for (p, w) in &points {
        let angular = field.angular_evaluator(*p)?;
        let mut trace = Complex64::new(0.0, 0.0);
        for t in &terms {
            let u = if region == Region::Negative { t.negative } else { t.positive };
            trace += u * angular(t.index)?;
        }
        quadrature_norm_sq += w * trace.norm_sqr();
    }
    let relative_error = if coefficient_norm_sq > 0.0 {
        (quadrature_norm_sq - coefficient_norm_sq).abs() / coefficient_norm_sq
    } else {
        quadrature_norm_sq
    };
    Ok(ParsevalCheck {
        region,
        quadrature_norm_sq,
        coefficient_norm_sq,
        relative_error,
        points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveguide::TransverseBasis;

    fn disk(kappa: f64, kp: f64, km: f64) -> FieldSetting {
        FieldSetting::DiskBall(DiskBallConfig::new(Dimension::Two, 1.0, kappa, kp, km).unwrap())
    }

    fn smooth_disk_data(n_max: i64) -> Vec<DataTerm> {
        (-n_max..=n_max)
            .map(|n| DataTerm {
                index: ModeIndex::Fourier { n },
                f: Complex64::new((-(n.abs() as f64)).exp(), 0.0),
                g: 0.0.into(),
            })
            .collect()
    }

    #[test]
    fn zero_field_and_zero_data() {
        let terms = vec![ModalTerm {
            index: ModeIndex::Fourier { n: 2 },
            coefficients: Coefficients::TwoSided {
                negative: 0.0.into(),
                positive: 0.0.into(),
            },
        }];
        let field = ModalField::new(disk(-2.0, 1.0, 1.5), terms).unwrap();
        assert_eq!(field.evaluate(Point::Polar { r: 0.5, theta: 1.0 }).unwrap().value, Complex64::new(0.0, 0.0));
        let res = transmission_residual(&field, &[], 16).unwrap();
        assert_eq!((res.jump, res.flux), (0.0, 0.0));
    }

    #[test]
    fn single_mode_is_normalized_on_the_interface() {
        let terms = vec![ModalTerm {
            index: ModeIndex::Fourier { n: 3 },
            coefficients: Coefficients::TwoSided {
                negative: 1.0.into(),
                positive: 0.0.into(),
            },
        }];
        let field = ModalField::new(disk(-2.0, 1.0, 1.5), terms).unwrap();
        let v = field.evaluate(Point::Polar { r: 1.0, theta: 0.4 }).unwrap();
        assert!((v.value - fourier(3, 0.4)).norm() < 1e-15);
        let inside = field.evaluate(Point::Polar { r: 0.5, theta: 0.4 }).unwrap();
        assert!(inside.value.norm() < v.value.norm());
        assert!(field.evaluate_in(Region::Positive, Point::Polar { r: 0.5, theta: 0.4 }).is_err());
        assert!(field.evaluate(Point::Planar { x: 0.0, y: 0.0 }).is_err());
    }

    #[test]
    fn solved_disk_satisfies_transmission_conditions() {
        let data = smooth_disk_data(60);
        let field = ModalField::solve(disk(-2.0, 1.0, 1.5), &data).unwrap();
        let res = transmission_residual(&field, &data, 256).unwrap();
        assert!(res.jump < 1e-8 && res.flux < 1e-8, "{res:?}");
        for region in [Region::Negative, Region::Positive] {
            assert!(parseval_check(&field, region).unwrap().relative_error < 1e-8);
        }
    }

    #[test]
    fn truncation_rule_stops_on_decaying_data() {
        let t = ModalField::solve_truncated(
            disk(-2.0, 1.0, 1.5),
            |i| (Complex64::new((-(i.order() as f64)).exp(), 0.0), 0.0.into()),
            200,
        )
        .unwrap();
        assert!(t.converged);
        assert!(t.field.max_order() < 60);
    }

    #[test]
    fn ball_round_trip() {
        let setting = FieldSetting::DiskBall(DiskBallConfig::new(Dimension::Three, 1.0, -3.0, 1.0, 1.2).unwrap());
        let data: Vec<DataTerm> = (0..=6u32)
            .flat_map(|l| {
                (-(l as i32)..=l as i32).map(move |m| DataTerm {
                    index: ModeIndex::Spherical { l, m },
                    f: Complex64::new(0.5f64.powi(l as i32), m as f64 * 0.1),
                    g: Complex64::new(0.0, 0.3f64.powi(l as i32)),
                })
            })
            .collect();
        let field = ModalField::solve(setting, &data).unwrap();
        let res = transmission_residual(&field, &data, 12).unwrap();
        assert!(res.jump < 1e-12 && res.flux < 1e-12, "{res:?}");
        assert!(parseval_check(&field, Region::Positive).unwrap().relative_error < 1e-12);
        let centre = field.evaluate(Point::Spherical { r: 0.0, theta: 0.0, phi: 0.0 }).unwrap();
        assert!(centre.value.is_finite());
    }

    #[test]
    fn half_line_and_slab_round_trip() {
        let basis = TransverseBasis::dirichlet(1.0).unwrap();
        let data: Vec<DataTerm> = (1..=20usize)
            .map(|n| DataTerm {
                index: ModeIndex::Transverse { n },
                f: Complex64::new(1.0 / (n * n) as f64, 0.0),
                g: Complex64::new(0.0, 1.0 / (n * n * n) as f64),
            })
            .collect();
        for geometry in [Geometry::HalfLine, Geometry::Slab { length: 0.5 }] {
            let cfg = WaveguideConfig::new(basis.clone(), -3.0, 1.0, 2.0, geometry).unwrap();
            let field = ModalField::solve(FieldSetting::Waveguide(cfg), &data).unwrap();
            let res = transmission_residual(&field, &data, 97).unwrap();
            assert!(res.jump < 1e-12 && res.flux < 1e-11, "{geometry:?}: {res:?}");
            assert!(parseval_check(&field, Region::Negative).unwrap().relative_error < 1e-12);
        }
    }

    #[test]
    fn layout_must_match_geometry() {
        let terms = vec![ModalTerm {
            index: ModeIndex::Spherical { l: 1, m: 0 },
            coefficients: Coefficients::TwoSided {
                negative: 1.0.into(),
                positive: 1.0.into(),
            },
        }];
        assert!(ModalField::new(disk(-2.0, 1.0, 1.5), terms).is_err());
        assert!(matches!(ModalField::new(disk(-2.0, 1.0, 1.5), vec![]), Err(Error::InvalidTruncation(0))));
    }
}
