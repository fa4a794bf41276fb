use std::f64::consts::TAU;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use signflip::disk_ball::{
    curvature_convergence, curvature_limit, determinant, inverse_entry_slopes, regularity_loss, DEFAULT_FIT_RANGE,
};
use signflip::field::{
    transmission_residual, DataTerm, FieldGeometry, FieldSetting, ModalField, ModeIndex, Point,
    TransmissionResidual,
};
use signflip::regime::CaseLabel;
use signflip::report::{KernelDescription, RegularityLoss, RegularityReport};
use signflip::special_functions::{
    bessel_j, bessel_y, derivative, hankel1, spherical, wronskian_residual, Cylinder, Order, Spherical,
};
use signflip::waveguide::{
    kernel_scan_unbounded, plasmon_scan, regularity_report, trapped_mode_scan, Geometry, KernelMode,
    DEFAULT_SCAN_LIMIT,
};
use signflip::ScaledValue;

use crate::config::{GeometryBlock, Grid, RunConfig};
use crate::error::CliError;
use crate::output::{complex, num, Csv, Writer};

pub struct Context {
    pub config: RunConfig,
    pub modes: Option<RangeInclusive<u32>>,
    pub forced: Option<CaseLabel>,
    pub writer: Writer,
}

impl Context {
    fn case(&self) -> Result<CaseLabel, CliError> {
        let medium = self.config.medium()?;
        self.config.case(self.forced, &medium)
    }

    fn modes_or(&self, default: RangeInclusive<u32>) -> RangeInclusive<u32> {
        self.modes.clone().unwrap_or(default)
    }

    fn scan_limit(&self) -> usize {
        self.modes.as_ref().map_or(DEFAULT_SCAN_LIMIT, |r| *r.end() as usize)
    }
}

#[derive(Serialize)]
struct SlopeSummary {
    case: CaseLabel,
    modes: (u32, u32),
    slopes: [[f64; 2]; 2],
    r_squared: [[f64; 2]; 2],
    predicted: [[i32; 2]; 2],
    max_deviation: f64,
    tolerance: f64,
    second_column_coincides: bool,
    pass: bool,
}

/// Fits the inverse-entry slopes; fails with exit code 1 when a slope is
/// further than the slope tolerance from its predicted order.
pub fn slopes(ctx: &Context) -> Result<(), CliError> {
    let case = ctx.case()?;
    let config = ctx.config.disk_ball(case)?;
    let report = inverse_entry_slopes(&config, ctx.modes_or(DEFAULT_FIT_RANGE))?;
    let mut csv = Csv::new(&[
        "m", "det_re", "det_im", "inv11_re", "inv11_im", "inv12_re", "inv12_im", "inv21_re", "inv21_im", "inv22_re",
        "inv22_im",
    ]);
    for (m, inv) in &report.series {
        let det = determinant(&config, *m as i64)?.value;
        let mut row = vec![m.to_string()];
        row.extend(complex(det));
        for entry in inv.iter().flatten() {
            row.extend(complex(*entry));
        }
        csv.row(row);
    }
    ctx.writer.csv("slopes", csv)?;
    let tolerance = ctx.config.tolerances.slope;
    let max_deviation = report.max_deviation();
    let summary = SlopeSummary {
        case,
        modes: report.modes,
        slopes: report.slopes,
        r_squared: report.r_squared,
        predicted: report.predicted,
        max_deviation,
        tolerance,
        second_column_coincides: report.second_column_coincides,
        pass: max_deviation <= tolerance,
    };
    ctx.writer.json("slopes", &summary)?;
    if summary.pass {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "fitted slopes deviate from the predicted orders by {max_deviation:.3} (tolerance {tolerance})"
        )))
    }
}

fn geometry_name(block: &GeometryBlock) -> &'static str {
    match block {
        GeometryBlock::Disk { .. } => "disk",
        GeometryBlock::Ball { .. } => "ball",
        GeometryBlock::Halfline { .. } => "halfline",
        GeometryBlock::Slab { .. } => "slab",
    }
}

/// Regularity report; a positive contrast is the classical problem.
pub fn classify(ctx: &Context) -> Result<(), CliError> {
    let medium = ctx.config.medium()?;
    let report = if medium.kappa > 0.0 {
        RegularityReport {
            geometry: geometry_name(&ctx.config.geometry).into(),
            case: CaseLabel::Standard,
            loss: RegularityLoss::Finite(0),
            kernel: KernelDescription::Empty,
            statement: "positive-positive: classical, p=0".into(),
            notice: Some(
                "the contrast is positive, so no sign change occurs and the classical transmission theory applies"
                    .into(),
            ),
        }
    } else {
        let case = ctx.case()?;
        if ctx.config.is_disk_ball() {
            regularity_loss(&ctx.config.disk_ball(case)?)
        } else {
            regularity_report(&ctx.config.waveguide(case, false)?, ctx.scan_limit())?
        }
    };
    ctx.writer.json("classify", &report)
}

#[derive(Serialize)]
struct KernelSummary<'a, T: Serialize> {
    geometry: &'static str,
    case: CaseLabel,
    scan_limit: usize,
    report: T,
    modes: &'a [KernelMode],
    worst_residual: f64,
}

/// Kernel modes of a waveguide, each checked in physical space.
pub fn kernel_scan(ctx: &Context) -> Result<(), CliError> {
    let case = ctx.case()?;
    let config = ctx.config.waveguide(case, true)?;
    let scan_limit = ctx.scan_limit();
    let (modes, report) = match config.geometry {
        Geometry::HalfLine => {
            let report = kernel_scan_unbounded(&config, scan_limit)?;
            let modes = report.modes.clone();
            (modes, serde_json::to_value(&report).map_err(|e| CliError::Io(e.to_string()))?)
        }
        Geometry::Slab { .. } => {
            let lambda_max = config
                .basis
                .modes(scan_limit)
                .last()
                .map_or(0.0, |(_, l)| l * (1.0 + 2.0 * config.tolerances.matching));
            let mut modes = trapped_mode_scan(&config)?;
            modes.extend(plasmon_scan(&config, lambda_max)?);
            modes.sort_by_key(|m| m.mode);
            (modes, serde_json::json!({ "lambda_max": lambda_max }))
        }
    };
    let residuals = modes
        .par_iter()
        .map(|m| m.transmission_residual())
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = Csv::new(&[
        "n", "lambda", "type", "beta_plus_re", "beta_plus_im", "beta_minus_re", "beta_minus_im", "residual",
    ]);
    for (m, r) in modes.iter().zip(&residuals) {
        let mut row = vec![m.mode.to_string(), num(m.lambda), m.kind.label().to_string()];
        row.extend(complex(m.beta_plus));
        row.extend(complex(m.beta_minus));
        row.push(num(*r));
        csv.row(row);
    }
    ctx.writer.csv("kernel_scan", csv)?;
    let worst_residual = residuals.iter().copied().fold(0.0, f64::max);
    ctx.writer.json(
        "kernel_scan",
        &KernelSummary {
            geometry: geometry_name(&ctx.config.geometry),
            case,
            scan_limit,
            report,
            modes: &modes,
            worst_residual,
        },
    )?;
    if worst_residual < 1e-9 {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "a kernel mode violates the transmission conditions by {worst_residual:.2e}"
        )))
    }
}

#[derive(Serialize)]
struct CurvatureSummary {
    xi: f64,
    limit: f64,
    deviations: Vec<(u32, f64)>,
    monotone: bool,
}

/// Planar determinant against its limit as the radius grows with
/// `n / R` fixed.
pub fn curvature(ctx: &Context) -> Result<(), CliError> {
    let block = ctx
        .config
        .curvature
        .as_ref()
        .ok_or_else(|| CliError::Config("missing 'curvature' block with 'xi' and 'n_list'".into()))?;
    let m = ctx.config.medium()?;
    let limit = curvature_limit(block.xi, m.kappa, m.k_plus, m.k_minus)?;
    let deviations = curvature_convergence(block.xi, m.kappa, m.k_plus, m.k_minus, &block.n_list)?;
    let mut csv = Csv::new(&["n", "deviation"]);
    for (n, d) in &deviations {
        csv.row([n.to_string(), num(*d)]);
    }
    ctx.writer.csv("curvature", csv)?;
    let monotone = deviations.windows(2).all(|w| w[1].1 < w[0].1);
    ctx.writer.json(
        "curvature",
        &CurvatureSummary {
            xi: block.xi,
            limit,
            deviations,
            monotone,
        },
    )?;
    if monotone {
        Ok(())
    } else {
        Err(CliError::Numerical("deviations from the limit do not decrease".into()))
    }
}

fn axis((lo, hi, count): (f64, f64, usize)) -> Result<Vec<f64>, CliError> {
    if count == 0 || !(lo.is_finite() && hi.is_finite()) {
        return Err(CliError::Config(format!("invalid grid axis [{lo}, {hi}, {count}]")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect())
}

/// Cartesian grid points with their native coordinates.
fn grid_points(grid: &Grid, geometry: FieldGeometry) -> Result<Vec<(Vec<f64>, Point)>, CliError> {
    let xs = axis(grid.x)?;
    let ys = axis(grid.y)?;
    let mut points = Vec::new();
    match geometry {
        FieldGeometry::Ball3d => {
            let zs = axis(grid.z.ok_or_else(|| CliError::Config("a ball grid needs a 'z' axis".into()))?)?;
            for &x in &xs {
                for &y in &ys {
                    for &z in &zs {
                        let r = (x * x + y * y + z * z).sqrt();
                        let theta = if r == 0.0 { 0.0 } else { (z / r).clamp(-1.0, 1.0).acos() };
                        let phi = y.atan2(x).rem_euclid(TAU);
                        points.push((vec![x, y, z], Point::Spherical { r, theta, phi }));
                    }
                }
            }
        }
        FieldGeometry::Disk2d => {
            for &x in &xs {
                for &y in &ys {
                    let r = x.hypot(y);
                    let theta = y.atan2(x).rem_euclid(TAU);
                    points.push((vec![x, y], Point::Polar { r, theta }));
                }
            }
        }
        FieldGeometry::HalfLine | FieldGeometry::Slab => {
            for &x in &xs {
                for &y in &ys {
                    points.push((vec![x, y], Point::Planar { x, y }));
                }
            }
        }
    }
    Ok(points)
}

fn data_index(geometry: FieldGeometry, e: &crate::config::DataEntry) -> Result<ModeIndex, CliError> {
    let missing = |what: &str| CliError::Config(format!("data entry needs '{what}' for a {geometry:?} field"));
    Ok(match geometry {
        FieldGeometry::Disk2d => ModeIndex::Fourier { n: e.n.ok_or_else(|| missing("n"))? },
        FieldGeometry::Ball3d => ModeIndex::Spherical {
            l: e.l.ok_or_else(|| missing("l"))?,
            m: e.m.ok_or_else(|| missing("m"))?,
        },
        FieldGeometry::HalfLine | FieldGeometry::Slab => {
            let n = e.n.ok_or_else(|| missing("n"))?;
            ModeIndex::Transverse {
                n: usize::try_from(n).map_err(|_| CliError::Config(format!("transverse mode {n} is negative")))?,
            }
        }
    })
}

#[derive(Serialize)]
struct FieldSummary {
    geometry: FieldGeometry,
    terms: usize,
    max_order: u64,
    converged: Option<bool>,
    residual: TransmissionResidual,
    points: usize,
    outside: usize,
    truncation_warnings: usize,
}

/// Solves for the modal coefficients and evaluates the field on a grid.
pub fn field(ctx: &Context) -> Result<(), CliError> {
    let block = ctx
        .config
        .field
        .as_ref()
        .ok_or_else(|| CliError::Config("missing 'field' block".into()))?;
    let case = ctx.case()?;
    let setting = if ctx.config.is_disk_ball() {
        FieldSetting::DiskBall(ctx.config.disk_ball(case)?)
    } else {
        FieldSetting::Waveguide(ctx.config.waveguide(case, false)?)
    };
    let geometry = setting.geometry();
    let (field, data, converged) = match (&block.data, block.decay) {
        (Some(entries), None) => {
            let data = entries
                .iter()
                .map(|e| {
                    Ok(DataTerm {
                        index: data_index(geometry, e)?,
                        f: Complex64::new(e.f[0], e.f[1]),
                        g: Complex64::new(e.g[0], e.g[1]),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            (ModalField::solve(setting, &data)?, data, None)
        }
        (None, Some(rate)) => {
            let max_order = *ctx.modes_or(0..=20).end() as u64;
            let f = move |index: ModeIndex| (Complex64::new((-rate * index.order() as f64).exp(), 0.0), Complex64::new(0.0, 0.0));
            let truncated = ModalField::solve_truncated(setting, f, max_order)?;
            let data = truncated
                .field
                .terms()
                .iter()
                .map(|t| {
                    let (f, g) = f(t.index);
                    DataTerm { index: t.index, f, g }
                })
                .collect();
            (truncated.field, data, Some(truncated.converged))
        }
        _ => {
            return Err(CliError::Config(
                "the 'field' block needs exactly one of 'data' and 'decay'".into(),
            ))
        }
    };
    let residual = transmission_residual(&field, &data, block.samples)?;
    let points = grid_points(&block.grid, geometry)?;
    let values: Vec<_> = points.par_iter().map(|(_, p)| field.evaluate(*p)).collect();
    let mut header = vec!["x", "y"];
    if geometry == FieldGeometry::Ball3d {
        header.push("z");
    }
    header.extend(["re", "im", "region"]);
    let mut csv = Csv::new(&header);
    let (mut outside, mut warnings) = (0, 0);
    for ((coords, _), value) in points.iter().zip(values) {
        let mut row: Vec<String> = coords.iter().map(|c| num(*c)).collect();
        match value {
            Ok(v) => {
                row.extend(complex(v.value));
                row.push(format!("{:?}", v.region).to_lowercase());
                warnings += v.truncation_warning as usize;
            }
            Err(signflip::Error::RegionMismatch(_)) => {
                row.extend([num(f64::NAN), num(f64::NAN), "outside".into()]);
                outside += 1;
            }
            Err(e) => return Err(e.into()),
        }
        csv.row(row);
    }
    ctx.writer.csv("field", csv)?;
    ctx.writer.json(
        "field",
        &FieldSummary {
            geometry,
            terms: field.truncation(),
            max_order: field.max_order(),
            converged,
            residual,
            points: points.len(),
            outside,
            truncation_warnings: warnings,
        },
    )
}

fn special_value(function: &str, nu: f64, r: f64) -> Result<ScaledValue, CliError> {
    let order = Order::new(nu)?;
    let spherical_degree = || -> Result<u32, CliError> {
        if order.is_integer() {
            Ok(nu as u32)
        } else {
            Err(CliError::Config(format!("spherical functions need an integer degree, got {nu}")))
        }
    };
    Ok(match function {
        "j" => bessel_j(order, r)?,
        "y" => bessel_y(order, r)?,
        "h" => hankel1(order, r)?,
        "dj" => derivative(order, r, Cylinder::J)?,
        "dy" => derivative(order, r, Cylinder::Y)?,
        "dh" => derivative(order, r, Cylinder::H)?,
        "sj" => spherical(spherical_degree()?, r, Spherical::J)?,
        "sy" => spherical(spherical_degree()?, r, Spherical::Y)?,
        "sh" => spherical(spherical_degree()?, r, Spherical::H)?,
        "dsj" => spherical(spherical_degree()?, r, Spherical::JPrime)?,
        "dsy" => spherical(spherical_degree()?, r, Spherical::YPrime)?,
        "dsh" => spherical(spherical_degree()?, r, Spherical::HPrime)?,
        other => {
            return Err(CliError::Config(format!(
                "unknown function '{other}' (expected j, y, h, dj, dy, dh, sj, sy, sh, dsj, dsy or dsh)"
            )))
        }
    })
}

#[derive(Serialize)]
struct SpecialSummary {
    function: String,
    points: usize,
    max_wronskian_residual: f64,
}

/// Tabulates a special function as `mantissa * e^exponent`.
pub fn special(ctx: &Context) -> Result<(), CliError> {
    let block = ctx
        .config
        .special
        .as_ref()
        .ok_or_else(|| CliError::Config("missing 'special' block".into()))?;
    let pairs: Vec<(f64, f64)> = block
        .orders
        .iter()
        .flat_map(|&nu| block.radii.iter().map(move |&r| (nu, r)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(nu, r)| {
            let v = special_value(&block.function, nu, r)?;
            let w = wronskian_residual(Order::new(nu)?, r)?;
            Ok((nu, r, v, w))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut csv = Csv::new(&["nu", "r", "mantissa_re", "mantissa_im", "exponent", "wronskian_residual"]);
    for (nu, r, v, w) in &rows {
        let mut row = vec![num(*nu), num(*r)];
        row.extend(complex(v.mantissa()));
        row.push(v.exponent().to_string());
        row.push(num(*w));
        csv.row(row);
    }
    ctx.writer.csv("special", csv)?;
    let max_wronskian_residual = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    ctx.writer.json(
        "special",
        &SpecialSummary {
            function: block.function.clone(),
            points: rows.len(),
            max_wronskian_residual,
        },
    )
}
