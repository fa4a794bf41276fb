use std::f64::consts::PI;

use num_complex::Complex64;
use signflip::regime::{CaseLabel, Medium};
use signflip::report::{KernelDescription, RegularityLoss};
use signflip::waveguide::{
    beta, det_slab, det_slab_expanded, det_unbounded, kernel_scan_unbounded, plasmon_function, plasmon_scan,
    regularity_report, slab_det_asymptotic, slab_inverse_prediction, slab_system, solve_slab, solve_unbounded,
    source_distance_check, trapped_mode_function, trapped_mode_scan, unbounded_det_asymptotic, unbounded_system,
    weighted_membership, Geometry, KernelKind, Side, SourceVerdict, TransverseBasis, WaveguideConfig,
};
use signflip::regularity::Verdict;
use signflip::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn dirichlet() -> TransverseBasis {
    TransverseBasis::dirichlet(1.0).unwrap()
}

fn half_line(kappa: f64, kp: f64, km: f64) -> WaveguideConfig {
    WaveguideConfig::new(dirichlet(), kappa, kp, km, Geometry::HalfLine).unwrap()
}

fn slab(kappa: f64, kp: f64, km: f64) -> WaveguideConfig {
    WaveguideConfig::new(dirichlet(), kappa, kp, km, Geometry::Slab { length: 1.0 }).unwrap()
}

fn regimes() -> [(CaseLabel, f64, f64, f64); 3] {
    [
        (CaseLabel::Standard, -3.0, 1.0, 2.0),
        (CaseLabel::Critical, -1.0, 1.0, 3.0),
        (CaseLabel::SuperCritical, -1.0, 2.0, 2.0),
    ]
}

/// `-2 beta- cos(beta- L) + 2 i kappa beta+ sin(beta- L)` in plain complex
/// arithmetic, with the size of the two terms it adds. Only as accurate as
/// that size allows, so it is used while `e^{L sqrt(lambda)}` is moderate.
fn slab_determinant_oracle(kappa: f64, kp: f64, km: f64, length: f64, lambda: f64) -> (Complex64, f64) {
    let bp = beta(lambda, kp, Side::Plus).unwrap();
    let bm = beta(lambda, km, Side::Minus).unwrap();
    let first = -2.0 * bm * (bm * length).cos();
    let second = 2.0 * Complex64::i() * kappa * bp * (bm * length).sin();
    (first + second, first.norm() + second.norm())
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn branches_keep_their_sign_contract() {
    for lambda in [0.5, 3.9, 4.1, 10.0, 1e6] {
        let p = beta(lambda, 2.0, Side::Plus).unwrap();
        let m = beta(lambda, 2.0, Side::Minus).unwrap();
        assert!(p.im >= 0.0 && m.im <= 0.0);
        assert_eq!(p.im == 0.0, lambda < 4.0);
    }
}

#[test]
fn half_line_determinant_values() {
    let d = det_unbounded(&half_line(-3.0, 1.0, 2.0), 1).unwrap();
    let pi2 = PI * PI;
    let expected = Complex64::new(0.0, 3.0 * (pi2 - 1.0).sqrt() - (pi2 - 4.0).sqrt());
    assert!((d - expected).norm() < 1e-14);
    assert!((d.im - 6.5118).abs() < 1e-4);
    let supercritical = half_line(-1.0, 2.0, 2.0);
    for n in 1..=200 {
        assert_eq!(det_unbounded(&supercritical, n).unwrap(), ZERO);
    }
}

#[test]
fn mixed_propagation_never_cancels() {
    // Exactly one of beta+, beta- is real for lambda between k+^2 and k-^2.
    for kappa in [-0.2, -1.0, -4.0] {
        for lambda in [1.5, 3.0, 5.0, 8.5] {
            for (kp, km) in [(1.0, 3.0), (3.0, 1.0)] {
                let basis = TransverseBasis::user_list(vec![lambda]).unwrap();
                let config = WaveguideConfig::new(basis, kappa, kp, km, Geometry::HalfLine).unwrap();
                assert!(det_unbounded(&config, 0).unwrap().norm() > 0.1);
            }
        }
    }
}

#[test]
fn half_line_kernel_candidates() {
    let report = kernel_scan_unbounded(&half_line(-3.0, 1.0, 2.0), 200).unwrap();
    let candidate = report.candidate.unwrap();
    assert!((candidate.lambda_star - 0.625).abs() < 1e-15);
    assert!(!candidate.admissible && report.kernel.is_empty());

    let report = kernel_scan_unbounded(&half_line(-2.0, 3.0, 1.0), 200).unwrap();
    let candidate = report.candidate.unwrap();
    assert!((candidate.lambda_star - 35.0 / 3.0).abs() < 1e-13);
    assert!(candidate.admissible && !candidate.matched);
    assert_eq!(candidate.nearest_mode, 1);
    assert!((candidate.gap - (PI * PI - 35.0 / 3.0)).abs() < 1e-13);
    assert!(report.kernel.is_empty());
}

#[test]
fn engineered_half_line_kernel_is_found() {
    let basis = TransverseBasis::user_list(vec![2.0, 35.0 / 3.0, 40.0]).unwrap();
    let config = WaveguideConfig::new(basis, -2.0, 3.0, 1.0, Geometry::HalfLine).unwrap();
    let report = kernel_scan_unbounded(&config, 10).unwrap();
    // User lists are indexed from 0.
    assert_eq!(report.kernel, vec![1]);
    let mode = &report.modes[0];
    assert_eq!(mode.kind, KernelKind::SurfacePlasmon);
    assert!(mode.transmission_residual().unwrap() < 1e-9);
    assert!(mode.is_localized());
}

#[test]
fn super_critical_half_line_kernel_is_every_mode() {
    let config = half_line(-1.0, 2.0, 2.0);
    let report = kernel_scan_unbounded(&config, 200).unwrap();
    assert!(report.infinite_dimensional);
    assert_eq!(report.kernel, (1..=200).collect::<Vec<_>>());
    for mode in &report.modes {
        assert!(mode.transmission_residual().unwrap() < 1e-9);
        assert!(mode.is_localized());
    }
    assert!(matches!(
        solve_unbounded(&config, 3, Complex64::new(1.0, 0.0), ZERO),
        Err(Error::SingularMode { mode: 3, .. })
    ));
}

#[test]
fn half_line_solutions_reproduce_data() {
    let config = half_line(-3.0, 1.0, 2.0);
    assert_eq!(solve_unbounded(&config, 4, ZERO, ZERO).unwrap(), (ZERO, ZERO));
    for n in 1..=50 {
        let (f, g) = (Complex64::new(n as f64 * 0.1, -1.0), Complex64::new(0.5, n as f64));
        let (up, um) = solve_unbounded(&config, n, f, g).unwrap();
        let system = unbounded_system(&config, n, f, g).unwrap();
        assert!(system.residual(&[up, um]) < 1e-10);
    }
}

#[test]
fn critical_half_line_grows_like_lambda() {
    let config = half_line(-1.0, 1.0, 3.0);
    let n = 400;
    let lambda = (n as f64 * PI).powi(2);
    let (up, um) = solve_unbounded(&config, n, Complex64::new(1.0, 0.0), ZERO).unwrap();
    // 2 / (k+^2 - k-^2) = -1/4, times (-1, kappa) in the first column.
    assert!((up / lambda - 0.25).norm() < 1e-3);
    assert!((um / lambda - 0.25).norm() < 1e-3);
    let d = det_unbounded(&config, n).unwrap();
    let predicted = unbounded_det_asymptotic(&config, lambda).unwrap();
    assert!((d / predicted - 1.0).norm() < 1e-3);
}

#[test]
fn slab_determinant_matches_trigonometric_form() {
    for (_, kappa, kp, km) in regimes() {
        let config = slab(kappa, kp, km);
        for n in 1..=8 {
            let lambda = (n as f64 * PI).powi(2);
            let (oracle, size) = slab_determinant_oracle(kappa, kp, km, 1.0, lambda);
            let d = det_slab(&config, n).unwrap().to_complex();
            assert!((d - oracle).norm() <= 1e-13 * size, "n={n} {d} {oracle}");
        }
    }
}

#[test]
fn super_critical_slab_identity() {
    let config = slab(-1.0, 2.0, 2.0);
    let s = (PI * PI - 4.0).sqrt();
    let expected = Complex64::new(0.0, 2.0 * s) * (-s).exp();
    let identity = det_slab(&config, 1).unwrap().to_complex();
    let grouped = det_slab_expanded(&config, 1).unwrap().to_complex();
    assert!((identity - expected).norm() < 1e-12 * expected.norm());
    assert!((grouped - expected).norm() < 1e-12 * expected.norm());
    for n in 1..=50 {
        let a = det_slab(&config, n).unwrap();
        let b = det_slab_expanded(&config, n).unwrap();
        assert!((a.ratio(&b) - 1.0).norm() < 1e-10, "n={n}");
    }
}

#[test]
fn slab_determinant_asymptotics() {
    for (label, kappa, kp, km) in regimes() {
        let config = slab(kappa, kp, km);
        let n = 200;
        let lambda = (n as f64 * PI).powi(2);
        let ratio = det_slab(&config, n).unwrap().ratio(&slab_det_asymptotic(&config, lambda).unwrap());
        assert!((ratio - 1.0).norm() < 0.05, "{label:?} {ratio}");
        let system = slab_system(&config, n, ZERO, ZERO).unwrap();
        let inverse = system.inverse();
        let predicted = slab_inverse_prediction(&config, lambda).unwrap();
        for (row, prediction) in inverse.iter().zip(predicted.iter()) {
            for j in 0..2 {
                let r = row[j].ratio(&prediction[j]);
                assert!((r - 1.0).norm() < 0.05, "{label:?} column {j}: {r}");
            }
        }
    }
}

#[test]
fn slab_inverse_is_consistent() {
    for (_, kappa, kp, km) in regimes() {
        let config = slab(kappa, kp, km);
        for n in 1..=200 {
            let system = slab_system(&config, n, ZERO, ZERO).unwrap();
            assert!(system.inverse_defect() < 1e-9, "n={n}");
        }
    }
}

#[test]
fn slab_solutions_respect_the_wall() {
    for (_, kappa, kp, km) in regimes() {
        let config = slab(kappa, kp, km);
        assert!(solve_slab(&config, 2, ZERO, ZERO).unwrap().iter().all(|v| v.is_zero()));
        for n in [1, 5, 30, 120] {
            let (f, g) = (Complex64::new(0.7, -0.2), Complex64::new(-1.1, 0.4));
            let x = solve_slab(&config, n, f, g).unwrap();
            let system = slab_system(&config, n, f, g).unwrap();
            assert!(system.residual(&x) < 1e-9);
            let wall = x[1] * system.forward + x[2] * system.backward;
            let scale = (x[1] * system.forward).abs() + (x[2] * system.backward).abs();
            assert!(wall.ratio(&scale).norm() < 1e-9);
        }
    }
}

#[test]
fn super_critical_slab_amplifies_exponentially() {
    let config = slab(-1.0, 2.0, 2.0);
    let n = 40;
    let root = n as f64 * PI;
    let x = solve_slab(&config, n, Complex64::new(1.0, 0.0), ZERO).unwrap();
    // Leading term (1/2) e^{2 L sqrt(lambda)} kappa.
    let ratio = x[2].ln_abs() - (2.0 * root - 2f64.ln());
    assert!(ratio.abs() < 0.05, "{ratio}");
}

#[test]
fn trapped_mode_is_certified() {
    // kappa > 0 is scanned as well; the dispersion function changes sign in (k+^2, k-^2).
    let medium = Medium::unchecked_sign(0.5, 1.0, 6.0).unwrap();
    let f = |lambda| trapped_mode_function(&medium, 1.0, lambda);
    let (lo, hi) = (1.0 + 1e-9, 36.0 - 1e-9);
    let grid: Vec<f64> = (0..=400).map(|k| lo + (hi - lo) * k as f64 / 400.0).collect();
    let bracket = grid.windows(2).find(|w| f(w[0]) * f(w[1]) < 0.0).unwrap();
    let root = bisect(f, bracket[0], bracket[1]);
    let basis = TransverseBasis::user_list(vec![0.5, root, 50.0]).unwrap();
    let config =
        WaveguideConfig::with_any_contrast(basis, 0.5, 1.0, 6.0, Geometry::Slab { length: 1.0 }).unwrap();
    let modes = trapped_mode_scan(&config).unwrap();
    let mode = modes.iter().find(|m| m.mode == 1).expect("engineered root");
    assert_eq!(mode.kind, KernelKind::TrappedMode);
    assert!(mode.beta_plus.im > 0.0 && mode.beta_minus.im == 0.0);
    assert!(mode.transmission_residual().unwrap() < 1e-9);
    assert_eq!(mode.wall_value().unwrap(), ZERO);
    assert!(f(mode.lambda).abs() < 1e-10);
}

#[test]
fn no_trapped_modes_when_wavenumbers_agree() {
    assert!(trapped_mode_scan(&slab(-1.0, 2.0, 2.0)).unwrap().is_empty());
}

#[test]
fn plasmon_scan_guarantees() {
    assert!(plasmon_scan(&slab(-1.0, 2.0, 2.0), 1e5).unwrap().is_empty());
    let positive =
        WaveguideConfig::with_any_contrast(dirichlet(), 1.0, 1.0, 1.5, Geometry::Slab { length: 1.0 }).unwrap();
    assert!(plasmon_scan(&positive, 1e5).unwrap().is_empty());
}

#[test]
fn slab_plasmon_is_certified() {
    let medium = Medium::new(-2.0, 1.0, 1.0).unwrap();
    let f = |lambda| plasmon_function(&medium, 1.0, lambda);
    let root = bisect(f, 1.0 + 1e-6, 10.0);
    let basis = TransverseBasis::user_list(vec![root]).unwrap();
    let config = WaveguideConfig::new(basis, -2.0, 1.0, 1.0, Geometry::Slab { length: 1.0 }).unwrap();
    let modes = plasmon_scan(&config, 20.0).unwrap();
    assert_eq!(modes.len(), 1);
    let mode = &modes[0];
    assert_eq!(mode.kind, KernelKind::SurfacePlasmon);
    assert!(f(mode.lambda).abs() < 1e-10);
    assert!(mode.transmission_residual().unwrap() < 1e-9);
    assert!(mode.is_localized());
    assert!(mode.profile(-10.0).unwrap().norm() < mode.profile(0.0).unwrap().norm() * 1e-2);
}

#[test]
fn regularity_reports() {
    let report = regularity_report(&half_line(-1.0, 1.0, 3.0), 200).unwrap();
    assert_eq!(report.loss, RegularityLoss::Finite(2));
    let report = regularity_report(&half_line(-3.0, 1.0, 2.0), 200).unwrap();
    assert_eq!(report.loss, RegularityLoss::Finite(0));
    assert_eq!(report.kernel, KernelDescription::Empty);
    let report = regularity_report(&half_line(-1.0, 2.0, 2.0), 50).unwrap();
    assert_eq!(report.loss, RegularityLoss::IllPosed);
    assert!(matches!(report.kernel, KernelDescription::InfiniteDimensional { .. }));
    let report = regularity_report(&slab(-1.0, 2.0, 2.0), 200).unwrap();
    assert_eq!(report.loss, RegularityLoss::Infinite);
    assert!(report.notice.unwrap().contains("weighted"));
    assert_eq!(regularity_report(&slab(-3.0, 1.0, 2.0), 200).unwrap().order(), Some(0));
}

#[test]
fn weighted_membership_verdicts() {
    let basis = dirichlet();
    let coeffs = |decay: f64| -> Vec<Complex64> {
        (1..=60)
            .map(|n| Complex64::new((-decay * n as f64 * PI).exp(), 0.0))
            .collect()
    };
    let d = weighted_membership(&coeffs(3.0), &basis, 2.0, 1.0, 60).unwrap();
    assert_eq!(d.verdict, Verdict::Convergent);
    let d = weighted_membership(&coeffs(1.0), &basis, 0.0, 1.0, 60).unwrap();
    assert_eq!(d.verdict, Verdict::Divergent);
}

#[test]
fn source_distance_threshold() {
    assert!(source_distance_check(1.0, 2.5, 0.0).unwrap().is_well_posed());
    assert!(source_distance_check(1.0, 2.0, 0.0).unwrap().is_well_posed());
    match source_distance_check(1.0, 1.5, 0.0).unwrap() {
        SourceVerdict::BlowUp { rate, .. } => assert_eq!(rate, 0.5),
        other => panic!("{other:?}"),
    }
    assert!(source_distance_check(1.0, 2.0 - 1e-15, 0.0).unwrap().is_well_posed() == false);
}
