use num_complex::Complex64;
use signflip::disk_ball::{
    build_system, classify_case, curvature_convergence, curvature_limit, determinant, inverse_entry_slopes,
    predicted_matrix, regularity_loss, solve_mode, DiskBallConfig, Dimension,
};
use signflip::regime::CaseLabel;
use signflip::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn reference(dimension: Dimension) -> [(CaseLabel, DiskBallConfig); 3] {
    let make = |kappa, kp, km| DiskBallConfig::new(dimension, 1.0, kappa, kp, km).unwrap();
    [
        (CaseLabel::Standard, make(-3.0, 2.0, 2.0)),
        (CaseLabel::Critical, make(-1.0, 1.0, 3.0)),
        (CaseLabel::SuperCritical, make(-1.0, 2.0, 2.0)),
    ]
}

fn all_reference() -> Vec<(CaseLabel, DiskBallConfig)> {
    reference(Dimension::Two).into_iter().chain(reference(Dimension::Three)).collect()
}

#[test]
fn reference_media_are_classified() {
    for (label, config) in all_reference() {
        assert_eq!(classify_case(&config), label);
    }
}

#[test]
fn ball_degree_zero_matches_closed_form() {
    // j0 = sin r / r, so j0'/j0 = cot r - 1/r.
    let config = DiskBallConfig::new(Dimension::Three, 1.0, -2.0, 1.5, 1.0).unwrap();
    let system = build_system(&config, 0, ZERO, ZERO).unwrap();
    let expected = 1f64.cos() / 1f64.sin() - 1.0;
    assert!((system.matrix[1][0] - expected).norm() < 1e-13);
    assert_eq!(system.matrix[0], [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
}

#[test]
fn disk_mode_100_stays_finite() {
    let (_, config) = reference(Dimension::Two)[2];
    let system = build_system(&config, 100, ZERO, ZERO).unwrap();
    assert!(system.matrix.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite()));
    assert!(system.inverse().iter().flatten().all(|v| v.norm().is_finite()));
}

#[test]
fn determinant_limits() {
    let [(_, standard), _, (_, supercritical)] = reference(Dimension::Two);
    let d = determinant(&standard, 400).unwrap().value;
    assert!((d / 400.0 - (-2.0)).norm() < 1e-3);
    let d = determinant(&supercritical, 200).unwrap().value;
    assert!((d * 200.0 * 200.0 / 4.0 - 1.0).norm() < 0.05);
    for (_, ball) in &reference(Dimension::Three)[1..] {
        let d = determinant(ball, 200).unwrap().value;
        assert!((d + 1.0).norm() < 0.02, "{d}");
    }
}

#[test]
fn determinants_never_vanish_up_to_300() {
    for (_, config) in all_reference() {
        for m in 0..=300 {
            assert!(determinant(&config, m).unwrap().margin > 1e-14);
        }
    }
}

#[test]
fn negative_and_positive_disk_modes_agree() {
    for (_, config) in reference(Dimension::Two) {
        for n in 1..=60 {
            assert_eq!(determinant(&config, -n).unwrap(), determinant(&config, n).unwrap());
        }
    }
}

#[test]
fn solutions_reproduce_their_data() {
    let data = [Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.7)];
    for (_, config) in all_reference() {
        for m in [0, 1, 7, 50, 300] {
            let (um, up) = solve_mode(&config, m, data[0], data[1]).unwrap();
            let system = build_system(&config, m, data[0], data[1]).unwrap();
            assert!(system.residual(&[um, up]) < 1e-10);
        }
        assert_eq!(solve_mode(&config, 5, ZERO, ZERO).unwrap(), (ZERO, ZERO));
    }
}

#[test]
fn inverse_is_consistent_up_to_300() {
    for (_, config) in all_reference() {
        for m in 0..=300 {
            let system = build_system(&config, m, ZERO, ZERO).unwrap();
            let (a, inv) = (system.matrix, system.inverse());
            for i in 0..2 {
                for j in 0..2 {
                    let product = a[i][0] * inv[0][j] + a[i][1] * inv[1][j];
                    let scale = a[i][0].norm() * inv[0][j].norm() + a[i][1].norm() * inv[1][j].norm();
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((product - target).norm() <= 1e-10 * scale.max(1.0), "m={m} ({i},{j})");
                }
            }
        }
    }
}

#[test]
fn super_critical_disk_grows_like_cube() {
    let (_, config) = reference(Dimension::Two)[2];
    let (um, _) = solve_mode(&config, 50, Complex64::new(1.0, 0.0), ZERO).unwrap();
    // Leading term: (1 / (R^2 k+^2)) * kappa * n^3.
    let ratio = um.norm() / (50f64.powi(3) / 4.0);
    assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
}

#[test]
fn predicted_entries() {
    let [(_, standard), _, (_, supercritical)] = reference(Dimension::Two);
    assert_eq!(predicted_matrix(&standard, 17)[0][0], 1.5);
    assert_eq!(predicted_matrix(&supercritical, 6)[0][1], 9.0);
    let ball = reference(Dimension::Three)[1].1;
    assert_eq!(predicted_matrix(&ball, 10)[1][0], 10.0);
}

#[test]
fn exact_inverse_follows_prediction_at_200() {
    for (label, config) in all_reference() {
        let inv = build_system(&config, 200, ZERO, ZERO).unwrap().inverse();
        let predicted = predicted_matrix(&config, 200);
        for i in 0..2 {
            for j in 0..2 {
                let ratio = inv[i][j] / predicted[i][j];
                assert!((ratio - 1.0).norm() < 0.05, "{label:?} {:?} ({i},{j}) {ratio}", config.dimension);
            }
        }
    }
}

#[test]
fn disk_slopes_reproduce_orders() {
    for ((_, config), expected) in reference(Dimension::Two).into_iter().zip([0.0, 2.0, 3.0]) {
        let report = inverse_entry_slopes(&config, 20..=100).unwrap();
        assert!(report.second_column_coincides);
        for row in report.slopes {
            assert!((row[0] - expected).abs() < 0.05, "{row:?}");
            assert!((row[1] - (expected - 1.0)).abs() < 0.05, "{row:?}");
        }
        let p = regularity_loss(&config).order().unwrap() as f64;
        assert_eq!(report.slopes[0][0].round(), p);
    }
}

#[test]
fn ball_slopes_round_to_orders() {
    for (_, config) in reference(Dimension::Three) {
        let report = inverse_entry_slopes(&config, 20..=100).unwrap();
        let p = regularity_loss(&config).order().unwrap() as f64;
        for row in report.slopes {
            assert_eq!(row[0].round(), p);
            assert_eq!(row[1].round(), p - 1.0);
        }
    }
}

#[test]
fn short_or_early_ranges_are_refused() {
    let (_, config) = reference(Dimension::Two)[0];
    assert!(matches!(inverse_entry_slopes(&config, 20..=25), Err(Error::FitUnstable(_))));
    assert!(matches!(inverse_entry_slopes(&config, 1..=50), Err(Error::FitUnstable(_))));
}

#[test]
fn orders_lost_table() {
    let expected = [(Dimension::Two, [0, 2, 3]), (Dimension::Three, [0, 1, 1])];
    for (dimension, orders) in expected {
        for ((_, config), p) in reference(dimension).into_iter().zip(orders) {
            let report = regularity_loss(&config);
            assert_eq!(report.order(), Some(p));
            assert!(report.statement.contains("H^s"));
        }
    }
}

#[test]
fn curvature_limit_values() {
    assert!((curvature_limit(5.0, -1.0, 3.0, 2.0).unwrap() - (21f64.sqrt() - 4.0)).abs() < 1e-15);
    assert!((curvature_limit(2.0, -2.0, 1.0, 1.0).unwrap() + 3f64.sqrt()).abs() < 1e-15);
    for xi in [2.5, 4.0, 10.0] {
        assert_eq!(curvature_limit(xi, -1.0, 2.0, 2.0).unwrap(), 0.0);
    }
    assert!(matches!(curvature_limit(3.0, -1.0, 3.0, 2.0), Err(Error::Domain(_))));
}

#[test]
fn curvature_deviation_decreases() {
    let n_list = [40, 80, 160, 320];
    for (kappa, kp, km) in [(-1.0, 3.0, 2.0), (-1.0, 2.0, 2.0), (-3.0, 2.0, 2.0)] {
        let seq = curvature_convergence(5.0, kappa, kp, km, &n_list).unwrap();
        assert!(seq.windows(2).all(|w| w[1].1 < w[0].1), "{seq:?}");
        assert!(seq[3].1 < 0.01);
    }
    assert!(curvature_convergence(5.0, -1.0, 2.0, 2.0, &[80, 40]).is_err());
}
