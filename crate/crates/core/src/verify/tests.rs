extern crate std;

use std::println;

use super::*;

fn report(n: usize, c: f64, a: f64, count: usize) -> VerificationReport {
    let mut cfg = VerifyConfig::new(n, c, a);
    cfg.sample.count = count;
    run(&cfg).unwrap()
}

fn dump(r: &VerificationReport) {
    for ch in &r.checks {
        println!(
            "{:<14} {:<38} {:>11.3e} {:?} {:.0e} n={} {} {:?}",
            ch.suite.name(),
            ch.name,
            ch.max_residual,
            ch.comparison,
            ch.tolerance,
            ch.samples,
            if ch.passed { "ok" } else { "FAIL" },
            ch.notes
        );
    }
}

#[test]
fn canonical_hyperbolic_report_passes() {
    let r = report(3, -1.0, 1.0, 30);
    dump(&r);
    assert!(r.all_passed());
}

#[test]
fn sphere_report_passes() {
    let r = report(2, 1.0, 1.0, 30);
    dump(&r);
    assert!(r.all_passed());
    assert!(r.summary.t_range_clipped);
}

#[test]
fn flat_report_passes() {
    let r = report(2, 0.0, 1.0, 20);
    dump(&r);
    assert!(r.all_passed());
}

#[test]
fn five_dimensional_positive_curvature_passes() {
    let r = report(5, 2.0, 1.5, 100);
    dump(&r);
    assert!(r.all_passed());
}

#[test]
fn canonical_full_sample_passes() {
    let r = report(3, -1.0, 1.0, 100);
    assert!(r.all_passed());
    assert_eq!(r.summary.failed, 0);
}

#[test]
fn sampling_is_deterministic_and_scaled() {
    let base = SpaceForm::new(3, -1.0).unwrap();
    let spec = SampleSpec::default();
    let a = sample_phase_points(&base, None, &spec).unwrap();
    let b = sample_phase_points(&base, None, &spec).unwrap();
    assert_eq!(a, b);
    for (pt, t) in a.points.iter().zip(&a.t) {
        let e = crate::bundle::energy_density(&base, pt).unwrap();
        assert!((e - t).abs() < 1e-12 * t.max(1.0));
    }
    let other = sample_phase_points(&base, None, &SampleSpec { seed: 7, ..spec }).unwrap();
    assert_ne!(a.points, other.points);
}

#[test]
fn sphere_samples_stay_inside_the_tube() {
    let base = SpaceForm::new(3, 1.0).unwrap();
    let params = EinsteinParams::new(2.0, 1.0, 3).unwrap();
    let spec = SampleSpec { t_range: (0.0, 5.0), ..SampleSpec::default() };
    let s = sample_phase_points(&base, Some(params.t_max()), &spec).unwrap();
    assert!(s.clipped);
    assert!(s.t.iter().all(|&t| t < 2.0 - spec.guard));
}

#[test]
fn empty_t_range_is_rejected() {
    let base = SpaceForm::new(2, 1.0).unwrap();
    let spec = SampleSpec { t_range: (3.0, 5.0), ..SampleSpec::default() };
    assert!(matches!(sample_phase_points(&base, Some(2.0), &spec), Err(Error::EmptySample)));
}

#[test]
fn model_tensor_degenerate_cases() {
    let n = 2;
    let base = SpaceForm::new(n, -1.0).unwrap();
    let params = EinsteinParams::new(1.0, -1.0, n).unwrap();
    let pt = PhasePoint::new(alloc::vec![0.1, -0.2], alloc::vec![0.3, 0.4]).unwrap();
    let b = crate::bundle::lift_blocks(&base, &LiftProfile::einstein(&params), &pt).unwrap();
    let (g, j) = (b.adapted_metric(), b.j_adapted());
    let x = Vector::from_vec(alloc::vec![0.5, -1.0, 0.25, 2.0]);
    let y = Vector::from_vec(alloc::vec![1.0, 0.0, -0.5, 0.3]);
    assert!(holomorphic_model(-2.0, &g, &j, &x, &x, &x).abs().max() < 1e-14);
    assert_eq!(holomorphic_model(0.0, &g, &j, &x, &y, &x).abs().max(), 0.0);
}

#[test]
fn non_einstein_profile_fails_the_condition() {
    let base = SpaceForm::new(3, -1.0).unwrap();
    let params = EinsteinParams::new(1.0, -1.0, 3).unwrap();
    let prof = LiftProfile::integrable(crate::profile::UProfile::Linear { a0: 2.0, a1: 1.0 }, -1.0);
    let s = sample_phase_points(&base, None, &SampleSpec { count: 10, ..SampleSpec::default() }).unwrap();
    let worst = s
        .points
        .iter()
        .map(|pt| einstein_residual(&base, &prof, params.lambda(), pt).unwrap())
        .fold(0.0, f64::max);
    assert!(worst > 1e-2, "{worst}");
}

#[test]
fn config_validation() {
    assert!(VerifyConfig::new(3, -1.0, 1.0).validate().is_ok());
    assert!(VerifyConfig::new(1, -1.0, 1.0).validate().is_err());
    assert!(VerifyConfig::new(3, -1.0, 0.0).validate().is_err());
    let mut cfg = VerifyConfig::new(3, -1.0, 1.0);
    cfg.tolerances.einstein = 0.0;
    assert!(cfg.validate().is_err());
    cfg = VerifyConfig::new(3, -1.0, 1.0);
    cfg.sample.count = 0;
    assert!(run(&cfg).is_err());
}

#[test]
fn suite_names_round_trip() {
    for s in Suite::ALL {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
    }
    assert!("everything".parse::<Suite>().is_err());
}

#[test]
fn each_check_appears_once_and_verdicts_follow_tolerances() {
    let r = report(2, -1.0, 1.0, 10);
    let mut names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    let before = names.len();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), before);
    for c in &r.checks {
        let expect = match c.comparison {
            Comparison::Below => c.max_residual < c.tolerance,
            Comparison::Above => c.max_residual > c.tolerance,
        };
        assert_eq!(c.passed, expect, "{}", c.name);
    }
}

#[test]
fn scaling_law_on_parameters() {
    let p = EinsteinParams::new(1.0, -1.0, 3).unwrap();
    let q = EinsteinParams::new(2.0, -1.0, 3).unwrap();
    assert_eq!(p.lambda(), -4.0);
    assert_eq!(p.holomorphic_curvature(), -2.0);
    assert_eq!(q.lambda(), p.lambda() / 2.0);
    assert_eq!(q.holomorphic_curvature(), p.holomorphic_curvature() / 2.0);
}

#[test]
fn sphere_values_of_lambda_and_k() {
    let mut cfg = VerifyConfig::new(3, 1.0, 2.0);
    cfg.suites = alloc::vec![Suite::Einstein, Suite::Holomorphic];
    cfg.sample.count = 20;
    let r = run(&cfg).unwrap();
    assert!(r.all_passed());
    assert_eq!(r.summary.lambda, 2.0);
    assert_eq!(r.summary.holomorphic_curvature, 1.0);
    assert!(r.check("tube_respected").unwrap().passed);
}
