use super::*;
use crate::profile::{EinsteinParams, UProfile, VRule};
use alloc::vec;
use alloc::vec::Vec;

fn sasaki(c: f64) -> LiftProfile {
    LiftProfile::new(UProfile::Constant { a: 1.0 }, VRule::Constant(0.0), c)
}

fn einstein(a: f64, c: f64, n: usize) -> LiftProfile {
    LiftProfile::einstein(&EinsteinParams::new(a, c, n).unwrap())
}

fn generic_profiles() -> Vec<LiftProfile> {
    vec![
        einstein(1.0, -1.0, 3),
        LiftProfile::integrable(UProfile::Linear { a0: 2.0, a1: 1.0 }, -1.0),
        LiftProfile::new(UProfile::Linear { a0: 1.0, a1: 0.5 }, VRule::Constant(0.1), -1.0),
    ]
}

fn point(n: usize, seed: f64) -> PhasePoint {
    PhasePoint::new(
        (0..n).map(|i| 0.35 * libm::sin(seed + 1.7 * i as f64)).collect(),
        (0..n).map(|i| 0.5 * libm::cos(2.0 * seed + 0.9 * i as f64)).collect(),
    )
    .unwrap()
}

#[test]
fn degenerate_configurations() {
    let flat = SpaceForm::new(3, 0.0).unwrap();
    let c = conn_coeffs_generic(&flat, &sasaki(0.0), &point(3, 0.4)).unwrap();
    assert_eq!(c.max_abs(), 0.0);
    let sf = SpaceForm::new(3, -1.0).unwrap();
    let zero_p = PhasePoint::new(vec![0.2, -0.1, 0.3], vec![0.0; 3]).unwrap();
    let c = conn_coeffs_generic(&sf, &einstein(1.0, -1.0, 3), &zero_p).unwrap();
    assert_eq!(c.s.max_abs(), 0.0);
    assert_eq!(c.q.max_abs(), 0.0);
    let k = curvature_blocks(&flat, &sasaki(0.0), &point(3, 0.4)).unwrap();
    assert_eq!(k.full().max_abs(), 0.0);
    let r = ricci_blocks(&flat, &sasaki(0.0), &point(3, 0.4)).unwrap();
    assert_eq!(r.qq.abs().max() + r.pp.abs().max(), 0.0);
}

#[test]
fn koszul_oracle_self_test_on_base() {
    let sf = SpaceForm::new(3, -1.0).unwrap();
    let x = [0.3, -0.2, 0.5];
    let metric = |y: &[f64]| -> Result<Matrix> { Ok(sf.metric_at(y)?.0) };
    let fd = christoffel_fd(&metric, &x, 1e-5).unwrap();
    assert!(fd.max_abs_diff(&sf.christoffel_at(&x).unwrap()) < 1e-5);
}

#[test]
fn koszul_oracle_flat_sasaki_at_origin() {
    let flat = SpaceForm::new(2, 0.0).unwrap();
    let pt = PhasePoint::new(vec![0.0; 2], vec![0.3, -0.4]).unwrap();
    assert!(koszul_oracle(&flat, &sasaki(0.0), &pt, 1e-5).unwrap().max_abs() < 1e-9);
}

#[test]
fn generic_coefficients_match_koszul_oracle() {
    for n in [2, 3] {
        let sf = SpaceForm::new(n, -1.0).unwrap();
        for prof in generic_profiles() {
            for s in 0..3 {
                let pt = point(n, s as f64);
                let table = koszul_oracle(&sf, &prof, &pt, 1e-5).unwrap();
                let analytic = adapted_connection_at(&sf, &prof, &pt).unwrap();
                assert!(table.max_abs_diff(&analytic) < 1e-4, "{}", table.max_abs_diff(&analytic));
                let c = conn_coeffs_generic(&sf, &prof, &pt).unwrap();
                assert!(coeffs_from_table(&table).max_abs_diff(&c) < 1e-4);
            }
        }
    }
}

#[test]
fn expanded_forms_match_generic() {
    let sf = SpaceForm::new(3, -1.0).unwrap();
    let pt = PhasePoint::new(vec![0.0; 3], vec![libm::sqrt(8.0), 0.0, 0.0]).unwrap();
    let prof = einstein(1.0, -1.0, 3);
    let d = conn_coeffs_expanded(&sf, &prof, &pt).unwrap().max_abs_diff(&conn_coeffs_generic(&sf, &prof, &pt).unwrap());
    assert!(d < 1e-9, "{d}");

    let sf = SpaceForm::new(3, 1.0).unwrap();
    let q = vec![0.2, -0.3, 0.1];
    let (g, _) = sf.metric_at(&q).unwrap();
    // scale p so that t = 3/2
    let dir = [0.6, 0.3, -0.2];
    let norm2: f64 = dir.iter().enumerate().map(|(i, x)| x * x / g[(i, i)]).sum();
    let p: Vec<f64> = dir.iter().map(|x| x * libm::sqrt(3.0 / norm2)).collect();
    let pt = PhasePoint::new(q, p).unwrap();
    let prof = einstein(2.0, 1.0, 3);
    let d = conn_coeffs_expanded(&sf, &prof, &pt).unwrap().max_abs_diff(&conn_coeffs_generic(&sf, &prof, &pt).unwrap());
    assert!(d < 1e-9, "{d}");

    for prof in generic_profiles() {
        let sf = SpaceForm::new(3, -1.0).unwrap();
        let pt = point(3, 1.3);
        let d = conn_coeffs_expanded(&sf, &prof, &pt).unwrap().max_abs_diff(&conn_coeffs_generic(&sf, &prof, &pt).unwrap());
        assert!(d < 1e-9, "{d}");
    }

    let flat = SpaceForm::new(3, 0.0).unwrap();
    assert_eq!(conn_coeffs_expanded(&flat, &sasaki(0.0), &point(3, 0.2)), Err(Error::UseGeneric));
}

#[test]
fn coefficient_derivatives_match_differences() {
    let sf = SpaceForm::new(3, 1.0).unwrap();
    let prof = generic_profiles()[2];
    let pt = point(3, 0.8);
    let (_, d) = conn_coeffs_with_derivatives(&sf, &prof, &pt).unwrap();
    let h = 1e-6;
    for m in 0..3 {
        let mut pp = pt.clone();
        let mut pm = pt.clone();
        pp.p[m] += h;
        pm.p[m] -= h;
        let cp = conn_coeffs_generic(&sf, &prof, &pp).unwrap();
        let cm = conn_coeffs_generic(&sf, &prof, &pm).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    assert!((d.dq[(m, a, b, c)] - (cp.q[(a, b, c)] - cm.q[(a, b, c)]) / (2.0 * h)).abs() < 1e-7);
                    assert!((d.dp[(m, a, b, c)] - (cp.p[(a, b, c)] - cm.p[(a, b, c)]) / (2.0 * h)).abs() < 1e-7);
                    assert!((d.ds[(m, a, b, c)] - (cp.s[(a, b, c)] - cm.s[(a, b, c)]) / (2.0 * h)).abs() < 1e-7);
                }
            }
        }
    }
}

#[test]
fn structural_residuals() {
    let sf = SpaceForm::new(3, -1.0).unwrap();
    for (k, prof) in generic_profiles().into_iter().enumerate() {
        let pt = point(3, 0.5 + k as f64);
        assert!(metric_compatibility_residual(&sf, &prof, &pt, 1e-5).unwrap() < 1e-4);
        assert!(torsion_residual(&sf, &prof, &pt, 1e-5).unwrap() < 1e-4);
        if prof.is_integrable() {
            assert!(nabla_j_residual(&sf, &prof, &pt, 1e-5).unwrap() < 1e-4);
            assert!(nabla_j_oracle_residual(&sf, &prof, &pt, 1e-5).unwrap() < 1e-4);
        } else {
            assert!(nabla_j_residual(&sf, &prof, &pt, 1e-5).unwrap() > 1e-3);
        }
    }
}

#[test]
fn curvature_blocks_match_nested_oracle() {
    let sf = SpaceForm::new(2, -1.0).unwrap();
    let prof = generic_profiles()[2];
    let pt = point(2, 0.3);
    let k = curvature_blocks(&sf, &prof, &pt).unwrap();
    assert!(k.antisymmetry_defect() < 1e-10);
    let oracle = curvature_fd_oracle(&sf, &prof, &pt, 1e-4, 1e-5).unwrap();
    let d = oracle.max_abs_diff(&k.full());
    assert!(d < 1e-3, "{d}");
}

#[test]
fn einstein_ricci_is_proportional() {
    for (a, c) in [(1.0, -1.0), (2.0, 1.0)] {
        for n in [2, 3, 5] {
            let sf = SpaceForm::new(n, c).unwrap();
            let params = EinsteinParams::new(a, c, n).unwrap();
            let prof = LiftProfile::einstein(&params);
            let pt = point(n, 0.9);
            let b = crate::bundle::lift_blocks(&sf, &prof, &pt).unwrap();
            let r = ricci_blocks(&sf, &prof, &pt).unwrap();
            let lam = params.lambda();
            assert!((&r.qq - &b.gb * lam).abs().max() < 1e-9);
            assert!((&r.pp - &b.hb * lam).abs().max() < 1e-9);
            assert!(r.cross_max() < 1e-10);
            let closed = ricci_closed_forms(&sf, &prof, &pt).unwrap();
            assert!((&closed.qq - &b.gb * lam).abs().max() < 1e-8);
            let gd = gamma_and_diffs(&sf, &prof, &pt).unwrap();
            assert!(gd.gamma.abs() < 1e-10);
            assert!(gd.diff_qq.abs().max() < 1e-8 && gd.diff_pp.abs().max() < 1e-8);
        }
    }
}

#[test]
fn closed_form_ricci_matches_trace_route() {
    let cases = [
        (3, -1.0, UProfile::Linear { a0: 2.0, a1: 1.0 }),
        (5, -1.0, UProfile::Linear { a0: 2.0, a1: 1.0 }),
        (3, -1.0, UProfile::Sqrt { a: 1.0, b: 1.0 }),
        (5, 1.0, UProfile::Linear { a0: 1.0, a1: 1.0 }),
    ];
    for (n, c, u) in cases {
        let sf = SpaceForm::new(n, c).unwrap();
        let prof = LiftProfile::integrable(u, c);
        let pt = point(n, 0.2);
        let tr = ricci_blocks(&sf, &prof, &pt).unwrap();
        let cl = ricci_closed_forms(&sf, &prof, &pt).unwrap();
        assert!((&tr.qq - &cl.qq).abs().max() < 1e-6);
        assert!((&tr.pp - &cl.pp).abs().max() < 1e-6);
        assert!(tr.cross_max() < 1e-8 && tr.symmetry_defect() < 1e-8);
        let gd = gamma_and_diffs(&sf, &prof, &pt).unwrap();
        assert!(gd.factorization_defect() < 1e-6);
        assert!(gd.gamma.abs() > 1e-3);
        for term in ricci_terms(&sf, &prof, &pt).unwrap() {
            assert!(term.relative_error() < 1e-6, "{term:?}");
        }
    }
    let sf = SpaceForm::new(3, -1.0).unwrap();
    let shifted = LiftProfile::new(UProfile::einstein(1.0, -1.0), VRule::Shifted(0.05), -1.0);
    assert!(ricci_closed_forms(&sf, &shifted, &point(3, 0.2)).is_err());
}

#[test]
fn gamma_vanishes_only_for_the_einstein_exponent() {
    let ud = |b: f64, t: f64| UProfile::Sqrt { a: 1.0, b }.derivatives(t).unwrap();
    for t in [0.1, 0.7, 2.0] {
        let k = ricci_coefficients(3, -1.0, t, &ud(2.0, t));
        assert!(k.gamma.abs() < 1e-10);
        let k = ricci_coefficients(3, -1.0, t, &ud(1.0, t));
        assert!(k.gamma.abs() > 1e-3);
    }
}
