use approx::assert_relative_eq;
use kahler_lift::bundle::{canonical_form, lift_blocks, metric_full, PhasePoint};
use kahler_lift::connection::{
    conn_coeffs_expanded, conn_coeffs_generic, curvature_blocks, ricci_blocks, ricci_closed_forms,
};
use kahler_lift::frame::frame_change_at;
use kahler_lift::nijenhuis::{j_coord, nijenhuis_analytic};
use kahler_lift::profile::{
    closed_form_vw, einstein_u, ode_relative_residual, v_from_u, w_from_uv, EinsteinParams, LiftProfile, UProfile,
    VRule,
};
use kahler_lift::spaceform::SpaceForm;
use kahler_lift::tensor::Matrix;
use kahler_lift::Error;
use proptest::prelude::*;

fn point(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-0.4..0.4f64, n), prop::collection::vec(-1.5..1.5f64, n))
}

fn curvature() -> impl Strategy<Value = f64> {
    prop_oneof![Just(-1.0), Just(0.0), Just(1.0), -2.0..2.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn j_squares_to_minus_identity_and_is_orthogonal(
        c in curvature(),
        (q, p) in point(3),
        a0 in 0.5..2.0f64,
        a1 in 0.0..1.0f64,
        v in 0.0..0.5f64,
    ) {
        let base = SpaceForm::new(3, c).unwrap();
        let pt = PhasePoint::new(q, p).unwrap();
        let prof = LiftProfile::new(UProfile::Linear { a0, a1 }, VRule::Constant(v), c);
        let b = match lift_blocks(&base, &prof, &pt) {
            Ok(b) => b,
            Err(_) => return Ok(()),
        };
        let (g, j) = (b.adapted_metric(), b.j_adapted());
        let scale = g.abs().max();
        prop_assert!((&j * &j + Matrix::identity(6, 6)).abs().max() < 1e-12 * scale * scale);
        prop_assert!((j.transpose() * &g * &j - &g).abs().max() < 1e-12 * scale * scale);
    }

    #[test]
    fn fundamental_form_is_canonical_in_coordinates(c in curvature(), (q, p) in point(2), a in 0.5..3.0f64) {
        let base = SpaceForm::new(2, c).unwrap();
        let pt = PhasePoint::new(q, p).unwrap();
        let prof = LiftProfile::integrable(UProfile::Sqrt { a, b: 1.0 }, c);
        let m = match metric_full(&base, &prof, &pt) {
            Ok(m) => m,
            Err(_) => return Ok(()),
        };
        let jc = j_coord(&base, &prof, &pt.coords()).unwrap();
        prop_assert!((m * jc - canonical_form(2)).abs().max() < 1e-9);
    }

    #[test]
    fn frame_change_inverts(c in curvature(), (q, p) in point(3)) {
        let base = SpaceForm::new(3, c).unwrap();
        let f = frame_change_at(&base, &PhasePoint::new(q, p).unwrap()).unwrap();
        prop_assert!((&f.b * f.inverse() - Matrix::identity(6, 6)).abs().max() < 1e-14);
    }

    #[test]
    fn einstein_profile_has_vanishing_nijenhuis_tensor(c in curvature(), (q, p) in point(3), a in 1.0..3.0f64) {
        let base = SpaceForm::new(3, c).unwrap();
        let params = EinsteinParams::new(a, c, 3).unwrap();
        match nijenhuis_analytic(&base, &LiftProfile::einstein(&params), &PhasePoint::new(q, p).unwrap()) {
            Ok(e) => prop_assert!(e.max_abs < 1e-9),
            Err(Error::OutsideTube { .. }) | Err(Error::Singular { .. }) | Err(Error::Inadmissible { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn einstein_profile_solves_the_ode(a in 0.2..5.0f64, c in -3.0..3.0f64, s in 0.0..0.99f64) {
        let params = EinsteinParams::new(a, c, 3).unwrap();
        let t = if c > 0.0 { s * params.t_max() } else { 50.0 * s };
        let u = einstein_u(&params, t).unwrap();
        prop_assert!(ode_relative_residual(&u, t).abs() < 1e-10);
    }

    #[test]
    fn closed_form_vw_matches_composition(a in 0.2..5.0f64, c in prop_oneof![-3.0..-0.01f64, 0.01..3.0f64], s in 0.001..0.95f64) {
        let params = EinsteinParams::new(a, c, 2).unwrap();
        let t = if c > 0.0 { s * params.t_max() } else { 50.0 * s };
        let u = einstein_u(&params, t).unwrap();
        let v = v_from_u(&u, c, t).unwrap();
        let w = w_from_uv(u.u, v, t).unwrap();
        let (vc, wc) = closed_form_vw(&params, t).unwrap();
        assert_relative_eq!(vc, v, max_relative = 1e-9);
        assert_relative_eq!(wc, w, max_relative = 1e-9);
        assert_relative_eq!(u.u + 2.0 * t * v, 2.0 * (a * a - 2.0 * c * t) / a, max_relative = 1e-10);
    }

    #[test]
    fn expanded_coefficients_match_generic(c in curvature(), (q, p) in point(2), a0 in 1.0..2.0f64, a1 in 0.1..1.0f64) {
        let base = SpaceForm::new(2, c).unwrap();
        let pt = PhasePoint::new(q, p).unwrap();
        let prof = LiftProfile::new(UProfile::Linear { a0, a1 }, VRule::Constant(0.2), c);
        if let (Ok(e), Ok(g)) = (conn_coeffs_expanded(&base, &prof, &pt), conn_coeffs_generic(&base, &prof, &pt)) {
            prop_assert!(e.max_abs_diff(&g) < 1e-9 * g.max_abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn curvature_blocks_are_antisymmetric(c in curvature(), (q, p) in point(2)) {
        let base = SpaceForm::new(2, c).unwrap();
        let prof = LiftProfile::new(UProfile::Linear { a0: 1.0, a1: 0.5 }, VRule::Constant(0.1), c);
        if let Ok(k) = curvature_blocks(&base, &prof, &PhasePoint::new(q, p).unwrap()) {
            prop_assert!(k.antisymmetry_defect() < 1e-8 * k.full().max_abs().max(1.0));
        }
    }

    #[test]
    fn ricci_closed_forms_match_trace(c in curvature(), (q, p) in point(3), a0 in 1.5..3.0f64, a1 in 0.2..1.0f64) {
        let base = SpaceForm::new(3, c).unwrap();
        let pt = PhasePoint::new(q, p).unwrap();
        let prof = LiftProfile::integrable(UProfile::Linear { a0, a1 }, c);
        if let (Ok(tr), Ok(cl)) = (ricci_blocks(&base, &prof, &pt), ricci_closed_forms(&base, &prof, &pt)) {
            let scale = tr.qq.abs().max().max(tr.pp.abs().max()).max(1.0);
            prop_assert!((&tr.qq - &cl.qq).abs().max() < 1e-6 * scale);
            prop_assert!((&tr.pp - &cl.pp).abs().max() < 1e-6 * scale);
            prop_assert!(tr.cross_max() < 1e-8 * scale);
        }
    }

    #[test]
    fn einstein_lift_has_constant_ricci(c in prop_oneof![-2.0..-0.1f64, 0.1..2.0f64], (q, p) in point(2), a in 1.0..3.0f64) {
        let base = SpaceForm::new(2, c).unwrap();
        let params = EinsteinParams::new(a, c, 2).unwrap();
        let prof = LiftProfile::einstein(&params);
        let pt = PhasePoint::new(q, p).unwrap();
        if let (Ok(b), Ok(r)) = (lift_blocks(&base, &prof, &pt), ricci_blocks(&base, &prof, &pt)) {
            let lam = params.lambda();
            prop_assert!((&r.qq - &b.gb * lam).abs().max() < 1e-6 * b.gb.abs().max());
            prop_assert!((&r.pp - &b.hb * lam).abs().max() < 1e-6 * b.hb.abs().max());
        }
    }
}
