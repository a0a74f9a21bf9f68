//! Nijenhuis tensor of `J`, in closed form and from its bracket definition.
//!
//! Layouts (adapted frame):
//! * `ndd[(i, j, k)]`: `N(δ_i, δ_j) = ndd[(i, j, k)] ∂^k`
//! * `ndp[(i, j, k)]`: `N(δ_i, ∂^j) = ndp[(i, j, k)] δ_k`
//! * `npp[(i, j, k)]`: `N(∂^i, ∂^j) = npp[(i, j, k)] ∂^k`

use alloc::vec::Vec;

use crate::bundle::{lift_blocks, PhasePoint};
use crate::error::{Error, Result};
use crate::frame::{adapted_field, bracket_fd_oracle, frame_change_at, Field};
use crate::profile::{integrability_scalar, LiftProfile};
use crate::spaceform::SpaceForm;
use crate::tensor::{Matrix, Tensor3, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct NijenhuisEval {
    pub ndd: Tensor3,
    pub ndp: Tensor3,
    pub npp: Tensor3,
    /// Largest component over the three families.
    pub max_abs: f64,
    /// Largest component outside the three families' target blocks
    /// (zero for the closed form; a consistency check for the oracle).
    pub off_block: f64,
}

impl NijenhuisEval {
    fn new(ndd: Tensor3, ndp: Tensor3, npp: Tensor3, off_block: f64) -> Self {
        let max_abs = ndd.max_abs().max(ndp.max_abs()).max(npp.max_abs());
        Self { ndd, ndp, npp, max_abs, off_block }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.ndd
            .max_abs_diff(&other.ndd)
            .max(self.ndp.max_abs_diff(&other.ndp))
            .max(self.npp.max_abs_diff(&other.npp))
    }

    /// Largest violation of `N(X, Y) = -N(Y, X)` within `ndd` and `npp`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.ndd.dim();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    m = m.max((self.ndd[(i, j, k)] + self.ndd[(j, i, k)]).abs());
                    m = m.max((self.npp[(i, j, k)] + self.npp[(j, i, k)]).abs());
                }
            }
        }
        m
    }
}

/// Closed-form components with `F = v(2tu' - u) + uu'` and
/// `T0[(k, i, j)] = p_h (F (δ^h_i g_jk - δ^h_j g_ik) - R^h_kij)`:
/// `N(δ_i, δ_j) = T0_kij ∂^k`, `N(δ_i, ∂^j) = H^kl H^jr T0_lir δ_k`,
/// `N(∂^i, ∂^j) = H^ir H^jl T0_klr ∂^k`.
pub fn nijenhuis_analytic(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<NijenhuisEval> {
    let blocks = lift_blocks(base, profile, pt)?;
    let n = base.dim();
    let f = integrability_scalar(&blocks.values.u, blocks.values.v.f, blocks.t);
    let r = base.riemann_at(&pt.q)?;
    let g = &blocks.g;
    let p = &pt.p;
    let t0 = Tensor3::from_fn(n, |k, i, j| {
        let mut s = f * (p[i] * g[(j, k)] - p[j] * g[(i, k)]);
        for h in 0..n {
            s -= p[h] * r[(h, k, i, j)];
        }
        s
    });
    let hb = &blocks.hb;
    let ndd = Tensor3::from_fn(n, |i, j, k| t0[(k, i, j)]);
    let ndp = Tensor3::from_fn(n, |i, j, k| {
        let mut s = 0.0;
        for l in 0..n {
            for r in 0..n {
                s += hb[(k, l)] * hb[(j, r)] * t0[(l, i, r)];
            }
        }
        s
    });
    let npp = Tensor3::from_fn(n, |i, j, k| {
        let mut s = 0.0;
        for l in 0..n {
            for r in 0..n {
                s += hb[(i, r)] * hb[(j, l)] * t0[(k, l, r)];
            }
        }
        s
    });
    Ok(NijenhuisEval::new(ndd, ndp, npp, 0.0))
}

/// `J` in coordinates at the phase coordinates `x`.
pub fn j_coord(base: &SpaceForm, profile: &LiftProfile, x: &[f64]) -> Result<Matrix> {
    let pt = PhasePoint::from_coords(x)?;
    let blocks = lift_blocks(base, profile, &pt)?;
    let fc = frame_change_at(base, &pt)?;
    Ok(fc.endomorphism_to_coord(&blocks.j_adapted()))
}

/// `N(X, Y) = [JX, JY] - J[JX, Y] - J[X, JY] - [X, Y]` in coordinates, with
/// every bracket taken by central differences of step `h`.
pub fn nijenhuis_oracle(
    base: &SpaceForm,
    profile: &LiftProfile,
    x_field: &Field<'_>,
    y_field: &Field<'_>,
    x: &[f64],
    h: f64,
) -> Result<Vector> {
    let apply_j = |f: &Field<'_>, y: &[f64]| -> Result<Vec<f64>> {
        let v = Vector::from_vec(f(y)?);
        Ok((j_coord(base, profile, y)? * v).as_slice().to_vec())
    };
    let jx = |y: &[f64]| apply_j(x_field, y);
    let jy = |y: &[f64]| apply_j(y_field, y);
    let j = j_coord(base, profile, x)?;
    let a = bracket_fd_oracle(&jx, &jy, x, h)?.0;
    let b = bracket_fd_oracle(&jx, y_field, x, h)?.0;
    let c = bracket_fd_oracle(x_field, &jy, x, h)?.0;
    let d = bracket_fd_oracle(x_field, y_field, x, h)?.0;
    Ok(a - &j * (b + c) - d)
}

/// The three component families from [`nijenhuis_oracle`] on adapted basis fields.
pub fn nijenhuis_oracle_components(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint, h: f64) -> Result<NijenhuisEval> {
    let n = base.dim();
    let x = pt.coords();
    let bi = frame_change_at(base, pt)?.inverse();
    let mut ndd = Tensor3::zeros(n);
    let mut ndp = Tensor3::zeros(n);
    let mut npp = Tensor3::zeros(n);
    let mut off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let eval = |a: usize, b: usize| -> Result<Vector> {
                let fa = adapted_field(base, a);
                let fb = adapted_field(base, b);
                Ok(&bi * nijenhuis_oracle(base, profile, &*fa, &*fb, &x, h)?)
            };
            let dd = eval(i, j)?;
            let dp = eval(i, n + j)?;
            let pp = eval(n + i, n + j)?;
            for k in 0..n {
                ndd[(i, j, k)] = dd[n + k];
                ndp[(i, j, k)] = dp[k];
                npp[(i, j, k)] = pp[n + k];
                off = off.max(dd[k].abs()).max(dp[n + k].abs()).max(pp[k].abs());
            }
        }
    }
    Ok(NijenhuisEval::new(ndd, ndp, npp, off))
}

/// Outcome of [`integrability_verdict`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegrabilityVerdict {
    pub integrable: bool,
    pub max_abs: f64,
    pub mean_abs: f64,
    /// Largest `|F(t) - c|` over the samples.
    pub max_scalar_defect: f64,
    pub samples: usize,
}

/// Integrable iff the closed-form Nijenhuis tensor stays below `tolerance` at every sample.
pub fn integrability_verdict(
    base: &SpaceForm,
    profile: &LiftProfile,
    points: &[PhasePoint],
    tolerance: f64,
) -> Result<IntegrabilityVerdict> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let (mut max_abs, mut sum, mut max_f) = (0.0f64, 0.0, 0.0f64);
    for pt in points {
        let e = nijenhuis_analytic(base, profile, pt)?;
        max_abs = max_abs.max(e.max_abs);
        sum += e.max_abs;
        let blocks = lift_blocks(base, profile, pt)?;
        let f = integrability_scalar(&blocks.values.u, blocks.values.v.f, blocks.t);
        max_f = max_f.max((f - base.curvature()).abs());
    }
    Ok(IntegrabilityVerdict {
        integrable: max_abs < tolerance,
        max_abs,
        mean_abs: sum / points.len() as f64,
        max_scalar_defect: max_f,
        samples: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{EinsteinParams, UProfile, VRule};
    use alloc::vec;

    fn sasaki(c: f64) -> LiftProfile {
        LiftProfile::new(UProfile::Constant { a: 1.0 }, VRule::Constant(0.0), c)
    }

    fn einstein(a: f64, c: f64) -> LiftProfile {
        LiftProfile::einstein(&EinsteinParams::new(a, c, 3).unwrap())
    }

    fn points(n: usize) -> Vec<PhasePoint> {
        (0..6)
            .map(|s| {
                let f = s as f64;
                PhasePoint::new(
                    (0..n).map(|i| 0.4 * libm::sin(1.3 * f + i as f64)).collect(),
                    (0..n).map(|i| 0.6 * libm::cos(0.7 * f + 2.0 * i as f64)).collect(),
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn vanishes_on_zero_section() {
        let sf = SpaceForm::new(3, -1.0).unwrap();
        let pt = PhasePoint::new(vec![0.2, 0.1, -0.3], vec![0.0; 3]).unwrap();
        let prof = LiftProfile::new(UProfile::Linear { a0: 1.0, a1: 0.5 }, VRule::Constant(0.1), -1.0);
        assert_eq!(nijenhuis_analytic(&sf, &prof, &pt).unwrap().max_abs, 0.0);
    }

    #[test]
    fn integrable_profiles_give_zero() {
        for c in [-1.0, 0.0, 1.0] {
            let sf = SpaceForm::new(3, c).unwrap();
            let prof = if c == 0.0 { sasaki(0.0) } else { einstein(2.0, c) };
            for pt in points(3) {
                let e = nijenhuis_analytic(&sf, &prof, &pt).unwrap();
                assert!(e.max_abs < 1e-9, "c = {c}: {}", e.max_abs);
            }
        }
    }

    #[test]
    fn verdict_examples() {
        let pts = points(3);
        let sf = SpaceForm::new(3, -1.0).unwrap();
        assert!(integrability_verdict(&sf, &einstein(1.0, -1.0), &pts, 1e-9).unwrap().integrable);
        let v = integrability_verdict(&sf, &sasaki(-1.0), &pts, 1e-9).unwrap();
        assert!(!v.integrable && v.max_scalar_defect == 1.0);
        let flat = SpaceForm::new(3, 0.0).unwrap();
        assert!(integrability_verdict(&flat, &sasaki(0.0), &pts, 1e-9).unwrap().integrable);
        assert!(matches!(integrability_verdict(&flat, &sasaki(0.0), &[], 1e-9), Err(Error::EmptySample)));
        for dv in [0.05, -0.05] {
            let shifted = LiftProfile::new(UProfile::einstein(1.0, -1.0), VRule::Shifted(dv), -1.0);
            assert!(!integrability_verdict(&sf, &shifted, &pts, 1e-9).unwrap().integrable);
        }
    }

    #[test]
    fn oracle_matches_closed_form() {
        let cases = [
            (2, -1.0, LiftProfile::new(UProfile::einstein(1.0, -1.0), VRule::Shifted(0.1), -1.0)),
            (3, 1.0, LiftProfile::new(UProfile::Linear { a0: 2.0, a1: 0.5 }, VRule::Constant(0.2), 1.0)),
            (3, -1.0, einstein(1.0, -1.0)),
        ];
        for (n, c, prof) in cases {
            let sf = SpaceForm::new(n, c).unwrap();
            for pt in points(n).iter().take(2) {
                let an = nijenhuis_analytic(&sf, &prof, pt).unwrap();
                let or = nijenhuis_oracle_components(&sf, &prof, pt, 1e-5).unwrap();
                assert!(an.max_abs_diff(&or) < 1e-4, "{}", an.max_abs_diff(&or));
                assert!(or.off_block < 1e-4);
                assert!(an.antisymmetry_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn perturbed_v_is_witnessed_by_the_oracle() {
        let sf = SpaceForm::new(3, -1.0).unwrap();
        let prof = LiftProfile::new(UProfile::einstein(1.0, -1.0), VRule::Shifted(0.05), -1.0);
        let pt = PhasePoint::new(vec![0.2, -0.1, 0.3], vec![0.5, 0.4, -0.3]).unwrap();
        let or = nijenhuis_oracle_components(&sf, &prof, &pt, 1e-5).unwrap();
        assert!(or.max_abs > 1e-2, "{}", or.max_abs);
        let x = pt.coords();
        let e = adapted_field(&sf, 1);
        assert!(nijenhuis_oracle(&sf, &prof, &*e, &*e, &x, 1e-5).unwrap().abs().max() < 1e-6);
    }
}
