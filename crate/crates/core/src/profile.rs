//! Coefficient functions of the lift as functions of the energy density `t`.
//!
//! A lift is fixed by `u(t)` and a rule for `v(t)`; `w` always follows from
//! `H = G^{-1}`. Derivatives are exact for the closed-form families and fall
//! back to central differences only for [`UProfile::Custom`] and [`VRule::Custom`].

use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{check_finite, Error, Result};

/// Relative width of the band around `u^2 - 2ct = 0` (and `2tu' - u = 0`)
/// inside which integrable profiles refuse to evaluate.
pub const DEFAULT_SINGULAR_GUARD: f64 = 1e-8;

/// Below `|2ct| / A^2` of this size the literal closed forms for `v`, `w`
/// lose too many digits to cancellation and the rationalized forms are used.
const CLOSED_FORM_SWITCH: f64 = 1e-2;

/// Value and first two derivatives of a scalar function of `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Jet {
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(f: f64, d1: f64, d2: f64) -> Self {
        Self { f, d1, d2 }
    }

    pub const fn constant(f: f64) -> Self {
        Self { f, d1: 0.0, d2: 0.0 }
    }

    /// The identity function `t ↦ t` at `t`.
    pub const fn variable(t: f64) -> Self {
        Self { f: t, d1: 1.0, d2: 0.0 }
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.f;
        Self {
            f: r,
            d1: -self.d1 * r * r,
            d2: (2.0 * self.d1 * self.d1 * r - self.d2) * r * r,
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.f + o.f, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.f - o.f, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.f, -self.d1, -self.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(
            self.f * o.f,
            self.d1 * o.f + self.f * o.d1,
            self.d2 * o.f + 2.0 * self.d1 * o.d1 + self.f * o.d2,
        )
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(self * o.f, self * o.d1, self * o.d2)
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

/// `u` and its first three derivatives at one `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UDerivs {
    pub u: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

impl UDerivs {
    fn jet(&self) -> Jet {
        Jet::new(self.u, self.u1, self.u2)
    }

    fn derivative_jet(&self) -> Jet {
        Jet::new(self.u1, self.u2, self.u3)
    }
}

/// Closed-form families for the first coefficient `u(t)`.
#[derive(Debug, Clone, Copy)]
pub enum UProfile {
    /// `u = A + sqrt(A^2 + B t)`; the Einstein solution is `B = -2c`.
    Sqrt { a: f64, b: f64 },
    /// `u = A`.
    Constant { a: f64 },
    /// `u = a0 + a1 t` (covers `u = A t` with `a0 = 0`).
    Linear { a0: f64, a1: f64 },
    /// Arbitrary smooth `u`; derivatives by central differences.
    Custom { f: fn(f64) -> f64 },
}

const CUSTOM_STEP: f64 = 2e-3;

fn fd_derivs(f: fn(f64) -> f64, t: f64) -> [f64; 4] {
    let h = CUSTOM_STEP * (1.0 + t.abs());
    let (m2, m1, z, p1, p2) = (f(t - 2.0 * h), f(t - h), f(t), f(t + h), f(t + 2.0 * h));
    [
        z,
        (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h),
        (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h),
        (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
    ]
}

impl UProfile {
    /// `u = A + sqrt(A^2 - 2ct)`.
    pub fn einstein(a: f64, c: f64) -> Self {
        UProfile::Sqrt { a, b: -2.0 * c }
    }

    /// Upper end of the `t`-interval on which the formula itself is defined.
    pub fn domain_bound(&self) -> Option<f64> {
        match *self {
            UProfile::Sqrt { a, b } if b < 0.0 => Some(a * a / -b),
            _ => None,
        }
    }

    /// Characteristic size of `u^2`, used to scale guard bands.
    pub fn scale(&self) -> f64 {
        let s = match *self {
            UProfile::Sqrt { a, .. } | UProfile::Constant { a } => a * a,
            UProfile::Linear { a0, a1 } => (a0 * a0).max(a1 * a1),
            UProfile::Custom { f } => f(0.0) * f(0.0),
        };
        if s > 0.0 && s.is_finite() {
            s
        } else {
            1.0
        }
    }

    pub fn derivatives(&self, t: f64) -> Result<UDerivs> {
        check_finite(&[t], "energy density")?;
        let d = match *self {
            UProfile::Sqrt { a, b } => {
                let arg = a * a + b * t;
                if !(arg > 0.0) {
                    return Err(Error::OutsideTube { t, t_max: self.domain_bound().unwrap_or(0.0) });
                }
                let s = libm::sqrt(arg);
                UDerivs {
                    u: a + s,
                    u1: b / (2.0 * s),
                    u2: -b * b / (4.0 * s * s * s),
                    u3: 3.0 * b * b * b / (8.0 * s * s * s * s * s),
                }
            }
            UProfile::Constant { a } => UDerivs { u: a, u1: 0.0, u2: 0.0, u3: 0.0 },
            UProfile::Linear { a0, a1 } => UDerivs { u: a0 + a1 * t, u1: a1, u2: 0.0, u3: 0.0 },
            UProfile::Custom { f } => {
                let [u, u1, u2, u3] = fd_derivs(f, t);
                UDerivs { u, u1, u2, u3 }
            }
        };
        check_finite(&[d.u, d.u1, d.u2, d.u3], "profile u")?;
        Ok(d)
    }
}

/// How the second coefficient `v` is obtained.
#[derive(Debug, Clone, Copy)]
pub enum VRule {
    /// `v = (c - u u') / (2t u' - u)`, the integrability relation.
    Integrable,
    /// Integrable `v` plus a constant offset (a non-integrable perturbation).
    Shifted(f64),
    /// Constant `v`.
    Constant(f64),
    /// Arbitrary smooth `v`; derivatives by central differences.
    Custom(fn(f64) -> f64),
}

/// Values of `u`, `v`, `w` and their derivatives at one `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValues {
    pub t: f64,
    pub u: UDerivs,
    pub v: Jet,
    pub w: Jet,
}

impl ProfileValues {
    /// `u + 2tv`, the second eigenvalue factor of the horizontal block.
    pub fn horizontal_factor(&self) -> f64 {
        self.u.u + 2.0 * self.t * self.v.f
    }
}

/// A complete lift profile: `u`, the rule for `v`, and the base curvature.
#[derive(Debug, Clone, Copy)]
pub struct LiftProfile {
    pub u: UProfile,
    pub v: VRule,
    pub c: f64,
    pub guard: f64,
}

impl LiftProfile {
    pub fn new(u: UProfile, v: VRule, c: f64) -> Self {
        Self { u, v, c, guard: DEFAULT_SINGULAR_GUARD }
    }

    pub fn integrable(u: UProfile, c: f64) -> Self {
        Self::new(u, VRule::Integrable, c)
    }

    /// The Kähler-Einstein profile `u = A + sqrt(A^2 - 2ct)` with integrable `v`.
    pub fn einstein(params: &EinsteinParams) -> Self {
        Self::integrable(UProfile::einstein(params.a, params.c), params.c)
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn is_integrable(&self) -> bool {
        matches!(self.v, VRule::Integrable)
    }

    /// Largest known `t` bound (tube radius or a zero of `u - 2tu'`), if any.
    pub fn t_bound(&self) -> Option<f64> {
        let sing = match (self.u, self.v) {
            (UProfile::Linear { a0, a1 }, VRule::Integrable | VRule::Shifted(_)) if a1 > 0.0 && a0 > 0.0 => {
                Some(a0 / a1)
            }
            _ => None,
        };
        match (self.u.domain_bound(), sing) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn v_jet(&self, ud: &UDerivs, t: f64) -> Result<Jet> {
        let integrable = |offset: f64| -> Result<Jet> {
            let u = ud.jet();
            let u1 = ud.derivative_jet();
            let tj = Jet::variable(t);
            let den = 2.0 * (tj * u1) - u;
            if den.f.abs() <= self.guard * (ud.u.abs() + (2.0 * t * ud.u1).abs()) {
                return Err(Error::Singular { t, reason: "2t u' - u vanishes" });
            }
            let gap = ud.u * ud.u - 2.0 * self.c * t;
            if gap.abs() <= self.guard * (ud.u * ud.u + (2.0 * self.c * t).abs()) {
                return Err(Error::Singular { t, reason: "u^2 - 2ct vanishes" });
            }
            Ok((Jet::constant(self.c) - u * u1) / den + Jet::constant(offset))
        };
        match self.v {
            VRule::Integrable => integrable(0.0),
            VRule::Shifted(dv) => integrable(dv),
            VRule::Constant(v) => Ok(Jet::constant(v)),
            VRule::Custom(f) => {
                let [v, v1, v2, _] = fd_derivs(f, t);
                Ok(Jet::new(v, v1, v2))
            }
        }
    }

    /// Evaluates `u, v, w` without enforcing positivity.
    pub fn values_unchecked(&self, t: f64) -> Result<ProfileValues> {
        if t < 0.0 {
            return Err(Error::Inadmissible { t, reason: "negative energy density" });
        }
        let ud = self.u.derivatives(t)?;
        let v = self.v_jet(&ud, t)?;
        let u = ud.jet();
        let tj = Jet::variable(t);
        let w = -(v / (u * (u + 2.0 * (tj * v))));
        check_finite(&[v.f, v.d1, v.d2, w.f, w.d1, w.d2], "profile v, w")?;
        Ok(ProfileValues { t, u: ud, v, w })
    }

    /// Evaluates `u, v, w`, refusing points where `G` is not positive definite.
    pub fn values(&self, t: f64) -> Result<ProfileValues> {
        let vals = self.values_unchecked(t)?;
        if !(vals.u.u > 0.0) {
            return Err(Error::Inadmissible { t, reason: "u <= 0" });
        }
        if !(vals.horizontal_factor() > 0.0) {
            return Err(Error::Inadmissible { t, reason: "u + 2tv <= 0" });
        }
        Ok(vals)
    }

    /// `F(t) - c` with `F = v(2tu' - u) + uu'`; zero exactly when the
    /// Nijenhuis tensor vanishes over a base of curvature `c`.
    pub fn integrability_defect(&self, t: f64) -> Result<f64> {
        let vals = self.values_unchecked(t)?;
        Ok(integrability_scalar(&vals.u, vals.v.f, t) - self.c)
    }
}

/// `v(2tu' - u) + uu'`, the scalar multiplying every Nijenhuis component.
pub fn integrability_scalar(u: &UDerivs, v: f64, t: f64) -> f64 {
    v * (2.0 * t * u.u1 - u.u) + u.u * u.u1
}

/// Parameters of the Kähler-Einstein family.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EinsteinParams {
    pub a: f64,
    pub c: f64,
    pub n: usize,
}

impl EinsteinParams {
    pub fn new(a: f64, c: f64, n: usize) -> Result<Self> {
        check_finite(&[a, c], "Einstein parameters")?;
        if !(a > 0.0) {
            return Err(Error::InvalidParameter("A must be positive"));
        }
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        Ok(Self { a, c, n })
    }

    /// Supremum of admissible `t`: `A^2 / 2c` for `c > 0`, unbounded otherwise.
    pub fn t_max(&self) -> f64 {
        if self.c > 0.0 {
            self.a * self.a / (2.0 * self.c)
        } else {
            f64::INFINITY
        }
    }

    /// Einstein constant `(n + 1) c / A`.
    pub fn lambda(&self) -> f64 {
        (self.n as f64 + 1.0) * self.c / self.a
    }

    /// Holomorphic sectional curvature `2c / A`.
    pub fn holomorphic_curvature(&self) -> f64 {
        2.0 * self.c / self.a
    }

    fn check_t(&self, t: f64) -> Result<()> {
        check_finite(&[t], "energy density")?;
        if t < 0.0 || t >= self.t_max() {
            return Err(Error::OutsideTube { t, t_max: self.t_max() });
        }
        Ok(())
    }
}

/// `v = (c - u u') / (2t u' - u)`.
pub fn v_from_u(u: &UDerivs, c: f64, t: f64) -> Result<f64> {
    let den = 2.0 * t * u.u1 - u.u;
    if den.abs() <= DEFAULT_SINGULAR_GUARD * (u.u.abs() + (2.0 * t * u.u1).abs()) {
        return Err(Error::Singular { t, reason: "2t u' - u vanishes" });
    }
    Ok((c - u.u * u.u1) / den)
}

/// `w = -v / (u (u + 2tv))`, the scalar in `H = G^{-1}`.
pub fn w_from_uv(u: f64, v: f64, t: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Inadmissible { t, reason: "u <= 0" });
    }
    let e = u + 2.0 * t * v;
    if !(e > 0.0) {
        return Err(Error::Inadmissible { t, reason: "u + 2tv <= 0" });
    }
    Ok(-v / (u * e))
}

/// `u = A + s`, `s = sqrt(A^2 - 2ct)`, with `u' = -c/s`, `u'' = -c^2/s^3`, `u''' = -3c^3/s^5`.
pub fn einstein_u(params: &EinsteinParams, t: f64) -> Result<UDerivs> {
    params.check_t(t)?;
    let c = params.c;
    let s = libm::sqrt(params.a * params.a - 2.0 * c * t);
    let s3 = s * s * s;
    Ok(UDerivs {
        u: params.a + s,
        u1: -c / s,
        u2: -c * c / s3,
        u3: -3.0 * c * c * c / (s3 * s * s),
    })
}

/// `u^2 u'' - 2t u'^3 + 2u u'^2`; vanishes on Einstein profiles.
pub fn ode_residual(u: &UDerivs, t: f64) -> f64 {
    u.u * u.u * u.u2 - 2.0 * t * u.u1 * u.u1 * u.u1 + 2.0 * u.u * u.u1 * u.u1
}

/// [`ode_residual`] divided by the sum of its term magnitudes (or 1 if all vanish).
pub fn ode_relative_residual(u: &UDerivs, t: f64) -> f64 {
    let scale = (u.u * u.u * u.u2).abs()
        + (2.0 * t * u.u1 * u.u1 * u.u1).abs()
        + (2.0 * u.u * u.u1 * u.u1).abs();
    let r = ode_residual(u, t);
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

/// Closed forms of `v` and `w` on the Einstein profile.
///
/// For `t > 0` away from zero these are
/// `v = (A - 4ct/A - s) / 2t` and `w = (-A^3 + 3Act + s^3) / (4ct^2 s^2)`;
/// near `t = 0` the algebraically equal `v = c/(A+s) - 2c/A`,
/// `w = -vA / (2s^2 (A+s))` are used, with limits `v(0) = -3c/2A`, `w(0) = 3c/8A^3`.
pub fn closed_form_vw(params: &EinsteinParams, t: f64) -> Result<(f64, f64)> {
    params.check_t(t)?;
    let (a, c) = (params.a, params.c);
    let s2 = a * a - 2.0 * c * t;
    let s = libm::sqrt(s2);
    if (2.0 * c * t).abs() >= CLOSED_FORM_SWITCH * a * a {
        Ok(literal_closed_form_vw(a, c, t))
    } else {
        let v = c / (a + s) - 2.0 * c / a;
        let w = -v * a / (2.0 * s2 * (a + s));
        Ok((v, w))
    }
}

/// The closed forms exactly as written, singular at `t = 0` and `c = 0`.
pub fn literal_closed_form_vw(a: f64, c: f64, t: f64) -> (f64, f64) {
    let s2 = a * a - 2.0 * c * t;
    let s = libm::sqrt(s2);
    let v = (a - 4.0 * c * t / a - s) / (2.0 * t);
    let w = (-a * a * a + 3.0 * a * c * t + s2 * s) / (4.0 * c * t * t * s2);
    (v, w)
}

/// One row of [`positivity_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Admissibility {
    pub t: f64,
    /// `u(t)`, NaN if `u` is undefined at `t`.
    pub u: f64,
    /// `u + 2tv`, NaN if undefined.
    pub horizontal_factor: f64,
    /// `u^2 - 2ct`, the distance to the singular locus.
    pub singular_gap: f64,
    pub u_positive: bool,
    pub metric_positive: bool,
    pub outside_guard: bool,
}

impl Admissibility {
    pub fn admissible(&self) -> bool {
        self.u_positive && self.metric_positive && self.outside_guard
    }
}

/// Per-point positivity report over a grid of `t` values.
pub fn positivity_check(profile: &LiftProfile, ts: &[f64]) -> Vec<Admissibility> {
    ts.iter()
        .map(|&t| {
            let ud = profile.u.derivatives(t).ok();
            let u = ud.map_or(f64::NAN, |d| d.u);
            let singular_gap = u * u - 2.0 * profile.c * t;
            match profile.values_unchecked(t) {
                Ok(vals) => Admissibility {
                    t,
                    u,
                    horizontal_factor: vals.horizontal_factor(),
                    singular_gap,
                    u_positive: u > 0.0,
                    metric_positive: vals.horizontal_factor() > 0.0,
                    outside_guard: true,
                },
                Err(e) => Admissibility {
                    t,
                    u,
                    horizontal_factor: f64::NAN,
                    singular_gap,
                    u_positive: u > 0.0,
                    metric_positive: false,
                    outside_guard: !matches!(e, Error::Singular { .. }),
                },
            }
        })
        .collect()
}
