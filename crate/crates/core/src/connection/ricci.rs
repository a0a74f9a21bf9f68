//! Ricci tensor of the lifted metric, by trace and in closed form.
//!
//! With `D = u - 2tu'`:
//! * `Ric(δ_j, δ_k) = a/(2D²) g_jk + α/(2u²D⁴) p_j p_k`
//! * `Ric(∂^j, ∂^k) = a/(2u²D²) g^jk + β/(2u²(u²-2ct)D²) g^{0j} g^{0k}`
//! * `Ric(δ_j, δ_k) - a/(2uD²) G_jk = (u²-2ct) γ/(2u²D⁴) p_j p_k`
//! * `Ric(∂^j, ∂^k) - a/(2uD²) H^jk = γ/(2u²(u²-2ct)D²) g^{0j} g^{0k}`
//!
//! The closed forms hold for integrable `v` only.

use alloc::vec::Vec;

use super::curvature::blocks_from;
use super::point_data;
use crate::bundle::{split_diagonal, AdaptedBlocks, PhasePoint};
use crate::error::{Error, Result};
use crate::profile::{LiftProfile, UDerivs, DEFAULT_SINGULAR_GUARD};
use crate::spaceform::SpaceForm;
use crate::tensor::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct RicciBlocks {
    /// `Ric(δ_j, δ_k)`
    pub qq: Matrix,
    /// `Ric(∂^j, ∂^k)`
    pub pp: Matrix,
    /// `Ric(δ_j, ∂^k)`
    pub cross: Matrix,
    /// `Ric(∂^j, δ_k)`
    pub cross_rev: Matrix,
}

impl RicciBlocks {
    /// Largest entry of either mixed block.
    pub fn cross_max(&self) -> f64 {
        self.cross.abs().max().max(self.cross_rev.abs().max())
    }

    pub fn symmetry_defect(&self) -> f64 {
        (&self.qq - self.qq.transpose())
            .abs()
            .max()
            .max((&self.pp - self.pp.transpose()).abs().max())
            .max((&self.cross - self.cross_rev.transpose()).abs().max())
    }
}

/// `Ric(e_b, e_c) = Σ_a K(e_a, e_b) e_c` component `a`, over the full table.
pub fn ricci_blocks(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<RicciBlocks> {
    let d = point_data(base, profile, pt)?;
    let k = blocks_from(&d).full();
    let n = base.dim();
    let ric = Matrix::from_fn(2 * n, 2 * n, |b, c| (0..2 * n).map(|a| k[(a, c, a, b)]).sum());
    Ok(RicciBlocks {
        qq: ric.view((0, 0), (n, n)).into_owned(),
        pp: ric.view((n, n), (n, n)).into_owned(),
        cross: ric.view((0, n), (n, n)).into_owned(),
        cross_rev: ric.view((n, 0), (n, n)).into_owned(),
    })
}

/// Scalar coefficients of the closed-form Ricci tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RicciCoefficients {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// The polynomials `a, α, β, γ` in `(n, c, t, u, u', u'', u''')`.
pub fn ricci_coefficients(n: usize, c: f64, t: f64, ud: &UDerivs) -> RicciCoefficients {
    let nf = n as f64;
    let (u, u1, u2, u3) = (ud.u, ud.u1, ud.u2, ud.u3);
    let pw = |x: f64, k: i32| libm::pow(x, k as f64);
    let (c2, t2, t3) = (c * c, t * t, t * t * t);
    let (uu, u3p, u4, u5, u6) = (u * u, pw(u, 3), pw(u, 4), pw(u, 5), pw(u, 6));
    let (a1s, a13, a14) = (u1 * u1, pw(u1, 3), pw(u1, 4));
    let dd = u - 2.0 * t * u1;
    let sg = 2.0 * c * t - uu;

    let a = nf * dd * (2.0 * c * u - 2.0 * c * t * u1 - uu * u1) + 2.0 * sg * (t * u * u2 + u * u1 - t * a1s);

    let alpha = nf
        * dd
        * (-2.0 * c2 * u3p + 6.0 * c2 * t * uu * u1 + 3.0 * c * u4 * u1 - 12.0 * c2 * t2 * u * a1s - 3.0 * u5 * a1s
            + 8.0 * c2 * t3 * a13
            - 4.0 * c * t2 * uu * a13
            + 4.0 * t * u4 * a13
            - 4.0 * c2 * t2 * uu * u2
            + 4.0 * c * t * u4 * u2
            - u6 * u2)
        + 2.0
            * sg
            * (-3.0 * c * u3p * u1 + 7.0 * c * t * uu * a1s + 4.0 * u4 * a1s - 8.0 * c * t2 * u * a13
                - 8.0 * t * u3p * a13
                + 4.0 * c * t3 * a14
                + 4.0 * t2 * uu * a14
                - 7.0 * c * t * u3p * u2
                + 2.0 * u5 * u2
                + 6.0 * c * t2 * uu * u1 * u2
                + 3.0 * t * u4 * u1 * u2
                - 6.0 * t2 * u3p * a1s * u2
                - 8.0 * c * t3 * uu * u2 * u2
                + 4.0 * t2 * u4 * u2 * u2
                - 2.0 * c * t2 * u3p * u3
                + t * u5 * u3
                + 4.0 * c * t3 * uu * u1 * u3
                - 2.0 * t2 * u4 * u1 * u3);

    let beta = nf
        * dd
        * (2.0 * c2 * u - 2.0 * c2 * t * u1 - 3.0 * c * uu * u1 + 6.0 * c * t * u * a1s - u3p * a1s
            - 4.0 * c * t2 * a13
            + 2.0 * t * uu * a13
            + 2.0 * c * t * uu * u2
            - u4 * u2)
        + 2.0
            * (2.0 * c2 * t * u * u1 + c * u3p * u1 - 2.0 * c2 * t2 * a1s - 5.0 * c * t * uu * a1s - 2.0 * u4 * a1s
                + 8.0 * c * t2 * u * a13
                + 4.0 * t * u3p * a13
                - 4.0 * c * t3 * a14
                - 2.0 * t2 * uu * a14
                + 2.0 * c2 * t2 * u * u2
                + 5.0 * c * t * u3p * u2
                - 2.0 * u5 * u2
                - 6.0 * c * t2 * uu * u1 * u2
                - t * u4 * u1 * u2
                + 4.0 * t2 * u3p * a1s * u2
                + 8.0 * c * t3 * uu * u2 * u2
                - 4.0 * t2 * u4 * u2 * u2
                + 2.0 * c * t2 * u3p * u3
                - t * u5 * u3
                - 4.0 * c * t3 * uu * u1 * u3
                + 2.0 * t2 * u4 * u1 * u3);

    let gamma = nf * (uu - 2.0 * c * t) * (2.0 * t * u1 - u) * (uu * u2 - 2.0 * t * a13 + 2.0 * u * a1s)
        + 2.0
            * (2.0 * c * u3p * u1 - 4.0 * c * t * uu * a1s - 3.0 * u4 * a1s + 6.0 * c * t2 * u * a13
                + 5.0 * t * u3p * a13
                - 4.0 * c * t3 * a14
                - 2.0 * t2 * uu * a14
                + 6.0 * c * t * u3p * u2
                - 2.0 * u5 * u2
                - 4.0 * c * t2 * uu * u1 * u2
                - 2.0 * t * u4 * u1 * u2
                + 4.0 * t2 * u3p * a1s * u2
                + 8.0 * c * t3 * uu * u2 * u2
                - 4.0 * t2 * u4 * u2 * u2
                + 2.0 * c * t2 * u3p * u3
                - t * u5 * u3
                - 4.0 * c * t3 * uu * u1 * u3
                + 2.0 * t2 * u4 * u1 * u3);

    RicciCoefficients { a, alpha, beta, gamma }
}

struct ClosedFormContext {
    coeffs: RicciCoefficients,
    u: f64,
    d: f64,
    gap: f64,
}

fn closed_form_context(base: &SpaceForm, profile: &LiftProfile, b: &AdaptedBlocks) -> Result<ClosedFormContext> {
    if !profile.is_integrable() {
        return Err(Error::InvalidParameter("closed-form Ricci tensor requires the integrable v"));
    }
    let ud = b.values.u;
    let (t, c) = (b.t, base.curvature());
    let d = ud.u - 2.0 * t * ud.u1;
    let gap = ud.u * ud.u - 2.0 * c * t;
    if d.abs() <= DEFAULT_SINGULAR_GUARD * (ud.u.abs() + (2.0 * t * ud.u1).abs()) {
        return Err(Error::Singular { t, reason: "u - 2tu' vanishes" });
    }
    if gap.abs() <= DEFAULT_SINGULAR_GUARD * (ud.u * ud.u + (2.0 * c * t).abs()) {
        return Err(Error::Singular { t, reason: "u^2 - 2ct vanishes" });
    }
    Ok(ClosedFormContext { coeffs: ricci_coefficients(base.dim(), c, t, &ud), u: ud.u, d, gap })
}

/// Ricci blocks assembled from `a, α, β`; mixed blocks are zero by construction.
pub fn ricci_closed_forms(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<RicciBlocks> {
    let b = crate::bundle::lift_blocks(base, profile, pt)?;
    let cx = closed_form_context(base, profile, &b)?;
    let (u, d, gap, k) = (cx.u, cx.d, cx.gap, cx.coeffs);
    let (d2, d4) = (d * d, d * d * d * d);
    let pp = &b.p * b.p.transpose();
    let g0g0 = &b.g0 * b.g0.transpose();
    let n = base.dim();
    Ok(RicciBlocks {
        qq: &b.g * (k.a / (2.0 * d2)) + pp * (k.alpha / (2.0 * u * u * d4)),
        pp: &b.g_inv * (k.a / (2.0 * u * u * d2)) + g0g0 * (k.beta / (2.0 * u * u * gap * d2)),
        cross: Matrix::zeros(n, n),
        cross_rev: Matrix::zeros(n, n),
    })
}

/// The differences `Ric - a/(2uD²)·(G, H)` assembled from the trace route,
/// next to their `γ`-factored closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaDiffs {
    pub gamma: f64,
    pub diff_qq: Matrix,
    pub diff_pp: Matrix,
    pub factored_qq: Matrix,
    pub factored_pp: Matrix,
}

impl GammaDiffs {
    pub fn factorization_defect(&self) -> f64 {
        (&self.diff_qq - &self.factored_qq)
            .abs()
            .max()
            .max((&self.diff_pp - &self.factored_pp).abs().max())
    }
}

pub fn gamma_and_diffs(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<GammaDiffs> {
    let b = crate::bundle::lift_blocks(base, profile, pt)?;
    let cx = closed_form_context(base, profile, &b)?;
    let ric = ricci_blocks(base, profile, pt)?;
    let (u, d, gap, k) = (cx.u, cx.d, cx.gap, cx.coeffs);
    let (d2, d4) = (d * d, d * d * d * d);
    let lam = k.a / (2.0 * u * d2);
    Ok(GammaDiffs {
        gamma: k.gamma,
        diff_qq: &ric.qq - &b.gb * lam,
        diff_pp: &ric.pp - &b.hb * lam,
        factored_qq: (&b.p * b.p.transpose()) * (gap * k.gamma / (2.0 * u * u * d4)),
        factored_pp: (&b.g0 * b.g0.transpose()) * (k.gamma / (2.0 * u * u * gap * d2)),
    })
}

/// One scalar term of the closed-form Ricci tensor, as recovered from the
/// trace route and as given by its polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TermComparison {
    pub name: &'static str,
    pub trace: f64,
    pub closed: f64,
}

impl TermComparison {
    pub fn relative_error(&self) -> f64 {
        (self.trace - self.closed).abs() / self.closed.abs().max(self.trace.abs()).max(1e-300)
    }
}

/// Splits the trace-route blocks into their `g`/`p⊗p` (and `g^{-1}`/`g0⊗g0`)
/// parts and compares each scalar with its closed form, so that a mismatch can
/// be attributed to one polynomial. Needs `p ≠ 0`.
pub fn ricci_terms(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<Vec<TermComparison>> {
    let b = crate::bundle::lift_blocks(base, profile, pt)?;
    let cx = closed_form_context(base, profile, &b)?;
    let ric = ricci_blocks(base, profile, pt)?;
    let (u, d, gap, k) = (cx.u, cx.d, cx.gap, cx.coeffs);
    let (d2, d4) = (d * d, d * d * d * d);
    let (ga, galpha, _) = split_diagonal(&ric.qq, &b.g, &b.p).ok_or(Error::InvalidParameter("p = 0"))?;
    let (gi, gbeta, _) = split_diagonal(&ric.pp, &b.g_inv, &b.g0).ok_or(Error::InvalidParameter("p = 0"))?;
    Ok(alloc::vec![
        TermComparison { name: "a (horizontal block)", trace: ga * 2.0 * d2, closed: k.a },
        TermComparison { name: "alpha", trace: galpha * 2.0 * u * u * d4, closed: k.alpha },
        TermComparison { name: "a (vertical block)", trace: gi * 2.0 * u * u * d2, closed: k.a },
        TermComparison { name: "beta", trace: gbeta * 2.0 * u * u * gap * d2, closed: k.beta },
    ])
}
