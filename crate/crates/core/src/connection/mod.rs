//! Levi-Civita connection of the lifted metric in the adapted frame.
//!
//! With `(δ, ∂)` the adapted frame and `Γ` the base connection:
//! * `∇_{∂^i} ∂^j = Q^{ij}_h ∂^h`, stored `q[(i, j, h)]`
//! * `∇_{δ_i} ∂^j = -Γ^j_ih ∂^h + P^{hj}_i δ_h`
//! * `∇_{∂^i} δ_j = P^{hi}_j δ_h`, stored `p[(h, i, j)]`
//! * `∇_{δ_i} δ_j = Γ^h_ij δ_h + S_hij ∂^h`, stored `s[(h, i, j)]`
//!
//! Vertical derivatives put the derivative index first:
//! `dq[(m, i, j, h)] = ∂^m Q^{ij}_h`, `dp[(m, h, i, j)]`, `ds[(m, h, i, j)]`.
//! The full table `c[(d, a, b)]` means `∇_{e_a} e_b = c[(d, a, b)] e_d`.

mod curvature;
mod ricci;

pub use curvature::{curvature_blocks, curvature_fd_oracle, CurvatureBlocks};
pub use ricci::{
    gamma_and_diffs, ricci_blocks, ricci_closed_forms, ricci_coefficients, ricci_terms, GammaDiffs, RicciBlocks,
    RicciCoefficients, TermComparison,
};

use alloc::vec::Vec;

use crate::bundle::{lift_blocks, metric_full, PhasePoint};
use crate::error::{Error, Result};
use crate::fd;
use crate::frame::{adapted_field, bracket_fd_oracle, frame_change_at};
use crate::nijenhuis::j_coord;
use crate::profile::LiftProfile;
use crate::spaceform::{christoffel_from_metric_derivative, SpaceForm};
use crate::tensor::{kron, Matrix, Tensor3, Tensor4};

/// Below this `|v|` or `|w|` the expanded coefficient forms are not evaluated.
pub const EXPANDED_FORM_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ConnCoeffs {
    pub q: Tensor3,
    pub p: Tensor3,
    pub s: Tensor3,
}

impl ConnCoeffs {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.q
            .max_abs_diff(&other.q)
            .max(self.p.max_abs_diff(&other.p))
            .max(self.s.max_abs_diff(&other.s))
    }

    pub fn max_abs(&self) -> f64 {
        self.q.max_abs().max(self.p.max_abs()).max(self.s.max_abs())
    }
}

/// Vertical derivatives of [`ConnCoeffs`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConnDerivatives {
    pub dq: Tensor4,
    pub dp: Tensor4,
    pub ds: Tensor4,
}

/// Everything the analytic curvature needs at one point.
#[derive(Debug, Clone)]
pub(crate) struct PointData {
    pub gamma: Tensor3,
    pub riemann: Tensor4,
    /// `r0[(l, j, k)] = p_m R^m_ljk`
    pub r0: Tensor3,
    pub coeffs: ConnCoeffs,
    pub derivs: ConnDerivatives,
}

pub(crate) fn point_data(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<PointData> {
    let blocks = lift_blocks(base, profile, pt)?;
    let eval = base.eval(&pt.q)?;
    let n = base.dim();
    let r = eval.riemann;
    let p = &pt.p;
    let r0 = Tensor3::from_fn(n, |l, j, k| (0..n).map(|m| p[m] * r[(m, l, j, k)]).sum());
    let d = blocks.derivatives();
    let (gb, hb) = (&blocks.gb, &blocks.hb);
    let (dg, dh, d2g, d2h) = (&d.dg, &d.dh, &d.d2g, &d.d2h);

    // hq[(i, j, k)] = ∂^i H^jk + ∂^j H^ik - ∂^k H^ij
    let hq = Tensor3::from_fn(n, |i, j, k| dh[(i, j, k)] + dh[(j, i, k)] - dh[(k, i, j)]);
    // pg[(i, j, k)] = ∂^i G_jk - H^il R0_ljk
    let pg = Tensor3::from_fn(n, |i, j, k| dg[(i, j, k)] - (0..n).map(|l| hb[(i, l)] * r0[(l, j, k)]).sum::<f64>());

    let q = Tensor3::from_fn(n, |i, j, h| 0.5 * (0..n).map(|k| gb[(h, k)] * hq[(i, j, k)]).sum::<f64>());
    let pc = Tensor3::from_fn(n, |h, i, j| 0.5 * (0..n).map(|k| hb[(h, k)] * pg[(i, j, k)]).sum::<f64>());
    let s = Tensor3::from_fn(n, |h, i, j| {
        -0.5 * (0..n).map(|k| gb[(h, k)] * dg[(k, i, j)]).sum::<f64>() + 0.5 * r0[(h, i, j)]
    });

    let dq = Tensor4::from_fn(n, |m, i, j, h| {
        let mut acc = 0.0;
        for k in 0..n {
            acc += dg[(m, h, k)] * hq[(i, j, k)]
                + gb[(h, k)] * (d2h[(m, i, j, k)] + d2h[(m, j, i, k)] - d2h[(m, k, i, j)]);
        }
        0.5 * acc
    });
    let dp = Tensor4::from_fn(n, |m, h, i, j| {
        let mut acc = 0.0;
        for k in 0..n {
            let mut inner = d2g[(m, i, j, k)];
            for l in 0..n {
                inner -= dh[(m, i, l)] * r0[(l, j, k)] + hb[(i, l)] * r[(m, l, j, k)];
            }
            acc += dh[(m, h, k)] * pg[(i, j, k)] + hb[(h, k)] * inner;
        }
        0.5 * acc
    });
    let ds = Tensor4::from_fn(n, |m, h, i, j| {
        let mut acc = r[(m, h, i, j)];
        for k in 0..n {
            acc -= dg[(m, h, k)] * dg[(k, i, j)] + gb[(h, k)] * d2g[(m, k, i, j)];
        }
        0.5 * acc
    });

    Ok(PointData {
        gamma: eval.gamma,
        riemann: r,
        r0,
        coeffs: ConnCoeffs { q, p: pc, s },
        derivs: ConnDerivatives { dq, dp, ds },
    })
}

/// `Q^{ij}_h = ½ G_hk (∂^i H^jk + ∂^j H^ik - ∂^k H^ij)`,
/// `P^{hi}_j = ½ H^hk (∂^i G_jk - H^il R0_ljk)`,
/// `S_hij = -½ G_hk ∂^k G_ij + ½ R0_hij`.
pub fn conn_coeffs_generic(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<ConnCoeffs> {
    Ok(point_data(base, profile, pt)?.coeffs)
}

/// [`conn_coeffs_generic`] together with the exact vertical derivatives.
pub fn conn_coeffs_with_derivatives(
    base: &SpaceForm,
    profile: &LiftProfile,
    pt: &PhasePoint,
) -> Result<(ConnCoeffs, ConnDerivatives)> {
    let d = point_data(base, profile, pt)?;
    Ok((d.coeffs, d.derivs))
}

/// The coefficients written out in terms of `u, v, w` and their first derivatives.
///
/// Several terms divide by `v` or `w`; below [`EXPANDED_FORM_GUARD`] this
/// returns [`Error::UseGeneric`].
pub fn conn_coeffs_expanded(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<ConnCoeffs> {
    let b = lift_blocks(base, profile, pt)?;
    let vals = &b.values;
    let (u, u1, v, v1, w, w1) = (vals.u.u, vals.u.u1, vals.v.f, vals.v.d1, vals.w.f, vals.w.d1);
    if v.abs() < EXPANDED_FORM_GUARD || w.abs() < EXPANDED_FORM_GUARD {
        return Err(Error::UseGeneric);
    }
    let c = base.curvature();
    let n = base.dim();
    let (g, gi, g0) = (&b.g, &b.g_inv, &b.g0);
    let p = &pt.p;
    let q = Tensor3::from_fn(n, |i, j, h| {
        -u1 / (2.0 * u) * (kron(i, h) * g0[j] + kron(j, h) * g0[i])
            - v * (u1 + 2.0 * u * u * w) / (2.0 * u * u * u * w) * gi[(i, j)] * p[h]
            - v * (2.0 * u1 * w + u * w1) / (2.0 * u * u * w) * g0[i] * g0[j] * p[h]
    });
    let pc = Tensor3::from_fn(n, |h, i, j| {
        u1 / (2.0 * u) * kron(h, j) * g0[i] - (c + u * v) * w / (2.0 * v) * kron(i, j) * g0[h]
            + (u * v - c) / (2.0 * u * u) * gi[(i, h)] * p[j]
            + (v * w * (u * v - c) + u * w * (u1 * v - u * v1)) / (2.0 * u * v) * g0[i] * g0[h] * p[j]
    });
    let s = Tensor3::from_fn(n, |h, i, j| {
        (c - u * v) / 2.0 * g[(j, h)] * p[i] - (c + u * v) / 2.0 * g[(i, h)] * p[j]
            + u1 * v / (2.0 * u * w) * g[(i, j)] * p[h]
            + v * (v1 - 2.0 * u * v * w) / (2.0 * u * w) * p[h] * p[i] * p[j]
    });
    Ok(ConnCoeffs { q, p: pc, s })
}

/// The full `2n` connection table assembled from the base symbols and `Q, P, S`.
pub fn adapted_connection(gamma: &Tensor3, coeffs: &ConnCoeffs) -> Tensor3 {
    let n = gamma.dim();
    let mut c = Tensor3::zeros(2 * n);
    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                c[(n + h, n + i, n + j)] = coeffs.q[(i, j, h)];
                c[(n + h, i, n + j)] = -gamma[(j, i, h)];
                c[(h, i, n + j)] = coeffs.p[(h, j, i)];
                c[(h, n + i, j)] = coeffs.p[(h, i, j)];
                c[(h, i, j)] = gamma[(h, i, j)];
                c[(n + h, i, j)] = coeffs.s[(h, i, j)];
            }
        }
    }
    c
}

/// Analytic `2n` connection table at `pt`.
pub fn adapted_connection_at(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<Tensor3> {
    let d = point_data(base, profile, pt)?;
    Ok(adapted_connection(&d.gamma, &d.coeffs))
}

/// Christoffel symbols of an arbitrary coordinate metric by central
/// differences: `Γ^c_ab = ½ M^cd (∂_a M_bd + ∂_b M_ad - ∂_d M_ab)`.
pub fn christoffel_fd<F>(metric: &F, x: &[f64], h: f64) -> Result<Tensor3>
where
    F: Fn(&[f64]) -> Result<Matrix> + ?Sized,
{
    fd::check_step(h)?;
    let dim = x.len();
    let flat = |y: &[f64]| -> Result<Vec<f64>> { Ok(metric(y)?.as_slice().to_vec()) };
    let mut dm = Tensor3::zeros(dim);
    for k in 0..dim {
        let d = fd::partial(&flat, x, k, h)?;
        for i in 0..dim {
            for j in 0..dim {
                dm[(i, j, k)] = d[i + dim * j];
            }
        }
    }
    let m_inv = metric(x)?.try_inverse().ok_or(Error::NotPositiveDefinite)?;
    Ok(christoffel_from_metric_derivative(&m_inv, &dm))
}

/// Koszul oracle: the `2n` adapted connection table from central differences of
/// the coordinate metric and of the frame,
/// `c^D_AB = (B^{-1})^D_g (B^l_A ∂_l B^g_B + Γ^g_lm B^l_A B^m_B)`.
pub fn koszul_oracle(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint, h: f64) -> Result<Tensor3> {
    let dim = 2 * base.dim();
    let x = pt.coords();
    let metric = |y: &[f64]| -> Result<Matrix> { metric_full(base, profile, &PhasePoint::from_coords(y)?) };
    let gam = christoffel_fd(&metric, &x, h)?;
    let fc = frame_change_at(base, pt)?;
    let (b, bi) = (&fc.b, fc.inverse());
    let mut v = Tensor3::zeros(dim);
    for bidx in 0..dim {
        let field = adapted_field(base, bidx);
        for a in 0..dim {
            let dir: Vec<f64> = b.column(a).iter().copied().collect();
            let deriv = fd::directional(&*field, &x, &dir, h)?;
            for g in 0..dim {
                let mut s = deriv[g];
                for l in 0..dim {
                    for m in 0..dim {
                        s += gam[(g, l, m)] * b[(l, a)] * b[(m, bidx)];
                    }
                }
                v[(g, a, bidx)] = s;
            }
        }
    }
    Ok(Tensor3::from_fn(dim, |d, a, bb| (0..dim).map(|g| bi[(d, g)] * v[(g, a, bb)]).sum()))
}

/// Extracts `Q, P, S` from a `2n` table.
pub fn coeffs_from_table(table: &Tensor3) -> ConnCoeffs {
    let n = table.dim() / 2;
    ConnCoeffs {
        q: Tensor3::from_fn(n, |i, j, h| table[(n + h, n + i, n + j)]),
        p: Tensor3::from_fn(n, |h, i, j| table[(h, n + i, j)]),
        s: Tensor3::from_fn(n, |h, i, j| table[(n + h, i, j)]),
    }
}

fn adapted_metric_field<'a>(base: &'a SpaceForm, profile: &'a LiftProfile) -> impl Fn(&[f64]) -> Result<Vec<f64>> + 'a {
    move |y: &[f64]| Ok(lift_blocks(base, profile, &PhasePoint::from_coords(y)?)?.adapted_metric().as_slice().to_vec())
}

fn j_adapted_field<'a>(base: &'a SpaceForm, profile: &'a LiftProfile) -> impl Fn(&[f64]) -> Result<Vec<f64>> + 'a {
    move |y: &[f64]| Ok(lift_blocks(base, profile, &PhasePoint::from_coords(y)?)?.j_adapted().as_slice().to_vec())
}

/// Largest `|e_A(G_BC) - G(∇_A e_B, e_C) - G(e_B, ∇_A e_C)|` over the adapted frame.
pub fn metric_compatibility_residual(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint, h: f64) -> Result<f64> {
    let dim = 2 * base.dim();
    let table = adapted_connection_at(base, profile, pt)?;
    let gm = lift_blocks(base, profile, pt)?.adapted_metric();
    let fc = frame_change_at(base, pt)?;
    let x = pt.coords();
    let field = adapted_metric_field(base, profile);
    let mut worst = 0.0f64;
    for a in 0..dim {
        let dir: Vec<f64> = fc.b.column(a).iter().copied().collect();
        let d = fd::directional(&field, &x, &dir, h)?;
        for bb in 0..dim {
            for c in 0..dim {
                let mut r = d[bb + dim * c];
                for e in 0..dim {
                    r -= table[(e, a, bb)] * gm[(e, c)] + table[(e, a, c)] * gm[(bb, e)];
                }
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// Largest component of `∇_A e_B - ∇_B e_A - [e_A, e_B]`, brackets by the oracle.
pub fn torsion_residual(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint, h: f64) -> Result<f64> {
    let dim = 2 * base.dim();
    let table = adapted_connection_at(base, profile, pt)?;
    let fc = frame_change_at(base, pt)?;
    let x = pt.coords();
    let mut worst = 0.0f64;
    for a in 0..dim {
        for bb in (a + 1)..dim {
            let fa = adapted_field(base, a);
            let fb = adapted_field(base, bb);
            let br = fc.to_adapted(&bracket_fd_oracle(&*fa, &*fb, &x, h)?).0;
            for d in 0..dim {
                worst = worst.max((table[(d, a, bb)] - table[(d, bb, a)] - br[d]).abs());
            }
        }
    }
    Ok(worst)
}

/// Largest component of `(∇_A J) e_B = e_A(J^D_B) + c^D_AE J^E_B - J^D_E c^E_AB`.
pub fn nabla_j_residual(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint, h: f64) -> Result<f64> {
    let dim = 2 * base.dim();
    let table = adapted_connection_at(base, profile, pt)?;
    let j = lift_blocks(base, profile, pt)?.j_adapted();
    let fc = frame_change_at(base, pt)?;
    let x = pt.coords();
    let field = j_adapted_field(base, profile);
    let mut worst = 0.0f64;
    for a in 0..dim {
        let dir: Vec<f64> = fc.b.column(a).iter().copied().collect();
        let dj = fd::directional(&field, &x, &dir, h)?;
        for bb in 0..dim {
            for d in 0..dim {
                let mut r = dj[d + dim * bb];
                for e in 0..dim {
                    r += table[(d, a, e)] * j[(e, bb)] - j[(d, e)] * table[(e, a, bb)];
                }
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// `∇J` in coordinates from the FD Christoffel symbols of the coordinate metric;
/// independent of the closed-form coefficients.
pub fn nabla_j_oracle_residual(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint, h: f64) -> Result<f64> {
    let dim = 2 * base.dim();
    let x = pt.coords();
    let metric = |y: &[f64]| -> Result<Matrix> { metric_full(base, profile, &PhasePoint::from_coords(y)?) };
    let gam = christoffel_fd(&metric, &x, h)?;
    let jf = |y: &[f64]| -> Result<Vec<f64>> { Ok(j_coord(base, profile, y)?.as_slice().to_vec()) };
    let j = j_coord(base, profile, &x)?;
    let mut worst = 0.0f64;
    for a in 0..dim {
        let dj = fd::partial(&jf, &x, a, h)?;
        for bb in 0..dim {
            for d in 0..dim {
                let mut r = dj[d + dim * bb];
                for e in 0..dim {
                    r += gam[(d, a, e)] * j[(e, bb)] - j[(d, e)] * gam[(e, a, bb)];
                }
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
