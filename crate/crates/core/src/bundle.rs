//! Lifted structures on the cotangent bundle at a phase point.
//!
//! Adapted frame order is `(δ_1, .., δ_n, ∂^1, .., ∂^n)` with
//! `δ_i = ∂/∂q^i + Γ0[(i, h)] ∂/∂p_h`, `Γ0[(i, h)] = p_k Γ^k_ih`.
//! In that frame the metric is `diag(G, H)` and `J = [[0, -H], [G, 0]]`.
//!
//! Vertical derivatives use the derivative index first:
//! `dg[(i, j, k)] = ∂^i G_jk`, `d2g[(l, i, j, k)] = ∂^l ∂^i G_jk`, same for `H`.

use alloc::vec::Vec;

use nalgebra::Cholesky;

use crate::error::{check_finite, Error, Result};
use crate::profile::{Jet, LiftProfile, ProfileValues};
use crate::spaceform::SpaceForm;
use crate::tensor::{Matrix, Tensor3, Tensor4, Vector};

/// A point `(q, p)` of the induced chart on the cotangent bundle.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::InvalidParameter("q and p must have the same length"));
        }
        check_finite(&q, "base coordinates")?;
        check_finite(&p, "covector coordinates")?;
        Ok(Self { q, p })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// The `2n` chart coordinates `(q, p)`.
    pub fn coords(&self) -> Vec<f64> {
        let mut x = self.q.clone();
        x.extend_from_slice(&self.p);
        x
    }

    pub fn from_coords(x: &[f64]) -> Result<Self> {
        if !x.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter("phase coordinates must have even length"));
        }
        let n = x.len() / 2;
        Self::new(x[..n].to_vec(), x[n..].to_vec())
    }
}

/// Components in the adapted frame `(δ, ∂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedVector(pub Vector);

/// Components in the coordinate frame `(∂/∂q, ∂/∂p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordVector(pub Vector);

/// `t = ½ g^{ik} p_i p_k`.
pub fn energy_density(base: &SpaceForm, pt: &PhasePoint) -> Result<f64> {
    check_dims(base, pt)?;
    let (_, g_inv) = base.metric_at(&pt.q)?;
    let p = Vector::from_column_slice(&pt.p);
    Ok(0.5 * p.dot(&(&g_inv * &p)))
}

pub(crate) fn check_dims(base: &SpaceForm, pt: &PhasePoint) -> Result<()> {
    if pt.q.len() != base.dim() || pt.p.len() != base.dim() {
        return Err(Error::InvalidParameter("phase point dimension differs from the base"));
    }
    Ok(())
}

/// `Γ0[(i, h)] = p_k Γ^k_ih`, symmetric.
pub fn gamma0(gamma: &Tensor3, p: &[f64]) -> Matrix {
    let n = gamma.dim();
    Matrix::from_fn(n, n, |i, h| (0..n).map(|k| p[k] * gamma[(k, i, h)]).sum())
}

/// Blocks `G_ij`, `H^kl` and the base data they are built from.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedBlocks {
    pub t: f64,
    pub g: Matrix,
    pub g_inv: Matrix,
    /// `g^{0i} = g^{ih} p_h`.
    pub g0: Vector,
    pub p: Vector,
    pub gb: Matrix,
    pub hb: Matrix,
    pub values: ProfileValues,
}

/// `G = u g + v p⊗p`, `H = g^{-1}/u + w g0⊗g0`.
pub fn lift_blocks(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<AdaptedBlocks> {
    check_dims(base, pt)?;
    let (g, g_inv) = base.metric_at(&pt.q)?;
    let p = Vector::from_column_slice(&pt.p);
    let g0 = &g_inv * &p;
    let t = 0.5 * p.dot(&g0);
    let values = profile.values(t)?;
    let (u, v, w) = (values.u.u, values.v.f, values.w.f);
    let gb = &g * u + (&p * p.transpose()) * v;
    let hb = &g_inv / u + (&g0 * g0.transpose()) * w;
    if Cholesky::new(gb.clone()).is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(AdaptedBlocks { t, g, g_inv, g0, p, gb, hb, values })
}

/// First and second vertical derivatives of the blocks, exact through `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDerivatives {
    pub dg: Tensor3,
    pub dh: Tensor3,
    pub d2g: Tensor4,
    pub d2h: Tensor4,
}

/// Derivatives of `X_jk = a(t) m_jk + b(t) y_j y_k` where `∂^i y_j = nm[(i, j)]`
/// and `∂^i t = g0^i`, `∂^l g0^i = g^{li}`.
fn diagonal_lift_derivatives(
    a: Jet,
    b: Jet,
    m: &Matrix,
    y: &Vector,
    nm: &Matrix,
    g0: &Vector,
    g_inv: &Matrix,
) -> (Tensor3, Tensor4) {
    let n = m.nrows();
    let d1 = Tensor3::from_fn(n, |i, j, k| {
        a.d1 * g0[i] * m[(j, k)] + b.d1 * g0[i] * y[j] * y[k] + b.f * (nm[(i, j)] * y[k] + y[j] * nm[(i, k)])
    });
    let d2 = Tensor4::from_fn(n, |l, i, j, k| {
        let gg = g0[l] * g0[i];
        (a.d2 * gg + a.d1 * g_inv[(l, i)]) * m[(j, k)]
            + (b.d2 * gg + b.d1 * g_inv[(l, i)]) * y[j] * y[k]
            + b.d1 * g0[i] * (nm[(l, j)] * y[k] + y[j] * nm[(l, k)])
            + b.d1 * g0[l] * (nm[(i, j)] * y[k] + y[j] * nm[(i, k)])
            + b.f * (nm[(i, j)] * nm[(l, k)] + nm[(l, j)] * nm[(i, k)])
    });
    (d1, d2)
}

impl AdaptedBlocks {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn derivatives(&self) -> BlockDerivatives {
        let n = self.dim();
        let vals = &self.values;
        let u = Jet::new(vals.u.u, vals.u.u1, vals.u.u2);
        let ident = Matrix::identity(n, n);
        let (dg, d2g) = diagonal_lift_derivatives(u, vals.v, &self.g, &self.p, &ident, &self.g0, &self.g_inv);
        let (dh, d2h) = diagonal_lift_derivatives(u.recip(), vals.w, &self.g_inv, &self.g0, &self.g_inv, &self.g0, &self.g_inv);
        BlockDerivatives { dg, dh, d2g, d2h }
    }

    /// The adapted-frame metric `diag(G, H)`.
    pub fn adapted_metric(&self) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.gb);
        m.view_mut((n, n), (n, n)).copy_from(&self.hb);
        m
    }

    /// `J` in the adapted frame: `J δ_i = G_ik ∂^k`, `J ∂^i = -H^ik δ_k`.
    pub fn j_adapted(&self) -> Matrix {
        let n = self.dim();
        let mut j = Matrix::zeros(2 * n, 2 * n);
        j.view_mut((0, n), (n, n)).copy_from(&(-&self.hb));
        j.view_mut((n, 0), (n, n)).copy_from(&self.gb);
        j
    }

    pub fn j_apply(&self, x: &AdaptedVector) -> AdaptedVector {
        AdaptedVector(self.j_adapted() * &x.0)
    }

    pub fn metric(&self, x: &AdaptedVector, y: &AdaptedVector) -> f64 {
        let n = self.dim();
        let (xh, xv) = (x.0.rows(0, n), x.0.rows(n, n));
        let (yh, yv) = (y.0.rows(0, n), y.0.rows(n, n));
        xh.dot(&(&self.gb * yh)) + xv.dot(&(&self.hb * yv))
    }

    /// `φ(X, Y) = G(X, JY)`.
    pub fn fundamental_form(&self, x: &AdaptedVector, y: &AdaptedVector) -> f64 {
        self.metric(x, &self.j_apply(y))
    }
}

/// `[[0, -I], [I, 0]]`, the matrix of `dp ∧ dq` in either frame.
pub fn canonical_form(n: usize) -> Matrix {
    Matrix::from_fn(2 * n, 2 * n, |a, b| {
        if a < n && b == a + n {
            -1.0
        } else if a >= n && b + n == a {
            1.0
        } else {
            0.0
        }
    })
}

/// The metric in the coordinate frame:
/// `[[G + Γ0 H Γ0, -Γ0 H], [-H Γ0, H]]`.
pub fn metric_full(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<Matrix> {
    let blocks = lift_blocks(base, profile, pt)?;
    let g0m = gamma0(&base.christoffel_at(&pt.q)?, &pt.p);
    let n = base.dim();
    let hg = &blocks.hb * &g0m;
    let mut m = Matrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&(&blocks.gb + g0m.transpose() * &hg));
    m.view_mut((0, n), (n, n)).copy_from(&(-hg.transpose()));
    m.view_mut((n, 0), (n, n)).copy_from(&(-&hg));
    m.view_mut((n, n), (n, n)).copy_from(&blocks.hb);
    Ok(m)
}

/// Least-squares split `X ≈ a m + b y⊗y` with the Frobenius product.
///
/// Returns `(a, b, residual)`; `None` when `m` and `y⊗y` are dependent,
/// which for `m = g` happens only when `y = 0` (or `n = 1`).
pub fn split_diagonal(x: &Matrix, m: &Matrix, y: &Vector) -> Option<(f64, f64, f64)> {
    let yy = y * y.transpose();
    let (mm, my, yyn) = (m.dot(m), m.dot(&yy), yy.dot(&yy));
    let det = mm * yyn - my * my;
    if !(det > 1e-14 * mm * yyn) {
        return None;
    }
    let (xm, xy) = (x.dot(m), x.dot(&yy));
    let a = (xm * yyn - xy * my) / det;
    let b = (mm * xy - my * xm) / det;
    let r = (x - m * a - yy * b).abs().max();
    Some((a, b, r))
}
