//! Curvature `K(X, Y) = ∇_X ∇_Y - ∇_Y ∇_X - ∇_[X,Y]` of the lifted metric.
//!
//! Block layouts:
//! * `K(∂^i, ∂^j) ∂^k = ppp[(i, j, k, h)] ∂^h`
//! * `K(∂^i, ∂^j) δ_k = ppq[(i, j, h, k)] δ_h`
//! * `K(δ_i, δ_j) ∂^k = qqp[(k, i, j, h)] ∂^h`
//! * `K(δ_i, δ_j) δ_k = qqq[(h, i, j, k)] δ_h`
//! * `K(∂^i, δ_j) δ_k = pqq[(i, j, k, h)] ∂^h`
//! * `K(∂^i, δ_j) ∂^k = pqp[(i, k, h, j)] δ_h`
//!
//! The full table `k[(d, c, a, b)]` means `K(e_a, e_b) e_c = k[(d, c, a, b)] e_d`.

use alloc::vec::Vec;

use super::{christoffel_fd, point_data, PointData};
use crate::bundle::{metric_full, PhasePoint};
use crate::error::Result;
use crate::fd;
use crate::frame::frame_change_at;
use crate::profile::LiftProfile;
use crate::spaceform::{riemann_from_connection, SpaceForm};
use crate::tensor::{Matrix, Tensor3, Tensor4};

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureBlocks {
    pub ppp: Tensor4,
    pub ppq: Tensor4,
    pub qqp: Tensor4,
    pub qqq: Tensor4,
    pub pqq: Tensor4,
    pub pqp: Tensor4,
}

pub(crate) fn blocks_from(d: &PointData) -> CurvatureBlocks {
    let n = d.gamma.dim();
    let (q, p, s) = (&d.coeffs.q, &d.coeffs.p, &d.coeffs.s);
    let (dq, dp, ds) = (&d.derivs.dq, &d.derivs.dp, &d.derivs.ds);
    let (r, r0) = (&d.riemann, &d.r0);
    let sum = |f: &dyn Fn(usize) -> f64| (0..n).map(f).sum::<f64>();
    let ppp = Tensor4::from_fn(n, |i, j, k, h| {
        dq[(i, j, k, h)] - dq[(j, i, k, h)] + sum(&|l| q[(j, k, l)] * q[(i, l, h)] - q[(i, k, l)] * q[(j, l, h)])
    });
    let ppq = Tensor4::from_fn(n, |i, j, h, k| {
        dp[(i, h, j, k)] - dp[(j, h, i, k)] + sum(&|l| p[(l, j, k)] * p[(h, i, l)] - p[(l, i, k)] * p[(h, j, l)])
    });
    let qqp = Tensor4::from_fn(n, |k, i, j, h| {
        -r[(k, h, i, j)]
            + sum(&|l| -r0[(l, i, j)] * q[(l, k, h)] + s[(h, i, l)] * p[(l, k, j)] - s[(h, j, l)] * p[(l, k, i)])
    });
    let qqq = Tensor4::from_fn(n, |h, i, j, k| {
        r[(h, k, i, j)]
            + sum(&|l| -r0[(l, i, j)] * p[(h, l, k)] + s[(l, j, k)] * p[(h, l, i)] - s[(l, i, k)] * p[(h, l, j)])
    });
    let pqq = Tensor4::from_fn(n, |i, j, k, h| {
        ds[(i, h, j, k)] + sum(&|l| s[(l, j, k)] * q[(i, l, h)] - s[(h, j, l)] * p[(l, i, k)])
    });
    let pqp = Tensor4::from_fn(n, |i, k, h, j| {
        dp[(i, h, k, j)] + sum(&|l| p[(h, i, l)] * p[(l, k, j)] - q[(i, k, l)] * p[(h, l, j)])
    });
    CurvatureBlocks { ppp, ppq, qqp, qqq, pqq, pqp }
}

impl CurvatureBlocks {
    pub fn dim(&self) -> usize {
        self.ppp.dim()
    }

    /// Assembles the full `2n` table; the six blocks and antisymmetry in
    /// `(a, b)` determine every component, the remaining ones vanish.
    pub fn full(&self) -> Tensor4 {
        let n = self.dim();
        let mut k = Tensor4::zeros(2 * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        // (h, k, i, j) in each block's printed role
                        let (h, kk, i, j) = (a, b, c, d);
                        k[(n + h, n + kk, n + i, n + j)] = self.ppp[(i, j, kk, h)];
                        k[(h, kk, n + i, n + j)] = self.ppq[(i, j, h, kk)];
                        k[(n + h, n + kk, i, j)] = self.qqp[(kk, i, j, h)];
                        k[(h, kk, i, j)] = self.qqq[(h, i, j, kk)];
                        k[(n + h, kk, n + i, j)] = self.pqq[(i, j, kk, h)];
                        k[(n + h, kk, j, n + i)] = -self.pqq[(i, j, kk, h)];
                        k[(h, n + kk, n + i, j)] = self.pqp[(i, kk, h, j)];
                        k[(h, n + kk, j, n + i)] = -self.pqp[(i, kk, h, j)];
                    }
                }
            }
        }
        k
    }

    /// Largest violation of antisymmetry in the first argument pair for the
    /// blocks whose two arguments are of the same kind.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for h in 0..n {
                        m = m.max((self.ppp[(i, j, k, h)] + self.ppp[(j, i, k, h)]).abs());
                        m = m.max((self.ppq[(i, j, h, k)] + self.ppq[(j, i, h, k)]).abs());
                        m = m.max((self.qqp[(k, i, j, h)] + self.qqp[(k, j, i, h)]).abs());
                        m = m.max((self.qqq[(h, i, j, k)] + self.qqq[(h, j, i, k)]).abs());
                    }
                }
            }
        }
        m
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        [
            self.ppp.max_abs_diff(&o.ppp),
            self.ppq.max_abs_diff(&o.ppq),
            self.qqp.max_abs_diff(&o.qqp),
            self.qqq.max_abs_diff(&o.qqq),
            self.pqq.max_abs_diff(&o.pqq),
            self.pqp.max_abs_diff(&o.pqp),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Block names paired with their arrays.
    pub fn named(&self) -> [(&'static str, &Tensor4); 6] {
        [
            ("PPP", &self.ppp),
            ("PPQ", &self.ppq),
            ("QQP", &self.qqp),
            ("QQQ", &self.qqq),
            ("PQQ", &self.pqq),
            ("PQP", &self.pqp),
        ]
    }
}

/// The six curvature blocks from `Q, P, S`, their exact vertical
/// derivatives, and the base curvature.
pub fn curvature_blocks(base: &SpaceForm, profile: &LiftProfile, pt: &PhasePoint) -> Result<CurvatureBlocks> {
    Ok(blocks_from(&point_data(base, profile, pt)?))
}

/// Full adapted curvature table from nested central differences: Christoffel
/// symbols of the coordinate metric with step `h_inner`, their derivatives
/// with step `h_outer`, then a change to the adapted frame.
pub fn curvature_fd_oracle(
    base: &SpaceForm,
    profile: &LiftProfile,
    pt: &PhasePoint,
    h_outer: f64,
    h_inner: f64,
) -> Result<Tensor4> {
    fd::check_step(h_outer)?;
    let dim = 2 * base.dim();
    let x = pt.coords();
    let metric = |y: &[f64]| -> Result<Matrix> { metric_full(base, profile, &PhasePoint::from_coords(y)?) };
    let chris = |y: &[f64]| -> Result<Vec<f64>> { Ok(christoffel_fd(&metric, y, h_inner)?.as_slice().to_vec()) };
    let gamma = christoffel_fd(&metric, &x, h_inner)?;
    let mut dgamma = Vec::with_capacity(dim);
    for l in 0..dim {
        let d = fd::partial(&chris, &x, l, h_outer)?;
        dgamma.push(Tensor3::from_fn(dim, |k, i, j| d[(k * dim + i) * dim + j]));
    }
    let kc = riemann_from_connection(&gamma, &dgamma);
    let fc = frame_change_at(base, pt)?;
    Ok(change_frame(&kc, &fc.b, &fc.inverse()))
}

/// `K'[(D, C, A, B)] = bi[(D, d)] K[(d, c, a, b)] b[(c, C)] b[(a, A)] b[(b, B)]`.
fn change_frame(k: &Tensor4, b: &Matrix, bi: &Matrix) -> Tensor4 {
    let m = k.dim();
    let t1 = Tensor4::from_fn(m, |d, c, a, bb| (0..m).map(|e| k[(d, c, a, e)] * b[(e, bb)]).sum());
    let t2 = Tensor4::from_fn(m, |d, c, a, bb| (0..m).map(|e| t1[(d, c, e, bb)] * b[(e, a)]).sum());
    let t3 = Tensor4::from_fn(m, |d, c, a, bb| (0..m).map(|e| t2[(d, e, a, bb)] * b[(e, c)]).sum());
    Tensor4::from_fn(m, |d, c, a, bb| (0..m).map(|e| bi[(d, e)] * t3[(e, c, a, bb)]).sum())
}
