//! Constant-curvature base manifolds in the conformally flat chart
//! `g_ij = δ_ij / σ(x)^2`, `σ(x) = 1 + (c/4)|x|^2`.
//!
//! Component layouts:
//! * metric derivative `dg[(i, j, k)] = ∂_k g_ij`
//! * Christoffel symbols `gamma[(k, i, j)] = Γ^k_ij`
//! * curvature `riemann[(h, k, i, j)] = R^h_kij`, where
//!   `R(∂_i, ∂_j) ∂_k = R^h_kij ∂_h` and `R(X, Y) = ∇_X ∇_Y - ∇_Y ∇_X - ∇_[X,Y]`.
//!
//! With this layout the horizontal lifts on the cotangent bundle satisfy
//! `[δ_i, δ_j] = p_h R^h_kij ∂^k`; see [`RIEMANN_LAYOUT`].

use alloc::vec::Vec;

use crate::error::{check_finite, Error, Result};
use crate::fd;
use crate::tensor::{kron, Matrix, Tensor3, Tensor4};

/// Index layout of every curvature array in the crate. The bracket
/// `[δ_i, δ_j]` is `R0[(k, i, j)] ∂^k` with `R0[(k, i, j)] = p_h riemann[(h, k, i, j)]`;
/// `frame` pins this against a finite-difference Lie bracket.
pub const RIEMANN_LAYOUT: &str = "riemann[(h,k,i,j)] = R^h_kij with R(d_i,d_j)d_k = R^h_kij d_h";

/// A space form of dimension `n` and sectional curvature `c`, in one chart.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpaceForm {
    n: usize,
    c: f64,
}

/// Metric data at a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMetricEval {
    pub g: Matrix,
    pub g_inv: Matrix,
    pub gamma: Tensor3,
    pub riemann: Tensor4,
}

impl SpaceForm {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        check_finite(&[c], "curvature")?;
        Ok(Self { n, c })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn curvature(&self) -> f64 {
        self.c
    }

    /// `n = 2` is allowed but the constant-curvature converse of the
    /// integrability criterion needs `n >= 3`; reports carry this flag.
    pub fn below_schur_dimension(&self) -> bool {
        self.n == 2
    }

    /// Default sampling radius for base coordinates: `min(1, 1/sqrt|c|)`,
    /// which keeps `σ` within `[3/4, 5/4]`.
    pub fn default_radius(&self) -> f64 {
        if self.c != 0.0 {
            (1.0 / libm::sqrt(self.c.abs())).min(1.0)
        } else {
            1.0
        }
    }

    /// `σ(x) = 1 + (c/4)|x|^2`; errors outside the chart.
    pub fn conformal_factor(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::InvalidParameter("base point has the wrong dimension"));
        }
        check_finite(x, "base point")?;
        let sigma = 1.0 + 0.25 * self.c * norm_sq(x);
        if !(sigma > 0.0) {
            return Err(Error::ChartDomain { factor: sigma });
        }
        Ok(sigma)
    }

    /// `∂_k log(1/σ)`, the gradient of the conformal exponent.
    fn log_gradient(&self, x: &[f64], sigma: f64) -> Vec<f64> {
        x.iter().map(|xk| -0.5 * self.c * xk / sigma).collect()
    }

    /// Metric and its exact inverse.
    pub fn metric_at(&self, x: &[f64]) -> Result<(Matrix, Matrix)> {
        let sigma = self.conformal_factor(x)?;
        let s2 = sigma * sigma;
        let g = Matrix::identity(self.n, self.n) / s2;
        let g_inv = Matrix::identity(self.n, self.n) * s2;
        Ok((g, g_inv))
    }

    /// Closed-form `∂_k g_ij = 2 (∂_k f) g_ij` with `f = -log σ`.
    pub fn metric_derivative_at(&self, x: &[f64]) -> Result<Tensor3> {
        let sigma = self.conformal_factor(x)?;
        let df = self.log_gradient(x, sigma);
        let gd = 1.0 / (sigma * sigma);
        Ok(Tensor3::from_fn(self.n, |i, j, k| 2.0 * df[k] * gd * kron(i, j)))
    }

    /// `Γ^k_ij = δ^k_i ∂_j f + δ^k_j ∂_i f - δ_ij ∂_k f`.
    pub fn christoffel_at(&self, x: &[f64]) -> Result<Tensor3> {
        let sigma = self.conformal_factor(x)?;
        let df = self.log_gradient(x, sigma);
        Ok(Tensor3::from_fn(self.n, |k, i, j| {
            kron(k, i) * df[j] + kron(k, j) * df[i] - kron(i, j) * df[k]
        }))
    }

    /// Constant-curvature form `R^h_kij = c (δ^h_i g_jk - δ^h_j g_ik)`.
    pub fn riemann_at(&self, x: &[f64]) -> Result<Tensor4> {
        let (g, _) = self.metric_at(x)?;
        Ok(riemann_identity(self.c, &g))
    }

    /// `∇_k g_ij` assembled from the closed-form derivative and Christoffel symbols.
    pub fn metric_covariant_derivative(&self, x: &[f64]) -> Result<Tensor3> {
        let (g, _) = self.metric_at(x)?;
        let dg = self.metric_derivative_at(x)?;
        let gamma = self.christoffel_at(x)?;
        let n = self.n;
        Ok(Tensor3::from_fn(n, |i, j, k| {
            let mut r = dg[(i, j, k)];
            for l in 0..n {
                r -= gamma[(l, k, i)] * g[(l, j)] + gamma[(l, k, j)] * g[(i, l)];
            }
            r
        }))
    }

    pub fn eval(&self, x: &[f64]) -> Result<BaseMetricEval> {
        let (g, g_inv) = self.metric_at(x)?;
        let gamma = self.christoffel_at(x)?;
        let riemann = riemann_identity(self.c, &g);
        Ok(BaseMetricEval { g, g_inv, gamma, riemann })
    }

    fn check_stencil(&self, x: &[f64], h: f64) -> Result<()> {
        fd::check_step(h)?;
        self.conformal_factor(x)?;
        for k in 0..self.n {
            let hk = fd::scaled_step(h, x[k]);
            for s in [-1.0, 1.0] {
                let mut y = x.to_vec();
                y[k] += s * hk;
                if self.conformal_factor(&y).is_err() {
                    return Err(Error::Step { step: h, reason: "stencil leaves the chart domain" });
                }
            }
        }
        Ok(())
    }

    /// Christoffel symbols from central differences of [`Self::metric_at`]; oracle only.
    pub fn christoffel_fd_oracle(&self, x: &[f64], h: f64) -> Result<Tensor3> {
        self.check_stencil(x, h)?;
        let n = self.n;
        let metric = |y: &[f64]| -> Result<Vec<f64>> { Ok(self.metric_at(y)?.0.as_slice().to_vec()) };
        let mut dg = Tensor3::zeros(n);
        for k in 0..n {
            let d = fd::partial(&metric, x, k, h)?;
            for i in 0..n {
                for j in 0..n {
                    // nalgebra storage is column-major
                    dg[(i, j, k)] = d[i + n * j];
                }
            }
        }
        let (_, g_inv) = self.metric_at(x)?;
        Ok(christoffel_from_metric_derivative(&g_inv, &dg))
    }

    /// Curvature from `∂Γ + ΓΓ` with `∂Γ` taken by central differences of
    /// [`Self::christoffel_at`]; oracle only.
    pub fn riemann_fd(&self, x: &[f64], h: f64) -> Result<Tensor4> {
        self.check_stencil(x, h)?;
        let n = self.n;
        let gamma = self.christoffel_at(x)?;
        let chris = |y: &[f64]| -> Result<Vec<f64>> { Ok(self.christoffel_at(y)?.as_slice().to_vec()) };
        // dgamma[l][(k, i, j)] = ∂_l Γ^k_ij
        let mut dgamma = Vec::with_capacity(n);
        for l in 0..n {
            let d = fd::partial(&chris, x, l, h)?;
            dgamma.push(Tensor3::from_fn(n, |k, i, j| d[(k * n + i) * n + j]));
        }
        Ok(riemann_from_connection(&gamma, &dgamma))
    }
}

pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum()
}

pub(crate) fn riemann_identity(c: f64, g: &Matrix) -> Tensor4 {
    let n = g.nrows();
    Tensor4::from_fn(n, |h, k, i, j| c * (kron(h, i) * g[(j, k)] - kron(h, j) * g[(i, k)]))
}

/// Koszul formula in coordinates: `Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il - ∂_l g_ij)`.
pub fn christoffel_from_metric_derivative(g_inv: &Matrix, dg: &Tensor3) -> Tensor3 {
    let n = g_inv.nrows();
    Tensor3::from_fn(n, |k, i, j| {
        let mut s = 0.0;
        for l in 0..n {
            s += g_inv[(k, l)] * (dg[(j, l, i)] + dg[(i, l, j)] - dg[(i, j, l)]);
        }
        0.5 * s
    })
}

/// `R^h_kij = ∂_i Γ^h_jk - ∂_j Γ^h_ik + Γ^h_im Γ^m_jk - Γ^h_jm Γ^m_ik`
/// where `dgamma[l][(k, i, j)] = ∂_l Γ^k_ij`.
pub fn riemann_from_connection(gamma: &Tensor3, dgamma: &[Tensor3]) -> Tensor4 {
    let n = gamma.dim();
    Tensor4::from_fn(n, |h, k, i, j| {
        let mut r = dgamma[i][(h, j, k)] - dgamma[j][(h, i, k)];
        for m in 0..n {
            r += gamma[(h, i, m)] * gamma[(m, j, k)] - gamma[(h, j, m)] * gamma[(m, i, k)];
        }
        r
    })
}
