//! The adapted frame `(δ_i, ∂^i)`, change of frame, and Lie brackets.
//!
//! Vector fields on the phase space are callbacks from the `2n` chart
//! coordinates `(q, p)` to coordinate-frame components.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::bundle::{check_dims, gamma0, AdaptedVector, CoordVector, PhasePoint};
use crate::error::Result;
use crate::fd;
use crate::spaceform::SpaceForm;
use crate::tensor::{Matrix, Vector};

/// A vector field in coordinate components.
pub type Field<'a> = dyn Fn(&[f64]) -> Result<Vec<f64>> + 'a;

/// Columns of `b` are the adapted basis vectors in coordinates:
/// `b = [[I, 0], [Γ0, I]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameChange {
    pub b: Matrix,
    pub gamma0: Matrix,
}

impl FrameChange {
    pub fn dim(&self) -> usize {
        self.gamma0.nrows()
    }

    /// `[[I, 0], [-Γ0, I]]`.
    pub fn inverse(&self) -> Matrix {
        let n = self.dim();
        let mut bi = self.b.clone();
        bi.view_mut((n, 0), (n, n)).copy_from(&(-&self.gamma0));
        bi
    }

    pub fn to_coord(&self, x: &AdaptedVector) -> CoordVector {
        CoordVector(&self.b * &x.0)
    }

    pub fn to_adapted(&self, x: &CoordVector) -> AdaptedVector {
        AdaptedVector(self.inverse() * &x.0)
    }

    /// Coordinate matrix of an endomorphism given in the adapted frame.
    pub fn endomorphism_to_coord(&self, m: &Matrix) -> Matrix {
        &self.b * m * self.inverse()
    }
}

pub fn frame_change_at(base: &SpaceForm, pt: &PhasePoint) -> Result<FrameChange> {
    check_dims(base, pt)?;
    let n = base.dim();
    let gamma0 = gamma0(&base.christoffel_at(&pt.q)?, &pt.p);
    let mut b = Matrix::identity(2 * n, 2 * n);
    b.view_mut((n, 0), (n, n)).copy_from(&gamma0);
    Ok(FrameChange { b, gamma0 })
}

/// Which pair of adapted fields a bracket is taken between.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    /// `[∂^i, ∂^j]`
    VerticalVertical,
    /// `[∂^i, δ_j]`
    VerticalHorizontal,
    /// `[δ_i, δ_j]`
    HorizontalHorizontal,
}

/// `[∂^i, ∂^j] = 0`, `[∂^i, δ_j] = Γ^i_jk ∂^k`, `[δ_i, δ_j] = p_h R^h_kij ∂^k`.
pub fn bracket_analytic(base: &SpaceForm, pt: &PhasePoint, i: usize, j: usize, kind: BracketKind) -> Result<AdaptedVector> {
    check_dims(base, pt)?;
    let n = base.dim();
    let mut out = Vector::zeros(2 * n);
    match kind {
        BracketKind::VerticalVertical => {}
        BracketKind::VerticalHorizontal => {
            let gamma = base.christoffel_at(&pt.q)?;
            for k in 0..n {
                out[n + k] = gamma[(i, j, k)];
            }
        }
        BracketKind::HorizontalHorizontal => {
            let r = base.riemann_at(&pt.q)?;
            for k in 0..n {
                out[n + k] = (0..n).map(|h| pt.p[h] * r[(h, k, i, j)]).sum();
            }
        }
    }
    Ok(AdaptedVector(out))
}

/// `[X, Y]^k = X^l ∂_l Y^k - Y^l ∂_l X^k` by central differences.
pub fn bracket_fd_oracle(x_field: &Field<'_>, y_field: &Field<'_>, x: &[f64], h: f64) -> Result<CoordVector> {
    fd::check_step(h)?;
    let xv = x_field(x)?;
    let yv = y_field(x)?;
    let dy = fd::directional(y_field, x, &xv, h)?;
    let dx = fd::directional(x_field, x, &yv, h)?;
    Ok(CoordVector(Vector::from_iterator(dy.len(), dy.iter().zip(&dx).map(|(a, b)| a - b))))
}

/// The horizontal lift `δ_i` as a field.
pub fn horizontal_field(base: &SpaceForm, i: usize) -> impl Fn(&[f64]) -> Result<Vec<f64>> + '_ {
    move |x: &[f64]| {
        let n = base.dim();
        let gamma = base.christoffel_at(&x[..n])?;
        let mut v = alloc::vec![0.0; 2 * n];
        v[i] = 1.0;
        for h in 0..n {
            v[n + h] = (0..n).map(|k| x[n + k] * gamma[(k, i, h)]).sum();
        }
        Ok(v)
    }
}

/// The vertical field `∂^i = ∂/∂p_i`.
pub fn vertical_field(n: usize, i: usize) -> impl Fn(&[f64]) -> Result<Vec<f64>> {
    move |_x: &[f64]| {
        let mut v = alloc::vec![0.0; 2 * n];
        v[n + i] = 1.0;
        Ok(v)
    }
}

/// Adapted basis field `e_a`: `δ_a` for `a < n`, `∂^{a-n}` otherwise.
pub fn adapted_field(base: &SpaceForm, a: usize) -> Box<Field<'_>> {
    let n = base.dim();
    if a < n {
        Box::new(horizontal_field(base, a))
    } else {
        Box::new(vertical_field(n, a - n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pt3() -> PhasePoint {
        PhasePoint::new(vec![0.3, -0.2, 0.4], vec![0.5, 0.1, -0.3]).unwrap()
    }

    #[test]
    fn frame_change_identity_cases() {
        let sf = SpaceForm::new(3, -1.0).unwrap();
        let origin = PhasePoint::new(vec![0.0; 3], vec![0.5, 0.1, -0.3]).unwrap();
        assert_eq!(frame_change_at(&sf, &origin).unwrap().b, Matrix::identity(6, 6));
        let zero_p = PhasePoint::new(vec![0.3, -0.2, 0.4], vec![0.0; 3]).unwrap();
        assert_eq!(frame_change_at(&sf, &zero_p).unwrap().b, Matrix::identity(6, 6));
        let flat = SpaceForm::new(3, 0.0).unwrap();
        assert_eq!(frame_change_at(&flat, &pt3()).unwrap().b, Matrix::identity(6, 6));
    }

    #[test]
    fn frame_change_inverse_is_block_negation() {
        let sf = SpaceForm::new(3, 1.0).unwrap();
        let fc = frame_change_at(&sf, &pt3()).unwrap();
        let num = fc.b.clone().try_inverse().unwrap();
        assert!((num - fc.inverse()).abs().max() < 1e-12);
        assert_eq!(&fc.b * fc.inverse(), Matrix::identity(6, 6));
        assert!((&fc.gamma0 - fc.gamma0.transpose()).abs().max() == 0.0);
    }

    #[test]
    fn textbook_brackets() {
        let cx = |_: &[f64]| -> Result<Vec<f64>> { Ok(vec![1.0, 0.0]) };
        let cy = |_: &[f64]| -> Result<Vec<f64>> { Ok(vec![0.0, 1.0]) };
        let r = bracket_fd_oracle(&cx, &cy, &[0.3, 0.7], 1e-5).unwrap();
        assert_eq!(r.0.abs().max(), 0.0);
        let y = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![0.0, x[0]]) };
        let r = bracket_fd_oracle(&cx, &y, &[0.3, 0.7], 1e-5).unwrap();
        assert!((r.0[1] - 1.0).abs() < 1e-9 && r.0[0].abs() < 1e-12);
    }

    #[test]
    fn jacobi_identity_on_polynomial_fields() {
        let a = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![x[1] * x[1], x[0] * x[2], 1.0]) };
        let b = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![x[2], x[0] * x[0] * x[1], x[1] - x[0]]) };
        let c = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![x[0] * x[1] * x[2], 2.0, x[0]]) };
        let h = 1e-4;
        let bc = |x: &[f64]| -> Result<Vec<f64>> { Ok(bracket_fd_oracle(&b, &c, x, h)?.0.as_slice().to_vec()) };
        let ca = |x: &[f64]| -> Result<Vec<f64>> { Ok(bracket_fd_oracle(&c, &a, x, h)?.0.as_slice().to_vec()) };
        let ab = |x: &[f64]| -> Result<Vec<f64>> { Ok(bracket_fd_oracle(&a, &b, x, h)?.0.as_slice().to_vec()) };
        let x = [0.4, -0.3, 0.8];
        let s = bracket_fd_oracle(&a, &bc, &x, 1e-3).unwrap().0
            + bracket_fd_oracle(&b, &ca, &x, 1e-3).unwrap().0
            + bracket_fd_oracle(&c, &ab, &x, 1e-3).unwrap().0;
        assert!(s.abs().max() < 1e-3, "{}", s.abs().max());
    }

    #[test]
    fn analytic_brackets_match_oracle_and_pin_the_curvature_layout() {
        for (n, c) in [(2, -1.0), (3, 1.0), (3, -1.0)] {
            let sf = SpaceForm::new(n, c).unwrap();
            let pt = PhasePoint::new((0..n).map(|i| 0.3 - 0.2 * i as f64).collect(), (0..n).map(|i| 0.6 - 0.5 * i as f64).collect()).unwrap();
            let x = pt.coords();
            let fc = frame_change_at(&sf, &pt).unwrap();
            let mut rr_scale = 0.0f64;
            let mut flipped = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let cases = [
                        (BracketKind::VerticalVertical, n + i, n + j),
                        (BracketKind::VerticalHorizontal, n + i, j),
                        (BracketKind::HorizontalHorizontal, i, j),
                    ];
                    for (kind, a, b) in cases {
                        let ea = adapted_field(&sf, a);
                        let eb = adapted_field(&sf, b);
                        let fd = fc.to_adapted(&bracket_fd_oracle(&*ea, &*eb, &x, 1e-5).unwrap());
                        let an = bracket_analytic(&sf, &pt, i, j, kind).unwrap();
                        assert!((&fd.0 - &an.0).abs().max() < 1e-4, "{kind:?} {i} {j}");
                        if kind == BracketKind::HorizontalHorizontal {
                            rr_scale = rr_scale.max(an.0.abs().max());
                            flipped = flipped.max((&fd.0 + &an.0).abs().max());
                        }
                    }
                }
            }
            // the opposite sign convention is far off
            assert!(rr_scale > 1e-2 && flipped > 1e-2);
        }
    }
}
