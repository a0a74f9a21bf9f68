//! Central finite differences used by the verification oracles.
//!
//! Nothing in the analytic evaluation path calls into this module.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default base step; scaled by `1 + |x|` per coordinate.
pub const DEFAULT_STEP: f64 = 1e-5;

pub fn scaled_step(h: f64, x: f64) -> f64 {
    h * (1.0 + x.abs())
}

pub(crate) fn check_step(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Step { step: h, reason: "step must be positive and finite" });
    }
    if h > 1e-1 {
        return Err(Error::Step { step: h, reason: "step exceeds the oracle's validity range" });
    }
    Ok(())
}

/// `(f(x + h e_k) - f(x - h e_k)) / 2h` for every output component.
pub fn partial<F>(f: &F, x: &[f64], k: usize, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + ?Sized,
{
    let hk = scaled_step(h, x[k]);
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[k] += hk;
    xm[k] -= hk;
    let fp = f(&xp)?;
    let fm = f(&xm)?;
    Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * hk)).collect())
}

/// Derivative of `f` along the direction `v` at `x`, step measured along the unit direction.
pub fn directional<F>(f: &F, x: &[f64], v: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + ?Sized,
{
    let norm = libm::sqrt(v.iter().map(|a| a * a).sum::<f64>());
    if norm == 0.0 {
        let len = f(x)?.len();
        return Ok(alloc::vec![0.0; len]);
    }
    let scale = 1.0 + x.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let step = h * scale;
    let xp: Vec<f64> = x.iter().zip(v).map(|(a, d)| a + step * d / norm).collect();
    let xm: Vec<f64> = x.iter().zip(v).map(|(a, d)| a - step * d / norm).collect();
    let fp = f(&xp)?;
    let fm = f(&xm)?;
    Ok(fp
        .iter()
        .zip(&fm)
        .map(|(a, b)| norm * (a - b) / (2.0 * step))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn partial_of_polynomial() {
        let f = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![x[0] * x[0] * x[1], x[1]]) };
        let d = partial(&f, &[1.5, 2.0], 0, DEFAULT_STEP).unwrap();
        assert!((d[0] - 6.0).abs() < 1e-8);
        assert!(d[1].abs() < 1e-12);
    }

    #[test]
    fn directional_matches_gradient() {
        let f = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![libm::sin(x[0]) * x[1]]) };
        let x = [0.3, -0.7];
        let v = [2.0, 0.5];
        let d = directional(&f, &x, &v, DEFAULT_STEP).unwrap();
        let exact = 2.0 * libm::cos(0.3) * -0.7 + 0.5 * libm::sin(0.3);
        assert!((d[0] - exact).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(check_step(0.0).is_err());
        assert!(check_step(f64::NAN).is_err());
        assert!(check_step(0.5).is_err());
        assert!(check_step(1e-5).is_ok());
    }
}
