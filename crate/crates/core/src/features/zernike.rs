//! Pseudo-Zernike moments of a binary patch over its inscribed unit disk.

use std::f64::consts::PI;

use nalgebra::Complex;

use super::patch::{Patch32, PATCH_SIDE};
use super::FeatureError;

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Pseudo-Zernike radial polynomial `R_{n,|m|}(rho)`.
pub fn radial_polynomial(n: usize, m: usize, rho: f64) -> f64 {
    debug_assert!(m <= n);
    (0..=n - m)
        .map(|s| {
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            let coef = factorial(2 * n + 1 - s) / (factorial(s) * factorial(n - m - s) * factorial(n + m + 1 - s));
            sign * coef * rho.powi((n - s) as i32)
        })
        .sum()
}

/// Complex moment `Z_nm = (n+1)/pi * sum f R_nm(rho) e^{-i m phi} dA` over
/// pixel centers inside the disk inscribed in the patch.
pub fn pseudo_zernike(patch: &Patch32, n: usize, m: i32) -> Result<Complex<f64>, FeatureError> {
    let am = m.unsigned_abs() as usize;
    if am > n {
        return Err(FeatureError::InvalidIndices { n, m });
    }
    let side = PATCH_SIDE as f64;
    let area = (2.0 / side) * (2.0 / side);
    let mut acc = Complex::new(0.0, 0.0);
    for y in 0..PATCH_SIDE {
        for x in 0..PATCH_SIDE {
            if !patch.get(x, y) {
                continue;
            }
            let u = (2 * x + 1) as f64 / side - 1.0;
            let v = (2 * y + 1) as f64 / side - 1.0;
            let rho = u.hypot(v);
            if rho > 1.0 {
                continue;
            }
            let phi = v.atan2(u);
            let r = radial_polynomial(n, am, rho);
            acc += Complex::from_polar(r, -(m as f64) * phi);
        }
    }
    Ok(acc * ((n as f64 + 1.0) / PI * area))
}
