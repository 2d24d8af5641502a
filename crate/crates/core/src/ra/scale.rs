//! Logarithmic frequency warp `S(f) = f_c / log(2) · log(1 + f / f_c)` and its
//! inverse `p = f_c · (10^z - 1)`, `z = log10(2) · P / f_c`.
//!
//! Both are written with `ln_1p` / `exp_m1`; the base of the logarithm cancels
//! in the ratio, so this is the base-10 pair evaluated without cancellation
//! near zero.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

fn check_corner(f_c: f64) -> Result<()> {
    if f_c > 0.0 && f_c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "corner frequency must be positive and finite, got {f_c}"
        )))
    }
}

pub fn scale_forward(f: f64, f_c: f64) -> Result<f64> {
    check_corner(f_c)?;
    if !(f >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "frequency must be >= 0, got {f}"
        )));
    }
    Ok(f_c * ((f / f_c).ln_1p() / LN_2))
}

pub fn scale_inverse(warped: f64, f_c: f64) -> Result<f64> {
    check_corner(f_c)?;
    if !(warped >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "warped frequency must be >= 0, got {warped}"
        )));
    }
    Ok(f_c * (warped / f_c * LN_2).exp_m1())
}
