//! Triangular filter bank on warped-uniform break points.

use ndarray::Array2;

use super::scale::{scale_forward, scale_inverse};
use crate::error::{Error, Result};

/// `M` triangular filters over non-negative bins `0..=f_max`.
///
/// `break_points` holds `p_0 = 0, p_1, ..., p_{M+1} = f_max` in (fractional)
/// bins; row `m - 1` of `weights` is filter `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    break_points: Vec<f64>,
    weights: Array2<f64>,
    f_c: f64,
    f_max: usize,
}

impl FilterBank {
    pub fn break_points(&self) -> &[f64] {
        &self.break_points
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn num_filters(&self) -> usize {
        self.weights.nrows()
    }

    pub fn f_c(&self) -> f64 {
        self.f_c
    }

    pub fn f_max(&self) -> usize {
        self.f_max
    }

    /// Weight of filter `m` (1-based) at bin `f`.
    pub fn weight(&self, m: usize, f: usize) -> f64 {
        self.weights[[m - 1, f]]
    }
}

/// Piecewise-linear triangle rising on `[lo, peak]` and falling on `(peak, hi]`.
pub fn triangle(lo: f64, peak: f64, hi: f64, f: f64) -> f64 {
    if lo <= f && f <= peak {
        (f - lo) / (peak - lo)
    } else if peak < f && f <= hi {
        (hi - f) / (hi - peak)
    } else {
        0.0
    }
}

pub fn build_filter_bank(f_c: f64, f_max: usize, num_filters: usize) -> Result<FilterBank> {
    if num_filters < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 filters, got {num_filters}"
        )));
    }
    if f_max == 0 {
        return Err(Error::InvalidParameter(
            "f_max must be at least one bin".into(),
        ));
    }
    let top = scale_forward(f_max as f64, f_c)?;
    let steps = (num_filters + 1) as f64;
    let mut p = (0..=num_filters + 1)
        .map(|m| scale_inverse(m as f64 * top / steps, f_c))
        .collect::<Result<Vec<_>>>()?;
    p[0] = 0.0;
    p[num_filters + 1] = f_max as f64;
    // more break points than integer bins, or break points equal in f64
    let too_many = num_filters + 2 > f_max + 1;
    let collision = (0..=num_filters)
        .find(|&m| !(p[m + 1] > p[m]) || (too_many && p[m + 1].round() == p[m].round()));
    if let Some(m) = collision.or(too_many.then_some(0)) {
        return Err(Error::CollapsedBreakPoints {
            lower: m,
            upper: m + 1,
            value: p[m],
        });
    }
    let weights = Array2::from_shape_fn((num_filters, f_max + 1), |(row, f)| {
        let m = row + 1;
        triangle(p[m - 1], p[m], p[m + 1], f as f64)
    });
    Ok(FilterBank {
        break_points: p,
        weights,
        f_c,
        f_max,
    })
}
