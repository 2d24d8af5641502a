//! Dominant-signature tracking: per-frame peak picking smoothed by a
//! constant-velocity Kalman filter.

use ndarray::Array2;

use crate::error::{Error, Result};

pub const DEFAULT_PROCESS_NOISE: f64 = 10.0;
pub const DEFAULT_MEASUREMENT_NOISE: f64 = 4.0;
const PRIOR_SCALE: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct SignatureTrack {
    pub raw_peaks: Vec<f64>,
    pub smoothed: Vec<f64>,
    pub frame_times: Vec<f64>,
}

/// Axis value of each row's maximum; ties go to the bin closest to zero on
/// the axis (then the lower index).
pub fn peak_track(power: &Array2<f64>, axis: &[f64]) -> Result<Vec<f64>> {
    let (frames, bins) = power.dim();
    if frames == 0 || bins == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if axis.len() != bins {
        return Err(Error::DimensionMismatch(format!(
            "axis has {} entries for {bins} columns",
            axis.len()
        )));
    }
    Ok(power
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for k in 1..bins {
                let (v, b) = (row[k], row[best]);
                if v > b || (v == b && axis[k].abs() < axis[best].abs()) {
                    best = k;
                }
            }
            axis[best]
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanParams {
    /// Frame interval, seconds.
    pub dt: f64,
    /// White-acceleration spectral density, axis-units²/s³.
    pub q: f64,
    /// Measurement variance, axis-units².
    pub r: f64,
}

/// Forward constant-velocity Kalman filter over the raw peak sequence.
///
/// State is `[frequency, frequency rate]`, started at `[raw[0], 0]` with
/// covariance `1e6·r·I`.
pub fn kalman_smooth(raw: &[f64], params: KalmanParams) -> Result<Vec<f64>> {
    let KalmanParams { dt, q, r } = params;
    if raw.is_empty() {
        return Err(Error::InvalidParameter("nothing to smooth".into()));
    }
    for (name, v) in [("dt", dt), ("q", q), ("r", r)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be > 0, got {v}"
            )));
        }
    }
    let q11 = q * dt.powi(3) / 3.0;
    let q12 = q * dt.powi(2) / 2.0;
    let q22 = q * dt;

    let mut x = [raw[0], 0.0];
    let mut p = [[PRIOR_SCALE * r, 0.0], [0.0, PRIOR_SCALE * r]];
    let mut out = Vec::with_capacity(raw.len());
    for (i, &z) in raw.iter().enumerate() {
        if i > 0 {
            // predict: x = F x, P = F P Fᵀ + Q with F = [[1, dt], [0, 1]]
            x = [x[0] + dt * x[1], x[1]];
            let p00 = p[0][0] + dt * (p[1][0] + p[0][1]) + dt * dt * p[1][1] + q11;
            let p01 = p[0][1] + dt * p[1][1] + q12;
            let p11 = p[1][1] + q22;
            p = [[p00, p01], [p01, p11]];
        }
        let s = p[0][0] + r;
        if !(s > 0.0) {
            return Err(Error::Internal(format!(
                "innovation covariance {s} at frame {i}"
            )));
        }
        let k = [p[0][0] / s, p[1][0] / s];
        let innov = z - x[0];
        x = [x[0] + k[0] * innov, x[1] + k[1] * innov];
        let p00 = (1.0 - k[0]) * p[0][0];
        let p01 = (1.0 - k[0]) * p[0][1];
        let p11 = p[1][1] - k[1] * p[0][1];
        p = [[p00, p01], [p01, p11]];
        out.push(x[0]);
    }
    Ok(out)
}

/// Peak track plus smoothing, with smoothed values clamped to the axis span.
pub fn track(
    power: &Array2<f64>,
    axis: &[f64],
    frame_times: &[f64],
    q: f64,
    r: f64,
) -> Result<SignatureTrack> {
    if frame_times.len() != power.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} frame times for {} frames",
            frame_times.len(),
            power.nrows()
        )));
    }
    let raw_peaks = peak_track(power, axis)?;
    let dt = if frame_times.len() > 1 {
        frame_times[1] - frame_times[0]
    } else {
        1.0
    };
    let lo = axis.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = axis.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let smoothed = kalman_smooth(&raw_peaks, KalmanParams { dt, q, r })?
        .into_iter()
        .map(|v| v.clamp(lo, hi))
        .collect();
    Ok(SignatureTrack {
        raw_peaks,
        smoothed,
        frame_times: frame_times.to_vec(),
    })
}
