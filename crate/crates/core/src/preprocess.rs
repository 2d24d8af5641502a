//! Range FFT and slow-time clutter filtering: raw cube to x(r, n).

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::config::{PipelineConfig, RadarCube};
use crate::error::{Error, Result};
use crate::iir::SosFilter;
use crate::par;

/// Complex range profiles, `num_range_bins × num_chirps`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfileMatrix {
    pub values: Array2<Complex64>,
    /// Meters per range bin.
    pub range_resolution: f64,
    pub chirp_repetition_freq: f64,
}

impl RangeProfileMatrix {
    pub fn num_range_bins(&self) -> usize {
        self.values.nrows()
    }

    pub fn num_chirps(&self) -> usize {
        self.values.ncols()
    }

    /// Replaces every sample with its magnitude (non-coherent fallback).
    pub fn to_magnitude(&self) -> Self {
        Self {
            values: self.values.mapv(|z| Complex64::new(z.norm(), 0.0)),
            ..self.clone()
        }
    }
}

/// Full-length fast-time DFT of chirp `n`, without windowing.
pub fn chirp_spectrum(cube: &RadarCube, n: usize) -> Vec<Complex64> {
    let len = cube.params().num_fast_samples;
    let fft = FftPlanner::new().plan_fft_forward(len);
    let mut buf: Vec<Complex64> = cube
        .chirp(n)
        .iter()
        .map(|s| Complex64::new(s.re as f64, s.im as f64))
        .collect();
    fft.process(&mut buf);
    buf
}

/// Per-chirp fast-time DFT, keeping the positive-range half (bins 0..N/2).
pub fn range_transform(cube: &RadarCube) -> RangeProfileMatrix {
    let params = cube.params();
    let len = params.num_fast_samples;
    let bins = len / 2;
    let chirps = params.num_chirps;
    let fft = FftPlanner::new().plan_fft_forward(len);
    let columns = par::map_range(chirps, |n| {
        let mut buf: Vec<Complex64> = cube
            .chirp(n)
            .iter()
            .map(|s| Complex64::new(s.re as f64, s.im as f64))
            .collect();
        fft.process(&mut buf);
        buf.truncate(bins);
        buf
    });
    let mut values = Array2::zeros((bins, chirps));
    for (n, col) in columns.into_iter().enumerate() {
        for (r, v) in col.into_iter().enumerate() {
            values[[r, n]] = v;
        }
    }
    RangeProfileMatrix {
        values,
        range_resolution: params.range_resolution(),
        chirp_repetition_freq: params.chirp_repetition_freq,
    }
}

/// Butterworth high-pass along slow time, applied to every range bin.
///
/// Runs forward in slow time. Each row's filter starts in the steady state
/// for a constant input equal to the row mean, so a chirp-invariant offset
/// produces no transient and the row mean is what gets rejected.
pub fn clutter_filter(
    profiles: &RangeProfileMatrix,
    cutoff: f64,
    order: usize,
) -> Result<RangeProfileMatrix> {
    let filter = SosFilter::butterworth_highpass(order, cutoff, profiles.chirp_repetition_freq)?;
    let chirps = profiles.num_chirps();
    let mut out = Array2::zeros(profiles.values.raw_dim());
    if chirps == 0 {
        return Ok(RangeProfileMatrix {
            values: out,
            ..profiles.clone()
        });
    }
    {
        let slice = out
            .as_slice_mut()
            .ok_or_else(|| Error::Internal("non-contiguous output".into()))?;
        par::for_each_chunk_mut(slice, chirps, |r, row| {
            let input: Vec<Complex64> = profiles.values.row(r).to_vec();
            let mean = input.iter().sum::<Complex64>() / input.len() as f64;
            row.copy_from_slice(&filter.filter_steady(&input, mean));
        });
    }
    Ok(RangeProfileMatrix {
        values: out,
        ..profiles.clone()
    })
}

/// Range transform, optional magnitude fallback, then clutter filter.
pub fn preprocess(cube: &RadarCube, cfg: &PipelineConfig) -> Result<RangeProfileMatrix> {
    cfg.validate()?;
    let mut profiles = range_transform(cube);
    if !cfg.coherent {
        profiles = profiles.to_magnitude();
    }
    clutter_filter(&profiles, cfg.notch_cutoff, cfg.notch_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RadarParams;
    use num_complex::Complex32;
    use std::f64::consts::PI;

    fn cube_from(n_fast: usize, chirps: usize, f: impl Fn(usize, usize) -> Complex32) -> RadarCube {
        let params = RadarParams {
            num_fast_samples: n_fast,
            num_chirps: chirps,
            ..RadarParams::default()
        };
        let samples = (0..chirps)
            .flat_map(|n| (0..n_fast).map(move |i| (i, n)))
            .map(|(i, n)| f(i, n))
            .collect();
        RadarCube::new(params, samples).unwrap()
    }

    fn profiles_from_rows(rows: Vec<Vec<Complex64>>, prf: f64) -> RangeProfileMatrix {
        let (r, c) = (rows.len(), rows[0].len());
        let flat = rows.into_iter().flatten().collect();
        RangeProfileMatrix {
            values: Array2::from_shape_vec((r, c), flat).unwrap(),
            range_resolution: 0.1,
            chirp_repetition_freq: prf,
        }
    }

    #[test]
    fn constant_chirp_lands_in_bin_zero() {
        let cube = cube_from(8, 3, |_, _| Complex32::new(1.0, 0.0));
        let x = range_transform(&cube);
        assert_eq!(x.num_range_bins(), 4);
        for n in 0..3 {
            assert!((x.values[[0, n]].norm() - 8.0).abs() < 1e-12);
            for r in 1..4 {
                assert!(x.values[[r, n]].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn tone_peaks_at_its_bin() {
        let n_fast = 16;
        let cube = cube_from(n_fast, 2, |i, _| {
            let ph = 2.0 * PI * 3.0 * i as f64 / n_fast as f64;
            Complex32::new(ph.cos() as f32, ph.sin() as f32)
        });
        let x = range_transform(&cube);
        let col: Vec<f64> = x.values.column(1).iter().map(|z| z.norm()).collect();
        let argmax = col
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(argmax, 3);
    }

    #[test]
    fn parseval_on_full_spectrum() {
        let cube = cube_from(32, 4, |i, n| {
            Complex32::new(
                ((i * 7 + n * 3) % 11) as f32 - 5.0,
                ((i * 5 + n) % 7) as f32 * 0.3,
            )
        });
        for n in 0..4 {
            let time: f64 = cube
                .chirp(n)
                .iter()
                .map(|s| (s.re as f64).powi(2) + (s.im as f64).powi(2))
                .sum();
            let freq: f64 = chirp_spectrum(&cube, n).iter().map(|z| z.norm_sqr()).sum();
            assert!((freq - 32.0 * time).abs() <= 1e-9 * freq);
        }
    }

    #[test]
    fn dc_row_is_removed() {
        let prf = 4000.0;
        let p = profiles_from_rows(vec![vec![Complex64::new(2.0, 1.0); 400]], prf);
        let y = clutter_filter(&p, 0.01, 4).unwrap();
        let input = 5f64.sqrt();
        for v in y.values.row(0).iter().skip(40) {
            assert!(v.norm() < 1e-6 * input);
        }
    }

    #[test]
    fn quarter_rate_tone_passes() {
        // steady-state gain at PRF/4 from the designed transfer function
        let prf = 1000.0;
        let f = SosFilter::butterworth_highpass(4, 0.01, prf).unwrap();
        let gain = f.response(prf / 4.0, prf).norm();
        assert!((gain - 1.0).abs() < 0.01);
        let n = 4000;
        let row: Vec<Complex64> = (0..n)
            .map(|i| Complex64::from_polar(1.0, 2.0 * PI * 0.25 * i as f64))
            .collect();
        let y = clutter_filter(&profiles_from_rows(vec![row], prf), 0.01, 4).unwrap();
        let tail: Vec<f64> = y
            .values
            .row(0)
            .iter()
            .skip(n / 2)
            .map(|z| z.norm())
            .collect();
        assert!(tail.iter().all(|a| (a - 1.0).abs() < 0.01));
    }

    #[test]
    fn impulse_response_decays() {
        let (order, cutoff, fs) = (4usize, 0.01, 4.0);
        let f = SosFilter::butterworth_highpass(order, cutoff, fs).unwrap();
        let len = (10.0 * order as f64 * fs / cutoff) as usize;
        let mut x = vec![Complex64::default(); len];
        x[0] = Complex64::new(1.0, 0.0);
        let h = f.filter_from_rest(&x);
        assert!(h.iter().all(|v| v.re.is_finite()));
        let tail = h[len - 100..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(tail < 1e-9, "tail {tail}");
        let l1: f64 = h.iter().map(|v| v.norm()).sum();
        assert!(l1.is_finite() && l1 < 10.0);
    }

    #[test]
    fn bad_cutoff_and_order() {
        let p = profiles_from_rows(vec![vec![Complex64::default(); 8]], 100.0);
        assert!(clutter_filter(&p, 60.0, 4).is_err());
        assert!(clutter_filter(&p, 1.0, 5).is_err());
    }

    #[test]
    fn magnitude_fallback() {
        let p = profiles_from_rows(vec![vec![Complex64::new(3.0, 4.0); 2]], 100.0);
        assert_eq!(p.to_magnitude().values[[0, 1]], Complex64::new(5.0, 0.0));
    }
}
