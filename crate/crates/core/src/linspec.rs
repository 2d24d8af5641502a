//! Conventional STFT spectrogram over slow time.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::par;
use crate::preprocess::RangeProfileMatrix;

/// Power spectrogram, `num_frames × num_freq_bins`, frequency ascending from
/// `-f_max` (column 0) to `f_max - bin_hz` (last column).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub power: Array2<f64>,
    /// Signed Doppler frequency of each column, Hz.
    pub freq_axis: Vec<f64>,
    /// Window-center time of each frame, seconds.
    pub time_axis: Vec<f64>,
    /// Nyquist, PRF/2.
    pub f_max: f64,
}

impl Spectrogram {
    pub fn num_frames(&self) -> usize {
        self.power.nrows()
    }

    pub fn num_freq_bins(&self) -> usize {
        self.power.ncols()
    }

    /// Index of the Nyquist bin on the signed axis (also the column of 0 Hz).
    pub fn f_max_bin(&self) -> usize {
        self.num_freq_bins() / 2
    }

    pub fn bin_hz(&self) -> f64 {
        2.0 * self.f_max / self.num_freq_bins() as f64
    }

    /// Column for signed bin `k`, `-F/2 <= k <= F/2`. `+F/2` aliases onto
    /// `-F/2`, the shared Nyquist bin.
    pub fn column_of(&self, k: i64) -> usize {
        let f = self.num_freq_bins() as i64;
        (k + f / 2).rem_euclid(f) as usize
    }

    /// Frame spacing in seconds (1.0 for single-frame spectrograms).
    pub fn frame_step(&self) -> f64 {
        if self.time_axis.len() > 1 {
            self.time_axis[1] - self.time_axis[0]
        } else {
            1.0
        }
    }

    /// Builds the standard axes for a power matrix sampled at `prf`.
    pub fn from_power(
        power: Array2<f64>,
        prf: f64,
        hop: usize,
        window_length: usize,
    ) -> Result<Self> {
        let (frames, bins) = power.dim();
        if bins == 0 || bins % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "spectrogram needs an even, non-zero bin count, got {bins}"
            )));
        }
        if power.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter(
                "spectrogram power must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            power,
            freq_axis: freq_axis(bins, prf),
            time_axis: (0..frames)
                .map(|t| (t * hop) as f64 / prf + window_length as f64 / (2.0 * prf))
                .collect(),
            f_max: prf / 2.0,
        })
    }
}

/// Signed, fftshifted frequency axis: bin k maps to `(k - F/2) · prf / F`.
pub fn freq_axis(bins: usize, prf: f64) -> Vec<f64> {
    let half = (bins / 2) as f64;
    (0..bins)
        .map(|k| (k as f64 - half) * prf / bins as f64)
        .collect()
}

/// Coherent sum of range bins `start..=end` per chirp.
pub fn slow_time_signal(profiles: &RangeProfileMatrix, start: usize, end: usize) -> Vec<Complex64> {
    (0..profiles.num_chirps())
        .map(|n| (start..=end).map(|r| profiles.values[[r, n]]).sum())
        .collect()
}

pub fn stft_spectrogram(
    profiles: &RangeProfileMatrix,
    cfg: &PipelineConfig,
) -> Result<Spectrogram> {
    cfg.validate()?;
    let (start, end) = cfg.range_bins(profiles.num_range_bins())?;
    let signal = slow_time_signal(profiles, start, end);
    stft_signal(&signal, profiles.chirp_repetition_freq, cfg)
}

/// STFT power of a slow-time signal; frames are left-aligned at `t·hop`.
pub fn stft_signal(signal: &[Complex64], prf: f64, cfg: &PipelineConfig) -> Result<Spectrogram> {
    cfg.validate()?;
    let wlen = cfg.window_length;
    if signal.len() < wlen {
        return Err(Error::InvalidParameter(format!(
            "window length {wlen} exceeds signal length {}",
            signal.len()
        )));
    }
    let nfft = cfg.fft_length;
    let frames = (signal.len() - wlen) / cfg.hop + 1;
    let window = cfg.window_kind.coefficients(wlen);
    let fft = FftPlanner::new().plan_fft_forward(nfft);
    let half = nfft / 2;

    let mut power = Array2::<f64>::zeros((frames, nfft));
    {
        let slice = power
            .as_slice_mut()
            .ok_or_else(|| Error::Internal("non-contiguous spectrogram".into()))?;
        par::for_each_chunk_mut(slice, nfft, |t, row| {
            let start = t * cfg.hop;
            let mut buf = vec![Complex64::default(); nfft];
            for (i, (b, w)) in buf.iter_mut().zip(&window).enumerate() {
                *b = signal[start + i] * *w;
            }
            fft.process(&mut buf);
            // fftshift: negative frequencies first
            for (k, out) in row.iter_mut().enumerate() {
                *out = buf[(k + half) % nfft].norm_sqr();
            }
        });
    }
    Spectrogram::from_power(power, prf, cfg.hop, wlen)
}

/// Elementwise `log10(max(p, floor · max p))`.
pub fn log_view(spec: &Spectrogram, floor: f64) -> Result<Array2<f64>> {
    log_floored(&spec.power, floor)
}

pub(crate) fn log_floored(power: &Array2<f64>, floor: f64) -> Result<Array2<f64>> {
    if !(floor > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "log floor must be > 0, got {floor}"
        )));
    }
    let peak = power.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::DegenerateInput("spectrogram is all zero".into()));
    }
    let clamp = floor * peak;
    Ok(power.mapv(|p| p.max(clamp).log10()))
}
