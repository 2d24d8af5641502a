//! Radar acquisition parameters, raw cubes and the processing configuration.

use std::path::Path;

use num_complex::Complex32;

use crate::error::{Error, Result};
use crate::kv::KvFile;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarParams {
    pub num_fast_samples: usize,
    pub num_chirps: usize,
    /// Fast-time sampling rate, Hz.
    pub sample_rate: f64,
    /// Slow-time sampling rate (PRF), Hz.
    pub chirp_repetition_freq: f64,
    pub center_freq: f64,
    pub bandwidth: f64,
}

impl Default for RadarParams {
    /// A 77 GHz, 1.5 GHz sweep with 128 samples per chirp and a 4 kHz PRF;
    /// about 2 s of slow time.
    fn default() -> Self {
        Self {
            num_fast_samples: 128,
            num_chirps: 8192,
            sample_rate: 2.0e6,
            chirp_repetition_freq: 4000.0,
            center_freq: 77.0e9,
            bandwidth: 1.5e9,
        }
    }
}

impl RadarParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_fast_samples == 0 || self.num_chirps == 0 {
            return Err(Error::InvalidParameter(
                "num_fast_samples and num_chirps must be positive".into(),
            ));
        }
        for (name, v) in [
            ("sample_rate", self.sample_rate),
            ("chirp_repetition_freq", self.chirp_repetition_freq),
            ("center_freq", self.center_freq),
            ("bandwidth", self.bandwidth),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        if self.chirp_repetition_freq > self.sample_rate {
            return Err(Error::InvalidParameter(format!(
                "chirp_repetition_freq {} exceeds sample_rate {}",
                self.chirp_repetition_freq, self.sample_rate
            )));
        }
        Ok(())
    }

    /// Maximum unambiguous Doppler, PRF/2.
    pub fn max_doppler(&self) -> f64 {
        self.chirp_repetition_freq / 2.0
    }

    /// Sampled chirp duration; the whole sweep is assumed to be sampled.
    pub fn chirp_duration(&self) -> f64 {
        self.num_fast_samples as f64 / self.sample_rate
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.center_freq
    }

    /// Meters per range bin of the fast-time DFT.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth)
    }

    pub(crate) fn from_kv(kv: &KvFile) -> Result<Self> {
        let p = Self {
            num_fast_samples: kv.require_parsed("num_fast_samples")?,
            num_chirps: kv.require_parsed("num_chirps")?,
            sample_rate: kv.require_parsed("sample_rate")?,
            chirp_repetition_freq: kv.require_parsed("chirp_repetition_freq")?,
            center_freq: kv.require_parsed("center_freq")?,
            bandwidth: kv.require_parsed("bandwidth")?,
        };
        p.validate()
            .map_err(|e| Error::metadata(kv.origin(), e.to_string()))?;
        Ok(p)
    }

    pub(crate) fn write_kv(&self, kv: &mut KvFile) {
        use crate::io::fmt_g17;
        kv.push("num_fast_samples", self.num_fast_samples)
            .push("num_chirps", self.num_chirps)
            .push("sample_rate", fmt_g17(self.sample_rate))
            .push("chirp_repetition_freq", fmt_g17(self.chirp_repetition_freq))
            .push("center_freq", fmt_g17(self.center_freq))
            .push("bandwidth", fmt_g17(self.bandwidth));
    }
}

/// Raw dechirped samples, `num_fast_samples × num_chirps`.
///
/// Samples are stored column by column: the fast-time samples of chirp 0,
/// then chirp 1, and so on, matching the on-disk payload.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarCube {
    params: RadarParams,
    samples: Vec<Complex32>,
}

impl RadarCube {
    pub fn new(params: RadarParams, samples: Vec<Complex32>) -> Result<Self> {
        params.validate()?;
        let expected = params.num_fast_samples * params.num_chirps;
        if samples.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "cube declares {}×{} = {expected} samples, got {}",
                params.num_fast_samples,
                params.num_chirps,
                samples.len()
            )));
        }
        if let Some(i) = samples
            .iter()
            .position(|s| !(s.re.is_finite() && s.im.is_finite()))
        {
            return Err(Error::NonFinite(format!(
                "fast sample {}, chirp {}",
                i % params.num_fast_samples,
                i / params.num_fast_samples
            )));
        }
        Ok(Self { params, samples })
    }

    pub fn params(&self) -> &RadarParams {
        &self.params
    }

    pub fn samples(&self) -> &[Complex32] {
        &self.samples
    }

    pub fn chirp(&self, n: usize) -> &[Complex32] {
        let len = self.params.num_fast_samples;
        &self.samples[n * len..(n + 1) * len]
    }

    pub fn get(&self, fast: usize, chirp: usize) -> Complex32 {
        self.samples[chirp * self.params.num_fast_samples + fast]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowKind {
    #[default]
    Hann,
    Hamming,
    Rect,
}

impl WindowKind {
    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Hann => "hann",
            WindowKind::Hamming => "hamming",
            WindowKind::Rect => "rect",
        }
    }

    /// Periodic (DFT-even) window of length `len`.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        use std::f64::consts::PI;
        let n = len as f64;
        (0..len)
            .map(|i| {
                let phase = 2.0 * PI * i as f64 / n;
                match self {
                    WindowKind::Hann => 0.5 - 0.5 * phase.cos(),
                    WindowKind::Hamming => 0.54 - 0.46 * phase.cos(),
                    WindowKind::Rect => 1.0,
                }
            })
            .collect()
    }
}

impl std::str::FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hann" | "hanning" => Ok(WindowKind::Hann),
            "hamming" => Ok(WindowKind::Hamming),
            "rect" | "rectangular" | "boxcar" => Ok(WindowKind::Rect),
            other => Err(Error::InvalidParameter(format!("unknown window `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub range_bin_start: usize,
    /// Inclusive; `None` runs through the last range bin.
    pub range_bin_end: Option<usize>,
    pub window_kind: WindowKind,
    pub window_length: usize,
    pub hop: usize,
    pub fft_length: usize,
    /// High-pass clutter filter cutoff, Hz.
    pub notch_cutoff: f64,
    pub notch_order: usize,
    pub num_filters: usize,
    /// Relative floor applied before every logarithm.
    pub log_floor: f64,
    /// Keep complex range profiles; `false` falls back to magnitudes.
    pub coherent: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            range_bin_start: 0,
            range_bin_end: None,
            window_kind: WindowKind::Hann,
            window_length: 128,
            hop: 16,
            fft_length: 256,
            notch_cutoff: 0.01,
            notch_order: 4,
            num_filters: 64,
            log_floor: 1e-12,
            coherent: true,
        }
    }
}

impl PipelineConfig {
    /// Checks everything that does not depend on the data.
    pub fn validate(&self) -> Result<()> {
        if let Some(end) = self.range_bin_end {
            if end < self.range_bin_start {
                return Err(Error::InvalidParameter(format!(
                    "range_bin_end {end} < range_bin_start {}",
                    self.range_bin_start
                )));
            }
        }
        if !(1 <= self.hop
            && self.hop <= self.window_length
            && self.window_length <= self.fft_length)
        {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= hop ({}) <= window_length ({}) <= fft_length ({})",
                self.hop, self.window_length, self.fft_length
            )));
        }
        if !self.fft_length.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "fft_length must be even, got {}",
                self.fft_length
            )));
        }
        if self.num_filters < 2 {
            return Err(Error::InvalidParameter(format!(
                "num_filters must be >= 2, got {}",
                self.num_filters
            )));
        }
        if !(self.log_floor > 0.0 && self.log_floor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "log_floor must be positive, got {}",
                self.log_floor
            )));
        }
        if !(self.notch_cutoff > 0.0 && self.notch_cutoff.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "notch_cutoff must be positive, got {}",
                self.notch_cutoff
            )));
        }
        if self.notch_order < 2 || !self.notch_order.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "notch_order must be even and >= 2, got {}",
                self.notch_order
            )));
        }
        Ok(())
    }

    /// Resolves the inclusive range-bin interval against an actual bin count.
    pub fn range_bins(&self, num_range_bins: usize) -> Result<(usize, usize)> {
        let end = self
            .range_bin_end
            .unwrap_or(num_range_bins.saturating_sub(1));
        if num_range_bins == 0 || self.range_bin_start > end || end >= num_range_bins {
            return Err(Error::InvalidParameter(format!(
                "range bins {}..={end} outside 0..{num_range_bins}",
                self.range_bin_start
            )));
        }
        Ok((self.range_bin_start, end))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let kv = KvFile::read(path)?;
        Self::from_kv(&kv)
    }

    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let d = Self::default();
        let range_bin_end = match kv.get("range_bin_end") {
            None | Some("last") => None,
            Some(_) => Some(kv.require_parsed("range_bin_end")?),
        };
        let window_kind = match kv.get("window_kind") {
            None => d.window_kind,
            Some(s) => s
                .parse()
                .map_err(|e: Error| Error::metadata(kv.origin(), e.to_string()))?,
        };
        let cfg = Self {
            range_bin_start: kv.parsed_or("range_bin_start", d.range_bin_start)?,
            range_bin_end,
            window_kind,
            window_length: kv.parsed_or("window_length", d.window_length)?,
            hop: kv.parsed_or("hop", d.hop)?,
            fft_length: kv.parsed_or("fft_length", d.fft_length)?,
            notch_cutoff: kv.parsed_or("notch_cutoff", d.notch_cutoff)?,
            notch_order: kv.parsed_or("notch_order", d.notch_order)?,
            num_filters: kv.parsed_or("num_filters", d.num_filters)?,
            log_floor: kv.parsed_or("log_floor", d.log_floor)?,
            coherent: kv.parsed_or("coherent", d.coherent)?,
        };
        cfg.validate()
            .map_err(|e| Error::metadata(kv.origin(), e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_kv(&self) -> KvFile {
        use crate::io::fmt_g17;
        let mut kv = KvFile::new();
        kv.push("range_bin_start", self.range_bin_start)
            .push(
                "range_bin_end",
                self.range_bin_end
                    .map_or_else(|| "last".to_string(), |e| e.to_string()),
            )
            .push("window_kind", self.window_kind.name())
            .push("window_length", self.window_length)
            .push("hop", self.hop)
            .push("fft_length", self.fft_length)
            .push("notch_cutoff", fmt_g17(self.notch_cutoff))
            .push("notch_order", self.notch_order)
            .push("num_filters", self.num_filters)
            .push("log_floor", fmt_g17(self.log_floor))
            .push("coherent", self.coherent);
        kv
    }
}
