//! Resolution-adaptive spectrogram.
//!
//! The spectrogram's log-energy profile locates the band holding the
//! micro-Doppler signature (corner frequency `f_c`); a logarithmic warp then
//! spreads `M` triangular filters so that the band below `f_c` is sampled
//! nearly linearly and densely, while the band above it is covered sparsely.
//! The same bank is applied to the positive and to the mirrored negative
//! half of the spectrum.

pub mod bank;
pub mod corner;
pub mod energy;
pub mod scale;

use ndarray::Array2;

pub use bank::{build_filter_bank, FilterBank};
pub use corner::{find_corners, CornerResult};
pub use energy::{energy_profile, log_ms, EnergyProfile};
pub use scale::{scale_forward, scale_inverse};

use crate::error::{Error, Result};
use crate::linspec::Spectrogram;
use crate::par;

/// Corners narrower than this are treated as a silent input.
pub const MIN_CORNER_BINS: f64 = 2.0;

/// Where the corner frequency came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Corner {
    Detected(CornerResult),
    /// Supplied by the caller (in bins, already clamped to `f_max`).
    Forced {
        f_c_bins: f64,
    },
}

impl Corner {
    pub fn f_c_bins(&self) -> f64 {
        match self {
            Corner::Detected(c) => c.f_c as f64,
            Corner::Forced { f_c_bins } => *f_c_bins,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaOptions {
    pub num_filters: usize,
    pub log_floor: f64,
    /// Skip detection and use this corner, Hz.
    pub forced_fc_hz: Option<f64>,
}

impl Default for RaOptions {
    fn default() -> Self {
        Self {
            num_filters: 64,
            log_floor: 1e-12,
            forced_fc_hz: None,
        }
    }
}

/// `num_frames × 2M` warped spectrogram. Columns run over the negative side
/// from filter `M` down to filter 1, then the positive side from filter 1 up
/// to `M`, so warped frequency ascends left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct RaSpectrogram {
    pub power: Array2<f64>,
    pub corner: Corner,
    pub bank: FilterBank,
    pub time_axis: Vec<f64>,
    /// Hz per linear bin of the source spectrogram.
    pub bin_hz: f64,
}

impl RaSpectrogram {
    pub fn num_filters(&self) -> usize {
        self.bank.num_filters()
    }

    /// Signed center frequency (Hz) of each output column.
    pub fn freq_axis(&self) -> Vec<f64> {
        let p = self.bank.break_points();
        let m = self.num_filters();
        (0..2 * m)
            .map(|j| {
                if j < m {
                    -p[m - j] * self.bin_hz
                } else {
                    p[j - m + 1] * self.bin_hz
                }
            })
            .collect()
    }

    pub fn f_c_hz(&self) -> f64 {
        self.corner.f_c_bins() * self.bin_hz
    }
}

/// Applies `bank` to both halves of `spec`, positive side as is and negative
/// side mirrored, and lays the result out as in [`RaSpectrogram`].
pub fn apply_filter_bank(spec: &Spectrogram, bank: &FilterBank) -> Result<Array2<f64>> {
    let f_max = spec.f_max_bin();
    if bank.f_max() != f_max {
        return Err(Error::DimensionMismatch(format!(
            "filter bank covers {} bins, spectrogram has f_max bin {f_max}",
            bank.f_max()
        )));
    }
    let m = bank.num_filters();
    let frames = spec.num_frames();
    let pos_cols: Vec<usize> = (0..=f_max as i64).map(|f| spec.column_of(f)).collect();
    let neg_cols: Vec<usize> = (0..=f_max as i64).map(|f| spec.column_of(-f)).collect();
    // nonzero span of each filter, to skip the zero weights
    let spans: Vec<(usize, usize)> = bank
        .weights()
        .rows()
        .into_iter()
        .map(|w| {
            let first = w.iter().position(|&x| x != 0.0).unwrap_or(0);
            let last = w.iter().rposition(|&x| x != 0.0).map_or(0, |l| l + 1);
            (first, last.max(first))
        })
        .collect();

    let mut out = Array2::<f64>::zeros((frames, 2 * m));
    let slice = out
        .as_slice_mut()
        .ok_or_else(|| Error::Internal("non-contiguous output".into()))?;
    par::for_each_chunk_mut(slice, 2 * m, |t, row| {
        let power = spec.power.row(t);
        for (k, (w, &(a, b))) in bank.weights().rows().into_iter().zip(&spans).enumerate() {
            let mut pos = 0.0;
            let mut neg = 0.0;
            for f in a..b {
                pos += w[f] * power[pos_cols[f]];
                neg += w[f] * power[neg_cols[f]];
            }
            row[m + k] = pos;
            row[m - 1 - k] = neg;
        }
    });
    Ok(out)
}

pub fn ra_transform(spec: &Spectrogram, num_filters: usize, floor: f64) -> Result<RaSpectrogram> {
    ra_transform_with(
        spec,
        &RaOptions {
            num_filters,
            log_floor: floor,
            forced_fc_hz: None,
        },
    )
}

pub fn ra_transform_with(spec: &Spectrogram, opts: &RaOptions) -> Result<RaSpectrogram> {
    if spec.num_frames() == 0 {
        return Err(Error::DegenerateInput("spectrogram has no frames".into()));
    }
    if !spec.power.iter().any(|&p| p > 0.0) {
        return Err(Error::DegenerateInput("spectrogram is all zero".into()));
    }
    let f_max = spec.f_max_bin();
    let bin_hz = spec.bin_hz();
    let corner = match opts.forced_fc_hz {
        Some(hz) => {
            if !(hz > 0.0 && hz.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "forced corner must be positive, got {hz} Hz"
                )));
            }
            let bins = (hz / bin_hz).min(f_max as f64);
            if bins < (hz / bin_hz) {
                log::warn!(
                    "forced corner {hz} Hz clamped to f_max ({} Hz)",
                    bins * bin_hz
                );
            }
            Corner::Forced { f_c_bins: bins }
        }
        None => {
            let e = energy_profile(spec, opts.log_floor)?;
            let c = find_corners(&e)?;
            log::debug!(
                "corners: f_nc = {} f_pc = {} f_c = {} (J = {})",
                c.f_nc,
                c.f_pc,
                c.f_c,
                c.objective_value
            );
            if (c.f_c as f64) < MIN_CORNER_BINS {
                return Err(Error::DegenerateCorner {
                    f_c_bins: c.f_c as f64,
                });
            }
            Corner::Detected(c)
        }
    };
    let bank = build_filter_bank(corner.f_c_bins(), f_max, opts.num_filters)?;
    let power = apply_filter_bank(spec, &bank)?;
    Ok(RaSpectrogram {
        power,
        corner,
        bank,
        time_axis: spec.time_axis.clone(),
        bin_hz,
    })
}
