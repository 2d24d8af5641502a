use crate::error::{Error, Result};
use crate::linspec::{log_floored, Spectrogram};

/// Floor applied to mean squares before the logarithm.
pub const MEAN_SQUARE_FLOOR: f64 = 1e-300;

/// Per-frequency sum over frames of log10 power.
///
/// `e[j]` belongs to signed bin `j - f_max_bin`, so `e[0]` is `-f_max` and the
/// last entry is `f_max - 1`. Signed bin `+f_max` is the same DFT bin as
/// `-f_max` and reads back `e[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    e: Vec<f64>,
    f_max_bin: usize,
}

impl EnergyProfile {
    pub fn new(e: Vec<f64>) -> Result<Self> {
        if e.is_empty() || !e.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "energy profile needs an even, non-zero length, got {}",
                e.len()
            )));
        }
        if let Some(i) = e.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("energy profile entry {i}")));
        }
        let f_max_bin = e.len() / 2;
        Ok(Self { e, f_max_bin })
    }

    pub fn values(&self) -> &[f64] {
        &self.e
    }

    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn f_max_bin(&self) -> usize {
        self.f_max_bin
    }

    /// Energy at signed bin `k`, `-f_max_bin <= k <= f_max_bin`.
    pub fn at(&self, k: i64) -> f64 {
        let f = self.f_max_bin as i64;
        debug_assert!((-f..=f).contains(&k), "bin {k} outside ±{f}");
        self.e[(k + f).rem_euclid(2 * f) as usize]
    }
}

pub fn energy_profile(spec: &Spectrogram, floor: f64) -> Result<EnergyProfile> {
    if spec.num_frames() == 0 || spec.num_freq_bins() == 0 {
        return Err(Error::DegenerateInput("empty spectrogram".into()));
    }
    let logs = log_floored(&spec.power, floor)?;
    EnergyProfile::new(logs.sum_axis(ndarray::Axis(0)).to_vec())
}

/// `(m - n + 1) · log10(mean of e² over n..=m)`, summed directly.
pub fn log_ms(e: &EnergyProfile, n: i64, m: i64) -> Result<f64> {
    check_interval(e, n, m)?;
    let sum: f64 = (n..=m).map(|i| e.at(i).powi(2)).sum();
    Ok(log_ms_from_sum(sum, (m - n + 1) as f64))
}

pub(crate) fn log_ms_from_sum(sum: f64, len: f64) -> f64 {
    len * (sum / len).max(MEAN_SQUARE_FLOOR).log10()
}

fn check_interval(e: &EnergyProfile, n: i64, m: i64) -> Result<()> {
    let f = e.f_max_bin() as i64;
    if n > m {
        return Err(Error::InvalidParameter(format!("empty interval {n}..={m}")));
    }
    if n < -f || m > f {
        return Err(Error::InvalidParameter(format!(
            "interval {n}..={m} outside ±{f}"
        )));
    }
    Ok(())
}

/// Prefix sums of e² over signed bins `-f_max..=f_max` for O(1) segment costs.
#[derive(Debug, Clone)]
pub struct LogMsTable {
    prefix: Vec<f64>,
    f_max_bin: i64,
}

impl LogMsTable {
    pub fn new(e: &EnergyProfile) -> Self {
        let f = e.f_max_bin() as i64;
        let mut prefix = Vec::with_capacity(2 * f as usize + 2);
        prefix.push(0.0);
        let mut acc = 0.0;
        for k in -f..=f {
            acc += e.at(k).powi(2);
            prefix.push(acc);
        }
        Self {
            prefix,
            f_max_bin: f,
        }
    }

    pub fn log_ms(&self, n: i64, m: i64) -> f64 {
        let lo = (n + self.f_max_bin) as usize;
        let hi = (m + self.f_max_bin) as usize + 1;
        log_ms_from_sum(self.prefix[hi] - self.prefix[lo], (m - n + 1) as f64)
    }
}
