//! Digital Butterworth high-pass design (bilinear transform with prewarping)
//! and cascaded second-order-section filtering.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One biquad, `a0` normalized to 1, run in transposed direct form II.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    pub fn response(&self, z: Complex64) -> Complex64 {
        let zi = z.inv();
        let num = self.b[0] + zi * (self.b[1] + zi * self.b[2]);
        let den = 1.0 + zi * (self.a[0] + zi * self.a[1]);
        num / den
    }

    pub fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }

    /// State that leaves the output constant for a unit constant input.
    fn step_state(&self) -> [f64; 2] {
        let g = self.dc_gain();
        let z2 = self.b[2] - self.a[1] * g;
        let z1 = self.b[1] - self.a[0] * g + z2;
        [z1, z2]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SosFilter {
    sections: Vec<Biquad>,
}

impl SosFilter {
    /// Butterworth high-pass of even `order` with -3 dB point at `cutoff` Hz.
    pub fn butterworth_highpass(order: usize, cutoff: f64, sample_rate: f64) -> Result<Self> {
        if order < 2 || !order.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "high-pass order must be even and >= 2, got {order}"
            )));
        }
        if !(cutoff > 0.0 && cutoff < sample_rate / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "cutoff {cutoff} Hz outside (0, {}) Hz",
                sample_rate / 2.0
            )));
        }
        // prewarped analog cutoff with the bilinear constant folded in
        let w = (PI * cutoff / sample_rate).tan();
        let w2 = w * w;
        let sections = (0..order / 2)
            .map(|k| {
                // damping of the k-th conjugate pole pair of the analog prototype
                let zeta = (PI * (2 * k + 1) as f64 / (2 * order) as f64).sin();
                let a0 = 1.0 + 2.0 * zeta * w + w2;
                Biquad {
                    b: [1.0 / a0, -2.0 / a0, 1.0 / a0],
                    a: [(2.0 * w2 - 2.0) / a0, (1.0 - 2.0 * zeta * w + w2) / a0],
                }
            })
            .collect();
        Ok(Self { sections })
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    /// Complex frequency response at `freq` Hz.
    pub fn response(&self, freq: f64, sample_rate: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, 2.0 * PI * freq / sample_rate);
        self.sections.iter().map(|s| s.response(z)).product()
    }

    /// Filters `x` from rest (zero initial state).
    pub fn filter_from_rest(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.run(x, None)
    }

    /// Filters `x` with every section started in the steady state it would
    /// reach under a constant input `level`.
    pub fn filter_steady(&self, x: &[Complex64], level: Complex64) -> Vec<Complex64> {
        self.run(x, Some(level))
    }

    fn run(&self, x: &[Complex64], steady: Option<Complex64>) -> Vec<Complex64> {
        let mut y = x.to_vec();
        let mut level = steady.unwrap_or_default();
        for s in &self.sections {
            let [u1, u2] = s.step_state();
            let (mut z1, mut z2) = match steady {
                Some(_) => (level * u1, level * u2),
                None => (Complex64::default(), Complex64::default()),
            };
            level *= s.dc_gain();
            for v in y.iter_mut() {
                let input = *v;
                let out = input * s.b[0] + z1;
                z1 = input * s.b[1] - out * s.a[0] + z2;
                z2 = input * s.b[2] - out * s.a[1];
                *v = out;
            }
        }
        y
    }
}
