//! Three-segment log-mean-square corner search.
//!
//! J(f1, f2) = LogMS(-f_max, f1) + LogMS(f1, f2) + LogMS(f2, f_max), with the
//! segment endpoints f1 and f2 shared between neighbours, minimized over
//! `f1 ∈ [-f_max+1, -1]` and `f2 ∈ [1, f_max-1]`.

use std::cmp::Ordering;

use super::energy::{EnergyProfile, LogMsTable};
use crate::error::{Error, Result};
use crate::par;

/// Objective values closer than this (relative to their magnitude) count as
/// equal and fall through to the tie-break.
pub const TIE_TOLERANCE: f64 = 1e-9;

pub const MIN_F_MAX_BIN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerResult {
    /// Negative corner, signed bin (< 0).
    pub f_nc: i64,
    /// Positive corner, signed bin (> 0).
    pub f_pc: i64,
    /// `max(|f_nc|, f_pc)`.
    pub f_c: i64,
    pub objective_value: f64,
}

impl CornerResult {
    fn new(f_nc: i64, f_pc: i64, objective_value: f64) -> Self {
        Self {
            f_nc,
            f_pc,
            f_c: f_nc.abs().max(f_pc),
            objective_value,
        }
    }
}

/// Orders candidates: lower objective first, then the tighter band
/// `f_pc + |f_nc|`, then the smaller `f_pc`.
pub fn compare_candidates(a: &CornerResult, b: &CornerResult) -> Ordering {
    let scale = a
        .objective_value
        .abs()
        .max(b.objective_value.abs())
        .max(1.0);
    let diff = a.objective_value - b.objective_value;
    if diff < -TIE_TOLERANCE * scale {
        return Ordering::Less;
    }
    if diff > TIE_TOLERANCE * scale {
        return Ordering::Greater;
    }
    (a.f_pc + a.f_nc.abs())
        .cmp(&(b.f_pc + b.f_nc.abs()))
        .then(a.f_pc.cmp(&b.f_pc))
}

fn keep_better(best: Option<CornerResult>, cand: CornerResult) -> Option<CornerResult> {
    match best {
        Some(b) if compare_candidates(&cand, &b) != Ordering::Less => Some(b),
        _ => Some(cand),
    }
}

pub fn find_corners(e: &EnergyProfile) -> Result<CornerResult> {
    let f_max = e.f_max_bin();
    if f_max < MIN_F_MAX_BIN {
        return Err(Error::InvalidParameter(format!(
            "frequency axis too short for corner search: f_max_bin = {f_max} < {MIN_F_MAX_BIN}"
        )));
    }
    let f = f_max as i64;
    let table = LogMsTable::new(e);

    // Best f2 for each f1, then an in-order merge over f1.
    let rows = par::map_range(f_max - 1, |i| {
        let f1 = -f + 1 + i as i64;
        let head = table.log_ms(-f, f1);
        (1..f).fold(None, |best, f2| {
            let j = head + table.log_ms(f1, f2) + table.log_ms(f2, f);
            keep_better(best, CornerResult::new(f1, f2, j))
        })
    });
    rows.into_iter()
        .flatten()
        .fold(None, keep_better)
        .ok_or_else(|| Error::Internal("empty corner search grid".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_profile(f_max: i64, lo: i64, hi: i64, inside: f64, outside: f64) -> EnergyProfile {
        EnergyProfile::new(
            (-f_max..f_max)
                .map(|k| {
                    if (lo..=hi).contains(&k) {
                        inside
                    } else {
                        outside
                    }
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn too_short_axis() {
        let e = EnergyProfile::new(vec![1.0; 6]).unwrap();
        assert!(find_corners(&e).is_err());
    }

    // Expected corners below were computed by an exhaustive evaluation of J
    // with direct sums. Shared segment endpoints make the optimum sit one
    // bin outside each band edge.
    #[test]
    fn symmetric_step_band() {
        let e = step_profile(64, -10, 10, 10.0, 1.0);
        let c = find_corners(&e).unwrap();
        assert_eq!((c.f_nc, c.f_pc), (-11, 11));
        assert!((c.objective_value - 45.1008121405165).abs() < 1e-9);
    }

    #[test]
    fn asymmetric_step_gives_larger_corner() {
        let e = step_profile(64, -5, 20, 10.0, 1.0);
        let c = find_corners(&e).unwrap();
        assert_eq!((c.f_nc, c.f_pc), (-6, 21));
        assert_eq!(c.f_c, c.f_nc.abs().max(c.f_pc));
    }

    #[test]
    fn result_respects_bounds() {
        let e = EnergyProfile::new((0..64).map(|i| ((i * 37) % 11) as f64).collect()).unwrap();
        let c = find_corners(&e).unwrap();
        assert!(-32 < c.f_nc && c.f_nc < 0 && 0 < c.f_pc && c.f_pc < 32);
    }

    #[test]
    fn tie_break_order() {
        let a = CornerResult::new(-3, 5, 1.0);
        let b = CornerResult::new(-5, 3, 1.0);
        let c = CornerResult::new(-2, 2, 1.0 + 1e-12);
        // equal width: smaller f_pc wins
        assert_eq!(compare_candidates(&b, &a), Ordering::Less);
        // near-equal objective: tighter band wins
        assert_eq!(compare_candidates(&c, &a), Ordering::Less);
        let d = CornerResult::new(-20, 20, 0.5);
        assert_eq!(compare_candidates(&d, &a), Ordering::Less);
    }
}
