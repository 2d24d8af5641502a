//! Reference implementations shared by the integration tests. Nothing here
//! calls into the crate's corner search or filter bank.

#![allow(dead_code)]

/// Brute-force corner search by direct summation.
///
/// `e` is the signed-bin profile, `e[j]` at bin `j - F/2`; bin `+F/2` reads
/// `e[0]`. Returns `(f_nc, f_pc, J)`.
pub fn oracle_corners(e: &[f64]) -> (i64, i64, f64) {
    let f = (e.len() / 2) as i64;
    let at = |k: i64| e[(k + f).rem_euclid(2 * f) as usize];
    let log_ms = |n: i64, m: i64| {
        let len = (m - n + 1) as f64;
        let mean = (n..=m).map(|k| at(k) * at(k)).sum::<f64>() / len;
        len * mean.max(1e-300).log10()
    };
    let mut all = Vec::new();
    for f1 in (-f + 1)..=-1 {
        for f2 in 1..f {
            all.push((f1, f2, log_ms(-f, f1) + log_ms(f1, f2) + log_ms(f2, f)));
        }
    }
    let j_min = all.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * j_min.abs().max(1.0);
    all.into_iter()
        .filter(|c| c.2 <= j_min + tol)
        .min_by_key(|&(f1, f2, _)| (f2 + f1.abs(), f2))
        .unwrap()
}

/// Profile with `inside` on signed bins `lo..=hi` and `outside` elsewhere.
pub fn step_profile(f_max: i64, lo: i64, hi: i64, inside: f64, outside: f64) -> Vec<f64> {
    (-f_max..f_max)
        .map(|k| {
            if (lo..=hi).contains(&k) {
                inside
            } else {
                outside
            }
        })
        .collect()
}

/// Break points from the closed-form warp, written with base-10 logs.
pub fn oracle_break_points(f_c: f64, f_max: f64, m: usize) -> Vec<f64> {
    let s = |f: f64| f_c / 2f64.log10() * (1.0 + f / f_c).log10();
    let s_inv = |p: f64| f_c * (10f64.powf(2f64.log10() * p / f_c) - 1.0);
    let top = s(f_max);
    let mut p: Vec<f64> = (0..=m + 1)
        .map(|i| s_inv(i as f64 * top / (m + 1) as f64))
        .collect();
    p[0] = 0.0;
    p[m + 1] = f_max;
    p
}

/// Index of the largest element; first wins on ties.
pub fn argmax(v: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, x) in v.into_iter().enumerate() {
        if x > best.1 {
            best = (i, x);
        }
    }
    best.0
}
