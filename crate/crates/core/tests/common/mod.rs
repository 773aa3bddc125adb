#![allow(dead_code)]

use tripkg::config::CalendarConfig;
use tripkg::config::TimeSpanConfig;
use tripkg::ingest::TripRecord;
use tripkg::kg::build_graph;
use tripkg::TripKG;

pub fn graph(rows: &[(&str, &str, &str, &str, &str)]) -> TripKG {
    let recs: Vec<_> = rows.iter().map(|&(v, d, t, o, z)| TripRecord::new(v, d, t, o, z).unwrap()).collect();
    build_graph(&recs, &CalendarConfig::default(), &TimeSpanConfig::default())
}

/// Central binomial interval `[lo, hi]` holding at least `1 - alpha` of the
/// mass of Binomial(n, p), from the exact pmf.
pub fn binomial_interval(n: u64, p: f64, alpha: f64) -> (u64, u64) {
    if p <= 0.0 {
        return (0, 0);
    }
    if p >= 1.0 {
        return (n, n);
    }
    let mut logs = Vec::with_capacity(n as usize + 1);
    let mut l = n as f64 * (1.0 - p).ln();
    logs.push(l);
    for k in 0..n {
        l += ((n - k) as f64).ln() - ((k + 1) as f64).ln() + p.ln() - (1.0 - p).ln();
        logs.push(l);
    }
    let max = logs.iter().cloned().fold(f64::MIN, f64::max);
    let pmf: Vec<f64> = logs.iter().map(|x| (x - max).exp()).collect();
    let total: f64 = pmf.iter().sum();
    let mut acc = 0.0;
    let mut lo = 0;
    for (k, m) in pmf.iter().enumerate() {
        if acc + m / total > alpha / 2.0 {
            lo = k as u64;
            break;
        }
        acc += m / total;
    }
    acc = 0.0;
    let mut hi = n;
    for (k, m) in pmf.iter().enumerate().rev() {
        if acc + m / total > alpha / 2.0 {
            hi = k as u64;
            break;
        }
        acc += m / total;
    }
    (lo, hi)
}

/// Concentration by subset enumeration: the best `k` categories are found
/// by trying every subset of size `k` of the used categories.
pub fn brute_concentration(counts: &[u64]) -> u8 {
    let used: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    let n = used.len();
    let total: u64 = used.iter().sum();
    let best_k = |k: usize| -> u64 {
        let k = k.max(1).min(n);
        (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).map(|m| {
            (0..n).filter(|i| m & (1 << i) != 0).map(|i| used[i]).sum::<u64>()
        }).max().unwrap()
    };
    let k1 = (0.2 * n as f64).round() as usize;
    let k2 = (0.3 * n as f64).round() as usize;
    if best_k(k1) as f64 / total as f64 >= 0.8 - 1e-12 {
        2
    } else if best_k(k2) as f64 / total as f64 >= 0.7 - 1e-12 {
        1
    } else {
        0
    }
}

/// Association score computed cell by cell, with rows scanned by column.
pub fn brute_association(p: &[Vec<u64>], rho: f64, capped: bool) -> f64 {
    let rows = p.len();
    let cols = p.iter().map(Vec::len).max().unwrap_or(0);
    let cell = |i: usize, j: usize| p[i].get(j).copied().unwrap_or(0);
    let mut total = 0u64;
    let mut acc = 0.0;
    for i in 0..rows {
        let (mut t, mut m, mut x) = (0u64, 0u64, 0u64);
        for j in 0..cols {
            let c = cell(i, j);
            t += c;
            if c > 0 {
                m += 1;
            }
            if c > x {
                x = c;
            }
        }
        total += t;
        if t == 0 {
            continue;
        }
        let q = if rho * (t as f64) > 1.0 { rho * t as f64 } else { 1.0 };
        let slack = if q > m as f64 { q - m as f64 } else { 0.0 };
        let term = (1.0 + slack / q) * x as f64;
        let cap = if capped { t as f64 } else { 1.0 };
        acc += if term < cap { term } else { cap };
    }
    let s = 100.0 * acc / total as f64;
    s.clamp(0.0, 100.0)
}
