#![allow(dead_code)]

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

/// Least-squares objective written directly in Bloch coordinates:
/// `sum_j (scale (1 + r_j . s) / 4 - m_j)^2` with the tetrahedron directions.
pub fn bloch_objective(s: [f64; 3], measured: &[f64; 4], scale: f64) -> f64 {
    let k = 1.0 / 3.0_f64.sqrt();
    let dirs = [[k, k, k], [k, -k, -k], [-k, k, -k], [-k, -k, k]];
    dirs.iter()
        .zip(measured)
        .map(|(r, m)| {
            let p = (1.0 + r[0] * s[0] + r[1] * s[1] + r[2] * s[2]) / 4.0;
            (scale * p - m).powi(2)
        })
        .sum()
}

/// Exhaustive search over the Bloch ball on a cubic grid of spacing `step`.
pub fn grid_minimum(measured: &[f64; 4], scale: f64, step: f64) -> (f64, [f64; 3]) {
    let n = (1.0 / step).round() as i64;
    let mut best = (f64::INFINITY, [0.0; 3]);
    for i in -n..=n {
        let x = i as f64 * step;
        for j in -n..=n {
            let y = j as f64 * step;
            if x * x + y * y > 1.0 + 1e-12 {
                continue;
            }
            for k in -n..=n {
                let z = k as f64 * step;
                if x * x + y * y + z * z > 1.0 + 1e-12 {
                    continue;
                }
                let s = [x, y, z];
                let f = bloch_objective(s, measured, scale);
                if f < best.0 {
                    best = (f, s);
                }
            }
        }
    }
    best
}

fn histogram(samples: &[u64]) -> BTreeMap<u64, f64> {
    let mut h = BTreeMap::new();
    for &x in samples {
        *h.entry(x).or_insert(0.0) += 1.0;
    }
    h
}

/// Merges adjacent cells (in key order) until each holds at least `min_count`
/// of the combined expectation; returns the merged cell totals.
fn merge_cells(cells: Vec<(f64, f64)>, min_count: f64) -> Vec<(f64, f64)> {
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (a, b) in cells {
        acc.0 += a;
        acc.1 += b;
        if acc.0.min(acc.1) >= min_count {
            merged.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        if let Some(last) = merged.last_mut() {
            last.0 += acc.0;
            last.1 += acc.1;
        } else {
            merged.push(acc);
        }
    }
    merged
}

/// Two-sample chi-square test of homogeneity; returns the p-value.
pub fn two_sample_chi_square(a: &[u64], b: &[u64]) -> f64 {
    let (ha, hb) = (histogram(a), histogram(b));
    let mut keys: Vec<u64> = ha.keys().chain(hb.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let cells: Vec<(f64, f64)> = keys
        .iter()
        .map(|k| (*ha.get(k).unwrap_or(&0.0), *hb.get(k).unwrap_or(&0.0)))
        .collect();
    let cells = merge_cells(cells, 5.0);
    if cells.len() < 2 {
        return 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let stat: f64 = cells
        .iter()
        .map(|&(oa, ob)| {
            let col = oa + ob;
            let (ea, eb) = (col * na / total, col * nb / total);
            (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb
        })
        .sum();
    let dist = ChiSquared::new((cells.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

/// Chi-square goodness of fit against `Pois(mean)`; returns the p-value.
pub fn poisson_goodness_of_fit(samples: &[u64], mean: f64) -> f64 {
    let h = histogram(samples);
    let n = samples.len() as f64;
    let pois = Poisson::new(mean).unwrap();
    let max_key = *h.keys().max().unwrap();
    let upper = max_key.max((mean + 10.0 * mean.sqrt()) as u64);
    // (expected, observed) in value order, tail folded into the last cell.
    let mut cells: Vec<(f64, f64)> = (0..=upper)
        .map(|k| (n * pois.pmf(k), *h.get(&k).unwrap_or(&0.0)))
        .collect();
    let assigned: f64 = cells.iter().map(|c| c.0).sum();
    cells.last_mut().unwrap().0 += (n - assigned).max(0.0);

    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (e, o) in cells {
        acc.0 += e;
        acc.1 += o;
        if acc.0 >= 5.0 {
            merged.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if let Some(last) = merged.last_mut() {
        last.0 += acc.0;
        last.1 += acc.1;
    }
    let stat: f64 = merged.iter().map(|(e, o)| (o - e).powi(2) / e).sum();
    let dist = ChiSquared::new((merged.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}
