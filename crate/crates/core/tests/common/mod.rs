// Independent reference implementations used by the integration tests.
// Written for clarity, not speed; none of them call into the library code
// they are checked against.

#![allow(dead_code)]

use agrorec::dataset::{CategoricalField, CropRecord, Dataset, Season, CROPS, STATES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gini_of(labels: &[usize], n_classes: usize) -> f64 {
    let n = labels.len() as f64;
    let mut counts = vec![0usize; n_classes];
    for &l in labels {
        counts[l] += 1;
    }
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// Exhaustive root split: every feature, every midpoint between consecutive
/// distinct values. Ties go to the lower feature, then the lower threshold.
pub fn exhaustive_root_split(rows: &[Vec<f64>], labels: &[usize], n_classes: usize) -> Option<(usize, f64, f64)> {
    let n = rows.len() as f64;
    let parent = gini_of(labels, n_classes);
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..rows[0].len() {
        let mut values: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let (left, right): (Vec<usize>, Vec<usize>) = (0..rows.len()).partition(|&i| rows[i][f] <= t);
            let l: Vec<usize> = left.iter().map(|&i| labels[i]).collect();
            let r: Vec<usize> = right.iter().map(|&i| labels[i]).collect();
            let child = l.len() as f64 / n * gini_of(&l, n_classes) + r.len() as f64 / n * gini_of(&r, n_classes);
            let decrease = parent - child;
            let better = match best {
                None => decrease > 1e-12,
                Some((_, _, d)) => decrease > d + 1e-12,
            };
            if better {
                best = Some((f, t, decrease));
            }
        }
    }
    best
}

fn ln_choose(n: usize, k: usize) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64).ln() - (i as f64).ln()).sum()
}

/// `P(X >= k)` by direct summation of the binomial pmf.
pub fn upper_tail(k: usize, n: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return 1.0;
    }
    (k..=n)
        .map(|i| (ln_choose(n, i) + i as f64 * p.ln() + (n - i) as f64 * (1.0 - p).ln()).exp())
        .sum()
}

fn bisect<F: Fn(f64) -> bool>(below: F) -> f64 {
    // `below(p)` is true for p under the root
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Clopper-Pearson bounds from the binomial tails: the lower bound solves
/// `P(X >= k; p) = a/2`, the upper solves `P(X <= k; p) = a/2`.
pub fn clopper_pearson(k: usize, n: usize, level: f64) -> (f64, f64) {
    let a = 1.0 - level;
    let low = if k == 0 {
        0.0
    } else {
        bisect(|p| upper_tail(k, n, p) < a / 2.0)
    };
    let high = if k == n {
        1.0
    } else {
        bisect(|p| 1.0 - upper_tail(k + 1, n, p) > a / 2.0)
    };
    (low, high)
}

/// Random records over a few states, crops, years and seasons, with random
/// cost and weather values. Not sorted.
pub fn random_records(rng: &mut ChaCha8Rng, n: usize) -> Vec<CropRecord> {
    let seasons = [Season::Kharif, Season::Rabi, Season::WholeYear];
    (0..n)
        .map(|i| {
            let mut r = CropRecord::placeholder(
                STATES[rng.random_range(0..3)],
                rng.random_range(2011..=2014),
                seasons[rng.random_range(0..seasons.len())],
                CROPS[rng.random_range(0..3)],
            );
            r.district = format!("D{i}");
            r.msp = rng.random_range(100..1000) as f64;
            r.operational_cost = rng.random_range(100..1000) as f64;
            r.temperature = rng.random_range(10..40) as f64;
            r
        })
        .collect()
}

/// For every row, the value of `column` at the `j`-th earlier row of the
/// same group, found by scanning backwards through the whole dataset.
pub fn brute_force_lag(data: &Dataset, keys: &[CategoricalField], column: &str, j: usize) -> Vec<Option<f64>> {
    let values = data.numeric_column(column).expect("numeric column");
    let key = |i: usize| -> Vec<&str> { keys.iter().map(|k| data.records[i].category(*k)).collect() };
    (0..data.len())
        .map(|row| {
            let mut seen = 0;
            for earlier in (0..row).rev() {
                if key(earlier) == key(row) {
                    seen += 1;
                    if seen == j {
                        return Some(values[earlier]);
                    }
                }
            }
            None
        })
        .collect()
}

/// Median of `column` over the row itself and every earlier row of its group.
pub fn brute_force_expanding_median(data: &Dataset, keys: &[CategoricalField], column: &str) -> Vec<f64> {
    let values = data.numeric_column(column).expect("numeric column");
    let key = |i: usize| -> Vec<&str> { keys.iter().map(|k| data.records[i].category(*k)).collect() };
    (0..data.len())
        .map(|row| {
            let mut group: Vec<f64> = (0..=row).filter(|&i| key(i) == key(row)).map(|i| values[i]).collect();
            group.sort_by(f64::total_cmp);
            let m = group.len();
            if m % 2 == 1 {
                group[m / 2]
            } else {
                (group[m / 2 - 1] + group[m / 2]) / 2.0
            }
        })
        .collect()
}
