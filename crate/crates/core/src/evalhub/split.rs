//! Random dialog-level partition into train / dev / devtest / teststd.

use rand::seq::SliceRandom;

use crate::engine::dialog::session_rng;
use crate::error::{Error, Result};

pub const PART_NAMES: [&str; 4] = ["train", "dev", "devtest", "teststd"];
pub const DEFAULT_RATIOS: [f64; 4] = [0.65, 0.05, 0.15, 0.15];

#[derive(Clone, Debug, PartialEq)]
pub struct Split<T> {
    pub parts: [Vec<T>; 4],
}

impl<T> Split<T> {
    pub fn named(&self) -> impl Iterator<Item = (&'static str, &[T])> {
        PART_NAMES.iter().copied().zip(self.parts.iter().map(Vec::as_slice))
    }
}

/// Part sizes by largest remainder; ties go to the earlier part.
pub fn part_sizes(n: usize, ratios: &[f64]) -> Result<[usize; 4]> {
    if ratios.len() != 4 {
        return Err(Error::BadRatios(format!("expected 4 ratios, got {}", ratios.len())));
    }
    if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::BadRatios(format!("{ratios:?} contains a negative or non-finite ratio")));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::BadRatios(format!("{ratios:?} sums to {sum}")));
    }
    let quotas: Vec<f64> = ratios.iter().map(|r| r / sum * n as f64).collect();
    let mut sizes = [0usize; 4];
    for (s, q) in sizes.iter_mut().zip(&quotas) {
        *s = q.floor() as usize;
    }
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())).then(a.cmp(&b)));
    let assigned: usize = sizes.iter().sum();
    for &i in order.iter().take(n - assigned) {
        sizes[i] += 1;
    }
    Ok(sizes)
}

/// Shuffles with `seed` and cuts into the four parts; each part keeps the
/// input order.
pub fn split_corpus<T: Clone>(items: &[T], ratios: &[f64], seed: u64) -> Result<Split<T>> {
    let sizes = part_sizes(items.len(), ratios)?;
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut session_rng(seed));
    let mut parts: [Vec<T>; 4] = Default::default();
    let mut start = 0;
    for (part, size) in parts.iter_mut().zip(sizes) {
        let mut idx = order[start..start + size].to_vec();
        idx.sort_unstable();
        *part = idx.into_iter().map(|i| items[i].clone()).collect();
        start += size;
    }
    Ok(Split { parts })
}
