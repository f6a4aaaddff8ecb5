//! Corpus-level BLEU-4.
//!
//! Whitespace tokenization, uniform weights over 1- to 4-gram modified
//! precisions, no smoothing, and brevity penalty `exp(1 - r/c)` when the
//! total hypothesis length `c` is at most the total reference length `r`:
//!
//! ```text
//! BLEU = BP * exp( (1/4) * sum_n ln p_n ),  p_n = clipped_n / total_n
//! ```
//!
//! Any `p_n = 0` gives a score of 0. For the single pair
//! "the cat sat on the mat" / "the cat sat on a red mat" the precisions are
//! 5/6, 3/5, 2/4, 1/3 and BP = exp(-1/6), so BLEU = exp(-1/6) * (1/12)^(1/4).

use std::collections::HashMap;

use serde::Serialize;

use super::records::{check_subset, index, text_payload, Row};
use super::Task;
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BleuReport {
    pub bleu: f64,
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hypothesis_length: usize,
    pub reference_length: usize,
    pub pairs: usize,
}

fn ngram_counts<'a, 't>(tokens: &'a [&'t str], n: usize) -> HashMap<&'a [&'t str], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// BLEU-4 over aligned (hypothesis, reference) pairs.
pub fn corpus_bleu<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<BleuReport> {
    let mut matched = [0usize; MAX_ORDER];
    let mut total = [0usize; MAX_ORDER];
    let (mut c, mut r, mut n_pairs) = (0usize, 0usize, 0usize);
    for (hyp, reference) in pairs {
        n_pairs += 1;
        let h: Vec<&str> = hyp.split_whitespace().collect();
        let rf: Vec<&str> = reference.split_whitespace().collect();
        c += h.len();
        r += rf.len();
        for n in 1..=MAX_ORDER {
            let ref_counts = ngram_counts(&rf, n);
            for (gram, count) in ngram_counts(&h, n) {
                matched[n - 1] += count.min(ref_counts.get(gram).copied().unwrap_or(0));
            }
            total[n - 1] += h.len().saturating_sub(n - 1);
        }
    }
    if n_pairs == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut precisions = [0.0; MAX_ORDER];
    for n in 0..MAX_ORDER {
        precisions[n] = if total[n] == 0 { 0.0 } else { matched[n] as f64 / total[n] as f64 };
    }
    let brevity_penalty = if c == 0 {
        0.0
    } else if c > r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    };
    let bleu = if precisions.contains(&0.0) {
        0.0
    } else {
        brevity_penalty * (precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64).exp()
    };
    Ok(BleuReport { bleu, precisions, brevity_penalty, hypothesis_length: c, reference_length: r, pairs: n_pairs })
}

/// BLEU-4 of predicted salesperson utterances against references, aligned
/// by key. Missing predictions are empty hypotheses.
pub fn eval_response(preds: &[Row], refs: &[Row]) -> Result<BleuReport> {
    let pred_map = index(preds, "predictions")?;
    let ref_map = index(refs, "references")?;
    check_subset(&pred_map, &ref_map, Task::Response)?;
    let mut pairs = Vec::with_capacity(ref_map.len());
    for (key, r) in &ref_map {
        let hyp = match pred_map.get(key) {
            Some(p) => text_payload(p)?,
            None => "",
        };
        pairs.push((hyp, text_payload(r)?));
    }
    corpus_bleu(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_corpus_scores_one() {
        let r = corpus_bleu([("a b c d e", "a b c d e"), ("x y z w", "x y z w")]).unwrap();
        assert!((r.bleu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_pair() {
        let r = corpus_bleu([("the cat sat on the mat", "the cat sat on a red mat")]).unwrap();
        assert_eq!(r.precisions, [5.0 / 6.0, 3.0 / 5.0, 2.0 / 4.0, 1.0 / 3.0]);
        let expected = (-1.0f64 / 6.0).exp() * (1.0f64 / 12.0).powf(0.25);
        assert!((r.bleu - expected).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cases() {
        assert_eq!(corpus_bleu([("a b c", "a b c")]).unwrap().bleu, 0.0);
        assert_eq!(corpus_bleu([("p q r s t", "a b c d e")]).unwrap().bleu, 0.0);
        assert_eq!(corpus_bleu([("", "a b c d")]).unwrap().bleu, 0.0);
        assert!(matches!(corpus_bleu(std::iter::empty()), Err(Error::EmptyCorpus)));
        let long = corpus_bleu([("a b c d e f", "a b c d e")]).unwrap();
        assert_eq!(long.brevity_penalty, 1.0);
    }
}
