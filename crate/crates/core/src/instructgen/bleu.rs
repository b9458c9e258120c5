//! BLEU-4 with clipped n-gram counts, closest-reference brevity penalty, and
//! add-one smoothing for zero counts at orders two and above.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::InstructError;

pub const BLEU_ORDER: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BleuScore {
    pub value: f64,
    /// Precision used for each order, after smoothing.
    pub precisions: [f64; BLEU_ORDER],
    /// Clipped matched n-gram counts.
    pub matches: [u64; BLEU_ORDER],
    /// Candidate n-gram counts.
    pub totals: [u64; BLEU_ORDER],
    pub brevity_penalty: f64,
    pub candidate_length: u64,
    pub reference_length: u64,
}

/// Lowercased whitespace tokens.
pub fn tokenize(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_lowercase).collect()
}

fn ngram_counts<T: AsRef<str>>(tokens: &[T], n: usize) -> HashMap<Vec<&str>, u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
        }
    }
    counts
}

/// Reference length closest to `c`; ties go to the shorter reference.
fn closest_ref_length<T: AsRef<str>>(c: usize, references: &[Vec<T>]) -> usize {
    references.iter().map(Vec::len).min_by_key(|&r| (r.abs_diff(c), r)).expect("at least one reference")
}

struct SentenceStats {
    matches: [u64; BLEU_ORDER],
    totals: [u64; BLEU_ORDER],
    c: u64,
    r: u64,
}

fn sentence_stats<C: AsRef<str>, R: AsRef<str>>(
    candidate: &[C],
    references: &[Vec<R>],
) -> Result<SentenceStats, InstructError> {
    if candidate.is_empty() || references.is_empty() || references.iter().any(Vec::is_empty) {
        return Err(InstructError::EmptyInput);
    }
    let mut matches = [0; BLEU_ORDER];
    let mut totals = [0; BLEU_ORDER];
    for n in 1..=BLEU_ORDER {
        let cand = ngram_counts(candidate, n);
        let mut max_ref: HashMap<Vec<&str>, u64> = HashMap::new();
        for r in references {
            for (g, k) in ngram_counts(r, n) {
                let e = max_ref.entry(g).or_insert(0);
                *e = (*e).max(k);
            }
        }
        for (g, k) in &cand {
            matches[n - 1] += (*k).min(max_ref.get(g).copied().unwrap_or(0));
            totals[n - 1] += k;
        }
    }
    Ok(SentenceStats {
        matches,
        totals,
        c: candidate.len() as u64,
        r: closest_ref_length(candidate.len(), references) as u64,
    })
}

fn score(matches: [u64; BLEU_ORDER], totals: [u64; BLEU_ORDER], c: u64, r: u64) -> BleuScore {
    let mut precisions = [0.0; BLEU_ORDER];
    for i in 0..BLEU_ORDER {
        precisions[i] = if i == 0 {
            matches[0] as f64 / totals[0] as f64
        } else if matches[i] == 0 {
            1.0 / (totals[i] as f64 + 1.0)
        } else {
            matches[i] as f64 / totals[i] as f64
        };
    }
    let brevity_penalty = if c < r { (1.0 - r as f64 / c as f64).exp() } else { 1.0 };
    let value = if precisions[0] == 0.0 {
        0.0
    } else {
        let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / BLEU_ORDER as f64;
        (brevity_penalty * log_mean.exp()).min(1.0)
    };
    BleuScore { value, precisions, matches, totals, brevity_penalty, candidate_length: c, reference_length: r }
}

/// Sentence-level BLEU-4 of `candidate` against `references`.
pub fn bleu4<C: AsRef<str>, R: AsRef<str>>(candidate: &[C], references: &[Vec<R>]) -> Result<BleuScore, InstructError> {
    let s = sentence_stats(candidate, references)?;
    Ok(score(s.matches, s.totals, s.c, s.r))
}

/// Corpus BLEU-4: counts and lengths are summed over all segments before
/// precisions are taken.
pub fn corpus_bleu4<C: AsRef<str>, R: AsRef<str>>(
    segments: &[(Vec<C>, Vec<Vec<R>>)],
) -> Result<BleuScore, InstructError> {
    if segments.is_empty() {
        return Err(InstructError::EmptyInput);
    }
    let mut matches = [0; BLEU_ORDER];
    let mut totals = [0; BLEU_ORDER];
    let (mut c, mut r) = (0, 0);
    for (cand, refs) in segments {
        let s = sentence_stats(cand, refs)?;
        for i in 0..BLEU_ORDER {
            matches[i] += s.matches[i];
            totals[i] += s.totals[i];
        }
        c += s.c;
        r += s.r;
    }
    Ok(score(matches, totals, c, r))
}
