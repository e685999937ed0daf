use std::collections::HashMap;

use super::templates::TemplateStore;
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;

fn ngram_counts<'t, 'a>(tokens: &'t [&'a str], n: usize) -> HashMap<&'t [&'a str], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Unsmoothed sentence BLEU against a single reference: uniform weights
/// over n-gram orders 1..=min(4, candidate length) with the standard
/// brevity penalty. Whitespace tokenization.
pub fn sentence_bleu(candidate: &str, reference: &str) -> f64 {
    let cand: Vec<&str> = candidate.split_whitespace().collect();
    let refr: Vec<&str> = reference.split_whitespace().collect();
    if cand.is_empty() {
        return 0.0;
    }
    let max_n = MAX_ORDER.min(cand.len());
    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let c = ngram_counts(&cand, n);
        let r = ngram_counts(&refr, n);
        let total: usize = c.values().sum();
        let clipped: usize = c
            .iter()
            .map(|(g, &k)| k.min(r.get(g).copied().unwrap_or(0)))
            .sum();
        if clipped == 0 {
            return 0.0;
        }
        log_sum += (clipped as f64 / total as f64).ln();
    }
    let (c, r) = (cand.len() as f64, refr.len() as f64);
    let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    bp * (log_sum / max_n as f64).exp()
}

/// Highest sentence BLEU of `candidate` against every reference template
/// that shares its MR.
pub fn bleu_max(candidate: &str, mr: &str, references: &TemplateStore) -> Result<f64> {
    let refs = references
        .templates(mr)
        .ok_or_else(|| Error::UndefinedMetric(format!("no reference templates for `{mr}`")))?;
    Ok(refs
        .iter()
        .map(|r| sentence_bleu(candidate, r))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acts::Role;

    #[test]
    fn identical_is_one() {
        let s = "the price range at <name> is <pricerange>";
        assert!((sentence_bleu(s, s) - 1.0).abs() < 1e-12);
        assert!((sentence_bleu("good bye", "good bye") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_candidate_is_zero() {
        assert_eq!(sentence_bleu("", "good bye"), 0.0);
    }

    #[test]
    fn max_over_references_sharing_an_mr() {
        let store = TemplateStore::bundled(Role::Provider);
        let mr = "act_inform <pricerange> act_offer <name>";
        let t1 = "the price range at <name> is <pricerange>";
        let t2 = "<name> is in the <pricerange> price range";
        assert!(sentence_bleu(t1, t2) < 1.0);
        assert!((bleu_max(t1, mr, &store).unwrap() - 1.0).abs() < 1e-12);
        assert!(bleu_max(t1, "act_dance", &store).is_err());
    }

    #[test]
    fn one_substitution_in_ten_tokens() {
        // p1 = 9/10, p2 = 7/9, p3 = 5/8, p4 = 3/7, no brevity penalty;
        // (0.1875)^(1/4) evaluated offline.
        let reference = "a b c d e f g h i j";
        let candidate = "a b c d X f g h i j";
        let expected = 0.658_037_006_476_246_2;
        assert!((sentence_bleu(candidate, reference) - expected).abs() < 1e-12);
    }

    #[test]
    fn short_candidates_use_lower_orders() {
        // two tokens: orders 1 and 2 only; p1 = 1, p2 = 1, BP = exp(1 - 3/2)
        let b = sentence_bleu("good bye", "good bye now");
        assert!((b - (-0.5f64).exp()).abs() < 1e-12);
    }
}
