use std::collections::BTreeMap;

use rand::Rng;

use super::{EnsembleConfig, EnsembleError};
use crate::predictors::{Suggestion, SuggestionList};

#[derive(Debug, Clone, PartialEq)]
pub struct VoteOutcome {
    pub word: String,
    pub count: usize,
    /// Registry indices of the backends that listed the winning word.
    pub backends: Vec<usize>,
    /// Pooled words ranked by vote share, with the winner first.
    pub ranked: Vec<Suggestion>,
}

/// Pools the top `vote_pool_k` suggestions of every backend and returns the
/// word listed by the most backends. Ties are broken uniformly at random.
pub fn majority_vote<R: Rng>(
    per_backend: &[Option<&SuggestionList>],
    cfg: &EnsembleConfig,
    rng: &mut R,
) -> Result<VoteOutcome, EnsembleError> {
    let mut pool: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut pooled = 0usize;
    for (i, list) in per_backend.iter().enumerate() {
        for w in list.iter().flat_map(|l| l.words().take(cfg.vote_pool_k)) {
            pool.entry(w).or_default().push(i);
            pooled += 1;
        }
    }
    let best = pool
        .values()
        .map(Vec::len)
        .max()
        .ok_or(EnsembleError::NoSuggestion)?;
    let tied: Vec<&str> = pool
        .iter()
        .filter(|(_, b)| b.len() == best)
        .map(|(w, _)| *w)
        .collect();
    let word = tied[rng.random_range(0..tied.len())].to_string();

    let mut ranked: Vec<(&str, usize)> = pool.iter().map(|(w, b)| (*w, b.len())).collect();
    ranked.sort_by(|a, b| {
        (b.0 == word)
            .cmp(&(a.0 == word))
            .then(b.1.cmp(&a.1))
            .then(a.0.cmp(b.0))
    });
    Ok(VoteOutcome {
        backends: pool[word.as_str()].clone(),
        count: best,
        ranked: ranked
            .into_iter()
            .map(|(w, c)| Suggestion {
                word: w.to_string(),
                prob: c as f64 / pooled as f64,
            })
            .collect(),
        word,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn list(words: &[&str]) -> SuggestionList {
        let n = words.len() as f64;
        SuggestionList::from_scores(
            "b",
            words
                .iter()
                .enumerate()
                .map(|(i, w)| (*w, (n - i as f64) / (n * n))),
            10,
        )
    }

    fn vote(lists: &[SuggestionList], seed: u64) -> VoteOutcome {
        let refs: Vec<Option<&SuggestionList>> = lists.iter().map(Some).collect();
        majority_vote(
            &refs,
            &EnsembleConfig::default(),
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap()
    }

    #[test]
    fn unanimous() {
        let l = vec![list(&["the", "a"]); 4];
        let out = vote(&l, 0);
        assert_eq!(out.word, "the");
        assert_eq!(out.count, 4);
        assert_eq!(out.backends, vec![0, 1, 2, 3]);
    }

    #[test]
    fn hand_counted_pool() {
        let l = vec![
            list(&["a", "b", "c", "d", "e"]),
            list(&["a", "x", "y", "z", "w"]),
            list(&["q", "r", "s", "t", "u"]),
            list(&["v"]),
        ];
        let out = vote(&l, 3);
        assert_eq!(out.word, "a");
        assert_eq!(out.count, 2);
        assert_eq!(out.backends, vec![0, 1]);
        assert_eq!(out.ranked[0].word, "a");
        assert!((out.ranked.iter().map(|s| s.prob).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn only_top_pool_k_counts() {
        let l = vec![
            list(&["a", "b", "c", "d", "e", "z"]),
            list(&["z"]),
            list(&["a"]),
        ];
        for seed in 0..10 {
            assert_eq!(vote(&l, seed).word, "a");
        }
        let l = vec![
            list(&["a", "b", "c", "d", "e", "f", "z"]),
            list(&["z"]),
            list(&["z"]),
        ];
        assert_eq!(vote(&l, 0).count, 2);
    }

    #[test]
    fn seeded_ties_repeat() {
        let l = vec![list(&["p", "q"]), list(&["q", "p"])];
        let picks: Vec<String> = (0..20).map(|s| vote(&l, s).word).collect();
        let again: Vec<String> = (0..20).map(|s| vote(&l, s).word).collect();
        assert_eq!(picks, again);
        assert!(picks.iter().any(|w| w == "p") && picks.iter().any(|w| w == "q"));
        for s in 0..20 {
            assert_eq!(vote(&l, s).ranked[0].word, picks[s as usize]);
        }
    }

    #[test]
    fn nothing_to_vote_on() {
        let empty = SuggestionList::empty("b");
        let r = majority_vote(
            &[None, Some(&empty)],
            &EnsembleConfig::default(),
            &mut ChaCha8Rng::seed_from_u64(0),
        );
        assert!(matches!(r, Err(EnsembleError::NoSuggestion)));
    }
}
