use crate::corpus::SentencePair;
use crate::predictors::PredictionContext;

/// One autocomplete step: predict `gold` after `prefix` while simplifying
/// `difficult`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionTask {
    pub pair_id: String,
    pub difficult: Vec<String>,
    pub prefix: Vec<String>,
    pub gold: String,
    /// Number of words typed so far (`prefix.len()`).
    pub position: usize,
    pub difficult_length: usize,
}

impl PredictionTask {
    pub fn context(&self) -> PredictionContext {
        PredictionContext::with_difficult(&self.difficult, &self.prefix)
    }
}

/// A simple sentence of `n` tokens yields `n - 1` tasks, predicting
/// `s_{i+1}` from `s_1..s_i` for `i = 1..n-1`. The first word is never
/// predicted.
pub fn generate_tasks(pair: &SentencePair) -> Vec<PredictionTask> {
    (1..pair.simple.len())
        .map(|i| PredictionTask {
            pair_id: pair.id.clone(),
            difficult: pair.difficult.clone(),
            prefix: pair.simple[..i].to_vec(),
            gold: pair.simple[i].clone(),
            position: i,
            difficult_length: pair.difficult.len(),
        })
        .collect()
}

pub fn generate_all_tasks(pairs: &[SentencePair]) -> Vec<PredictionTask> {
    pairs.iter().flat_map(generate_tasks).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_and_degenerate() {
        let p = SentencePair::new("x", "t", "hard words", "easy .").unwrap();
        let tasks = generate_tasks(&p);
        assert_eq!(tasks.len(), 1);
        assert_eq!(tasks[0].prefix, vec!["easy"]);
        assert_eq!(tasks[0].gold, ".");
        assert_eq!(tasks[0].difficult_length, 2);
        let p = SentencePair::new("x", "t", "hard", "one").unwrap();
        assert!(generate_tasks(&p).is_empty());
    }

    #[test]
    fn count_identity() {
        let pairs: Vec<SentencePair> = (3..=7)
            .map(|n| {
                let simple = vec!["w"; n].join(" ");
                SentencePair::new(&n.to_string(), "t", "d", &simple).unwrap()
            })
            .collect();
        assert_eq!(generate_all_tasks(&pairs).len(), 20);
    }
}
