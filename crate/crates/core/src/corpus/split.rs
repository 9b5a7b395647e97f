use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CorpusError, SentencePair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.70,
            dev: 0.15,
            test: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<SentencePair>,
    pub dev: Vec<SentencePair>,
    pub test: Vec<SentencePair>,
    pub seed: u64,
}

/// Shuffles with `seed` and slices into train/dev/test. Dev and test sizes
/// are floored; the remainder goes to train.
pub fn split_dataset(
    pairs: &[SentencePair],
    ratios: SplitRatios,
    seed: u64,
) -> Result<DatasetSplit, CorpusError> {
    let r = [ratios.train, ratios.dev, ratios.test];
    if r.iter().any(|x| !x.is_finite() || *x < 0.0) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(CorpusError::BadRatios(r));
    }
    let n = pairs.len();
    if n < 3 {
        return Err(CorpusError::TooSmall(n));
    }
    let size = |ratio: f64| ((ratio * n as f64) + 1e-9).floor() as usize;
    let (n_dev, n_test) = (size(ratios.dev), size(ratios.test));
    let n_train = n - n_dev - n_test;

    let mut shuffled = pairs.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = shuffled.split_off(n_train + n_dev);
    let dev = shuffled.split_off(n_train);
    Ok(DatasetSplit {
        train: shuffled,
        dev,
        test,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn pairs(n: usize) -> Vec<SentencePair> {
        (0..n)
            .map(|i| SentencePair::new(&format!("p{i}"), "t", "d", "s").unwrap())
            .collect()
    }

    fn ids(v: &[SentencePair]) -> Vec<String> {
        v.iter().map(|p| p.id.clone()).collect()
    }

    #[test]
    fn proportions() {
        let s = split_dataset(&pairs(100), SplitRatios::default(), 1).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (70, 15, 15));
        let s = split_dataset(&pairs(101), SplitRatios::default(), 1).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (71, 15, 15));
        let s = split_dataset(&pairs(60), SplitRatios::default(), 1).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (42, 9, 9));
    }

    #[test]
    fn deterministic_and_partitioning() {
        let input = pairs(10);
        let a = split_dataset(&input, SplitRatios::default(), 42).unwrap();
        let b = split_dataset(&input, SplitRatios::default(), 42).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<String> = [ids(&a.train), ids(&a.dev), ids(&a.test)].concat();
        all.sort();
        let mut want = ids(&input);
        want.sort();
        assert_eq!(all, want);
    }

    #[test]
    fn seeds_differ() {
        let input = pairs(30);
        let base = split_dataset(&input, SplitRatios::default(), 0).unwrap();
        let base_test: HashSet<String> = ids(&base.test).into_iter().collect();
        let differs = (1..=5).any(|seed| {
            let s = split_dataset(&input, SplitRatios::default(), seed).unwrap();
            ids(&s.test).into_iter().collect::<HashSet<_>>() != base_test
        });
        assert!(differs);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            split_dataset(&pairs(2), SplitRatios::default(), 0),
            Err(CorpusError::TooSmall(2))
        ));
        let bad = SplitRatios {
            train: 0.5,
            dev: 0.2,
            test: 0.2,
        };
        assert!(matches!(
            split_dataset(&pairs(10), bad, 0),
            Err(CorpusError::BadRatios(_))
        ));
    }
}
