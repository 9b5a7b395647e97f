//! Output scoring for selector-based ensembles. Each backend competes with
//! its top-1 word; `None` marks a backend with no output.

use super::EnsembleConfig;

fn argmax_by<F>(
    top1: &[Option<(&str, f64)>],
    score: F,
    prefer: impl Fn(usize) -> bool,
) -> Option<(String, usize)>
where
    F: Fn(usize, f64) -> f64,
{
    let mut best: Option<(usize, f64)> = None;
    for (i, entry) in top1.iter().enumerate() {
        let Some((_, p)) = entry else { continue };
        let s = score(i, *p);
        best = match best {
            None => Some((i, s)),
            Some((j, t)) if s > t || (s == t && prefer(i) && !prefer(j)) => Some((i, s)),
            keep => keep,
        };
    }
    best.map(|(i, _)| (top1[i].unwrap().0.to_string(), i))
}

/// `α·P(w|X) + θ·[X = S]`. Ties go to the selected backend, then to the
/// lowest registry index.
pub fn score_4cc(
    top1: &[Option<(&str, f64)>],
    selected: usize,
    cfg: &EnsembleConfig,
) -> Option<(String, usize)> {
    argmax_by(
        top1,
        |i, p| cfg.alpha * p + cfg.theta * if i == selected { 1.0 } else { 0.0 },
        |i| i == selected,
    )
}

/// `β·P(w|X) + σ·bonus·[X ∈ Ls]`. Ties go to members of the label set, then
/// to the lowest registry index.
pub fn score_automets(
    top1: &[Option<(&str, f64)>],
    label_set: &[bool],
    cfg: &EnsembleConfig,
) -> Option<(String, usize)> {
    let member = |i: usize| label_set.get(i).copied().unwrap_or(false);
    argmax_by(
        top1,
        |i, p| cfg.beta * p + cfg.sigma * if member(i) { cfg.membership_bonus } else { 0.0 },
        member,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rows(probs: &[f64]) -> Vec<Option<(&'static str, f64)>> {
        const WORDS: [&str; 6] = ["w0", "w1", "w2", "w3", "w4", "w5"];
        probs
            .iter()
            .enumerate()
            .map(|(i, p)| Some((WORDS[i], *p)))
            .collect()
    }

    #[test]
    fn selected_backend_wins() {
        let cfg = EnsembleConfig::default();
        let r = rows(&[0.9, 0.2, 0.4, 0.1]);
        // backend index 1: 0.5·0.2 + 0.5 = 0.6 beats 0.5·0.9 = 0.45
        assert_eq!(score_4cc(&r, 1, &cfg), Some(("w1".into(), 1)));
    }

    #[test]
    fn zero_theta_is_max_confidence() {
        let cfg = EnsembleConfig {
            theta: 0.0,
            ..Default::default()
        };
        assert_eq!(
            score_4cc(&rows(&[0.9, 0.2, 0.4, 0.1]), 1, &cfg).unwrap().1,
            0
        );
    }

    #[test]
    fn boundary_tie_goes_to_selected() {
        let cfg = EnsembleConfig::default();
        assert_eq!(score_4cc(&rows(&[1.0, 0.0]), 1, &cfg).unwrap().1, 1);
        assert_eq!(score_4cc(&rows(&[0.3, 0.3, 0.3]), 7, &cfg).unwrap().1, 0);
    }

    #[test]
    fn absent_backends_skipped() {
        let cfg = EnsembleConfig::default();
        let r = vec![None, Some(("a", 0.1)), None];
        assert_eq!(score_4cc(&r, 0, &cfg), Some(("a".into(), 1)));
        assert_eq!(score_4cc(&[None, None], 0, &cfg), None);
        assert_eq!(score_automets(&[None], &[true], &cfg), None);
    }

    #[test]
    fn membership_arithmetic() {
        let cfg = EnsembleConfig::default();
        // member at 0.5 scores 0.375; a non-member needs more than 0.75
        let ls = [true, false];
        assert_eq!(score_automets(&rows(&[0.5, 0.75]), &ls, &cfg).unwrap().1, 0);
        assert_eq!(
            score_automets(&rows(&[0.5, 0.7500001]), &ls, &cfg)
                .unwrap()
                .1,
            1
        );
        assert_eq!(
            score_automets(&rows(&[0.5, 0.7]), &[false, false], &cfg)
                .unwrap()
                .1,
            1
        );
    }

    proptest! {
        #[test]
        fn uniform_membership_is_max_confidence(probs in proptest::collection::vec(0.0f64..1.0, 1..6), all in any::<bool>()) {
            let cfg = EnsembleConfig::default();
            let plain = EnsembleConfig { sigma: 0.0, ..Default::default() };
            let r = rows(&probs);
            let ls = vec![all; probs.len()];
            prop_assert_eq!(score_automets(&r, &ls, &cfg), score_automets(&r, &ls, &plain));
        }

        #[test]
        fn correct_selection_always_wins(probs in proptest::collection::vec(0.0f64..=1.0, 1..6), pick in 0usize..6) {
            let s = pick % probs.len();
            let got = score_4cc(&rows(&probs), s, &EnsembleConfig::default()).unwrap();
            prop_assert_eq!(got.1, s);
        }

        // probabilities on a 1/64 grid keep the shifted sums exact
        #[test]
        fn shifting_all_probabilities_keeps_the_winner(
            grid in proptest::collection::vec(0u32..=64, 1..6),
            bits in proptest::collection::vec(any::<bool>(), 6),
            pick in 0usize..6,
            shift in 0u32..=16,
        ) {
            let probs: Vec<f64> = grid.iter().map(|g| *g as f64 / 64.0).collect();
            let shifted: Vec<f64> = probs.iter().map(|p| p + shift as f64 / 64.0).collect();
            let cfg = EnsembleConfig::default();
            let s = pick % probs.len();
            prop_assert_eq!(
                score_4cc(&rows(&probs), s, &cfg).map(|w| w.1),
                score_4cc(&rows(&shifted), s, &cfg).map(|w| w.1)
            );
            prop_assert_eq!(
                score_automets(&rows(&probs), &bits, &cfg).map(|w| w.1),
                score_automets(&rows(&shifted), &bits, &cfg).map(|w| w.1)
            );
        }
    }
}
