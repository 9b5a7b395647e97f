//! Interpolated n-gram language model with a copy distribution over the
//! difficult sentence.
//!
//! The base distribution mixes maximum-likelihood estimates of orders
//! `2..=n` with an add-one unigram (so `<unk>` keeps some mass). Orders
//! whose context was never observed drop out and the remaining weights are
//! renormalized. The final distribution is `(1 - γ)·base + γ·copy`, where
//! `copy` is uniform over the distinct tokens of the difficult sentence.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    is_reserved, BackendError, ModelError, PredictionContext, Predictor, SuggestionList, BOS, EOS,
    SEP, UNK,
};
use crate::corpus::SentencePair;

const FORMAT_HEADER: &str = "autosimp-ngram v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContextMode {
    /// Condition on the typed prefix only.
    NoContext,
    /// Prepend the difficult sentence and a separator to the typed prefix.
    Concat,
}

impl fmt::Display for ContextMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContextMode::NoContext => "no-context",
            ContextMode::Concat => "concat",
        })
    }
}

impl FromStr for ContextMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "no-context" => Ok(ContextMode::NoContext),
            "concat" => Ok(ContextMode::Concat),
            other => Err(format!("unknown context mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NGramConfig {
    pub order: usize,
    /// Interpolation weights for orders 1..=n; `None` means uniform.
    pub weights: Option<Vec<f64>>,
    pub copy_weight: f64,
    pub context_mode: ContextMode,
}

impl NGramConfig {
    pub fn new(order: usize, context_mode: ContextMode, copy_weight: f64) -> Self {
        NGramConfig {
            order,
            weights: None,
            copy_weight,
            context_mode,
        }
    }

    fn resolved_weights(&self) -> Result<Vec<f64>, ModelError> {
        if self.order == 0 {
            return Err(ModelError::InvalidConfig("order must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.copy_weight) {
            return Err(ModelError::InvalidConfig(format!(
                "copy weight {} outside [0, 1]",
                self.copy_weight
            )));
        }
        let weights = match &self.weights {
            None => vec![1.0 / self.order as f64; self.order],
            Some(w) => w.clone(),
        };
        if weights.len() != self.order
            || weights.iter().any(|w| !w.is_finite() || *w < 0.0)
            || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(ModelError::InvalidConfig(format!(
                "need {} non-negative interpolation weights summing to 1, got {weights:?}",
                self.order
            )));
        }
        Ok(weights)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
struct ContextCounts {
    total: u64,
    words: HashMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    order: usize,
    weights: Vec<f64>,
    copy_weight: f64,
    context_mode: ContextMode,
    /// `tables[j]` maps a `j`-token context to the counts of the words that follow it.
    tables: Vec<HashMap<Vec<String>, ContextCounts>>,
    vocab: BTreeSet<String>,
}

/// Training sequences for a context mode: the simple side alone, or
/// `difficult ⧺ [SEP] ⧺ simple`.
pub fn training_sequences(pairs: &[SentencePair], mode: ContextMode) -> Vec<Vec<String>> {
    pairs
        .iter()
        .map(|p| match mode {
            ContextMode::NoContext => p.simple.clone(),
            ContextMode::Concat => {
                let mut seq = p.difficult.clone();
                seq.push(SEP.to_string());
                seq.extend(p.simple.iter().cloned());
                seq
            }
        })
        .collect()
}

impl NGramModel {
    /// Counts all n-grams of orders `1..=config.order`. Each sequence is
    /// wrapped in `<s>` / `</s>` before counting.
    pub fn train(corpus: &[Vec<String>], config: &NGramConfig) -> Result<Self, ModelError> {
        let weights = config.resolved_weights()?;
        if corpus.is_empty() {
            return Err(ModelError::EmptyCorpus);
        }
        let mut model = NGramModel {
            order: config.order,
            weights,
            copy_weight: config.copy_weight,
            context_mode: config.context_mode,
            tables: vec![HashMap::new(); config.order],
            vocab: BTreeSet::new(),
        };
        for sentence in corpus {
            if let Some(bad) = sentence
                .iter()
                .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
            {
                return Err(ModelError::InvalidConfig(format!("bad token {bad:?}")));
            }
            let mut seq = Vec::with_capacity(sentence.len() + 2);
            seq.push(BOS.to_string());
            seq.extend(sentence.iter().cloned());
            seq.push(EOS.to_string());
            for t in 1..seq.len() {
                for ctx_len in 0..config.order.min(t + 1) {
                    if ctx_len > t {
                        break;
                    }
                    model.add(seq[t - ctx_len..t].to_vec(), &seq[t], 1);
                }
            }
        }
        model.rebuild_vocab();
        Ok(model)
    }

    fn add(&mut self, context: Vec<String>, word: &str, count: u64) {
        let entry = self.tables[context.len()].entry(context).or_default();
        entry.total += count;
        *entry.words.entry(word.to_string()).or_insert(0) += count;
    }

    fn rebuild_vocab(&mut self) {
        let mut vocab: BTreeSet<String> = self.tables[0]
            .get(&Vec::new())
            .map(|c| c.words.keys().cloned().collect())
            .unwrap_or_default();
        vocab.insert(UNK.to_string());
        vocab.insert(EOS.to_string());
        self.vocab = vocab;
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn copy_weight(&self) -> f64 {
        self.copy_weight
    }

    pub fn context_mode(&self) -> ContextMode {
        self.context_mode
    }

    /// Predictable tokens, including `</s>`, `<unk>` and `[SEP]` when seen.
    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    /// Raw count of `word` following `context` (an empty context gives the
    /// unigram count).
    pub fn count(&self, context: &[String], word: &str) -> u64 {
        self.tables
            .get(context.len())
            .and_then(|t| t.get(context))
            .and_then(|c| c.words.get(word))
            .copied()
            .unwrap_or(0)
    }

    fn is_known(&self, token: &str) -> bool {
        token == BOS || self.vocab.contains(token)
    }

    /// Effective history the model conditions on, with unknown tokens mapped
    /// to `<unk>`.
    pub fn history(&self, ctx: &PredictionContext) -> Vec<String> {
        let mut history = vec![BOS.to_string()];
        if self.context_mode == ContextMode::Concat {
            if let Some(d) = &ctx.difficult {
                history.extend(d.iter().cloned());
                history.push(SEP.to_string());
            }
        }
        history.extend(ctx.typed.iter().cloned());
        history
            .into_iter()
            .map(|t| {
                if self.is_known(&t) {
                    t
                } else {
                    UNK.to_string()
                }
            })
            .collect()
    }

    fn effective_copy(&self, ctx: &PredictionContext) -> (f64, Vec<String>) {
        match (&self.context_mode, &ctx.difficult) {
            (ContextMode::Concat, Some(d)) if !d.is_empty() && self.copy_weight > 0.0 => {
                let mut seen = HashSet::new();
                let distinct: Vec<String> = d
                    .iter()
                    .filter(|t| seen.insert(t.as_str()))
                    .cloned()
                    .collect();
                (self.copy_weight, distinct)
            }
            _ => (0.0, Vec::new()),
        }
    }

    /// The complete predictive distribution over words with non-zero mass,
    /// sorted by probability.
    pub fn distribution(&self, ctx: &PredictionContext) -> Vec<(String, f64)> {
        let history = self.history(ctx);
        let mut active: Vec<(f64, &ContextCounts)> = Vec::new();
        for ctx_len in 1..self.order {
            if ctx_len > history.len() {
                break;
            }
            let context = &history[history.len() - ctx_len..];
            if let Some(counts) = self.tables[ctx_len].get(context) {
                if counts.total > 0 {
                    active.push((self.weights[ctx_len], counts));
                }
            }
        }
        let mut unigram_weight = self.weights[0];
        let mut norm = unigram_weight + active.iter().map(|(w, _)| w).sum::<f64>();
        if norm <= 0.0 {
            unigram_weight = 1.0;
            norm = 1.0;
        }

        let unigram = self.tables[0].get(&Vec::new());
        let total = unigram.map_or(0, |c| c.total) as f64;
        let denom = total + self.vocab.len() as f64;
        let (gamma, copy) = self.effective_copy(ctx);
        let base_scale = 1.0 - gamma;

        let mut dist: HashMap<&str, f64> = HashMap::with_capacity(self.vocab.len() + copy.len());
        for w in &self.vocab {
            let c = unigram.and_then(|u| u.words.get(w)).copied().unwrap_or(0) as f64;
            dist.insert(w, base_scale * (unigram_weight / norm) * (c + 1.0) / denom);
        }
        for (weight, counts) in &active {
            let scale = base_scale * (weight / norm) / counts.total as f64;
            for (w, &c) in &counts.words {
                *dist.entry(w.as_str()).or_insert(0.0) += scale * c as f64;
            }
        }
        if !copy.is_empty() {
            let share = gamma / copy.len() as f64;
            for w in &copy {
                *dist.entry(w.as_str()).or_insert(0.0) += share;
            }
        }
        let mut out: Vec<(String, f64)> = dist
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(w, p)| (w.to_string(), p))
            .collect();
        out.sort_by(super::rank_order);
        out
    }

    /// Top-`k` user-facing suggestions; reserved tokens never appear.
    pub fn suggest(&self, ctx: &PredictionContext, k: usize) -> SuggestionList {
        let candidates = self
            .distribution(ctx)
            .into_iter()
            .filter(|(w, _)| !is_reserved(w));
        SuggestionList::from_scores("", candidates, k)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{FORMAT_HEADER}")?;
        writeln!(out, "order\t{}", self.order)?;
        writeln!(out, "context_mode\t{}", self.context_mode)?;
        writeln!(out, "copy_weight\t{}", self.copy_weight)?;
        let weights: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        writeln!(out, "weights\t{}", weights.join("\t"))?;
        let mut grams: Vec<(Vec<&str>, u64)> = Vec::new();
        for table in &self.tables {
            for (context, counts) in table {
                for (word, &c) in &counts.words {
                    let mut gram: Vec<&str> = context.iter().map(String::as_str).collect();
                    gram.push(word);
                    grams.push((gram, c));
                }
            }
        }
        grams.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        for (gram, c) in grams {
            writeln!(out, "gram\t{c}\t{}", gram.join("\t"))?;
        }
        writeln!(out, "end")?;
        out.flush()
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self, ModelError> {
        let parse_err = |line: usize, reason: String| ModelError::Parse { line, reason };
        let mut lines = reader.lines().enumerate();
        let mut next = |expect: &str| -> Result<(usize, Vec<String>), ModelError> {
            let (n, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, format!("missing {expect}")))?;
            let line = line?;
            Ok((n + 1, line.split('\t').map(str::to_string).collect()))
        };
        let (n, header) = next("header")?;
        if header.join("\t") != FORMAT_HEADER {
            return Err(parse_err(n, "unrecognized header".into()));
        }
        let mut field = |name: &str| -> Result<(usize, Vec<String>), ModelError> {
            let (n, mut parts) = next(name)?;
            if parts.first().map(String::as_str) != Some(name) {
                return Err(parse_err(n, format!("expected {name}")));
            }
            parts.remove(0);
            Ok((n, parts))
        };
        let (n, v) = field("order")?;
        let order: usize = v
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(n, "bad order".into()))?;
        let (n, v) = field("context_mode")?;
        let context_mode: ContextMode = v
            .first()
            .ok_or_else(|| parse_err(n, "missing mode".into()))?
            .parse()
            .map_err(|e| parse_err(n, e))?;
        let (n, v) = field("copy_weight")?;
        let copy_weight: f64 = v
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(n, "bad copy weight".into()))?;
        let (n, v) = field("weights")?;
        let weights: Vec<f64> = v
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| parse_err(n, "bad weights".into()))?;
        let config = NGramConfig {
            order,
            weights: Some(weights.clone()),
            copy_weight,
            context_mode,
        };
        config.resolved_weights()?;

        let mut model = NGramModel {
            order,
            weights,
            copy_weight,
            context_mode,
            tables: vec![HashMap::new(); order],
            vocab: BTreeSet::new(),
        };
        loop {
            let (n, parts) = next("end")?;
            match parts.first().map(String::as_str) {
                Some("end") => break,
                Some("gram") if parts.len() >= 3 && parts.len() - 2 <= order => {
                    let count: u64 = parts[1]
                        .parse()
                        .map_err(|_| parse_err(n, "bad count".into()))?;
                    if count == 0 {
                        return Err(parse_err(n, "zero count".into()));
                    }
                    let word = &parts[parts.len() - 1];
                    model.add(parts[2..parts.len() - 1].to_vec(), word, count);
                }
                _ => return Err(parse_err(n, "expected gram or end".into())),
            }
        }
        model.rebuild_vocab();
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

impl Predictor for NGramModel {
    fn predict(&self, ctx: &PredictionContext, k: usize) -> Result<SuggestionList, BackendError> {
        Ok(self.suggest(ctx, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;

    fn corpus(lines: &[&str]) -> Vec<Vec<String>> {
        lines.iter().map(|l| tokenize(l)).collect()
    }

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn counts_bigrams() {
        let m = NGramModel::train(
            &corpus(&["a b", "a b"]),
            &NGramConfig::new(2, ContextMode::NoContext, 0.0),
        )
        .unwrap();
        assert_eq!(m.count(&toks("a"), "b"), 2);
        assert_eq!(m.count(&[BOS.to_string()], "a"), 2);
        assert_eq!(m.count(&[], "b"), 2);
        assert_eq!(m.count(&[], EOS), 2);
    }

    #[test]
    fn closed_unigram_vocabulary() {
        let m = NGramModel::train(
            &corpus(&["a"]),
            &NGramConfig::new(1, ContextMode::NoContext, 0.0),
        )
        .unwrap();
        let dist = m.distribution(&PredictionContext::default());
        let mut words: Vec<&str> = dist.iter().map(|(w, _)| w.as_str()).collect();
        words.sort();
        assert_eq!(words, vec!["</s>", "<unk>", "a"]);
        // add-one over 2 observed tokens and 3 types
        let p: HashMap<&str, f64> = dist.iter().map(|(w, p)| (w.as_str(), *p)).collect();
        assert!((p["a"] - 2.0 / 5.0).abs() < 1e-15);
        assert!((p[UNK] - 1.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn deterministic_training() {
        let c = corpus(&["the cells take up glucose .", "insulin tells the cells"]);
        let cfg = NGramConfig::new(3, ContextMode::Concat, 0.3);
        assert_eq!(
            NGramModel::train(&c, &cfg).unwrap(),
            NGramModel::train(&c, &cfg).unwrap()
        );
    }

    #[test]
    fn predicts_next_word_of_training_sentence() {
        let m = NGramModel::train(
            &corpus(&["this insulin tells the cells"]),
            &NGramConfig::new(3, ContextMode::NoContext, 0.0),
        )
        .unwrap();
        let ctx = PredictionContext::new(None, toks("this insulin"));
        let top = m.suggest(&ctx, 1);
        assert_eq!(top.top().unwrap().word, "tells");
        // λ = 1/3 each: trigram 1, bigram 1, unigram (1+1)/(6+7)
        let expected = (1.0 + 1.0 + 2.0 / 13.0) / 3.0;
        assert!((top.top().unwrap().prob - expected).abs() < 1e-15);
    }

    #[test]
    fn empty_corpus_and_bad_config() {
        assert!(matches!(
            NGramModel::train(&[], &NGramConfig::new(2, ContextMode::NoContext, 0.0)),
            Err(ModelError::EmptyCorpus)
        ));
        let mut cfg = NGramConfig::new(2, ContextMode::NoContext, 0.0);
        cfg.weights = Some(vec![0.7, 0.7]);
        assert!(NGramModel::train(&corpus(&["a"]), &cfg).is_err());
        assert!(NGramModel::train(
            &corpus(&["a"]),
            &NGramConfig::new(0, ContextMode::NoContext, 0.0)
        )
        .is_err());
    }

    #[test]
    fn long_prefix_hides_the_difficult_sentence() {
        let c = corpus(&[
            "glucose levels fall [SEP] sugar goes down .",
            "the cells take up sugar .",
        ]);
        let concat = NGramModel::train(&c, &NGramConfig::new(2, ContextMode::Concat, 0.0)).unwrap();
        let plain =
            NGramModel::train(&c, &NGramConfig::new(2, ContextMode::NoContext, 0.0)).unwrap();
        let ctx =
            PredictionContext::with_difficult(&toks("glucose levels fall"), &toks("sugar goes"));
        assert_eq!(concat.distribution(&ctx), plain.distribution(&ctx));
    }

    #[test]
    fn pure_copy_distribution() {
        let m = NGramModel::train(
            &corpus(&["a b c"]),
            &NGramConfig::new(2, ContextMode::Concat, 1.0),
        )
        .unwrap();
        let ctx = PredictionContext::with_difficult(&toks("x y x"), &toks("a"));
        let s = m.suggest(&ctx, 10);
        let got: Vec<(&str, f64)> = s
            .entries()
            .iter()
            .map(|e| (e.word.as_str(), e.prob))
            .collect();
        assert_eq!(got, vec![("x", 0.5), ("y", 0.5)]);
    }

    #[test]
    fn no_context_ignores_copy() {
        let m = NGramModel::train(
            &corpus(&["a b"]),
            &NGramConfig::new(2, ContextMode::NoContext, 0.9),
        )
        .unwrap();
        let with = m.distribution(&PredictionContext::with_difficult(&toks("zzz"), &toks("a")));
        let without = m.distribution(&PredictionContext::new(None, toks("a")));
        assert_eq!(with, without);
    }

    #[test]
    fn never_suggests_reserved_tokens() {
        let c = corpus(&["d e [SEP] a b", "d [SEP] a"]);
        let m = NGramModel::train(&c, &NGramConfig::new(3, ContextMode::Concat, 0.2)).unwrap();
        let ctx = PredictionContext::with_difficult(&toks("d e"), &toks("q"));
        let s = m.suggest(&ctx, 100);
        assert!(s.words().all(|w| !is_reserved(w)));
        assert!(!s.is_empty());
    }

    #[test]
    fn serialization_round_trip() {
        let c = corpus(&[
            "the cells take up glucose .",
            "insulin tells the cells",
            "a b [SEP] c",
        ]);
        let mut cfg = NGramConfig::new(3, ContextMode::Concat, 0.3);
        cfg.weights = Some(vec![0.1, 0.2, 0.7]);
        let m = NGramModel::train(&c, &cfg).unwrap();
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        let back = NGramModel::read_from(buf.as_slice()).unwrap();
        assert_eq!(m, back);
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(buf, again);
        assert!(NGramModel::read_from("nope\n".as_bytes()).is_err());
    }
}
