//! Term dictionary with approximate (character-trigram) lookup.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use super::tokenize::tokenize;
use super::CorpusError;

/// Longest term accepted, in tokens.
pub const MAX_TERM_TOKENS: usize = 8;

type Trigram = [char; 3];

/// A dictionary entry: the canonical (tokenized, space-joined) form of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    surface: String,
    token_count: usize,
}

impl Term {
    pub fn new(raw: &str) -> Result<Self, CorpusError> {
        let tokens = tokenize(raw);
        if tokens.is_empty() || tokens.len() > MAX_TERM_TOKENS {
            return Err(CorpusError::InvalidTerm(raw.to_string()));
        }
        Ok(Term {
            token_count: tokens.len(),
            surface: tokens.join(" "),
        })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn token_count(&self) -> usize {
        self.token_count
    }
}

/// Sorted, deduplicated character trigrams of `text`. Strings shorter than
/// three characters contribute a single padded gram so they still compare.
fn trigrams(text: &str) -> Vec<Trigram> {
    let chars: Vec<char> = text.chars().collect();
    let mut grams: Vec<Trigram> = if chars.len() < 3 {
        let mut g = ['\0'; 3];
        for (slot, c) in g.iter_mut().zip(&chars) {
            *slot = *c;
        }
        vec![g]
    } else {
        chars.windows(3).map(|w| [w[0], w[1], w[2]]).collect()
    };
    grams.sort_unstable();
    grams.dedup();
    grams
}

fn sorted_intersection(a: &[Trigram], b: &[Trigram]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn jaccard(inter: usize, a: usize, b: usize) -> f64 {
    let union = a + b - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Jaccard similarity between the character trigram sets of two strings.
pub fn string_similarity(a: &str, b: &str) -> f64 {
    let (ga, gb) = (trigrams(a), trigrams(b));
    jaccard(sorted_intersection(&ga, &gb), ga.len(), gb.len())
}

/// Similarity between a token span and a dictionary term, computed on the
/// space-joined lowercase forms.
pub fn term_similarity(candidate: &[String], term: &Term) -> f64 {
    let joined = candidate.join(" ").to_lowercase();
    string_similarity(&joined, term.surface())
}

#[derive(Debug, Clone, Default)]
pub struct Dictionary {
    terms: Vec<Term>,
    grams: Vec<usize>,
    index: HashMap<Trigram, Vec<u32>>,
    exact: HashSet<String>,
    max_term_tokens: usize,
}

impl Dictionary {
    pub fn new<I, S>(raw_terms: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut dict = Dictionary::default();
        for raw in raw_terms {
            dict.insert(Term::new(raw.as_ref())?);
        }
        Ok(dict)
    }

    /// Reads one term per line; blank lines are skipped.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, CorpusError> {
        let mut dict = Dictionary::default();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            dict.insert(Term::new(&line)?);
        }
        Ok(dict)
    }

    pub fn insert(&mut self, term: Term) -> bool {
        if !self.exact.insert(term.surface.clone()) {
            return false;
        }
        let id = self.terms.len() as u32;
        let grams = trigrams(&term.surface);
        self.grams.push(grams.len());
        for g in grams {
            self.index.entry(g).or_default().push(id);
        }
        self.max_term_tokens = self.max_term_tokens.max(term.token_count);
        self.terms.push(term);
        true
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn max_term_tokens(&self) -> usize {
        self.max_term_tokens
    }

    /// Highest similarity of `candidate` against any term, or `None` for an
    /// empty dictionary.
    pub fn best_similarity(&self, candidate: &[String]) -> Option<f64> {
        if self.terms.is_empty() {
            return None;
        }
        let joined = candidate.join(" ").to_lowercase();
        if self.exact.contains(&joined) {
            return Some(1.0);
        }
        let query = trigrams(&joined);
        let mut shared: HashMap<u32, usize> = HashMap::new();
        for g in &query {
            if let Some(ids) = self.index.get(g) {
                for &id in ids {
                    *shared.entry(id).or_insert(0) += 1;
                }
            }
        }
        let best = shared
            .iter()
            .map(|(&id, &inter)| jaccard(inter, query.len(), self.grams[id as usize]))
            .fold(0.0_f64, f64::max);
        Some(best)
    }

    /// Non-overlapping spans `(start, len)` whose best similarity reaches
    /// `threshold`. Spans are scanned left to right by end position and a
    /// span is taken as soon as it ends, which yields the largest possible
    /// number of disjoint matches.
    pub fn find_matches(&self, tokens: &[String], threshold: f64) -> Vec<(usize, usize)> {
        let mut found = Vec::new();
        let mut free_from = 0;
        for end in 1..=tokens.len() {
            let longest = self.max_term_tokens.min(end - free_from);
            for len in (1..=longest).rev() {
                let start = end - len;
                let hit = self
                    .best_similarity(&tokens[start..end])
                    .is_some_and(|s| s >= threshold);
                if hit {
                    found.push((start, len));
                    free_from = end;
                    break;
                }
            }
        }
        found
    }

    pub fn count_matches(&self, tokens: &[String], threshold: f64) -> usize {
        self.find_matches(tokens, threshold).len()
    }
}

/// Number of disjoint dictionary matches in `tokens` at `threshold`.
pub fn count_term_matches(tokens: &[String], dict: &Dictionary, threshold: f64) -> usize {
    dict.count_matches(tokens, threshold)
}
