//! Test support: random corpora and a dense brute-force reference of the
//! whole build pipeline, written without any of the crate's matrix code.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use emolex::{validate_votes, Corpus, EmotionSet, LemmaPos, VocabularyFilter, WeightingScheme};
use rand::Rng;

pub const EMOTIONS: usize = 8;

#[derive(Debug, Clone)]
pub struct PlainDoc {
    pub id: String,
    pub tokens: Vec<String>,
    pub votes: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PlainCorpus {
    pub docs: Vec<PlainDoc>,
    pub vocab: BTreeSet<String>,
}

impl PlainCorpus {
    pub fn to_corpus(&self) -> Corpus {
        let mut c = Corpus::new(EmotionSet::default());
        for d in &self.docs {
            let toks: Vec<LemmaPos> = d
                .tokens
                .iter()
                .map(|t| LemmaPos::parse(t).unwrap())
                .collect();
            c.push(&d.id, &toks, validate_votes(&d.votes).unwrap())
                .unwrap();
        }
        c
    }

    pub fn vocab_filter(&self) -> VocabularyFilter {
        VocabularyFilter::new(self.vocab.iter().map(|t| LemmaPos::parse(t).unwrap())).unwrap()
    }
}

const POS: [char; 4] = ['n', 'v', 'a', 'r'];

/// Up to `max_docs` documents over up to `max_words` in-vocabulary words plus a
/// few out-of-vocabulary ones. Votes are random distributions, sometimes sparse.
pub fn random_corpus(rng: &mut impl Rng, max_docs: usize, max_words: usize) -> PlainCorpus {
    let n_docs = rng.gen_range(2..=max_docs);
    let n_words = rng.gen_range(2..=max_words);
    let words: Vec<String> = (0..n_words)
        .map(|i| format!("w{i:02}#{}", POS[rng.gen_range(0..4)]))
        .collect();
    let oov: Vec<String> = (0..5).map(|i| format!("oov{i}#n")).collect();
    let docs = (0..n_docs)
        .map(|d| {
            let len = rng.gen_range(0..40);
            let tokens = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        oov[rng.gen_range(0..oov.len())].clone()
                    } else {
                        words[rng.gen_range(0..words.len())].clone()
                    }
                })
                .collect();
            let mut votes: Vec<f64> = (0..EMOTIONS)
                .map(|_| {
                    if rng.gen_bool(0.7) {
                        rng.gen_range(0.01..1.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            if votes.iter().all(|v| *v == 0.0) {
                votes[rng.gen_range(0..EMOTIONS)] = 1.0;
            }
            let s: f64 = votes.iter().sum();
            votes.iter_mut().for_each(|v| *v /= s);
            PlainDoc {
                id: format!("doc_{d:03}"),
                tokens,
                votes,
            }
        })
        .collect();
    PlainCorpus {
        docs,
        vocab: words.into_iter().collect(),
    }
}

#[derive(Debug, PartialEq)]
pub enum ReferenceError {
    NoDocuments,
    ZeroColumn(usize),
    Empty,
}

/// Dense reference pipeline: filter, count, weight, multiply, normalize.
/// Word order is plain string order of the `lemma#pos` keys.
pub fn reference_lexicon(
    corpus: &PlainCorpus,
    scheme: WeightingScheme,
) -> Result<BTreeMap<String, Vec<f64>>, ReferenceError> {
    let docs: Vec<(Vec<&String>, &Vec<f64>)> = corpus
        .docs
        .iter()
        .map(|d| {
            (
                d.tokens
                    .iter()
                    .filter(|t| corpus.vocab.contains(*t))
                    .collect::<Vec<_>>(),
                &d.votes,
            )
        })
        .filter(|(t, _)| !t.is_empty())
        .collect();
    if docs.is_empty() {
        return Err(ReferenceError::NoDocuments);
    }
    let words: Vec<&String> = docs
        .iter()
        .flat_map(|(t, _)| t.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = docs.len();

    let mut counts = vec![vec![0.0f64; n]; words.len()];
    for (w, word) in words.iter().enumerate() {
        for (d, (toks, _)) in docs.iter().enumerate() {
            for t in toks {
                if t == word {
                    counts[w][d] += 1.0;
                }
            }
        }
    }
    let mut weights = vec![vec![0.0f64; n]; words.len()];
    for w in 0..words.len() {
        let df = counts[w].iter().filter(|c| **c > 0.0).count() as f64;
        for d in 0..n {
            let len = docs[d].0.len() as f64;
            weights[w][d] = match scheme {
                WeightingScheme::Raw => counts[w][d],
                WeightingScheme::Normalized => counts[w][d] / len,
                WeightingScheme::TfIdf => counts[w][d] * (n as f64 / df).ln(),
            };
        }
    }

    let mut raw = vec![vec![0.0f64; EMOTIONS]; words.len()];
    for w in 0..words.len() {
        for e in 0..EMOTIONS {
            for d in 0..n {
                raw[w][e] += weights[w][d] * docs[d].1[e];
            }
        }
    }
    // rows with no weight anywhere never reach the normalizations
    let kept: Vec<usize> = (0..words.len())
        .filter(|w| weights[*w].iter().any(|x| *x != 0.0))
        .collect();

    for e in 0..EMOTIONS {
        let col: f64 = kept.iter().map(|w| raw[*w][e]).sum();
        if col == 0.0 {
            return Err(ReferenceError::ZeroColumn(e));
        }
        for w in &kept {
            raw[*w][e] /= col;
        }
    }
    let mut out = BTreeMap::new();
    for w in kept {
        let s: f64 = raw[w].iter().sum();
        if s > 0.0 {
            out.insert(words[w].clone(), raw[w].iter().map(|x| x / s).collect());
        }
    }
    if out.is_empty() {
        return Err(ReferenceError::Empty);
    }
    Ok(out)
}

/// Largest absolute entry difference, or `None` when key sets differ.
pub fn max_lexicon_diff(
    lex: &emolex::EmotionLexicon,
    reference: &BTreeMap<String, Vec<f64>>,
) -> Option<f64> {
    if lex.len() != reference.len() {
        return None;
    }
    let mut worst = 0.0f64;
    for ((term, row), (key, expected)) in lex.iter().zip(reference) {
        if term.to_string() != *key {
            return None;
        }
        for (a, b) in row.iter().zip(expected) {
            worst = worst.max((a - b).abs());
        }
    }
    Some(worst)
}

/// Peak resident set size of this process in bytes (Linux only).
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}
