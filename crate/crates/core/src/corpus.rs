//! Vote-annotated document corpus and the document-by-emotion matrix.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, LineError, LineErrors, Result};
use crate::textpipe::{LemmaPos, TextPipeline, VocabularyFilter};

/// Tolerance on the raw vote sum before proportional renormalization.
pub const VOTE_SUM_TOLERANCE: f64 = 1e-2;

/// Ordered, upper-case emotion labels shared by every vector in a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmotionSet {
    labels: Vec<String>,
}

impl EmotionSet {
    /// Mood Meter labels used by the reference news corpus.
    pub const RAPPLER: [&'static str; 8] = [
        "AFRAID",
        "AMUSED",
        "ANGRY",
        "ANNOYED",
        "DONT_CARE",
        "HAPPY",
        "INSPIRED",
        "SAD",
    ];

    pub fn new<S: AsRef<str>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut out: Vec<String> = Vec::new();
        for label in labels {
            let label = label.as_ref().trim().to_uppercase();
            if label.is_empty() {
                return Err(Error::EmotionSet("empty label".into()));
            }
            if label.contains(char::is_whitespace) {
                return Err(Error::EmotionSet(format!(
                    "label {label:?} contains whitespace"
                )));
            }
            if out.contains(&label) {
                return Err(Error::EmotionSet(format!("duplicate label {label}")));
            }
            out.push(label);
        }
        if out.is_empty() {
            return Err(Error::EmotionSet("no labels".into()));
        }
        Ok(EmotionSet { labels: out })
    }

    /// Parses a comma-separated label list.
    pub fn parse_list(s: &str) -> Result<Self> {
        EmotionSet::new(s.split(','))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Index of `label` after case normalization.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        let label = label.trim().to_uppercase();
        self.labels.iter().position(|l| *l == label)
    }
}

impl Default for EmotionSet {
    fn default() -> Self {
        EmotionSet::new(EmotionSet::RAPPLER).expect("static label set is valid")
    }
}

impl fmt::Display for EmotionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.labels.join(","))
    }
}

/// Per-emotion vote fractions summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteVector(Vec<f64>);

impl VoteVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Validates raw vote fractions and renormalizes them to sum to one.
///
/// Sums within [`VOTE_SUM_TOLERANCE`] of one are treated as display rounding
/// and divided out; anything further off is rejected as corrupt.
pub fn validate_votes(raw: &[f64]) -> Result<VoteVector> {
    if raw.is_empty() {
        return Err(Error::Votes("no emotions".into()));
    }
    if let Some(v) = raw.iter().find(|v| !v.is_finite()) {
        return Err(Error::Votes(format!("non-finite entry {v}")));
    }
    if let Some(v) = raw.iter().find(|v| **v < 0.0) {
        return Err(Error::Votes(format!("negative entry {v}")));
    }
    let sum: f64 = raw.iter().sum();
    if sum == 0.0 {
        return Err(Error::Votes("document with no votes".into()));
    }
    if (sum - 1.0).abs() > VOTE_SUM_TOLERANCE {
        return Err(Error::Votes(format!(
            "votes sum to {sum}, more than {VOTE_SUM_TOLERANCE} away from 1"
        )));
    }
    Ok(VoteVector(raw.iter().map(|v| v / sum).collect()))
}

/// Index into a corpus [`TermTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

/// Interner for `lemma#pos` tokens.
#[derive(Debug, Clone, Default)]
pub struct TermTable {
    terms: Vec<LemmaPos>,
    ids: HashMap<LemmaPos, TermId>,
}

impl TermTable {
    pub fn intern(&mut self, lp: &LemmaPos) -> TermId {
        if let Some(id) = self.ids.get(lp) {
            return *id;
        }
        let id =
            TermId(u32::try_from(self.terms.len()).expect("more than u32::MAX distinct terms"));
        self.terms.push(lp.clone());
        self.ids.insert(lp.clone(), id);
        id
    }

    pub fn get(&self, id: TermId) -> &LemmaPos {
        &self.terms[id.0 as usize]
    }

    pub fn id_of(&self, lp: &LemmaPos) -> Option<TermId> {
        self.ids.get(lp).copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TermId, &LemmaPos)> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, lp)| (TermId(i as u32), lp))
    }
}

/// One document: its interned token stream and its vote distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentRecord {
    pub id: String,
    pub tokens: Vec<TermId>,
    /// Token count as ingested, before any vocabulary filtering.
    pub source_len: usize,
    pub votes: VoteVector,
}

/// Documents sharing one emotion set and one term interner.
#[derive(Debug, Clone)]
pub struct Corpus {
    emotions: EmotionSet,
    terms: TermTable,
    docs: Vec<DocumentRecord>,
    index: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(emotions: EmotionSet) -> Self {
        Corpus {
            emotions,
            terms: TermTable::default(),
            docs: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn emotions(&self) -> &EmotionSet {
        &self.emotions
    }

    pub fn terms(&self) -> &TermTable {
        &self.terms
    }

    pub fn docs(&self) -> &[DocumentRecord] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn intern(&mut self, lp: &LemmaPos) -> TermId {
        self.terms.intern(lp)
    }

    /// Adds a document; rejects duplicate ids and vote vectors of the wrong width.
    pub fn push(&mut self, id: &str, tokens: &[LemmaPos], votes: VoteVector) -> Result<()> {
        let ids: Vec<TermId> = tokens.iter().map(|t| self.terms.intern(t)).collect();
        self.push_interned(id, ids, votes)
    }

    pub fn push_interned(
        &mut self,
        id: &str,
        tokens: Vec<TermId>,
        votes: VoteVector,
    ) -> Result<()> {
        if votes.len() != self.emotions.len() {
            return Err(Error::Votes(format!(
                "document {id}: {} vote entries for {} emotions",
                votes.len(),
                self.emotions.len()
            )));
        }
        if let Some(t) = tokens.iter().find(|t| t.0 as usize >= self.terms.len()) {
            return Err(Error::Votes(format!(
                "document {id}: unknown term id {}",
                t.0
            )));
        }
        if self.index.contains_key(id) {
            return Err(Error::Votes(format!("duplicate doc_id {id}")));
        }
        self.index.insert(id.to_string(), self.docs.len());
        self.docs.push(DocumentRecord {
            id: id.to_string(),
            source_len: tokens.len(),
            tokens,
            votes,
        });
        Ok(())
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Copy of the corpus with every token outside `vocab` removed.
    /// `source_len` is kept, so raw document lengths stay available.
    pub fn filter_vocabulary(&self, vocab: &VocabularyFilter) -> Corpus {
        let keep: Vec<bool> = self
            .terms
            .iter()
            .map(|(_, lp)| vocab.contains(lp))
            .collect();
        let docs = self
            .docs
            .iter()
            .map(|d| DocumentRecord {
                id: d.id.clone(),
                tokens: d
                    .tokens
                    .iter()
                    .copied()
                    .filter(|t| keep[t.0 as usize])
                    .collect(),
                source_len: d.source_len,
                votes: d.votes.clone(),
            })
            .collect();
        Corpus {
            emotions: self.emotions.clone(),
            terms: self.terms.clone(),
            docs,
            index: self.index.clone(),
        }
    }

    /// SHA-256 over ids, token strings and votes, in document order.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.emotions.to_string().as_bytes());
        for doc in &self.docs {
            hasher.update(b"\n");
            hasher.update(doc.id.as_bytes());
            for t in &doc.tokens {
                hasher.update(b" ");
                hasher.update(self.terms.get(*t).to_string().as_bytes());
            }
            for v in doc.votes.values() {
                hasher.update(v.to_le_bytes());
            }
        }
        hex::encode(hasher.finalize())
    }

    /// Full document-by-emotion matrix, rows in document order.
    pub fn doc_emotion_matrix(&self) -> DocEmotionMatrix {
        DocEmotionMatrix::from_records(self.emotions.clone(), self.docs.iter())
    }
}

/// Dense documents x emotions matrix of vote fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct DocEmotionMatrix {
    emotions: EmotionSet,
    doc_ids: Vec<String>,
    values: Vec<f64>,
}

impl DocEmotionMatrix {
    pub fn from_records<'a>(
        emotions: EmotionSet,
        records: impl IntoIterator<Item = &'a DocumentRecord>,
    ) -> Self {
        let mut doc_ids = Vec::new();
        let mut values = Vec::new();
        for r in records {
            doc_ids.push(r.id.clone());
            values.extend_from_slice(r.votes.values());
        }
        DocEmotionMatrix {
            emotions,
            doc_ids,
            values,
        }
    }

    /// Builds from explicit rows; each row must have one value per emotion.
    pub fn from_rows(emotions: EmotionSet, rows: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let k = emotions.len();
        let mut doc_ids = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len() * k);
        for (id, row) in rows {
            if row.len() != k {
                return Err(Error::Votes(format!(
                    "document {id}: {} values for {k} emotions",
                    row.len()
                )));
            }
            doc_ids.push(id);
            values.extend(row);
        }
        Ok(DocEmotionMatrix {
            emotions,
            doc_ids,
            values,
        })
    }

    pub fn emotions(&self) -> &EmotionSet {
        &self.emotions
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.emotions.len();
        &self.values[i * k..(i + 1) * k]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub doc_count: usize,
    pub token_count: usize,
    pub mean_votes: Vec<f64>,
    pub mean_doc_length: f64,
}

pub fn corpus_stats(corpus: &Corpus) -> Result<CorpusStats> {
    let n = corpus.len();
    if n == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut sums = vec![0.0; corpus.emotions().len()];
    let mut token_count = 0usize;
    for doc in corpus.docs() {
        token_count += doc.source_len;
        for (s, v) in sums.iter_mut().zip(doc.votes.values()) {
            *s += v;
        }
    }
    Ok(CorpusStats {
        doc_count: n,
        token_count,
        mean_votes: sums.into_iter().map(|s| s / n as f64).collect(),
        mean_doc_length: token_count as f64 / n as f64,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    #[serde(default)]
    tokens: Option<Vec<String>>,
    #[serde(default)]
    text: Option<String>,
    votes: Option<BTreeMap<String, f64>>,
}

/// Options for [`parse_corpus`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions<'a> {
    /// Pipeline for records carrying raw `text`; such records fail without one.
    pub pipeline: Option<&'a TextPipeline>,
    /// Records whose raw vote sum is below this are skipped instead of validated.
    pub min_votes_sum: f64,
}

/// Result of [`parse_corpus`]: the corpus plus the ids skipped by the
/// minimum-vote filter.
#[derive(Debug, Clone)]
pub struct ParsedCorpus {
    pub corpus: Corpus,
    pub skipped_low_votes: Vec<String>,
}

/// Reads a line-delimited corpus, one JSON object per line:
/// `{"id": .., "tokens": ["lemma#p", ..] | "text": "..", "votes": {"LABEL": x, ..}}`.
///
/// All malformed lines are collected and reported together with their line
/// numbers; duplicate ids name both lines.
pub fn parse_corpus(
    reader: impl BufRead,
    emotions: &EmotionSet,
    options: ParseOptions<'_>,
) -> Result<ParsedCorpus> {
    let mut corpus = Corpus::new(emotions.clone());
    let mut errors: Vec<LineError> = Vec::new();
    let mut first_seen: HashMap<String, usize> = HashMap::new();
    let mut skipped_low_votes = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                errors.push(LineError::new(lineno, format!("unreadable: {e}")));
                continue;
            }
        };
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                errors.push(LineError::new(lineno, format!("invalid record: {e}")));
                continue;
            }
        };
        if let Some(prev) = first_seen.get(&raw.id) {
            errors.push(LineError::new(
                lineno,
                format!("duplicate doc_id {:?} (first seen on line {prev})", raw.id),
            ));
            continue;
        }
        first_seen.insert(raw.id.clone(), lineno);

        let Some(vote_map) = raw.votes else {
            errors.push(LineError::new(lineno, "missing votes"));
            continue;
        };
        let mut raw_votes = vec![0.0; emotions.len()];
        let mut bad_key = None;
        for (key, value) in &vote_map {
            match emotions.index_of(key) {
                Some(i) => raw_votes[i] += value,
                None => {
                    bad_key = Some(key.clone());
                    break;
                }
            }
        }
        if let Some(key) = bad_key {
            errors.push(LineError::new(lineno, format!("unknown emotion {key:?}")));
            continue;
        }
        let raw_sum: f64 = raw_votes.iter().sum();
        if raw_sum < options.min_votes_sum {
            skipped_low_votes.push(raw.id);
            continue;
        }
        let votes = match validate_votes(&raw_votes) {
            Ok(v) => v,
            Err(e) => {
                errors.push(LineError::new(lineno, e.to_string()));
                continue;
            }
        };

        let tokens: Vec<LemmaPos> = match (raw.tokens, raw.text) {
            (Some(tokens), None) => {
                match tokens
                    .iter()
                    .map(|t| LemmaPos::parse(t))
                    .collect::<Result<Vec<_>>>()
                {
                    Ok(t) => t,
                    Err(e) => {
                        errors.push(LineError::new(lineno, e.to_string()));
                        continue;
                    }
                }
            }
            (None, Some(text)) => match options.pipeline {
                Some(p) => p.process(&text),
                None => {
                    errors.push(LineError::new(
                        lineno,
                        "raw text record but no text pipeline configured",
                    ));
                    continue;
                }
            },
            (Some(_), Some(_)) => {
                errors.push(LineError::new(lineno, "both tokens and text given"));
                continue;
            }
            (None, None) => {
                errors.push(LineError::new(lineno, "neither tokens nor text given"));
                continue;
            }
        };
        if let Err(e) = corpus.push(&raw.id, &tokens, votes) {
            errors.push(LineError::new(lineno, e.to_string()));
        }
    }

    if !errors.is_empty() {
        return Err(Error::Corpus(LineErrors(errors)));
    }
    Ok(ParsedCorpus {
        corpus,
        skipped_low_votes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Corpus> {
        parse_corpus(
            text.as_bytes(),
            &EmotionSet::default(),
            ParseOptions::default(),
        )
        .map(|p| p.corpus)
    }

    #[test]
    fn table_rows_parse() {
        let text = concat!(
            r#"{"id":"doc_10002","tokens":["awe#n"],"votes":{"AFRAID":0.75,"INSPIRED":0.25}}"#,
            "\n",
            r#"{"id":"doc_10003","tokens":[],"votes":{"AMUSED":0.50,"ANNOYED":0.16,"DONT_CARE":0.17,"HAPPY":0.17}}"#,
            "\n"
        );
        let corpus = parse(text).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.docs()[0].id, "doc_10002");
        assert_eq!(
            corpus.docs()[0].votes.values(),
            &[0.75, 0.0, 0.0, 0.0, 0.0, 0.0, 0.25, 0.0]
        );
        let v = corpus.docs()[1].votes.values();
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((v[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_stream() {
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn validate_examples() {
        let doc_10011 = [0.40, 0.0, 0.0, 0.20, 0.0, 0.20, 0.20, 0.0];
        let v = validate_votes(&doc_10011).unwrap();
        for (a, b) in v.values().iter().zip(doc_10011) {
            assert!((a - b).abs() < 1e-12);
        }
        let uniform = [0.125; 8];
        assert_eq!(validate_votes(&uniform).unwrap().values(), &uniform);
        let mut low = [0.0; 8];
        low[0] = 0.4975;
        low[1] = 0.4975;
        let v = validate_votes(&low).unwrap();
        assert_eq!(&v.values()[..3], &[0.5, 0.5, 0.0]);
        // a 0.98 sum is outside the tolerance
        low[0] = 0.49;
        low[1] = 0.49;
        assert!(validate_votes(&low).is_err());
    }

    #[test]
    fn validate_errors() {
        assert!(validate_votes(&[0.5, -0.1, 0.6]).is_err());
        let e = validate_votes(&[0.0, 0.0]).unwrap_err();
        assert!(e.to_string().contains("no votes"));
        assert!(validate_votes(&[0.5, 0.3]).is_err());
        assert!(validate_votes(&[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = concat!(
            r#"{"id":"a","tokens":[],"votes":{"AFRAID":1}}"#,
            "\n",
            r#"{"id":"b","tokens":[],"votes":{"BORED":1}}"#,
            "\n",
            "not json\n",
            r#"{"id":"a","tokens":[],"votes":{"SAD":1}}"#,
            "\n",
        );
        let err = parse(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("BORED"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("line 4") && msg.contains("line 1"), "{msg}");
        assert!(msg.contains("3 failing line(s)"), "{msg}");
    }

    #[test]
    fn missing_votes_and_bad_tokens() {
        assert!(parse(r#"{"id":"a","tokens":[]}"#).is_err());
        assert!(parse(r#"{"id":"a","tokens":["Kill"],"votes":{"SAD":1}}"#).is_err());
        assert!(parse(r#"{"id":"a","text":"kill","votes":{"SAD":1}}"#).is_err());
        assert!(parse(r#"{"id":"a","votes":{"SAD":1}}"#).is_err());
    }

    #[test]
    fn absent_keys_read_as_zero_and_case_is_normalized() {
        let c = parse(r#"{"id":"a","tokens":["kill#v"],"votes":{"sad":1}}"#).unwrap();
        assert_eq!(c.docs()[0].votes.values()[7], 1.0);
    }

    #[test]
    fn raw_text_uses_pipeline() {
        let pipeline = TextPipeline::default();
        let c = parse_corpus(
            r#"{"id":"a","text":"Kill 22 people","votes":{"SAD":1}}"#.as_bytes(),
            &EmotionSet::default(),
            ParseOptions {
                pipeline: Some(&pipeline),
                min_votes_sum: 0.0,
            },
        )
        .unwrap()
        .corpus;
        let toks: Vec<String> = c.docs()[0]
            .tokens
            .iter()
            .map(|t| c.terms().get(*t).to_string())
            .collect();
        assert_eq!(toks, vec!["kill#n", "people#n"]);
    }

    #[test]
    fn min_votes_sum_skips_instead_of_failing() {
        let text = concat!(
            r#"{"id":"a","tokens":[],"votes":{}}"#,
            "\n",
            r#"{"id":"b","tokens":[],"votes":{"SAD":1}}"#
        );
        assert!(parse(text).is_err());
        let parsed = parse_corpus(
            text.as_bytes(),
            &EmotionSet::default(),
            ParseOptions {
                pipeline: None,
                min_votes_sum: 0.5,
            },
        )
        .unwrap();
        assert_eq!(parsed.corpus.len(), 1);
        assert_eq!(parsed.skipped_low_votes, vec!["a".to_string()]);
    }

    #[test]
    fn stats_examples() {
        let mut c = Corpus::new(EmotionSet::default());
        let mut a = [0.0; 8];
        a[0] = 1.0;
        let mut h = [0.0; 8];
        h[5] = 1.0;
        c.push("a", &[], validate_votes(&a).unwrap()).unwrap();
        let single = corpus_stats(&c).unwrap();
        assert_eq!(single.mean_votes, a.to_vec());
        c.push("h", &[], validate_votes(&h).unwrap()).unwrap();
        let s = corpus_stats(&c).unwrap();
        assert_eq!(s.mean_votes, vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0]);
        assert!(matches!(
            corpus_stats(&Corpus::new(EmotionSet::default())),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn emotion_set_rules() {
        assert!(EmotionSet::new(["a", "A"]).is_err());
        assert!(EmotionSet::new([""]).is_err());
        assert!(EmotionSet::new(Vec::<String>::new()).is_err());
        let e = EmotionSet::parse_list("fear, joy").unwrap();
        assert_eq!(e.labels(), &["FEAR".to_string(), "JOY".to_string()]);
        assert_eq!(e.index_of("joy"), Some(1));
    }
}
