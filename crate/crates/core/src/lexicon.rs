//! Word-by-emotion lexicon: matrix product with the vote matrix, column then
//! row normalization, and the tab-separated lexicon file format.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::{Corpus, DocEmotionMatrix, EmotionSet};
use crate::error::{Error, LineError, Result};
use crate::format::{format_sig9, Metadata};
use crate::matrix::{
    apply_weighting, count_terms, NfLength, TermDocumentMatrix, WeightingScheme, TFIDF_VARIANT,
};
use crate::textpipe::{LemmaPos, VocabularyFilter};

/// Row-sum tolerance accepted when loading a lexicon file.
pub const READ_ROW_SUM_TOLERANCE: f64 = 1e-6;

const KEY_HEADER: &str = "Lemma#PoS";

/// Dense words x emotions matrix, row-major, rows sorted by key.
#[derive(Debug, Clone, PartialEq)]
pub struct WordEmotionMatrix {
    emotions: EmotionSet,
    terms: Vec<LemmaPos>,
    values: Vec<f64>,
}

impl WordEmotionMatrix {
    pub fn new(emotions: EmotionSet, terms: Vec<LemmaPos>, values: Vec<f64>) -> Result<Self> {
        if values.len() != terms.len() * emotions.len() {
            return Err(Error::Evaluation(format!(
                "{} values for {} x {} matrix",
                values.len(),
                terms.len(),
                emotions.len()
            )));
        }
        Ok(WordEmotionMatrix {
            emotions,
            terms,
            values,
        })
    }

    pub fn emotions(&self) -> &EmotionSet {
        &self.emotions
    }

    pub fn terms(&self) -> &[LemmaPos] {
        &self.terms
    }

    pub fn n_rows(&self) -> usize {
        self.terms.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let k = self.emotions.len();
        &self.values[r * k..(r + 1) * k]
    }

    pub fn get(&self, r: usize, e: usize) -> f64 {
        self.values[r * self.emotions.len() + e]
    }

    /// Multiplies emotion column `e` by `factor`.
    pub fn scale_column(&mut self, e: usize, factor: f64) {
        let k = self.emotions.len();
        for r in 0..self.terms.len() {
            self.values[r * k + e] *= factor;
        }
    }
}

/// `out[w, e] = sum_d wd[w, d] * de[d, e]`.
///
/// Documents are matched by id. Each inner sum runs in ascending column
/// order of `wd`, so results are identical for any thread count.
pub fn emotion_product(
    wd: &TermDocumentMatrix,
    de: &DocEmotionMatrix,
) -> Result<WordEmotionMatrix> {
    let de_index: std::collections::HashMap<&str, usize> = de
        .doc_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let wd_ids: HashSet<&str> = wd.doc_ids().iter().map(String::as_str).collect();
    let mut only_in_matrix: Vec<String> = wd
        .doc_ids()
        .iter()
        .filter(|id| !de_index.contains_key(id.as_str()))
        .cloned()
        .collect();
    let mut only_in_votes: Vec<String> = de
        .doc_ids()
        .iter()
        .filter(|id| !wd_ids.contains(id.as_str()))
        .cloned()
        .collect();
    if !only_in_matrix.is_empty()
        || !only_in_votes.is_empty()
        || de_index.len() != de.doc_ids().len()
    {
        only_in_matrix.sort();
        only_in_votes.sort();
        return Err(Error::DocumentSetMismatch {
            only_in_matrix,
            only_in_votes,
        });
    }
    let de_row: Vec<usize> = wd
        .doc_ids()
        .iter()
        .map(|id| de_index[id.as_str()])
        .collect();

    let k = de.emotions().len();
    let values: Vec<f64> = (0..wd.n_rows())
        .into_par_iter()
        .flat_map_iter(|r| {
            let mut acc = vec![0.0; k];
            for (c, w) in wd.row(r) {
                for (a, v) in acc.iter_mut().zip(de.row(de_row[c])) {
                    *a += w * v;
                }
            }
            acc
        })
        .collect();
    WordEmotionMatrix::new(de.emotions().clone(), wd.terms().to_vec(), values)
}

/// How each emotion column is rescaled before row scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColumnNorm {
    /// Divide by the column sum; each column becomes a distribution over words.
    #[default]
    Sum,
    /// Divide by the column maximum.
    Max,
}

impl fmt::Display for ColumnNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnNorm::Sum => "sum",
            ColumnNorm::Max => "max",
        })
    }
}

impl FromStr for ColumnNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(ColumnNorm::Sum),
            "max" => Ok(ColumnNorm::Max),
            _ => Err(format!(
                "unknown column normalization {s:?} (expected sum|max)"
            )),
        }
    }
}

pub fn column_normalize(mat: &WordEmotionMatrix, mode: ColumnNorm) -> Result<WordEmotionMatrix> {
    let k = mat.emotions.len();
    let mut scale = vec![0.0; k];
    for r in 0..mat.n_rows() {
        for (s, v) in scale.iter_mut().zip(mat.row(r)) {
            match mode {
                ColumnNorm::Sum => *s += v,
                ColumnNorm::Max => *s = f64::max(*s, *v),
            }
        }
    }
    if let Some(e) = scale.iter().position(|s| *s <= 0.0) {
        return Err(Error::ZeroEmotionColumn(mat.emotions.labels()[e].clone()));
    }
    let values = mat
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v / scale[i % k])
        .collect();
    Ok(WordEmotionMatrix {
        emotions: mat.emotions.clone(),
        terms: mat.terms.clone(),
        values,
    })
}

/// Divides every row by its sum. Rows summing to zero are removed; their
/// number is returned alongside.
pub fn row_scale(mat: &WordEmotionMatrix) -> (WordEmotionMatrix, usize) {
    let mut terms = Vec::with_capacity(mat.n_rows());
    let mut values = Vec::with_capacity(mat.values.len());
    let mut dropped = 0;
    for (r, term) in mat.terms.iter().enumerate() {
        let row = mat.row(r);
        let sum: f64 = row.iter().sum();
        if sum <= 0.0 {
            dropped += 1;
            continue;
        }
        terms.push(term.clone());
        values.extend(row.iter().map(|v| v / sum));
    }
    (
        WordEmotionMatrix {
            emotions: mat.emotions.clone(),
            terms,
            values,
        },
        dropped,
    )
}

/// Words with per-emotion scores; every row sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionLexicon {
    emotions: EmotionSet,
    terms: Vec<LemmaPos>,
    scores: Vec<f64>,
    metadata: Metadata,
}

impl EmotionLexicon {
    /// Builds a lexicon from rows, sorting them by key. Rows must be
    /// non-negative and sum to one within [`READ_ROW_SUM_TOLERANCE`].
    pub fn new(
        emotions: EmotionSet,
        mut rows: Vec<(LemmaPos, Vec<f64>)>,
        metadata: Metadata,
    ) -> Result<Self> {
        let k = emotions.len();
        for (term, row) in &rows {
            if let Some(problem) = row_defect(row, k) {
                return Err(Error::Evaluation(format!("lexicon row {term}: {problem}")));
            }
        }
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Evaluation(format!(
                "duplicate lexicon entry {}",
                w[0].0
            )));
        }
        let mut terms = Vec::with_capacity(rows.len());
        let mut scores = Vec::with_capacity(rows.len() * k);
        for (t, row) in rows {
            terms.push(t);
            scores.extend(row);
        }
        Ok(EmotionLexicon {
            emotions,
            terms,
            scores,
            metadata,
        })
    }

    fn from_matrix(mat: WordEmotionMatrix, metadata: Metadata) -> Self {
        EmotionLexicon {
            emotions: mat.emotions,
            terms: mat.terms,
            scores: mat.values,
            metadata,
        }
    }

    pub fn emotions(&self) -> &EmotionSet {
        &self.emotions
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn metadata_mut(&mut self) -> &mut Metadata {
        &mut self.metadata
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[LemmaPos] {
        &self.terms
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.emotions.len();
        &self.scores[i * k..(i + 1) * k]
    }

    pub fn get(&self, term: &LemmaPos) -> Option<&[f64]> {
        self.terms.binary_search(term).ok().map(|i| self.row(i))
    }

    pub fn contains(&self, term: &LemmaPos) -> bool {
        self.terms.binary_search(term).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LemmaPos, &[f64])> {
        self.terms.iter().enumerate().map(|(i, t)| (t, self.row(i)))
    }

    /// The lexicon keys as a vocabulary, e.g. to license headline lemmas.
    pub fn vocabulary(&self) -> Result<VocabularyFilter> {
        VocabularyFilter::new(self.terms.iter().cloned())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        write_lexicon(self, &mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        read_lexicon(BufReader::new(File::open(path)?))
    }
}

fn row_defect(row: &[f64], k: usize) -> Option<String> {
    if row.len() != k {
        return Some(format!("{} scores for {k} emotions", row.len()));
    }
    if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Some(format!("score {v} is not a non-negative number"));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > READ_ROW_SUM_TOLERANCE {
        return Some(format!("scores sum to {sum}, not 1"));
    }
    None
}

/// Settings for [`build_lexicon`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub scheme: WeightingScheme,
    pub col_norm: ColumnNorm,
    pub nf_length: NfLength,
    pub min_df: u32,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            scheme: WeightingScheme::Normalized,
            col_norm: ColumnNorm::Sum,
            nf_length: NfLength::Filtered,
            min_df: 1,
        }
    }
}

impl BuildOptions {
    pub fn with_scheme(scheme: WeightingScheme) -> Self {
        BuildOptions {
            scheme,
            ..BuildOptions::default()
        }
    }
}

/// Counts gathered while building, for the build log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildSummary {
    pub documents_in: usize,
    pub documents_used: usize,
    pub terms_counted: usize,
    pub terms_removed_min_df: usize,
    pub terms_removed_weighting: usize,
    pub zero_rows_dropped: usize,
    pub entries: usize,
}

#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub lexicon: EmotionLexicon,
    pub summary: BuildSummary,
}

/// Vocabulary filter, term counting, weighting, product with the vote
/// matrix, column normalization and row scaling, in that order.
pub fn build_lexicon(
    corpus: &Corpus,
    vocab: &VocabularyFilter,
    options: &BuildOptions,
) -> Result<BuildOutcome> {
    let filtered = corpus.filter_vocabulary(vocab);
    let counts = count_terms(&filtered)?;
    let pruned = counts.prune_min_df(options.min_df)?;
    let weighted = apply_weighting(&pruned, options.scheme, options.nf_length)?;

    let used_docs = weighted
        .doc_ids()
        .iter()
        .map(|id| &filtered.docs()[filtered.position(id).expect("matrix column from corpus")]);
    let de = DocEmotionMatrix::from_records(corpus.emotions().clone(), used_docs);

    let raw = emotion_product(&weighted, &de)?;
    let normalized = column_normalize(&raw, options.col_norm)?;
    let (scaled, zero_rows) = row_scale(&normalized);
    if zero_rows > 0 {
        log::warn!("{zero_rows} all-zero row(s) dropped from the lexicon");
    }
    if scaled.n_rows() == 0 {
        return Err(Error::EmptyLexicon);
    }

    let summary = BuildSummary {
        documents_in: corpus.len(),
        documents_used: weighted.n_cols(),
        terms_counted: counts.n_rows(),
        terms_removed_min_df: counts.n_rows() - pruned.n_rows(),
        terms_removed_weighting: pruned.n_rows() - weighted.n_rows(),
        zero_rows_dropped: zero_rows,
        entries: scaled.n_rows(),
    };

    let mut metadata = Metadata::new();
    metadata.push("generator", concat!("emolex ", env!("CARGO_PKG_VERSION")));
    metadata.push("weighting", options.scheme);
    metadata.push("tfidf_variant", TFIDF_VARIANT);
    metadata.push("col_norm", options.col_norm);
    metadata.push("nf_length", options.nf_length);
    metadata.push("min_df", options.min_df);
    metadata.push("corpus_digest", corpus.digest());
    Ok(BuildOutcome {
        lexicon: EmotionLexicon::from_matrix(scaled, metadata),
        summary,
    })
}

/// Writes metadata lines, the `Lemma#PoS<TAB>EMOTION...` header and one row per
/// word in key order, scores at 9 significant digits.
pub fn write_lexicon(lex: &EmotionLexicon, mut out: impl Write) -> Result<()> {
    lex.metadata.write(&mut out)?;
    write!(out, "{KEY_HEADER}")?;
    for label in lex.emotions.labels() {
        write!(out, "\t{label}")?;
    }
    writeln!(out)?;
    let mut line = String::new();
    for (term, row) in lex.iter() {
        line.clear();
        line.push_str(&term.to_string());
        for v in row {
            line.push('\t');
            line.push_str(&format_sig9(*v));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn read_lexicon(reader: impl BufRead) -> Result<EmotionLexicon> {
    const KIND: &str = "lexicon";
    let mut metadata = Metadata::new();
    let mut emotions: Option<EmotionSet> = None;
    let mut rows: Vec<(LemmaPos, Vec<f64>)> = Vec::new();
    let mut seen: HashSet<LemmaPos> = HashSet::new();
    let mut errors = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        let Some(emotions) = &emotions else {
            if line.starts_with('#') {
                metadata.push_line(line);
                continue;
            }
            let mut fields = line.split('\t');
            let key = fields.next().unwrap_or_default();
            if !key.eq_ignore_ascii_case(KEY_HEADER) {
                return Err(Error::format_line(
                    KIND,
                    lineno,
                    format!("expected header starting with {KEY_HEADER}, found {key:?}"),
                ));
            }
            emotions = Some(
                EmotionSet::new(fields)
                    .map_err(|e| Error::format_line(KIND, lineno, e.to_string()))?,
            );
            continue;
        };
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != emotions.len() + 1 {
            errors.push(LineError::new(
                lineno,
                format!(
                    "expected {} fields, found {}",
                    emotions.len() + 1,
                    fields.len()
                ),
            ));
            continue;
        }
        let term = match LemmaPos::parse(fields[0]) {
            Ok(t) => t,
            Err(e) => {
                errors.push(LineError::new(lineno, e.to_string()));
                continue;
            }
        };
        let scores: std::result::Result<Vec<f64>, _> = fields[1..]
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect();
        let scores = match scores {
            Ok(s) => s,
            Err(e) => {
                errors.push(LineError::new(lineno, format!("non-numeric score: {e}")));
                continue;
            }
        };
        if let Some(problem) = row_defect(&scores, emotions.len()) {
            errors.push(LineError::new(lineno, problem));
            continue;
        }
        if !seen.insert(term.clone()) {
            errors.push(LineError::new(lineno, format!("duplicate entry {term}")));
            continue;
        }
        rows.push((term, scores));
    }
    let Some(emotions) = emotions else {
        return Err(Error::format_line(KIND, 0, "missing header line"));
    };
    if !errors.is_empty() {
        return Err(Error::format(KIND, errors));
    }
    EmotionLexicon::new(emotions, rows, metadata)
}

/// Like [`read_lexicon`], but fails unless the header lists exactly `expected`.
pub fn read_lexicon_expecting(
    reader: impl BufRead,
    expected: &EmotionSet,
) -> Result<EmotionLexicon> {
    let lex = read_lexicon(reader)?;
    if lex.emotions() != expected {
        return Err(Error::format_line(
            "lexicon",
            0,
            format!(
                "header emotions {} do not match expected {expected}",
                lex.emotions()
            ),
        ));
    }
    Ok(lex)
}
