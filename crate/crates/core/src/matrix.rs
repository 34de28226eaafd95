//! Sparse term-by-document matrices under raw, normalized and tf-idf weighting.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::{Corpus, TermId};
use crate::error::{Error, Result};
use crate::format::format_sig9;
use crate::textpipe::LemmaPos;

/// tf-idf variant used by [`tfidf_weight`], recorded in outputs.
pub const TFIDF_VARIANT: &str = "count*ln(N/df)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightingScheme {
    /// Raw occurrence counts.
    Raw,
    /// Counts divided by document length.
    Normalized,
    TfIdf,
}

impl WeightingScheme {
    pub const ALL: [WeightingScheme; 3] = [
        WeightingScheme::Raw,
        WeightingScheme::Normalized,
        WeightingScheme::TfIdf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightingScheme::Raw => "f",
            WeightingScheme::Normalized => "nf",
            WeightingScheme::TfIdf => "tfidf",
        }
    }
}

impl fmt::Display for WeightingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightingScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f" | "raw" => Ok(WeightingScheme::Raw),
            "nf" | "normalized" => Ok(WeightingScheme::Normalized),
            "tfidf" => Ok(WeightingScheme::TfIdf),
            _ => Err(format!("unknown weighting {s:?} (expected f|nf|tfidf)")),
        }
    }
}

/// Which document length divides counts under normalized weighting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NfLength {
    /// Tokens that survived vocabulary filtering; non-empty columns sum to one.
    #[default]
    Filtered,
    /// Tokens as ingested, before filtering.
    Raw,
}

impl fmt::Display for NfLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NfLength::Filtered => "filtered",
            NfLength::Raw => "raw",
        })
    }
}

impl FromStr for NfLength {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "filtered" => Ok(NfLength::Filtered),
            "raw" => Ok(NfLength::Raw),
            _ => Err(format!(
                "unknown nf length mode {s:?} (expected filtered|raw)"
            )),
        }
    }
}

pub fn normalized_frequency(count: u32, doc_len: usize) -> Result<f64> {
    if doc_len == 0 {
        return Err(Error::Weighting("document length is zero".into()));
    }
    if count as usize > doc_len {
        return Err(Error::Weighting(format!(
            "count {count} exceeds document length {doc_len}"
        )));
    }
    Ok(f64::from(count) / doc_len as f64)
}

pub fn tfidf_weight(count: u32, df: usize, n_docs: usize) -> Result<f64> {
    if count == 0 {
        return Ok(0.0);
    }
    if df == 0 || df > n_docs {
        return Err(Error::Weighting(format!(
            "document frequency {df} inconsistent with {n_docs} documents for a present term"
        )));
    }
    if df == n_docs {
        return Ok(0.0);
    }
    Ok(f64::from(count) * (n_docs as f64 / df as f64).ln())
}

/// Words x documents matrix in compressed-row form.
///
/// Rows are sorted by `lemma#pos` key; columns follow corpus document order and
/// within each row entries are stored in ascending column order.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDocumentMatrix {
    scheme: WeightingScheme,
    terms: Vec<LemmaPos>,
    docs: Vec<String>,
    col_index: HashMap<String, usize>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<f64>,
    /// Documents containing each row's term.
    doc_freq: Vec<u32>,
    /// Per-column length after vocabulary filtering.
    doc_len: Vec<usize>,
    /// Per-column length as ingested.
    source_len: Vec<usize>,
}

impl TermDocumentMatrix {
    pub fn scheme(&self) -> WeightingScheme {
        self.scheme
    }

    pub fn terms(&self) -> &[LemmaPos] {
        &self.terms
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.docs
    }

    pub fn n_rows(&self) -> usize {
        self.terms.len()
    }

    pub fn n_cols(&self) -> usize {
        self.docs.len()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_of(&self, term: &LemmaPos) -> Option<usize> {
        self.terms.binary_search(term).ok()
    }

    pub fn col_of(&self, doc_id: &str) -> Option<usize> {
        self.col_index.get(doc_id).copied()
    }

    /// Stored (column, weight) pairs of one row, ascending by column.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .zip(&self.values[span])
            .map(|(c, v)| (*c as usize, *v))
    }

    pub fn get(&self, term: &LemmaPos, doc_id: &str) -> f64 {
        match (self.row_of(term), self.col_of(doc_id)) {
            (Some(r), Some(c)) => self
                .row(r)
                .find(|(col, _)| *col == c)
                .map_or(0.0, |(_, v)| v),
            _ => 0.0,
        }
    }

    pub fn doc_freq(&self, r: usize) -> u32 {
        self.doc_freq[r]
    }

    pub fn doc_len(&self, c: usize) -> usize {
        self.doc_len[c]
    }

    pub fn source_len(&self, c: usize) -> usize {
        self.source_len[c]
    }

    /// All stored entries as (row, column, weight), row-major.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows()).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    fn from_rows(
        scheme: WeightingScheme,
        terms: Vec<LemmaPos>,
        rows: Vec<Vec<(u32, f64)>>,
        docs: Vec<String>,
        doc_len: Vec<usize>,
        source_len: Vec<usize>,
        doc_freq: Vec<u32>,
    ) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                values.push(v);
            }
            row_ptr.push(cols.len());
        }
        let col_index = docs
            .iter()
            .enumerate()
            .map(|(i, d)| (d.clone(), i))
            .collect();
        TermDocumentMatrix {
            scheme,
            terms,
            docs,
            col_index,
            row_ptr,
            cols,
            values,
            doc_freq,
            doc_len,
            source_len,
        }
    }

    fn rows_owned(&self) -> Vec<Vec<(u32, f64)>> {
        (0..self.n_rows())
            .map(|r| self.row(r).map(|(c, v)| (c as u32, v)).collect())
            .collect()
    }

    /// Drops rows with document frequency below `min_df`, then any column left
    /// empty. Only valid on raw counts; filtered lengths are recomputed.
    pub fn prune_min_df(&self, min_df: u32) -> Result<TermDocumentMatrix> {
        self.require_raw()?;
        if min_df <= 1 {
            return Ok(self.clone());
        }
        let mut terms = Vec::new();
        let mut rows = Vec::new();
        let mut doc_freq = Vec::new();
        let mut col_len = vec![0usize; self.n_cols()];
        for r in 0..self.n_rows() {
            if self.doc_freq[r] < min_df {
                continue;
            }
            let row: Vec<(u32, f64)> = self.row(r).map(|(c, v)| (c as u32, v)).collect();
            for (c, v) in &row {
                col_len[*c as usize] += *v as usize;
            }
            terms.push(self.terms[r].clone());
            doc_freq.push(self.doc_freq[r]);
            rows.push(row);
        }
        let mut remap = vec![u32::MAX; self.n_cols()];
        let mut docs = Vec::new();
        let mut doc_len = Vec::new();
        let mut source_len = Vec::new();
        for (c, len) in col_len.iter().enumerate() {
            if *len > 0 {
                remap[c] = docs.len() as u32;
                docs.push(self.docs[c].clone());
                doc_len.push(*len);
                source_len.push(self.source_len[c]);
            }
        }
        if docs.is_empty() {
            return Err(Error::NoNonEmptyDocuments);
        }
        for row in &mut rows {
            for (c, _) in row.iter_mut() {
                *c = remap[*c as usize];
            }
        }
        Ok(TermDocumentMatrix::from_rows(
            WeightingScheme::Raw,
            terms,
            rows,
            docs,
            doc_len,
            source_len,
            doc_freq,
        ))
    }

    fn require_raw(&self) -> Result<()> {
        if self.scheme != WeightingScheme::Raw {
            return Err(Error::SchemeMismatch {
                expected: WeightingScheme::Raw.as_str(),
                found: self.scheme.as_str(),
            });
        }
        Ok(())
    }

    /// Writes `lemma#pos<TAB>doc_id<TAB>weight` triples after a `#` header line.
    pub fn write_dump(&self, mut out: impl Write) -> Result<()> {
        writeln!(
            out,
            "# scheme={}\tN={}\ttfidf_variant={}",
            self.scheme,
            self.n_cols(),
            TFIDF_VARIANT
        )?;
        for (r, c, v) in self.triples() {
            writeln!(
                out,
                "{}\t{}\t{}",
                self.terms[r],
                self.docs[c],
                format_sig9(v)
            )?;
        }
        Ok(())
    }
}

/// Counts term occurrences per document.
///
/// Documents without tokens are dropped (logged, not fatal). Per-document
/// counting runs in parallel; assembly walks documents in corpus order, so
/// the result does not depend on the thread count.
pub fn count_terms(corpus: &Corpus) -> Result<TermDocumentMatrix> {
    let per_doc: Vec<Vec<(TermId, u32)>> = corpus
        .docs()
        .par_iter()
        .map(|doc| {
            let mut ids = doc.tokens.clone();
            ids.sort_unstable();
            let mut counts: Vec<(TermId, u32)> = Vec::new();
            for id in ids {
                match counts.last_mut() {
                    Some((last, n)) if *last == id => *n += 1,
                    _ => counts.push((id, 1)),
                }
            }
            counts
        })
        .collect();

    let dropped = per_doc.iter().filter(|c| c.is_empty()).count();
    if dropped > 0 {
        log::warn!("{dropped} document(s) have no tokens and were dropped");
    }
    if dropped == per_doc.len() {
        return Err(Error::NoNonEmptyDocuments);
    }

    let n_terms = corpus.terms().len();
    let mut used = vec![false; n_terms];
    for counts in &per_doc {
        for (id, _) in counts {
            used[id.0 as usize] = true;
        }
    }
    let mut present: Vec<TermId> = (0..n_terms as u32)
        .map(TermId)
        .filter(|t| used[t.0 as usize])
        .collect();
    present.sort_by(|a, b| corpus.terms().get(*a).cmp(corpus.terms().get(*b)));
    let mut row_of = vec![u32::MAX; n_terms];
    for (r, id) in present.iter().enumerate() {
        row_of[id.0 as usize] = r as u32;
    }

    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); present.len()];
    let mut docs = Vec::new();
    let mut doc_len = Vec::new();
    let mut source_len = Vec::new();
    for (doc, counts) in corpus.docs().iter().zip(&per_doc) {
        if counts.is_empty() {
            continue;
        }
        let col = docs.len() as u32;
        docs.push(doc.id.clone());
        doc_len.push(doc.tokens.len());
        source_len.push(doc.source_len);
        for (id, n) in counts {
            rows[row_of[id.0 as usize] as usize].push((col, f64::from(*n)));
        }
    }
    let doc_freq = rows.iter().map(|r| r.len() as u32).collect();
    let terms = present
        .iter()
        .map(|t| corpus.terms().get(*t).clone())
        .collect();
    Ok(TermDocumentMatrix::from_rows(
        WeightingScheme::Raw,
        terms,
        rows,
        docs,
        doc_len,
        source_len,
        doc_freq,
    ))
}

/// Re-weights a raw count matrix. Zero weights are not stored, and rows left
/// without entries (ubiquitous terms under tf-idf) are removed.
pub fn apply_weighting(
    raw: &TermDocumentMatrix,
    scheme: WeightingScheme,
    nf_length: NfLength,
) -> Result<TermDocumentMatrix> {
    raw.require_raw()?;
    if scheme == WeightingScheme::Raw {
        return Ok(raw.clone());
    }
    let n_docs = raw.n_cols();
    let mut terms = Vec::with_capacity(raw.n_rows());
    let mut rows = Vec::with_capacity(raw.n_rows());
    let mut doc_freq = Vec::with_capacity(raw.n_rows());
    let mut emptied = 0usize;
    for (r, mut row) in raw.rows_owned().into_iter().enumerate() {
        for (c, v) in row.iter_mut() {
            let count = *v as u32;
            *v = match scheme {
                WeightingScheme::Normalized => {
                    let len = match nf_length {
                        NfLength::Filtered => raw.doc_len[*c as usize],
                        NfLength::Raw => raw.source_len[*c as usize],
                    };
                    normalized_frequency(count, len)?
                }
                WeightingScheme::TfIdf => tfidf_weight(count, raw.doc_freq[r] as usize, n_docs)?,
                WeightingScheme::Raw => unreachable!(),
            };
        }
        row.retain(|(_, v)| *v != 0.0);
        if row.is_empty() {
            emptied += 1;
            continue;
        }
        terms.push(raw.terms[r].clone());
        doc_freq.push(raw.doc_freq[r]);
        rows.push(row);
    }
    if emptied > 0 {
        log::info!("{scheme} weighting removed {emptied} term(s) present in every document");
    }
    Ok(TermDocumentMatrix::from_rows(
        scheme,
        terms,
        rows,
        raw.docs.clone(),
        raw.doc_len.clone(),
        raw.source_len.clone(),
        doc_freq,
    ))
}
