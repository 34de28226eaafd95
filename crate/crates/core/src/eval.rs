//! Headline evaluation: score averaging, Pearson correlation for regression,
//! min-max thresholded classification, and lexicon coverage.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::EmotionSet;
use crate::error::{Error, LineError, Result};
use crate::format::{format_sig9, Metadata};
use crate::lexicon::EmotionLexicon;
use crate::textpipe::{LemmaPos, TextPipeline};

/// Mean lexicon row over the covered tokens of one headline.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadlineScore {
    pub scores: Vec<f64>,
    pub covered: usize,
    pub total: usize,
}

impl HeadlineScore {
    pub fn is_uncovered(&self) -> bool {
        self.covered == 0
    }
}

/// Averages the lexicon rows of every token found in `lex`; tokens not in the
/// lexicon are skipped. No covered token yields an all-zero vector.
pub fn score_headline(tokens: &[LemmaPos], lex: &EmotionLexicon) -> HeadlineScore {
    let mut scores = vec![0.0; lex.emotions().len()];
    let mut covered = 0;
    for token in tokens {
        if let Some(row) = lex.get(token) {
            covered += 1;
            for (s, v) in scores.iter_mut().zip(row) {
                *s += v;
            }
        }
    }
    if covered > 0 {
        for s in &mut scores {
            *s /= covered as f64;
        }
    }
    HeadlineScore {
        scores,
        covered,
        total: tokens.len(),
    }
}

/// Sample Pearson product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::Correlation(format!(
            "length mismatch ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Correlation("fewer than two observations".into()));
    }
    let is_constant = |v: &[f64]| v.iter().all(|x| *x == v[0]);
    if is_constant(xs) || is_constant(ys) {
        return Err(Error::Correlation("constant sequence".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Rescales to [0, 1]. A constant sequence maps to all zeros.
pub fn min_max_normalize(scores: &[f64]) -> Vec<f64> {
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if scores.is_empty() {
        return Vec::new();
    }
    if max == min {
        log::warn!("min-max normalization of a constant sequence; all values set to 0");
        return vec![0.0; scores.len()];
    }
    scores.iter().map(|x| (x - min) / (max - min)).collect()
}

/// Binary confusion counts for one emotion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BinaryCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl BinaryCounts {
    pub fn from_decisions(predicted: &[bool], actual: &[bool]) -> Self {
        let mut c = BinaryCounts::default();
        for (p, a) in predicted.iter().zip(actual) {
            match (p, a) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    /// 0 when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Test headline with gold scores (in `[0, 1]`) per target emotion.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldHeadline {
    pub id: String,
    pub text: String,
    pub tokens: Vec<LemmaPos>,
    pub gold: Vec<f64>,
    pub gold_labels: Option<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldSet {
    pub targets: EmotionSet,
    pub headlines: Vec<GoldHeadline>,
}

/// Tokens for a headline: taken verbatim when every whitespace-separated
/// piece is already a `lemma#pos` key, otherwise run through `pipeline`.
pub fn headline_tokens(text: &str, pipeline: &TextPipeline) -> Vec<LemmaPos> {
    let pieces: Vec<&str> = text.split_whitespace().collect();
    if !pieces.is_empty() {
        if let Ok(tagged) = pieces
            .iter()
            .map(|p| LemmaPos::parse(p))
            .collect::<Result<Vec<_>>>()
        {
            return tagged;
        }
    }
    pipeline.process(text)
}

/// Reads `id<TAB>text<TAB>e1<TAB>...` with a header naming the emotions.
///
/// A file containing any value above 1 is read as percentages and divided by
/// 100; such a file must not also contain fractional values below 1.
pub fn read_gold(
    reader: impl BufRead,
    tokenize: impl Fn(&str) -> Vec<LemmaPos>,
) -> Result<GoldSet> {
    const KIND: &str = "gold";
    let mut lines = reader.lines().enumerate();
    let targets = loop {
        let Some((idx, line)) = lines.next() else {
            return Err(Error::format_line(KIND, 0, "missing header"));
        };
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 || !fields[0].eq_ignore_ascii_case("id") {
            return Err(Error::format_line(
                KIND,
                idx + 1,
                "header must be id<TAB>text<TAB>EMOTION...",
            ));
        }
        break EmotionSet::new(&fields[2..])
            .map_err(|e| Error::format_line(KIND, idx + 1, e.to_string()))?;
    };

    let mut raw: Vec<(usize, String, String, Vec<f64>)> = Vec::new();
    let mut errors = Vec::new();
    let mut ids = std::collections::HashSet::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != targets.len() + 2 {
            errors.push(LineError::new(
                lineno,
                format!(
                    "expected {} fields, found {}",
                    targets.len() + 2,
                    fields.len()
                ),
            ));
            continue;
        }
        let values: std::result::Result<Vec<f64>, _> = fields[2..]
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect();
        match values {
            Ok(v) if v.iter().all(|x| x.is_finite() && *x >= 0.0 && *x <= 100.0) => {
                if !ids.insert(fields[0].to_string()) {
                    errors.push(LineError::new(
                        lineno,
                        format!("duplicate id {}", fields[0]),
                    ));
                    continue;
                }
                raw.push((lineno, fields[0].to_string(), fields[1].to_string(), v));
            }
            Ok(_) => errors.push(LineError::new(lineno, "gold values must lie in [0, 100]")),
            Err(e) => errors.push(LineError::new(
                lineno,
                format!("non-numeric gold value: {e}"),
            )),
        }
    }

    let percent = raw.iter().any(|(_, _, _, v)| v.iter().any(|x| *x > 1.0));
    if percent {
        for (lineno, _, _, v) in &raw {
            if v.iter().any(|x| *x > 0.0 && *x < 1.0) {
                errors.push(LineError::new(
                    *lineno,
                    "fractional value in a file on the 0-100 scale (mixed scales)",
                ));
            }
        }
    }
    if !errors.is_empty() {
        errors.sort_by_key(|e| e.line);
        return Err(Error::format(KIND, errors));
    }
    let headlines = raw
        .into_iter()
        .map(|(_, id, text, v)| GoldHeadline {
            tokens: tokenize(&text),
            gold: if percent {
                v.iter().map(|x| x / 100.0).collect()
            } else {
                v
            },
            id,
            text,
            gold_labels: None,
        })
        .collect();
    Ok(GoldSet { targets, headlines })
}

/// Attaches classification labels from `id<TAB>LABEL[,LABEL...]` lines.
/// Headlines missing from the file get an empty label set.
pub fn read_labels(reader: impl BufRead, gold: &mut GoldSet) -> Result<()> {
    const KIND: &str = "label";
    let index: std::collections::HashMap<String, usize> = gold
        .headlines
        .iter()
        .enumerate()
        .map(|(i, h)| (h.id.clone(), i))
        .collect();
    let mut labels: Vec<BTreeSet<String>> = vec![BTreeSet::new(); gold.headlines.len()];
    let mut errors = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let (id, list) = line.split_once('\t').unwrap_or((line, ""));
        let Some(&i) = index.get(id) else {
            errors.push(LineError::new(
                lineno,
                format!("unknown headline id {id:?}"),
            ));
            continue;
        };
        for label in list.split(',').map(str::trim).filter(|l| !l.is_empty()) {
            match gold.targets.index_of(label) {
                Some(e) => {
                    labels[i].insert(gold.targets.labels()[e].clone());
                }
                None => errors.push(LineError::new(lineno, format!("unknown label {label:?}"))),
            }
        }
    }
    if !errors.is_empty() {
        return Err(Error::format(KIND, errors));
    }
    for (h, l) in gold.headlines.iter_mut().zip(labels) {
        h.gold_labels = Some(l);
    }
    Ok(())
}

/// Target (gold) emotion to source (lexicon) emotion, or explicitly discarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmotionMapping {
    pairs: Vec<(String, Option<String>)>,
}

impl EmotionMapping {
    pub fn new(pairs: Vec<(String, Option<String>)>) -> Result<Self> {
        let mut targets = BTreeSet::new();
        let mut sources = BTreeSet::new();
        let mut out = Vec::with_capacity(pairs.len());
        for (t, s) in pairs {
            let t = t.trim().to_uppercase();
            if !targets.insert(t.clone()) {
                return Err(Error::Mapping(format!("target {t} mapped twice")));
            }
            let s = s.map(|s| s.trim().to_uppercase());
            if let Some(s) = &s {
                if !sources.insert(s.clone()) {
                    return Err(Error::Mapping(format!("source {s} used by two targets")));
                }
            }
            out.push((t, s));
        }
        Ok(EmotionMapping { pairs: out })
    }

    /// Six-basic-emotion targets onto Mood Meter labels; DISGUST has no counterpart.
    pub fn semeval_rappler() -> Self {
        let pairs = [
            ("FEAR", Some("AFRAID")),
            ("ANGER", Some("ANGRY")),
            ("JOY", Some("HAPPY")),
            ("SADNESS", Some("SAD")),
            ("SURPRISE", Some("INSPIRED")),
            ("DISGUST", None),
        ];
        EmotionMapping::new(
            pairs
                .iter()
                .map(|(t, s)| (t.to_string(), s.map(str::to_string)))
                .collect(),
        )
        .expect("static mapping is injective")
    }

    pub fn identity(emotions: &EmotionSet) -> Self {
        EmotionMapping {
            pairs: emotions
                .labels()
                .iter()
                .map(|l| (l.clone(), Some(l.clone())))
                .collect(),
        }
    }

    /// Reads `TARGET<TAB>SOURCE` lines; a source of `-` discards the target.
    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut errors = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            match line.split_once('\t') {
                Some((t, s)) if !t.trim().is_empty() && !s.trim().is_empty() => {
                    let s = s.trim();
                    pairs.push((t.to_string(), (s != "-").then(|| s.to_string())));
                }
                _ => errors.push(LineError::new(idx + 1, "expected TARGET<TAB>SOURCE")),
            }
        }
        if !errors.is_empty() {
            return Err(Error::format("mapping", errors));
        }
        EmotionMapping::new(pairs)
    }

    pub fn pairs(&self) -> &[(String, Option<String>)] {
        &self.pairs
    }

    /// Source emotions no target maps onto.
    pub fn unmapped_sources(&self, sources: &EmotionSet) -> Vec<String> {
        sources
            .labels()
            .iter()
            .filter(|s| {
                !self
                    .pairs
                    .iter()
                    .any(|(_, m)| m.as_deref() == Some(s.as_str()))
            })
            .cloned()
            .collect()
    }

    /// Pairs gold columns with lexicon columns. Targets that are discarded or
    /// absent from the mapping are excluded and reported.
    pub fn resolve(&self, targets: &EmotionSet, sources: &EmotionSet) -> Result<ResolvedMapping> {
        let mut evaluated = Vec::new();
        let mut discarded = Vec::new();
        for (gold_col, target) in targets.labels().iter().enumerate() {
            match self.pairs.iter().find(|(t, _)| t == target) {
                Some((_, Some(source))) => {
                    let lex_col = sources.index_of(source).ok_or_else(|| {
                        Error::Mapping(format!(
                            "source emotion {source} (for {target}) is not in the lexicon ({sources})"
                        ))
                    })?;
                    evaluated.push(EvalTarget {
                        target: target.clone(),
                        source: source.clone(),
                        gold_col,
                        lex_col,
                    });
                }
                _ => discarded.push(target.clone()),
            }
        }
        if evaluated.is_empty() {
            return Err(Error::Mapping(
                "no target emotion maps onto the lexicon".into(),
            ));
        }
        Ok(ResolvedMapping {
            evaluated,
            discarded,
            unmapped_sources: self.unmapped_sources(sources),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalTarget {
    pub target: String,
    pub source: String,
    pub gold_col: usize,
    pub lex_col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedMapping {
    pub evaluated: Vec<EvalTarget>,
    pub discarded: Vec<String>,
    pub unmapped_sources: Vec<String>,
}

/// Treatment of headlines without any lexicon token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UncoveredPolicy {
    /// Score zero on every emotion and stay in the evaluation.
    #[default]
    Zero,
    /// Leave the headline out of both tasks.
    Skip,
}

impl fmt::Display for UncoveredPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UncoveredPolicy::Zero => "zero",
            UncoveredPolicy::Skip => "skip",
        })
    }
}

impl FromStr for UncoveredPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(UncoveredPolicy::Zero),
            "skip" => Ok(UncoveredPolicy::Skip),
            _ => Err(format!(
                "unknown uncovered policy {s:?} (expected zero|skip)"
            )),
        }
    }
}

/// Scope of min-max normalization before thresholding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinMaxMode {
    #[default]
    PerEmotion,
    /// One minimum and maximum over all evaluated emotions.
    Joint,
}

impl fmt::Display for MinMaxMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MinMaxMode::PerEmotion => "per-emotion",
            MinMaxMode::Joint => "joint",
        })
    }
}

impl FromStr for MinMaxMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-emotion" => Ok(MinMaxMode::PerEmotion),
            "joint" => Ok(MinMaxMode::Joint),
            _ => Err(format!(
                "unknown min-max mode {s:?} (expected per-emotion|joint)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub uncovered: UncoveredPolicy,
    pub threshold: f64,
    pub minmax: MinMaxMode,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            uncovered: UncoveredPolicy::Zero,
            threshold: 0.5,
            minmax: MinMaxMode::PerEmotion,
        }
    }
}

/// Scores every headline; order follows `headlines`.
pub fn score_all(headlines: &[GoldHeadline], lex: &EmotionLexicon) -> Vec<HeadlineScore> {
    headlines
        .par_iter()
        .map(|h| score_headline(&h.tokens, lex))
        .collect()
}

fn included(scores: &[HeadlineScore], policy: UncoveredPolicy) -> Vec<usize> {
    (0..scores.len())
        .filter(|i| policy == UncoveredPolicy::Zero || !scores[*i].is_uncovered())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub target: String,
    pub pearson: f64,
}

pub fn evaluate_regression(
    headlines: &[GoldHeadline],
    lex: &EmotionLexicon,
    mapping: &ResolvedMapping,
    policy: UncoveredPolicy,
) -> Result<Vec<RegressionResult>> {
    let scores = score_all(headlines, lex);
    regression_from_scores(headlines, &scores, mapping, policy)
}

fn regression_from_scores(
    headlines: &[GoldHeadline],
    scores: &[HeadlineScore],
    mapping: &ResolvedMapping,
    policy: UncoveredPolicy,
) -> Result<Vec<RegressionResult>> {
    let rows = included(scores, policy);
    mapping
        .evaluated
        .iter()
        .map(|t| {
            let predicted: Vec<f64> = rows.iter().map(|i| scores[*i].scores[t.lex_col]).collect();
            let gold: Vec<f64> = rows
                .iter()
                .map(|i| headlines[*i].gold[t.gold_col])
                .collect();
            let r = pearson(&predicted, &gold)
                .map_err(|e| Error::Evaluation(format!("{}: {e}", t.target)))?;
            Ok(RegressionResult {
                target: t.target.clone(),
                pearson: r,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub target: String,
    pub counts: BinaryCounts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn evaluate_classification(
    headlines: &[GoldHeadline],
    lex: &EmotionLexicon,
    mapping: &ResolvedMapping,
    options: &EvalOptions,
) -> Result<Vec<ClassificationResult>> {
    let scores = score_all(headlines, lex);
    classification_from_scores(headlines, &scores, mapping, options)
}

fn classification_from_scores(
    headlines: &[GoldHeadline],
    scores: &[HeadlineScore],
    mapping: &ResolvedMapping,
    options: &EvalOptions,
) -> Result<Vec<ClassificationResult>> {
    if let Some(h) = headlines.iter().find(|h| h.gold_labels.is_none()) {
        return Err(Error::Evaluation(format!(
            "headline {} has no gold labels",
            h.id
        )));
    }
    let rows = included(scores, options.uncovered);
    let columns: Vec<Vec<f64>> = mapping
        .evaluated
        .iter()
        .map(|t| rows.iter().map(|i| scores[*i].scores[t.lex_col]).collect())
        .collect();
    let normalized: Vec<Vec<f64>> = match options.minmax {
        MinMaxMode::PerEmotion => columns.iter().map(|c| min_max_normalize(c)).collect(),
        MinMaxMode::Joint if rows.is_empty() => columns.clone(),
        MinMaxMode::Joint => {
            let flat: Vec<f64> = columns.iter().flatten().copied().collect();
            let norm = min_max_normalize(&flat);
            norm.chunks(rows.len()).map(<[f64]>::to_vec).collect()
        }
    };
    Ok(mapping
        .evaluated
        .iter()
        .zip(normalized)
        .map(|(t, norm)| {
            let predicted: Vec<bool> = norm.iter().map(|x| *x > options.threshold).collect();
            let actual: Vec<bool> = rows
                .iter()
                .map(|i| {
                    headlines[*i]
                        .gold_labels
                        .as_ref()
                        .is_some_and(|l| l.contains(&t.target))
                })
                .collect();
            let counts = BinaryCounts::from_decisions(&predicted, &actual);
            ClassificationResult {
                target: t.target.clone(),
                counts,
                precision: counts.precision(),
                recall: counts.recall(),
                f1: counts.f1(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageStats {
    /// Mean over headlines of covered / total tokens.
    pub mean: f64,
    pub headlines_counted: usize,
    pub empty_headlines: usize,
    pub zero_coverage_headlines: usize,
}

pub fn coverage_stats(headlines: &[GoldHeadline], lex: &EmotionLexicon) -> CoverageStats {
    coverage_from_scores(&score_all(headlines, lex))
}

fn coverage_from_scores(scores: &[HeadlineScore]) -> CoverageStats {
    let mut sum = 0.0;
    let mut counted = 0;
    let mut empty = 0;
    let mut zero = 0;
    for s in scores {
        if s.total == 0 {
            empty += 1;
        } else {
            sum += s.covered as f64 / s.total as f64;
            counted += 1;
        }
        if s.covered == 0 {
            zero += 1;
        }
    }
    CoverageStats {
        mean: if counted == 0 {
            0.0
        } else {
            sum / counted as f64
        },
        headlines_counted: counted,
        empty_headlines: empty,
        zero_coverage_headlines: zero,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmotionEval {
    pub target: String,
    pub source: String,
    pub pearson: f64,
    pub classification: Option<ClassificationResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub emotions: Vec<EmotionEval>,
    pub coverage: CoverageStats,
    pub headlines: usize,
    pub discarded: Vec<String>,
    pub unmapped_sources: Vec<String>,
    pub options: EvalOptions,
}

/// Regression on every mapped emotion, classification when every headline
/// carries gold labels, and coverage.
pub fn evaluate(
    gold: &GoldSet,
    lex: &EmotionLexicon,
    mapping: &EmotionMapping,
    options: &EvalOptions,
) -> Result<EvalReport> {
    let resolved = mapping.resolve(&gold.targets, lex.emotions())?;
    let scores = score_all(&gold.headlines, lex);
    let coverage = coverage_from_scores(&scores);
    if coverage.zero_coverage_headlines > 0 {
        log::warn!(
            "{} headline(s) have no token in the lexicon (policy: {})",
            coverage.zero_coverage_headlines,
            options.uncovered
        );
    }
    let regression =
        regression_from_scores(&gold.headlines, &scores, &resolved, options.uncovered)?;
    let has_labels = gold.headlines.iter().all(|h| h.gold_labels.is_some());
    let classification = if has_labels {
        Some(classification_from_scores(
            &gold.headlines,
            &scores,
            &resolved,
            options,
        )?)
    } else {
        None
    };
    let emotions = resolved
        .evaluated
        .iter()
        .zip(regression)
        .enumerate()
        .map(|(i, (t, r))| EmotionEval {
            target: t.target.clone(),
            source: t.source.clone(),
            pearson: r.pearson,
            classification: classification.as_ref().map(|c| c[i].clone()),
        })
        .collect();
    Ok(EvalReport {
        emotions,
        coverage,
        headlines: gold.headlines.len(),
        discarded: resolved.discarded,
        unmapped_sources: resolved.unmapped_sources,
        options: *options,
    })
}

impl EvalReport {
    fn summary_metadata(&self) -> Metadata {
        let mut m = Metadata::new();
        m.push("headlines", self.headlines);
        m.push(
            "zero_coverage_headlines",
            self.coverage.zero_coverage_headlines,
        );
        m.push("coverage_mean", format_sig9(self.coverage.mean));
        m.push("uncovered", self.options.uncovered);
        m.push("threshold", format_sig9(self.options.threshold));
        m.push("minmax", self.options.minmax);
        m.push("discarded", list_or_none(&self.discarded));
        m.push("unmapped_sources", list_or_none(&self.unmapped_sources));
        m
    }

    /// Tab-separated dump: metadata lines, then one row per evaluated emotion.
    pub fn write_tsv(&self, header: &Metadata, mut out: impl Write) -> Result<()> {
        header.write(&mut out)?;
        self.summary_metadata().write(&mut out)?;
        writeln!(
            out,
            "emotion\tsource\tpearson\tprecision\trecall\tf1\ttp\tfp\tfn"
        )?;
        for e in &self.emotions {
            write!(
                out,
                "{}\t{}\t{}",
                e.target,
                e.source,
                format_sig9(e.pearson)
            )?;
            match &e.classification {
                Some(c) => writeln!(
                    out,
                    "\t{}\t{}\t{}\t{}\t{}\t{}",
                    format_sig9(c.precision),
                    format_sig9(c.recall),
                    format_sig9(c.f1),
                    c.counts.tp,
                    c.counts.fp,
                    c.counts.fn_
                )?,
                None => writeln!(out, "\tNA\tNA\tNA\tNA\tNA\tNA")?,
            }
        }
        Ok(())
    }

    /// Human-readable tables.
    pub fn write_table(&self, header: &Metadata, mut out: impl Write) -> Result<()> {
        header.write(&mut out)?;
        writeln!(out, "Headlines: {}", self.headlines)?;
        writeln!(
            out,
            "Coverage per headline (mean): {:.4}   headlines with no covered word: {} (scored as: {})",
            self.coverage.mean, self.coverage.zero_coverage_headlines, self.options.uncovered
        )?;
        writeln!(out, "Discarded targets: {}", list_or_none(&self.discarded))?;
        writeln!(
            out,
            "Unmapped source emotions: {}",
            list_or_none(&self.unmapped_sources)
        )?;
        writeln!(out)?;
        writeln!(out, "Regression (Pearson r)")?;
        for e in &self.emotions {
            writeln!(
                out,
                "  {:<10} {:<10} {:>8.4}",
                e.target, e.source, e.pearson
            )?;
        }
        if self.emotions.iter().any(|e| e.classification.is_some()) {
            writeln!(out)?;
            writeln!(
                out,
                "Classification (min-max {}, threshold > {})",
                self.options.minmax, self.options.threshold
            )?;
            writeln!(
                out,
                "  {:<10} {:>9} {:>9} {:>9}",
                "EMOTION", "PRECISION", "RECALL", "F1"
            )?;
            for e in &self.emotions {
                if let Some(c) = &e.classification {
                    writeln!(
                        out,
                        "  {:<10} {:>9.4} {:>9.4} {:>9.4}",
                        e.target, c.precision, c.recall, c.f1
                    )?;
                }
            }
        }
        Ok(())
    }
}

fn list_or_none(items: &[String]) -> String {
    if items.is_empty() {
        "none".to_string()
    } else {
        items.join(",")
    }
}
