//! Raw text to `lemma#pos` tokens: tokenization, table-driven lemmatization
//! and reference-vocabulary filtering.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use crate::error::{Error, LineError, Result};

/// Coarse part of speech, WordNet style.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pos {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl Pos {
    /// Candidate order used by the lemmatizer.
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb];

    pub fn as_char(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adjective => 'a',
            Pos::Adverb => 'r',
        }
    }

    pub fn from_char(c: char) -> Option<Pos> {
        match c {
            'n' => Some(Pos::Noun),
            'v' => Some(Pos::Verb),
            'a' => Some(Pos::Adjective),
            'r' => Some(Pos::Adverb),
            _ => None,
        }
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Pos::from_char(c).ok_or_else(|| format!("unknown pos {s:?}")),
            _ => Err(format!("unknown pos {s:?}")),
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A lemma paired with its part of speech; canonical text form `lemma#pos`.
///
/// Ordering is byte-lexicographic on the canonical text form, so sorted
/// collections of `LemmaPos` sort the same way as their printed keys.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LemmaPos {
    lemma: String,
    pos: Pos,
}

impl LemmaPos {
    pub fn new(lemma: impl Into<String>, pos: Pos) -> Result<Self> {
        let lemma = lemma.into();
        if let Some(reason) = lemma_defect(&lemma) {
            return Err(Error::LemmaPos {
                token: format!("{lemma}#{pos}"),
                reason: reason.to_string(),
            });
        }
        Ok(LemmaPos { lemma, pos })
    }

    /// Parses the canonical `lemma#pos` form. Only canonical strings are
    /// accepted, so parsing and printing are exact inverses.
    pub fn parse(s: &str) -> Result<Self> {
        let invalid = |reason: &str| Error::LemmaPos {
            token: s.to_string(),
            reason: reason.to_string(),
        };
        let (lemma, pos) = s.rsplit_once('#').ok_or_else(|| invalid("missing '#'"))?;
        let pos = pos.parse::<Pos>().map_err(|e| invalid(&e))?;
        if let Some(reason) = lemma_defect(lemma) {
            return Err(invalid(reason));
        }
        Ok(LemmaPos {
            lemma: lemma.to_string(),
            pos,
        })
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn pos(&self) -> Pos {
        self.pos
    }

    fn key_bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.lemma.bytes().chain([b'#', self.pos.as_char() as u8])
    }
}

fn lemma_defect(lemma: &str) -> Option<&'static str> {
    if lemma.is_empty() {
        Some("empty lemma")
    } else if lemma.chars().any(char::is_whitespace) {
        Some("lemma contains whitespace")
    } else if lemma.contains('#') {
        Some("lemma contains '#'")
    } else if lemma.chars().any(char::is_uppercase) {
        Some("lemma is not lower-case")
    } else {
        None
    }
}

impl Ord for LemmaPos {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_bytes().cmp(other.key_bytes())
    }
}

impl PartialOrd for LemmaPos {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LemmaPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.lemma, self.pos)
    }
}

impl FromStr for LemmaPos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaPos::parse(s)
    }
}

/// Splits text into lower-cased letter-only tokens.
///
/// Tokens are maximal runs of alphanumeric characters; any run containing a
/// digit is dropped entirely.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && t.chars().all(char::is_alphabetic))
        .map(str::to_lowercase)
        .collect()
}

/// Reference vocabulary of admissible `lemma#pos` entries.
#[derive(Debug, Clone)]
pub struct VocabularyFilter {
    entries: HashSet<LemmaPos>,
}

impl VocabularyFilter {
    pub fn new(entries: impl IntoIterator<Item = LemmaPos>) -> Result<Self> {
        let entries: HashSet<_> = entries.into_iter().collect();
        if entries.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        Ok(VocabularyFilter { entries })
    }

    /// Reads one `lemma#pos` per line; `#` in column 1 starts a comment.
    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut entries = Vec::new();
        let mut errors = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim_end_matches('\r');
            if trimmed.starts_with('#') || trimmed.trim().is_empty() {
                continue;
            }
            match LemmaPos::parse(trimmed.trim()) {
                Ok(lp) => entries.push(lp),
                Err(e) => errors.push(LineError::new(idx + 1, e.to_string())),
            }
        }
        if !errors.is_empty() {
            return Err(Error::format("vocabulary", errors));
        }
        VocabularyFilter::new(entries)
    }

    pub fn contains(&self, lp: &LemmaPos) -> bool {
        self.entries.contains(lp)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Keeps exactly the tokens present in `vocab`, in order, duplicates included.
pub fn filter_vocabulary(tokens: &[LemmaPos], vocab: &VocabularyFilter) -> Vec<LemmaPos> {
    tokens
        .iter()
        .filter(|t| vocab.contains(t))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct SuffixRule {
    pos: Pos,
    suffix: String,
    replacement: String,
}

/// Surface-form lemma table plus per-pos suffix rewrite rules.
///
/// File layout: `surface<TAB>pos<TAB>lemma` lines, then an optional `[rules]`
/// header followed by `pos<TAB>suffix<TAB>replacement` lines.
#[derive(Debug, Clone, Default)]
pub struct LemmaTable {
    entries: HashMap<(String, Pos), String>,
    rules: Vec<SuffixRule>,
}

impl LemmaTable {
    pub fn new() -> Self {
        LemmaTable::default()
    }

    pub fn insert(&mut self, surface: &str, pos: Pos, lemma: &str) -> Result<()> {
        LemmaPos::new(lemma, pos)?;
        self.entries
            .insert((surface.to_string(), pos), lemma.to_string());
        Ok(())
    }

    pub fn add_rule(&mut self, pos: Pos, suffix: &str, replacement: &str) {
        self.rules.push(SuffixRule {
            pos,
            suffix: suffix.to_string(),
            replacement: replacement.to_string(),
        });
    }

    pub fn lookup(&self, surface: &str, pos: Pos) -> Option<&str> {
        self.entries
            .get(&(surface.to_string(), pos))
            .map(String::as_str)
    }

    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut table = LemmaTable::new();
        let mut errors = Vec::new();
        let mut in_rules = false;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            let lineno = idx + 1;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            if line.trim() == "[rules]" {
                if in_rules {
                    errors.push(LineError::new(lineno, "duplicate [rules] header"));
                }
                in_rules = true;
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                errors.push(LineError::new(
                    lineno,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
                continue;
            }
            if in_rules {
                let (pos, suffix, replacement) = (fields[0], fields[1], fields[2]);
                match pos.parse::<Pos>() {
                    Ok(pos) if !suffix.is_empty() => table.add_rule(pos, suffix, replacement),
                    Ok(_) => errors.push(LineError::new(lineno, "empty suffix")),
                    Err(e) => errors.push(LineError::new(lineno, e)),
                }
            } else {
                let (surface, pos, lemma) = (fields[0], fields[1], fields[2]);
                let pos = match pos.parse::<Pos>() {
                    Ok(p) => p,
                    Err(e) => {
                        errors.push(LineError::new(lineno, e));
                        continue;
                    }
                };
                if table.lookup(surface, pos).is_some() {
                    errors.push(LineError::new(
                        lineno,
                        format!("duplicate entry for {surface:?} as {pos}"),
                    ));
                    continue;
                }
                if let Err(e) = table.insert(surface, pos, lemma) {
                    errors.push(LineError::new(lineno, e.to_string()));
                }
            }
        }
        if !errors.is_empty() {
            return Err(Error::format("lemma table", errors));
        }
        Ok(table)
    }

    /// Table lemma for (surface, pos), or the unchanged surface followed by
    /// every rule rewrite. Empty lemmas are never produced.
    fn candidates(&self, surface: &str, pos: Pos) -> Vec<String> {
        if let Some(lemma) = self.lookup(surface, pos) {
            return vec![lemma.to_string()];
        }
        let mut out = vec![surface.to_string()];
        for rule in self.rules.iter().filter(|r| r.pos == pos) {
            if let Some(stem) = surface.strip_suffix(rule.suffix.as_str()) {
                let lemma = format!("{stem}{}", rule.replacement);
                if !lemma.is_empty() && !out.contains(&lemma) {
                    out.push(lemma);
                }
            }
        }
        out
    }
}

/// How many candidates an ambiguous surface form contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmbiguityPolicy {
    /// Every licensed `lemma#pos` is emitted once per occurrence.
    #[default]
    All,
    /// Only the first licensed candidate, in noun/verb/adjective/adverb order.
    First,
}

impl FromStr for AmbiguityPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(AmbiguityPolicy::All),
            "first" => Ok(AmbiguityPolicy::First),
            _ => Err(format!(
                "unknown ambiguity policy {s:?} (expected all|first)"
            )),
        }
    }
}

impl fmt::Display for AmbiguityPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AmbiguityPolicy::All => "all",
            AmbiguityPolicy::First => "first",
        })
    }
}

/// Maps surface tokens to `lemma#pos` candidates.
///
/// A candidate is licensed by membership in `vocab` when one is given,
/// otherwise only table hits are licensed. Tokens without any licensed
/// candidate pass through as `token#n` and are left to later filtering.
pub fn lemmatize(
    tokens: &[String],
    table: &LemmaTable,
    vocab: Option<&VocabularyFilter>,
    policy: AmbiguityPolicy,
) -> Vec<LemmaPos> {
    let mut out = Vec::with_capacity(tokens.len());
    for token in tokens {
        let mut licensed: Vec<LemmaPos> = Vec::new();
        for pos in Pos::ALL {
            let from_table = table.lookup(token, pos).is_some();
            for lemma in table.candidates(token, pos) {
                let Ok(lp) = LemmaPos::new(lemma, pos) else {
                    continue;
                };
                let ok = match vocab {
                    Some(v) => v.contains(&lp),
                    None => from_table,
                };
                if ok && !licensed.contains(&lp) {
                    licensed.push(lp);
                }
            }
        }
        if licensed.is_empty() {
            if let Ok(lp) = LemmaPos::new(token.as_str(), Pos::Noun) {
                out.push(lp);
            }
            continue;
        }
        match policy {
            AmbiguityPolicy::All => out.extend(licensed),
            AmbiguityPolicy::First => out.push(licensed.swap_remove(0)),
        }
    }
    out
}

/// Tokenizer, lemma table and licensing vocabulary bundled together.
#[derive(Debug, Clone, Default)]
pub struct TextPipeline {
    pub table: LemmaTable,
    pub vocab: Option<VocabularyFilter>,
    pub policy: AmbiguityPolicy,
}

impl TextPipeline {
    pub fn new(
        table: LemmaTable,
        vocab: Option<VocabularyFilter>,
        policy: AmbiguityPolicy,
    ) -> Self {
        TextPipeline {
            table,
            vocab,
            policy,
        }
    }

    /// Tokenizes and lemmatizes `text`; vocabulary filtering is left to the caller.
    pub fn process(&self, text: &str) -> Vec<LemmaPos> {
        lemmatize(
            &tokenize(text),
            &self.table,
            self.vocab.as_ref(),
            self.policy,
        )
    }
}
