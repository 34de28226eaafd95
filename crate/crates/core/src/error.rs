use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A problem tied to one line of an input file.
#[derive(Debug, Clone, PartialEq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

impl LineError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        LineError {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Collection of line-level failures, shown as the first few plus a total.
#[derive(Debug, Clone, PartialEq)]
pub struct LineErrors(pub Vec<LineError>);

impl fmt::Display for LineErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 5;
        for (i, err) in self.0.iter().take(SHOWN).enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{err}")?;
        }
        if self.0.len() > SHOWN {
            write!(f, "; ... ({} more)", self.0.len() - SHOWN)?;
        }
        write!(f, " [{} failing line(s) total]", self.0.len())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid emotion set: {0}")]
    EmotionSet(String),

    #[error("invalid vote vector: {0}")]
    Votes(String),

    #[error("malformed corpus: {0}")]
    Corpus(LineErrors),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("no document has any token left after vocabulary filtering")]
    NoNonEmptyDocuments,

    #[error("invalid lemma#pos token {token:?}: {reason}")]
    LemmaPos { token: String, reason: String },

    #[error("vocabulary filter is empty")]
    EmptyVocabulary,

    #[error("malformed {kind} file: {errors}")]
    Format {
        kind: &'static str,
        errors: LineErrors,
    },

    #[error("invalid weighting input: {0}")]
    Weighting(String),

    #[error("matrix has scheme {found} but {expected} was required")]
    SchemeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error(
        "document sets differ: only in term matrix {only_in_matrix:?}, only in vote matrix {only_in_votes:?}"
    )]
    DocumentSetMismatch {
        only_in_matrix: Vec<String>,
        only_in_votes: Vec<String>,
    },

    #[error("emotion column {0} is all zero (no document received any weight for it)")]
    ZeroEmotionColumn(String),

    #[error("lexicon is empty after building")]
    EmptyLexicon,

    #[error("emotion mapping: {0}")]
    Mapping(String),

    #[error("undefined correlation: {0}")]
    Correlation(String),

    #[error("evaluation: {0}")]
    Evaluation(String),
}

impl Error {
    pub(crate) fn format(kind: &'static str, errors: Vec<LineError>) -> Self {
        Error::Format {
            kind,
            errors: LineErrors(errors),
        }
    }

    pub(crate) fn format_line(kind: &'static str, line: usize, message: impl Into<String>) -> Self {
        Error::format(kind, vec![LineError::new(line, message)])
    }
}
