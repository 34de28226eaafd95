//! Emotion lexicon induction from documents annotated with reader-vote
//! distributions, and evaluation of such lexicons on emotion-labelled
//! headlines.
//!
//! The build pipeline is
//! [`corpus`] → [`textpipe`] → [`matrix`] → [`lexicon`]: documents are reduced
//! to `lemma#pos` tokens, counted into a sparse words × documents matrix,
//! multiplied with the documents × emotions vote matrix, and normalized first
//! per emotion column and then per word row. [`eval`] scores headlines by
//! averaging lexicon rows.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod format;
pub mod lexicon;
pub mod matrix;
pub mod textpipe;

pub use corpus::{
    corpus_stats, parse_corpus, validate_votes, Corpus, CorpusStats, EmotionSet, VoteVector,
};
pub use error::{Error, Result};
pub use lexicon::{
    build_lexicon, read_lexicon, write_lexicon, BuildOptions, ColumnNorm, EmotionLexicon,
};
pub use matrix::{NfLength, TermDocumentMatrix, WeightingScheme};
pub use textpipe::{AmbiguityPolicy, LemmaPos, LemmaTable, Pos, TextPipeline, VocabularyFilter};
