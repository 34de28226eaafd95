use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use emolex::corpus::{ParseOptions, ParsedCorpus};
use emolex::eval::{
    evaluate, headline_tokens, read_gold, read_labels, score_headline, EmotionMapping, EvalOptions,
};
use emolex::format::{format_sig9, Metadata};
use emolex::matrix::{apply_weighting, count_terms};
use emolex::{
    build_lexicon, corpus_stats, parse_corpus, write_lexicon, AmbiguityPolicy, BuildOptions,
    EmotionLexicon, EmotionSet, LemmaTable, TextPipeline, VocabularyFilter,
};

use crate::provenance::Header;
use crate::{BuildArgs, CorpusArgs, EvalArgs, ScoreArgs, StatsArgs};

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

/// Buffered writer on `path`, or on standard output when no path is given.
fn create(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn lemma_table(path: Option<&Path>) -> Result<LemmaTable> {
    match path {
        Some(p) => LemmaTable::read(open(p)?)
            .with_context(|| format!("reading lemma table {}", p.display())),
        None => Ok(LemmaTable::new()),
    }
}

fn read_vocab(path: &Path) -> Result<VocabularyFilter> {
    VocabularyFilter::read(open(path)?)
        .with_context(|| format!("reading vocabulary {}", path.display()))
}

fn read_corpus(
    args: &CorpusArgs,
    vocab: Option<&VocabularyFilter>,
    header: &mut Header,
) -> Result<ParsedCorpus> {
    let emotions = match &args.emotions {
        Some(list) => EmotionSet::parse_list(list).context("parsing --emotions")?,
        None => EmotionSet::default(),
    };
    header.input("corpus", &args.corpus)?;
    header.optional_input("lemma_table", args.lemma_table.as_deref())?;
    header.flag("emotions", &emotions);
    header.flag("ambiguity", args.ambiguity);
    header.flag("min_votes_sum", format_sig9(args.min_votes_sum));

    let pipeline = TextPipeline::new(
        lemma_table(args.lemma_table.as_deref())?,
        vocab.cloned(),
        args.ambiguity,
    );
    let options = ParseOptions {
        pipeline: Some(&pipeline),
        min_votes_sum: args.min_votes_sum,
    };
    let parsed = parse_corpus(open(&args.corpus)?, &emotions, options)
        .with_context(|| format!("reading corpus {}", args.corpus.display()))?;
    if !parsed.skipped_low_votes.is_empty() {
        log::info!(
            "{} document(s) skipped with vote sum below {}",
            parsed.skipped_low_votes.len(),
            args.min_votes_sum
        );
    }
    log::info!("corpus: {} document(s)", parsed.corpus.len());
    Ok(parsed)
}

pub fn build(args: &BuildArgs) -> Result<()> {
    let mut header = Header::new("build");
    let vocab = read_vocab(&args.vocab)?;
    let parsed = read_corpus(&args.corpus, Some(&vocab), &mut header)?;
    header.input("vocab", &args.vocab)?;
    header.flag("min_votes_sum_skipped", parsed.skipped_low_votes.len());

    let options = BuildOptions {
        scheme: args.weighting,
        col_norm: args.col_norm,
        nf_length: args.nf_length,
        min_df: args.min_df,
    };
    let outcome = build_lexicon(&parsed.corpus, &vocab, &options).context("building lexicon")?;
    let s = &outcome.summary;
    log::info!(
        "scheme {}: {} entries from {} of {} document(s); {} zero row(s) dropped, {} term(s) below min-df, {} term(s) with zero weight",
        args.weighting,
        s.entries,
        s.documents_used,
        s.documents_in,
        s.zero_rows_dropped,
        s.terms_removed_min_df,
        s.terms_removed_weighting
    );

    let mut lexicon = outcome.lexicon;
    let mut metadata = header.into_metadata();
    metadata.extend(lexicon.metadata());
    *lexicon.metadata_mut() = metadata.clone();

    let mut out = create(args.output.as_deref())?;
    write_lexicon(&lexicon, &mut out).context("writing lexicon")?;
    out.flush().context("writing lexicon")?;

    if let Some(path) = &args.matrix_dump {
        let counts = count_terms(&parsed.corpus.filter_vocabulary(&vocab))
            .and_then(|m| m.prune_min_df(args.min_df))
            .and_then(|m| apply_weighting(&m, args.weighting, args.nf_length))
            .context("recomputing word-document matrix")?;
        let mut out = create(Some(path))?;
        metadata.write(&mut out)?;
        counts.write_dump(&mut out).context("writing matrix dump")?;
        out.flush()?;
    }
    Ok(())
}

fn load_lexicon(path: &Path) -> Result<EmotionLexicon> {
    EmotionLexicon::load(path).with_context(|| format!("reading lexicon {}", path.display()))
}

fn headline_pipeline(
    lex: &EmotionLexicon,
    table: Option<&Path>,
    policy: AmbiguityPolicy,
) -> Result<TextPipeline> {
    let vocab = lex.vocabulary().context("lexicon vocabulary")?;
    Ok(TextPipeline::new(lemma_table(table)?, Some(vocab), policy))
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let mut header = Header::new("eval");
    header.input("lexicon", &args.lexicon)?;
    header.input("gold", &args.gold)?;
    header.optional_input("labels", args.labels.as_deref())?;
    header.optional_input("lemma_table", args.lemma_table.as_deref())?;
    header.flag("ambiguity", args.ambiguity);

    let lex = load_lexicon(&args.lexicon)?;
    let mapping = match args.mapping.as_str() {
        "semeval" => EmotionMapping::semeval_rappler(),
        "identity" => EmotionMapping::identity(lex.emotions()),
        path => {
            let path = Path::new(path);
            header.input("mapping_file", path)?;
            EmotionMapping::read(open(path)?)
                .with_context(|| format!("reading mapping {}", path.display()))?
        }
    };
    header.flag("mapping", &args.mapping);
    if !(0.0..=1.0).contains(&args.threshold) {
        bail!("--threshold must lie in [0, 1], got {}", args.threshold);
    }

    let pipeline = headline_pipeline(&lex, args.lemma_table.as_deref(), args.ambiguity)?;
    let mut gold = read_gold(open(&args.gold)?, |text| headline_tokens(text, &pipeline))
        .with_context(|| format!("reading gold {}", args.gold.display()))?;
    if let Some(path) = &args.labels {
        read_labels(open(path)?, &mut gold)
            .with_context(|| format!("reading labels {}", path.display()))?;
    }
    let options = EvalOptions {
        uncovered: args.uncovered,
        threshold: args.threshold,
        minmax: args.minmax,
    };
    let report = evaluate(&gold, &lex, &mapping, &options).context("evaluating")?;
    if !report.discarded.is_empty() {
        log::info!("discarded target(s): {}", report.discarded.join(", "));
    }

    let mut metadata = header.into_metadata();
    for (k, v) in lex.metadata().entries() {
        metadata.push(format!("lexicon.{k}"), v);
    }
    if let Some(path) = &args.tsv {
        let mut out = create(Some(path))?;
        report
            .write_tsv(&metadata, &mut out)
            .context("writing report")?;
        out.flush()?;
    }
    if args.report.is_some() || args.tsv.is_none() {
        let mut out = create(args.report.as_deref())?;
        report
            .write_table(&metadata, &mut out)
            .context("writing report")?;
        out.flush()?;
    }
    Ok(())
}

pub fn score(args: &ScoreArgs) -> Result<()> {
    let mut header = Header::new("score");
    header.input("lexicon", &args.lexicon)?;
    header.input("input", &args.input)?;
    header.optional_input("lemma_table", args.lemma_table.as_deref())?;
    header.flag("ambiguity", args.ambiguity);

    let lex = load_lexicon(&args.lexicon)?;
    let pipeline = headline_pipeline(&lex, args.lemma_table.as_deref(), args.ambiguity)?;

    let mut out = create(args.output.as_deref())?;
    header.into_metadata().write(&mut out)?;
    write!(out, "id")?;
    for label in lex.emotions().labels() {
        write!(out, "\t{label}")?;
    }
    writeln!(out, "\tcovered\ttotal")?;
    for (idx, line) in open(&args.input)?.lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", args.input.display()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (id, text) = match line.split_once('\t') {
            Some((id, text)) => (id.to_string(), text),
            None => ((idx + 1).to_string(), line),
        };
        let s = score_headline(&headline_tokens(text, &pipeline), &lex);
        write!(out, "{id}")?;
        for v in &s.scores {
            write!(out, "\t{}", format_sig9(*v))?;
        }
        writeln!(out, "\t{}\t{}", s.covered, s.total)?;
    }
    out.flush()?;
    Ok(())
}

pub fn stats(args: &StatsArgs) -> Result<()> {
    let mut header = Header::new("stats");
    let vocab = args.vocab.as_deref().map(read_vocab).transpose()?;
    let parsed = read_corpus(&args.corpus, vocab.as_ref(), &mut header)?;
    header.optional_input("vocab", args.vocab.as_deref())?;
    let stats = corpus_stats(&parsed.corpus).context("computing corpus statistics")?;

    let mut summary = Metadata::new();
    summary.push("documents", stats.doc_count);
    summary.push("tokens", stats.token_count);
    summary.push("mean_doc_length", format_sig9(stats.mean_doc_length));
    summary.push("skipped_low_votes", parsed.skipped_low_votes.len());

    let mut out = create(args.output.as_deref())?;
    header.into_metadata().write(&mut out)?;
    summary.write(&mut out)?;
    writeln!(out, "emotion\tmean_votes")?;
    for (label, v) in parsed
        .corpus
        .emotions()
        .labels()
        .iter()
        .zip(&stats.mean_votes)
    {
        writeln!(out, "{label}\t{}", format_sig9(*v))?;
    }
    out.flush()?;
    Ok(())
}
