use std::path::{Path, PathBuf};

use absa_forge::records::{read_predictions, write_lines, ParsedRecord, PredictionRecord};
use absa_forge::{parse_prediction, CategoryVocab, SentimentLexicon};
use anyhow::Context;
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::manifest::{beside, Recorder};
use crate::util::{load_canonical, parse_lexicon, read_text, required, write_file};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParseArgs {
    /// Predictions file: one {"id","task","generated"} object per line.
    #[arg(long)]
    pub pred: Option<PathBuf>,
    /// Canonical dataset whose categories form the decoding vocabulary.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Parsed-tuples output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sentiment words as positive,negative,neutral [default: great,bad,ok].
    #[arg(long)]
    pub lexicon: Option<String>,
}

#[derive(Debug, Default)]
pub struct ParseSummary {
    pub records: usize,
    pub segments: usize,
    pub malformed: usize,
    pub implicit: usize,
}

pub fn parse_records(
    preds: &[PredictionRecord],
    vocab: &CategoryVocab,
    lexicon: &SentimentLexicon,
) -> (Vec<ParsedRecord>, ParseSummary) {
    let mut summary = ParseSummary::default();
    let parsed = preds
        .iter()
        .map(|p| {
            let outcome = parse_prediction(&p.generated, p.task, vocab, lexicon);
            summary.records += 1;
            summary.segments += outcome.raw_segment_count;
            summary.malformed += outcome.malformed.len();
            summary.implicit += outcome.implicit_aspects;
            ParsedRecord::new(p.id.clone(), &outcome)
        })
        .collect();
    (parsed, summary)
}

/// Parses a predictions file into `out`; shared with `pipeline`.
pub fn parse_file(
    pred: &Path,
    vocab: &CategoryVocab,
    lexicon: &SentimentLexicon,
    out: &Path,
    rec: &mut Recorder,
) -> Result<(Vec<ParsedRecord>, ParseSummary)> {
    rec.input(pred);
    let preds = read_predictions(&read_text(pred)?).with_context(|| format!("reading {}", pred.display()))?;
    let (parsed, summary) = parse_records(&preds, vocab, lexicon);
    let mut buf = Vec::new();
    write_lines(&parsed, &mut buf)?;
    write_file(out, &buf)?;
    rec.output(out);
    if summary.implicit > 0 {
        log::info!(
            "{}: {} tuples decoded with an implicit aspect; an explicit aspect spelled `it` is indistinguishable",
            pred.display(),
            summary.implicit
        );
    }
    Ok((parsed, summary))
}

pub fn run(args: ParseArgs, argv: &[String]) -> Result<()> {
    let pred = required(&args.pred, "pred")?;
    let out = required(&args.out, "out")?;
    let lexicon = parse_lexicon(args.lexicon.as_deref())?;
    let mut rec = Recorder::new("parse", argv, &args);
    let vocab = match &args.gold {
        Some(g) => {
            rec.input(g);
            CategoryVocab::new(&load_canonical(g)?.category_vocab)
        }
        None => CategoryVocab::default(),
    };
    let (_, s) = parse_file(&pred, &vocab, &lexicon, &out, &mut rec)?;
    rec.write(&beside(&out))?;
    eprintln!(
        "parsed {} records: {} segments, {} malformed, {} implicit aspects",
        s.records, s.segments, s.malformed, s.implicit
    );
    Ok(())
}
