use std::path::{Path, PathBuf};

use absa_forge::mtl::{write_corpus_to, Corpus, EmitError, TemplatePolicy};
use absa_forge::{emit_corpus, Dataset, EmitConfig, Mode, SentimentLexicon, TemplateRegistry};
use clap::Args;
use serde::{Deserialize, Serialize};

use super::is_false;
use crate::error::{usage, Result};
use crate::manifest::{beside, Recorder};
use crate::util::{load_canonical, load_templates, parse_flag, parse_lexicon, parse_tasks, required, write_file};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitArgs {
    /// Canonical dataset.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Corpus file (line-delimited JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// text, it or it-mtl [default: it-mtl].
    #[arg(long)]
    pub mode: Option<String>,
    /// all, applicable, or a comma list such as ae,aesc,aste [default: applicable].
    #[arg(long)]
    pub tasks: Option<String>,
    /// Seed for template draws and record order [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Emit N epochs with fresh template draws, as `<out stem>.epoch<e>.jsonl`.
    #[arg(long)]
    pub per_epoch: Option<u64>,
    /// Evaluation emission: template 0 for every record.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub eval: bool,
    /// Drop (example, task) pairs missing a required element instead of failing.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub skip_incomplete: bool,
    /// JSON file mapping task names to replacement instruction templates.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Sentiment words as positive,negative,neutral [default: great,bad,ok].
    #[arg(long)]
    pub lexicon: Option<String>,
}

pub struct Emitter {
    pub registry: TemplateRegistry,
    pub lexicon: SentimentLexicon,
}

impl Emitter {
    pub fn new(templates: Option<&Path>, lexicon: Option<&str>) -> Result<Self> {
        Ok(Emitter {
            registry: load_templates(templates)?,
            lexicon: parse_lexicon(lexicon)?,
        })
    }

    pub fn emit(&self, ds: &Dataset, config: &EmitConfig, out: &Path, rec: &mut Recorder) -> Result<Corpus> {
        let corpus = emit_corpus(ds, config, &self.registry, &self.lexicon).map_err(|e| match e {
            EmitError::InvalidConfig(_) | EmitError::Template(_) => usage(e.to_string()),
            other => other.into(),
        })?;
        for (id, task) in &corpus.skipped {
            log::warn!("skipped {id} for {task}: missing element");
        }
        let mut buf = Vec::new();
        write_corpus_to(&corpus, &mut buf)?;
        write_file(out, &buf)?;
        rec.output(out);
        Ok(corpus)
    }
}

pub fn epoch_path(out: &Path, epoch: u64) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    out.with_file_name(format!("{stem}.epoch{epoch}{ext}"))
}

pub fn run(args: EmitArgs, argv: &[String]) -> Result<()> {
    let input = required(&args.input, "input")?;
    let out = required(&args.out, "out")?;
    let mode: Mode = parse_flag(args.mode.as_deref().unwrap_or("it-mtl"), "mode")?;
    let seed = args.seed.unwrap_or(0);
    let epochs = args.per_epoch.unwrap_or(1);
    if epochs == 0 {
        return Err(usage("--per-epoch must be at least 1"));
    }
    let emitter = Emitter::new(args.templates.as_deref(), args.lexicon.as_deref())?;
    let mut rec = Recorder::new("emit", argv, &args);
    rec.seed(seed);
    rec.input(&input);
    if let Some(t) = &args.templates {
        rec.input(t);
    }
    let ds = load_canonical(&input)?;
    let tasks = parse_tasks(args.tasks.as_deref().unwrap_or("applicable"), ds.capabilities)?;
    let base = if args.eval {
        EmitConfig::eval(mode, tasks, seed)
    } else {
        EmitConfig::train(mode, tasks, seed)
    };
    for epoch in 0..epochs {
        let path = if args.per_epoch.is_some() { epoch_path(&out, epoch) } else { out.clone() };
        let config = EmitConfig {
            epoch,
            skip_incomplete: args.skip_incomplete,
            ..base.clone()
        };
        let corpus = emitter.emit(&ds, &config, &path, &mut rec)?;
        eprintln!(
            "wrote {} records ({} mode, {}) to {}",
            corpus.records.len(),
            mode,
            match config.template_policy {
                TemplatePolicy::Fixed(i) => format!("template {i}"),
                TemplatePolicy::Random => "random templates".into(),
            },
            path.display()
        );
    }
    rec.write(&beside(&out))
}
