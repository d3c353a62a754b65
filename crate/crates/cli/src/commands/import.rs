use std::path::PathBuf;

use absa_forge::ingest::{write_canonical_to, LoadOptions};
use absa_forge::{load_dataset, Format, Split};
use anyhow::Context;
use clap::Args;
use serde::{Deserialize, Serialize};

use super::is_false;
use crate::error::Result;
use crate::manifest::{beside, Recorder};
use crate::util::{parse_flag, required, write_file};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImportArgs {
    /// Raw annotation file (`sentence####annotations` per line).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input layout: quad or aste.
    #[arg(long)]
    pub format: Option<String>,
    /// Canonical output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// train, dev or test [default: inferred from the file name, else train].
    #[arg(long)]
    pub split: Option<String>,
    /// Dataset name [default: input file stem].
    #[arg(long)]
    pub name: Option<String>,
    /// Skip malformed lines (reported on stderr) instead of failing.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub lenient: bool,
}

pub fn run(args: ImportArgs, argv: &[String]) -> Result<()> {
    let input = required(&args.input, "input")?;
    let out = required(&args.out, "out")?;
    let format: Format = parse_flag(&required(&args.format, "format")?, "format")?;
    let split = args.split.as_deref().map(|s| parse_flag::<Split>(s, "split")).transpose()?;
    let mut rec = Recorder::new("import", argv, &args);
    rec.input(&input);

    let opts = LoadOptions {
        split,
        name: args.name.clone(),
        lenient: args.lenient,
    };
    let loaded = load_dataset(&input, format, &opts).with_context(|| format!("loading {}", input.display()))?;
    for w in &loaded.warnings {
        log::warn!("{}: {w}", input.display());
    }
    for e in &loaded.skipped {
        eprintln!("skipped {}: {e}", input.display());
    }
    let ds = &loaded.dataset;
    let mut buf = Vec::new();
    write_canonical_to(ds, &mut buf)?;
    write_file(&out, &buf)?;
    rec.output(&out);
    rec.write(&beside(&out))?;
    eprintln!(
        "imported {} examples ({} quads, {} categories) from {} into {}{}",
        ds.examples.len(),
        ds.quad_count(),
        ds.category_vocab.len(),
        input.display(),
        out.display(),
        if loaded.skipped.is_empty() {
            String::new()
        } else {
            format!("; skipped {} malformed lines", loaded.skipped.len())
        }
    );
    Ok(())
}
