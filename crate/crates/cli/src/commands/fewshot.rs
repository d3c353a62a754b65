use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use absa_forge::fewshot::{FewShotSample, StratumCount};
use absa_forge::ingest::write_canonical_to;
use absa_forge::{sample_fewshot, Dataset, FewShotSpec, Split, Stratum};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::manifest::Recorder;
use crate::util::{ensure_dir, load_canonical, parse_flag, required, write_file};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FewshotArgs {
    /// Directory holding canonical `<split>.jsonl` files.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Output directory for the subsets, `fewshot.json` and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Minimum occurrences per stratum value.
    #[arg(long)]
    pub k: Option<usize>,
    /// Stratify by category or sentiment [default: category].
    #[arg(long)]
    pub by: Option<String>,
    /// Shuffle seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Splits to sample [default: train].
    #[arg(long, value_delimiter = ',')]
    pub split: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SplitSummary {
    pub split: Split,
    pub k: usize,
    pub stratify_by: Stratum,
    pub seed: u64,
    pub source_examples: usize,
    pub prefix_len: usize,
    pub counts: BTreeMap<String, StratumCount>,
}

impl SplitSummary {
    pub fn new(split: Split, spec: &FewShotSpec, source: &Dataset, sample: &FewShotSample) -> Self {
        SplitSummary {
            split,
            k: spec.k,
            stratify_by: spec.stratify_by,
            seed: spec.seed,
            source_examples: source.examples.len(),
            prefix_len: sample.prefix_len,
            counts: sample.counts.clone(),
        }
    }
}

/// Samples one split and writes `<out>/<split>.jsonl`.
pub fn sample_split(
    source: &Dataset,
    split: Split,
    spec: &FewShotSpec,
    out: &Path,
    rec: &mut Recorder,
) -> Result<SplitSummary> {
    let sample = sample_fewshot(source, spec).map_err(|e| usage(e.to_string()))?;
    let mut buf = Vec::new();
    write_canonical_to(&sample.dataset, &mut buf)?;
    let path = out.join(format!("{split}.jsonl"));
    write_file(&path, &buf)?;
    rec.output(&path);
    Ok(SplitSummary::new(split, spec, source, &sample))
}

pub fn run(args: FewshotArgs, argv: &[String]) -> Result<()> {
    let data = required(&args.data, "data")?;
    let out = ensure_dir(&required(&args.out, "out")?)?;
    let k = required(&args.k, "k")?;
    let by: Stratum = parse_flag(args.by.as_deref().unwrap_or("category"), "by")?;
    let seed = args.seed.unwrap_or(0);
    let splits = if args.split.is_empty() {
        vec![Split::Train]
    } else {
        args.split.iter().map(|s| parse_flag::<Split>(s, "split")).collect::<Result<_>>()?
    };
    let spec = FewShotSpec { k, stratify_by: by, seed };
    let mut rec = Recorder::new("fewshot", argv, &args);
    rec.seed(seed);

    let mut summaries = Vec::new();
    for split in splits {
        let path = data.join(format!("{split}.jsonl"));
        rec.input(&path);
        let source = load_canonical(&path)?;
        let s = sample_split(&source, split, &spec, &out, &mut rec)?;
        eprintln!(
            "{split}: kept {} of {} examples (k={k}, by {by}, seed {seed})",
            s.prefix_len, s.source_examples
        );
        summaries.push(s);
    }
    let summary_path = out.join("fewshot.json");
    write_file(&summary_path, (serde_json::to_string_pretty(&summaries)? + "\n").as_bytes())?;
    rec.output(&summary_path);
    rec.write(&out.join("manifest.json"))
}
