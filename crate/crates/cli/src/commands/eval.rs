use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use absa_forge::eval::{report, LabeledReport, Layout};
use absa_forge::records::{read_parsed, ParsedRecord};
use absa_forge::{score, Dataset, ParseOutcome, ScoreOptions, ScoreReport, Task};
use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};

use super::is_false;
use crate::error::Result;
use crate::manifest::{beside, Recorder};
use crate::util::{load_canonical, parse_flag, read_text, required, write_file};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalArgs {
    /// Task to score.
    #[arg(long)]
    pub task: Option<String>,
    /// Canonical gold dataset.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Parsed-tuples file produced by `parse`.
    #[arg(long)]
    pub pred: Option<PathBuf>,
    /// markdown or json [default: markdown].
    #[arg(long)]
    pub format: Option<String>,
    /// Lowercase every element before matching.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub casefold: bool,
    /// Run label used by `report` [default: run].
    #[arg(long)]
    pub run: Option<String>,
    /// Shot count label used by `report` [default: full].
    #[arg(long)]
    pub k: Option<String>,
    /// Write the labelled JSON report here (input to `report`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Scores parsed records for one task against gold. Gold examples without a
/// record count as empty predictions; records with unknown ids are errors.
pub fn score_records(gold: &Dataset, parsed: &[ParsedRecord], task: Task, options: ScoreOptions) -> Result<ScoreReport> {
    let ids: HashSet<&str> = gold.examples.iter().map(|e| e.id.as_str()).collect();
    let mut by_id: HashMap<&str, ParseOutcome> = HashMap::new();
    let mut unknown = Vec::new();
    for r in parsed.iter().filter(|r| r.task == task) {
        if ids.contains(r.id.as_str()) {
            by_id.insert(&r.id, r.to_outcome());
        } else {
            unknown.push(r.id.as_str());
        }
    }
    if !unknown.is_empty() {
        for id in &unknown {
            eprintln!("  unknown example id `{id}`");
        }
        bail!("{} {task} prediction(s) do not match any gold example", unknown.len());
    }
    let missing = gold.examples.len() - by_id.len();
    if missing > 0 {
        log::warn!("{missing} gold examples have no {task} prediction; scored as empty");
    }
    let empty = ParseOutcome::empty(task);
    let pairs = gold.examples.iter().map(|e| (e, by_id.get(e.id.as_str()).unwrap_or(&empty)));
    Ok(score(pairs, task, options)?)
}

pub fn run(args: EvalArgs, argv: &[String]) -> Result<()> {
    let task: Task = parse_flag(&required(&args.task, "task")?, "task")?;
    let gold_path = required(&args.gold, "gold")?;
    let pred_path = required(&args.pred, "pred")?;
    let layout: Layout = parse_flag(args.format.as_deref().unwrap_or("markdown"), "format")?;
    let mut rec = Recorder::new("eval", argv, &args);
    rec.input(&gold_path);
    rec.input(&pred_path);

    let gold = load_canonical(&gold_path)?;
    let parsed = read_parsed(&read_text(&pred_path)?).with_context(|| format!("reading {}", pred_path.display()))?;
    let result = score_records(&gold, &parsed, task, ScoreOptions { casefold: args.casefold })?;
    let labeled = LabeledReport {
        run: args.run.clone().unwrap_or_else(|| "run".into()),
        k: args.k.clone().unwrap_or_else(|| "full".into()),
        report: result,
    };
    match layout {
        Layout::Markdown => print!("{}", report(std::slice::from_ref(&labeled), Layout::Markdown)),
        Layout::Json => println!("{}", serde_json::to_string_pretty(&labeled.report)?),
    }
    let r = &labeled.report;
    eprintln!(
        "{task}: tp={} pred={} gold={} P={} R={} F1={}",
        r.tp, r.pred_count, r.gold_count, r.precision, r.recall, r.f1
    );
    if let Some(out) = &args.out {
        write_file(out, (serde_json::to_string_pretty(&labeled)? + "\n").as_bytes())?;
        rec.output(out);
        rec.write(&beside(out))?;
    }
    Ok(())
}
