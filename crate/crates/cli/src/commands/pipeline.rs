use std::path::PathBuf;

use absa_forge::eval::{report, LabeledReport, Layout};
use absa_forge::ingest::write_canonical_to;
use absa_forge::{CategoryVocab, Dataset, EmitConfig, FewShotSpec, Mode, ScoreOptions, Split, Stratum, Task};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::emit::Emitter;
use super::eval::score_records;
use super::fewshot::sample_split;
use super::is_false;
use super::parse::parse_file;
use crate::error::{usage, Result};
use crate::manifest::Recorder;
use crate::util::{ensure_dir, load_canonical, parse_flag, parse_tasks, required, write_file};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineArgs {
    /// Directory with canonical train.jsonl and, optionally, test.jsonl.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Grid output directory; cells go to `<out>/k<k>/seed<seed>/`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Shot counts, e.g. 5,10,20,50 or full [default: 5,10,20,50].
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<String>,
    /// Number of seeds per shot count [default: 5].
    #[arg(long)]
    pub seeds: Option<u64>,
    /// First seed; cell i uses seed + i [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stratify by category or sentiment [default: category].
    #[arg(long)]
    pub by: Option<String>,
    /// text, it or it-mtl [default: it-mtl].
    #[arg(long)]
    pub mode: Option<String>,
    /// all, applicable, or a comma list [default: applicable].
    #[arg(long)]
    pub tasks: Option<String>,
    /// Run label in reports [default: the mode].
    #[arg(long)]
    pub run: Option<String>,
    /// Worker threads [default: one per core].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Drop (example, task) pairs missing a required element.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub skip_incomplete: bool,
    /// Lowercase elements before matching when scoring.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub casefold: bool,
    /// JSON file with replacement instruction templates.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Sentiment words as positive,negative,neutral [default: great,bad,ok].
    #[arg(long)]
    pub lexicon: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
struct Cell {
    k: String,
    seed: u64,
    dir: PathBuf,
}

#[derive(Debug, Serialize)]
struct CellSummary {
    #[serde(flatten)]
    cell: Cell,
    train_examples: usize,
    train_records: usize,
    test_records: Option<usize>,
    scored_tasks: Vec<Task>,
}

struct Grid<'a> {
    args: &'a PipelineArgs,
    argv: &'a [String],
    train_path: PathBuf,
    train: Dataset,
    test: Option<(PathBuf, Dataset)>,
    by: Stratum,
    mode: Mode,
    tasks: Vec<Task>,
    run_label: String,
    emitter: Emitter,
}

impl Grid<'_> {
    fn run_cell(&self, cell: &Cell) -> Result<(CellSummary, Vec<LabeledReport>)> {
        let dir = ensure_dir(&cell.dir)?;
        let mut rec = Recorder::new("pipeline", self.argv, &serde_json::json!({
            "grid": self.args,
            "cell": cell,
        }));
        rec.seed(cell.seed);
        rec.input(&self.train_path);

        let train = if cell.k == "full" {
            let mut buf = Vec::new();
            write_canonical_to(&self.train, &mut buf)?;
            let path = dir.join("train.jsonl");
            write_file(&path, &buf)?;
            rec.output(&path);
            self.train.clone()
        } else {
            let spec = FewShotSpec {
                k: cell.k.parse().expect("validated"),
                stratify_by: self.by,
                seed: cell.seed,
            };
            let summary = sample_split(&self.train, Split::Train, &spec, &dir, &mut rec)?;
            let path = dir.join("fewshot.json");
            write_file(&path, (serde_json::to_string_pretty(&[&summary])? + "\n").as_bytes())?;
            rec.output(&path);
            load_canonical(&dir.join("train.jsonl"))?
        };

        let train_cfg = EmitConfig {
            skip_incomplete: self.args.skip_incomplete,
            ..EmitConfig::train(self.mode, self.tasks.clone(), cell.seed)
        };
        let corpus = self.emitter.emit(&train, &train_cfg, &dir.join("train.mtl.jsonl"), &mut rec)?;

        let mut reports = Vec::new();
        let mut test_records = None;
        if let Some((test_path, test)) = &self.test {
            rec.input(test_path);
            let eval_cfg = EmitConfig {
                skip_incomplete: self.args.skip_incomplete,
                ..EmitConfig::eval(self.mode, self.tasks.clone(), cell.seed)
            };
            let c = self.emitter.emit(test, &eval_cfg, &dir.join("test.mtl.jsonl"), &mut rec)?;
            test_records = Some(c.records.len());

            let pred = dir.join("predictions.jsonl");
            if pred.exists() {
                let vocab = CategoryVocab::new(&test.category_vocab);
                let (parsed, _) = parse_file(&pred, &vocab, &self.emitter.lexicon, &dir.join("parsed.jsonl"), &mut rec)?;
                for &task in &self.tasks {
                    if !parsed.iter().any(|r| r.task == task) {
                        continue;
                    }
                    let report = score_records(test, &parsed, task, ScoreOptions { casefold: self.args.casefold })?;
                    let labeled = LabeledReport {
                        run: self.run_label.clone(),
                        k: cell.k.clone(),
                        report,
                    };
                    let path = dir.join(format!("{}.eval.json", task.name().to_lowercase()));
                    write_file(&path, (serde_json::to_string_pretty(&labeled)? + "\n").as_bytes())?;
                    rec.output(&path);
                    reports.push(labeled);
                }
            }
        }
        rec.write(&dir.join("manifest.json"))?;
        Ok((
            CellSummary {
                cell: cell.clone(),
                train_examples: train.examples.len(),
                train_records: corpus.records.len(),
                test_records,
                scored_tasks: reports.iter().map(|r| r.report.task).collect(),
            },
            reports,
        ))
    }
}

fn validate_k(k: &str) -> Result<()> {
    match k.parse::<usize>() {
        Ok(n) if n > 0 => Ok(()),
        _ if k == "full" => Ok(()),
        _ => Err(usage(format!("--k: `{k}` is neither a positive integer nor `full`"))),
    }
}

pub fn run(args: PipelineArgs, argv: &[String]) -> Result<()> {
    let data = required(&args.data, "data")?;
    let out = ensure_dir(&required(&args.out, "out")?)?;
    let ks: Vec<String> = if args.k.is_empty() {
        ["5", "10", "20", "50"].map(String::from).to_vec()
    } else {
        args.k.clone()
    };
    for k in &ks {
        validate_k(k)?;
    }
    let n_seeds = args.seeds.unwrap_or(5);
    if n_seeds == 0 {
        return Err(usage("--seeds must be at least 1"));
    }
    let base_seed = args.seed.unwrap_or(0);
    let mode: Mode = parse_flag(args.mode.as_deref().unwrap_or("it-mtl"), "mode")?;
    let by: Stratum = parse_flag(args.by.as_deref().unwrap_or("category"), "by")?;

    let train_path = data.join("train.jsonl");
    let train = load_canonical(&train_path)?;
    let test_path = data.join("test.jsonl");
    let test = if test_path.exists() {
        Some((test_path.clone(), load_canonical(&test_path)?))
    } else {
        log::warn!("{} not found; cells will have no evaluation corpus", test_path.display());
        None
    };
    let tasks = parse_tasks(args.tasks.as_deref().unwrap_or("applicable"), train.capabilities)?;
    let grid = Grid {
        args: &args,
        argv,
        train_path: train_path.clone(),
        train,
        test,
        by,
        mode,
        tasks,
        run_label: args.run.clone().unwrap_or_else(|| mode.to_string()),
        emitter: Emitter::new(args.templates.as_deref(), args.lexicon.as_deref())?,
    };

    let mut cells = Vec::new();
    for k in &ks {
        for seed in base_seed..base_seed + n_seeds {
            cells.push(Cell {
                k: k.clone(),
                seed,
                dir: out.join(format!("k{k}")).join(format!("seed{seed}")),
            });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()?;
    let results: Vec<Result<(CellSummary, Vec<LabeledReport>)>> =
        pool.install(|| cells.par_iter().map(|c| grid.run_cell(c)).collect());

    let mut summaries = Vec::new();
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for (cell, r) in cells.iter().zip(results) {
        match r {
            Ok((s, mut rs)) => {
                summaries.push(s);
                reports.append(&mut rs);
            }
            Err(e) => errors.push((cell, e)),
        }
    }
    let failed = errors.len();
    let mut errors = errors.into_iter();
    if let Some((first, err)) = errors.next() {
        for (cell, e) in errors {
            eprintln!("cell k={} seed={}: {e:#}", cell.k, cell.seed);
        }
        let msg = format!("{failed} of {} cells failed; first: k={} seed={}", cells.len(), first.k, first.seed);
        return Err(err.context(msg));
    }

    let mut rec = Recorder::new("pipeline", argv, &args);
    for c in &cells {
        rec.seed(c.seed);
    }
    rec.input(&train_path);
    if let Some((p, _)) = &grid.test {
        rec.input(p);
    }
    let grid_path = out.join("grid.json");
    write_file(&grid_path, (serde_json::to_string_pretty(&summaries)? + "\n").as_bytes())?;
    rec.output(&grid_path);
    for s in &summaries {
        rec.output(&s.cell.dir.join("manifest.json"));
    }
    if !reports.is_empty() {
        let path = out.join("report.md");
        write_file(&path, report(&reports, Layout::Markdown).as_bytes())?;
        rec.output(&path);
    }
    rec.write(&out.join("manifest.json"))?;
    eprintln!(
        "{} cells ({} k × {n_seeds} seeds) in {}; {} evaluation reports",
        cells.len(),
        ks.len(),
        out.display(),
        reports.len()
    );
    Ok(())
}
