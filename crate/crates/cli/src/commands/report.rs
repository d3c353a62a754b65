use std::fs;
use std::path::{Path, PathBuf};

use absa_forge::eval::{report, LabeledReport, Layout};
use anyhow::Context;
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::manifest::{beside, Recorder};
use crate::util::{parse_flag, read_text, write_file};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportArgs {
    /// Labelled report files from `eval --out`, or directories searched
    /// recursively for `*.eval.json`.
    #[arg(required = false)]
    pub inputs: Vec<PathBuf>,
    /// markdown or json [default: markdown].
    #[arg(long)]
    pub format: Option<String>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn collect(path: &Path, found: &mut Vec<PathBuf>) -> Result<()> {
    if path.is_dir() {
        let mut entries = fs::read_dir(path)
            .with_context(|| format!("listing {}", path.display()))?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<Vec<_>>>()?;
        entries.sort();
        for e in entries {
            if e.is_dir() || e.to_string_lossy().ends_with(".eval.json") {
                collect(&e, found)?;
            }
        }
    } else {
        found.push(path.to_path_buf());
    }
    Ok(())
}

pub fn load_reports(inputs: &[PathBuf]) -> Result<(Vec<PathBuf>, Vec<LabeledReport>)> {
    let mut files = Vec::new();
    for p in inputs {
        collect(p, &mut files)?;
    }
    let reports = files
        .iter()
        .map(|f| serde_json::from_str(&read_text(f)?).with_context(|| format!("reading report {}", f.display())))
        .collect::<Result<Vec<LabeledReport>>>()?;
    Ok((files, reports))
}

pub fn run(args: ReportArgs, argv: &[String]) -> Result<()> {
    if args.inputs.is_empty() {
        return Err(usage("report needs at least one report file or directory"));
    }
    let layout: Layout = parse_flag(args.format.as_deref().unwrap_or("markdown"), "format")?;
    let (files, reports) = load_reports(&args.inputs)?;
    if reports.is_empty() {
        anyhow::bail!("no *.eval.json reports found");
    }
    let table = report(&reports, layout);
    match &args.out {
        Some(out) => {
            let mut rec = Recorder::new("report", argv, &args);
            for f in &files {
                rec.input(f);
            }
            write_file(out, table.as_bytes())?;
            rec.output(out);
            rec.write(&beside(out))?;
        }
        None => print!("{table}"),
    }
    Ok(())
}
