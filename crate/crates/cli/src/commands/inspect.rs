use std::collections::BTreeMap;
use std::path::PathBuf;

use absa_forge::{applicable_tasks, Capabilities, Dataset, Task};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::manifest::{beside, Recorder};
use crate::util::{load_canonical, write_file};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InspectArgs {
    /// Canonical dataset files.
    #[arg(required = false)]
    pub inputs: Vec<PathBuf>,
    /// text or json [default: text].
    #[arg(long)]
    pub format: Option<String>,
    /// Also write the JSON statistics to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct Stats {
    pub path: String,
    pub name: String,
    pub split: String,
    pub capabilities: Capabilities,
    pub applicable_tasks: Vec<Task>,
    pub examples: usize,
    pub examples_without_quads: usize,
    pub quads: usize,
    pub implicit_aspects: usize,
    pub missing_opinions: usize,
    pub categories: BTreeMap<String, usize>,
    pub sentiments: BTreeMap<String, usize>,
}

pub fn stats(path: String, ds: &Dataset) -> Stats {
    let quads = || ds.examples.iter().flat_map(|e| &e.quads);
    let mut categories = BTreeMap::new();
    let mut sentiments = BTreeMap::new();
    for q in quads() {
        if let Some(c) = &q.category {
            *categories.entry(c.to_string()).or_insert(0) += 1;
        }
        *sentiments.entry(q.sentiment.to_string()).or_insert(0) += 1;
    }
    Stats {
        path,
        name: ds.name.clone(),
        split: ds.split.to_string(),
        capabilities: ds.capabilities,
        applicable_tasks: applicable_tasks(ds.capabilities),
        examples: ds.examples.len(),
        examples_without_quads: ds.examples.iter().filter(|e| e.quads.is_empty()).count(),
        quads: ds.quad_count(),
        implicit_aspects: quads().filter(|q| q.aspect.is_implicit()).count(),
        missing_opinions: quads().filter(|q| q.opinion.is_none()).count(),
        categories,
        sentiments,
    }
}

fn render_text(s: &Stats) -> String {
    let tasks: Vec<&str> = s.applicable_tasks.iter().map(|t| t.name()).collect();
    let mut out = format!(
        "{} ({} / {})\n  examples: {} ({} without quads)\n  quads: {} ({} implicit aspects, {} without opinion)\n  tasks: {}\n",
        s.path,
        s.name,
        s.split,
        s.examples,
        s.examples_without_quads,
        s.quads,
        s.implicit_aspects,
        s.missing_opinions,
        tasks.join(", ")
    );
    out.push_str("  sentiments:\n");
    for (k, v) in &s.sentiments {
        out.push_str(&format!("    {k:<12} {v}\n"));
    }
    if !s.categories.is_empty() {
        out.push_str(&format!("  categories ({}):\n", s.categories.len()));
        for (k, v) in &s.categories {
            out.push_str(&format!("    {k:<32} {v}\n"));
        }
    }
    out
}

pub fn run(args: InspectArgs, argv: &[String]) -> Result<()> {
    if args.inputs.is_empty() {
        return Err(usage("inspect needs at least one canonical file"));
    }
    let json = match args.format.as_deref().unwrap_or("text") {
        "text" => false,
        "json" => true,
        other => return Err(usage(format!("--format: unknown format `{other}` (text, json)"))),
    };
    let mut rec = Recorder::new("inspect", argv, &args);
    let mut all = Vec::new();
    for path in &args.inputs {
        rec.input(path);
        all.push(stats(path.display().to_string(), &load_canonical(path)?));
    }
    let as_json = serde_json::to_string_pretty(&all)? + "\n";
    if json {
        print!("{as_json}");
    } else {
        for s in &all {
            print!("{}", render_text(s));
        }
    }
    if let Some(out) = &args.out {
        write_file(out, as_json.as_bytes())?;
        rec.output(out);
        rec.write(&beside(out))?;
    }
    Ok(())
}
