mod manifest;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value as Json};

use prefdial::engine::{read_flows, write_flows, PolicyConfig, Setting, Simulator};
use prefdial::evalhub::{self, split::PART_NAMES, Prf, Task};
use prefdial::realizer::{realize_corpus, TemplateSet};
use prefdial::{load_catalog, Catalog, Ontology, SpdMode};

use manifest::{manifest_path, unix_now, with_jobs, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "prefdial", version, about = "Simulate, realize and score preference-elicitation shopping dialogs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CatalogArgs {
    /// Scene snapshots (JSON array).
    #[arg(long)]
    scenes: PathBuf,
    /// Item metadata; defaults to metadata.json next to the scenes file.
    #[arg(long)]
    metadata: Option<PathBuf>,
    /// Concept ontology (JSON).
    #[arg(long)]
    ontology: PathBuf,
}

impl CatalogArgs {
    fn metadata_path(&self) -> PathBuf {
        self.metadata.clone().unwrap_or_else(|| self.scenes.with_file_name("metadata.json"))
    }

    fn load(&self) -> Result<(Catalog, Ontology)> {
        let catalog = load_catalog(&self.scenes, self.metadata_path())?;
        let ontology = Ontology::load(&self.ontology, &catalog.value_space())?;
        Ok((catalog, ontology))
    }

    fn inputs(&self, inputs: &mut BTreeMap<String, PathBuf>) {
        inputs.insert("scenes".into(), self.scenes.clone());
        inputs.insert("metadata".into(), self.metadata_path());
        inputs.insert("ontology".into(), self.ontology.clone());
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TaskArg {
    Spd,
    Rru,
    Act,
    Response,
    Recommend,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Spd => Task::Spd,
            TaskArg::Rru => Task::Rru,
            TaskArg::Act => Task::Act,
            TaskArg::Response => Task::Response,
            TaskArg::Recommend => Task::Recommend,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum ModeArg {
    #[default]
    Cumulative,
    SceneOnly,
}

impl From<ModeArg> for SpdMode {
    fn from(m: ModeArg) -> SpdMode {
        match m {
            ModeArg::Cumulative => SpdMode::Cumulative,
            ModeArg::SceneOnly => SpdMode::SceneOnly,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check scenes, metadata, ontology and optionally policy, templates and flows.
    Validate {
        #[command(flatten)]
        catalog: CatalogArgs,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        templates: Option<PathBuf>,
        /// Dialog flows to replay against the catalog.
        #[arg(long)]
        flows: Option<PathBuf>,
    },
    /// Generate dialog flows by self-play.
    Simulate {
        #[command(flatten)]
        catalog: CatalogArgs,
        #[arg(long)]
        policy: PathBuf,
        /// Number of dialogs.
        #[arg(long)]
        n: usize,
        /// Index of the first dialog.
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Base seed; defaults to the policy's `rng_seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Fill utterances into dialog flows from templates.
    Realize {
        #[command(flatten)]
        catalog: CatalogArgs,
        #[arg(long)]
        flows: PathBuf,
        #[arg(long)]
        templates: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Derive gold rows for a benchmark task.
    Gold {
        #[command(flatten)]
        catalog: CatalogArgs,
        #[arg(long)]
        flows: PathBuf,
        #[arg(long, value_enum)]
        task: TaskArg,
        /// SPD gold derivation.
        #[arg(long, value_enum, default_value_t = ModeArg::Cumulative)]
        mode: ModeArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shuffle dialogs into train/dev/devtest/teststd files.
    Split {
        #[arg(long)]
        flows: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = evalhub::DEFAULT_RATIOS)]
        ratios: Vec<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Corpus statistics and per-round act transitions.
    Stats {
        #[arg(long)]
        flows: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Report file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score predictions against gold rows.
    Eval {
        #[arg(long, value_enum)]
        task: TaskArg,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accepted for symmetry with the generators; scoring is single-threaded.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Re-run the command recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        /// Override the recorded worker count for subcommands that take `--jobs`.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Simulate { .. } => "simulate",
            Command::Realize { .. } => "realize",
            Command::Gold { .. } => "gold",
            Command::Split { .. } => "split",
            Command::Stats { .. } => "stats",
            Command::Eval { .. } => "eval",
            Command::Replay { .. } => "replay",
        }
    }
}

/// Bad flag combinations detected after parsing; reported with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// What a command read and wrote, for the manifest.
#[derive(Default)]
struct Run {
    inputs: BTreeMap<String, PathBuf>,
    outputs: Vec<PathBuf>,
    seed: Option<u64>,
    config: Option<PathBuf>,
}

fn guard_outputs(run: &Run) -> Result<()> {
    for out in &run.outputs {
        if let Some((name, _)) = run.inputs.iter().find(|(_, p)| same_file(p, out)) {
            return Err(UsageError(format!("output {} would overwrite the {name} input", out.display())).into());
        }
    }
    Ok(())
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(a), Ok(b)) => a == b,
        _ => a == b,
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn prf_csv(out: &mut String, prefix: &str, p: &Prf) {
    let _ = writeln!(out, "{prefix}.precision,{}", p.precision);
    let _ = writeln!(out, "{prefix}.recall,{}", p.recall);
    let _ = writeln!(out, "{prefix}.f1,{}", p.f1);
    let _ = writeln!(out, "{prefix}.true_positives,{}", p.true_positives);
    let _ = writeln!(out, "{prefix}.false_positives,{}", p.false_positives);
    let _ = writeln!(out, "{prefix}.false_negatives,{}", p.false_negatives);
}

fn eval_report(task: Task, pred: &Path, gold: &Path, format: Format) -> Result<String> {
    let preds = evalhub::read_rows(pred)?;
    let gold = evalhub::read_rows(gold)?;
    let mut csv = String::from("metric,value\n");
    let _ = writeln!(csv, "task,{task}");
    let json: Json = match task {
        Task::Spd | Task::Rru | Task::Recommend => {
            let r = if task == Task::Recommend {
                evalhub::eval_recommend(&preds, &gold)?
            } else {
                evalhub::eval_set_task(&preds, &gold, task)?
            };
            if let Some(mode) = r.mode {
                let _ = writeln!(csv, "mode,{}", mode.name());
            }
            let _ = writeln!(csv, "rows,{}", r.rows);
            let _ = writeln!(csv, "predicted_rows,{}", r.predicted_rows);
            prf_csv(&mut csv, "micro", &r.micro);
            prf_csv(&mut csv, "macro", &r.macro_avg);
            serde_json::to_value(&r)?
        }
        Task::Act => {
            let r = evalhub::eval_act(&preds, &gold)?;
            let _ = writeln!(csv, "rows,{}", r.rows);
            let _ = writeln!(csv, "predicted_rows,{}", r.predicted_rows);
            let _ = writeln!(csv, "accuracy,{}", r.accuracy);
            prf_csv(&mut csv, "micro", &r.micro);
            prf_csv(&mut csv, "macro", &r.macro_avg);
            for (act, p) in &r.per_class {
                prf_csv(&mut csv, &format!("class.{act}"), p);
            }
            let mut v = serde_json::to_value(&r)?;
            v["task"] = json!(task);
            v
        }
        Task::Response => {
            let r = evalhub::eval_response(&preds, &gold)?;
            let _ = writeln!(csv, "pairs,{}", r.pairs);
            let _ = writeln!(csv, "bleu,{}", r.bleu);
            for (n, p) in r.precisions.iter().enumerate() {
                let _ = writeln!(csv, "precision_{},{p}", n + 1);
            }
            let _ = writeln!(csv, "brevity_penalty,{}", r.brevity_penalty);
            let _ = writeln!(csv, "hypothesis_length,{}", r.hypothesis_length);
            let _ = writeln!(csv, "reference_length,{}", r.reference_length);
            let mut v = serde_json::to_value(&r)?;
            v["task"] = json!(task);
            v
        }
    };
    match format {
        Format::Json => pretty(&json),
        Format::Csv => Ok(csv),
    }
}

/// Runs one command. `Replay` is resolved by the caller.
fn execute(command: &Command) -> Result<Run> {
    let mut run = Run::default();
    match command {
        Command::Validate { catalog, policy, templates, flows } => {
            catalog.inputs(&mut run.inputs);
            let (cat, ont) = catalog.load()?;
            let mut summary = BTreeMap::new();
            summary.insert("scenes", json!(cat.scenes.len()));
            summary.insert("items", json!(cat.scenes.iter().map(|s| s.items.len()).sum::<usize>()));
            summary.insert("concepts", json!(ont.concepts().len()));
            if let Some(p) = policy {
                PolicyConfig::load(p)?;
                summary.insert("policy", json!("ok"));
            }
            if let Some(t) = templates {
                TemplateSet::load(t)?;
                summary.insert("templates", json!("ok"));
            }
            if let Some(f) = flows {
                let flows = read_flows(f)?;
                for flow in &flows {
                    let scene = cat.scene(&flow.scene_id).ok_or_else(|| {
                        prefdial::Error::Validation(format!("dialog {}: unknown scene `{}`", flow.dialog_id, flow.scene_id))
                    })?;
                    flow.check(&Setting::new(scene, &ont)?)?;
                }
                summary.insert("flows", json!(flows.len()));
            }
            print!("{}", pretty(&summary)?);
        }
        Command::Simulate { catalog, policy, n, start, seed, out, jobs } => {
            catalog.inputs(&mut run.inputs);
            run.inputs.insert("policy".into(), policy.clone());
            run.config = Some(policy.clone());
            run.outputs.push(out.clone());
            guard_outputs(&run)?;
            let (cat, ont) = catalog.load()?;
            let cfg = PolicyConfig::load(policy)?;
            let seed = seed.unwrap_or(cfg.rng_seed);
            run.seed = Some(seed);
            let flows = Simulator::new(&cat, &ont, &cfg)?.run(*start..start + n, seed, *jobs)?;
            write_flows(out, &flows)?;
        }
        Command::Realize { catalog, flows, templates, seed, out, jobs } => {
            catalog.inputs(&mut run.inputs);
            run.inputs.insert("flows".into(), flows.clone());
            run.inputs.insert("templates".into(), templates.clone());
            run.config = Some(templates.clone());
            run.seed = Some(*seed);
            run.outputs.push(out.clone());
            guard_outputs(&run)?;
            let (cat, ont) = catalog.load()?;
            let tpl = TemplateSet::load(templates)?;
            let realized = realize_corpus(&read_flows(flows)?, &tpl, &ont, &cat, *seed, *jobs)?;
            write_flows(out, &realized)?;
        }
        Command::Gold { catalog, flows, task, mode, out } => {
            catalog.inputs(&mut run.inputs);
            run.inputs.insert("flows".into(), flows.clone());
            run.outputs.push(out.clone());
            guard_outputs(&run)?;
            let (cat, ont) = catalog.load()?;
            let rows = evalhub::build_gold(&read_flows(flows)?, &ont, &cat, (*task).into(), (*mode).into())?;
            evalhub::write_rows(out, &rows)?;
        }
        Command::Split { flows, ratios, seed, out_dir } => {
            run.inputs.insert("flows".into(), flows.clone());
            run.seed = Some(*seed);
            run.outputs = PART_NAMES.iter().map(|n| out_dir.join(format!("{n}.jsonl"))).collect();
            guard_outputs(&run)?;
            let corpus = read_flows(flows)?;
            let split = evalhub::split_corpus(&corpus, ratios, *seed)?;
            std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            for ((_, part), path) in split.named().zip(&run.outputs) {
                write_flows(path, part)?;
            }
        }
        Command::Stats { flows, format, out } => {
            run.inputs.insert("flows".into(), flows.clone());
            run.outputs.extend(out.clone());
            guard_outputs(&run)?;
            let report = evalhub::corpus_stats(&read_flows(flows)?)?;
            let text = match format {
                Format::Json => pretty(&report)?,
                Format::Csv => report.to_csv(),
            };
            emit(&text, out.as_deref())?;
        }
        Command::Eval { task, pred, gold, format, out, jobs: _ } => {
            run.inputs.insert("pred".into(), pred.clone());
            run.inputs.insert("gold".into(), gold.clone());
            run.outputs.extend(out.clone());
            guard_outputs(&run)?;
            emit(&eval_report((*task).into(), pred, gold, *format)?, out.as_deref())?;
        }
        Command::Replay { .. } => bail!(UsageError("replay cannot be nested".into())),
    }
    Ok(run)
}

fn run_recorded(command: &Command, args: Vec<String>) -> Result<()> {
    let started_at = unix_now();
    let run = execute(command)?;
    let Some(primary) = run.outputs.first() else { return Ok(()) };
    let manifest_at = match command {
        Command::Split { out_dir, .. } => out_dir.join("split.manifest.json"),
        _ => manifest_path(primary),
    };
    RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        subcommand: command.name().to_string(),
        args,
        working_dir: std::env::current_dir()?,
        inputs: run.inputs,
        outputs: run.outputs,
        seed: run.seed,
        config: run.config,
        started_at,
        finished_at: unix_now(),
    }
    .write(&manifest_at)
}

fn replay(path: &Path, jobs: Option<usize>) -> Result<()> {
    let recorded = RunManifest::load(path)?;
    if recorded.tool_version != env!("CARGO_PKG_VERSION") {
        eprintln!("warning: manifest was written by version {}", recorded.tool_version);
    }
    let parse = |args: &[String]| {
        Cli::try_parse_from(std::iter::once("prefdial".to_string()).chain(args.iter().cloned()))
            .map_err(|e| UsageError(format!("manifest arguments do not parse: {e}")))
    };
    let mut args = recorded.args.clone();
    let mut cli = parse(&args)?;
    match (&cli.command, jobs) {
        (Command::Replay { .. }, _) => bail!(UsageError("replay cannot be nested".into())),
        (Command::Simulate { .. } | Command::Realize { .. } | Command::Eval { .. }, Some(j)) => {
            args = with_jobs(&args, j);
            cli = parse(&args)?;
        }
        _ => {}
    }
    std::env::set_current_dir(&recorded.working_dir)
        .with_context(|| format!("entering {}", recorded.working_dir.display()))?;
    run_recorded(&cli.command, args)
}

/// The error chain, skipping causes whose text the outer message already shows.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match &cli.command {
        Command::Replay { manifest, jobs } => replay(manifest, *jobs),
        command => run_recorded(command, std::env::args().skip(1).collect()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(1)
        }
    }
}
