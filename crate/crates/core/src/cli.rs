//! Command-line front end: build a snapshot once, then run analyses on it.
//!
//! Exit codes: 0 success, 1 usage, 2 parse or validation failure, 3 I/O,
//! 4 snapshot load failure.

use crate::analytics::{self, ccdf, degree_multiset, DegreeSide};
use crate::chains;
use crate::entities::{self, build_entity_net, compute_entities};
use crate::ingest::{self, Block, ConversionReport, GeneratorConfig, IngestMode, IngestReport};
use crate::net::{PlaceTransitionNet, SnapshotError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};
use thiserror::Error;

/// Environment variable capping the worker threads used for file parsing.
pub const THREADS_ENV: &str = "CHAINPETRI_THREADS";

#[derive(Debug, Parser)]
#[command(name = "chainpetri", version, about = "Blockchain ledgers as place/transition nets")]
pub struct Cli {
    /// Omit the `generated_at` field from JSON reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse block files, ingest them and write a snapshot.
    Build(BuildArgs),
    /// Cluster addresses into entities.
    Entities(SnapshotOut),
    /// Reconstruct disposable-address chains.
    Chains(SnapshotOut),
    /// Summary counts and degree CCDFs.
    Stats(StatsArgs),
    /// Most active addresses.
    Top(TopArgs),
    /// Groups of transactions with identical inputs and outputs.
    Repeats(RepeatsArgs),
    /// Generate a seeded synthetic ledger: `<out>/blocks/` plus
    /// `<out>/ground_truth.json`.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Canonical,
    Rawblock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Lax,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Address,
    Entity,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Block files or directories of `.json`, `.ndjson` and `.jsonl` files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = InputFormat::Canonical)]
    pub format: InputFormat,
    #[arg(long, value_enum, default_value_t = Mode::Lax)]
    pub mode: Mode,
    /// Snapshot path; the ingest report goes next to it as `<out>.report.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SnapshotOut {
    pub snapshot: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub snapshot: PathBuf,
    #[arg(long, value_enum, default_value_t = Level::Address)]
    pub level: Level,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TopArgs {
    pub snapshot: PathBuf,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RepeatsArgs {
    pub snapshot: PathBuf,
    #[arg(long, value_enum, default_value_t = Level::Address)]
    pub level: Level,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["config", "scale"]))]
pub struct SynthArgs {
    /// Generator configuration (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Use the built-in mixture sized to about this many transactions.
    #[arg(long)]
    pub scale: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Snapshot {
        path: PathBuf,
        #[source]
        source: SnapshotError,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Snapshot { .. } => 4,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to `stderr`.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let stamp = !cli.no_timestamp;
    match &cli.command {
        Command::Build(a) => cmd_build(a, stamp),
        Command::Entities(a) => cmd_entities(a, stamp),
        Command::Chains(a) => cmd_chains(a, stamp),
        Command::Stats(a) => cmd_stats(a, stamp),
        Command::Top(a) => cmd_top(a, stdout),
        Command::Repeats(a) => cmd_repeats(a, stdout),
        Command::Synth(a) => cmd_synth(a),
    }
}

fn stamped(mut value: Value, stamp: bool) -> Value {
    if stamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        value["generated_at"] = json!(secs);
    }
    value
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(io_err(path))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn write_ccdf(path: &Path, values: &[u64]) -> Result<(), CliError> {
    let csv = match ccdf(values) {
        Ok(series) => series.to_csv(),
        Err(_) => "x,ccdf\n".to_owned(),
    };
    write_file(path, csv.as_bytes())
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn load(path: &Path) -> Result<PlaceTransitionNet, CliError> {
    PlaceTransitionNet::load_snapshot_file(path).map_err(|source| CliError::Snapshot {
        path: path.to_owned(),
        source,
    })
}

fn at_level(net: PlaceTransitionNet, level: Level) -> Result<PlaceTransitionNet, CliError> {
    match level {
        Level::Address => Ok(net),
        Level::Entity => {
            let partition = compute_entities(&net).map_err(|e| CliError::Invalid(e.to_string()))?;
            Ok(build_entity_net(&net, &partition)
                .map_err(|e| CliError::Invalid(e.to_string()))?
                .net)
        }
    }
}

/// Expands directories into their block files, sorted by name.
pub fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for input in inputs {
        let meta = fs::metadata(input).map_err(io_err(input))?;
        if meta.is_dir() {
            let mut found = Vec::new();
            for entry in fs::read_dir(input).map_err(io_err(input))? {
                let path = entry.map_err(io_err(input))?.path();
                let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
                if path.is_file() && matches!(ext, "json" | "ndjson" | "jsonl") {
                    found.push(path);
                }
            }
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

type FileResult = Result<(Vec<Block>, ConversionReport), String>;

/// Reads and parses every file; blocks come back sorted by height.
pub fn read_blocks(files: &[PathBuf], format: InputFormat) -> Result<(Vec<Block>, Option<ConversionReport>), CliError> {
    let parsed: Vec<(PathBuf, Result<FileResult, io::Error>)> = thread_pool().install(|| {
        files
            .par_iter()
            .map(|path| {
                let result = fs::read_to_string(path).map(|text| match format {
                    InputFormat::Canonical => ingest::parse_block_stream(&text)
                        .map(|b| (b, ConversionReport::default()))
                        .map_err(|e| e.to_string()),
                    InputFormat::Rawblock => ingest::convert_rawblock_stream(&text).map_err(|e| e.to_string()),
                });
                (path.clone(), result)
            })
            .collect()
    });

    let mut blocks = Vec::new();
    let mut report = ConversionReport::default();
    let mut failures = Vec::new();
    for (path, result) in parsed {
        match result {
            Err(source) => return Err(CliError::Io { path, source }),
            Ok(Err(message)) => failures.push(format!("{}: {message}", path.display())),
            Ok(Ok((b, r))) => {
                blocks.extend(b);
                report.merge(&r);
            }
        }
    }
    if !failures.is_empty() {
        return Err(CliError::Invalid(failures.join("\n")));
    }
    blocks.sort_by_key(|b| b.height);
    let conversion = (format == InputFormat::Rawblock).then_some(report);
    Ok((blocks, conversion))
}

#[derive(Serialize)]
struct BuildReport<'a> {
    ingest: &'a IngestReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    conversion: Option<&'a ConversionReport>,
    summary: analytics::SummaryReport,
}

fn report_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".report.json");
    out.with_file_name(name)
}

fn cmd_build(a: &BuildArgs, stamp: bool) -> Result<(), CliError> {
    let files = collect_inputs(&a.inputs)?;
    let (blocks, conversion) = read_blocks(&files, a.format)?;
    if blocks.is_empty() {
        return Err(CliError::Invalid("no input blocks".to_owned()));
    }
    let mode = match a.mode {
        Mode::Lax => IngestMode::Lax,
        Mode::Strict => IngestMode::Strict,
    };
    let (net, report) = ingest::ingest(&blocks, mode).map_err(|e| CliError::Invalid(e.to_string()))?;
    drop(blocks);
    net.save_snapshot_file(&a.out).map_err(|source| match source {
        SnapshotError::Io(e) => CliError::Io {
            path: a.out.clone(),
            source: e,
        },
        other => CliError::Invalid(other.to_string()),
    })?;
    let body = BuildReport {
        ingest: &report,
        conversion: conversion.as_ref(),
        summary: analytics::summary(&net).expect("ingested nets are sealed"),
    };
    let value = stamped(serde_json::to_value(&body).expect("report serializes"), stamp);
    write_json(&report_path(&a.out), &value)
}

fn cmd_entities(a: &SnapshotOut, stamp: bool) -> Result<(), CliError> {
    let net = load(&a.snapshot)?;
    let partition = compute_entities(&net).map_err(|e| CliError::Invalid(e.to_string()))?;
    create_dir(&a.out)?;
    let rows = entities::entity_report(&net, &partition);
    let value = stamped(
        json!({
            "places": net.num_places(),
            "entities": partition.len(),
            "report": rows,
        }),
        stamp,
    );
    write_json(&a.out.join("entities.json"), &value)?;
    write_ccdf(&a.out.join("entity_size_ccdf.csv"), &partition.sizes())
}

fn cmd_chains(a: &SnapshotOut, stamp: bool) -> Result<(), CliError> {
    let net = load(&a.snapshot)?;
    let (sets, found) = chains::find_chains(&net).map_err(|e| CliError::Invalid(e.to_string()))?;
    create_dir(&a.out)?;
    write_json(&a.out.join("chains.json"), &chains::chain_report(&net, &found))?;
    write_ccdf(&a.out.join("chain_length_ccdf.csv"), &found.lengths())?;
    let tx = |t: crate::TransitionId| net.transaction_ids()[t.index()].clone();
    let bypassed: Vec<Value> = found
        .bypassed
        .iter()
        .map(|b| json!({"from": tx(b.from), "chosen": tx(b.chosen), "bypassed": tx(b.bypassed)}))
        .collect();
    let value = stamped(
        json!({
            "disposable_addresses": sets.addresses.len(),
            "disposable_transactions": sets.transactions.len(),
            "chain_starts": sets.starts.len(),
            "chains": found.chains.len(),
            "chains_with_two_or_more_links": found.multi_link_count(),
            "bypassed_successors": bypassed,
        }),
        stamp,
    );
    write_json(&a.out.join("chains_summary.json"), &value)
}

fn cmd_stats(a: &StatsArgs, stamp: bool) -> Result<(), CliError> {
    let net = at_level(load(&a.snapshot)?, a.level)?;
    create_dir(&a.out)?;
    let summary = analytics::summary(&net).expect("loaded nets are sealed");
    let repeats = analytics::repeated_groups(&net).expect("loaded nets are sealed");
    let value = stamped(
        json!({
            "level": a.level,
            "summary": summary,
            "repeat_groups": repeats.group_count(),
            "repetition_count": repeats.repetition_count,
            "repetition_fraction": repeats.fraction,
        }),
        stamp,
    );
    write_json(&a.out.join("summary.json"), &value)?;
    for (side, name) in [
        (DegreeSide::Pre, "pre"),
        (DegreeSide::Post, "post"),
        (DegreeSide::Both, "both"),
    ] {
        let degrees = degree_multiset(&net, side).expect("loaded nets are sealed");
        write_ccdf(&a.out.join(format!("{name}_degree_ccdf.csv")), &degrees.counts)?;
    }
    let sizes: Vec<u64> = repeats.groups.iter().map(|g| g.len() as u64).collect();
    write_ccdf(&a.out.join("repeat_group_size_ccdf.csv"), &sizes)
}

fn cmd_top(a: &TopArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let net = load(&a.snapshot)?;
    let k = usize::try_from(a.k).unwrap_or(usize::MAX);
    let rows = analytics::top_k_active(&net, k).map_err(|e| CliError::Usage(e.to_string()))?;
    let rendered: Vec<Value> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "rank": i + 1,
                "address": net.addresses()[r.place.index()],
                "pre_nnz": r.pre_nnz,
                "post_nnz": r.post_nnz,
            })
        })
        .collect();
    let out = if a.json {
        serde_json::to_string_pretty(&rendered).expect("rows serialize") + "\n"
    } else {
        let mut text = String::from("rank\taddress\tpre\tpost\ttotal\n");
        for (i, r) in rows.iter().enumerate() {
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                i + 1,
                net.addresses()[r.place.index()],
                r.pre_nnz,
                r.post_nnz,
                r.pre_nnz + r.post_nnz
            ));
        }
        text
    };
    stdout.write_all(out.as_bytes()).map_err(io_err(Path::new("<stdout>")))
}

fn cmd_repeats(a: &RepeatsArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let net = at_level(load(&a.snapshot)?, a.level)?;
    let r = analytics::repeated_groups(&net).expect("loaded nets are sealed");
    let groups: Vec<Vec<&str>> = r
        .groups
        .iter()
        .map(|g| g.iter().map(|t| net.transaction_ids()[t.index()].as_str()).collect())
        .collect();
    let value = json!({
        "level": a.level,
        "groups": groups,
        "group_count": r.group_count(),
        "repetition_count": r.repetition_count,
        "num_transitions": r.num_transitions,
        "fraction": r.fraction,
    });
    let text = serde_json::to_string_pretty(&value).expect("report serializes") + "\n";
    stdout.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))
}

fn cmd_synth(a: &SynthArgs) -> Result<(), CliError> {
    let config = match (&a.config, a.scale) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            serde_json::from_str::<GeneratorConfig>(&text)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?
        }
        (None, Some(n)) => GeneratorConfig::scaled(n, a.seed),
        (None, None) => return Err(CliError::Usage("one of --config or --scale is required".to_owned())),
    };
    let (blocks, truth) = ingest::generate_synthetic(&config, a.seed).map_err(|e| CliError::Invalid(e.to_string()))?;
    let block_dir = a.out.join("blocks");
    create_dir(&block_dir)?;
    for block in &blocks {
        let path = block_dir.join(format!("block_{}.json", block.height));
        write_file(&path, (block.to_json() + "\n").as_bytes())?;
    }
    write_json(&a.out.join("ground_truth.json"), &truth)
}
