//! Command-line pipeline: generate → split → train or ingest → audit → report.
//!
//! Exit codes: 0 success, 1 data error, 2 configuration error.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{error, info, warn};
use thiserror::Error;

use crate::dataset::{
    self, generate_pairs, split, split_stratified, stats, write_sigmorphon, write_split, InflectionPair, Lexicon,
    LexiconIndex, TypeCounts,
};
use crate::taxonomy::{
    cross_run_consistency, evaluate, render_error_table, render_verb_class_table, AuditReport, ConsistencyReport,
};
use crate::transducer::{self, ingest_predictions, learn_rules, predict_split, DEFAULT_MAX_SUFFIX_LEN};

pub const DATASET_STEM: &str = "past";
pub const DEFAULT_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Data(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "katsuyou", version, about = "Hiragana past-tense inflection workbench")]
pub struct Cli {
    /// Log progress to standard error.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the gold SIGMORPHON dataset and class statistics.
    Generate(CommonArgs),
    /// Split, train the suffix-rule baseline and audit it for every seed.
    Run(CommonArgs),
    /// Audit external prediction files against a split.
    Audit(CommonArgs),
    /// Re-render tables from saved audit reports.
    Report(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Key-value config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lexicon TSV (defaults to the bundled replication lexicon).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long)]
    pub max_suffix_len: Option<usize>,
    /// Keep verb-type proportions in every split.
    #[arg(long)]
    pub stratify: bool,
    /// Comma-separated prediction files (`lemma TAB predicted`).
    #[arg(long, value_delimiter = ',')]
    pub predictions: Option<Vec<PathBuf>>,
    /// SIGMORPHON file the predictions were made for.
    #[arg(long)]
    pub split: Option<PathBuf>,
    /// Comma-separated audit report JSON files.
    #[arg(long, value_delimiter = ',')]
    pub reports: Option<Vec<PathBuf>>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lexicon: Option<PathBuf>,
    pub out: PathBuf,
    pub seeds: Vec<u64>,
    pub max_suffix_len: usize,
    pub stratify: bool,
    pub predictions: Vec<PathBuf>,
    pub split: Option<PathBuf>,
    pub reports: Vec<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lexicon: None,
            out: PathBuf::from("out"),
            seeds: DEFAULT_SEEDS.to_vec(),
            max_suffix_len: DEFAULT_MAX_SUFFIX_LEN,
            stratify: false,
            predictions: Vec::new(),
            split: None,
            reports: Vec::new(),
            format: Format::Table,
        }
    }
}

fn parse_list<T>(value: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("expected true or false, got {other:?}")),
    }
}

impl RunConfig {
    /// Applies `key = value` lines. Relative paths resolve against `base`.
    pub fn apply_config_text(&mut self, text: &str, base: &Path) -> Result<(), CliError> {
        let path = |v: &str| base.join(v);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| CliError::Config(format!("config line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "lexicon" => self.lexicon = Some(path(value)),
                "out" => self.out = path(value),
                "seeds" => {
                    self.seeds = parse_list(value, |s| s.parse().map_err(|e| format!("seed {s:?}: {e}"))).map_err(bad)?
                }
                "max_suffix_len" => self.max_suffix_len = value.parse().map_err(|e| bad(format!("{e}")))?,
                "stratify" => self.stratify = parse_bool(value).map_err(bad)?,
                "predictions" => self.predictions = parse_list(value, |s| Ok(path(s))).map_err(bad)?,
                "split" => self.split = Some(path(value)),
                "reports" => self.reports = parse_list(value, |s| Ok(path(s))).map_err(bad)?,
                "format" => {
                    self.format = Format::from_str(value, true).map_err(|_| bad(format!("unknown format {value:?}")))?
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        Ok(())
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let mut config = RunConfig::default();
        if let Some(path) = &args.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(Path::new("."));
            config.apply_config_text(&text, base)?;
        }
        if let Some(v) = &args.lexicon {
            config.lexicon = Some(v.clone());
        }
        if let Some(v) = &args.out {
            config.out = v.clone();
        }
        if let Some(v) = &args.seeds {
            config.seeds = v.clone();
        }
        if let Some(v) = args.max_suffix_len {
            config.max_suffix_len = v;
        }
        if args.stratify {
            config.stratify = true;
        }
        if let Some(v) = &args.predictions {
            config.predictions = v.clone();
        }
        if let Some(v) = &args.split {
            config.split = Some(v.clone());
        }
        if let Some(v) = &args.reports {
            config.reports = v.clone();
        }
        if let Some(v) = args.format {
            config.format = v;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.seeds.is_empty() {
            return Err(CliError::Config("at least one seed is required".into()));
        }
        let distinct: BTreeSet<_> = self.seeds.iter().collect();
        if distinct.len() != self.seeds.len() {
            return Err(CliError::Config("seeds must be distinct".into()));
        }
        if self.max_suffix_len == 0 {
            return Err(CliError::Config("max_suffix_len must be at least 1".into()));
        }
        let inputs = self
            .lexicon
            .iter()
            .chain(&self.split)
            .chain(&self.predictions)
            .chain(&self.reports);
        for path in inputs {
            if !path.is_file() {
                return Err(CliError::Config(format!("{}: no such file", path.display())));
            }
        }
        Ok(())
    }

    pub fn load_lexicon(&self) -> Result<Lexicon, CliError> {
        match &self.lexicon {
            Some(path) => dataset::ingest_lexicon(path).map_err(|e| data_err(format!("{}: {e}", path.display()))),
            None => Ok(Lexicon::replication()),
        }
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| data_err(format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| data_err(format!("{}: {e}", path.display())))
}

/// Lexicon plus its gold pairs; fails on any non-exclusion issue.
fn checked_lexicon(config: &RunConfig) -> Result<(Lexicon, Vec<InflectionPair>), CliError> {
    let lexicon = config.load_lexicon()?;
    for issue in &lexicon.issues {
        if issue.is_error() {
            error!("{issue}");
        } else {
            info!("{issue}");
        }
    }
    let errors: Vec<String> = lexicon.errors().map(ToString::to_string).collect();
    if !errors.is_empty() {
        return Err(CliError::Data(format!("lexicon has {} issue(s):\n{}", errors.len(), errors.join("\n"))));
    }
    let pairs = generate_pairs(&lexicon.entries).map_err(data_err)?;
    if pairs.is_empty() {
        return Err(CliError::Data("lexicon yields no verbs".into()));
    }
    Ok((lexicon, pairs))
}

pub struct GenerateOutput {
    pub counts: TypeCounts,
    pub dataset: PathBuf,
}

pub fn cmd_generate(config: &RunConfig) -> Result<GenerateOutput, CliError> {
    let (lexicon, pairs) = checked_lexicon(config)?;
    let counts = stats(&lexicon.entries);
    create_dir(&config.out)?;
    let dataset = config.out.join(format!("{DATASET_STEM}.tsv"));
    write_sigmorphon(&pairs, &dataset).map_err(data_err)?;
    write_file(&config.out.join("stats.json"), &crate::canonical_json(&counts))?;
    info!("wrote {} pairs to {}", pairs.len(), dataset.display());
    Ok(GenerateOutput { counts, dataset })
}

pub struct RunOutput {
    pub reports: Vec<AuditReport>,
    pub consistency: Option<ConsistencyReport>,
    pub counts: TypeCounts,
    pub failed_seeds: Vec<u64>,
}

fn run_seed(
    config: &RunConfig,
    seed: u64,
    pairs: &[InflectionPair],
    index: &LexiconIndex,
) -> Result<AuditReport, CliError> {
    let set = if config.stratify {
        split_stratified(pairs, seed, index)
    } else {
        split(pairs, seed)
    }
    .map_err(data_err)?;
    let dir = config.out.join(format!("seed-{seed}"));
    create_dir(&dir)?;
    write_split(&set, &dir, DATASET_STEM).map_err(data_err)?;
    let rules = learn_rules(&set.train, config.max_suffix_len).map_err(data_err)?;
    write_file(&dir.join("rules.tsv"), &rules.to_text())?;
    let run_id = format!("suffix-rules/seed-{seed}");
    let predictions = predict_split(&rules, &set.test, &run_id);
    transducer::write_predictions(&predictions, dir.join("predictions.tsv")).map_err(data_err)?;
    let report = evaluate(&run_id, &set.test, &predictions, index).map_err(data_err)?;
    write_file(&dir.join("report.json"), &report.to_canonical_json())?;
    info!("seed {seed}: accuracy {:.4}, {} errors", report.accuracy, report.errors());
    Ok(report)
}

pub fn cmd_run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let (lexicon, pairs) = checked_lexicon(config)?;
    let index = lexicon.index();
    create_dir(&config.out)?;
    let mut reports = Vec::with_capacity(config.seeds.len());
    let mut failed_seeds = Vec::new();
    for &seed in &config.seeds {
        match run_seed(config, seed, &pairs, &index) {
            Ok(report) => reports.push(report),
            Err(e) => {
                error!("seed {seed} aborted: {e}");
                failed_seeds.push(seed);
            }
        }
    }
    let consistency = consistency_if_possible(&reports, &config.out)?;
    Ok(RunOutput {
        reports,
        consistency,
        counts: stats(&lexicon.entries),
        failed_seeds,
    })
}

fn consistency_if_possible(reports: &[AuditReport], out: &Path) -> Result<Option<ConsistencyReport>, CliError> {
    if reports.len() < 2 {
        return Ok(None);
    }
    let consistency = cross_run_consistency(reports).map_err(data_err)?;
    write_file(&out.join("consistency.json"), &consistency.to_canonical_json())?;
    Ok(Some(consistency))
}

pub struct AuditOutput {
    pub reports: Vec<AuditReport>,
    pub consistency: Option<ConsistencyReport>,
    pub counts: TypeCounts,
}

pub fn cmd_audit(config: &RunConfig) -> Result<AuditOutput, CliError> {
    let split_path = config
        .split
        .as_ref()
        .ok_or_else(|| CliError::Config("audit needs --split".into()))?;
    if config.predictions.is_empty() {
        return Err(CliError::Config("audit needs --predictions".into()));
    }
    let lexicon = config.load_lexicon()?;
    let index = lexicon.index();
    let split = dataset::read_sigmorphon(split_path).map_err(|e| data_err(format!("{}: {e}", split_path.display())))?;
    let dir = config.out.join("audit");
    create_dir(&dir)?;
    let mut reports = Vec::new();
    for path in &config.predictions {
        let shown = path.display();
        let set = ingest_predictions(path, &split).map_err(|e| data_err(format!("{shown}: {e}")))?;
        if let Some(lemma) = set.missing.first() {
            return Err(CliError::Data(format!(
                "{shown}: no prediction for {lemma} ({} missing)",
                set.missing.len()
            )));
        }
        let run_id = set.predictions.first().map(|p| p.source.clone()).unwrap_or_default();
        let report = evaluate(&run_id, &split, &set.predictions, &index).map_err(|e| data_err(format!("{shown}: {e}")))?;
        write_file(&dir.join(format!("{run_id}.json")), &report.to_canonical_json())?;
        reports.push(report);
    }
    let consistency = consistency_if_possible(&reports, &dir)?;
    Ok(AuditOutput {
        reports,
        consistency,
        counts: stats(&lexicon.entries),
    })
}

pub fn cmd_report(config: &RunConfig) -> Result<AuditOutput, CliError> {
    if config.reports.is_empty() {
        return Err(CliError::Config("report needs --reports".into()));
    }
    let mut reports = Vec::new();
    for path in &config.reports {
        let text = fs::read_to_string(path).map_err(|e| data_err(format!("{}: {e}", path.display())))?;
        let report: AuditReport =
            serde_json::from_str(&text).map_err(|e| data_err(format!("{}: {e}", path.display())))?;
        reports.push(report);
    }
    let consistency = if reports.len() >= 2 {
        Some(cross_run_consistency(&reports).map_err(data_err)?)
    } else {
        None
    };
    let lexicon = config.load_lexicon()?;
    Ok(AuditOutput {
        reports,
        consistency,
        counts: stats(&lexicon.entries),
    })
}

fn render_reports(reports: &[AuditReport], consistency: Option<&ConsistencyReport>, counts: &TypeCounts) -> String {
    let refs: Vec<&AuditReport> = reports.iter().collect();
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("{}: accuracy {:.4} ({}/{})\n", r.run_id, r.accuracy, r.correct, r.total));
    }
    out.push('\n');
    out.push_str(&render_error_table(&refs));
    out.push('\n');
    out.push_str(&render_verb_class_table(&refs, counts));
    if let Some(c) = consistency {
        out.push('\n');
        out.push_str(&c.render());
    }
    out
}

fn reports_json(reports: &[AuditReport], consistency: Option<&ConsistencyReport>) -> String {
    #[derive(serde::Serialize)]
    struct Summary<'a> {
        reports: Vec<serde_json::Value>,
        consistency: Option<&'a ConsistencyReport>,
    }
    // Items are in the per-run files; stdout carries the summary.
    let reports = reports
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r).expect("report serializes");
            if let Some(obj) = v.as_object_mut() {
                obj.remove("items");
            }
            v
        })
        .collect();
    crate::canonical_json(&Summary { reports, consistency })
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Generate(args) => {
            let config = RunConfig::resolve(args)?;
            let out = cmd_generate(&config)?;
            Ok(match config.format {
                Format::Table => out.counts.render_table(),
                Format::Json => crate::canonical_json(&out.counts),
            })
        }
        Command::Run(args) => {
            let config = RunConfig::resolve(args)?;
            let out = cmd_run(&config)?;
            let text = match config.format {
                Format::Table => render_reports(&out.reports, out.consistency.as_ref(), &out.counts),
                Format::Json => reports_json(&out.reports, out.consistency.as_ref()),
            };
            if !out.failed_seeds.is_empty() {
                print!("{text}");
                return Err(CliError::Data(format!("seeds failed: {:?}", out.failed_seeds)));
            }
            Ok(text)
        }
        Command::Audit(args) | Command::Report(args) => {
            let config = RunConfig::resolve(args)?;
            let out = if matches!(cli.command, Command::Audit(_)) {
                cmd_audit(&config)?
            } else {
                cmd_report(&config)?
            };
            Ok(match config.format {
                Format::Table => render_reports(&out.reports, out.consistency.as_ref(), &out.counts),
                Format::Json => reports_json(&out.reports, out.consistency.as_ref()),
            })
        }
    }
}

fn init_logging(verbose: bool) {
    let level = if verbose {
        log::LevelFilter::Info
    } else {
        log::LevelFilter::Warn
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    init_logging(cli.verbose);
    match dispatch(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            warn!("{e}");
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
