//! The `qkdlab` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::adversary::GuessPolicy;
use crate::analytics::{reference_constants, security_curve, security_threshold, ReferenceRow, Threshold};
use crate::bell::{decomposition_table, swap_decompose, BellLabel, Pairing, TableEntry};
use crate::error::{Error, Result};
use crate::harness::{
    load, protocol2_transcripts, run_campaign_with, run_sweep, write_sweep_csv, write_transcripts, AttackReport,
    CampaignConfig, Execution, ProtocolKind, SweepGrid,
};
use crate::report::render_markdown;
use crate::verify::{default_table, verify_with};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_MD: &str = "report.md";
pub const TRANSCRIPT_JSONL: &str = "transcript.jsonl";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const CURVE_CSV: &str = "curve.csv";
pub const THRESHOLD_JSON: &str = "threshold.json";

#[derive(Debug, Parser)]
#[command(name = "qkdlab", version, about = "Bell-state QKD: swap algebra, attacks and Monte Carlo campaigns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print how a Bell-pair product regroups between layouts.
    Decompose(DecomposeArgs),
    /// Check the regrouping table against the state-vector oracle.
    Verify(VerifyArgs),
    /// Run one seeded attack campaign.
    Simulate(SimulateArgs),
    /// Run a campaign per grid point and write a CSV.
    Sweep(SweepArgs),
    /// Security curve, threshold and reference error rates.
    Analyze(AnalyzeArgs),
    /// Render a markdown report from a finished campaign.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    pub first: Option<BellLabel>,
    #[arg(long, required_unless_present = "all")]
    pub second: Option<BellLabel>,
    #[arg(long, default_value = "seq")]
    pub from: Pairing,
    #[arg(long, default_value = "crossed")]
    pub to: Pairing,
    /// All 16 label pairs regrouped from sequential to crossed.
    #[arg(long)]
    pub all: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check this table (JSON list of entries) instead of the built-in one.
    #[arg(long, hide = true)]
    pub table: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Draw a seed from the OS instead of requiring `--seed`.
    #[arg(long, conflicts_with = "seed")]
    pub entropy: bool,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    /// TOML or JSON campaign file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// TOML or JSON attack file `{f, seed, policy}`.
    #[arg(long)]
    pub attack: Option<PathBuf>,
    #[arg(long)]
    pub protocol: Option<ProtocolKind>,
    /// Blocks (BB84: pairs, POP: sequences).
    #[arg(long = "n")]
    pub n_blocks: Option<u64>,
    #[arg(long)]
    pub f: Option<f64>,
    #[arg(long)]
    pub compare_fraction: Option<f64>,
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
    /// Sequence length for POP.
    #[arg(long)]
    pub n_qubits: Option<usize>,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Run blocks on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Uniform,
    Seq,
    Crossed,
}

impl From<PolicyArg> for GuessPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Uniform => GuessPolicy::Uniform,
            PolicyArg::Seq => GuessPolicy::Seq,
            PolicyArg::Crossed => GuessPolicy::Crossed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub campaign: CampaignArgs,
    /// Also write per-block JSON lines (P2 only).
    #[arg(long)]
    pub transcript: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub campaign: CampaignArgs,
    /// Comma-separated attack fractions.
    #[arg(long, value_delimiter = ',', conflicts_with = "n_grid")]
    pub f_grid: Option<Vec<f64>>,
    /// Comma-separated sequence lengths (POP).
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Where the curve goes: `csv` to stdout, `json` for threshold and constants.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttackFile {
    f: f64,
    seed: Option<u64>,
    #[serde(default)]
    policy: GuessPolicy,
}

#[derive(Debug, Serialize)]
struct AnalyzeSummary {
    threshold: Threshold,
    eve_ignorance_bits: f64,
    reference: Vec<ReferenceRow>,
}

enum Outcome {
    Ok,
    VerifyFailed,
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::VerifyFailed) => EXIT_VERIFY_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Decompose(a) => decompose(a),
        Command::Verify(a) => verify(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Analyze(a) => analyze(a),
        Command::Report(a) => report(a),
    }
}

fn decompose(a: DecomposeArgs) -> Result<Outcome> {
    let entries: Vec<TableEntry> = if a.all {
        decomposition_table(Pairing::Seq, Pairing::Crossed)
    } else {
        let (first, second) = (a.first.expect("clap"), a.second.expect("clap"));
        vec![TableEntry { first, second, from: a.from, to: a.to, decomposition: swap_decompose(first, second, a.from, a.to) }]
    };
    let mut out = io::stdout().lock();
    match a.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&entries)?)?,
        _ => {
            for e in &entries {
                let [(a1, a2), (b1, b2)] = e.from.qubit_pairs();
                writeln!(out, "|{}⟩{a1}{a2}|{}⟩{b1}{b2} =", e.first.symbol(), e.second.symbol())?;
                for t in &e.decomposition.terms {
                    let c = t.signed_coefficient();
                    let sign = if c.is_negative() { '-' } else { '+' };
                    writeln!(out, "    {sign}{} {}", c.abs(), crate::bell::PairProduct { sign: crate::bell::Sign::Plus, ..t.product })?;
                }
            }
        }
    }
    Ok(Outcome::Ok)
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    let table: Vec<TableEntry> = match &a.table {
        Some(p) => load(p)?,
        None => default_table(),
    };
    let report = verify_with(&table);
    let mut out = io::stdout().lock();
    match a.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        _ => {
            for c in &report.cases {
                writeln!(out, "{c}")?;
            }
            writeln!(out, "{}/{} cases pass", report.passed(), report.cases.len())?;
        }
    }
    Ok(if report.all_pass() { Outcome::Ok } else { Outcome::VerifyFailed })
}

fn resolve_config(a: &CampaignArgs) -> Result<CampaignConfig> {
    let file: Option<CampaignConfig> = a.config.as_deref().map(load).transpose()?;
    let attack: Option<AttackFile> = a.attack.as_deref().map(load).transpose()?;

    let seed = a
        .seed
        .seed
        .or(file.as_ref().map(|c| c.seed))
        .or(attack.as_ref().and_then(|x| x.seed))
        .or(a.seed.entropy.then(rand::random::<u64>))
        .ok_or_else(|| Error::Config("randomised commands need --seed (or --entropy)".into()))?;

    let mut c = match file {
        Some(c) => c,
        None => CampaignConfig::new(
            a.protocol.unwrap_or(ProtocolKind::P2),
            a.n_blocks.unwrap_or(100_000),
            0.0,
            seed,
        ),
    };
    c.seed = seed;
    if let Some(x) = attack {
        c.f = x.f;
        c.policy = x.policy;
    }
    if let Some(p) = a.protocol {
        c.protocol = p;
    }
    if let Some(n) = a.n_blocks {
        c.n_blocks = n;
    }
    if let Some(f) = a.f {
        c.f = f;
    }
    if let Some(x) = a.compare_fraction {
        c.compare_fraction = x;
    }
    if let Some(p) = a.policy {
        c.policy = p.into();
    }
    if let Some(n) = a.n_qubits {
        c.n_qubits = n;
    }
    Ok(c)
}

fn execution(a: &CampaignArgs) -> Execution {
    if a.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::File { path: dir.to_path_buf(), source })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::File { path: path.to_path_buf(), source })
}

fn summary_line(r: &AttackReport) -> String {
    let cell = |e: Option<crate::harness::Estimate>| e.map_or("n/a".to_string(), |e| format!("{:.6}", e.value));
    format!(
        "blocks {} attacked {} detection_rate {} eve_accuracy {} qber {} key_agreement {}",
        r.blocks,
        r.attacked_blocks,
        cell(r.detection_rate),
        cell(r.eve_accuracy),
        cell(r.qber),
        r.key_agreement.exact
    )
}

fn simulate(a: SimulateArgs) -> Result<Outcome> {
    let mut config = resolve_config(&a.campaign)?;
    config.sweep = None;
    config.validate()?;
    let report = run_campaign_with(&config, execution(&a.campaign))?;
    let out = &a.campaign.out;
    create_out(out)?;
    write_file(&out.join(REPORT_JSON), report.to_json()?.as_bytes())?;
    if a.transcript {
        if config.protocol != ProtocolKind::P2 {
            return Err(Error::Config("--transcript is only available for P2".into()));
        }
        let mut buf = Vec::new();
        write_transcripts(&protocol2_transcripts(&config)?, &mut buf)?;
        write_file(&out.join(TRANSCRIPT_JSONL), &buf)?;
    }
    println!("{}", summary_line(&report));
    if let Some(cc) = &report.claim_check {
        println!("claimed detection {} vs corrected {}: {}", cc.claimed, cc.corrected, cc.verdict);
    }
    Ok(Outcome::Ok)
}

fn sweep(a: SweepArgs) -> Result<Outcome> {
    let mut config = resolve_config(&a.campaign)?;
    if let Some(fs) = a.f_grid {
        config.sweep = Some(SweepGrid::F(fs));
    }
    if let Some(ns) = a.n_grid {
        config.sweep = Some(SweepGrid::N(ns));
    }
    config.validate()?;
    let results = run_sweep(&config, execution(&a.campaign))?;
    let rows: Vec<_> = results.into_iter().map(|(row, _)| row).collect();
    create_out(&a.campaign.out)?;
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf)?;
    write_file(&a.campaign.out.join(SWEEP_CSV), &buf)?;
    io::stdout().write_all(&buf)?;
    Ok(Outcome::Ok)
}

fn analyze(a: AnalyzeArgs) -> Result<Outcome> {
    let curve = security_curve(a.points)?;
    let summary = AnalyzeSummary {
        threshold: security_threshold()?,
        eve_ignorance_bits: crate::analytics::eve_ignorance_bits(),
        reference: reference_constants()?,
    };
    let mut csv_buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut csv_buf);
        for p in &curve {
            w.serialize(p).map_err(|e| Error::Config(format!("csv: {e}")))?;
        }
        w.flush()?;
    }
    let json = serde_json::to_string_pretty(&summary)? + "\n";
    create_out(&a.out)?;
    write_file(&a.out.join(CURVE_CSV), &csv_buf)?;
    write_file(&a.out.join(THRESHOLD_JSON), json.as_bytes())?;

    let mut out = io::stdout().lock();
    match a.format {
        Format::Csv => out.write_all(&csv_buf)?,
        Format::Json => out.write_all(json.as_bytes())?,
        Format::Text => {
            let t = summary.threshold;
            writeln!(out, "f* = {:.6}  e_max = {:.6} ({:.2}%)", t.f_star, t.e_max, 100.0 * t.e_max)?;
            writeln!(out, "eve ignorance = {:.5} bits", summary.eve_ignorance_bits)?;
            for r in &summary.reference {
                writeln!(out, "{:<26} {:>6.2}%  {}", r.name, 100.0 * r.e_max, r.note)?;
            }
        }
    }
    Ok(Outcome::Ok)
}

fn report(a: ReportArgs) -> Result<Outcome> {
    let path = a.out.join(REPORT_JSON);
    let text = fs::read_to_string(&path).map_err(|source| Error::File { path: path.clone(), source })?;
    let campaign: AttackReport = serde_json::from_str(&text)?;
    let md = render_markdown(&campaign)?;
    write_file(&a.out.join(REPORT_MD), md.as_bytes())?;
    io::stdout().write_all(md.as_bytes())?;
    Ok(Outcome::Ok)
}
