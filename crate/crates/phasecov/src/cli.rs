//! `phasecov` subcommands: `fidelity`, `table`, `verify` and `oracle`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad input, 3 I/O.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phasecov_core::oracle::{self, FeasiblePoint};
use phasecov_core::report::{build_report, constructed_map, OracleSettings};
use phasecov_core::{Criterion, PhaseWeight, System};
use serde::Serialize;

use crate::format::{round_sig15, write_table, ReportJson, TableFormat, TableRow};
use crate::sweep::{parse_range, SweepConfig};
use crate::verify::{run_verify, Fault};
use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "phasecov", version, about = "Optimal phase-covariant cloning of equatorial qubits and qutrits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the fidelity report of one cell as JSON.
    Fidelity(FidelityArgs),
    /// Write a fidelity table for a sweep.
    Table(TableArgs),
    /// Run the verification checks over a sweep.
    Verify(VerifyArgs),
    /// Run the numerical maximizer directly.
    Oracle(OracleArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SystemArg {
    Qubit,
    Qutrit,
}

impl From<SystemArg> for System {
    fn from(s: SystemArg) -> Self {
        match s {
            SystemArg::Qubit => System::Qubit,
            SystemArg::Qutrit => System::Qutrit,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CriterionArg {
    Global,
    #[value(alias = "single-particle")]
    Single,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Global => Criterion::Global,
            CriterionArg::Single => Criterion::SingleParticle,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SweepCriterion {
    Global,
    #[value(alias = "single-particle")]
    Single,
    Both,
}

impl SweepCriterion {
    fn criteria(self) -> Vec<Criterion> {
        match self {
            SweepCriterion::Global => vec![Criterion::Global],
            SweepCriterion::Single => vec![Criterion::SingleParticle],
            SweepCriterion::Both => vec![Criterion::Global, Criterion::SingleParticle],
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FaultArg {
    Offblock,
}

#[derive(Args, Debug, Clone)]
struct SearchArgs {
    /// Restarts per oracle run.
    #[arg(long, default_value_t = oracle::DEFAULT_RESTARTS)]
    restarts: usize,
    /// Oracle seed.
    #[arg(long, env = "PHASECOV_SEED", default_value_t = 0)]
    seed: u64,
}

impl SearchArgs {
    fn settings(&self) -> OracleSettings {
        OracleSettings { restarts: self.restarts, seed: self.seed }
    }
}

#[derive(Args, Debug)]
struct FidelityArgs {
    #[arg(long, value_enum, default_value_t = SystemArg::Qubit)]
    system: SystemArg,
    #[arg(long, value_enum)]
    criterion: CriterionArg,
    /// Input copies (always 1 for qutrits).
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Output copies.
    #[arg(long)]
    m: usize,
    /// Also run the oracle and include its value.
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SystemArg::Qubit)]
    system: SystemArg,
    #[arg(long, value_enum, default_value_t = SweepCriterion::Both)]
    criterion: SweepCriterion,
    /// Input copies, `a` or `a..b` (inclusive).
    #[arg(long, default_value = "1")]
    n: String,
    /// Output copies, `a` or `a..b` (inclusive); cells with M < N are skipped.
    #[arg(long)]
    m: String,
    /// Run the oracle on every cell.
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    search: SearchArgs,
}

impl SweepArgs {
    fn config(&self) -> Result<SweepConfig, CliError> {
        let config = SweepConfig {
            system: self.system.into(),
            criteria: self.criterion.criteria(),
            n_range: parse_range(&self.n)?,
            m_range: parse_range(&self.m)?,
            oracle: self.oracle.then(|| self.search.settings()),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Corrupt every map before checking it.
    #[arg(long, value_enum)]
    inject_fault: Option<FaultArg>,
    /// JSON file receiving the per-check detail.
    #[arg(long, default_value = "phasecov-verify.json")]
    detail: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, value_enum, default_value_t = SystemArg::Qubit)]
    system: SystemArg,
    #[arg(long, value_enum)]
    criterion: CriterionArg,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[command(flatten)]
    search: SearchArgs,
    /// Also scan the ansatz on an angle grid with this many steps.
    #[arg(long)]
    grid: Option<usize>,
}

/// Parses `args` (program name first), runs the command and maps the
/// outcome to an exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("phasecov: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Fidelity(a) => fidelity(a),
        Command::Table(a) => table(a),
        Command::Verify(a) => verify(a),
        Command::Oracle(a) => run_oracle(a),
    }
}

fn print_json(value: &impl Serialize) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::io("<stdout>", e.into()))?;
    writeln!(out).map_err(|e| CliError::io("<stdout>", e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn fidelity(a: FidelityArgs) -> Result<(), CliError> {
    let report = build_report(a.system.into(), a.criterion.into(), a.n, a.m, a.oracle.then(|| a.search.settings()))?;
    print_json(&ReportJson::from(&report))
}

fn table(a: TableArgs) -> Result<(), CliError> {
    let reports = a.sweep.config()?.run()?;
    let rows: Vec<TableRow> = reports.iter().map(TableRow::new).collect();
    let format = match a.format {
        FormatArg::Csv => TableFormat::Csv,
        FormatArg::Json => TableFormat::Json,
    };
    match &a.output {
        Some(path) => {
            let mut w = create(path)?;
            write_table(&rows, format, &mut w).map_err(|e| CliError::io(path, e))?;
            w.flush().map_err(|e| CliError::io(path, e))
        }
        None => write_table(&rows, format, io::stdout().lock()).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let config = a.sweep.config()?;
    let fault = a.inject_fault.map(|FaultArg::Offblock| Fault::OffBlock);
    let report = run_verify(&config, fault)?;
    let mut w = create(&a.detail)?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| CliError::io(&a.detail, e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(&a.detail, e))?;
    print!("{}", report.summary());
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(report.failures))
    }
}

#[derive(Serialize)]
struct BlockJson {
    weight: Vec<usize>,
    coeffs: Vec<f64>,
}

#[derive(Serialize)]
struct GridJson {
    steps: usize,
    best_value: f64,
    gap_vs_constructed: f64,
}

#[derive(Serialize)]
struct OracleJson {
    system: &'static str,
    criterion: &'static str,
    n_in: usize,
    n_out: usize,
    best_value: f64,
    constructed: f64,
    gap_vs_constructed: f64,
    restarts: usize,
    seed: u64,
    converged: bool,
    best_point: Vec<BlockJson>,
    distinct_optima: usize,
    grid: Option<GridJson>,
}

fn blocks_json(p: &FeasiblePoint) -> Vec<BlockJson> {
    p.blocks()
        .iter()
        .map(|b| BlockJson {
            weight: match b.weight() {
                PhaseWeight::Qubit { nu } => vec![nu],
                PhaseWeight::Qutrit { nu1, nu2 } => vec![nu1, nu2],
            },
            coeffs: b.coeffs().iter().map(|&c| round_sig15(c)).collect(),
        })
        .collect()
}

fn run_oracle(a: OracleArgs) -> Result<(), CliError> {
    let (system, criterion): (System, Criterion) = (a.system.into(), a.criterion.into());
    let r = oracle::maximize_fidelity(system, criterion, a.n, a.m, a.search.restarts, a.search.seed)?;
    let grid = match a.grid {
        Some(steps) => {
            let g = oracle::exhaustive_small_search(system, criterion, a.n, a.m, steps)?;
            Some(GridJson {
                steps,
                best_value: round_sig15(g.best_value),
                gap_vs_constructed: g.gap_vs_constructed,
            })
        }
        None => None,
    };
    let constructed = constructed_map(system, criterion, a.n, a.m)?.0.fidelity(criterion);
    print_json(&OracleJson {
        system: system.name(),
        criterion: criterion.name(),
        n_in: a.n,
        n_out: a.m,
        best_value: round_sig15(r.best_value),
        constructed: round_sig15(constructed),
        gap_vs_constructed: r.gap_vs_constructed,
        restarts: r.restarts,
        seed: a.search.seed,
        converged: r.converged,
        best_point: blocks_json(&r.best_point),
        distinct_optima: r.distinct_optima.len(),
        grid,
    })
}
