//! The `scorerate` command line: `rate`, `verify` and `simulate`.
//!
//! Settings are layered as defaults, then the `--config` file, then (for
//! `simulate`) the scenario's `[engine]` table, then flags.
//!
//! Exit codes: 0 success, 1 validation or ingestion error, 2 property failure.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use crate::config::{ScenarioFile, Settings};
use crate::engine::{Engine, EngineConfig, EngineModel};
use crate::error::Error;
use crate::logfile::{parse_log, parse_pool, write_log};
use crate::models::OutcomeModel;
use crate::sim::{expected_first_step_drift, history_rows, plot_data, run_simulation, PlotTable};
use crate::verify::{run_suite, Mutation, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_PROPERTY: i32 = 2;

const DEFAULT_CASES: usize = 1000;
const DEFAULT_REPLICATIONS: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "scorerate", version, about = "Score-driven rating engine")]
pub struct Cli {
    /// TOML file with default values for the shared options.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay a game log and print the final ratings.
    Rate(RateArgs),
    /// Run the randomized property suite.
    Verify(VerifyArgs),
    /// Simulate seasons from a true-skill scenario.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args, Default)]
pub struct SharedArgs {
    /// win_loss, margin, win_draw_loss, ranking or elo_classic.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Draw threshold of the win/draw/loss model.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Step size K.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long = "r-init", allow_hyphen_values = true)]
    pub r_init: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (ratings table, report or plot data).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

impl SharedArgs {
    fn settings(&self) -> Settings {
        Settings {
            model: self.model.clone(),
            alpha: self.alpha,
            delta: self.delta,
            k: self.k,
            r_init: self.r_init,
            seed: self.seed,
            ..Settings::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Game log to replay.
    pub log: PathBuf,
    /// Player pool, one id per line (default: players in the log).
    #[arg(long, value_name = "FILE")]
    pub pool: Option<PathBuf>,
    /// Write the rating after every game in plot-data format.
    #[arg(long, value_name = "FILE")]
    pub history: Option<PathBuf>,
    #[command(flatten)]
    pub shared: SharedArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random cases per model.
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long, hide = true)]
    pub inject_sign_flip: bool,
    #[command(flatten)]
    pub shared: SharedArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario TOML file.
    pub scenario: PathBuf,
    #[arg(long)]
    pub replications: Option<usize>,
    /// Write the game log of the first replication.
    #[arg(long, value_name = "FILE")]
    pub log_out: Option<PathBuf>,
    #[command(flatten)]
    pub shared: SharedArgs,
}

/// Parses `args` and runs the command, printing errors to stderr.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    let base = match &cli.config {
        Some(path) => Settings::from_toml(&read_text(path)?)?,
        None => Settings::default(),
    };
    match cli.command {
        Command::Rate(args) => rate(&base, args, out),
        Command::Verify(args) => verify(&base, args, out),
        Command::Simulate(args) => simulate(&base, args, out),
    }
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

/// Runs `f` against `--out` if given, otherwise against stdout.
fn with_output(
    path: Option<&Path>,
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let mut file = create(p)?;
            f(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => f(out),
    }
}

fn rate(base: &Settings, args: RateArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let settings = base.overridden_by(&args.shared.settings());
    let log = parse_log(open(&args.log)?).with_context(|| format!("in {}", args.log.display()))?;
    let model = settings.engine_model()?.unwrap_or_else(|| log.model.into());
    let pool = match &args.pool {
        Some(p) => parse_pool(open(p)?).with_context(|| format!("in {}", p.display()))?,
        None => log.players(),
    };
    let config = EngineConfig::new(model, settings.params()?, pool);
    let mut engine = Engine::new(config)?;
    for (i, record) in log.records.iter().enumerate() {
        engine.apply(record).map_err(|e| match log.line_of(i) {
            Some(line) => anyhow!("{}: line {line}: {e}", args.log.display()),
            None => anyhow!(e),
        })?;
    }
    let history = engine.into_history();

    let finals = history.final_ratings();
    let played = history.games_played();
    let mut rows: Vec<_> = finals.iter().collect();
    rows.sort_by(|(a, ra), (b, rb)| rb.total_cmp(ra).then_with(|| a.cmp(b)));
    with_output(args.shared.out.as_deref(), out, |w| {
        writeln!(w, "player,rating,games_played")?;
        for (id, r) in rows {
            writeln!(w, "{id},{r:.6},{}", played.get(id).copied().unwrap_or(0))?;
        }
        Ok(())
    })?;

    if let Some(path) = &args.history {
        let table = PlotTable {
            rows: history_rows(&history, Some(0)),
        };
        let mut file = create(path)?;
        table.write_csv(&mut file)?;
    }
    Ok(EXIT_OK)
}

fn verify(base: &Settings, args: VerifyArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let settings = base.overridden_by(&Settings {
        cases: args.cases,
        ..args.shared.settings()
    });
    let models = match settings.engine_model()? {
        None => OutcomeModel::ALL.to_vec(),
        Some(EngineModel::EloClassic) => vec![OutcomeModel::WinLoss],
        Some(m) => vec![m.outcome_model().expect("likelihood model")],
    };
    let opts = VerifyOptions {
        cases: settings.cases.unwrap_or(DEFAULT_CASES),
        seed: settings.seed.unwrap_or(0),
        params: settings.params()?,
        models,
        mutation: args.inject_sign_flip.then_some(Mutation::DrawSignFlip),
    };
    let reports = run_suite(&opts)?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    with_output(args.shared.out.as_deref(), out, |w| {
        writeln!(w, "seed={} cases={}", opts.seed, opts.cases)?;
        for r in &reports {
            writeln!(w, "{r}")?;
        }
        if failed == 0 {
            writeln!(w, "all {} properties passed", reports.len())?;
        } else {
            writeln!(w, "{failed} of {} properties FAILED", reports.len())?;
        }
        Ok(())
    })?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_PROPERTY })
}

fn simulate(base: &Settings, args: SimulateArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let file = ScenarioFile::from_toml(&read_text(&args.scenario)?)
        .with_context(|| format!("in {}", args.scenario.display()))?;
    let settings = base.overridden_by(&file.engine).overridden_by(&Settings {
        replications: args.replications,
        ..args.shared.settings()
    });
    let config = file.engine_config(&settings)?;
    let replications = settings.replications.unwrap_or(DEFAULT_REPLICATIONS);
    let seed = settings.seed.unwrap_or(0);
    let result = run_simulation(&file.scenario, &config, replications, seed)?;

    if let Some(path) = &args.shared.out {
        let mut w = create(path)?;
        plot_data(&result).write_csv(&mut w)?;
    }
    if let Some(path) = &args.log_out {
        write_log(create(path)?, file.scenario.model(), &result.replications[0].log)?;
    }

    let expected = match expected_first_step_drift(&file.scenario, &config) {
        Ok(e) => Some(e),
        Err(Error::SizeLimit(_)) => None,
        Err(e) => return Err(e.into()),
    };
    writeln!(
        out,
        "engine={} generator={} horizon={} replications={} seed={} rng={}",
        config.model(),
        file.scenario.model(),
        result.horizon,
        replications,
        seed,
        result.rng_algorithm
    )?;
    writeln!(out, "r_init={:.6} max_conservation_error={:.3e}", result.initial_rating, result.max_conservation_error())?;
    writeln!(
        out,
        "player,final_mean,band_low,band_high,band_width,first_step_drift,drift_se,expected_drift"
    )?;
    for (id, series) in &result.aggregate.series {
        let last = series.last().expect("horizon is at least 1");
        let drift = result.first_step_drift(id.as_str()).expect("pool player");
        let exp = expected
            .as_ref()
            .map_or_else(|| "n/a".to_string(), |e| format!("{:.6}", e.get(id.as_str())));
        writeln!(
            out,
            "{id},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{exp}",
            last.mean,
            last.low,
            last.high,
            last.high - last.low,
            drift.mean,
            drift.std_error
        )?;
    }
    Ok(EXIT_OK)
}
