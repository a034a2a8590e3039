//! Argument parsing and subcommand dispatch.
//!
//! Failures print `E_CODE: message` as the first stderr line. Exit status
//! is 0 on success, 1 on failure and 2 when a suite finishes partially.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use seds_forecast_core::ingest::{parse_seds_file, MsnTable};

use crate::config::{ConfigLayer, Family, PhiSetting, RunConfig};
use crate::error::{CliError, Result};
use crate::pipeline::{chart_style, execute, run_config, select_orders, Inputs, SVG_FILE};
use crate::report::{write_file, ForecastReport};
use crate::suite::{paper_suite, SuiteConfig};
use crate::svg::render_forecast_svg;

#[derive(Debug, Parser)]
#[command(
    name = "seds-forecast",
    version,
    about = "Forecast annual energy consumption from SEDS data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a SEDS file and list its series.
    Ingest(IngestArgs),
    /// Choose d by KPSS, rank the order grid by AICc and backtest it.
    Select(RunArgs),
    /// Fit the configured model and print its summary.
    Fit(RunArgs),
    /// Fit, forecast and write report.json, forecast.csv and forecast.svg.
    Forecast(RunArgs),
    /// Run the sector model suite over a data directory.
    Suite(SuiteArgs),
    /// Redraw forecast.svg from a report.json.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub seds: PathBuf,
    /// Extra MSN definitions (code,source,sector_or_type,unit).
    #[arg(long)]
    pub msn_table: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seds: Option<PathBuf>,
    /// `year,value` side files, named after their file stem.
    #[arg(long, num_args = 1..)]
    pub side: Vec<PathBuf>,
    /// `year,value` price index; enables inflation adjustment of prices.
    #[arg(long)]
    pub deflator: Option<PathBuf>,
    #[arg(long)]
    pub msn_table: Option<PathBuf>,
    #[arg(long)]
    pub state: Option<String>,
    /// `year,<column>...` future exogenous paths.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// MSN code, `A+B` sum, side-file name or `file:<path>[:<col>]`.
    #[arg(long)]
    pub response: Option<String>,
    #[arg(long, num_args = 1..)]
    pub exog: Vec<String>,
    /// `p,d,q` or `auto`.
    #[arg(long)]
    pub spec: Option<String>,
    /// Holt damping: a number in (0, 1] or `estimated`.
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub exog_lag: Option<usize>,
    #[arg(long)]
    pub holdout: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long)]
    pub exclude_after: Option<i32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_p: Option<usize>,
    #[arg(long)]
    pub max_q: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            seds: self.seds.clone(),
            side: (!self.side.is_empty()).then(|| self.side.clone()),
            deflator: self.deflator.clone(),
            msn_table: self.msn_table.clone(),
            state: self.state.clone(),
            scenario: self.scenario.clone(),
            family: self.family,
            response: self.response.clone(),
            exog: (!self.exog.is_empty()).then(|| self.exog.clone()),
            spec: self.spec.clone(),
            phi: self.phi.clone().map(PhiSetting::Word),
            exog_lag: self.exog_lag,
            holdout: self.holdout,
            horizon: self.horizon,
            level: self.level,
            exclude_after: self.exclude_after,
            seed: self.seed,
            max_p: self.max_p,
            max_q: self.max_q,
            out: self.out.clone(),
        }
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => ConfigLayer::from_path(p)?,
            None => ConfigLayer::default(),
        };
        RunConfig::resolve(file, self.layer())
    }
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Directory holding seds.csv and the side files.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Suite definition; the bundled one when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub report: PathBuf,
    /// Defaults to forecast.svg next to the report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn ingest(args: &IngestArgs, stdout: &mut dyn std::io::Write) -> Result<u8> {
    let records = parse_seds_file(&args.seds)?;
    let mut table = MsnTable::bundled().clone();
    if let Some(p) = &args.msn_table {
        table.extend_from_path(p)?;
    }
    let mut text = format!("{} series in {}\n", records.len(), args.seds.display());
    for r in &records {
        let described = match table.decode(&r.msn) {
            Ok(k) => format!("{} {} [{}]", k.source, k.sector_or_type, k.unit.tag()),
            Err(_) => "not in MSN table".into(),
        };
        text.push_str(&format!(
            "{} {} {}-{} n={} {}\n",
            r.state,
            r.msn,
            r.series.start_year(),
            r.series.end_year(),
            r.series.len(),
            described
        ));
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::write("stdout", e))?;
    Ok(0)
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn select(args: &RunArgs, stdout: &mut dyn std::io::Write) -> Result<u8> {
    let config = args.resolve()?;
    let inputs = Inputs::from_config(&config)?;
    let report = select_orders(&config, &inputs)?;
    let json = json_line(&report);
    std::fs::create_dir_all(&config.out).map_err(|e| CliError::write(&config.out, e))?;
    write_file(&config.out.join("selection.json"), &json)?;
    stdout
        .write_all(json.as_bytes())
        .map_err(|e| CliError::write("stdout", e))?;
    Ok(0)
}

fn fit(args: &RunArgs, stdout: &mut dyn std::io::Write) -> Result<u8> {
    let config = args.resolve()?;
    let inputs = Inputs::from_config(&config)?;
    let result = execute(&config, &inputs, &config.response.to_string())?;
    let json = json_line(&result.report.model);
    stdout
        .write_all(json.as_bytes())
        .map_err(|e| CliError::write("stdout", e))?;
    Ok(0)
}

fn forecast(args: &RunArgs, stdout: &mut dyn std::io::Write) -> Result<u8> {
    let config = args.resolve()?;
    let result = run_config(&config)?;
    let mut text = String::new();
    for row in &result.report.forecast.rows {
        text.push_str(&format!(
            "{} {} [{}, {}]\n",
            row.year, row.point, row.lower, row.upper
        ));
    }
    text.push_str(&format!("wrote {}\n", config.out.display()));
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::write("stdout", e))?;
    Ok(0)
}

fn suite(
    args: &SuiteArgs,
    stdout: &mut dyn std::io::Write,
    stderr: &mut dyn std::io::Write,
) -> Result<u8> {
    let mut config = match &args.config {
        Some(p) => SuiteConfig::from_path(p)?,
        None => SuiteConfig::bundled(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let outcome = paper_suite(&args.data, &args.out, &config)?;
    let code = outcome.exit_code();
    let s = &outcome.summary;
    if !s.skipped.is_empty() {
        let mut lines = format!(
            "E_PARTIAL: {} of {} suite models skipped\n",
            s.skipped.len(),
            s.skipped.len() + s.completed.len()
        );
        for k in &s.skipped {
            lines.push_str(&format!("{}: {} skipped: {}\n", k.code, k.name, k.message));
        }
        stderr
            .write_all(lines.as_bytes())
            .map_err(|e| CliError::write("stderr", e))?;
    }
    let text = format!(
        "completed {} models into {}\n",
        s.completed.len(),
        args.out.display()
    );
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::write("stdout", e))?;
    Ok(code)
}

fn render(args: &RenderArgs) -> Result<u8> {
    let report = ForecastReport::from_path(&args.report)?;
    let history = report.history.to_series(&report.model.response)?;
    let forecast = report.forecast.to_forecast()?;
    let svg = render_forecast_svg(&history, &forecast, &chart_style(&report))?;
    let out = args.out.clone().unwrap_or_else(|| {
        args.report
            .parent()
            .unwrap_or(Path::new("."))
            .join(SVG_FILE)
    });
    write_file(&out, &svg)?;
    Ok(0)
}

pub fn dispatch(
    cli: &Cli,
    stdout: &mut dyn std::io::Write,
    stderr: &mut dyn std::io::Write,
) -> Result<u8> {
    match &cli.command {
        Command::Ingest(a) => ingest(a, stdout),
        Command::Select(a) => select(a, stdout),
        Command::Fit(a) => fit(a, stdout),
        Command::Forecast(a) => forecast(a, stdout),
        Command::Suite(a) => suite(a, stdout, stderr),
        Command::Render(a) => render(a),
    }
}

/// Parses `args`, runs the subcommand and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("bad arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            let _ = writeln!(stderr, "{}", CliError::Usage(first.to_string()).render());
            let _ = write!(stderr, "{text}");
            return 1;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.render());
            1
        }
    }
}
