use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use sha2::{Digest, Sha256};

use mcm_core::device::{DeviceConfig, DEFAULT_DEVICE_TOML, FIG2_PRESET_TOML};
use mcm_core::experiments::common::linear_grid;
use mcm_core::experiments::fig2::{run_fig2, Fig2Variant};
use mcm_core::experiments::ramsey::{run_ramsey_mcm, RamseyOptions};
use mcm_core::experiments::tomography::{run_tomography, Scenario};
use mcm_core::experiments::{exchange, stark, tradeoff, Report, RunOptions, Table};
use mcm_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "mcm-lab", version, about = "Mid-circuit measurement experiments on a simulated spin-qubit device")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Visibility of an idle data qubit versus read time, for the three readout modes.
    RamseyMcm {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 1.0)]
        t_min_us: f64,
        #[arg(long, default_value_t = 80.0)]
        t_max_us: f64,
        #[arg(long, default_value_t = 1.0)]
        t_step_us: f64,
    },
    /// X-basis MCM with feedforward; defaults to the shipped calibration preset.
    Fig2 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_parser = parse_variant)]
        variant: Fig2Variant,
    },
    /// Charge fidelity against data-qubit coherence versus total MCM time.
    Tradeoff {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Instrument tomography of one MCM scenario.
    Tomography {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_parser = parse_scenario)]
        scenario: Scenario,
    },
    /// Stark-shift round trip for the reference and read levels.
    Stark {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Conditional-phase maps of the exchange-modulated dCZ and π-difference solutions.
    ExchangeFingerprint {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Device TOML; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shots per circuit or sweep point.
    #[arg(long, conflicts_with = "exact")]
    shots: Option<u64>,
    /// Propagate exact probabilities instead of sampling.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_variant(s: &str) -> std::result::Result<Fig2Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl CommonArgs {
    fn run_options(&self) -> RunOptions {
        if self.exact {
            RunOptions {
                seed: self.seed,
                shots: None,
            }
        } else {
            RunOptions::sampled(self.seed, self.shots.unwrap_or(RunOptions::DEFAULT_SHOTS))
        }
    }

    /// Device config plus the bytes its hash is taken over.
    fn load_config(&self, builtin: &str) -> Result<(DeviceConfig, Vec<u8>)> {
        match &self.config {
            Some(path) => {
                let bytes =
                    fs::read(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                let text = String::from_utf8(bytes.clone())
                    .map_err(|_| Error::Config(format!("{} is not UTF-8", path.display())))?;
                Ok((DeviceConfig::from_toml_str(&text)?, bytes))
            }
            None => Ok((DeviceConfig::from_toml_str(builtin)?, builtin.as_bytes().to_vec())),
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let (common, builtin) = match &cli.command {
        Command::Fig2 { common, .. } => (common, FIG2_PRESET_TOML),
        Command::RamseyMcm { common, .. }
        | Command::Tradeoff { common }
        | Command::Tomography { common, .. }
        | Command::Stark { common }
        | Command::ExchangeFingerprint { common } => (common, DEFAULT_DEVICE_TOML),
    };
    let (cfg, config_bytes) = common.load_config(builtin)?;
    let run = common.run_options();
    let report = match &cli.command {
        Command::RamseyMcm {
            t_min_us,
            t_max_us,
            t_step_us,
            ..
        } => {
            if !(*t_step_us > 0.0 && t_min_us > &0.0 && t_max_us >= t_min_us) {
                return Err(Error::Config("read-time grid needs 0 < t_min <= t_max and step > 0".into()));
            }
            let opts = RamseyOptions {
                t_m_us: linear_grid(*t_min_us, *t_max_us, *t_step_us),
                ..RamseyOptions::default()
            };
            run_ramsey_mcm(&cfg, &opts, &run)?
        }
        Command::Fig2 { variant, .. } => run_fig2(*variant, &cfg, &run)?,
        Command::Tradeoff { .. } => tradeoff::run_tradeoff(&cfg, &tradeoff::default_grid_us())?,
        Command::Tomography { scenario, .. } => run_tomography(*scenario, &cfg, &run)?,
        Command::Stark { .. } => stark::run_stark(&cfg, &stark::default_cases(), &stark::default_grid_us(), &run)?,
        Command::ExchangeFingerprint { .. } => exchange::run_exchange_fingerprint(
            &cfg,
            &exchange::default_voltages(),
            &exchange::default_times_us(),
            &run,
        )?,
    };
    write_outputs(&report, common, &run, &config_bytes)
}

fn write_outputs(report: &Report, common: &CommonArgs, run: &RunOptions, config_bytes: &[u8]) -> Result<()> {
    let dir = &common.out;
    fs::create_dir_all(dir)?;
    match common.format {
        Format::Csv => {
            for table in &report.tables {
                table.write_csv(fs::File::create(dir.join(format!("{}.csv", table.name)))?)?;
            }
            let mut metrics = Table::new("metrics", &["metric", "value"]);
            for (k, v) in &report.metrics {
                metrics.push(vec![k.as_str().into(), (*v).into()]);
            }
            metrics.write_csv(fs::File::create(dir.join("metrics.csv"))?)?;
        }
        Format::Json => {
            let value = serde_json::to_value(report).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            write_json(&dir.join(format!("{}.json", report.experiment)), &value)?
        }
    }
    let sidecar = json!({
        "experiment": report.experiment,
        "seed": run.seed,
        "shots": run.shots,
        "exact": run.is_exact(),
        "config_path": common.config.as_ref().map(|p| p.display().to_string()),
        "config_sha256": hex::encode(Sha256::digest(config_bytes)),
        "version": env!("CARGO_PKG_VERSION"),
        "tables": report.tables.iter().map(|t| t.name.clone()).collect::<Vec<_>>(),
    });
    write_json(&dir.join("run.json"), &sidecar)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mcm-lab: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
