use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use combined_incentive::game::{Boundary, Structure};
use combined_incentive::harness::{
    cmd_classify, cmd_mc, cmd_netgen, cmd_ode, cmd_sweep, CommandOutput, ExperimentConfig, Format, Mode, Overrides,
    PGrid,
};
use combined_incentive::networks::{NetworkModel, NetworkSpec};
use combined_incentive::{Error, Result};

#[derive(Parser)]
#[command(name = "incentive", version, about = "Optimal combined reward and punishment: analytics and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
}

#[derive(Args, Clone, Default)]
struct NetworkArgs {
    /// complete, lattice, ba, ws or er.
    #[arg(long, alias = "model")]
    network: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    m0: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    rewire: Option<f64>,
    #[arg(long)]
    mean_degree: Option<f64>,
}

impl NetworkArgs {
    /// Unset sizes default to the figure settings.
    fn model(&self) -> Result<Option<NetworkModel>> {
        let Some(name) = self.network.as_deref() else { return Ok(None) };
        let n = self.n.unwrap_or(100);
        Ok(Some(match name {
            "complete" => NetworkModel::Complete { n },
            "lattice" => NetworkModel::Lattice { l: self.l.unwrap_or(10) },
            "ba" | "barabasi_albert" => {
                NetworkModel::BarabasiAlbert { n, m0: self.m0.unwrap_or(6), m: self.m.unwrap_or(2) }
            }
            "ws" | "watts_strogatz" => {
                NetworkModel::WattsStrogatz { n, k: self.k.unwrap_or(4), rewire: self.rewire.unwrap_or(0.1) }
            }
            "er" | "erdos_renyi" => NetworkModel::ErdosRenyi { n, mean_degree: self.mean_degree.unwrap_or(4.0) },
            other => return Err(Error::Config(format!("unknown network {other:?}"))),
        }))
    }
}

#[derive(Args, Clone, Default)]
struct ExperimentArgs {
    #[command(flatten)]
    network: NetworkArgs,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    u: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// `start:stop:step`, or a single value.
    #[arg(long, alias = "p")]
    p_grid: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    max_sweeps: Option<u64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    min_convergence: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepMode {
    Analytic,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureKind {
    Complete,
    Regular,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the cost-minimizing reward/punishment mix for (x0, delta).
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Cost curve over a preference grid, optionally with Monte Carlo columns.
    Sweep {
        #[arg(long, value_enum)]
        mode: Option<SweepMode>,
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Integrate the replicator equation under u* = 2c and compare with the closed forms.
    Ode {
        #[arg(long, value_enum, default_value = "complete")]
        structure: StructureKind,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        omega: f64,
        #[arg(long)]
        x0: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo cost table.
    Mc {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Also write per-run traces to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a network and write it as an edge list or JSON record.
    Netgen {
        #[command(flatten)]
        network: NetworkArgs,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn resolve(common: &Common, exp: &ExperimentArgs, mode: Option<Mode>) -> Result<ExperimentConfig> {
    let base = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let overrides = Overrides {
        mode,
        network: exp.network.model()?,
        b: exp.b,
        c: exp.c,
        u: exp.u,
        x0: exp.x0,
        delta: exp.delta,
        p_grid: exp.p_grid.as_deref().map(str::parse::<PGrid>).transpose()?,
        runs: exp.runs,
        seed: common.seed,
        max_sweeps: exp.max_sweeps,
        omega: exp.omega,
        min_convergence: exp.min_convergence,
        format: common.format,
    };
    let cfg = overrides.apply(base);
    cfg.validate()?;
    Ok(cfg)
}

fn write(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Option<Error>> {
    let finish = |common: &Common, output: CommandOutput| -> Result<Option<Error>> {
        write(common.out.as_deref(), &output.text)?;
        Ok(output.failure)
    };
    match cli.command {
        Command::Classify { x0, delta, common } => {
            finish(&common, cmd_classify(x0, delta, common.format.unwrap_or_default())?)
        }
        Command::Sweep { mode, exp, common } => {
            let mode = mode.map(|m| match m {
                SweepMode::Analytic => Mode::Analytic,
                SweepMode::Mc => Mode::Mc,
            });
            let cfg = resolve(&common, &exp, mode)?;
            finish(&common, cmd_sweep(&cfg)?)
        }
        Command::Ode { structure, n, k, omega, x0, delta, c, p, step, common } => {
            let s = match structure {
                StructureKind::Complete => Structure::complete(n)?,
                StructureKind::Regular => Structure::regular(n, k, omega)?,
            };
            let out = cmd_ode(&s, &Boundary { x0, delta }, c, p, step, common.format.unwrap_or_default())?;
            finish(&common, out)
        }
        Command::Mc { exp, trace, common } => {
            let cfg = resolve(&common, &exp, Some(Mode::Mc))?;
            let (out, traces) = cmd_mc(&cfg, trace.is_some())?;
            if let (Some(path), Some(text)) = (&trace, traces) {
                write(Some(path), &text)?;
            }
            finish(&common, out)
        }
        Command::Netgen { network, common } => {
            let base = match &common.config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::default(),
            };
            let model = network.model()?.unwrap_or(base.network);
            let spec = NetworkSpec::new(model, common.seed.unwrap_or(base.seed));
            finish(&common, cmd_netgen(&spec, common.format.unwrap_or(base.format))?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("incentive: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("incentive: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
