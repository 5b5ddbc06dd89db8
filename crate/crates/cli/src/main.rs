mod commands;
mod config;
mod error;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toml::{Table, Value};

use crate::config::{load_table, parse_list, parse_value, set_key, ExperimentConfig, OUTPUT_ENV};
use crate::error::{CliError, CliResult};

/// Boundary-driven exclusion on the Sierpinski gasket: graphs, spectra, the
/// limiting heat equation, simulation and fluctuation diagnostics.
#[derive(Parser)]
#[command(name = "gasket-hydro", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export the level-N graph as JSON.
    Graph(Common),
    /// Corner resistances, cell diameters and the fitted cell constant.
    Resistance(Common),
    /// Eigenvalues, counting function and Weyl slope.
    Spectrum(Common),
    /// Solve the heat equation and report the weak-form residual.
    Pde(Common),
    /// Run replicas of the particle system and record observables.
    Simulate(Common),
    /// Compare replica means of density functionals with the heat equation.
    HydroCompare(Common),
    /// Equilibrium fluctuation covariances and martingale check.
    Fluct(Common),
    /// Master-equation oracle against simulation for tiny graphs.
    Oracle(Common),
    /// Check a configuration and report regimes and capacity without running.
    Validate(Common),
    /// Recompute the checksums listed in a run manifest.
    Verify {
        /// Run directory holding manifest.json.
        dir: PathBuf,
    },
}

/// Every flag overrides the config key of the same name.
#[derive(Args, Clone, Default)]
struct Common {
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<u64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Output time steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Base step count of the weak-residual refinement.
    #[arg(long)]
    pde_steps: Option<usize>,
    /// limit, finite, dirichlet, neumann or robin.
    #[arg(long)]
    bc: Option<String>,
    /// Exponent(s) `b`, one value or three comma separated (`5/3`, `1.5`).
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    lambda_plus: Option<String>,
    #[arg(long)]
    lambda_minus: Option<String>,
    /// Robin coefficients for `--bc robin`.
    #[arg(long)]
    robin: Option<String>,
    /// Initial constant density.
    #[arg(long)]
    rho: Option<f64>,
    /// Eigenfunction indices used as test functions, comma separated.
    #[arg(long)]
    eigen: Option<String>,
    /// Any other key, e.g. `--set fluct.dt=0.001`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Run directory; defaults to `$GASKET_HYDRO_OUTPUT/<subcommand>-<hash>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for replica loops; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Common {
    fn table(&self) -> CliResult<Table> {
        let mut t = load_table(self.config.as_deref())?;
        let mut put = |k: &str, v: Value| set_key(&mut t, k, v);
        if let Some(x) = self.level {
            put("level", Value::Integer(x.into()))?;
        }
        if let Some(x) = self.seed {
            put("seed", Value::Integer(i64::try_from(x).map_err(|_| CliError::Config("seed too large".into()))?))?;
        }
        if let Some(x) = self.replicas {
            put("replicas", Value::Integer(x as i64))?;
        }
        if let Some(x) = self.horizon {
            put("horizon", Value::Float(x))?;
        }
        if let Some(x) = self.steps {
            put("steps", Value::Integer(x as i64))?;
        }
        if let Some(x) = self.pde_steps {
            put("pde_steps", Value::Integer(x as i64))?;
        }
        if let Some(x) = &self.bc {
            put("bc", Value::String(x.clone()))?;
        }
        if let Some(x) = &self.b {
            put("boundary.b", parse_list(x, true))?;
        }
        if let Some(x) = &self.lambda_plus {
            put("boundary.lambda_plus", parse_list(x, false))?;
        }
        if let Some(x) = &self.lambda_minus {
            put("boundary.lambda_minus", parse_list(x, false))?;
        }
        if let Some(x) = &self.robin {
            put("robin", parse_list(x, false))?;
        }
        if let Some(x) = self.rho {
            let mut init = Table::new();
            init.insert("kind".into(), Value::String("constant".into()));
            init.insert("value".into(), Value::Float(x));
            put("initial", Value::Table(init))?;
        }
        if let Some(x) = &self.eigen {
            let list = x
                .split(',')
                .map(|s| {
                    let n: i64 = s.trim().parse().map_err(|_| CliError::Config(format!("bad eigen index `{s}`")))?;
                    let mut e = Table::new();
                    e.insert("eigen".into(), Value::Integer(n));
                    Ok(Value::Table(e))
                })
                .collect::<CliResult<Vec<_>>>()?;
            put("observables", Value::Array(list))?;
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Config(format!("`--set {kv}` is not KEY=VALUE")))?;
            put(k.trim(), parse_value(v.trim()))?;
        }
        Ok(t)
    }

    fn load(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = ExperimentConfig::from_table(self.table()?)?;
        if let Some(out) = &self.out {
            cfg.output = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn output_root() -> Option<PathBuf> {
    std::env::var_os(OUTPUT_ENV).map(PathBuf::from)
}

fn run_with(common: &Common, f: fn(&ExperimentConfig, Option<&Path>) -> CliResult<PathBuf>) -> CliResult<()> {
    if let Some(j) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let cfg = common.load()?;
    let dir = f(&cfg, output_root().as_deref())?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Graph(c) => run_with(&c, commands::graph),
        Command::Resistance(c) => run_with(&c, commands::resistance),
        Command::Spectrum(c) => run_with(&c, commands::spectrum_cmd),
        Command::Pde(c) => run_with(&c, commands::pde_cmd),
        Command::Simulate(c) => run_with(&c, commands::simulate),
        Command::HydroCompare(c) => run_with(&c, commands::hydro_compare),
        Command::Fluct(c) => run_with(&c, commands::fluct),
        Command::Oracle(c) => run_with(&c, commands::oracle),
        Command::Validate(c) => {
            print!("{}", commands::validate(c.load()));
            Ok(())
        }
        Command::Verify { dir } => {
            let bad = manifest::verify(&dir)?;
            if bad.is_empty() {
                println!("all checksums match");
                Ok(())
            } else {
                Err(CliError::Runtime(format!("checksum mismatch: {}", bad.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gasket-hydro: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
