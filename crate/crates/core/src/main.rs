use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mimo_skc::experiments::{
    load_config, load_config_set, run_dof, run_eval, run_sweep, run_verify, McOverrides, RunOutput,
};
use mimo_skc::verify::SuiteOptions;
use mimo_skc::{Error, Result};

/// Environment variable replacing the built-in default seed.
const ENV_SEED: &str = "SKC_SEED";
/// Environment variable replacing the built-in default thread count.
const ENV_THREADS: &str = "SKC_THREADS";
const EXIT_VERIFY_FAILED: u8 = 5;

#[derive(Parser)]
#[command(
    name = "skc",
    version,
    about = "Secret-key capacity of two-way MIMO channel probing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every bound for a single configuration.
    Eval(Common),
    /// Evaluate the requested quantities over a parameter sweep.
    Sweep(Common),
    /// Fit the high-power slope of a quantity and compare with the DoF formula.
    Dof(Common),
    /// Run the oracle and identity checks (bundled config set by default).
    Verify {
        #[command(flatten)]
        common: Common,
        /// Negative control: corrupt g before the pilot-MI oracle comparison.
        #[arg(long)]
        mutate_g: bool,
    },
}

#[derive(Args)]
struct Common {
    /// Experiment TOML file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (default: $SKC_SEED, then 1).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per point (default 10000).
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads (default: $SKC_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl Common {
    fn overrides(&self) -> McOverrides {
        McOverrides {
            trials: self.trials,
            seed: self.seed,
            threads: self.threads,
        }
    }

    fn config_path(&self) -> Result<&Path> {
        self.config
            .as_deref()
            .ok_or_else(|| Error::Usage("--config <path> is required".into()))
    }
}

fn env_var<T: std::str::FromStr>(name: &str) -> Result<Option<T>> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Validation(format!("{name} = '{v}' is not a valid value"))),
        Err(_) => Ok(None),
    }
}

fn env_defaults() -> Result<McOverrides> {
    let defaults = McOverrides {
        trials: None,
        seed: env_var(ENV_SEED)?,
        threads: env_var(ENV_THREADS)?,
    };
    if defaults.threads == Some(0) {
        return Err(Error::Validation(format!("{ENV_THREADS} must be >= 1")));
    }
    Ok(defaults)
}

fn write_outputs(out: &Path, output: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(out)?;
    for (name, contents) in &output.files {
        std::fs::write(out.join(name), contents)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let env = env_defaults()?;
    let (common, output) = match &cli.command {
        Command::Eval(c) | Command::Sweep(c) | Command::Dof(c) => {
            let mut spec = load_config(c.config_path()?, env)?;
            spec.apply_overrides(c.overrides())?;
            let output = match cli.command {
                Command::Eval(_) => run_eval(&spec)?,
                Command::Sweep(_) => run_sweep(&spec)?,
                _ => run_dof(&spec)?,
            };
            (c, output)
        }
        Command::Verify { common, mutate_g } => {
            let (configs, mut mc) = load_config_set(common.config.as_deref(), env)?;
            let o = common.overrides();
            mc.trials = o.trials.unwrap_or(mc.trials);
            mc.master_seed = o.seed.unwrap_or(mc.master_seed);
            mc.max_parallelism = o.threads.or(mc.max_parallelism);
            if mc.trials == 0 || mc.max_parallelism == Some(0) {
                return Err(Error::Validation("trials and threads must be >= 1".into()));
            }
            let (output, _) = run_verify(
                &configs,
                &mc,
                SuiteOptions {
                    corrupt_g: *mutate_g,
                },
            )?;
            (common, output)
        }
    };
    write_outputs(&common.out, &output)?;
    print!("{}", output.stdout);
    Ok(output.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
