use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qgnm::config::{CertMode, ExperimentConfig, Settings};
use qgnm::report::{render, Format};
use qgnm::runner::{cmd_fixture, cmd_optimal, cmd_sweep, cmd_verify, FixtureParams};
use qgnm::{Error, Result};
use qgnm_core::fixtures::FamilyRequest;
use qgnm_core::verifier::DEFAULT_OPERATOR_CAP;

/// Simulate the quantum verifier for group non-membership.
#[derive(Parser)]
#[command(name = "qgnm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verifier and emit one row per instance, epsilon and certificate.
    Verify(Common),
    /// Amplified verification (k defaults to 2 and must exceed 1).
    Amplify(Common),
    /// Sweep the sampler deviation epsilon over a grid.
    Sweep(Common),
    /// Compute the best certificate value from the acceptance operator.
    Optimal {
        #[command(flatten)]
        common: Common,
        /// Largest certificate dimension for which the operator is built.
        #[arg(long, default_value_t = DEFAULT_OPERATOR_CAP)]
        cap: usize,
        /// Directory for the optimal certificates.
        #[arg(long)]
        dump_vector: Option<PathBuf>,
    },
    /// Sample fixture labelings and write them as fixture files.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct Common {
    /// Flat TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin group spec, e.g. `cyclic:6;gens=2;h=3` (repeatable).
    #[arg(long)]
    group: Vec<String>,
    /// Fixture file (repeatable).
    #[arg(long)]
    fixture: Vec<PathBuf>,
    /// honest | point-mass[:hex] | random[:count] | file:path | optimal
    #[arg(long)]
    cert_mode: Option<CertMode>,
    /// Sampler deviation; 0 is exact-uniform. Comma-separated for a grid.
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of verifier copies.
    #[arg(long)]
    k: Option<u32>,
    /// csv | json | table
    #[arg(long)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long)]
    n: u8,
    /// F1 (positive) or F0 (negative).
    #[arg(long, default_value = "F1")]
    family: String,
    /// F0 parameter; drawn from the seed when absent.
    #[arg(long)]
    a: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of fixtures, with consecutive seeds.
    #[arg(long, default_value_t = 1)]
    count: u32,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl Common {
    fn resolve(self, default_k: u32) -> Result<ExperimentConfig> {
        let flags = Settings {
            groups: self.group,
            fixtures: self.fixture,
            cert_mode: self.cert_mode,
            epsilons: self.epsilon,
            seed: self.seed,
            k: self.k,
            format: self.format,
            out: self.out,
        };
        let (settings, base) = match &self.config {
            Some(path) => {
                let base = path
                    .parent()
                    .filter(|p| !p.as_os_str().is_empty())
                    .map(PathBuf::from);
                (Settings::load(path)?.merge(flags), base)
            }
            None => (flags, None),
        };
        settings.finish(default_k, base)
    }
}

fn emit(config: &ExperimentConfig, text: &str) -> Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Verify(common) => {
            let config = common.resolve(1)?;
            emit(&config, &render(&cmd_verify(&config)?, config.format)?)
        }
        Command::Amplify(common) => {
            let config = common.resolve(2)?;
            if config.k < 2 {
                return Err(Error::Config(
                    "amplify needs k > 1; use verify for k = 1".into(),
                ));
            }
            emit(&config, &render(&cmd_verify(&config)?, config.format)?)
        }
        Command::Sweep(common) => {
            let explicit_grid = !common.epsilon.is_empty() || common.config.is_some();
            let config = common.resolve(1)?;
            if !explicit_grid {
                return Err(Error::Config("empty epsilon grid: give --epsilon".into()));
            }
            emit(
                &config,
                &render(&cmd_sweep(&config, &config.epsilons)?, config.format)?,
            )
        }
        Command::Optimal {
            common,
            cap,
            dump_vector,
        } => {
            let config = common.resolve(1)?;
            let rows = cmd_optimal(&config, cap, dump_vector.as_deref())?;
            emit(&config, &render(&rows, config.format)?)
        }
        Command::Fixture(args) => {
            let family = match args.family.as_str() {
                "F1" if args.a.is_none() => FamilyRequest::F1,
                "F1" => return Err(Error::Config("--a only applies to F0".into())),
                "F0" => FamilyRequest::F0(args.a),
                other => return Err(Error::Config(format!("unknown family `{other}` (F0, F1)"))),
            };
            let params = FixtureParams {
                n: args.n,
                family,
                seed: args.seed,
                count: args.count,
                out_dir: args.out,
            };
            for summary in cmd_fixture(&params)? {
                println!("{summary}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qgnm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
