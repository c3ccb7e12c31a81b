use clap::{Parser, Subcommand};
use dnls_core::cli::{run, RunConfig, ScenarioKind};
use dnls_core::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Pseudospectral laboratory for derivative nonlinear Schrödinger
/// equations on periodic boxes.
#[derive(Parser)]
#[command(name = "dnls", version)]
struct Cli {
    /// Output directory; the DNLS_OUT environment variable overrides this.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for ensemble probes; 1 means fully sequential.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Override the seed recorded in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split-step evolution of a configured datum; writes the trace.
    Evolve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Picard contraction run; writes the convergence record.
    Picard {
        #[arg(long)]
        config: PathBuf,
    },
    /// Inequality probe over a seeded ensemble from a probe spec file.
    Probe {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Evolve and extract the scattering state.
    Scatter {
        #[arg(long)]
        config: PathBuf,
    },
    /// Norm table for a configured datum.
    Norms {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the quick invariant suite.
    Selfcheck {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load_config(path: &PathBuf, expected: ScenarioKind) -> Result<RunConfig, Error> {
    let config = RunConfig::from_file(path)?;
    if config.scenario != expected {
        return Err(Error::InvalidParameter(format!(
            "configuration declares scenario {:?}, the subcommand expects {:?}",
            config.scenario, expected
        )));
    }
    Ok(config)
}

fn build(cli: &Cli) -> Result<RunConfig, Error> {
    match &cli.command {
        Command::Evolve { config } => load_config(config, ScenarioKind::Evolve),
        Command::Picard { config } => load_config(config, ScenarioKind::Picard),
        Command::Scatter { config } => load_config(config, ScenarioKind::Scatter),
        Command::Norms { config } => load_config(config, ScenarioKind::Norms),
        Command::Selfcheck { config } => match config {
            Some(path) => load_config(path, ScenarioKind::Selfcheck),
            None => Ok(default_selfcheck_config()),
        },
        Command::Probe { spec } => {
            // the probe grid lives in the spec file; mirror it into the run
            // configuration so the recorded hash covers it
            let text = std::fs::read_to_string(spec)?;
            let parsed: dnls_core::prober::ProbeSpec = serde_json::from_str(&text)?;
            Ok(RunConfig {
                scenario: ScenarioKind::Probe,
                grid: dnls_core::cli::GridParams {
                    dim: parsed.dim,
                    points_per_dim: parsed.points_per_dim,
                    half_length: parsed.half_length,
                },
                signature: Some(parsed.signature.clone()),
                time: None,
                nonlinearity: None,
                datum: None,
                amplitude: None,
                sobolev_index: None,
                seed: Some(parsed.seed),
                tol: None,
                max_iter: None,
                dealias: None,
                save_trace: None,
                scatter_samples: None,
                probe_spec: Some(spec.clone()),
                norms: None,
            })
        }
    }
}

fn default_selfcheck_config() -> RunConfig {
    RunConfig {
        scenario: ScenarioKind::Selfcheck,
        grid: dnls_core::cli::GridParams {
            dim: 1,
            points_per_dim: 256,
            half_length: 16.0 * std::f64::consts::PI,
        },
        signature: None,
        time: None,
        nonlinearity: None,
        datum: None,
        amplitude: None,
        sobolev_index: None,
        seed: None,
        tol: None,
        max_iter: None,
        dealias: None,
        save_trace: None,
        scatter_samples: None,
        probe_spec: None,
        norms: None,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out_dir = std::env::var_os("DNLS_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| cli.out.clone());
    let mut config = match build(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    match run(&config, &out_dir, cli.workers.max(1)) {
        Ok(summary) => {
            println!(
                "{:?}: {} artifacts in {} (config {})",
                summary.scenario,
                summary.artifacts.len(),
                out_dir.display(),
                &summary.config_hash[..12]
            );
            if config.scenario == ScenarioKind::Selfcheck && !summary.ok {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let payload = serde_json::json!({
                "error": e.to_string(),
                "exit_code": e.exit_code(),
            });
            let _ = std::fs::create_dir_all(&out_dir);
            let _ = std::fs::write(
                out_dir.join("error.json"),
                serde_json::to_string_pretty(&payload).unwrap_or_default(),
            );
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
