use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use entsym::Tolerance;
use entsym_cli::report::Report;
use entsym_cli::scene::SchemaError;
use entsym_cli::{cmd_capacity, cmd_check, cmd_transform, demo_scene, load, load_path, Settings, DEMOS};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Parser)]
#[command(name = "entsym", version, about = "Check Frobenius algebras, channels and their entanglement-symmetries")]
struct Cli {
    /// Residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Seed for randomized channels and sub-tests.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify every declared object and run the scene's tasks.
    Check {
        /// Scene file (JSON or TOML), or `-` for stdin.
        scene: String,
    },
    /// Transform a covariant channel by a cocycle twist.
    Transform {
        scene: String,
        #[arg(long)]
        cocycle: String,
        #[arg(long)]
        channel: String,
    },
    /// Capacity of a channel, optionally with its quantum image under a cocycle.
    Capacity {
        scene: String,
        #[arg(long)]
        channel: String,
        #[arg(long, value_name = "COCYCLE")]
        quantum_image: Option<String>,
    },
    /// Run a bundled scene.
    Demo {
        #[arg(value_parser = DEMOS.map(|(n, _, _)| n))]
        name: String,
    },
}

fn execute(cli: &Cli, settings: &Settings) -> Result<Report, SchemaError> {
    match &cli.command {
        Command::Check { scene } => Ok(cmd_check(load_path(scene, settings)?, settings)),
        Command::Transform { scene, cocycle, channel } => {
            cmd_transform(load_path(scene, settings)?, settings, cocycle, channel)
        }
        Command::Capacity {
            scene,
            channel,
            quantum_image,
        } => cmd_capacity(load_path(scene, settings)?, settings, channel, quantum_image.as_deref()),
        Command::Demo { name } => {
            let (text, format) = demo_scene(name).expect("clap restricts demo names");
            Ok(cmd_check(load(text, format, settings)?, settings))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match Tolerance::new(cli.tol) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let settings = Settings { tol, seed: cli.seed };
    let start = Instant::now();
    let result = execute(&cli, &settings);
    eprintln!("elapsed {:.3} ms", start.elapsed().as_secs_f64() * 1e3);
    match result {
        Ok(report) => {
            let text = match cli.format {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Text => report.to_text(),
            };
            print!("{text}");
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
