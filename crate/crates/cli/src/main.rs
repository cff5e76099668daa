use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eqlcd::harness::config::RunConfig;
use eqlcd::harness::convergence::{run_convergence, ConvergenceModel, ConvergenceRequest};
use eqlcd::harness::output::{number, write_example, write_steady};
use eqlcd::harness::{build_example, run_example, ExampleRequest, HarnessError};
use eqlcd::scheme::SchemeVariant;

#[derive(Parser)]
#[command(name = "eqlcd", version, about = "Well-balanced A-WENO example runs and convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an example preset or a configuration file.
    Run(RunArgs),
    /// Write the reference steady state of an example.
    Steady {
        #[arg(long)]
        example: u8,
        #[arg(long, default_value = "1")]
        scheme: SchemeVariant,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Grid-refinement study on a smooth periodic problem.
    Converge {
        /// `advection` or `sw`.
        #[arg(long)]
        model: ConvergenceModel,
        /// Comma-separated cell counts, each three times the previous.
        #[arg(long, value_delimiter = ',', required = true)]
        meshes: Vec<usize>,
        #[arg(long, default_value = "1")]
        scheme: SchemeVariant,
        #[arg(long)]
        first_order: bool,
        #[arg(long)]
        tfinal: Option<f64>,
        /// Also write the table to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    example: Option<u8>,
    #[arg(long, default_value = "1")]
    scheme: SchemeVariant,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn configure_threads() -> Result<(), HarnessError> {
    let Ok(text) = std::env::var("THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("THREADS must be a positive integer, got '{text}'")))?;
    if n == 0 {
        return Err(HarnessError::Config("THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| HarnessError::Config(e.to_string()))
}

fn run(args: RunArgs) -> Result<(), HarnessError> {
    let (mut req, config_dir) = match &args.config {
        Some(path) => RunConfig::load(path)?.to_request()?,
        None => (ExampleRequest::new(args.example.unwrap_or_default(), args.scheme), None),
    };
    if args.nx.is_some() {
        req.overrides.nx = args.nx;
    }
    if args.tfinal.is_some() {
        req.overrides.t_final = args.tfinal;
    }
    let out = args.out.or(config_dir).unwrap_or_else(|| PathBuf::from("out"));
    let result = run_example(&req)?;
    let m = &result.metrics;
    println!(
        "{}: {} steps to t = {} in {:.3} s",
        result.run.name, m.steps, result.outcome.summary.time, m.runtime_seconds
    );
    for c in &m.components {
        println!(
            "  {:>6}  linf {}  l1 {}  oscillations {}",
            c.name,
            number(c.linf),
            number(c.l1),
            c.oscillations
        );
    }
    if m.diagnostics.total() > 0 {
        eprintln!("fallbacks: {:?}", m.diagnostics);
    }
    for path in write_example(&out, &result)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Run(args) => run(args),
        Command::Steady { example, scheme, nx, out } => {
            let mut req = ExampleRequest::new(example, scheme);
            req.overrides.nx = nx;
            let run = build_example(&req)?;
            match write_steady(&out, &format!("example{example}"), &run)? {
                Some(path) => {
                    println!("wrote {}", path.display());
                    Ok(())
                }
                None => Err(HarnessError::Config(format!("example {example} has no steady state"))),
            }
        }
        Command::Converge {
            model,
            meshes,
            scheme,
            first_order,
            tfinal,
            out,
        } => {
            let mut req = ConvergenceRequest::new(model, meshes);
            req.variant = scheme;
            req.first_order = first_order;
            if let Some(t) = tfinal {
                req.t_final = t;
            }
            let csv = run_convergence(&req)?.to_csv();
            print!("{csv}");
            if let Some(path) = out {
                std::fs::write(path, csv)?;
            }
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
