use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crowdcharge::{run_batch, BatchOptions, Protocol, SimConfig};

/// Batch runner for the crowd-charging simulator.
#[derive(Parser)]
#[command(name = "crowdcharge", version)]
struct Cli {
    /// Configuration file (flat `key = value` lines).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Protocol to simulate: balance, pba-wna, or pba-wona.
    #[arg(long)]
    protocol: Option<Protocol>,

    /// Base RNG seed; run k uses seed + k.
    #[arg(long)]
    seed: Option<u64>,

    /// Number of replicate runs.
    #[arg(long)]
    runs: Option<u32>,

    /// Iterations per run.
    #[arg(long)]
    iterations: Option<u64>,

    /// Output directory for the CSV files.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Also write one contact-trace CSV per run.
    #[arg(long)]
    emit_contacts: bool,

    /// Also write summary.csv and headline.csv aggregates.
    #[arg(long)]
    summary: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> crowdcharge::Result<()> {
    let mut config = match &cli.config {
        Some(path) => SimConfig::from_file(path)?,
        None => SimConfig::default(),
    };
    if let Some(protocol) = cli.protocol {
        config.protocol = protocol;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(runs) = cli.runs {
        config.runs = runs;
    }
    if let Some(iterations) = cli.iterations {
        config.iterations = iterations;
    }
    config.validate()?;

    let options = BatchOptions {
        out_dir: cli.out,
        emit_contacts: cli.emit_contacts,
        write_summary: cli.summary,
    };
    let summary = run_batch(&config, &options)?;

    println!(
        "{} runs of '{}' ({} iterations each) written to {}",
        config.runs,
        config.protocol,
        config.iterations,
        options.out_dir.display()
    );
    if !summary.headline.is_empty() {
        println!("early capacity reduction (mean over runs, iterations 1-3):");
        for row in &summary.headline {
            if row.protocol == Protocol::Balance || row.reduction_vs_balance == 0.0 {
                println!(
                    "  {:<9} {:.4}",
                    row.protocol.name(),
                    row.early_capacity_reduction
                );
            } else {
                println!(
                    "  {:<9} {:.4}  ({:.1}% less than balancing)",
                    row.protocol.name(),
                    row.early_capacity_reduction,
                    row.reduction_vs_balance * 100.0
                );
            }
        }
    }
    Ok(())
}
