// Usage: cargo run --example batch_summary
//
// Runs a five-replicate batch, writes the CSV outputs under out/batch, and
// prints the per-iteration mean of a few headline metrics.

use crowdcharge::{run_batch, BatchOptions, Protocol, SimConfig};

fn main() {
    let config = SimConfig {
        protocol: Protocol::PbaWona,
        runs: 5,
        iterations: 15,
        ..SimConfig::default()
    };
    let options = BatchOptions {
        out_dir: "out/batch".into(),
        emit_contacts: true,
        write_summary: true,
    };
    let summary = run_batch(&config, &options).expect("batch runs with the default config");

    println!(
        "{} runs (seeds {}..{}) of {}",
        config.runs,
        config.seed,
        config.seed + config.runs as u64 - 1,
        config.protocol
    );
    println!();
    println!("iter  total energy (mean+-std)  unhealthy  exchanges  capacity lost");
    for row in &summary.per_iteration {
        println!(
            "{:>4}  {:>12.1} +- {:>6.1}  {:>9.1}  {:>9.1}  {:>13.4}",
            row.iteration, row.means[0], row.stds[0], row.means[5], row.means[2], row.means[6]
        );
    }
    println!();
    println!("headline comparison (written to out/batch/headline.csv):");
    for h in &summary.headline {
        if h.protocol == Protocol::Balance {
            println!("  {:<9} {:.4}  benchmark", h.protocol.name(), h.early_capacity_reduction);
        } else {
            println!(
                "  {:<9} {:.4}  ({:.1}% less than balancing)",
                h.protocol.name(),
                h.early_capacity_reduction,
                h.reduction_vs_balance * 100.0
            );
        }
    }
    println!();
    println!("files: out/batch/run_<seed>.csv, contacts_<seed>.csv, summary.csv, headline.csv");
}
