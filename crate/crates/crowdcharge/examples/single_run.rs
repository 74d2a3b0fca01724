// Usage: cargo run --example single_run [seed]
//
// Runs one seeded simulation with 20 nodes and prints the per-iteration
// metrics table. Rerunning with the same seed reproduces every digit.

use crowdcharge::{run_simulation, MetricsRow, Protocol, SimConfig};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(1);
    let config = SimConfig {
        m: 20,
        iterations: 12,
        protocol: Protocol::PbaWna,
        ..SimConfig::default()
    };
    let result = run_simulation(&config, seed).expect("default config is valid");

    println!(
        "protocol {} | {} nodes | seed {seed} | {} iterations of {} minutes",
        config.protocol, config.m, config.iterations, config.iteration_minutes
    );
    println!("{}", MetricsRow::csv_header());
    for row in &result.rows {
        println!("{}", row.to_csv_line());
    }

    let unhealthy_start = result.rows.first().map_or(0, |r| r.unhealthy_count);
    let unhealthy_end = result.rows.last().map_or(0, |r| r.unhealthy_count);
    println!();
    println!(
        "unhealthy nodes {unhealthy_start} -> {unhealthy_end}; \
         {:.1} SOC percent lost to transfer inefficiency",
        result.rows.last().map_or(0.0, |r| r.energy_loss)
    );
}
