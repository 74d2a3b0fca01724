//! Seeded simulation runs and the multi-run batch harness.
//!
//! One run owns one deterministic generator seeded from a single `u64`.
//! Draws happen in a fixed, documented order: first the population is
//! initialized node by node (SOC, completed cycles, location, stay length),
//! then the minute loop advances mobility in node-index order. Protocol
//! decisions consume no randomness at all, so two runs with the same seed
//! and different protocols see identical initial populations and identical
//! mobility traces.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::battery::{apply_session, NodeState};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::metrics::{accumulate_loss, snapshot, MetricsRow};
use crate::mobility::{detect_contacts, step_mobility, Contact, LocationAssignment, LocationLog};
use crate::output;
use crate::protocol::{run_protocol_round, Protocol};

/// Everything one simulation run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    /// One metrics row per iteration.
    pub rows: Vec<MetricsRow>,
    /// Final node states.
    pub population: Vec<NodeState>,
    /// Total idle usage drain per iteration, kept for conservation checks.
    pub idle_drain: Vec<f64>,
    /// Contacts detected in each iteration's window.
    pub contacts: Vec<Vec<Contact>>,
}

/// Draws the initial population and location assignments.
///
/// Per node, in index order: SOC uniform over `initial_soc_range` (half
/// open), completed cycles uniform over `initial_cycles_range` (inclusive),
/// location uniform over the location set, then the first stay length.
pub fn initialize_population(
    config: &SimConfig,
    rng: &mut impl Rng,
) -> (Vec<NodeState>, Vec<LocationAssignment>) {
    let params = config.aging_params();
    let (soc_lo, soc_hi) = config.initial_soc_range;
    let (cycles_lo, cycles_hi) = config.initial_cycles_range;
    let mut population = Vec::with_capacity(config.m);
    let mut assignments = Vec::with_capacity(config.m);
    for id in 0..config.m {
        let soc = if soc_lo == soc_hi {
            soc_lo
        } else {
            rng.random_range(soc_lo..soc_hi)
        };
        let cycles = rng.random_range(cycles_lo..=cycles_hi);
        let location = rng.random_range(0..config.num_locations);
        let stay = rng.random_range(config.stay_min..=config.stay_max);
        population.push(NodeState::new(id, soc, location, cycles, &params));
        assignments.push(LocationAssignment {
            node_id: id,
            location,
            arrived_at: 0,
            stay_until: stay,
        });
    }
    (population, assignments)
}

/// Runs the iteration loop over an already initialized population.
///
/// Exposed so tests and examples can force exact starting conditions; the
/// config must already be validated. Each iteration simulates
/// `iteration_minutes` minutes of movement, detects the window's contacts,
/// runs one protocol round, applies usage drain to the non-participants,
/// feeds every session through the aging model, and appends a metrics row.
pub fn run_initialized(
    config: &SimConfig,
    seed: u64,
    mut population: Vec<NodeState>,
    mut assignments: Vec<LocationAssignment>,
    rng: &mut impl Rng,
) -> RunResult {
    let params = config.aging_params();
    let mobility = config.mobility_params();
    let mut cumulative_loss = 0.0;
    let mut rows = Vec::with_capacity(config.iterations as usize);
    let mut idle_drain = Vec::with_capacity(config.iterations as usize);
    let mut all_contacts = Vec::with_capacity(config.iterations as usize);

    for iteration in 1..=config.iterations {
        let window_start = (iteration - 1) * config.iteration_minutes;
        let mut log = LocationLog::new(window_start, config.m);
        for offset in 0..config.iteration_minutes {
            step_mobility(&mut assignments, window_start + offset, &mobility, rng);
            log.record(&assignments);
        }
        for (node, assignment) in population.iter_mut().zip(&assignments) {
            node.location = assignment.location;
        }

        let contacts = detect_contacts(&log, config.t_min);
        let round = run_protocol_round(config.protocol, &mut population, &contacts, config);
        cumulative_loss += accumulate_loss(&round.directives, config.beta);

        let mut drained = 0.0;
        for session in &round.sessions {
            let node = &mut population[session.node_id];
            if !session.participated {
                node.soc -= session.delta_idle;
                node.drained_total += session.delta_idle;
                drained += session.delta_idle;
            }
            *node = apply_session(node.clone(), session, &params);
        }

        rows.push(snapshot(
            iteration,
            &population,
            &round.directives,
            &contacts,
            cumulative_loss,
            config,
        ));
        idle_drain.push(drained);
        all_contacts.push(contacts);
    }

    RunResult {
        seed,
        rows,
        population,
        idle_drain,
        contacts: all_contacts,
    }
}

/// Runs one full simulation for one seed.
pub fn run_simulation(config: &SimConfig, seed: u64) -> Result<RunResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (population, assignments) = initialize_population(config, &mut rng);
    Ok(run_initialized(config, seed, population, assignments, &mut rng))
}

/// Metric column names, in the order [`metric_values`] returns them and the
/// order they appear in the per-run CSV.
pub const METRIC_NAMES: [&str; 8] = [
    "total_energy",
    "variation_distance",
    "meetings_used",
    "meetings_available",
    "balanced_count",
    "unhealthy_count",
    "capacity_reduction",
    "energy_loss",
];

/// A row's metrics as one float vector, for aggregation.
pub fn metric_values(row: &MetricsRow) -> [f64; 8] {
    [
        row.total_energy,
        row.variation_distance,
        row.meetings_used as f64,
        row.meetings_available as f64,
        row.balanced_count as f64,
        row.unhealthy_count as f64,
        row.capacity_reduction,
        row.energy_loss,
    ]
}

/// Mean and sample standard deviation of each metric at one iteration,
/// taken across the runs of a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub iteration: u64,
    pub means: [f64; 8],
    pub stds: [f64; 8],
}

/// One protocol's early capacity reduction, against the balancing benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadlineRow {
    pub protocol: Protocol,
    /// Mean over runs of the cumulative capacity reduction at iteration 3
    /// (or at the last iteration when the run is shorter).
    pub early_capacity_reduction: f64,
    /// `1 − this protocol / balancing`; zero for the benchmark itself.
    pub reduction_vs_balance: f64,
}

/// Aggregates returned by [`run_batch`].
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub per_iteration: Vec<SummaryRow>,
    pub headline: Vec<HeadlineRow>,
}

/// Where and what [`run_batch`] writes.
#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub out_dir: PathBuf,
    /// Also write one contact-trace CSV per run.
    pub emit_contacts: bool,
    /// Also write `summary.csv` and `headline.csv`.
    pub write_summary: bool,
}

/// Runs `config.runs` replicates on seeds `seed..seed+runs`, writes one CSV
/// per run, and aggregates.
///
/// The headline comparison reruns the same seed block under the other two
/// protocols, so it is always measured on identical populations and
/// mobility traces.
pub fn run_batch(config: &SimConfig, options: &BatchOptions) -> Result<BatchSummary> {
    config.validate()?;
    config
        .seed
        .checked_add(config.runs as u64 - 1)
        .ok_or_else(|| Error::Config("seed block overflows a 64-bit seed".into()))?;
    std::fs::create_dir_all(&options.out_dir).map_err(|source| Error::Io {
        path: options.out_dir.clone(),
        source,
    })?;

    let results = run_seed_block(config)?;
    for result in &results {
        let path = options.out_dir.join(format!("run_{}.csv", result.seed));
        output::write_run_csv(&path, result)?;
        if options.emit_contacts {
            let path = options.out_dir.join(format!("contacts_{}.csv", result.seed));
            output::write_contacts_csv(&path, result)?;
        }
    }

    let per_iteration = summarize(&results);
    let headline = compute_headline(config, &results)?;
    if options.write_summary {
        output::write_summary_csv(&options.out_dir.join("summary.csv"), &per_iteration)?;
        output::write_headline_csv(&options.out_dir.join("headline.csv"), &headline)?;
    }
    Ok(BatchSummary {
        per_iteration,
        headline,
    })
}

fn run_seed_block(config: &SimConfig) -> Result<Vec<RunResult>> {
    (0..config.runs as u64)
        .into_par_iter()
        .map(|offset| run_simulation(config, config.seed + offset))
        .collect()
}

fn summarize(results: &[RunResult]) -> Vec<SummaryRow> {
    let runs = results.len();
    let iterations = results.first().map_or(0, |r| r.rows.len());
    (0..iterations)
        .map(|i| {
            let samples: Vec<[f64; 8]> =
                results.iter().map(|r| metric_values(&r.rows[i])).collect();
            let mut means = [0.0; 8];
            let mut stds = [0.0; 8];
            for k in 0..8 {
                let mean = samples.iter().map(|s| s[k]).sum::<f64>() / runs as f64;
                means[k] = mean;
                stds[k] = if runs > 1 {
                    let var = samples.iter().map(|s| (s[k] - mean).powi(2)).sum::<f64>()
                        / (runs - 1) as f64;
                    var.sqrt()
                } else {
                    0.0
                };
            }
            SummaryRow {
                iteration: (i + 1) as u64,
                means,
                stds,
            }
        })
        .collect()
}

fn mean_early_capacity_reduction(results: &[RunResult], row_index: usize) -> f64 {
    let total: f64 = results
        .iter()
        .map(|r| r.rows[row_index].capacity_reduction)
        .sum();
    total / results.len() as f64
}

fn compute_headline(config: &SimConfig, own_results: &[RunResult]) -> Result<Vec<HeadlineRow>> {
    if config.iterations == 0 {
        return Ok(Vec::new());
    }
    let row_index = (config.iterations.min(3) - 1) as usize;
    let mut measured = Vec::with_capacity(Protocol::ALL.len());
    for protocol in Protocol::ALL {
        let value = if protocol == config.protocol {
            mean_early_capacity_reduction(own_results, row_index)
        } else {
            let variant = SimConfig {
                protocol,
                ..config.clone()
            };
            mean_early_capacity_reduction(&run_seed_block(&variant)?, row_index)
        };
        measured.push((protocol, value));
    }
    let benchmark = measured
        .iter()
        .find(|(p, _)| *p == Protocol::Balance)
        .expect("Protocol::ALL contains the benchmark")
        .1;
    Ok(measured
        .into_iter()
        .map(|(protocol, value)| HeadlineRow {
            protocol,
            early_capacity_reduction: value,
            reduction_vs_balance: if protocol == Protocol::Balance || benchmark <= 0.0 {
                0.0
            } else {
                1.0 - value / benchmark
            },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_config() -> SimConfig {
        SimConfig {
            m: 6,
            iterations: 4,
            runs: 1,
            ..SimConfig::default()
        }
    }

    #[test]
    fn initialization_respects_the_configured_ranges() {
        let config = SimConfig {
            m: 200,
            initial_soc_range: (10.0, 60.0),
            initial_cycles_range: (5, 9),
            ..SimConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (population, assignments) = initialize_population(&config, &mut rng);
        assert_eq!(population.len(), 200);
        for node in &population {
            assert!(node.soc >= 10.0 && node.soc < 60.0);
            assert!((5..=9).contains(&node.completed_cycles));
            assert!(node.location < config.num_locations);
        }
        for a in &assignments {
            let stay = a.stay_until - a.arrived_at;
            assert!(stay >= config.stay_min && stay <= config.stay_max);
        }
    }

    #[test]
    fn degenerate_soc_range_pins_every_node() {
        let config = SimConfig {
            m: 4,
            initial_soc_range: (50.0, 50.0),
            ..SimConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (population, _) = initialize_population(&config, &mut rng);
        assert!(population.iter().all(|n| n.soc == 50.0));
    }

    #[test]
    fn zero_iterations_produce_no_rows() {
        let config = SimConfig {
            iterations: 0,
            ..small_config()
        };
        let result = run_simulation(&config, 1).unwrap();
        assert!(result.rows.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (fresh, _) = initialize_population(&config, &mut rng);
        assert_eq!(result.population, fresh);
    }

    #[test]
    fn invalid_config_fails_before_simulating() {
        let mut config = small_config();
        config.beta = 1.5;
        assert!(run_simulation(&config, 1).is_err());
    }

    #[test]
    fn metric_vector_order_matches_the_csv_schema() {
        let row = MetricsRow {
            iteration: 1,
            total_energy: 1.0,
            variation_distance: 2.0,
            meetings_used: 3,
            meetings_available: 4,
            balanced_count: 5,
            unhealthy_count: 6,
            capacity_reduction: 7.0,
            energy_loss: 8.0,
        };
        assert_eq!(
            metric_values(&row),
            [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
        );
        let header: Vec<&str> = MetricsRow::csv_header().split(',').skip(1).collect();
        assert_eq!(header, METRIC_NAMES.to_vec());
    }

    #[test]
    fn summary_of_one_run_echoes_that_run() {
        let config = small_config();
        let result = run_simulation(&config, 9).unwrap();
        let summary = summarize(&[result.clone()]);
        assert_eq!(summary.len(), result.rows.len());
        for (row, agg) in result.rows.iter().zip(&summary) {
            assert_eq!(agg.means, metric_values(row));
            assert_eq!(agg.stds, [0.0; 8]);
        }
    }

    #[test]
    fn summary_statistics_match_hand_arithmetic() {
        let config = SimConfig {
            runs: 3,
            ..small_config()
        };
        let results = run_seed_block(&config).unwrap();
        let summary = summarize(&results);
        let k = 0;
        let values: Vec<f64> = results
            .iter()
            .map(|r| metric_values(&r.rows[0])[k])
            .collect();
        let mean = values.iter().sum::<f64>() / 3.0;
        let std =
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 2.0).sqrt();
        assert_abs_diff_eq!(summary[0].means[k], mean, epsilon = 1e-12);
        assert_abs_diff_eq!(summary[0].stds[k], std, epsilon = 1e-12);
    }
}
