//! Discrete-time simulator of peer-to-peer wireless crowd charging.
//!
//! A population of battery-powered nodes moves between a handful of
//! locations. Whenever two nodes dwell in the same place long enough, they
//! can exchange charge over a lossy wireless link. Each iteration, one of
//! three protocols decides who charges whom:
//!
//! * `balance` steers everyone toward the highest SOC level the lossy
//!   network can sustain,
//! * `pba-wna` and `pba-wona` instead rescue nodes outside a healthy SOC
//!   band, trading some balance quality for less battery wear.
//!
//! Batteries age as they cycle: the simulator tracks per-node charge
//! throughput, completed cycles, and the capacity each node has lost, so
//! the protocols can be compared on battery health as well as on energy
//! balance.
//!
//! Runs are deterministic: a single seeded generator drives every draw in a
//! documented order, and the same seed always yields the same CSV bytes.
//!
//! The `examples/` directory is the front door:
//!
//! * `balance_target` prints the sustainable balance level across loss
//!   factors.
//! * `aging_model` walks one battery through charge cycles and wear.
//! * `mobility_contacts` traces movement and the contacts it produces.
//! * `single_run` runs one seeded simulation and prints its metrics table.
//! * `protocol_comparison` reproduces the three-protocol capacity
//!   comparison.
//! * `batch_summary` aggregates replicate runs into summary statistics.
//!
//! The `crowdcharge` binary wraps the same engine for batch use from the
//! command line.

pub mod battery;
pub mod config;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod mobility;
pub mod output;
pub mod protocol;

pub use battery::{
    apply_session, degradation_base, degradation_nowcc, degradation_wcc, transfer_energy,
    update_cycle_count, AgingParams, ChargingSession, NodeState, RoundState,
};
pub use config::SimConfig;
pub use engine::{
    initialize_population, run_batch, run_initialized, run_simulation, BatchOptions,
    BatchSummary, HeadlineRow, RunResult, SummaryRow,
};
pub use error::{Error, Result};
pub use metrics::{
    accumulate_loss, energy_distribution, snapshot, unhealthy_count, variation_distance,
    MetricsRow,
};
pub use mobility::{
    detect_contacts, step_mobility, Contact, LocationAssignment, LocationLog, MobilityParams,
};
pub use protocol::{
    estimate_balance_target, half_gap_exchange, run_protocol_round, select_pair_balancing,
    select_pair_wna, select_pair_wona, BalanceTarget, ContactIndex, ExchangeDirective,
    PeerRule, Protocol, RoundOutput,
};
