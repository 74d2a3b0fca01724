//! Battery state, lossy energy transfer, and the cycle-based aging model.
//!
//! State of charge (SOC) is tracked in percent of a full battery. Aging is
//! driven by charge throughput: every 100% of cumulative charging plus 100%
//! of cumulative discharging completes one battery cycle, and a battery
//! tolerates `c_max` cycles before it has shed `p_r` percent of its original
//! capacity. Individual charging sessions contribute a small slice of that
//! total reduction, weighted differently depending on whether the node was
//! exchanging energy with a peer or just running down its own battery.

use crate::error::{Error, Result};

/// Absolute tolerance for SOC and accumulator comparisons.
pub const SOC_EPSILON: f64 = 1e-9;

/// Whether a node still wants to take part in exchanges.
///
/// Nodes start `Incomplete` and are marked `Complete` by the protocol that
/// fixed them; a completed node is never selected again.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundState {
    Incomplete,
    Complete,
}

/// Capacity-aging parameters shared by the whole population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgingParams {
    /// Total capacity reduction (percent) a battery suffers over its full
    /// cycle life.
    pub p_r: f64,
    /// Number of charge/discharge cycles the battery tolerates.
    pub c_max: u32,
}

/// One node's battery and bookkeeping state.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: usize,
    /// State of charge, percent in [0, 100].
    pub soc: f64,
    /// Location index at the most recent observation.
    pub location: usize,
    /// Full cycles completed so far.
    pub completed_cycles: u32,
    /// Percent progress toward the charging half of the current cycle.
    pub charge_accum: f64,
    /// Percent progress toward the discharging half of the current cycle.
    pub discharge_accum: f64,
    /// Capacity reduction accrued so far, percent of original capacity.
    pub degradation: f64,
    pub round_state: RoundState,
    /// Cumulative SOC percent sent to peers (before transfer loss).
    pub sent_total: f64,
    /// Cumulative SOC percent peers debited for us (before transfer loss).
    pub received_total: f64,
    /// Cumulative SOC percent consumed by the node's own usage.
    pub drained_total: f64,
    /// SOC at simulation start, kept for ledger checks.
    pub initial_soc: f64,
    /// Degradation at simulation start, kept so reduction can be reported
    /// relative to the initial wear.
    pub initial_degradation: f64,
}

impl NodeState {
    /// A fresh node whose accrued degradation matches its completed cycles.
    pub fn new(
        id: usize,
        soc: f64,
        location: usize,
        completed_cycles: u32,
        params: &AgingParams,
    ) -> Self {
        let base = degradation_base(completed_cycles, params);
        NodeState {
            id,
            soc,
            location,
            completed_cycles,
            charge_accum: 0.0,
            discharge_accum: 0.0,
            degradation: base,
            round_state: RoundState::Incomplete,
            sent_total: 0.0,
            received_total: 0.0,
            drained_total: 0.0,
            initial_soc: soc,
            initial_degradation: base,
        }
    }
}

/// What one node's battery did during one iteration.
///
/// A session is exactly one of: a peer charge (`delta_charge > 0`), a peer
/// discharge (`delta_discharge > 0`), or standalone usage (`delta_idle >= 0`
/// with `participated == false`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargingSession {
    pub node_id: usize,
    /// SOC percent gained from a peer (already net of transfer loss).
    pub delta_charge: f64,
    /// SOC percent handed to a peer.
    pub delta_discharge: f64,
    /// SOC percent consumed by the node's own usage.
    pub delta_idle: f64,
    /// True when the node took part in an energy exchange.
    pub participated: bool,
    /// SOC percent when the session began.
    pub soc_at_start: f64,
}

impl ChargingSession {
    pub fn charge(node_id: usize, delta: f64, soc_at_start: f64) -> Self {
        ChargingSession {
            node_id,
            delta_charge: delta,
            delta_discharge: 0.0,
            delta_idle: 0.0,
            participated: true,
            soc_at_start,
        }
    }

    pub fn discharge(node_id: usize, delta: f64, soc_at_start: f64) -> Self {
        ChargingSession {
            node_id,
            delta_charge: 0.0,
            delta_discharge: delta,
            delta_idle: 0.0,
            participated: true,
            soc_at_start,
        }
    }

    pub fn idle(node_id: usize, delta: f64, soc_at_start: f64) -> Self {
        ChargingSession {
            node_id,
            delta_charge: 0.0,
            delta_discharge: 0.0,
            delta_idle: delta,
            participated: false,
            soc_at_start,
        }
    }
}

/// Moves `amount` SOC percent from a sender to a receiver, losing the
/// fraction `beta` in transit.
///
/// Returns the new `(sender_soc, receiver_soc)`. The caller is responsible
/// for sizing `amount`: this function refuses rather than clamps when the
/// sender lacks the charge or the receiver would end above 100%.
pub fn transfer_energy(
    sender_soc: f64,
    receiver_soc: f64,
    amount: f64,
    beta: f64,
) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidLossFactor { beta });
    }
    if amount < 0.0 {
        return Err(Error::NegativeTransfer { amount });
    }
    if amount > sender_soc + SOC_EPSILON {
        return Err(Error::TransferExceedsSender { amount, sender_soc });
    }
    let delivered = (1.0 - beta) * amount;
    if receiver_soc + delivered > 100.0 + SOC_EPSILON {
        return Err(Error::TransferOverflowsReceiver {
            amount,
            receiver_soc,
            beta,
        });
    }
    Ok((sender_soc - amount, receiver_soc + delivered))
}

/// Folds a session's throughput into the node's cycle accumulators.
///
/// Charging percent and discharging percent fill two separate accumulators;
/// when both have reached 100 the node completes a cycle and both carry
/// their overshoot into the next one. Partial progress is never lost.
pub fn update_cycle_count(mut node: NodeState, session: &ChargingSession) -> NodeState {
    debug_assert_eq!(node.id, session.node_id);
    node.charge_accum += session.delta_charge;
    node.discharge_accum += session.delta_discharge + session.delta_idle;
    while node.charge_accum >= 100.0 - SOC_EPSILON && node.discharge_accum >= 100.0 - SOC_EPSILON {
        node.completed_cycles += 1;
        node.charge_accum = (node.charge_accum - 100.0).max(0.0);
        node.discharge_accum = (node.discharge_accum - 100.0).max(0.0);
    }
    node
}

/// Capacity reduction already caused by `completed_cycles` full cycles.
pub fn degradation_base(completed_cycles: u32, params: &AgingParams) -> f64 {
    completed_cycles as f64 * params.p_r / params.c_max as f64
}

/// Capacity reduction from one session of peer-to-peer exchange.
///
/// The session's throughput `(delta_charge + delta_discharge) / 200` is the
/// fraction of a full cycle it represents; the `(1 + completed_cycles)`
/// factor makes the same throughput wear an old battery faster than a new
/// one.
pub fn degradation_wcc(
    delta_charge: f64,
    delta_discharge: f64,
    completed_cycles: u32,
    params: &AgingParams,
) -> f64 {
    let cycle_fraction = (delta_charge + delta_discharge) / 200.0;
    let age_factor = (1.0 + completed_cycles as f64) / params.c_max as f64;
    cycle_fraction * age_factor * (params.p_r / params.c_max as f64)
}

/// Capacity reduction from one session of standalone usage.
///
/// Wear is smallest when the battery sits at 50% and grows linearly toward
/// either extreme; `|1 - soc/50|` is 0 at half charge and 1 at 0% or 100%.
pub fn degradation_nowcc(delta_idle: f64, soc: f64, params: &AgingParams) -> f64 {
    let stress = (1.0 - soc / 50.0).abs();
    (delta_idle / 200.0) * stress * (params.p_r / params.c_max as f64)
}

/// Applies one session to a node: accrues degradation for the session, then
/// updates the cycle accumulators.
///
/// Degradation is a running accumulator. Each session adds either the
/// exchange term or the standalone-usage term, evaluated at the node's
/// pre-session cycle count and the session's starting SOC, and the total
/// saturates at `p_r` (the battery cannot lose more than its rated
/// reduction).
pub fn apply_session(
    mut node: NodeState,
    session: &ChargingSession,
    params: &AgingParams,
) -> NodeState {
    debug_assert_eq!(node.id, session.node_id);
    let increment = if session.participated {
        degradation_wcc(
            session.delta_charge,
            session.delta_discharge,
            node.completed_cycles,
            params,
        )
    } else {
        degradation_nowcc(session.delta_idle, session.soc_at_start, params)
    };
    node.degradation = (node.degradation + increment).min(params.p_r);
    update_cycle_count(node, session)
}
