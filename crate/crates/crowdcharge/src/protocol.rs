//! Peer selection and energy exchange.
//!
//! Three protocols decide who charges whom during an iteration:
//!
//! * [`Protocol::Balance`]: pure balancing. Every node is steered toward a
//!   common target level derived from the transfer loss factor.
//! * [`Protocol::PbaWna`]: aging-aware, network-agnostic. The lowest node
//!   below the healthy band receives from the highest in-contact node above
//!   it.
//! * [`Protocol::PbaWona`]: aging-aware, threshold-oriented. The unhealthy
//!   node nearest its violated threshold is fixed first, paired with an
//!   opposite-zone node per the configured peer rule.
//!
//! All three move energy in half-gap steps capped by how long the pair is
//! actually together, and all ties break toward the lowest node index so a
//! round is a pure function of its inputs.

use std::fmt;
use std::str::FromStr;

use crate::battery::{transfer_energy, ChargingSession, NodeState, RoundState};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::mobility::Contact;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Balance,
    PbaWna,
    PbaWona,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Balance, Protocol::PbaWna, Protocol::PbaWona];

    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Balance => "balance",
            Protocol::PbaWna => "pba-wna",
            Protocol::PbaWona => "pba-wona",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balance" => Ok(Protocol::Balance),
            "pba-wna" => Ok(Protocol::PbaWna),
            "pba-wona" => Ok(Protocol::PbaWona),
            other => Err(Error::Config(format!(
                "unknown protocol '{other}' (expected balance, pba-wna, or pba-wona)"
            ))),
        }
    }
}

/// How the threshold-oriented protocol picks the peer among opposite-zone
/// candidates: nearest to its own threshold, or deepest past it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeerRule {
    Closest,
    Farthest,
}

impl FromStr for PeerRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closest" => Ok(PeerRule::Closest),
            "farthest" => Ok(PeerRule::Farthest),
            other => Err(Error::Config(format!(
                "unknown peer rule '{other}' (expected closest or farthest)"
            ))),
        }
    }
}

/// The common SOC level balancing aims for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceTarget {
    /// Target as a fraction of a full battery.
    pub e_star: f64,
    /// Target in SOC percent.
    pub e_star_scaled: f64,
}

/// Highest balance level a lossy network can sustain, as a function of the
/// loss factor.
///
/// Starting from a uniformly charged population, `(-(1-beta) + sqrt(1-beta))
/// / beta` is where balancing and transfer losses meet; it tends to one half
/// as the loss vanishes, so `beta == 0` returns exactly 0.5.
pub fn estimate_balance_target(beta: f64) -> Result<BalanceTarget> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::InvalidLossFactor { beta });
    }
    let e_star = if beta == 0.0 {
        0.5
    } else {
        (-(1.0 - beta) + (1.0 - beta).sqrt()) / beta
    };
    Ok(BalanceTarget {
        e_star,
        e_star_scaled: e_star * 100.0,
    })
}

/// One energy transfer scheduled by a protocol round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeDirective {
    pub giver_id: usize,
    pub receiver_id: usize,
    /// SOC percent debited from the giver; the receiver is credited this
    /// amount net of transfer loss.
    pub amount: f64,
    /// The contact that made the exchange possible.
    pub contact: Contact,
}

/// Fast lookup of the most useful contact for each node pair.
///
/// When a pair met more than once in a window, the longest contact wins
/// (earliest start on equal length) since it allows the largest transfer.
pub struct ContactIndex {
    n: usize,
    best: Vec<Option<Contact>>,
}

impl ContactIndex {
    pub fn build(n: usize, contacts: &[Contact]) -> Self {
        let mut best: Vec<Option<Contact>> = vec![None; n * n];
        for c in contacts {
            let (a, b) = (c.node_a.min(c.node_b), c.node_a.max(c.node_b));
            let slot = &mut best[a * n + b];
            let replace = match slot {
                None => true,
                Some(cur) => {
                    let (d_new, d_cur) = (c.duration_minutes(), cur.duration_minutes());
                    d_new > d_cur || (d_new == d_cur && c.start_minute < cur.start_minute)
                }
            };
            if replace {
                *slot = Some(*c);
            }
        }
        ContactIndex { n, best }
    }

    pub fn get(&self, a: usize, b: usize) -> Option<&Contact> {
        let (a, b) = (a.min(b), a.max(b));
        self.best[a * self.n + b].as_ref()
    }

    pub fn has(&self, a: usize, b: usize) -> bool {
        self.get(a, b).is_some()
    }
}

/// Lowest-id argmin over `ids` of a float key.
fn argmin_by(ids: impl Iterator<Item = usize>, key: impl Fn(usize) -> f64) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for id in ids {
        let k = key(id);
        let better = match best {
            None => true,
            Some((bk, bid)) => k < bk || (k == bk && id < bid),
        };
        if better {
            best = Some((k, id));
        }
    }
    best.map(|(_, id)| id)
}

/// Lowest-id argmax over `ids` of a float key.
fn argmax_by(ids: impl Iterator<Item = usize>, key: impl Fn(usize) -> f64) -> Option<usize> {
    argmin_by(ids, |id| -key(id))
}

fn balancing_anchor(
    population: &[NodeState],
    candidates: &[usize],
    target: &BalanceTarget,
) -> Option<usize> {
    argmin_by(candidates.iter().copied(), |id| {
        (target.e_star_scaled - population[id].soc).abs()
    })
}

fn balancing_peer(
    population: &[NodeState],
    candidates: &[usize],
    contacts: &ContactIndex,
    u_i: usize,
    target: &BalanceTarget,
) -> Option<usize> {
    let tau = target.e_star_scaled;
    let want_lower = population[u_i].soc > tau;
    let opposite = candidates.iter().copied().filter(|&j| {
        j != u_i
            && contacts.has(u_i, j)
            && if want_lower {
                population[j].soc < tau
            } else {
                population[j].soc > tau
            }
    });
    argmin_by(opposite, |id| (tau - population[id].soc).abs())
}

fn wna_anchor(population: &[NodeState], candidates: &[usize], e_min: f64) -> Option<usize> {
    argmin_by(
        candidates
            .iter()
            .copied()
            .filter(|&id| population[id].soc < e_min),
        |id| population[id].soc,
    )
}

fn wna_peer(
    population: &[NodeState],
    candidates: &[usize],
    contacts: &ContactIndex,
    u_i: usize,
    e_max: f64,
) -> Option<usize> {
    argmax_by(
        candidates
            .iter()
            .copied()
            .filter(|&j| j != u_i && population[j].soc > e_max && contacts.has(u_i, j)),
        |id| population[id].soc,
    )
}

/// Distance past the violated threshold, or `None` for a healthy SOC.
fn violation_distance(soc: f64, e_min: f64, e_max: f64) -> Option<f64> {
    if soc < e_min {
        Some(e_min - soc)
    } else if soc > e_max {
        Some(soc - e_max)
    } else {
        None
    }
}

fn wona_anchor(
    population: &[NodeState],
    candidates: &[usize],
    e_min: f64,
    e_max: f64,
) -> Option<usize> {
    argmin_by(
        candidates
            .iter()
            .copied()
            .filter(|&id| violation_distance(population[id].soc, e_min, e_max).is_some()),
        |id| violation_distance(population[id].soc, e_min, e_max).unwrap(),
    )
}

fn wona_peer(
    population: &[NodeState],
    candidates: &[usize],
    contacts: &ContactIndex,
    u_i: usize,
    e_min: f64,
    e_max: f64,
    rule: PeerRule,
) -> Option<usize> {
    let anchor_is_low = population[u_i].soc < e_min;
    let zone = candidates.iter().copied().filter(|&j| {
        if j == u_i || !contacts.has(u_i, j) {
            return false;
        }
        if anchor_is_low {
            population[j].soc > e_max
        } else {
            population[j].soc < e_min
        }
    });
    let distance = |id: usize| violation_distance(population[id].soc, e_min, e_max).unwrap();
    match rule {
        PeerRule::Closest => argmin_by(zone, distance),
        PeerRule::Farthest => argmax_by(zone, distance),
    }
}

/// Balancing pair: the node nearest the target, matched with its
/// nearest-to-target contact on the opposite side.
///
/// Returns `None` when there are no candidates or when the chosen node has
/// no opposite-side peer in contact.
pub fn select_pair_balancing(
    population: &[NodeState],
    candidates: &[usize],
    contacts: &ContactIndex,
    target: &BalanceTarget,
) -> Option<(usize, usize)> {
    let u_i = balancing_anchor(population, candidates, target)?;
    let u_j = balancing_peer(population, candidates, contacts, u_i, target)?;
    Some((u_i, u_j))
}

/// Aging-aware pair, network-agnostic flavor: the emptiest node below
/// `e_min` receives from the fullest in-contact node above `e_max`.
pub fn select_pair_wna(
    population: &[NodeState],
    candidates: &[usize],
    contacts: &ContactIndex,
    e_min: f64,
    e_max: f64,
) -> Option<(usize, usize)> {
    let u_i = wna_anchor(population, candidates, e_min)?;
    let u_j = wna_peer(population, candidates, contacts, u_i, e_max)?;
    Some((u_i, u_j))
}

/// Aging-aware pair, threshold-oriented flavor: the unhealthy node nearest
/// its violated threshold, matched against the opposite unhealthy zone.
pub fn select_pair_wona(
    population: &[NodeState],
    candidates: &[usize],
    contacts: &ContactIndex,
    e_min: f64,
    e_max: f64,
    rule: PeerRule,
) -> Option<(usize, usize)> {
    let u_i = wona_anchor(population, candidates, e_min, e_max)?;
    let u_j = wona_peer(population, candidates, contacts, u_i, e_min, e_max, rule)?;
    Some((u_i, u_j))
}

/// Result of one half-gap exchange between two nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeOutcome {
    pub directive: ExchangeDirective,
    pub giver_soc_after: f64,
    pub receiver_soc_after: f64,
}

/// Transfers half the SOC gap from the fuller node to the emptier one,
/// capped by `alpha` SOC percent per minute of contact.
///
/// Returns `None` when the gap is not positive. The half-gap amount can
/// never overdraw the giver or overfill the receiver, so the underlying
/// transfer always succeeds.
pub fn half_gap_exchange(
    first: (usize, f64),
    second: (usize, f64),
    beta: f64,
    alpha: f64,
    contact: &Contact,
) -> Option<ExchangeOutcome> {
    let ((giver_id, giver_soc), (receiver_id, receiver_soc)) = if first.1 >= second.1 {
        (first, second)
    } else {
        (second, first)
    };
    let gap = giver_soc - receiver_soc;
    if gap <= 0.0 {
        return None;
    }
    let cap = alpha * contact.duration_minutes() as f64;
    let amount = (gap / 2.0).min(cap);
    if amount <= 0.0 {
        return None;
    }
    let (giver_soc_after, receiver_soc_after) =
        transfer_energy(giver_soc, receiver_soc, amount, beta)
            .expect("half-gap transfers stay within SOC bounds");
    Some(ExchangeOutcome {
        directive: ExchangeDirective {
            giver_id,
            receiver_id,
            amount,
            contact: *contact,
        },
        giver_soc_after,
        receiver_soc_after,
    })
}

/// Everything one protocol round produced: the transfers that happened and
/// one battery session per node (exchange sessions for participants, usage
/// sessions for everyone else).
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutput {
    pub directives: Vec<ExchangeDirective>,
    pub sessions: Vec<ChargingSession>,
}

/// Runs one protocol round over the contacts of the current iteration.
///
/// Pairs are formed one after another among nodes that are still
/// `Incomplete` and not yet part of this round; a node whose best selection
/// finds no peer is set aside (it cannot appear in any later pair of the
/// round either, because contacts and zone membership are symmetric). Each
/// exchange updates SOCs and send/receive ledgers in place and flips the
/// participants' `round_state` according to the protocol's completion rule.
/// Usage drain itself is left to the caller; the returned idle sessions
/// carry the per-node drain amount, capped by the SOC actually available.
pub fn run_protocol_round(
    protocol: Protocol,
    population: &mut [NodeState],
    contacts: &[Contact],
    config: &SimConfig,
) -> RoundOutput {
    debug_assert!(population.iter().enumerate().all(|(i, n)| n.id == i));
    let index = ContactIndex::build(population.len(), contacts);
    let target = estimate_balance_target(config.beta).expect("config is validated");
    let mut eligible: Vec<usize> = population
        .iter()
        .filter(|n| n.round_state == RoundState::Incomplete)
        .map(|n| n.id)
        .collect();
    let mut participated = vec![false; population.len()];
    let mut directives = Vec::new();
    let mut sessions = Vec::new();

    loop {
        let anchor = match protocol {
            Protocol::Balance => balancing_anchor(population, &eligible, &target),
            Protocol::PbaWna => wna_anchor(population, &eligible, config.e_min),
            Protocol::PbaWona => {
                wona_anchor(population, &eligible, config.e_min, config.e_max)
            }
        };
        let Some(u_i) = anchor else { break };
        let peer = match protocol {
            Protocol::Balance => balancing_peer(population, &eligible, &index, u_i, &target),
            Protocol::PbaWna => wna_peer(population, &eligible, &index, u_i, config.e_max),
            Protocol::PbaWona => wona_peer(
                population,
                &eligible,
                &index,
                u_i,
                config.e_min,
                config.e_max,
                config.alg2_peer_rule,
            ),
        };
        let Some(u_j) = peer else {
            eligible.retain(|&id| id != u_i);
            continue;
        };
        let contact = *index.get(u_i, u_j).expect("selected peers share a contact");
        let outcome = half_gap_exchange(
            (u_i, population[u_i].soc),
            (u_j, population[u_j].soc),
            config.beta,
            config.alpha,
            &contact,
        );
        if let Some(out) = outcome {
            let giver = out.directive.giver_id;
            let receiver = out.directive.receiver_id;
            let delivered = (1.0 - config.beta) * out.directive.amount;
            sessions.push(ChargingSession::discharge(
                giver,
                out.directive.amount,
                population[giver].soc,
            ));
            sessions.push(ChargingSession::charge(
                receiver,
                delivered,
                population[receiver].soc,
            ));
            population[giver].soc = out.giver_soc_after;
            population[giver].sent_total += out.directive.amount;
            population[receiver].soc = out.receiver_soc_after;
            population[receiver].received_total += out.directive.amount;
            apply_completion_rule(protocol, population, giver, receiver, config, &target);
            participated[giver] = true;
            participated[receiver] = true;
            directives.push(out.directive);
        }
        eligible.retain(|&id| id != u_i && id != u_j);
    }

    for node in population.iter() {
        if !participated[node.id] {
            let drain = config.usage_drain.min(node.soc).max(0.0);
            sessions.push(ChargingSession::idle(node.id, drain, node.soc));
        }
    }

    RoundOutput {
        directives,
        sessions,
    }
}

fn apply_completion_rule(
    protocol: Protocol,
    population: &mut [NodeState],
    giver: usize,
    receiver: usize,
    config: &SimConfig,
    target: &BalanceTarget,
) {
    match protocol {
        Protocol::Balance => {
            for id in [giver, receiver] {
                if (population[id].soc - target.e_star_scaled).abs() <= config.balance_tolerance {
                    population[id].round_state = RoundState::Complete;
                }
            }
        }
        Protocol::PbaWna => {
            if population[receiver].soc > config.e_min {
                population[receiver].round_state = RoundState::Complete;
            }
            if population[giver].soc < config.e_max {
                population[giver].round_state = RoundState::Complete;
            }
        }
        Protocol::PbaWona => {
            for id in [giver, receiver] {
                let soc = population[id].soc;
                if soc > config.e_min && soc < config.e_max {
                    population[id].round_state = RoundState::Complete;
                }
            }
        }
    }
}
