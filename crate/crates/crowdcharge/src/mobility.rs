//! Node movement over discrete locations and contact detection.
//!
//! Time advances in one-minute steps. A node picks a location, stays there
//! for a uniformly random number of minutes, then picks again. Two nodes are
//! in contact while they share a location; a contact only counts once it has
//! lasted `t_min` consecutive minutes.

use rand::Rng;

/// Where a node currently is and when it will move on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocationAssignment {
    pub node_id: usize,
    pub location: usize,
    /// Minute the node arrived here.
    pub arrived_at: u64,
    /// First minute at which the node is due to relocate.
    pub stay_until: u64,
}

/// A maximal co-location interval between two nodes.
///
/// The interval is half-open: the nodes share `location` for every minute in
/// `[start_minute, end_minute)`. `node_a < node_b` always.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contact {
    pub node_a: usize,
    pub node_b: usize,
    pub start_minute: u64,
    pub end_minute: u64,
    pub location: usize,
}

impl Contact {
    pub fn duration_minutes(&self) -> u64 {
        self.end_minute - self.start_minute
    }
}

/// Movement parameters, shared by the whole population.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MobilityParams {
    pub num_locations: usize,
    /// Shortest stay at one location, minutes.
    pub stay_min: u64,
    /// Longest stay at one location, minutes.
    pub stay_max: u64,
    /// When true, a relocating node always moves somewhere new.
    pub exclude_current_location: bool,
}

/// Relocates every node whose stay has expired at minute `now`.
///
/// Nodes are processed in index order and each relocation consumes exactly
/// two draws (location, stay length) from `rng`, so a given seed always
/// produces the same trace.
pub fn step_mobility(
    assignments: &mut [LocationAssignment],
    now: u64,
    params: &MobilityParams,
    rng: &mut impl Rng,
) {
    for a in assignments.iter_mut() {
        if a.stay_until > now {
            continue;
        }
        a.location = if params.exclude_current_location && params.num_locations > 1 {
            let drawn = rng.random_range(0..params.num_locations - 1);
            if drawn >= a.location {
                drawn + 1
            } else {
                drawn
            }
        } else {
            rng.random_range(0..params.num_locations)
        };
        let stay = rng.random_range(params.stay_min..=params.stay_max);
        a.arrived_at = now;
        a.stay_until = now + stay;
    }
}

/// Minute-by-minute location record for one detection window.
#[derive(Debug, Clone)]
pub struct LocationLog {
    pub start_minute: u64,
    /// `per_node[node][minute - start_minute]` is that node's location.
    pub per_node: Vec<Vec<usize>>,
}

impl LocationLog {
    pub fn new(start_minute: u64, num_nodes: usize) -> Self {
        LocationLog {
            start_minute,
            per_node: vec![Vec::new(); num_nodes],
        }
    }

    /// Appends the current minute's locations.
    pub fn record(&mut self, assignments: &[LocationAssignment]) {
        for (node, a) in assignments.iter().enumerate() {
            self.per_node[node].push(a.location);
        }
    }

    pub fn minutes(&self) -> usize {
        self.per_node.first().map_or(0, Vec::len)
    }
}

/// Finds every maximal co-location interval of at least `t_min` minutes in
/// the window covered by `log`.
///
/// A contact is bound to one location: if two nodes happen to relocate to
/// the same new place in the same minute, the old interval closes and a new
/// one begins. Output is sorted by `(node_a, node_b, start_minute)`.
pub fn detect_contacts(log: &LocationLog, t_min: u64) -> Vec<Contact> {
    let minutes = log.minutes();
    let mut contacts = Vec::new();
    for a in 0..log.per_node.len() {
        for b in (a + 1)..log.per_node.len() {
            let (locs_a, locs_b) = (&log.per_node[a], &log.per_node[b]);
            let mut run_start: Option<usize> = None;
            for t in 0..=minutes {
                let here = if t < minutes && locs_a[t] == locs_b[t] {
                    Some(locs_a[t])
                } else {
                    None
                };
                let continues = match (run_start, here) {
                    (Some(s), Some(loc)) => locs_a[s] == loc,
                    _ => false,
                };
                if !continues {
                    if let Some(s) = run_start {
                        if (t - s) as u64 >= t_min {
                            contacts.push(Contact {
                                node_a: a,
                                node_b: b,
                                start_minute: log.start_minute + s as u64,
                                end_minute: log.start_minute + t as u64,
                                location: locs_a[s],
                            });
                        }
                    }
                    run_start = here.map(|_| t);
                }
            }
        }
    }
    contacts
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const PARAMS: MobilityParams = MobilityParams {
        num_locations: 5,
        stay_min: 10,
        stay_max: 30,
        exclude_current_location: false,
    };

    fn assignments(locations: &[usize]) -> Vec<LocationAssignment> {
        locations
            .iter()
            .enumerate()
            .map(|(node_id, &location)| LocationAssignment {
                node_id,
                location,
                arrived_at: 0,
                stay_until: 15,
            })
            .collect()
    }

    fn log_from_rows(rows: &[Vec<usize>]) -> LocationLog {
        // rows[minute][node]
        let num_nodes = rows[0].len();
        let mut log = LocationLog::new(0, num_nodes);
        for row in rows {
            for (node, &loc) in row.iter().enumerate() {
                log.per_node[node].push(loc);
            }
        }
        log
    }

    #[test]
    fn unexpired_stays_are_untouched() {
        let mut a = assignments(&[2, 4]);
        let before = a.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        step_mobility(&mut a, 10, &PARAMS, &mut rng);
        assert_eq!(a, before);
    }

    #[test]
    fn expired_stay_draws_location_then_duration() {
        // Find a seed whose first two draws are location 3 and stay 20, then
        // check step_mobility consumes them in exactly that order.
        let mut seed = None;
        for s in 0..20_000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let loc = rng.random_range(0..PARAMS.num_locations);
            let stay = rng.random_range(PARAMS.stay_min..=PARAMS.stay_max);
            if loc == 3 && stay == 20 {
                seed = Some(s);
                break;
            }
        }
        let seed = seed.expect("some small seed draws (3, 20)");
        let mut a = assignments(&[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        step_mobility(&mut a, 15, &PARAMS, &mut rng);
        assert_eq!(a[0].location, 3);
        assert_eq!(a[0].arrived_at, 15);
        assert_eq!(a[0].stay_until, 35);
    }

    #[test]
    fn relocation_can_exclude_the_current_location() {
        let params = MobilityParams {
            exclude_current_location: true,
            ..PARAMS
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..500 {
            let mut a = assignments(&[trial % params.num_locations]);
            let before = a[0].location;
            step_mobility(&mut a, 15, &params, &mut rng);
            assert_ne!(a[0].location, before);
            assert!(a[0].location < params.num_locations);
        }
    }

    #[test]
    fn stay_lengths_remain_inside_bounds() {
        let mut a = assignments(&[0, 1, 2, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for now in 0..5_000u64 {
            step_mobility(&mut a, now, &PARAMS, &mut rng);
            for assignment in &a {
                let stay = assignment.stay_until - assignment.arrived_at;
                assert!((PARAMS.stay_min..=PARAMS.stay_max).contains(&stay));
                assert!(assignment.stay_until > now);
            }
        }
    }

    #[test]
    fn same_seed_reproduces_the_same_trace() {
        let run = |seed: u64| {
            let mut a = assignments(&[0, 1, 2]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut trace = Vec::new();
            for now in 0..200u64 {
                step_mobility(&mut a, now, &PARAMS, &mut rng);
                trace.push(a.clone());
            }
            trace
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn colocated_window_yields_one_contact() {
        let rows: Vec<Vec<usize>> = (0..25).map(|_| vec![2, 2]).collect();
        let contacts = detect_contacts(&log_from_rows(&rows), 1);
        assert_eq!(
            contacts,
            vec![Contact {
                node_a: 0,
                node_b: 1,
                start_minute: 0,
                end_minute: 25,
                location: 2,
            }]
        );
        assert_eq!(contacts[0].duration_minutes(), 25);
    }

    #[test]
    fn different_locations_never_meet() {
        let rows: Vec<Vec<usize>> = (0..25).map(|_| vec![1, 2]).collect();
        assert!(detect_contacts(&log_from_rows(&rows), 1).is_empty());
    }

    #[test]
    fn short_shared_interval_is_discarded() {
        let mut rows: Vec<Vec<usize>> = (0..3).map(|_| vec![1, 1]).collect();
        rows.extend((0..10).map(|_| vec![1, 0]));
        assert!(detect_contacts(&log_from_rows(&rows), 5).is_empty());
    }

    #[test]
    fn interrupted_colocation_splits_into_two_contacts() {
        let mut rows: Vec<Vec<usize>> = (0..5).map(|_| vec![1, 1]).collect();
        rows.push(vec![1, 2]);
        rows.extend((0..7).map(|_| vec![3, 3]));
        let contacts = detect_contacts(&log_from_rows(&rows), 1);
        assert_eq!(contacts.len(), 2);
        assert_eq!((contacts[0].start_minute, contacts[0].end_minute), (0, 5));
        assert_eq!(contacts[0].location, 1);
        assert_eq!((contacts[1].start_minute, contacts[1].end_minute), (6, 13));
        assert_eq!(contacts[1].location, 3);
    }

    #[test]
    fn simultaneous_joint_move_starts_a_new_contact() {
        let mut rows: Vec<Vec<usize>> = (0..4).map(|_| vec![1, 1]).collect();
        rows.extend((0..6).map(|_| vec![2, 2]));
        let contacts = detect_contacts(&log_from_rows(&rows), 1);
        assert_eq!(contacts.len(), 2);
        assert_eq!(contacts[0].location, 1);
        assert_eq!(contacts[1].location, 2);
        assert_eq!(contacts[0].end_minute, contacts[1].start_minute);
    }

    // Independent oracle: count maximal co-location runs per pair by asking,
    // minute by minute, whether the pair shares a location.
    fn brute_force_count(log: &LocationLog, t_min: u64) -> usize {
        let n = log.per_node.len();
        let minutes = log.minutes();
        let colocated = |a: usize, b: usize, t: usize| {
            log.per_node[a][t] == log.per_node[b][t]
        };
        let mut count = 0;
        for a in 0..n {
            for b in (a + 1)..n {
                let mut t = 0;
                while t < minutes {
                    if colocated(a, b, t) {
                        let loc = log.per_node[a][t];
                        let mut len = 0;
                        while t < minutes && colocated(a, b, t) && log.per_node[a][t] == loc {
                            len += 1;
                            t += 1;
                        }
                        if len as u64 >= t_min {
                            count += 1;
                        }
                    } else {
                        t += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn contact_count_matches_brute_force_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let n = rng.random_range(2..=10);
            let minutes = rng.random_range(1..=90u64);
            let mut a: Vec<LocationAssignment> = (0..n)
                .map(|node_id| LocationAssignment {
                    node_id,
                    location: rng.random_range(0..3),
                    arrived_at: 0,
                    stay_until: rng.random_range(1..=6),
                })
                .collect();
            let params = MobilityParams {
                num_locations: 3,
                stay_min: 1,
                stay_max: 6,
                exclude_current_location: false,
            };
            let mut log = LocationLog::new(0, n);
            for now in 0..minutes {
                step_mobility(&mut a, now, &params, &mut rng);
                log.record(&a);
            }
            for t_min in [1u64, 2, 5] {
                let detected = detect_contacts(&log, t_min);
                assert_eq!(detected.len(), brute_force_count(&log, t_min));
                for c in &detected {
                    assert!(c.node_a < c.node_b);
                    assert!(c.duration_minutes() >= t_min);
                }
            }
        }
    }
}
