// Usage: cargo run --example mobility_contacts
//
// Moves six nodes between three locations for two simulated hours and lists
// every contact that lasted at least five minutes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crowdcharge::{detect_contacts, step_mobility, LocationAssignment, LocationLog, MobilityParams};

fn main() {
    let params = MobilityParams {
        num_locations: 3,
        stay_min: 10,
        stay_max: 30,
        exclude_current_location: false,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut assignments: Vec<LocationAssignment> = (0..6)
        .map(|node_id| LocationAssignment {
            node_id,
            location: node_id % params.num_locations,
            arrived_at: 0,
            stay_until: 10 + (node_id as u64 * 3) % 20,
        })
        .collect();

    let minutes = 120;
    let mut log = LocationLog::new(0, assignments.len());
    for now in 0..minutes {
        step_mobility(&mut assignments, now, &params, &mut rng);
        log.record(&assignments);
    }

    println!("final positions after {minutes} minutes:");
    for a in &assignments {
        println!(
            "  node {} at location {} (arrived minute {}, stays until {})",
            a.node_id, a.location, a.arrived_at, a.stay_until
        );
    }
    println!();

    let contacts = detect_contacts(&log, 5);
    println!("contacts of at least 5 minutes:");
    println!("pair     minutes      location");
    for c in &contacts {
        println!(
            "{}-{}      [{:>3}, {:>3})   {}",
            c.node_a, c.node_b, c.start_minute, c.end_minute, c.location
        );
    }
    println!("{} contacts total", contacts.len());
}
