// Usage: cargo run --example aging_model
//
// Walks one battery through a year of daily routine: usage takes 25% of
// charge every day and a peer tops the node back up every evening. Cycles
// accumulate from throughput; capacity fades from exchange wear plus the
// penalty for dwelling far from half charge.

use crowdcharge::{apply_session, degradation_base, AgingParams, ChargingSession, NodeState};

fn main() {
    let params = AgingParams {
        p_r: 20.0,
        c_max: 500,
    };

    println!("capacity already lost by a battery with N completed cycles:");
    for cycles in [0, 100, 250, 500] {
        println!(
            "  {cycles:>3} cycles -> {:>4.1}% of original capacity",
            degradation_base(cycles, &params)
        );
    }
    println!();

    let mut node = NodeState::new(0, 80.0, 0, 0, &params);
    println!("day  cycles  charge acc  discharge acc  capacity lost");
    for day in 1..=365u32 {
        let usage = ChargingSession::idle(0, 25.0, node.soc);
        node.soc -= 25.0;
        node = apply_session(node, &usage, &params);

        let top_up = ChargingSession::charge(0, 25.0, node.soc);
        node.soc += 25.0;
        node = apply_session(node, &top_up, &params);

        if day % 73 == 0 {
            println!(
                "{day:>3}  {:>6}  {:>9.1}%  {:>12.1}%  {:>12.4}%",
                node.completed_cycles, node.charge_accum, node.discharge_accum, node.degradation
            );
        }
    }
    println!();
    println!(
        "one year of 25%-deep daily cycling completed {} cycles and cost {:.2}% capacity",
        node.completed_cycles, node.degradation
    );
}
