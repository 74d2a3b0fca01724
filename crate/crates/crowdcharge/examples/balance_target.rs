// Usage: cargo run --example balance_target
//
// Prints the highest common SOC level a lossy network can balance to, as a
// function of the transfer loss factor.

use crowdcharge::estimate_balance_target;

fn main() {
    println!("loss factor  target (fraction)  target (SOC %)");
    for beta in [0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9] {
        let target = estimate_balance_target(beta).unwrap();
        println!(
            "{beta:>11}  {:>17.6}  {:>14.2}",
            target.e_star, target.e_star_scaled
        );
    }
    println!();
    println!("With no loss the population meets in the middle at 0.5;");
    println!("the more each transfer burns, the lower the level everyone can reach.");
}
