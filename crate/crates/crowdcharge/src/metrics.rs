//! Per-iteration evaluation quantities and their CSV form.

use crate::battery::NodeState;
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::mobility::Contact;
use crate::protocol::{estimate_balance_target, ExchangeDirective};

/// One line of simulation output.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub iteration: u64,
    /// Sum of all SOCs, in SOC percent.
    pub total_energy: f64,
    /// Total variation distance between the SOC distribution and uniform.
    pub variation_distance: f64,
    /// Exchanges actually performed this iteration.
    pub meetings_used: usize,
    /// Contacts that were on offer this iteration.
    pub meetings_available: usize,
    /// Nodes within the balance tolerance of the balance target.
    pub balanced_count: usize,
    /// Nodes outside the healthy SOC band.
    pub unhealthy_count: usize,
    /// Battery capacity lost since the start of the run, summed over nodes.
    pub capacity_reduction: f64,
    /// Energy lost to transfer inefficiency since the start of the run.
    pub energy_loss: f64,
}

impl MetricsRow {
    pub fn csv_header() -> &'static str {
        "iteration,total_energy,variation_distance,meetings_used,meetings_available,\
         balanced_count,unhealthy_count,capacity_reduction,energy_loss"
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.iteration,
            self.total_energy,
            self.variation_distance,
            self.meetings_used,
            self.meetings_available,
            self.balanced_count,
            self.unhealthy_count,
            self.capacity_reduction,
            self.energy_loss
        )
    }
}

/// Normalizes SOCs into a probability vector.
pub fn energy_distribution(socs: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = socs.iter().sum();
    if socs.is_empty() || total <= 0.0 {
        return Err(Error::EmptyDistribution);
    }
    Ok(socs.iter().map(|&s| s / total).collect())
}

/// Total variation distance `Σ |p_i − q_i|` between two distributions.
pub fn variation_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DistributionLengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

/// Nodes strictly outside `[e_min, e_max]`; the boundaries count as healthy.
pub fn unhealthy_count(socs: &[f64], e_min: f64, e_max: f64) -> usize {
    socs.iter().filter(|&&s| s < e_min || s > e_max).count()
}

/// Energy dissipated by a batch of exchanges: `β` of every SOC percent sent.
pub fn accumulate_loss(directives: &[ExchangeDirective], beta: f64) -> f64 {
    directives.iter().map(|d| beta * d.amount).sum()
}

/// Assembles the metrics row for a finished iteration.
///
/// `cumulative_loss` is the run-level loss ledger including this iteration's
/// exchanges. A population drained to zero has no SOC distribution, so its
/// variation distance is reported as 0.
pub fn snapshot(
    iteration: u64,
    population: &[NodeState],
    directives: &[ExchangeDirective],
    contacts: &[Contact],
    cumulative_loss: f64,
    config: &SimConfig,
) -> MetricsRow {
    let socs: Vec<f64> = population.iter().map(|n| n.soc).collect();
    let m = population.len();
    let uniform = vec![1.0 / m as f64; m];
    let distance = match energy_distribution(&socs) {
        Ok(dist) => variation_distance(&dist, &uniform).expect("lengths match by construction"),
        Err(_) => 0.0,
    };
    let target = estimate_balance_target(config.beta).expect("config is validated");
    let balanced = socs
        .iter()
        .filter(|&&s| (s - target.e_star_scaled).abs() <= config.balance_tolerance)
        .count();
    let capacity_reduction = population
        .iter()
        .map(|n| n.degradation - n.initial_degradation)
        .sum();
    MetricsRow {
        iteration,
        total_energy: socs.iter().sum(),
        variation_distance: distance,
        meetings_used: directives.len(),
        meetings_available: contacts.len(),
        balanced_count: balanced,
        unhealthy_count: unhealthy_count(&socs, config.e_min, config.e_max),
        capacity_reduction,
        energy_loss: cumulative_loss,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::AgingParams;
    use approx::assert_abs_diff_eq;

    #[test]
    fn distribution_normalizes() {
        let d = energy_distribution(&[50.0, 50.0]).unwrap();
        assert_eq!(d, vec![0.5, 0.5]);
        let d = energy_distribution(&[10.0, 30.0, 60.0]).unwrap();
        assert_abs_diff_eq!(d[0], 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(d[1], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(d[2], 0.6, epsilon = 1e-12);
        assert_eq!(energy_distribution(&[100.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn distribution_components_sum_to_one() {
        let d = energy_distribution(&[13.7, 2.21, 55.5, 0.04, 91.0]).unwrap();
        assert_abs_diff_eq!(d.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn distribution_rejects_degenerate_populations() {
        assert!(energy_distribution(&[]).is_err());
        assert!(energy_distribution(&[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn variation_distance_examples() {
        let p = vec![0.3, 0.7];
        assert_eq!(variation_distance(&p, &p).unwrap(), 0.0);
        assert_abs_diff_eq!(
            variation_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            variation_distance(&[0.5, 0.3, 0.2], &[0.2, 0.3, 0.5]).unwrap(),
            0.6,
            epsilon = 1e-12
        );
    }

    #[test]
    fn variation_distance_rejects_length_mismatch() {
        assert!(variation_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn variation_distance_vs_uniform_ignores_labels() {
        let socs = [10.0, 40.0, 25.0, 80.0, 5.0];
        let shuffled = [80.0, 5.0, 10.0, 25.0, 40.0];
        let uniform = vec![0.2; 5];
        let a = variation_distance(&energy_distribution(&socs).unwrap(), &uniform).unwrap();
        let b = variation_distance(&energy_distribution(&shuffled).unwrap(), &uniform).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn unhealthy_counts_strict_violations_only() {
        assert_eq!(unhealthy_count(&[5.0, 50.0, 95.0], 20.0, 80.0), 2);
        assert_eq!(unhealthy_count(&[50.0, 50.0], 20.0, 80.0), 0);
        assert_eq!(unhealthy_count(&[20.0, 80.0], 20.0, 80.0), 0);
    }

    #[test]
    fn loss_is_beta_of_each_amount() {
        let contact = Contact {
            node_a: 0,
            node_b: 1,
            start_minute: 0,
            end_minute: 60,
            location: 0,
        };
        let directive = |amount| ExchangeDirective {
            giver_id: 1,
            receiver_id: 0,
            amount,
            contact,
        };
        assert_abs_diff_eq!(accumulate_loss(&[directive(10.0)], 0.2), 2.0, epsilon = 1e-12);
        assert_eq!(accumulate_loss(&[], 0.2), 0.0);
        assert_abs_diff_eq!(
            accumulate_loss(&[directive(45.0), directive(5.0)], 0.2),
            10.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn snapshot_of_the_two_node_exchange() {
        let params = AgingParams {
            p_r: 20.0,
            c_max: 500,
        };
        let mut a = NodeState::new(0, 5.0, 0, 0, &params);
        let mut b = NodeState::new(1, 95.0, 0, 0, &params);
        a.soc = 41.0;
        a.received_total = 45.0;
        b.soc = 50.0;
        b.sent_total = 45.0;
        let contact = Contact {
            node_a: 0,
            node_b: 1,
            start_minute: 0,
            end_minute: 60,
            location: 0,
        };
        let directives = vec![ExchangeDirective {
            giver_id: 1,
            receiver_id: 0,
            amount: 45.0,
            contact,
        }];
        let config = SimConfig::default();
        let loss = accumulate_loss(&directives, config.beta);
        let row = snapshot(1, &[a, b], &directives, &[contact], loss, &config);
        assert_abs_diff_eq!(row.total_energy, 91.0, epsilon = 1e-12);
        assert_abs_diff_eq!(row.energy_loss, 9.0, epsilon = 1e-12);
        assert_eq!(row.unhealthy_count, 0);
        assert_eq!(row.meetings_used, 1);
        assert_eq!(row.meetings_available, 1);
    }

    #[test]
    fn csv_schema_is_pinned() {
        assert_eq!(
            MetricsRow::csv_header(),
            "iteration,total_energy,variation_distance,meetings_used,meetings_available,\
             balanced_count,unhealthy_count,capacity_reduction,energy_loss"
        );
        let row = MetricsRow {
            iteration: 3,
            total_energy: 91.0,
            variation_distance: 0.5,
            meetings_used: 1,
            meetings_available: 2,
            balanced_count: 0,
            unhealthy_count: 4,
            capacity_reduction: 0.25,
            energy_loss: 9.0,
        };
        assert_eq!(row.to_csv_line(), "3,91,0.5,1,2,0,4,0.25,9");
    }
}
