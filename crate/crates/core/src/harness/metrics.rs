use crate::calibration::{is_estimate, EpisodeLikelihood};

use super::episode::EpisodeRecord;

/// Rounds to the 6 decimals used in every CSV file.
pub fn round6(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.6}").parse().expect("formatted float parses")
    } else {
        x
    }
}

/// One line of `episodes.csv`. Floats carry exactly the printed precision,
/// so metrics computed from parsed rows equal those computed before writing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRow {
    pub round: u64,
    pub seed: u64,
    pub distance_km: f64,
    pub duration_s: f64,
    pub collided: bool,
    pub hard_brakes: u32,
    pub interventions: u32,
    pub lc_policy: u32,
    pub lc_safeguard: u32,
    pub ln_likelihood_ratio: f64,
}

impl EpisodeRow {
    pub fn from_record(r: &EpisodeRecord) -> Self {
        Self {
            round: r.round,
            seed: r.seed,
            distance_km: round6(r.distance / 1000.0),
            duration_s: round6(r.duration),
            collided: r.collided,
            hard_brakes: r.hard_brakes,
            interventions: r.interventions,
            lc_policy: r.lc_policy,
            lc_safeguard: r.lc_safeguard,
            ln_likelihood_ratio: round6(r.ln_likelihood_ratio),
        }
    }

    pub fn likelihood_ratio(&self) -> f64 {
        self.ln_likelihood_ratio.exp()
    }
}

/// `count / distance · 1000`, absent without distance.
pub fn per_1000_km(count: u64, distance_km: f64) -> Option<f64> {
    (distance_km > 0.0).then(|| count as f64 / distance_km * 1000.0)
}

pub fn average_speed_kmh(distance_km: f64, time_h: f64) -> Option<f64> {
    (time_h > 0.0).then(|| distance_km / time_h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateMetrics {
    pub rounds: usize,
    pub collisions: u64,
    pub travel_time_h: f64,
    pub travel_distance_km: f64,
    pub average_speed_kmh: Option<f64>,
    pub hard_brakes: u64,
    pub interventions: u64,
    pub lc_policy: u64,
    pub lc_safeguard: u64,
    /// Per 1000 km.
    pub collision_rate: Option<f64>,
    pub hard_brake_rate: Option<f64>,
    pub intervention_rate: Option<f64>,
    /// Importance-sampled naturalistic collision rate per 10⁶ km.
    pub naturalistic_rate: Option<f64>,
    pub naturalistic_std_error: Option<f64>,
}

/// Totals and distance-normalized rates over a set of episodes.
pub fn compute_metrics(rows: &[EpisodeRow]) -> AggregateMetrics {
    let sum = |f: fn(&EpisodeRow) -> u64| rows.iter().map(f).sum::<u64>();
    let collisions = sum(|r| r.collided as u64);
    let hard_brakes = sum(|r| r.hard_brakes as u64);
    let interventions = sum(|r| r.interventions as u64);
    let distance: f64 = rows.iter().map(|r| r.distance_km).sum();
    let time_h = rows.iter().map(|r| r.duration_s).sum::<f64>() / 3600.0;

    let lik: Vec<EpisodeLikelihood> = rows
        .iter()
        .map(|r| EpisodeLikelihood {
            episode: r.round,
            likelihood: r.likelihood_ratio(),
            collided: r.collided,
        })
        .collect();
    let est = is_estimate(&lik);
    let mean_km = if rows.is_empty() { 0.0 } else { distance / rows.len() as f64 };
    let per_1e6 = |x: f64| (mean_km > 0.0).then(|| x / mean_km * 1e6);

    AggregateMetrics {
        rounds: rows.len(),
        collisions,
        travel_time_h: time_h,
        travel_distance_km: distance,
        average_speed_kmh: average_speed_kmh(distance, time_h),
        hard_brakes,
        interventions,
        lc_policy: sum(|r| r.lc_policy as u64),
        lc_safeguard: sum(|r| r.lc_safeguard as u64),
        collision_rate: per_1000_km(collisions, distance),
        hard_brake_rate: per_1000_km(hard_brakes, distance),
        intervention_rate: per_1000_km(interventions, distance),
        naturalistic_rate: per_1e6(est.rate),
        naturalistic_std_error: per_1e6(est.std_error),
    }
}

/// Running collision rate after each round, per 1000 km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub round: u64,
    pub collisions: u64,
    pub distance_km: f64,
    pub collision_rate: Option<f64>,
}

pub fn convergence(rows: &[EpisodeRow]) -> Vec<ConvergencePoint> {
    let mut collisions = 0;
    let mut distance = 0.0;
    rows.iter()
        .map(|r| {
            collisions += r.collided as u64;
            distance += r.distance_km;
            ConvergencePoint {
                round: r.round,
                collisions,
                distance_km: distance,
                collision_rate: per_1000_km(collisions, distance),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(round: u64, km: f64, s: f64, collided: bool) -> EpisodeRow {
        EpisodeRow {
            round,
            seed: round,
            distance_km: km,
            duration_s: s,
            collided,
            hard_brakes: 2,
            interventions: 3,
            lc_policy: 1,
            lc_safeguard: 0,
            ln_likelihood_ratio: 0.0,
        }
    }

    #[test]
    fn totals_and_rates() {
        let rows = [row(0, 0.9, 30.0, false), row(1, 0.3, 10.0, true)];
        let m = compute_metrics(&rows);
        assert_eq!(m.collisions, 1);
        assert_eq!(m.hard_brakes, 4);
        assert!((m.travel_distance_km - 1.2).abs() < 1e-12);
        assert!((m.collision_rate.unwrap() - 1000.0 / 1.2).abs() < 1e-9);
        assert!((m.average_speed_kmh.unwrap() - 1.2 / (40.0 / 3600.0)).abs() < 1e-9);
        // p = q: one crash in two episodes over 0.6 km on average.
        assert!((m.naturalistic_rate.unwrap() - 0.5 / 0.6 * 1e6).abs() < 1e-6);
    }

    #[test]
    fn zero_distance_has_no_rates() {
        let m = compute_metrics(&[row(0, 0.0, 0.0, true)]);
        assert_eq!(m.collision_rate, None);
        assert_eq!(m.average_speed_kmh, None);
        assert_eq!(m.naturalistic_rate, None);
    }

    #[test]
    fn convergence_is_cumulative() {
        let rows = [row(0, 1.0, 30.0, true), row(1, 1.0, 30.0, false), row(2, 2.0, 30.0, true)];
        let c = convergence(&rows);
        assert_eq!(c[2].collisions, 2);
        assert!((c[1].collision_rate.unwrap() - 500.0).abs() < 1e-9);
        assert!((c[2].collision_rate.unwrap() - 500.0).abs() < 1e-9);
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [0.1234567, 1e-7, 123.4567891, -2.5e-7] {
            assert_eq!(round6(round6(x)), round6(x));
        }
        assert_eq!(round6(f64::NEG_INFINITY), f64::NEG_INFINITY);
    }
}
