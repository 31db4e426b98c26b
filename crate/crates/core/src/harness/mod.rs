//! Episodes, the experiment matrix, metrics and CSV output.

mod config;
mod episode;
mod experiment;
mod io;
mod metrics;

pub use config::{Emergency, ExperimentConfig, FlatConfig, Group, PolicyKind, SafeguardKind};
pub use episode::{initial_scene, run_episode, EpisodeRecord, StepLog};
pub use experiment::{recalibrate, run_experiment, with_likelihoods, ExperimentResult};
pub use io::{
    format_report, read_episodes, write_convergence, write_episodes, write_summary, EPISODE_HEADER,
    SUMMARY_HEADER,
};
pub use metrics::{
    average_speed_kmh, compute_metrics, convergence, per_1000_km, round6, AggregateMetrics,
    ConvergencePoint, EpisodeRow,
};

#[cfg(test)]
mod tests {
    use super::*;

    fn small(group: Group) -> ExperimentConfig {
        let mut c = ExperimentConfig::for_group(group);
        c.rounds = 3;
        c.seed = 5;
        c.threads = 1;
        c.planner.mcts.iterations = 20;
        c
    }

    #[test]
    fn episode_is_deterministic() {
        let c = small(Group::B2);
        assert_eq!(run_episode(&c, 0, 42), run_episode(&c, 0, 42));
    }

    #[test]
    fn full_episode_has_forty_steps() {
        let mut c = small(Group::A1);
        c.traffic.behavior.max_flow = 0.0;
        let r = run_episode(&c, 0, 1);
        assert_eq!(r.steps.len(), 40);
        assert!(!r.collided);
        assert_eq!(r.interventions, 0);
        assert!((r.duration - 30.0).abs() < 1e-9);
    }

    #[test]
    fn groups_share_initial_traffic() {
        let a = run_experiment(&small(Group::A1)).unwrap();
        let b = run_experiment(&small(Group::A2)).unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.seed, y.seed);
            assert_eq!(x.initial, y.initial);
        }
    }

    #[test]
    fn recalibration_matches_recorded_ratios() {
        let r = run_experiment(&small(Group::A1)).unwrap();
        let lik = recalibrate(&r.rows, &r.config).unwrap();
        assert_eq!(with_likelihoods(&r.rows, &lik), r.rows);
    }

    #[test]
    fn zero_rounds_rejected() {
        let mut c = small(Group::A1);
        c.rounds = 0;
        assert!(run_experiment(&c).is_err());
    }
}
