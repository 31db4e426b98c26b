use std::fs::File;

use dpas_core::harness::{
    compute_metrics, read_episodes, run_experiment, ExperimentConfig, Group, SafeguardKind, EPISODE_HEADER,
};

fn small(group: Group, rounds: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::for_group(group);
    c.rounds = rounds;
    c.seed = 99;
    c.planner.mcts.iterations = 40;
    c
}

#[test]
fn unsupervised_never_fewer_collisions_than_rss() {
    let mut rss = small(Group::C1, 1000);
    rss.safeguard = SafeguardKind::Rss;
    let mut none = rss.clone();
    none.safeguard = SafeguardKind::None;
    let a = run_experiment(&rss).unwrap().metrics;
    let b = run_experiment(&none).unwrap().metrics;
    assert!(b.collisions >= a.collisions, "unsupervised {} < supervised {}", b.collisions, a.collisions);
}

#[test]
fn written_run_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_experiment(&small(Group::C2, 4)).unwrap();
    r.write(dir.path()).unwrap();

    let rows = read_episodes(File::open(dir.path().join("episodes.csv")).unwrap()).unwrap();
    assert_eq!(rows, r.rows);
    assert_eq!(compute_metrics(&rows), r.metrics);

    let text = std::fs::read_to_string(dir.path().join("config.toml")).unwrap();
    let cfg = ExperimentConfig::from_toml(&text).unwrap();
    assert_eq!(cfg.to_toml(), r.config.to_toml());

    let header = std::fs::read_to_string(dir.path().join("episodes.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap(), EPISODE_HEADER.join(","));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
    let convergence = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert_eq!(convergence.lines().count(), 5);
}

#[test]
fn flat_config_overrides() {
    let cfg = ExperimentConfig::from_toml(
        r#"
        safeguard = "dpas"
        emergency = "brake_lc"
        rounds = 12
        seed = 3
        iterations = 50
        lane_count = 4
        time_gap = [0.5, 1.5]
        "#,
    )
    .unwrap();
    assert_eq!(cfg.rounds, 12);
    assert_eq!(cfg.seed, 3);
    assert_eq!(cfg.planner.mcts.iterations, 50);
    assert_eq!(cfg.traffic.road.lane_count, 4);
    assert_eq!(cfg.safeguard, SafeguardKind::Dpas);
    assert_eq!(cfg.traffic.behavior.intervals.time_gap.hi, 1.5);
}

#[test]
fn unknown_keys_rejected() {
    assert!(ExperimentConfig::from_toml("rounds = 3\nbogus = 1\n").is_err());
    assert!(ExperimentConfig::from_toml("time_gap = [2.0, 1.0]\n").is_err());
}
