use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::belief::BeliefConfig;
use crate::calibration::{CalibrationConfig, Component, Density};
use crate::error::{Error, Result};
use crate::planner::PlannerConfig;
use crate::policy::{DrivingPolicy, GippsParams, HumanLikeParams};
use crate::safeguard::{ReachableSetParams, RssParams};
use crate::traffic::{Interval, ParamField, TrafficModel};
use crate::world::SensorConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Gipps,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SafeguardKind {
    None,
    Rss,
    Reachable,
    Dpas,
}

/// What the safeguard may do in an emergency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emergency {
    Brake,
    BrakeLc,
}

/// The six test settings: A uses Gipps with braking only, B Gipps with
/// braking or lane changes, C the human-like policy with braking or lane
/// changes. Setting 1 is the benchmark safeguard, setting 2 DPAS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    A1,
    A2,
    B1,
    B2,
    C1,
    C2,
}

impl Group {
    pub const ALL: [Group; 6] = [Group::A1, Group::A2, Group::B1, Group::B2, Group::C1, Group::C2];

    pub fn policy(self) -> PolicyKind {
        match self {
            Group::C1 | Group::C2 => PolicyKind::Human,
            _ => PolicyKind::Gipps,
        }
    }

    pub fn safeguard(self) -> SafeguardKind {
        match self {
            Group::A1 => SafeguardKind::Rss,
            Group::B1 | Group::C1 => SafeguardKind::Reachable,
            Group::A2 | Group::B2 | Group::C2 => SafeguardKind::Dpas,
        }
    }

    pub fn emergency(self) -> Emergency {
        match self {
            Group::A1 | Group::A2 => Emergency::Brake,
            _ => Emergency::BrakeLc,
        }
    }

    /// The benchmark configuration of the same group.
    pub fn benchmark(self) -> Group {
        match self {
            Group::A1 | Group::A2 => Group::A1,
            Group::B1 | Group::B2 => Group::B1,
            Group::C1 | Group::C2 => Group::C1,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::A1 => "A1",
            Group::A2 => "A2",
            Group::B1 => "B1",
            Group::B2 => "B2",
            Group::C1 => "C1",
            Group::C2 => "C2",
        })
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_uppercase().replace('.', "");
        Group::ALL
            .into_iter()
            .find(|g| g.to_string() == s)
            .ok_or_else(|| Error::config(format!("unknown group `{s}` (expected A1..C2)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub label: String,
    pub policy: PolicyKind,
    pub safeguard: SafeguardKind,
    pub emergency: Emergency,
    pub rounds: usize,
    /// Episode length (s).
    pub duration: f64,
    pub seed: u64,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    pub threads: usize,
    /// Executed accelerations at or below this count as hard braking.
    pub hard_brake: f64,
    pub traffic: TrafficModel,
    pub sensor: SensorConfig,
    pub gipps: GippsParams,
    pub human: HumanLikeParams,
    pub rss: RssParams,
    pub reachable: ReachableSetParams,
    pub planner: PlannerConfig,
    pub belief: BeliefConfig,
    pub calibration: CalibrationConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::for_group(Group::A1)
    }
}

impl ExperimentConfig {
    pub fn for_group(group: Group) -> Self {
        Self {
            label: group.to_string(),
            policy: group.policy(),
            safeguard: group.safeguard(),
            emergency: group.emergency(),
            rounds: 1000,
            duration: 30.0,
            seed: 0,
            threads: 0,
            hard_brake: -2.3,
            traffic: TrafficModel::default(),
            sensor: SensorConfig::default(),
            gipps: GippsParams::default(),
            human: HumanLikeParams::default(),
            rss: RssParams::default(),
            reachable: ReachableSetParams::default(),
            planner: PlannerConfig {
                mcts: crate::planner::MctsConfig {
                    iterations: 300,
                    ..Default::default()
                },
                ..Default::default()
            },
            belief: BeliefConfig::default(),
            calibration: CalibrationConfig::default(),
        }
    }

    /// Switches policy, safeguard and emergency operation to those of a
    /// group, keeping every other setting.
    pub fn set_group(&mut self, group: Group) {
        self.label = group.to_string();
        self.policy = group.policy();
        self.safeguard = group.safeguard();
        self.emergency = group.emergency();
    }

    pub fn driving_policy(&self) -> DrivingPolicy {
        match self.policy {
            PolicyKind::Gipps => DrivingPolicy::Gipps(self.gipps),
            PolicyKind::Human => DrivingPolicy::HumanLike(self.human),
        }
    }

    /// Planner settings with the emergency operation applied.
    pub fn planner_config(&self) -> PlannerConfig {
        let mut p = self.planner;
        p.candidates.brake_only = self.emergency == Emergency::Brake;
        p.candidates.dt = self.traffic.dt;
        p
    }

    /// Particle-filter settings sharing the traffic model's parameter ranges
    /// and timing.
    pub fn belief_config(&self) -> BeliefConfig {
        let b = &self.traffic.behavior;
        BeliefConfig {
            intervals: b.intervals,
            delta: b.delta,
            dt: self.traffic.dt,
            substeps: self.traffic.substeps,
            lane_change_threshold: b.lane_change_threshold,
            max_braking: b.max_braking,
            ..self.belief
        }
    }

    /// Decision steps in a full episode.
    pub fn steps(&self) -> usize {
        (self.duration / self.traffic.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::config("rounds must be at least 1"));
        }
        if !(self.duration > 0.0) {
            return Err(Error::config("duration must be positive"));
        }
        if !(self.traffic.dt > 0.0) || self.traffic.substeps == 0 {
            return Err(Error::config("dt must be positive and substeps at least 1"));
        }
        self.traffic.road.validate()?;
        self.traffic.behavior.validate()?;
        self.calibration.validate()?;
        if self.planner.mcts.iterations == 0 || self.planner.mcts.depth == 0 {
            return Err(Error::config("iterations and depth must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.planner.mcts.discount) {
            return Err(Error::config("discount must lie in [0, 1)"));
        }
        if self.belief.particles == 0 {
            return Err(Error::config("particles must be at least 1"));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let flat: FlatConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let cfg = flat.into_config()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&FlatConfig::from(self)).expect("flat config serializes")
    }
}

/// On-disk form: one flat table of scalar and short-array keys. Every key is
/// optional and defaults to the built-in value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlatConfig {
    pub label: String,
    pub policy: PolicyKind,
    pub safeguard: SafeguardKind,
    pub emergency: Emergency,
    pub rounds: usize,
    pub duration: f64,
    pub seed: u64,
    pub threads: usize,
    pub hard_brake: f64,

    pub lane_count: usize,
    pub lane_width: f64,
    pub speed_limit: f64,
    pub corridor_half_length: f64,
    pub dt: f64,
    pub substeps: usize,
    pub sensor_range: f64,
    pub position_noise: f64,

    pub max_flow: f64,
    pub initial_speed: [f64; 2],
    pub time_gap: [f64; 2],
    pub max_accel: [f64; 2],
    pub desired_decel: [f64; 2],
    pub desired_speed: [f64; 2],
    pub jam_distance: [f64; 2],
    pub politeness: [f64; 2],
    pub idm_delta: f64,
    pub sigma_vel: f64,
    pub lane_change_threshold: f64,
    pub max_braking: f64,
    pub lateral_rate: f64,

    pub gipps_desired_speed: f64,
    pub gipps_comfort_accel: f64,
    pub gipps_comfort_decel: f64,
    pub gipps_ego_max_decel: f64,
    pub gipps_front_max_decel: f64,
    pub gipps_k: f64,

    pub human_time_gap: f64,
    pub human_max_accel: f64,
    pub human_desired_decel: f64,
    pub human_desired_speed: f64,
    pub human_jam_distance: f64,
    pub human_politeness: f64,
    pub human_lane_change_threshold: f64,

    pub rss_ego_max_accel: f64,
    pub rss_ego_brake: f64,
    pub rss_front_brake: f64,
    pub rss_reaction: f64,

    pub reach_rear_max_accel: f64,
    pub reach_lane_change_brake: f64,
    pub reach_hard_brake: f64,
    pub reach_front_brake: f64,
    pub reach_lane_change_time: f64,

    pub discount: f64,
    pub safe_reward: f64,
    pub adapter: f64,
    pub depth: usize,
    pub iterations: usize,
    pub exploration: f64,
    pub candidate_accelerations: [f64; 4],
    pub min_speed: f64,

    pub particles: usize,
    pub likelihood_sigma: f64,
    pub lane_penalty: f64,
    pub roughening: f64,

    pub nat_time_gap: Vec<f64>,
    pub nat_max_accel: Vec<f64>,
    pub nat_desired_decel: Vec<f64>,
    pub nat_desired_speed: Vec<f64>,
    pub nat_jam_distance: Vec<f64>,
    pub nat_politeness: Vec<f64>,
    pub nat_initial_speed: Vec<f64>,
    pub lr_radius: f64,
    pub lr_include_speeds: bool,
}

impl Default for FlatConfig {
    fn default() -> Self {
        FlatConfig::from(&ExperimentConfig::default())
    }
}

fn pair(i: Interval) -> [f64; 2] {
    [i.lo, i.hi]
}

fn interval([lo, hi]: [f64; 2]) -> Interval {
    Interval::new(lo, hi)
}

impl From<&ExperimentConfig> for FlatConfig {
    fn from(c: &ExperimentConfig) -> Self {
        let t = &c.traffic;
        let b = &t.behavior;
        let i = &b.intervals;
        let h = &c.human.driver;
        let m = &c.planner.mcts;
        let nat = &c.calibration.naturalistic.0;
        let nat_of = |f: ParamField| nat.get(Component::Param(f)).to_vec();
        FlatConfig {
            label: c.label.clone(),
            policy: c.policy,
            safeguard: c.safeguard,
            emergency: c.emergency,
            rounds: c.rounds,
            duration: c.duration,
            seed: c.seed,
            threads: c.threads,
            hard_brake: c.hard_brake,
            lane_count: t.road.lane_count,
            lane_width: t.road.lane_width,
            speed_limit: t.road.speed_limit,
            corridor_half_length: t.road.corridor_half_length,
            dt: t.dt,
            substeps: t.substeps,
            sensor_range: c.sensor.range,
            position_noise: c.sensor.position_noise,
            max_flow: b.max_flow,
            initial_speed: pair(b.initial_speed),
            time_gap: pair(i.time_gap),
            max_accel: pair(i.max_accel),
            desired_decel: pair(i.desired_decel),
            desired_speed: pair(i.desired_speed),
            jam_distance: pair(i.jam_distance),
            politeness: pair(i.politeness),
            idm_delta: b.delta,
            sigma_vel: b.sigma_vel,
            lane_change_threshold: b.lane_change_threshold,
            max_braking: b.max_braking,
            lateral_rate: b.lateral_rate,
            gipps_desired_speed: c.gipps.desired_speed,
            gipps_comfort_accel: c.gipps.comfort_accel,
            gipps_comfort_decel: c.gipps.comfort_decel,
            gipps_ego_max_decel: c.gipps.ego_max_decel,
            gipps_front_max_decel: c.gipps.front_max_decel,
            gipps_k: c.gipps.k,
            human_time_gap: h.time_gap,
            human_max_accel: h.max_accel,
            human_desired_decel: h.desired_decel,
            human_desired_speed: h.desired_speed,
            human_jam_distance: h.jam_distance,
            human_politeness: h.politeness,
            human_lane_change_threshold: c.human.lane_change_threshold,
            rss_ego_max_accel: c.rss.ego_max_accel,
            rss_ego_brake: c.rss.ego_brake,
            rss_front_brake: c.rss.front_brake,
            rss_reaction: c.rss.reaction,
            reach_rear_max_accel: c.reachable.rear_max_accel,
            reach_lane_change_brake: c.reachable.lane_change_brake,
            reach_hard_brake: c.reachable.hard_brake,
            reach_front_brake: c.reachable.front_brake,
            reach_lane_change_time: c.reachable.lane_change_time,
            discount: m.discount,
            safe_reward: m.safe_reward,
            adapter: m.adapter,
            depth: m.depth,
            iterations: m.iterations,
            exploration: m.exploration,
            candidate_accelerations: c.planner.candidates.accelerations,
            min_speed: c.planner.candidates.min_speed,
            particles: c.belief.particles,
            likelihood_sigma: c.belief.sigma,
            lane_penalty: c.belief.lane_penalty,
            roughening: c.belief.roughening,
            nat_time_gap: nat_of(ParamField::TimeGap),
            nat_max_accel: nat_of(ParamField::MaxAccel),
            nat_desired_decel: nat_of(ParamField::DesiredDecel),
            nat_desired_speed: nat_of(ParamField::DesiredSpeed),
            nat_jam_distance: nat_of(ParamField::JamDistance),
            nat_politeness: nat_of(ParamField::Politeness),
            nat_initial_speed: nat.initial_speed.to_vec(),
            lr_radius: c.calibration.radius,
            lr_include_speeds: c.calibration.include_speeds,
        }
    }
}

impl FlatConfig {
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let f = self;
        let mut c = ExperimentConfig::default();
        c.label = f.label;
        c.policy = f.policy;
        c.safeguard = f.safeguard;
        c.emergency = f.emergency;
        c.rounds = f.rounds;
        c.duration = f.duration;
        c.seed = f.seed;
        c.threads = f.threads;
        c.hard_brake = f.hard_brake;

        let t = &mut c.traffic;
        t.road.lane_count = f.lane_count;
        t.road.lane_width = f.lane_width;
        t.road.speed_limit = f.speed_limit;
        t.road.corridor_half_length = f.corridor_half_length;
        t.dt = f.dt;
        t.substeps = f.substeps;
        c.sensor.range = f.sensor_range;
        c.sensor.position_noise = f.position_noise;

        let b = &mut t.behavior;
        b.max_flow = f.max_flow;
        b.initial_speed = interval(f.initial_speed);
        b.intervals.time_gap = interval(f.time_gap);
        b.intervals.max_accel = interval(f.max_accel);
        b.intervals.desired_decel = interval(f.desired_decel);
        b.intervals.desired_speed = interval(f.desired_speed);
        b.intervals.jam_distance = interval(f.jam_distance);
        b.intervals.politeness = interval(f.politeness);
        b.delta = f.idm_delta;
        b.sigma_vel = f.sigma_vel;
        b.lane_change_threshold = f.lane_change_threshold;
        b.max_braking = f.max_braking;
        b.lateral_rate = f.lateral_rate;

        c.gipps = GippsParams {
            desired_speed: f.gipps_desired_speed,
            comfort_accel: f.gipps_comfort_accel,
            comfort_decel: f.gipps_comfort_decel,
            ego_max_decel: f.gipps_ego_max_decel,
            front_max_decel: f.gipps_front_max_decel,
            k: f.gipps_k,
            dt: f.dt,
        };
        let h = &mut c.human;
        h.driver.time_gap = f.human_time_gap;
        h.driver.max_accel = f.human_max_accel;
        h.driver.desired_decel = f.human_desired_decel;
        h.driver.desired_speed = f.human_desired_speed;
        h.driver.jam_distance = f.human_jam_distance;
        h.driver.politeness = f.human_politeness;
        h.driver.delta = f.idm_delta;
        h.lane_change_threshold = f.human_lane_change_threshold;
        h.max_braking = f.max_braking;

        c.rss = RssParams {
            ego_max_accel: f.rss_ego_max_accel,
            ego_brake: f.rss_ego_brake,
            front_brake: f.rss_front_brake,
            reaction: f.rss_reaction,
        };
        c.reachable = ReachableSetParams {
            rear_max_accel: f.reach_rear_max_accel,
            lane_change_brake: f.reach_lane_change_brake,
            hard_brake: f.reach_hard_brake,
            front_brake: f.reach_front_brake,
            lane_change_time: f.reach_lane_change_time,
            rss: c.rss,
        };

        let p = &mut c.planner;
        p.rss = c.rss;
        p.mcts.discount = f.discount;
        p.mcts.safe_reward = f.safe_reward;
        p.mcts.adapter = f.adapter;
        p.mcts.depth = f.depth;
        p.mcts.iterations = f.iterations;
        p.mcts.exploration = f.exploration;
        p.candidates.accelerations = f.candidate_accelerations;
        p.candidates.min_speed = f.min_speed;
        p.candidates.dt = f.dt;

        c.belief.particles = f.particles;
        c.belief.sigma = f.likelihood_sigma;
        c.belief.lane_penalty = f.lane_penalty;
        c.belief.roughening = f.roughening;

        let nat = &mut c.calibration.naturalistic;
        let fields = [
            (ParamField::TimeGap, &f.nat_time_gap),
            (ParamField::MaxAccel, &f.nat_max_accel),
            (ParamField::DesiredDecel, &f.nat_desired_decel),
            (ParamField::DesiredSpeed, &f.nat_desired_speed),
            (ParamField::JamDistance, &f.nat_jam_distance),
            (ParamField::Politeness, &f.nat_politeness),
        ];
        for (field, v) in fields {
            *nat.0.get_mut(Component::Param(field)) = Density::from_slice(v)?;
        }
        nat.0.initial_speed = Density::from_slice(&f.nat_initial_speed)?;
        c.calibration.radius = f.lr_radius;
        c.calibration.include_speeds = f.lr_include_speeds;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_follow_the_test_matrix() {
        assert_eq!(Group::A2.safeguard(), SafeguardKind::Dpas);
        assert_eq!(Group::A2.emergency(), Emergency::Brake);
        assert_eq!(Group::C1.policy(), PolicyKind::Human);
        assert_eq!(Group::C1.safeguard(), SafeguardKind::Reachable);
        assert_eq!(Group::B2.benchmark(), Group::B1);
        assert_eq!("b.2".parse::<Group>().unwrap(), Group::B2);
        assert!("D1".parse::<Group>().is_err());
    }

    #[test]
    fn group_a_planner_is_brake_only() {
        assert!(ExperimentConfig::for_group(Group::A2).planner_config().candidates.brake_only);
        assert!(!ExperimentConfig::for_group(Group::B2).planner_config().candidates.brake_only);
    }

    #[test]
    fn toml_round_trip() {
        let mut c = ExperimentConfig::for_group(Group::C2);
        c.rounds = 17;
        c.seed = 99;
        c.calibration.naturalistic.0.time_gap = Density::TruncatedNormal { mean: 1.0, std: 0.3, lo: 0.3, hi: 2.0 };
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let c = ExperimentConfig::from_toml("rounds = 5\niterations = 50\n").unwrap();
        assert_eq!(c.rounds, 5);
        assert_eq!(c.planner.mcts.iterations, 50);
        assert_eq!(c.traffic, TrafficModel::default());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(ExperimentConfig::from_toml("rounds = 0").is_err());
        assert!(ExperimentConfig::from_toml("no_such_key = 1").is_err());
        assert!(ExperimentConfig::from_toml("nat_time_gap = [1.0]").is_err());
    }
}
