//! Per-vehicle particle filters over hidden driver parameters.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::traffic::{
    idm_or_brake, mobil_decide, Agent, DriverParams, Lead, LaneDecision, ParamField,
    ParamIntervals, Scene,
};
use crate::world::{
    longitudinal_step, LaneMask, ObservedState, ObservedVehicle, RoadConfig, VehicleId,
    VehicleKinematics, DECISION_STEP,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefConfig {
    pub particles: usize,
    pub intervals: ParamIntervals,
    pub delta: f64,
    /// Likelihood standard deviation of the position error (m).
    pub sigma: f64,
    /// Weight factor for a lane disagreement.
    pub lane_penalty: f64,
    /// Roughening standard deviation as a fraction of each interval width.
    pub roughening: f64,
    /// All weights below this reinitialize the set.
    pub degeneracy: f64,
    pub dt: f64,
    pub substeps: usize,
    pub lane_change_threshold: f64,
    pub max_braking: f64,
}

impl Default for BeliefConfig {
    fn default() -> Self {
        Self {
            particles: 500,
            intervals: ParamIntervals::default(),
            delta: 4.0,
            sigma: 0.5,
            lane_penalty: 0.8,
            roughening: 0.02,
            degeneracy: 1e-300,
            dt: DECISION_STEP,
            substeps: 10,
            lane_change_threshold: 0.1,
            max_braking: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub theta: DriverParams,
    pub weight: f64,
}

/// One-step prediction of a vehicle under a parameter hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub x: f64,
    /// The lane the vehicle is heading for: the target of a lane change in
    /// progress (or just decided), else its current lane.
    pub lane: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    pub vehicle: VehicleId,
    pub particles: Vec<Particle>,
}

/// Lane a vehicle is heading for, read from its lateral velocity.
pub fn intended_lane(kin: &VehicleKinematics, road: &RoadConfig) -> usize {
    let w = road.lane_width;
    let lane = if kin.vy > 0.0 {
        (kin.y / w + 1e-9).ceil()
    } else if kin.vy < 0.0 {
        (kin.y / w - 1e-9).floor()
    } else {
        (kin.y / w).round()
    };
    (lane.max(0.0) as usize).min(road.lane_count - 1)
}

impl ParticleSet {
    /// Independent uniform draws per parameter, equal weights.
    pub fn init<R: Rng>(vehicle: VehicleId, cfg: &BeliefConfig, rng: &mut R) -> Self {
        let w = 1.0 / cfg.particles as f64;
        Self {
            vehicle,
            particles: (0..cfg.particles)
                .map(|_| Particle {
                    theta: cfg.intervals.sample(cfg.delta, rng),
                    weight: w,
                })
                .collect(),
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.particles.iter().map(|p| p.weight).sum()
    }

    /// Multiplies each weight by `exp(−(x_obs − x̂)²/(2σ²))`, and by the lane
    /// penalty when the predicted lane differs from the observed one.
    /// Returns `false` (and reinitializes) when every weight degenerates.
    pub fn weight<R: Rng>(
        &mut self,
        predictions: &[Prediction],
        observed_x: f64,
        observed_lane: usize,
        cfg: &BeliefConfig,
        rng: &mut R,
    ) -> bool {
        for (p, pred) in self.particles.iter_mut().zip(predictions) {
            p.weight *= likelihood(pred, observed_x, observed_lane, cfg);
        }
        if self.particles.iter().all(|p| p.weight < cfg.degeneracy) {
            *self = ParticleSet::init(self.vehicle, cfg, rng);
            return false;
        }
        true
    }

    /// Systematic resampling followed by truncated-Gaussian roughening.
    /// Weights are reset to uniform.
    pub fn resample<R: Rng>(&mut self, cfg: &BeliefConfig, rng: &mut R) {
        let total = self.total_weight();
        if !(total > 0.0) || !total.is_finite() {
            *self = ParticleSet::init(self.vehicle, cfg, rng);
            return;
        }
        let n = cfg.particles;
        let step = total / n as f64;
        let mut u = rng.random::<f64>() * step;
        let mut cum = 0.0;
        let mut i = 0;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            while i + 1 < self.particles.len() && cum + self.particles[i].weight < u {
                cum += self.particles[i].weight;
                i += 1;
            }
            out.push(self.particles[i].theta);
            u += step;
        }
        let w = 1.0 / n as f64;
        self.particles = out
            .into_iter()
            .map(|theta| Particle {
                theta: roughen(theta, cfg, rng),
                weight: w,
            })
            .collect();
    }

    /// One particle drawn with probability proportional to its weight.
    pub fn sample_hypothesis<R: Rng>(&self, rng: &mut R) -> DriverParams {
        let total = self.total_weight();
        let mut u = rng.random::<f64>() * total;
        for p in &self.particles {
            if u < p.weight {
                return p.theta;
            }
            u -= p.weight;
        }
        self.particles
            .iter()
            .rev()
            .find(|p| p.weight > 0.0)
            .unwrap_or(&self.particles[self.particles.len() - 1])
            .theta
    }

    pub fn mean(&self, field: ParamField) -> f64 {
        let total = self.total_weight();
        self.particles
            .iter()
            .map(|p| p.weight * p.theta.get(field))
            .sum::<f64>()
            / total
    }

    pub fn std(&self, field: ParamField) -> f64 {
        let total = self.total_weight();
        let m = self.mean(field);
        (self
            .particles
            .iter()
            .map(|p| p.weight * (p.theta.get(field) - m).powi(2))
            .sum::<f64>()
            / total)
            .sqrt()
    }
}

fn likelihood(pred: &Prediction, observed_x: f64, observed_lane: usize, cfg: &BeliefConfig) -> f64 {
    let e = observed_x - pred.x;
    let mut w = (-e * e / (2.0 * cfg.sigma * cfg.sigma)).exp();
    if pred.lane != observed_lane {
        w *= cfg.lane_penalty;
    }
    w
}

fn roughen<R: Rng>(mut theta: DriverParams, cfg: &BeliefConfig, rng: &mut R) -> DriverParams {
    if cfg.roughening <= 0.0 {
        return theta;
    }
    for field in ParamField::ALL {
        let iv = cfg.intervals.get(field);
        let sd = cfg.roughening * iv.width();
        if sd == 0.0 {
            continue;
        }
        let x = theta.get(field);
        let mut value = None;
        for _ in 0..32 {
            let z: f64 = rng.sample(StandardNormal);
            let y = x + sd * z;
            if iv.contains(y) {
                value = Some(y);
                break;
            }
        }
        theta.set(field, value.unwrap_or_else(|| iv.clamp(x)));
    }
    theta
}

/// Everything a one-step prediction of one vehicle needs that does not
/// depend on the hypothesis.
pub struct PredictionContext {
    scene: Scene,
    index: usize,
    current_lane: usize,
    /// Lane change already in flight: `(target lane, direction sign)`.
    in_flight: Option<(usize, f64)>,
    leader_now: Option<VehicleKinematics>,
    leader_next: Option<VehicleKinematics>,
    /// Leader when the vehicle moves into each neighbor lane.
    leader_if_left: Option<(VehicleKinematics, Option<VehicleKinematics>)>,
    leader_if_right: Option<(VehicleKinematics, Option<VehicleKinematics>)>,
    road: RoadConfig,
}

impl PredictionContext {
    /// `prev` is the observation at the start of the step, `next` the one at
    /// its end (used to move the leader along its observed path).
    pub fn new(prev: &ObservedState, next: &ObservedState, vehicle: VehicleId, road: &RoadConfig) -> Option<Self> {
        let k = prev.vehicles.iter().position(|v| v.id == vehicle)?;
        let mut agents = Vec::with_capacity(prev.vehicles.len() + 1);
        agents.push(Agent {
            kin: prev.ego.kin,
            params: None,
            lanes: prev.ego.lanes(road),
        });
        let lanes_of = |v: &ObservedVehicle| {
            let mask = v.kin.lanes(road);
            if v.kin.vy != 0.0 {
                mask.with(intended_lane(&v.kin, road))
            } else {
                mask
            }
        };
        agents.extend(prev.vehicles.iter().map(|v| Agent {
            kin: v.kin,
            params: None,
            lanes: lanes_of(v),
        }));
        let scene = Scene::new(agents);
        let index = k + 1;
        let me = prev.vehicles[k].kin;
        let current_lane = road.lane_of(me.y);
        let in_flight = (me.vy != 0.0).then(|| (intended_lane(&me, road), me.vy.signum()));

        // Position of an agent at the end of the step, if still observed.
        let next_of = |j: usize| -> Option<VehicleKinematics> {
            if j == 0 {
                Some(next.ego.kin)
            } else {
                let id = prev.vehicles[j - 1].id;
                next.vehicles.iter().find(|v| v.id == id).map(|v| v.kin)
            }
        };
        let leader_in = |mask: LaneMask| {
            scene
                .ahead_in(index, mask)
                .map(|j| (scene.agents[j].kin, next_of(j)))
        };
        let mask = scene.agents[index].lanes;
        let (leader_now, leader_next) = match leader_in(mask) {
            Some((a, b)) => (Some(a), b),
            None => (None, None),
        };
        let leader_if_left = (current_lane + 1 < road.lane_count)
            .then(|| leader_in(mask.with(current_lane + 1)))
            .flatten();
        let leader_if_right = (current_lane > 0)
            .then(|| leader_in(mask.with(current_lane - 1)))
            .flatten();
        Some(Self {
            scene,
            index,
            current_lane,
            in_flight,
            leader_now,
            leader_next,
            leader_if_left,
            leader_if_right,
            road: *road,
        })
    }

    /// Noise-free one-step prediction under `theta`. Every neighbor is
    /// assumed to share `theta` for the lane-change evaluation.
    pub fn predict(&self, theta: &DriverParams, cfg: &BeliefConfig) -> Prediction {
        let me = self.scene.agents[self.index].kin;
        let (lane, leader) = match self.in_flight {
            Some((target, _)) => (target, self.leader_now.map(|l| (l, self.leader_next))),
            None => {
                let lane = self.current_lane;
                let left = (lane + 1 < self.road.lane_count)
                    .then(|| self.scene.evaluate_lane_change(self.index, lane + 1, theta, cfg.max_braking));
                let right = (lane > 0)
                    .then(|| self.scene.evaluate_lane_change(self.index, lane - 1, theta, cfg.max_braking));
                match mobil_decide(left, right, theta.politeness, cfg.lane_change_threshold) {
                    LaneDecision::Stay => (lane, self.leader_now.map(|l| (l, self.leader_next))),
                    LaneDecision::Left => (lane + 1, self.leader_if_left),
                    LaneDecision::Right => (lane - 1, self.leader_if_right),
                }
            }
        };
        let n = cfg.substeps;
        let h = cfg.dt / n as f64;
        let mut x = me.x;
        let mut v = me.vx;
        for s in 0..n {
            let lead = leader.map(|(now, next)| {
                let frac = s as f64 / n as f64;
                let (lx, lv) = match next {
                    Some(nx) => (now.x + (nx.x - now.x) * frac, now.vx + (nx.vx - now.vx) * frac),
                    None => (now.x + now.vx * s as f64 * h, now.vx),
                };
                Lead {
                    gap: lx - x - 0.5 * (now.length + me.length),
                    speed: lv,
                }
            });
            let a = idm_or_brake(v, theta, lead, cfg.max_braking);
            let (dx, v1, _) = longitudinal_step(v, a, h);
            x += dx;
            v = v1;
        }
        Prediction { x, lane }
    }
}

/// Particle filters for every observed vehicle, updated once per decision
/// step from consecutive observations.
#[derive(Debug, Clone, Default)]
pub struct BeliefTracker {
    pub sets: BTreeMap<VehicleId, ParticleSet>,
    prev: Option<ObservedState>,
}

impl BeliefTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Weights and resamples the filters of vehicles seen in both the
    /// previous and the current observation, creates filters for new
    /// vehicles and drops those no longer observed.
    pub fn update<R: Rng>(&mut self, obs: &ObservedState, cfg: &BeliefConfig, road: &RoadConfig, rng: &mut R) {
        let mut sets = BTreeMap::new();
        let mut predictions = Vec::with_capacity(cfg.particles);
        for v in &obs.vehicles {
            let set = match (self.sets.remove(&v.id), &self.prev) {
                (Some(mut set), Some(prev)) => {
                    if let Some(ctx) = PredictionContext::new(prev, obs, v.id, road) {
                        predictions.clear();
                        predictions.extend(set.particles.iter().map(|p| ctx.predict(&p.theta, cfg)));
                        if set.weight(&predictions, v.kin.x, intended_lane(&v.kin, road), cfg, rng) {
                            set.resample(cfg, rng);
                        }
                    }
                    set
                }
                (Some(set), None) => set,
                (None, _) => ParticleSet::init(v.id, cfg, rng),
            };
            sets.insert(v.id, set);
        }
        self.sets = sets;
        self.prev = Some(obs.clone());
    }

    pub fn get(&self, id: VehicleId) -> Option<&ParticleSet> {
        self.sets.get(&id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> BeliefConfig {
        BeliefConfig::default()
    }

    #[test]
    fn degenerate_interval_pins_value() {
        let mut c = cfg();
        c.intervals.time_gap = crate::traffic::Interval::new(0.42, 0.42);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let set = ParticleSet::init(VehicleId(1), &c, &mut rng);
        assert!(set.particles.iter().all(|p| p.theta.time_gap == 0.42));
        assert!(set.particles.iter().all(|p| p.weight == set.particles[0].weight));
        assert_eq!(set.particles.len(), 500);
    }

    #[test]
    fn uniform_marginal_mean() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let set = ParticleSet::init(VehicleId(1), &cfg(), &mut rng);
            assert_abs_diff_eq!(set.mean(ParamField::TimeGap), 0.4, epsilon = 0.01);
        }
    }

    #[test]
    fn likelihood_values() {
        let c = cfg();
        let pred = Prediction { x: 10.0, lane: 1 };
        assert_eq!(likelihood(&pred, 10.0, 1, &c), 1.0);
        assert_abs_diff_eq!(likelihood(&pred, 10.5, 1, &c), 0.6065, epsilon = 1e-4);
        assert_abs_diff_eq!(likelihood(&pred, 10.5, 2, &c), 0.4852, epsilon = 1e-4);
    }

    #[test]
    fn all_weight_on_one_particle() {
        let mut c = cfg();
        c.roughening = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut set = ParticleSet::init(VehicleId(1), &c, &mut rng);
        let chosen = set.particles[17].theta;
        for (i, p) in set.particles.iter_mut().enumerate() {
            p.weight = if i == 17 { 1.0 } else { 0.0 };
        }
        assert_eq!(set.sample_hypothesis(&mut rng), chosen);
        set.resample(&c, &mut rng);
        assert!(set.particles.iter().all(|p| p.theta == chosen));
    }

    #[test]
    fn uniform_weights_keep_every_particle_once() {
        let mut c = cfg();
        c.roughening = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut set = ParticleSet::init(VehicleId(1), &c, &mut rng);
        let before: Vec<f64> = set.particles.iter().map(|p| p.theta.time_gap).collect();
        set.resample(&c, &mut rng);
        let after: Vec<f64> = set.particles.iter().map(|p| p.theta.time_gap).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn three_to_one_draw_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut c = cfg();
        c.particles = 2;
        let mut set = ParticleSet::init(VehicleId(1), &c, &mut rng);
        set.particles[0].weight = 3.0;
        set.particles[1].weight = 1.0;
        let first = set.particles[0].theta;
        let hits = (0..10_000)
            .filter(|_| set.sample_hypothesis(&mut rng) == first)
            .count();
        assert!((hits as f64 / 10_000.0 - 0.75).abs() < 0.02);
    }

    #[test]
    fn degenerate_weights_reinitialize() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut set = ParticleSet::init(VehicleId(1), &c, &mut rng);
        let preds: Vec<Prediction> = (0..500).map(|_| Prediction { x: 0.0, lane: 0 }).collect();
        assert!(!set.weight(&preds, 1e6, 0, &c, &mut rng));
        assert_eq!(set.particles.len(), 500);
        assert!(set.total_weight() > 0.99);
    }

    #[test]
    fn intended_lane_follows_lateral_velocity() {
        let road = RoadConfig::default();
        let mut k = VehicleKinematics::new(0.0, 4.5, 30.0);
        assert_eq!(intended_lane(&k, &road), 1);
        k.vy = 0.89;
        assert_eq!(intended_lane(&k, &road), 2);
        k.vy = -0.89;
        assert_eq!(intended_lane(&k, &road), 1);
        k.y = 3.0;
        assert_eq!(intended_lane(&k, &road), 0);
    }
}
