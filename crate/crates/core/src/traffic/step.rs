use rand::Rng;
use rand_distr::StandardNormal;

use super::idm::{idm_acceleration, Lead};
use super::mobil::{mobil_decide, LaneDecision};
use super::scene::{lead_of, Agent, Scene};
use super::SpawnConfig;
use crate::error::Result;
use crate::world::{
    build_trajectory, longitudinal_step, overlapping_pairs, Action, CollisionEvent, LaneChange,
    LaneShift, RoadConfig, VehicleId, WorldState, DECISION_STEP, EGO_ID,
};

/// Everything needed to advance a world by one decision step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficModel {
    pub road: RoadConfig,
    pub behavior: SpawnConfig,
    pub dt: f64,
    /// Physics substeps per decision step; collisions are checked after each.
    pub substeps: usize,
}

impl Default for TrafficModel {
    fn default() -> Self {
        Self {
            road: RoadConfig::default(),
            behavior: SpawnConfig::default(),
            dt: DECISION_STEP,
            substeps: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepReport {
    /// The first collision involving the ego; the step stops there.
    pub ego_collision: Option<CollisionEvent>,
    /// Collisions among surrounding vehicles; both vehicles are removed.
    pub removed: Vec<CollisionEvent>,
    /// Simulated time, shorter than `dt` after an ego collision.
    pub elapsed: f64,
    pub ego_distance: f64,
}

fn agents_of(state: &WorldState, road: &RoadConfig, out: &mut Vec<Agent>) {
    out.clear();
    out.push(Agent {
        kin: state.ego.kin,
        params: None,
        lanes: state.ego.lanes(road),
    });
    out.extend(state.vehicles.iter().map(|v| Agent {
        kin: v.kin,
        params: Some(*v.params()),
        lanes: v.lanes(road),
    }));
}

/// Lane-change decisions at the start of a decision step. Vehicles decide in
/// order and each decision is visible to the ones after it.
fn decide_lane_changes(state: &mut WorldState, scene: &mut Scene, model: &TrafficModel) {
    let road = &model.road;
    let cfg = &model.behavior;
    for k in 0..state.vehicles.len() {
        let v = &state.vehicles[k];
        if v.lane_change.is_some() {
            continue;
        }
        let lane = road.lane_of(v.kin.y);
        let p = *v.params();
        let i = k + 1;
        let left = (lane + 1 < road.lane_count)
            .then(|| scene.evaluate_lane_change(i, lane + 1, &p, cfg.max_braking));
        let right = (lane > 0).then(|| scene.evaluate_lane_change(i, lane - 1, &p, cfg.max_braking));
        let (target, direction) = match mobil_decide(left, right, p.politeness, cfg.lane_change_threshold) {
            LaneDecision::Stay => continue,
            LaneDecision::Left => (lane + 1, LaneShift::Left),
            LaneDecision::Right => (lane - 1, LaneShift::Right),
        };
        let v = &mut state.vehicles[k];
        v.lane_change = Some(LaneChange {
            target_lane: target,
            direction,
        });
        v.kin.vy = direction.gamma().signum() * cfg.lateral_rate;
        scene.agents[i].lanes = scene.agents[i].lanes.with(target);
    }
}

/// Advances the world by one decision step: the ego follows the trajectory
/// of `ego_action`, every surrounding vehicle runs noisy IDM against its
/// current leader (the ego included) and MOBIL at the start of the step.
/// Overlaps are checked after every substep.
pub fn advance_traffic<R: Rng>(
    state: &mut WorldState,
    ego_action: Action,
    model: &TrafficModel,
    rng: &mut R,
) -> Result<StepReport> {
    let road = &model.road;
    let cfg = &model.behavior;
    let ego_end = state.ego.advance(ego_action, model.dt, road)?;
    let trajectory = build_trajectory(&state.ego.kin, ego_action, model.dt, road);
    let t0 = state.time;
    let x0 = state.ego.kin.x;
    let h = model.dt / model.substeps as f64;

    let noise: Vec<f64> = state
        .vehicles
        .iter()
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();

    let mut agents = Vec::with_capacity(state.vehicles.len() + 1);
    agents_of(state, road, &mut agents);
    let mut scene = Scene::new(agents);
    decide_lane_changes(state, &mut scene, model);

    let mut report = StepReport::default();
    let mut noise = noise;
    let mut accel = Vec::with_capacity(state.vehicles.len());
    for s in 1..=model.substeps {
        if s > 1 {
            let mut agents = std::mem::take(&mut scene.agents);
            agents_of(state, road, &mut agents);
            scene.agents = agents;
            scene.reorder();
        }
        accel.clear();
        for (k, v) in state.vehicles.iter().enumerate() {
            let lead: Option<Lead> = scene.leader(k + 1).map(|j| lead_of(&v.kin, &scene.agents[j].kin));
            let a = idm_acceleration(v.kin.vx, v.params(), lead, noise[k], cfg.sigma_vel, model.dt, cfg.max_braking)
                .unwrap_or(-cfg.max_braking);
            accel.push(a);
        }
        for (v, &a) in state.vehicles.iter_mut().zip(&accel) {
            let (dist, v1, _) = longitudinal_step(v.kin.vx, a, h);
            v.kin.x += dist;
            v.kin.vx = v1;
            if let Some(lc) = v.lane_change {
                let target_y = road.lane_center(lc.target_lane);
                let dir = lc.direction.gamma().signum();
                v.kin.y += dir * cfg.lateral_rate * h;
                if (v.kin.y - target_y) * dir >= 0.0 {
                    v.kin.y = target_y;
                    v.kin.vy = 0.0;
                    v.lane_change = None;
                } else {
                    v.kin.vy = dir * cfg.lateral_rate;
                }
            }
        }
        if s == model.substeps {
            state.ego = ego_end;
            state.time = t0 + model.dt;
        } else {
            let p = trajectory.at(s as f64 * h);
            state.ego.kin.x = p.x;
            state.ego.kin.vx = p.vx;
            state.ego.kin.y = p.y;
            state.ego.kin.vy = p.vy;
            state.time = t0 + s as f64 * h;
        }

        let events = overlapping_pairs(state.time, &state.footprints());
        if !events.is_empty() {
            let mut dead: Vec<VehicleId> = Vec::new();
            for e in events {
                if e.involves(EGO_ID) {
                    if report.ego_collision.is_none() {
                        report.ego_collision = Some(e);
                    }
                } else {
                    dead.push(e.first);
                    dead.push(e.second);
                    report.removed.push(e);
                }
            }
            if report.ego_collision.is_some() {
                report.elapsed = state.time - t0;
                report.ego_distance = state.ego.kin.x - x0;
                return Ok(report);
            }
            let mut k = 0;
            state.vehicles.retain(|v| {
                let keep = !dead.contains(&v.id);
                if !keep {
                    noise.remove(k);
                } else {
                    k += 1;
                }
                keep
            });
        }
    }
    report.elapsed = model.dt;
    report.ego_distance = state.ego.kin.x - x0;
    Ok(report)
}
