use crate::belief::BeliefTracker;
use crate::calibration::{episode_ln_likelihood, ProposalModel};
use crate::planner::plan;
use crate::rng::{stream, Stream};
use crate::safeguard::{reachable_set_supervise, rss_supervise};
use crate::traffic::{advance_traffic, maintain_corridor, spawn_traffic, SpawnRecord};
use crate::world::{observe, Action, LaneShift, WorldState};

use super::config::{Emergency, ExperimentConfig, SafeguardKind};

/// One decision step of an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct StepLog {
    pub time: f64,
    pub policy: Action,
    pub executed: Action,
    /// The executed action differs from the driving action.
    pub intervention: bool,
    /// The planner ran a tree search at this step.
    pub searched: bool,
    /// Smallest and largest Q value of the search tree.
    pub q_bounds: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub round: u64,
    pub seed: u64,
    /// Time actually driven (s).
    pub duration: f64,
    /// Distance driven by the ego (m).
    pub distance: f64,
    pub collided: bool,
    pub hard_brakes: u32,
    pub interventions: u32,
    /// Lane changes started by the driving policy.
    pub lc_policy: u32,
    /// Lane changes started by a safeguard override.
    pub lc_safeguard: u32,
    pub ln_likelihood_ratio: f64,
    pub steps: Vec<StepLog>,
    /// The initial scene and the vehicles generated for it.
    pub initial: WorldState,
    pub spawned: Vec<SpawnRecord>,
}

/// Initial traffic of a round. The spawn draws come first on the traffic
/// stream, so the scene can be regenerated from the seed alone.
pub fn initial_scene(cfg: &ExperimentConfig, seed: u64) -> (WorldState, Vec<SpawnRecord>) {
    let mut rng = stream(seed, Stream::Traffic);
    let (world, _, records) = spawn_traffic(&cfg.traffic.road, &cfg.traffic.behavior, &mut rng);
    (world, records)
}

/// Simulates one round: observe, update beliefs (DPAS), compute the driving
/// action, supervise it, advance the world, until a collision or the end of
/// the episode.
pub fn run_episode(cfg: &ExperimentConfig, round: u64, seed: u64) -> EpisodeRecord {
    let road = &cfg.traffic.road;
    let mut traffic_rng = stream(seed, Stream::Traffic);
    let mut sensor_rng = stream(seed, Stream::Sensor);
    let mut belief_rng = stream(seed, Stream::Belief);
    let mut planner_rng = stream(seed, Stream::Planner);

    let (mut world, corridor, mut spawned) = spawn_traffic(road, &cfg.traffic.behavior, &mut traffic_rng);
    let initial = world.clone();
    let initial_count = spawned.len();
    let ln_lr = episode_ln_likelihood(
        &initial,
        &spawned,
        &ProposalModel::from_spawn(&cfg.traffic.behavior),
        &cfg.calibration,
    )
    .expect("spawned values lie in the proposal support");

    let policy = cfg.driving_policy();
    let planner = cfg.planner_config();
    let belief_cfg = cfg.belief_config();
    let mut beliefs = BeliefTracker::new();

    let mut rec = EpisodeRecord {
        round,
        seed,
        duration: 0.0,
        distance: 0.0,
        collided: false,
        hard_brakes: 0,
        interventions: 0,
        lc_policy: 0,
        lc_safeguard: 0,
        ln_likelihood_ratio: ln_lr,
        steps: Vec::with_capacity(cfg.steps()),
        initial,
        spawned: Vec::new(),
    };

    for _ in 0..cfg.steps() {
        let obs = observe(&world, &cfg.sensor, road, &mut sensor_rng);
        let policy_action = policy.action(&obs, road);
        let mut searched = false;
        let mut q_bounds = None;
        let chosen = match cfg.safeguard {
            SafeguardKind::None => policy_action,
            SafeguardKind::Rss => rss_supervise(&obs, policy_action, &cfg.rss, road),
            SafeguardKind::Reachable => match cfg.emergency {
                Emergency::Brake => rss_supervise(&obs, policy_action, &cfg.reachable.rss, road),
                Emergency::BrakeLc => {
                    reachable_set_supervise(&obs, policy_action, &cfg.reachable, &cfg.gipps, road)
                }
            },
            SafeguardKind::Dpas => {
                beliefs.update(&obs, &belief_cfg, road, &mut belief_rng);
                let d = plan(&obs, &beliefs, &policy, &cfg.traffic, &planner, &mut planner_rng);
                searched = d.searched;
                q_bounds = d.q_bounds;
                d.action
            }
        };

        let starts_lane_change = chosen.shift != LaneShift::Keep && world.ego.is_centered();
        let mut executed = chosen;
        let report = match advance_traffic(&mut world, executed, &cfg.traffic, &mut traffic_rng) {
            Ok(r) => r,
            Err(_) => {
                // A lateral move off the road: keep the lane instead.
                executed = Action::straight(chosen.ax);
                advance_traffic(&mut world, executed, &cfg.traffic, &mut traffic_rng)
                    .expect("straight motion is always feasible")
            }
        };

        let intervention = executed != policy_action;
        rec.interventions += intervention as u32;
        rec.hard_brakes += (executed.ax <= cfg.hard_brake) as u32;
        if starts_lane_change && executed == chosen {
            if intervention {
                rec.lc_safeguard += 1;
            } else {
                rec.lc_policy += 1;
            }
        }
        rec.duration += report.elapsed;
        rec.distance += report.ego_distance;
        rec.steps.push(StepLog {
            time: world.time,
            policy: policy_action,
            executed,
            intervention,
            searched,
            q_bounds,
        });
        if report.ego_collision.is_some() {
            rec.collided = true;
            break;
        }
        maintain_corridor(&mut world, &corridor, road, &cfg.traffic.behavior, &mut traffic_rng, &mut spawned);
    }
    spawned.truncate(initial_count);
    rec.spawned = spawned;
    rec
}
