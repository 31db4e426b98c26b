//! The driving-policy adaptive safeguard: a policy-adaptive Monte-Carlo tree
//! search over a belief-conditioned generative model of the traffic.

mod key;
mod mcts;

pub use key::{quantize_state, StateKey, VehicleKey, POSITION_STEP, SPEED_STEP};
pub use mcts::{best_action, reward, select_action, Mcts, MctsConfig, Node, SearchModel, Transition};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{intended_lane, BeliefTracker};
use crate::policy::{enumerate_candidates, CandidateConfig, DrivingPolicy};
use crate::safeguard::{rss_threat, RssParams};
use crate::traffic::{advance_traffic, TrafficModel};
use crate::world::{
    Action, LaneChange, LaneShift, ObservedState, SurroundingVehicle, WorldState,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub mcts: MctsConfig,
    /// The search only runs when this RSS condition reports a threat.
    pub rss: RssParams,
    pub candidates: CandidateConfig,
}

/// Visit statistics of one root action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootStat {
    pub action: Action,
    pub visits: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: Action,
    pub policy_action: Action,
    /// The chosen action differs from the driving action.
    pub activated: bool,
    /// Whether the tree search ran (the RSS gate was open).
    pub searched: bool,
    pub root: Vec<RootStat>,
    /// Smallest and largest visited Q value anywhere in the tree.
    pub q_bounds: Option<(f64, f64)>,
}

/// Generative model for the search: the observed scene, with every
/// surrounding vehicle's parameters drawn from its belief once per
/// iteration, advanced by the stochastic traffic model.
pub struct DpasModel<'a> {
    pub observation: &'a ObservedState,
    pub beliefs: &'a BeliefTracker,
    pub traffic: &'a TrafficModel,
    pub policy: &'a DrivingPolicy,
    pub candidates: &'a CandidateConfig,
}

/// World state for a search iteration built from an observation. Lateral
/// motion seen in the observation becomes a lane change towards the lane
/// the vehicle is heading for.
pub fn world_from_observation<R: Rng>(
    obs: &ObservedState,
    beliefs: &BeliefTracker,
    traffic: &TrafficModel,
    rng: &mut R,
) -> WorldState {
    let road = &traffic.road;
    let mut w = WorldState::new(obs.ego);
    w.time = obs.time;
    for v in &obs.vehicles {
        let params = match beliefs.get(v.id) {
            Some(set) => set.sample_hypothesis(rng),
            None => traffic.behavior.intervals.sample(traffic.behavior.delta, rng),
        };
        let mut s = SurroundingVehicle::new(v.id, v.kin, params);
        if v.kin.vy != 0.0 {
            s.lane_change = Some(LaneChange {
                target_lane: intended_lane(&v.kin, road),
                direction: LaneShift::from_sign(v.kin.vy.signum() as i32),
            });
        }
        w.vehicles.push(s);
    }
    w
}

impl SearchModel for DpasModel<'_> {
    type State = WorldState;
    type Action = Action;
    type Key = StateKey;

    fn root<R: Rng>(&self, rng: &mut R) -> WorldState {
        world_from_observation(self.observation, self.beliefs, self.traffic, rng)
    }

    fn key(&self, state: &WorldState, depth: usize) -> StateKey {
        quantize_state(state, depth, &self.traffic.road)
    }

    fn candidates(&self, state: &WorldState) -> Vec<Action> {
        let road = &self.traffic.road;
        let a = self.policy.action(state, road);
        enumerate_candidates(&state.ego, a, road, self.candidates).actions
    }

    fn step<R: Rng>(&self, state: &WorldState, action: Action, rng: &mut R) -> Transition<WorldState> {
        let mut next = state.clone();
        match advance_traffic(&mut next, action, self.traffic, rng) {
            Ok(report) => Transition {
                collided: report.ego_collision.is_some(),
                next,
            },
            // An infeasible action is treated like a crash.
            Err(_) => Transition {
                next,
                collided: true,
            },
        }
    }
}

/// One DPAS decision. Without an RSS threat the driving action is returned
/// directly; otherwise the tree is searched and the final action is
/// `argmax Q + δ` with the adapter bonus on the driving action.
pub fn plan<R: Rng>(
    obs: &ObservedState,
    beliefs: &BeliefTracker,
    policy: &DrivingPolicy,
    traffic: &TrafficModel,
    cfg: &PlannerConfig,
    rng: &mut R,
) -> Decision {
    let road = &traffic.road;
    let policy_action = policy.action(obs, road);
    if !rss_threat(obs, &cfg.rss, road) {
        return Decision {
            action: policy_action,
            policy_action,
            activated: false,
            searched: false,
            root: Vec::new(),
            q_bounds: None,
        };
    }
    let model = DpasModel {
        observation: obs,
        beliefs,
        traffic,
        policy,
        candidates: &cfg.candidates,
    };
    let mut tree = Mcts::new(cfg.mcts);
    let root_key = tree.search(&model, rng);
    let Some(node) = root_key.as_ref().and_then(|k| tree.nodes.get(k)) else {
        return Decision {
            action: policy_action,
            policy_action,
            activated: false,
            searched: true,
            root: Vec::new(),
            q_bounds: None,
        };
    };
    let q_bounds = tree
        .nodes
        .values()
        .flat_map(|n| n.visits.iter().zip(&n.values).filter(|(&k, _)| k > 0).map(|(_, &q)| q))
        .fold(None, |acc: Option<(f64, f64)>, q| match acc {
            None => Some((q, q)),
            Some((lo, hi)) => Some((lo.min(q), hi.max(q))),
        });
    let best = best_action(node, &cfg.mcts);
    let action = node.actions[best];
    Decision {
        action,
        policy_action,
        activated: action != policy_action,
        searched: true,
        root: node
            .actions
            .iter()
            .zip(&node.visits)
            .zip(&node.values)
            .map(|((&action, &visits), &value)| RootStat {
                action,
                visits,
                value,
            })
            .collect(),
        q_bounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::GippsParams;
    use crate::world::{EgoState, ObservedVehicle, RoadConfig, VehicleId, VehicleKinematics};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn obs(front: Option<(f64, f64)>) -> ObservedState {
        let road = RoadConfig::default();
        ObservedState {
            time: 0.0,
            ego: EgoState::in_lane(1, 0.0, 30.0, &road),
            vehicles: front
                .map(|(x, v)| ObservedVehicle {
                    id: VehicleId(1),
                    kin: VehicleKinematics::new(x, 4.0, v),
                })
                .into_iter()
                .collect(),
        }
    }

    fn small_cfg() -> PlannerConfig {
        PlannerConfig {
            mcts: MctsConfig {
                iterations: 100,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn closed_gate_returns_policy_action() {
        let policy = DrivingPolicy::Gipps(GippsParams::default());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = plan(&obs(None), &BeliefTracker::new(), &policy, &TrafficModel::default(), &small_cfg(), &mut rng);
        assert!(!d.searched && !d.activated);
        assert_eq!(d.action, d.policy_action);
    }

    #[test]
    fn open_gate_searches_within_value_bounds() {
        let policy = DrivingPolicy::Gipps(GippsParams::default());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = plan(&obs(Some((20.0, 15.0))), &BeliefTracker::new(), &policy, &TrafficModel::default(), &small_cfg(), &mut rng);
        assert!(d.searched);
        assert_eq!(d.root[0].action, d.policy_action);
        let max = small_cfg().mcts.max_return();
        assert!(d.root.iter().all(|s| s.value >= 0.0 && s.value <= max + 1e-9));
        let (lo, hi) = d.q_bounds.unwrap();
        assert!(lo >= 0.0 && hi <= max + 1e-9);
        assert_eq!(d.activated, d.action != d.policy_action);
    }

    #[test]
    fn decisions_are_reproducible() {
        let policy = DrivingPolicy::Gipps(GippsParams::default());
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            plan(&obs(Some((18.0, 20.0))), &BeliefTracker::new(), &policy, &TrafficModel::default(), &small_cfg(), &mut rng)
        };
        assert_eq!(run(), run());
    }
}
