//! Ego driving policies and the planner's candidate actions.

mod candidates;
mod gipps;
mod human;

pub use candidates::{enumerate_candidates, CandidateConfig, CandidateSet, FULL_BRAKE};
pub use gipps::{gipps_accel_in, gipps_action, gipps_safe_speed, GippsParams};
pub use human::{human_like_action, HumanLikeParams};

use serde::{Deserialize, Serialize};

use crate::world::{Action, RoadConfig, TrafficView};

/// The nominal controller of the ego.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DrivingPolicy {
    Gipps(GippsParams),
    HumanLike(HumanLikeParams),
}

impl DrivingPolicy {
    pub fn action<V: TrafficView + ?Sized>(&self, view: &V, road: &RoadConfig) -> Action {
        match self {
            DrivingPolicy::Gipps(p) => gipps_action(view, p, road),
            DrivingPolicy::HumanLike(p) => human_like_action(view, p, road),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DrivingPolicy::Gipps(_) => "gipps",
            DrivingPolicy::HumanLike(_) => "human",
        }
    }
}
