use serde::{Deserialize, Serialize};

use crate::traffic::{
    idm_deterministic, lead_of, mobil_decide, Agent, DriverParams, LaneDecision, Scene,
};
use crate::world::{front_vehicle_in, Action, LaneShift, RoadConfig, TrafficView};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HumanLikeParams {
    pub driver: DriverParams,
    /// MOBIL switching threshold (m/s²).
    pub lane_change_threshold: f64,
    /// Braking floor of the IDM output (magnitude, m/s²).
    pub max_braking: f64,
}

impl Default for HumanLikeParams {
    fn default() -> Self {
        Self {
            driver: DriverParams {
                time_gap: 1.5,
                max_accel: 1.4,
                desired_decel: 2.0,
                desired_speed: 27.0,
                jam_distance: 2.0,
                politeness: 0.5,
                delta: 4.0,
            },
            lane_change_threshold: 0.1,
            max_braking: 4.0,
        }
    }
}

/// Noise-free IDM longitudinal control plus MOBIL lane selection. A lane
/// change, once started, is continued in the same direction until the ego is
/// centered in the target lane; neighbors are assumed to drive like the ego.
pub fn human_like_action<V: TrafficView + ?Sized>(
    view: &V,
    p: &HumanLikeParams,
    road: &RoadConfig,
) -> Action {
    let ego = *view.ego();
    let shift = if !ego.is_centered() {
        ego.lane_change
    } else {
        let lane = ego.lane();
        let mut agents = vec![Agent {
            kin: ego.kin,
            params: Some(p.driver),
            lanes: ego.lanes(road),
        }];
        agents.extend(view.others().map(|k| Agent {
            kin: *k,
            params: None,
            lanes: k.lanes(road),
        }));
        let scene = Scene::new(agents);
        let left = (lane + 1 < road.lane_count)
            .then(|| scene.evaluate_lane_change(0, lane + 1, &p.driver, p.max_braking));
        let right = (lane > 0).then(|| scene.evaluate_lane_change(0, lane - 1, &p.driver, p.max_braking));
        match mobil_decide(left, right, p.driver.politeness, p.lane_change_threshold) {
            LaneDecision::Stay => LaneShift::Keep,
            LaneDecision::Left => LaneShift::Left,
            LaneDecision::Right => LaneShift::Right,
        }
    };
    let mut lanes = ego.lanes(road);
    if shift != LaneShift::Keep && ego.is_centered() {
        lanes = lanes.with((ego.lane() as i32 + shift.sixths()) as usize);
    }
    let lead = front_vehicle_in(view, lanes, road).map(|f| lead_of(&ego.kin, f));
    let ax = match idm_deterministic(ego.kin.vx, &p.driver, lead) {
        Ok(a) => a.clamp(-p.max_braking, p.driver.max_accel),
        Err(_) => -p.max_braking,
    };
    Action::new(ax, shift)
}
