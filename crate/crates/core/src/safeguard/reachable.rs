use serde::{Deserialize, Serialize};

use super::rss::{rss_threat, RssParams};
use super::tbc::time_before_collision;
use crate::policy::{gipps_accel_in, GippsParams};
use crate::world::{
    front_vehicle_in, rear_vehicle_in, Action, LaneMask, LaneShift, RoadConfig, TrafficView,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReachableSetParams {
    /// Worst-case acceleration of a rear vehicle in the target lane (m/s²).
    pub rear_max_accel: f64,
    /// Ego braking magnitude during a lane change (m/s²).
    pub lane_change_brake: f64,
    /// Ego hard-braking magnitude when staying (m/s²).
    pub hard_brake: f64,
    /// Front-vehicle braking magnitude assumed when scoring a lane (m/s²).
    pub front_brake: f64,
    /// Lane-change duration (s).
    pub lane_change_time: f64,
    pub rss: RssParams,
}

impl Default for ReachableSetParams {
    fn default() -> Self {
        Self {
            rear_max_accel: 2.0,
            lane_change_brake: 1.5,
            hard_brake: 4.0,
            front_brake: 4.0,
            lane_change_time: 4.0 / 0.89,
            rss: RssParams::default(),
        }
    }
}

/// Worst-case time before collision with the front vehicle of `lane`, or
/// `None` when a neighbor lane's rear vehicle could catch the ego during
/// the lane change.
pub fn lane_score<V: TrafficView + ?Sized>(
    view: &V,
    lane: usize,
    current: bool,
    p: &ReachableSetParams,
    road: &RoadConfig,
) -> Option<f64> {
    let ego = view.ego().kin;
    let mask = LaneMask::single(lane);
    if !current {
        if let Some(rear) = rear_vehicle_in(view, mask, road) {
            let t = p.lane_change_time;
            let need = (rear.vx - ego.vx) * t + t * t * (p.rear_max_accel + p.lane_change_brake) / 2.0;
            if rear.gap_to(&ego) < need {
                return None;
            }
        }
    }
    Some(match front_vehicle_in(view, mask, road) {
        None => f64::INFINITY,
        Some(f) => time_before_collision(ego.gap_to(f), ego.vx, f.vx, p.lane_change_brake, p.front_brake),
    })
}

/// Brake-or-steer supervision. Without an RSS threat the driving action
/// passes through. Otherwise the lane with the longest worst-case time
/// before collision wins (ties: current, left, right): the current lane
/// means hard braking, a neighbor lane means steering towards it with the
/// more cautious Gipps acceleration of the two lanes, but no harder than
/// the lane-change braking.
pub fn reachable_set_supervise<V: TrafficView + ?Sized>(
    view: &V,
    policy_action: Action,
    p: &ReachableSetParams,
    gipps: &GippsParams,
    road: &RoadConfig,
) -> Action {
    if !rss_threat(view, &p.rss, road) {
        return policy_action;
    }
    let ego = view.ego();
    let lane = ego.lane();
    let w_c = lane_score(view, lane, true, p, road).unwrap_or(-1.0);
    let w_l = (lane + 1 < road.lane_count)
        .then(|| lane_score(view, lane + 1, false, p, road))
        .flatten()
        .unwrap_or(-1.0);
    let w_r = (lane > 0)
        .then(|| lane_score(view, lane - 1, false, p, road))
        .flatten()
        .unwrap_or(-1.0);

    let (target, shift) = if w_c >= w_l && w_c >= w_r {
        return Action::new(-p.hard_brake, LaneShift::Keep);
    } else if w_l >= w_r {
        (lane + 1, LaneShift::Left)
    } else {
        (lane - 1, LaneShift::Right)
    };
    let a_target = gipps_accel_in(view, LaneMask::single(target), gipps, road);
    let a_current = gipps_accel_in(view, LaneMask::single(lane), gipps, road);
    let ax = a_target.min(a_current).max(-p.lane_change_brake);
    // A lane change in flight cannot be reversed; pause it instead.
    let shift = if !ego.is_centered() && shift != ego.lane_change {
        LaneShift::Keep
    } else {
        shift
    };
    Action::new(ax, shift)
}
