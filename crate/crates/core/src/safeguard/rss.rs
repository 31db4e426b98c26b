use serde::{Deserialize, Serialize};

use crate::world::{ego_front, Action, LaneShift, RoadConfig, TrafficView, DECISION_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RssParams {
    /// Worst-case ego acceleration during the reaction time (m/s²).
    pub ego_max_accel: f64,
    /// Ego hard-braking magnitude (m/s²).
    pub ego_brake: f64,
    /// Front-vehicle hard-braking magnitude (m/s²).
    pub front_brake: f64,
    /// Reaction time Δt (s).
    pub reaction: f64,
}

impl Default for RssParams {
    fn default() -> Self {
        Self {
            ego_max_accel: 1.4,
            ego_brake: 4.0,
            front_brake: 4.0,
            reaction: DECISION_STEP,
        }
    }
}

/// Minimum safe gap:
/// `vₑΔt + ½a_maxΔt² + (vₑ + Δt·a_max)²/(2a_e) − v_f²/(2a_f)`, floored at 0.
/// No front vehicle (`None`) needs no gap.
pub fn rss_distance(v_e: f64, v_f: Option<f64>, p: &RssParams) -> f64 {
    let Some(v_f) = v_f else {
        return 0.0;
    };
    let dt = p.reaction;
    let v_react = v_e + dt * p.ego_max_accel;
    let d = v_e * dt + 0.5 * p.ego_max_accel * dt * dt + v_react * v_react / (2.0 * p.ego_brake)
        - v_f * v_f / (2.0 * p.front_brake);
    d.max(0.0)
}

/// Front gap and its RSS requirement for the vehicle the ego follows.
pub fn rss_margin<V: TrafficView + ?Sized>(view: &V, p: &RssParams, road: &RoadConfig) -> Option<(f64, f64)> {
    let ego = view.ego().kin;
    ego_front(view, road).map(|f| (ego.gap_to(f), rss_distance(ego.vx, Some(f.vx), p)))
}

/// True when the front gap is at or below the RSS distance.
pub fn rss_threat<V: TrafficView + ?Sized>(view: &V, p: &RssParams, road: &RoadConfig) -> bool {
    rss_margin(view, p, road).is_some_and(|(gap, d)| gap <= d)
}

/// Hard straight braking on an RSS threat, otherwise the driving action.
pub fn rss_supervise<V: TrafficView + ?Sized>(
    view: &V,
    policy_action: Action,
    p: &RssParams,
    road: &RoadConfig,
) -> Action {
    if rss_threat(view, p, road) {
        Action::new(-p.ego_brake, LaneShift::Keep)
    } else {
        policy_action
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn equal_speeds_at_thirty() {
        let d = rss_distance(30.0, Some(30.0), &RssParams::default());
        let expected = 22.5 + 0.39375 + 31.05f64.powi(2) / 8.0 - 112.5;
        assert_abs_diff_eq!(d, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(d, 30.906, epsilon = 1e-3);
    }

    #[test]
    fn no_front_and_stationary_ego() {
        let p = RssParams::default();
        assert_eq!(rss_distance(30.0, None, &p), 0.0);
        assert_eq!(rss_distance(0.0, Some(30.0), &p), 0.0);
    }

    proptest! {
        #[test]
        fn monotone_in_speeds(ve in 0.0..40.0f64, vf in 0.0..40.0f64, d in 0.0..5.0f64) {
            let p = RssParams::default();
            let base = rss_distance(ve, Some(vf), &p);
            prop_assert!(rss_distance(ve + d, Some(vf), &p) >= base);
            prop_assert!(rss_distance(ve, Some(vf + d), &p) <= base);
        }
    }
}
