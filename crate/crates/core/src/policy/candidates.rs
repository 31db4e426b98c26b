use serde::{Deserialize, Serialize};

use crate::world::{Action, EgoState, LaneShift, RoadConfig, DECISION_STEP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateConfig {
    /// Longitudinal accelerations offered for collision avoidance (m/s²).
    pub accelerations: [f64; 4],
    /// Speeds below this are too slow for braking actions (m/s).
    pub min_speed: f64,
    /// Offer no lateral actions (brake-only emergency operation).
    pub brake_only: bool,
    pub dt: f64,
}

impl Default for CandidateConfig {
    fn default() -> Self {
        Self {
            accelerations: [-4.0, -1.5, 0.0, 1.5],
            min_speed: 5.0,
            brake_only: false,
            dt: DECISION_STEP,
        }
    }
}

pub const FULL_BRAKE: Action = Action::new(-4.0, LaneShift::Keep);

/// The driving action first, followed by the filtered collision-avoidance
/// actions.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub actions: Vec<Action>,
}

impl CandidateSet {
    pub fn policy_action(&self) -> Action {
        self.actions[0]
    }
}

/// `{a^AV}` plus the grid of accelerations × lateral shifts, without actions
/// that leave the road, exceed the speed limit or (when braking) fall below
/// the minimum speed. Full straight braking is always kept. During a lane
/// change only continuing or pausing is offered.
pub fn enumerate_candidates(
    ego: &EgoState,
    policy_action: Action,
    road: &RoadConfig,
    cfg: &CandidateConfig,
) -> CandidateSet {
    let shifts: &[LaneShift] = if cfg.brake_only {
        &[LaneShift::Keep]
    } else if !ego.is_centered() {
        match ego.lane_change {
            LaneShift::Left => &[LaneShift::Keep, LaneShift::Left],
            LaneShift::Right => &[LaneShift::Keep, LaneShift::Right],
            LaneShift::Keep => &[LaneShift::Keep],
        }
    } else {
        &[LaneShift::Keep, LaneShift::Left, LaneShift::Right]
    };
    let v = ego.kin.vx;
    let mut actions = vec![policy_action];
    for &ax in &cfg.accelerations {
        let v_end = v + ax * cfg.dt;
        for &shift in shifts {
            let a = Action::new(ax, shift);
            let always = a == FULL_BRAKE;
            let ok = ego.shift_feasible(shift, road)
                && !(ax > 0.0 && v_end > road.speed_limit)
                && !(ax < 0.0 && v_end < cfg.min_speed);
            if (always || ok) && !actions.contains(&a) {
                actions.push(a);
            }
        }
    }
    CandidateSet { actions }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rightmost_lane_has_no_right_shifts() {
        let road = RoadConfig::default();
        let ego = EgoState::in_lane(0, 0.0, 30.0, &road);
        let set = enumerate_candidates(&ego, Action::straight(0.5), &road, &CandidateConfig::default());
        assert!(set.actions.iter().all(|a| a.shift != LaneShift::Right));
        assert_eq!(set.actions.len(), 1 + 8);
    }

    #[test]
    fn speed_limit_drops_acceleration() {
        let road = RoadConfig::default();
        let ego = EgoState::in_lane(1, 0.0, 40.0, &road);
        let set = enumerate_candidates(&ego, Action::straight(0.0), &road, &CandidateConfig::default());
        assert!(set.actions.iter().all(|a| a.ax < 1.5));
        assert_eq!(set.policy_action(), Action::straight(0.0));
        // Duplicate of the policy action removed.
        assert_eq!(set.actions.iter().filter(|a| **a == Action::straight(0.0)).count(), 1);
    }

    #[test]
    fn slow_ego_keeps_full_brake_only_among_brakes() {
        let road = RoadConfig::default();
        let ego = EgoState::in_lane(1, 0.0, 3.0, &road);
        let set = enumerate_candidates(&ego, Action::straight(1.5), &road, &CandidateConfig::default());
        assert!(set.actions.contains(&FULL_BRAKE));
        assert!(!set.actions.iter().any(|a| a.ax == -1.5));
    }

    #[test]
    fn mid_change_offers_continue_or_pause() {
        let road = RoadConfig::default();
        let ego = EgoState::in_lane(1, 0.0, 30.0, &road)
            .advance(Action::new(0.0, LaneShift::Left), 0.75, &road)
            .unwrap();
        let set = enumerate_candidates(&ego, Action::new(0.0, LaneShift::Left), &road, &CandidateConfig::default());
        assert!(set.actions.iter().all(|a| a.shift != LaneShift::Right));
        assert!(set.actions.iter().any(|a| a.shift == LaneShift::Keep));
    }

    #[test]
    fn brake_only_is_straight() {
        let road = RoadConfig::default();
        let ego = EgoState::in_lane(1, 0.0, 30.0, &road);
        let cfg = CandidateConfig {
            brake_only: true,
            ..Default::default()
        };
        let set = enumerate_candidates(&ego, Action::straight(0.3), &road, &cfg);
        assert_eq!(set.actions.len(), 5);
        assert!(set.actions.iter().all(|a| a.shift == LaneShift::Keep));
    }
}
