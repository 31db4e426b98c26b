//! Fifth-order polynomial trajectory segments the ego tracks between
//! decision points.

use super::kinematics::{longitudinal_step, Action, VehicleKinematics};
use super::road::RoadConfig;

/// `p(t) = c0 + c1 t + c2 t² + c3 t³ + c4 t⁴ + c5 t⁵`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quintic {
    pub coeffs: [f64; 6],
}

impl Quintic {
    /// Unique quintic matching position, velocity and acceleration at both
    /// ends of `[0, duration]`.
    pub fn from_boundary(
        (p0, v0, a0): (f64, f64, f64),
        (p1, v1, a1): (f64, f64, f64),
        duration: f64,
    ) -> Self {
        let t = duration;
        let (t2, t3) = (t * t, t * t * t);
        let (t4, t5) = (t3 * t, t3 * t2);
        let c3 = (20.0 * (p1 - p0) - (8.0 * v1 + 12.0 * v0) * t - (3.0 * a0 - a1) * t2) / (2.0 * t3);
        let c4 = (30.0 * (p0 - p1) + (14.0 * v1 + 16.0 * v0) * t + (3.0 * a0 - 2.0 * a1) * t2)
            / (2.0 * t4);
        let c5 = (12.0 * (p1 - p0) - 6.0 * (v1 + v0) * t - (a0 - a1) * t2) / (2.0 * t5);
        Self {
            coeffs: [p0, v0, 0.5 * a0, c3, c4, c5],
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn velocity(&self, t: f64) -> f64 {
        let c = &self.coeffs;
        c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])))
    }

    pub fn acceleration(&self, t: f64) -> f64 {
        let c = &self.coeffs;
        2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryState {
    pub x: f64,
    pub vx: f64,
    pub y: f64,
}

/// Planned motion over one decision step. The longitudinal profile covers
/// `[0, moving_time]` and the vehicle holds still afterwards (only relevant
/// when hard braking reaches a stop inside the step).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySegment {
    pub start: BoundaryState,
    pub end: BoundaryState,
    pub duration: f64,
    pub moving_time: f64,
    pub longitudinal: Quintic,
    pub lateral: Quintic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub x: f64,
    pub vx: f64,
    pub y: f64,
    pub vy: f64,
}

impl TrajectorySegment {
    pub fn at(&self, t: f64) -> TrajectoryPoint {
        let t = t.clamp(0.0, self.duration);
        let (x, vx) = if t <= self.moving_time {
            (self.longitudinal.eval(t), self.longitudinal.velocity(t).max(0.0))
        } else {
            (self.end.x, self.end.vx)
        };
        TrajectoryPoint {
            x,
            vx,
            y: self.lateral.eval(t),
            vy: self.lateral.velocity(t),
        }
    }
}

/// Builds the segment for `action` from `start`. The longitudinal profile
/// keeps the commanded acceleration at both ends (so it reproduces the
/// constant-acceleration update); the lateral profile is the minimum-jerk
/// shape with zero lateral velocity and acceleration at both ends.
pub fn build_trajectory(
    start: &VehicleKinematics,
    action: Action,
    dt: f64,
    road: &RoadConfig,
) -> TrajectorySegment {
    let (dx, v1, moving_time) = longitudinal_step(start.vx, action.ax, dt);
    let y1 = start.y + action.gamma() * road.lane_width;
    let end = BoundaryState {
        x: start.x + dx,
        vx: v1,
        y: y1,
    };
    // Constant-acceleration boundary conditions make the quintic collapse to
    // the exact quadratic; after a stop the segment holds position.
    let longitudinal = if moving_time > 0.0 {
        Quintic::from_boundary(
            (start.x, start.vx, action.ax),
            (end.x, v1, action.ax),
            moving_time,
        )
    } else {
        Quintic::from_boundary((start.x, 0.0, 0.0), (start.x, 0.0, 0.0), dt)
    };
    let lateral = Quintic::from_boundary((start.y, 0.0, 0.0), (y1, 0.0, 0.0), dt);
    TrajectorySegment {
        start: BoundaryState {
            x: start.x,
            vx: start.vx,
            y: start.y,
        },
        end,
        duration: dt,
        moving_time: moving_time.max(0.0),
        longitudinal,
        lateral,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::kinematics::{apply_action, LaneShift};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_action_is_straight_constant_speed() {
        let road = RoadConfig::default();
        let s = VehicleKinematics::new(5.0, 4.0, 20.0);
        let seg = build_trajectory(&s, Action::straight(0.0), 0.75, &road);
        for k in 0..=10 {
            let t = 0.075 * k as f64;
            let p = seg.at(t);
            assert_abs_diff_eq!(p.x, 5.0 + 20.0 * t, epsilon = 1e-9);
            assert_abs_diff_eq!(p.vx, 20.0, epsilon = 1e-9);
            assert_abs_diff_eq!(p.y, 4.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lateral_midpoint_is_half_the_increment() {
        let road = RoadConfig::default();
        let s = VehicleKinematics::new(0.0, 0.0, 30.0);
        let seg = build_trajectory(&s, Action::new(0.0, LaneShift::Left), 0.75, &road);
        // Minimum-jerk shape 10τ³ − 15τ⁴ + 6τ⁵ at τ = ½ gives exactly ½.
        assert_abs_diff_eq!(seg.at(0.375).y, 0.5 * 4.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(seg.at(0.0).vy, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(seg.at(0.75).vy, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(seg.lateral.acceleration(0.75), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn stopping_segment_holds_after_stop() {
        let road = RoadConfig::default();
        let s = VehicleKinematics::new(0.0, 0.0, 2.0);
        let seg = build_trajectory(&s, Action::straight(-4.0), 0.75, &road);
        assert_abs_diff_eq!(seg.moving_time, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(seg.at(0.6).x, 0.5, epsilon = 1e-12);
        assert_eq!(seg.at(0.7).vx, 0.0);
    }

    proptest! {
        #[test]
        fn endpoints_match_the_kinematic_update(
            x in -500.0..500.0f64,
            v in 0.0..40.0f64,
            ax in -4.0..2.0f64,
            lane in 0usize..3,
            shift in prop_oneof![Just(LaneShift::Left), Just(LaneShift::Keep), Just(LaneShift::Right)],
        ) {
            let road = RoadConfig::default();
            let s = VehicleKinematics::new(x, road.lane_center(lane), v);
            let a = Action::new(ax, shift);
            let Ok(next) = apply_action(&s, a, 0.75, &road) else { return Ok(()); };
            let seg = build_trajectory(&s, a, 0.75, &road);
            let p0 = seg.at(0.0);
            let p1 = seg.at(0.75);
            prop_assert!((p0.x - x).abs() < 1e-9 && (p0.vx - v).abs() < 1e-9);
            prop_assert!((p1.x - next.x).abs() < 1e-9, "{} vs {}", p1.x, next.x);
            prop_assert!((p1.vx - next.vx).abs() < 1e-9);
            prop_assert!((p1.y - next.y).abs() < 1e-9);
        }

        #[test]
        fn chained_segments_match_chained_updates(
            v in 5.0..35.0f64,
            accels in proptest::collection::vec(-4.0..1.5f64, 1..12),
        ) {
            let road = RoadConfig::default();
            let mut by_update = VehicleKinematics::new(0.0, 4.0, v);
            let mut by_segment = by_update;
            for ax in accels {
                let a = Action::straight(ax);
                by_update = apply_action(&by_update, a, 0.75, &road).unwrap();
                let seg = build_trajectory(&by_segment, a, 0.75, &road);
                let end = seg.at(0.75);
                by_segment.x = end.x;
                by_segment.vx = end.vx;
                prop_assert!((by_update.x - by_segment.x).abs() < 1e-9);
                prop_assert!((by_update.vx - by_segment.vx).abs() < 1e-9);
            }
        }
    }
}
