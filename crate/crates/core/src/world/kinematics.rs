use std::fmt;

use serde::{Deserialize, Serialize};

use super::road::{LaneMask, RoadConfig};
use crate::error::{Error, Result};

pub const VEHICLE_LENGTH: f64 = 4.0;
pub const VEHICLE_WIDTH: f64 = 2.0;
/// Ego decision period.
pub const DECISION_STEP: f64 = 0.75;

/// Point-mass state with a rectangular footprint. `x` and `y` locate the
/// footprint center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleKinematics {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub length: f64,
    pub width: f64,
}

impl VehicleKinematics {
    pub fn new(x: f64, y: f64, vx: f64) -> Self {
        Self {
            x,
            y,
            vx,
            vy: 0.0,
            length: VEHICLE_LENGTH,
            width: VEHICLE_WIDTH,
        }
    }

    /// Bumper-to-bumper gap to a vehicle ahead (negative when overlapping).
    pub fn gap_to(&self, lead: &VehicleKinematics) -> f64 {
        lead.x - self.x - 0.5 * (lead.length + self.length)
    }

    pub fn lanes(&self, road: &RoadConfig) -> LaneMask {
        road.occupied_lanes(self.y, self.width)
    }
}

/// Lateral component of an action: one sixth of a lane per decision step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LaneShift {
    Right,
    Keep,
    Left,
}

impl LaneShift {
    pub fn sixths(self) -> i32 {
        match self {
            LaneShift::Right => -1,
            LaneShift::Keep => 0,
            LaneShift::Left => 1,
        }
    }

    pub fn from_sign(sign: i32) -> Self {
        match sign.signum() {
            -1 => LaneShift::Right,
            1 => LaneShift::Left,
            _ => LaneShift::Keep,
        }
    }

    /// The lane fraction γ_lc ∈ {−1/6, 0, +1/6}.
    pub fn gamma(self) -> f64 {
        self.sixths() as f64 / 6.0
    }

    pub fn opposite(self) -> Self {
        LaneShift::from_sign(-self.sixths())
    }
}

/// Ego action: longitudinal acceleration plus lateral lane fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub ax: f64,
    pub shift: LaneShift,
}

impl Action {
    pub const fn new(ax: f64, shift: LaneShift) -> Self {
        Self { ax, shift }
    }

    pub const fn straight(ax: f64) -> Self {
        Self::new(ax, LaneShift::Keep)
    }

    pub fn gamma(&self) -> f64 {
        self.shift.gamma()
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+.2} m/s², {:+}/6)", self.ax, self.shift.sixths())
    }
}

/// Longitudinal motion over one step with the speed clamped at zero.
/// Returns (distance, final speed, time spent moving).
pub(crate) fn longitudinal_step(v0: f64, ax: f64, dt: f64) -> (f64, f64, f64) {
    let v1 = v0 + ax * dt;
    if v1 >= 0.0 {
        (v0 * dt + 0.5 * ax * dt * dt, v1, dt)
    } else {
        // Stops inside the step; no residual acceleration afterwards.
        let t_stop = -v0 / ax;
        (v0 * t_stop + 0.5 * ax * t_stop * t_stop, 0.0, t_stop)
    }
}

/// Kinematic update of a single decision step:
/// `x' = x + vx·dt + ½·ax·dt²`, `vx' = vx + ax·dt` (clamped at 0),
/// `y' = y + γ·w`.
pub fn apply_action(
    ego: &VehicleKinematics,
    action: Action,
    dt: f64,
    road: &RoadConfig,
) -> Result<VehicleKinematics> {
    if !(dt > 0.0) {
        return Err(Error::InfeasibleAction(format!("non-positive dt {dt}")));
    }
    let y = ego.y + action.gamma() * road.lane_width;
    if !road.on_road(y) {
        return Err(Error::InfeasibleAction(format!(
            "{action} leaves the road (y = {y:.3})"
        )));
    }
    let (dx, vx, _) = longitudinal_step(ego.vx, action.ax, dt);
    Ok(VehicleKinematics {
        x: ego.x + dx,
        y,
        vx,
        vy: 0.0,
        ..*ego
    })
}

/// Ego vehicle state. The lateral position is tracked in integer sixths of a
/// lane so that six identical lane-change steps land exactly on a lane center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgoState {
    pub kin: VehicleKinematics,
    pub lateral_sixths: i32,
    /// Direction of an in-flight lane change, `Keep` when centered in a lane.
    pub lane_change: LaneShift,
}

impl EgoState {
    pub fn in_lane(lane: usize, x: f64, vx: f64, road: &RoadConfig) -> Self {
        Self {
            kin: VehicleKinematics::new(x, road.lane_center(lane), vx),
            lateral_sixths: 6 * lane as i32,
            lane_change: LaneShift::Keep,
        }
    }

    pub fn is_centered(&self) -> bool {
        self.lateral_sixths % 6 == 0
    }

    /// Majority lane.
    pub fn lane(&self) -> usize {
        ((self.lateral_sixths + 3).div_euclid(6)).max(0) as usize
    }

    /// Lanes the ego occupies or is moving into.
    pub fn lanes(&self, road: &RoadConfig) -> LaneMask {
        let mut mask = self.kin.lanes(road);
        if !self.is_centered() {
            let target = match self.lane_change {
                LaneShift::Left => self.lateral_sixths.div_euclid(6) + 1,
                LaneShift::Right => self.lateral_sixths.div_euclid(6),
                LaneShift::Keep => self.lane() as i32,
            };
            if target >= 0 && (target as usize) < road.lane_count {
                mask = mask.with(target as usize);
            }
        }
        mask
    }

    /// Whether a lateral shift keeps the ego on the road.
    pub fn shift_feasible(&self, shift: LaneShift, road: &RoadConfig) -> bool {
        let s = self.lateral_sixths + shift.sixths();
        (0..=road.max_sixths()).contains(&s)
    }

    /// Applies one decision step of `action` (end-of-step boundary state).
    pub fn advance(&self, action: Action, dt: f64, road: &RoadConfig) -> Result<EgoState> {
        if !self.shift_feasible(action.shift, road) {
            return Err(Error::InfeasibleAction(format!(
                "{action} leaves the road from sixth {}",
                self.lateral_sixths
            )));
        }
        let mut kin = apply_action(&self.kin, Action::straight(action.ax), dt, road)?;
        let sixths = self.lateral_sixths + action.shift.sixths();
        kin.y = sixths as f64 * road.lane_width / 6.0;
        let lane_change = if sixths % 6 == 0 {
            LaneShift::Keep
        } else if action.shift != LaneShift::Keep {
            action.shift
        } else {
            self.lane_change
        };
        Ok(EgoState {
            kin,
            lateral_sixths: sixths,
            lane_change,
        })
    }
}
