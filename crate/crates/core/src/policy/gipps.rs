use serde::{Deserialize, Serialize};

use crate::world::{
    ego_front, front_vehicle_in, Action, LaneMask, LaneShift, RoadConfig, TrafficView,
    VehicleKinematics, DECISION_STEP,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GippsParams {
    /// Desired speed v_ave (m/s).
    pub desired_speed: f64,
    /// Comfortable acceleration a_cmax (m/s²).
    pub comfort_accel: f64,
    /// Comfortable deceleration a_cmin, signed (m/s², negative).
    pub comfort_decel: f64,
    /// Ego maximum deceleration magnitude (m/s²).
    pub ego_max_decel: f64,
    /// Assumed front-vehicle maximum deceleration magnitude (m/s²).
    pub front_max_decel: f64,
    /// Velocity adjustment rate k.
    pub k: f64,
    pub dt: f64,
}

impl Default for GippsParams {
    fn default() -> Self {
        Self {
            desired_speed: 27.0,
            comfort_accel: 1.5,
            comfort_decel: -1.5,
            ego_max_decel: 4.0,
            front_max_decel: 4.0,
            k: 1.0,
            dt: DECISION_STEP,
        }
    }
}

/// Safe speed `v_g` behind a front vehicle at bumper gap `gap` moving at
/// `front_speed`. Decelerations enter as signed (negative) values:
///
/// `v_g = 2âₑΔt + √(4âₑ²Δt² − âₑ[2g − 2ẋₑΔt − ẋ_f²/â_f])`
///
/// A negative discriminant or negative root gives 0.
pub fn gipps_safe_speed(speed: f64, gap: f64, front_speed: f64, p: &GippsParams) -> f64 {
    let ae = -p.ego_max_decel;
    let af = -p.front_max_decel;
    let dt = p.dt;
    let disc = 4.0 * ae * ae * dt * dt
        - ae * (2.0 * gap - 2.0 * speed * dt - front_speed * front_speed / af);
    if !(disc >= 0.0) {
        return 0.0;
    }
    (2.0 * ae * dt + disc.sqrt()).max(0.0)
}

fn accel_behind(speed: f64, front: Option<&VehicleKinematics>, ego: &VehicleKinematics, p: &GippsParams) -> f64 {
    let vg = match front {
        Some(f) => gipps_safe_speed(speed, ego.gap_to(f), f.vx, p),
        None => f64::INFINITY,
    };
    ((p.k * vg.min(p.desired_speed) - speed) / p.dt).clamp(p.comfort_decel, p.comfort_accel)
}

/// Longitudinal Gipps acceleration against the nearest front vehicle sharing
/// a lane with `lanes`.
pub fn gipps_accel_in<V: TrafficView + ?Sized>(
    view: &V,
    lanes: LaneMask,
    p: &GippsParams,
    road: &RoadConfig,
) -> f64 {
    let ego = view.ego().kin;
    accel_behind(ego.vx, front_vehicle_in(view, lanes, road), &ego, p)
}

/// Gipps car following. Never starts a lane change; one in flight (left by a
/// safeguard) is continued.
pub fn gipps_action<V: TrafficView + ?Sized>(view: &V, p: &GippsParams, road: &RoadConfig) -> Action {
    let ego = view.ego();
    let ax = accel_behind(ego.kin.vx, ego_front(view, road), &ego.kin, p);
    let shift = if ego.is_centered() {
        LaneShift::Keep
    } else {
        ego.lane_change
    };
    Action::new(ax, shift)
}
