use crate::world::{RoadConfig, VehicleId, VehicleKinematics, WorldState};

pub const POSITION_STEP: f64 = 0.5;
pub const SPEED_STEP: f64 = 0.25;

/// One vehicle's quantized kinematics. Lateral position is counted in
/// sixths of a lane, which covers both the lane index and the progress of
/// a lane change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VehicleKey {
    pub id: VehicleId,
    pub x: i64,
    pub vx: i64,
    pub lateral: i32,
    /// Sign of the lateral velocity.
    pub direction: i8,
}

impl VehicleKey {
    pub fn of(id: VehicleId, kin: &VehicleKinematics, road: &RoadConfig) -> Self {
        Self {
            id,
            x: (kin.x / POSITION_STEP).round() as i64,
            vx: (kin.vx / SPEED_STEP).round() as i64,
            lateral: (kin.y * 6.0 / road.lane_width).round() as i32,
            direction: if kin.vy > 0.0 {
                1
            } else if kin.vy < 0.0 {
                -1
            } else {
                0
            },
        }
    }

    /// The cell's center.
    pub fn representative(&self, road: &RoadConfig) -> VehicleKinematics {
        let mut k = VehicleKinematics::new(
            self.x as f64 * POSITION_STEP,
            self.lateral as f64 * road.lane_width / 6.0,
            self.vx as f64 * SPEED_STEP,
        );
        k.vy = self.direction as f64;
        k
    }

    pub fn lane(&self) -> i32 {
        (self.lateral + 3).div_euclid(6)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateKey {
    pub depth: usize,
    pub vehicles: Vec<VehicleKey>,
}

/// Quantized identity of a search state: every vehicle (ego first) at
/// 0.5 m / 0.25 m/s resolution, plus the remaining depth.
pub fn quantize_state(state: &WorldState, depth: usize, road: &RoadConfig) -> StateKey {
    let mut vehicles = Vec::with_capacity(state.vehicles.len() + 1);
    vehicles.push(VehicleKey::of(crate::world::EGO_ID, &state.ego.kin, road));
    vehicles.extend(state.vehicles.iter().map(|v| VehicleKey::of(v.id, &v.kin, road)));
    StateKey { depth, vehicles }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::EgoState;
    use proptest::prelude::*;

    #[test]
    fn small_position_change_shares_key() {
        let road = RoadConfig::default();
        let a = WorldState::new(EgoState::in_lane(1, 10.0, 30.0, &road));
        let mut b = a.clone();
        b.ego.kin.x += 0.1;
        assert_eq!(quantize_state(&a, 5, &road), quantize_state(&b, 5, &road));
    }

    #[test]
    fn lane_change_changes_key() {
        let road = RoadConfig::default();
        let a = WorldState::new(EgoState::in_lane(1, 10.0, 30.0, &road));
        let b = WorldState::new(EgoState::in_lane(2, 10.0, 30.0, &road));
        assert_ne!(quantize_state(&a, 5, &road), quantize_state(&b, 5, &road));
        assert_ne!(quantize_state(&a, 5, &road), quantize_state(&a, 4, &road));
    }

    proptest! {
        #[test]
        fn representative_is_a_fixed_point(
            x in -1e3..1e3f64, v in 0.0..40.0f64, y in 0.0..8.0f64, vy in -1.0..1.0f64,
        ) {
            let road = RoadConfig::default();
            let mut k = VehicleKinematics::new(x, y, v);
            k.vy = vy;
            let key = VehicleKey::of(VehicleId(3), &k, &road);
            let again = VehicleKey::of(VehicleId(3), &key.representative(&road), &road);
            prop_assert_eq!(key, again);
        }
    }
}
