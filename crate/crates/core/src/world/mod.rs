//! Road geometry, ego kinematics, trajectories, collisions and observation.

mod collision;
mod kinematics;
mod observe;
mod road;
mod trajectory;

pub use collision::{footprints_overlap, overlapping_pairs, CollisionEvent};
pub use kinematics::{
    apply_action, Action, EgoState, LaneShift, VehicleKinematics, DECISION_STEP, VEHICLE_LENGTH,
    VEHICLE_WIDTH,
};
pub use observe::{observe, ObservedState, ObservedVehicle, SensorConfig};
pub use road::{LaneMask, RoadConfig, OBSERVATION_RANGE};
pub use trajectory::{build_trajectory, BoundaryState, Quintic, TrajectoryPoint, TrajectorySegment};

pub(crate) use kinematics::longitudinal_step;

use serde::{Deserialize, Serialize};

use crate::traffic::DriverParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VehicleId(pub u32);

pub const EGO_ID: VehicleId = VehicleId(0);

/// In-flight lane change of a surrounding vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaneChange {
    pub target_lane: usize,
    pub direction: LaneShift,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurroundingVehicle {
    pub id: VehicleId,
    pub kin: VehicleKinematics,
    params: DriverParams,
    pub lane_change: Option<LaneChange>,
}

impl SurroundingVehicle {
    pub fn new(id: VehicleId, kin: VehicleKinematics, params: DriverParams) -> Self {
        Self {
            id,
            kin,
            params,
            lane_change: None,
        }
    }

    /// The vehicle's true driver parameters. Not part of [`ObservedState`].
    pub fn params(&self) -> &DriverParams {
        &self.params
    }

    /// Lanes the vehicle occupies, plus the target lane of a lane change.
    pub fn lanes(&self, road: &RoadConfig) -> LaneMask {
        let mask = self.kin.lanes(road);
        match self.lane_change {
            Some(lc) => mask.with(lc.target_lane),
            None => mask,
        }
    }
}

/// Ground-truth simulation state.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub time: f64,
    pub ego: EgoState,
    pub vehicles: Vec<SurroundingVehicle>,
    next_id: u32,
}

impl WorldState {
    pub fn new(ego: EgoState) -> Self {
        Self {
            time: 0.0,
            ego,
            vehicles: Vec::new(),
            next_id: 1,
        }
    }

    pub fn allocate_id(&mut self) -> VehicleId {
        let id = VehicleId(self.next_id);
        self.next_id += 1;
        id
    }

    pub fn vehicle(&self, id: VehicleId) -> Option<&SurroundingVehicle> {
        self.vehicles.iter().find(|v| v.id == id)
    }

    /// All footprints, ego first.
    pub fn footprints(&self) -> Vec<(VehicleId, VehicleKinematics)> {
        std::iter::once((EGO_ID, self.ego.kin))
            .chain(self.vehicles.iter().map(|v| (v.id, v.kin)))
            .collect()
    }
}

/// Every overlapping pair in the current state.
pub fn detect_collisions(state: &WorldState) -> Vec<CollisionEvent> {
    overlapping_pairs(state.time, &state.footprints())
}

/// Read access to a traffic scene from the ego's perspective. Implemented by
/// both the ground truth and the observation so that policies and safeguards
/// can run inside the planner's generative model.
pub trait TrafficView {
    fn ego(&self) -> &EgoState;
    fn others(&self) -> Box<dyn Iterator<Item = &VehicleKinematics> + '_>;
}

impl TrafficView for ObservedState {
    fn ego(&self) -> &EgoState {
        &self.ego
    }

    fn others(&self) -> Box<dyn Iterator<Item = &VehicleKinematics> + '_> {
        Box::new(self.vehicles.iter().map(|v| &v.kin))
    }
}

impl TrafficView for WorldState {
    fn ego(&self) -> &EgoState {
        &self.ego
    }

    fn others(&self) -> Box<dyn Iterator<Item = &VehicleKinematics> + '_> {
        Box::new(self.vehicles.iter().map(|v| &v.kin))
    }
}

/// Nearest vehicle ahead of the ego sharing any lane with `lanes`.
pub fn front_vehicle_in<'a, V: TrafficView + ?Sized>(
    view: &'a V,
    lanes: LaneMask,
    road: &RoadConfig,
) -> Option<&'a VehicleKinematics> {
    let ego = view.ego().kin;
    view.others()
        .filter(|k| k.x > ego.x && k.lanes(road).overlaps(lanes))
        .min_by(|a, b| a.x.total_cmp(&b.x))
}

/// Nearest vehicle behind the ego sharing any lane with `lanes`.
pub fn rear_vehicle_in<'a, V: TrafficView + ?Sized>(
    view: &'a V,
    lanes: LaneMask,
    road: &RoadConfig,
) -> Option<&'a VehicleKinematics> {
    let ego = view.ego().kin;
    view.others()
        .filter(|k| k.x <= ego.x && k.lanes(road).overlaps(lanes))
        .max_by(|a, b| a.x.total_cmp(&b.x))
}

/// The vehicle the ego is following: nearest ahead in any lane the ego
/// occupies or is moving into.
pub fn ego_front<'a, V: TrafficView + ?Sized>(
    view: &'a V,
    road: &RoadConfig,
) -> Option<&'a VehicleKinematics> {
    front_vehicle_in(view, view.ego().lanes(road), road)
}
