use rand::Rng;
use rand_distr::StandardNormal;

use super::kinematics::{EgoState, VehicleKinematics};
use super::road::{RoadConfig, OBSERVATION_RANGE};
use super::{VehicleId, WorldState};

/// A surrounding vehicle as seen by the ego: kinematics only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedVehicle {
    pub id: VehicleId,
    pub kin: VehicleKinematics,
}

/// The ego's view of the world. Carries no driver parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedState {
    pub time: f64,
    pub ego: EgoState,
    pub vehicles: Vec<ObservedVehicle>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig {
    pub range: f64,
    /// Standard deviation of zero-mean Gaussian position noise; 0 disables it.
    pub position_noise: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            range: OBSERVATION_RANGE,
            position_noise: 0.0,
        }
    }
}

/// Vehicles within `range` of the ego (longitudinally), optionally with
/// noisy positions. Lateral noise is clipped to the road.
pub fn observe<R: Rng>(
    state: &WorldState,
    sensor: &SensorConfig,
    road: &RoadConfig,
    rng: &mut R,
) -> ObservedState {
    let ego_x = state.ego.kin.x;
    let vehicles = state
        .vehicles
        .iter()
        .filter(|v| (v.kin.x - ego_x).abs() <= sensor.range)
        .map(|v| {
            let mut kin = v.kin;
            if sensor.position_noise > 0.0 {
                let nx: f64 = rng.sample(StandardNormal);
                let ny: f64 = rng.sample(StandardNormal);
                kin.x += sensor.position_noise * nx;
                kin.y = (kin.y + sensor.position_noise * ny).clamp(0.0, road.max_y());
            }
            ObservedVehicle { id: v.id, kin }
        })
        .collect();
    ObservedState {
        time: state.time,
        ego: state.ego,
        vehicles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::DriverParams;
    use crate::world::SurroundingVehicle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn world_with(xs: &[f64]) -> WorldState {
        let road = RoadConfig::default();
        let mut w = WorldState::new(EgoState::in_lane(1, 0.0, 30.0, &road));
        for &x in xs {
            let id = w.allocate_id();
            w.vehicles.push(SurroundingVehicle::new(
                id,
                VehicleKinematics::new(x, 0.0, 30.0),
                DriverParams::default(),
            ));
        }
        w
    }

    #[test]
    fn window_excludes_far_vehicles() {
        let w = world_with(&[150.0, -50.0, 100.0, -100.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let obs = observe(&w, &SensorConfig::default(), &RoadConfig::default(), &mut rng);
        let xs: Vec<f64> = obs.vehicles.iter().map(|v| v.kin.x).collect();
        assert_eq!(xs, vec![-50.0, 100.0]);
    }

    #[test]
    fn noiseless_observation_is_ground_truth() {
        let w = world_with(&[20.0, -30.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let obs = observe(&w, &SensorConfig::default(), &RoadConfig::default(), &mut rng);
        for (o, v) in obs.vehicles.iter().zip(&w.vehicles) {
            assert_eq!(o.id, v.id);
            assert_eq!(o.kin, v.kin);
        }
        assert_eq!(obs.ego, w.ego);
    }

    #[test]
    fn noisy_observation_perturbs_positions() {
        let w = world_with(&[20.0]);
        let sensor = SensorConfig {
            position_noise: 0.3,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let obs = observe(&w, &sensor, &RoadConfig::default(), &mut rng);
        assert_ne!(obs.vehicles[0].kin.x, 20.0);
        assert_eq!(obs.vehicles[0].kin.vx, 30.0);
    }
}
