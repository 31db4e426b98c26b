use rand::Rng;

use super::{DriverParams, SpawnConfig};
use crate::world::{
    EgoState, RoadConfig, SurroundingVehicle, VehicleKinematics, WorldState, VEHICLE_LENGTH,
};

/// Parameters the ego's own initial gap is computed with (a cautious human
/// driver), so the ego never starts inside its leader's safety margin.
const EGO_TIME_GAP: f64 = 1.5;
const EGO_JAM_DISTANCE: f64 = 2.0;

/// Everything drawn when a vehicle enters the simulation. Kept outside the
/// world state for likelihood-ratio calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpawnRecord {
    pub params: DriverParams,
    pub speed: f64,
    /// Position relative to the ego when spawned.
    pub offset: f64,
    /// Part of the initial scene rather than a corridor replacement.
    pub initial: bool,
}

/// Corridor bookkeeping: the per-lane vehicle count to hold around the ego.
#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    /// Drawn density in vehicles per km per lane.
    pub density: f64,
    pub target_per_lane: Vec<usize>,
}

fn required_gap(p: &DriverParams, speed: f64) -> f64 {
    p.jam_distance + p.time_gap * speed
}

/// Center positions for a chain of vehicles on `[lo, hi]`, rear to front.
/// `minimum[k]` is the smallest allowed distance between consecutive
/// positions (with `minimum[0]` measured from `lo` and the last entry up to
/// `hi`). The slack is split by uniform spacings, i.e. a flat Dirichlet.
fn place_chain<R: Rng>(lo: f64, hi: f64, minimum: &[f64], rng: &mut R) -> Option<Vec<f64>> {
    let slack = hi - lo - minimum.iter().sum::<f64>();
    if slack < 0.0 {
        return None;
    }
    let mut cuts: Vec<f64> = (0..minimum.len() - 1).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let mut x = lo;
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(cuts.len());
    for (k, &c) in cuts.iter().enumerate() {
        x += minimum[k] + slack * (c - prev);
        prev = c;
        out.push(x);
    }
    Some(out)
}

struct Pending {
    params: DriverParams,
    speed: f64,
}

/// Builds the initial world: ego mid-road at `x = 0`, and surrounding traffic
/// with a density drawn uniformly from `(0, max_flow]`.
pub fn spawn_traffic<R: Rng>(
    road: &RoadConfig,
    cfg: &SpawnConfig,
    rng: &mut R,
) -> (WorldState, Corridor, Vec<SpawnRecord>) {
    let density = cfg.max_flow * (1.0 - rng.random::<f64>());
    let ego_speed = cfg.initial_speed.sample(rng);
    let ego_lane = road.lane_count / 2;
    spawn_with_density(road, cfg, density, ego_lane, ego_speed, rng)
}

/// [`spawn_traffic`] with the density, ego lane and ego speed given.
pub fn spawn_with_density<R: Rng>(
    road: &RoadConfig,
    cfg: &SpawnConfig,
    density: f64,
    ego_lane: usize,
    ego_speed: f64,
    rng: &mut R,
) -> (WorldState, Corridor, Vec<SpawnRecord>) {
    let half = road.corridor_half_length;
    let mut state = WorldState::new(EgoState::in_lane(ego_lane, 0.0, ego_speed, road));
    let mut records = Vec::new();
    let expected = density * 2.0 * half / 1000.0;
    let mut target_per_lane = Vec::with_capacity(road.lane_count);

    for lane in 0..road.lane_count {
        let count = (expected + rng.random::<f64>()).floor() as usize;
        let mut pending: Vec<Pending> = (0..count)
            .map(|_| Pending {
                params: cfg.intervals.sample(cfg.delta, rng),
                speed: cfg.initial_speed.sample(rng),
            })
            .collect();
        let mut placed: Vec<(f64, Pending)> = Vec::new();
        if lane == ego_lane {
            let behind = pending
                .iter()
                .map(|_| rng.random::<bool>())
                .collect::<Vec<_>>();
            let mut rear = Vec::new();
            let mut front = Vec::new();
            for (p, b) in pending.drain(..).zip(behind) {
                if b {
                    rear.push(p)
                } else {
                    front.push(p)
                }
            }
            // Behind the ego: the last vehicle keeps its own gap to the ego.
            placed.extend(place_segment(-half, -VEHICLE_LENGTH, rear, true, rng));
            let ego_gap = EGO_JAM_DISTANCE + EGO_TIME_GAP * ego_speed;
            placed.extend(place_segment(VEHICLE_LENGTH + ego_gap, half, front, false, rng));
        } else {
            placed.extend(place_segment(-half, half, pending, false, rng));
        }
        target_per_lane.push(placed.len());
        for (x, p) in placed {
            let id = state.allocate_id();
            let kin = VehicleKinematics::new(x, road.lane_center(lane), p.speed);
            state
                .vehicles
                .push(SurroundingVehicle::new(id, kin, p.params));
            records.push(SpawnRecord {
                params: p.params,
                speed: p.speed,
                offset: x,
                initial: true,
            });
        }
    }
    (
        state,
        Corridor {
            density,
            target_per_lane,
        },
        records,
    )
}

/// Places as many of `vehicles` as fit on `[lo, hi]`, rear to front in the
/// given order. With `ends_at_ego` the front-most vehicle also keeps its
/// required gap to `hi`, the ego's rear bumper position offset.
fn place_segment<R: Rng>(
    lo: f64,
    hi: f64,
    mut vehicles: Vec<Pending>,
    ends_at_ego: bool,
    rng: &mut R,
) -> Vec<(f64, Pending)> {
    loop {
        if vehicles.is_empty() {
            return Vec::new();
        }
        let mut minimum = Vec::with_capacity(vehicles.len() + 1);
        minimum.push(0.0);
        for k in 1..vehicles.len() {
            let f = &vehicles[k - 1];
            minimum.push(VEHICLE_LENGTH + required_gap(&f.params, f.speed));
        }
        let last = vehicles.last().unwrap();
        minimum.push(if ends_at_ego {
            required_gap(&last.params, last.speed)
        } else {
            0.0
        });
        if let Some(xs) = place_chain(lo, hi, &minimum, rng) {
            return xs.into_iter().zip(vehicles).collect();
        }
        vehicles.pop();
    }
}

/// Despawns vehicles that left the corridor and refills each lane towards its
/// target count at whichever corridor end has more free room. A replacement
/// is only inserted where it keeps its required gap.
pub fn maintain_corridor<R: Rng>(
    state: &mut WorldState,
    corridor: &Corridor,
    road: &RoadConfig,
    cfg: &SpawnConfig,
    rng: &mut R,
    records: &mut Vec<SpawnRecord>,
) {
    let half = road.corridor_half_length;
    let ego_x = state.ego.kin.x;
    state.vehicles.retain(|v| (v.kin.x - ego_x).abs() <= half);

    for (lane, &target) in corridor.target_per_lane.iter().enumerate() {
        let center = road.lane_center(lane);
        let mut in_lane: Vec<f64> = state
            .vehicles
            .iter()
            .filter(|v| road.lane_of(v.kin.y) == lane)
            .map(|v| v.kin.x)
            .collect();
        if lane == state.ego.lane() {
            in_lane.push(ego_x);
        }
        let mut count = state
            .vehicles
            .iter()
            .filter(|v| road.lane_of(v.kin.y) == lane)
            .count();
        while count < target {
            let rear_room = in_lane
                .iter()
                .fold(f64::INFINITY, |m, &x| m.min(x - (ego_x - half)));
            let front_room = in_lane
                .iter()
                .fold(f64::INFINITY, |m, &x| m.min(ego_x + half - x));
            let params = cfg.intervals.sample(cfg.delta, rng);
            let speed = cfg.initial_speed.sample(rng);
            let need = VEHICLE_LENGTH + required_gap(&params, speed);
            let x = if front_room >= rear_room {
                if front_room < need {
                    break;
                }
                ego_x + half
            } else {
                if rear_room < need {
                    break;
                }
                ego_x - half
            };
            let id = state.allocate_id();
            state.vehicles.push(SurroundingVehicle::new(
                id,
                VehicleKinematics::new(x, center, speed),
                params,
            ));
            records.push(SpawnRecord {
                params,
                speed,
                offset: x - ego_x,
                initial: false,
            });
            in_lane.push(x);
            count += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::detect_collisions;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_density_leaves_only_the_ego() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let road = RoadConfig::default();
        let (state, corridor, records) =
            spawn_with_density(&road, &SpawnConfig::default(), 0.0, 1, 30.0, &mut rng);
        assert!(state.vehicles.is_empty());
        assert!(records.is_empty());
        assert_eq!(corridor.target_per_lane, vec![0, 0, 0]);
    }

    #[test]
    fn dense_spawn_respects_gaps() {
        let road = RoadConfig::default();
        let cfg = SpawnConfig::default();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (state, _, _) = spawn_with_density(&road, &cfg, 60.0, 1, 30.0, &mut rng);
            assert!(detect_collisions(&state).is_empty());
            for lane in 0..3 {
                let mut vs: Vec<&SurroundingVehicle> = state
                    .vehicles
                    .iter()
                    .filter(|v| road.lane_of(v.kin.y) == lane)
                    .collect();
                vs.sort_by(|a, b| a.kin.x.total_cmp(&b.kin.x));
                for w in vs.windows(2) {
                    let need = required_gap(w[0].params(), w[0].kin.vx);
                    assert!(w[0].kin.gap_to(&w[1].kin) >= need - 1e-9);
                }
            }
            let ego = state.ego.kin;
            for v in state.vehicles.iter().filter(|v| road.lane_of(v.kin.y) == 1) {
                if v.kin.x > 0.0 {
                    assert!(ego.gap_to(&v.kin) >= 2.0 + 1.5 * 30.0 - 1e-9);
                } else {
                    assert!(v.kin.gap_to(&ego) >= required_gap(v.params(), v.kin.vx) - 1e-9);
                }
            }
        }
    }

    #[test]
    fn overfull_lane_places_what_fits() {
        let road = RoadConfig {
            corridor_half_length: 100.0,
            ..RoadConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (state, corridor, _) =
            spawn_with_density(&road, &SpawnConfig::default(), 500.0, 1, 30.0, &mut rng);
        assert!(corridor.target_per_lane[0] < 100);
        assert!(detect_collisions(&state).is_empty());
    }

    #[test]
    fn corridor_refills_after_despawn() {
        let road = RoadConfig::default();
        let cfg = SpawnConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (mut state, corridor, mut records) =
            spawn_with_density(&road, &cfg, 15.0, 1, 30.0, &mut rng);
        let before = state.vehicles.len();
        state.ego.kin.x += 300.0;
        maintain_corridor(&mut state, &corridor, &road, &cfg, &mut rng, &mut records);
        assert!(state
            .vehicles
            .iter()
            .all(|v| (v.kin.x - state.ego.kin.x).abs() <= road.corridor_half_length));
        assert!(state.vehicles.len() <= before);
        assert!(records.iter().any(|r| !r.initial));
    }
}
