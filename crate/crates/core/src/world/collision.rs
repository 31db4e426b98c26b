use super::kinematics::VehicleKinematics;
use super::VehicleId;

/// Two footprints overlapping at `time`. The pair is ordered (`first < second`)
/// and the offsets are `second − first`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    pub time: f64,
    pub first: VehicleId,
    pub second: VehicleId,
    pub dx: f64,
    pub dy: f64,
}

impl CollisionEvent {
    pub fn involves(&self, id: VehicleId) -> bool {
        self.first == id || self.second == id
    }
}

/// Axis-aligned rectangle overlap; touching edges do not count.
pub fn footprints_overlap(a: &VehicleKinematics, b: &VehicleKinematics) -> bool {
    (b.x - a.x).abs() < 0.5 * (a.length + b.length) && (b.y - a.y).abs() < 0.5 * (a.width + b.width)
}

/// All overlapping pairs. Sorts by `x` and sweeps, so the cost is close to
/// linear for highway densities.
pub fn overlapping_pairs(
    time: f64,
    vehicles: &[(VehicleId, VehicleKinematics)],
) -> Vec<CollisionEvent> {
    let mut order: Vec<usize> = (0..vehicles.len()).collect();
    order.sort_by(|&i, &j| vehicles[i].1.x.total_cmp(&vehicles[j].1.x));
    let max_len = vehicles
        .iter()
        .map(|(_, k)| k.length)
        .fold(0.0_f64, f64::max);
    let mut events = Vec::new();
    for (n, &i) in order.iter().enumerate() {
        let a = &vehicles[i].1;
        for &j in &order[n + 1..] {
            let b = &vehicles[j].1;
            if b.x - a.x >= max_len {
                break;
            }
            if footprints_overlap(a, b) {
                let (first, second) = if vehicles[i].0 < vehicles[j].0 {
                    (i, j)
                } else {
                    (j, i)
                };
                let (ka, kb) = (&vehicles[first].1, &vehicles[second].1);
                events.push(CollisionEvent {
                    time,
                    first: vehicles[first].0,
                    second: vehicles[second].0,
                    dx: kb.x - ka.x,
                    dy: kb.y - ka.y,
                });
            }
        }
    }
    events.sort_by_key(|e| (e.first, e.second));
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(dx: f64, dy: f64) -> Vec<(VehicleId, VehicleKinematics)> {
        vec![
            (VehicleId(0), VehicleKinematics::new(0.0, 4.0, 30.0)),
            (VehicleId(1), VehicleKinematics::new(dx, 4.0 + dy, 30.0)),
        ]
    }

    #[test]
    fn same_lane_gap_below_length_collides() {
        assert_eq!(overlapping_pairs(0.0, &pair(3.9, 0.0)).len(), 1);
    }

    #[test]
    fn same_lane_gap_above_length_is_clear() {
        assert!(overlapping_pairs(0.0, &pair(4.1, 0.0)).is_empty());
    }

    #[test]
    fn touching_sides_do_not_collide() {
        assert!(overlapping_pairs(0.0, &pair(0.0, 2.0)).is_empty());
        assert!(overlapping_pairs(0.0, &pair(1.0, -2.0)).is_empty());
        assert_eq!(overlapping_pairs(0.0, &pair(1.0, 1.99)).len(), 1);
    }

    proptest! {
        #[test]
        fn symmetric_and_translation_invariant(
            dx in -8.0..8.0f64, dy in -3.0..3.0f64, shift in -1e4..1e4f64,
        ) {
            let a = VehicleKinematics::new(0.0, 4.0, 20.0);
            let b = VehicleKinematics::new(dx, 4.0 + dy, 25.0);
            let forward = overlapping_pairs(0.0, &[(VehicleId(3), a), (VehicleId(9), b)]);
            let swapped = overlapping_pairs(0.0, &[(VehicleId(9), b), (VehicleId(3), a)]);
            prop_assert_eq!(&forward, &swapped);
            let moved = |k: VehicleKinematics| VehicleKinematics { x: k.x + shift, ..k };
            let shifted = overlapping_pairs(0.0, &[(VehicleId(3), moved(a)), (VehicleId(9), moved(b))]);
            prop_assert_eq!(forward.len(), shifted.len());
        }
    }
}
