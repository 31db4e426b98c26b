/// Smallest root of `c0 + c1·t + c2·t²` in `[lo, hi]`, given a positive value
/// at `lo`.
fn first_root(c0: f64, c1: f64, c2: f64, lo: f64, hi: f64) -> Option<f64> {
    let mut roots: [f64; 2] = [f64::NAN; 2];
    if c2.abs() < 1e-12 {
        if c1 != 0.0 {
            roots[0] = -c0 / c1;
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            return None;
        }
        // Numerically stable pair.
        let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
        if q != 0.0 {
            roots[0] = q / c2;
            roots[1] = c0 / q;
        } else {
            roots[0] = 0.0;
        }
    }
    roots
        .into_iter()
        .filter(|t| t.is_finite() && *t >= lo && *t <= hi)
        .min_by(f64::total_cmp)
}

/// Time at which the bumper gap closes when the ego brakes at `decel_e` and
/// the front vehicle at `decel_f` (magnitudes, speeds clamped at 0). Returns
/// infinity when the gap never closes and 0 for an existing overlap.
pub fn time_before_collision(gap: f64, v_e: f64, v_f: f64, decel_e: f64, decel_f: f64) -> f64 {
    if gap <= 0.0 {
        return 0.0;
    }
    let stop = |v: f64, d: f64| if d > 0.0 { v / d } else { f64::INFINITY };
    let (t_e, t_f) = (stop(v_e, decel_e), stop(v_f, decel_f));
    let events = [t_e.min(t_f), t_e.max(t_f)];
    let mut lo = 0.0;
    for hi in events.into_iter().chain([f64::INFINITY]) {
        if hi <= lo && hi.is_finite() {
            continue;
        }
        let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };
        let (e_moving, f_moving) = (mid < t_e, mid < t_f);
        // Gap = gap + x_f(t) − x_e(t), each piece quadratic in t.
        let mut c0 = gap;
        let mut c1 = 0.0;
        let mut c2 = 0.0;
        if f_moving {
            c1 += v_f;
            c2 -= 0.5 * decel_f;
        } else {
            c0 += v_f * v_f / (2.0 * decel_f);
        }
        if e_moving {
            c1 -= v_e;
            c2 += 0.5 * decel_e;
        } else {
            c0 -= v_e * v_e / (2.0 * decel_e);
        }
        if let Some(t) = first_root(c0, c1, c2, lo, hi) {
            return t;
        }
        lo = hi;
        if !lo.is_finite() {
            break;
        }
    }
    f64::INFINITY
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn both_moving_case() {
        // 40 − 5t − 1.25t² = 0
        let t = time_before_collision(40.0, 30.0, 25.0, 1.5, 4.0);
        assert_abs_diff_eq!(t, 4.0, epsilon = 1e-9);
    }

    #[test]
    fn faster_front_never_closes() {
        assert_eq!(time_before_collision(10.0, 20.0, 25.0, 0.0, 0.0), f64::INFINITY);
    }

    #[test]
    fn ego_stops_short_of_stationary_front() {
        // Stopping distance 30²/8 = 112.5 < 120.
        assert_eq!(time_before_collision(120.0, 30.0, 0.0, 4.0, 4.0), f64::INFINITY);
        let t = time_before_collision(100.0, 30.0, 0.0, 4.0, 4.0);
        assert!(t.is_finite() && t < 7.5);
    }

    #[test]
    fn overlap_is_immediate() {
        assert_eq!(time_before_collision(-0.5, 30.0, 0.0, 4.0, 4.0), 0.0);
    }

    #[test]
    fn front_stops_then_ego_arrives() {
        // Front stops at t = 2.5 after 12.5 m; ego coasts at 10 m/s.
        let t = time_before_collision(20.0, 10.0, 10.0, 0.0, 4.0);
        assert_abs_diff_eq!(t, 3.25, epsilon = 1e-9);
    }
}
