use super::DriverParams;
use crate::error::{Error, Result};

/// The vehicle being followed, as seen by the follower.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lead {
    /// Bumper-to-bumper gap (m).
    pub gap: f64,
    pub speed: f64,
}

/// Noise-free IDM acceleration:
/// `a·[1 − (v/v₀)^δ − (s*/g)²]` with `s* = g₀ + max(0, T·v + v·Δv/(2√(ab)))`.
pub fn idm_deterministic(speed: f64, p: &DriverParams, lead: Option<Lead>) -> Result<f64> {
    let free = 1.0 - (speed / p.desired_speed).powf(p.delta);
    let interaction = match lead {
        None => 0.0,
        Some(lead) => {
            if lead.gap <= 0.0 {
                return Err(Error::AlreadyColliding { gap: lead.gap });
            }
            let approach = speed - lead.speed;
            let dynamic = p.time_gap * speed
                + speed * approach / (2.0 * (p.max_accel * p.desired_decel).sqrt());
            let desired = p.jam_distance + dynamic.max(0.0);
            (desired / lead.gap).powi(2)
        }
    };
    Ok(p.max_accel * (free - interaction))
}

/// IDM acceleration with the velocity-noise term `(σ_vel/Δt)·z`, clamped to
/// `[−max_braking, a]`.
pub fn idm_acceleration(
    speed: f64,
    p: &DriverParams,
    lead: Option<Lead>,
    z: f64,
    sigma_vel: f64,
    dt: f64,
    max_braking: f64,
) -> Result<f64> {
    let det = idm_deterministic(speed, p, lead)?;
    Ok((det + sigma_vel / dt * z).clamp(-max_braking, p.max_accel))
}

/// Noise-free IDM clamped to the braking limit; contact saturates at full
/// braking instead of failing.
pub(crate) fn idm_or_brake(speed: f64, p: &DriverParams, lead: Option<Lead>, max_braking: f64) -> f64 {
    match idm_deterministic(speed, p, lead) {
        Ok(a) => a.clamp(-max_braking, p.max_accel),
        Err(_) => -max_braking,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn example_params() -> DriverParams {
        DriverParams {
            time_gap: 0.4,
            max_accel: 2.0,
            desired_decel: 3.0,
            desired_speed: 30.0,
            jam_distance: 0.3,
            politeness: 0.2,
            delta: 4.0,
        }
    }

    #[test]
    fn free_flow_equilibrium() {
        let p = example_params();
        let a = idm_acceleration(30.0, &p, None, 0.0, 0.5, 0.75, 4.0).unwrap();
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hand_evaluated_following_case() {
        // s* = 0.3 + 0.4·25 = 10.3; (25/30)⁴ = 0.482253; (10.3/20)² = 0.265225.
        let p = example_params();
        let lead = Lead {
            gap: 20.0,
            speed: 25.0,
        };
        let a = idm_acceleration(25.0, &p, Some(lead), 0.0, 0.5, 0.75, 4.0).unwrap();
        let expected = 2.0 * (1.0 - (25.0f64 / 30.0).powi(4) - (10.3f64 / 20.0).powi(2));
        assert_abs_diff_eq!(a, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(a, 0.5051, epsilon = 1e-4);
    }

    #[test]
    fn noise_term_scales_with_inverse_step() {
        let p = example_params();
        // Free-flow equilibrium keeps the deterministic part at 0.
        let a = idm_acceleration(30.0, &p, None, 1.0, 0.5, 0.75, 4.0).unwrap();
        assert_abs_diff_eq!(a, 0.5 / 0.75, epsilon = 1e-12);
    }

    #[test]
    fn contact_is_reported() {
        let p = example_params();
        let lead = Lead {
            gap: 0.0,
            speed: 10.0,
        };
        assert!(matches!(
            idm_deterministic(20.0, &p, Some(lead)),
            Err(Error::AlreadyColliding { .. })
        ));
        assert_eq!(idm_or_brake(20.0, &p, Some(lead), 4.0), -4.0);
    }

    #[test]
    fn pulling_away_leader_does_not_brake() {
        let p = example_params();
        let lead = Lead {
            gap: 40.0,
            speed: 35.0,
        };
        let a = idm_deterministic(20.0, &p, Some(lead)).unwrap();
        assert!(a > 0.0);
    }

    proptest! {
        #[test]
        fn output_respects_clamp(
            v in 0.0..45.0f64,
            gap in 0.01..200.0f64,
            lead_v in 0.0..45.0f64,
            z in -5.0..5.0f64,
            t in 0.3..0.5f64, a in 0.8..2.0f64, b in 1.0..3.0f64, v0 in 27.0..35.0f64,
        ) {
            let p = DriverParams { time_gap: t, max_accel: a, desired_decel: b, desired_speed: v0, ..DriverParams::default() };
            let acc = idm_acceleration(v, &p, Some(Lead { gap, speed: lead_v }), z, 0.5, 0.75, 4.0).unwrap();
            prop_assert!((-4.0..=a).contains(&acc));
        }
    }
}
