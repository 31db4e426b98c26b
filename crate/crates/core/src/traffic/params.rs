use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` used for uniform sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.width() == 0.0 {
            self.lo
        } else {
            self.lo + self.width() * rng.random::<f64>()
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::config(format!("{name}: empty interval")));
        }
        Ok(())
    }
}

/// IDM/MOBIL parameter bundle of one driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverParams {
    /// Desired time gap T (s).
    pub time_gap: f64,
    /// Maximum acceleration a (m/s²).
    pub max_accel: f64,
    /// Desired deceleration b, stored as a positive magnitude (m/s²).
    pub desired_decel: f64,
    /// Desired free-flow speed (m/s).
    pub desired_speed: f64,
    /// Jam distance g₀ (m).
    pub jam_distance: f64,
    /// MOBIL politeness p.
    pub politeness: f64,
    /// IDM acceleration exponent δ.
    pub delta: f64,
}

impl Default for DriverParams {
    fn default() -> Self {
        let iv = ParamIntervals::default();
        Self {
            time_gap: iv.time_gap.mid(),
            max_accel: iv.max_accel.mid(),
            desired_decel: iv.desired_decel.mid(),
            desired_speed: iv.desired_speed.mid(),
            jam_distance: iv.jam_distance.mid(),
            politeness: iv.politeness.mid(),
            delta: 4.0,
        }
    }
}

/// The six estimated driver parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParamField {
    TimeGap,
    MaxAccel,
    DesiredDecel,
    DesiredSpeed,
    JamDistance,
    Politeness,
}

impl ParamField {
    pub const ALL: [ParamField; 6] = [
        ParamField::TimeGap,
        ParamField::MaxAccel,
        ParamField::DesiredDecel,
        ParamField::DesiredSpeed,
        ParamField::JamDistance,
        ParamField::Politeness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamField::TimeGap => "time_gap",
            ParamField::MaxAccel => "max_accel",
            ParamField::DesiredDecel => "desired_decel",
            ParamField::DesiredSpeed => "desired_speed",
            ParamField::JamDistance => "jam_distance",
            ParamField::Politeness => "politeness",
        }
    }
}

impl DriverParams {
    pub fn get(&self, field: ParamField) -> f64 {
        match field {
            ParamField::TimeGap => self.time_gap,
            ParamField::MaxAccel => self.max_accel,
            ParamField::DesiredDecel => self.desired_decel,
            ParamField::DesiredSpeed => self.desired_speed,
            ParamField::JamDistance => self.jam_distance,
            ParamField::Politeness => self.politeness,
        }
    }

    pub fn set(&mut self, field: ParamField, value: f64) {
        match field {
            ParamField::TimeGap => self.time_gap = value,
            ParamField::MaxAccel => self.max_accel = value,
            ParamField::DesiredDecel => self.desired_decel = value,
            ParamField::DesiredSpeed => self.desired_speed = value,
            ParamField::JamDistance => self.jam_distance = value,
            ParamField::Politeness => self.politeness = value,
        }
    }
}

/// Sampling interval for each driver parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamIntervals {
    pub time_gap: Interval,
    pub max_accel: Interval,
    pub desired_decel: Interval,
    pub desired_speed: Interval,
    pub jam_distance: Interval,
    pub politeness: Interval,
}

impl Default for ParamIntervals {
    /// The aggressive ranges of the simulated traffic.
    fn default() -> Self {
        Self {
            time_gap: Interval::new(0.3, 0.5),
            max_accel: Interval::new(0.8, 2.0),
            desired_decel: Interval::new(1.0, 3.0),
            desired_speed: Interval::new(27.0, 35.0),
            jam_distance: Interval::new(0.2, 0.4),
            politeness: Interval::new(0.1, 0.3),
        }
    }
}

impl ParamIntervals {
    pub fn get(&self, field: ParamField) -> Interval {
        match field {
            ParamField::TimeGap => self.time_gap,
            ParamField::MaxAccel => self.max_accel,
            ParamField::DesiredDecel => self.desired_decel,
            ParamField::DesiredSpeed => self.desired_speed,
            ParamField::JamDistance => self.jam_distance,
            ParamField::Politeness => self.politeness,
        }
    }

    /// Draws each field independently and uniformly. `delta` is fixed.
    pub fn sample<R: Rng>(&self, delta: f64, rng: &mut R) -> DriverParams {
        let mut p = DriverParams {
            delta,
            ..DriverParams::default()
        };
        for field in ParamField::ALL {
            p.set(field, self.get(field).sample(rng));
        }
        p
    }

    pub fn contains(&self, p: &DriverParams) -> bool {
        ParamField::ALL
            .iter()
            .all(|&f| self.get(f).contains(p.get(f)))
    }

    pub fn validate(&self) -> Result<()> {
        for f in ParamField::ALL {
            self.get(f).validate(f.name())?;
            if self.get(f).lo < 0.0 {
                return Err(Error::config(format!("{}: negative bound", f.name())));
            }
        }
        if self.politeness.hi > 1.0 {
            return Err(Error::config("politeness must lie in [0, 1]"));
        }
        for f in [
            ParamField::TimeGap,
            ParamField::MaxAccel,
            ParamField::DesiredDecel,
            ParamField::DesiredSpeed,
        ] {
            if !(self.get(f).lo > 0.0) {
                return Err(Error::config(format!("{} must be positive", f.name())));
            }
        }
        Ok(())
    }
}

/// Traffic generation and surrounding-vehicle behavior settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpawnConfig {
    /// Maximum density in vehicles per km per lane; each episode draws its
    /// density uniformly from `(0, max_flow]`.
    pub max_flow: f64,
    pub initial_speed: Interval,
    pub intervals: ParamIntervals,
    /// Velocity noise standard deviation σ_vel (m/s).
    pub sigma_vel: f64,
    /// MOBIL switching threshold Δa_th (m/s²).
    pub lane_change_threshold: f64,
    /// Acceleration floor applied to every IDM output (magnitude, m/s²).
    pub max_braking: f64,
    /// IDM acceleration exponent δ.
    pub delta: f64,
    /// Lateral speed of surrounding-vehicle lane changes (m/s).
    pub lateral_rate: f64,
}

impl Default for SpawnConfig {
    fn default() -> Self {
        Self {
            max_flow: 20.0,
            initial_speed: Interval::new(27.0, 33.0),
            intervals: ParamIntervals::default(),
            sigma_vel: 0.5,
            lane_change_threshold: 0.1,
            max_braking: 4.0,
            delta: 4.0,
            lateral_rate: 0.89,
        }
    }
}

impl SpawnConfig {
    pub fn validate(&self) -> Result<()> {
        self.intervals.validate()?;
        self.initial_speed.validate("initial_speed")?;
        if !(self.max_flow >= 0.0) {
            return Err(Error::config("max_flow must be non-negative"));
        }
        if !(self.sigma_vel >= 0.0) {
            return Err(Error::config("sigma_vel must be non-negative"));
        }
        if !(self.max_braking > 0.0 && self.lateral_rate > 0.0 && self.delta > 0.0) {
            return Err(Error::config(
                "max_braking, lateral_rate and delta must be positive",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_parameters_stay_in_their_intervals() {
        let iv = ParamIntervals::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let p = iv.sample(4.0, &mut rng);
            assert!(iv.contains(&p), "{p:?}");
            assert_eq!(p.delta, 4.0);
        }
    }

    #[test]
    fn degenerate_interval_samples_its_point() {
        let iv = Interval::new(0.4, 0.4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(iv.sample(&mut rng), 0.4);
    }

    #[test]
    fn validation_rejects_inverted_interval() {
        let mut cfg = SpawnConfig::default();
        cfg.intervals.time_gap = Interval::new(0.5, 0.3);
        assert!(cfg.validate().is_err());
        cfg.intervals.time_gap = Interval::new(0.3, 0.5);
        cfg.sigma_vel = -1.0;
        assert!(cfg.validate().is_err());
    }
}
