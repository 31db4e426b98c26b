use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const OBSERVATION_RANGE: f64 = 100.0;

/// Straight multi-lane highway. Lane 0 is the rightmost lane with its center
/// line at `y = 0`; lane `k` is centered at `y = k * lane_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadConfig {
    pub lane_count: usize,
    pub lane_width: f64,
    pub speed_limit: f64,
    /// Vehicles farther than this from the ego are despawned.
    pub corridor_half_length: f64,
}

impl Default for RoadConfig {
    fn default() -> Self {
        Self {
            lane_count: 3,
            lane_width: 4.0,
            speed_limit: 40.0,
            corridor_half_length: 600.0,
        }
    }
}

/// Set of lanes, one bit per lane index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LaneMask(pub u32);

impl LaneMask {
    pub fn single(lane: usize) -> Self {
        LaneMask(1 << lane)
    }

    pub fn contains(self, lane: usize) -> bool {
        self.0 & (1 << lane) != 0
    }

    pub fn overlaps(self, other: LaneMask) -> bool {
        self.0 & other.0 != 0
    }

    pub fn with(self, lane: usize) -> Self {
        LaneMask(self.0 | (1 << lane))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl RoadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lane_count == 0 || self.lane_count > 32 {
            return Err(Error::config("lane_count must be in 1..=32"));
        }
        if !(self.lane_width > 0.0) {
            return Err(Error::config("lane_width must be positive"));
        }
        if !(self.speed_limit > 0.0) {
            return Err(Error::config("speed_limit must be positive"));
        }
        if !(self.corridor_half_length >= OBSERVATION_RANGE) {
            return Err(Error::config(
                "corridor_half_length must cover the observation range",
            ));
        }
        Ok(())
    }

    pub fn lane_center(&self, lane: usize) -> f64 {
        lane as f64 * self.lane_width
    }

    /// Lane holding the majority of a footprint centered at `y`.
    pub fn lane_of(&self, y: f64) -> usize {
        let lane = (y / self.lane_width).round();
        lane.clamp(0.0, (self.lane_count - 1) as f64) as usize
    }

    /// Lanes a footprint of the given width overlaps (strictly; touching a
    /// lane boundary does not count).
    pub fn occupied_lanes(&self, y: f64, width: f64) -> LaneMask {
        let (lo, hi) = (y - 0.5 * width, y + 0.5 * width);
        let half = 0.5 * self.lane_width;
        let mut mask = LaneMask::default();
        for lane in 0..self.lane_count {
            let c = self.lane_center(lane);
            if lo < c + half && hi > c - half {
                mask = mask.with(lane);
            }
        }
        mask
    }

    /// Largest lateral position of the ego expressed in sixths of a lane.
    pub fn max_sixths(&self) -> i32 {
        6 * (self.lane_count as i32 - 1)
    }

    pub fn max_y(&self) -> f64 {
        self.lane_center(self.lane_count - 1)
    }

    pub fn on_road(&self, y: f64) -> bool {
        y >= -1e-9 && y <= self.max_y() + 1e-9
    }
}
