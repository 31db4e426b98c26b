/// Accelerations entering the lane-change incentive for one candidate lane.
/// Barred quantities are the accelerations after the change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaneChangeEval {
    /// ā_c − a_c of the deciding vehicle.
    pub own_gain: f64,
    /// ā_n − a_n of the follower in the target lane.
    pub new_follower_gain: f64,
    /// ā_o − a_o of the follower in the current lane.
    pub old_follower_gain: f64,
    /// The new follower's post-change acceleration stays above −b.
    pub safe: bool,
}

impl LaneChangeEval {
    /// Builds the gains from the eight raw accelerations
    /// `(a_c, ā_c, a_n, ā_n, a_o, ā_o)` and the new follower's `b`.
    pub fn from_accelerations(
        own: (f64, f64),
        new_follower: (f64, f64),
        old_follower: (f64, f64),
        new_follower_decel: f64,
    ) -> Self {
        Self {
            own_gain: own.1 - own.0,
            new_follower_gain: new_follower.1 - new_follower.0,
            old_follower_gain: old_follower.1 - old_follower.0,
            safe: new_follower.1 >= -new_follower_decel,
        }
    }

    pub fn incentive(&self, politeness: f64) -> f64 {
        self.own_gain + politeness * (self.new_follower_gain + self.old_follower_gain)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneDecision {
    Stay,
    Left,
    Right,
}

/// Picks the safe lane with the largest incentive above `threshold`.
/// An incentive equal to the threshold stays; equal left/right incentives go
/// left.
pub fn mobil_decide(
    left: Option<LaneChangeEval>,
    right: Option<LaneChangeEval>,
    politeness: f64,
    threshold: f64,
) -> LaneDecision {
    let score = |e: Option<LaneChangeEval>| {
        e.filter(|e| e.safe)
            .map(|e| e.incentive(politeness))
            .filter(|&s| s > threshold)
    };
    match (score(left), score(right)) {
        (Some(l), Some(r)) if r > l => LaneDecision::Right,
        (Some(_), _) => LaneDecision::Left,
        (None, Some(_)) => LaneDecision::Right,
        (None, None) => LaneDecision::Stay,
    }
}
