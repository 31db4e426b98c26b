//! Longitudinal ordering of a traffic snapshot and the neighbor queries shared
//! by the physics step, the human-like policy and the belief prediction.

use super::idm::{idm_or_brake, Lead};
use super::mobil::LaneChangeEval;
use super::DriverParams;
use crate::world::{LaneMask, VehicleKinematics};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    pub kin: VehicleKinematics,
    /// `None` when unknown; queries then substitute the deciding vehicle's
    /// own parameters.
    pub params: Option<DriverParams>,
    /// Occupied lanes plus the target of an in-flight lane change.
    pub lanes: LaneMask,
}

/// Agents sorted by longitudinal position.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub agents: Vec<Agent>,
    order: Vec<usize>,
    rank: Vec<usize>,
}

pub(crate) fn lead_of(follower: &VehicleKinematics, leader: &VehicleKinematics) -> Lead {
    Lead {
        gap: follower.gap_to(leader),
        speed: leader.vx,
    }
}

impl Scene {
    pub fn new(agents: Vec<Agent>) -> Self {
        let mut scene = Scene {
            agents,
            order: Vec::new(),
            rank: Vec::new(),
        };
        scene.reorder();
        scene
    }

    /// Re-sorts after positions changed. Ties keep index order.
    pub fn reorder(&mut self) {
        let n = self.agents.len();
        self.order.clear();
        self.order.extend(0..n);
        let agents = &self.agents;
        self.order
            .sort_by(|&i, &j| agents[i].kin.x.total_cmp(&agents[j].kin.x).then(i.cmp(&j)));
        self.rank.resize(n, 0);
        for (r, &i) in self.order.iter().enumerate() {
            self.rank[i] = r;
        }
    }

    /// Nearest agent ahead of `i` sharing a lane with `lanes`.
    pub fn ahead_in(&self, i: usize, lanes: LaneMask) -> Option<usize> {
        self.order[self.rank[i] + 1..]
            .iter()
            .copied()
            .find(|&j| self.agents[j].lanes.overlaps(lanes))
    }

    /// Nearest agent behind `i` sharing a lane with `lanes`.
    pub fn behind_in(&self, i: usize, lanes: LaneMask) -> Option<usize> {
        self.order[..self.rank[i]]
            .iter()
            .rev()
            .copied()
            .find(|&j| self.agents[j].lanes.overlaps(lanes))
    }

    /// The vehicle `i` follows.
    pub fn leader(&self, i: usize) -> Option<usize> {
        self.ahead_in(i, self.agents[i].lanes)
    }

    fn params_or(&self, j: usize, fallback: &DriverParams) -> DriverParams {
        self.agents[j].params.unwrap_or(*fallback)
    }

    fn accel(&self, follower: &VehicleKinematics, p: &DriverParams, leader: Option<&VehicleKinematics>, max_braking: f64) -> f64 {
        idm_or_brake(follower.vx, p, leader.map(|l| lead_of(follower, l)), max_braking)
    }

    /// MOBIL accelerations for agent `i` moving into `target` lane. Noise-free;
    /// neighbors without known parameters are modelled with `p`. A target
    /// lane leader or follower already alongside makes the change unsafe.
    pub fn evaluate_lane_change(
        &self,
        i: usize,
        target: usize,
        p: &DriverParams,
        max_braking: f64,
    ) -> LaneChangeEval {
        let me = &self.agents[i];
        let target_mask = LaneMask::single(target);
        let cur_lead = self.leader(i).map(|j| self.agents[j].kin);
        let new_lead = self.ahead_in(i, target_mask).map(|j| self.agents[j].kin);
        let new_fol = self.behind_in(i, target_mask);
        let old_fol = self.behind_in(i, me.lanes);

        let a_c = self.accel(&me.kin, p, cur_lead.as_ref(), max_braking);
        let a_c_new = self.accel(&me.kin, p, new_lead.as_ref(), max_braking);
        let mut safe = new_lead.is_none_or(|l| me.kin.gap_to(&l) > 0.0);

        let (new_gain, new_ok) = match new_fol {
            None => (0.0, true),
            Some(n) => {
                let fk = self.agents[n].kin;
                let pn = self.params_or(n, p);
                let before = self.accel(&fk, &pn, new_lead.as_ref(), max_braking);
                let after = self.accel(&fk, &pn, Some(&me.kin), max_braking);
                let ok = fk.gap_to(&me.kin) > 0.0 && after >= -pn.desired_decel;
                (after - before, ok)
            }
        };
        safe &= new_ok;

        let old_gain = match old_fol {
            None => 0.0,
            Some(o) => {
                let ok = self.agents[o].kin;
                let po = self.params_or(o, p);
                let before = self.accel(&ok, &po, Some(&me.kin), max_braking);
                let after = self.accel(&ok, &po, cur_lead.as_ref(), max_braking);
                after - before
            }
        };

        LaneChangeEval {
            own_gain: a_c_new - a_c,
            new_follower_gain: new_gain,
            old_follower_gain: old_gain,
            safe,
        }
    }
}
