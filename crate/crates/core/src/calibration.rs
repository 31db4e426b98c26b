//! Importance-sampling re-weighting of collision outcomes from the
//! aggressive simulator to a naturalistic parameter distribution.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::traffic::{Interval, ParamField, SpawnConfig, SpawnRecord};
use crate::world::WorldState;

/// One-dimensional density of a sampled quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Density {
    Uniform(Interval),
    /// Normal restricted to `[lo, hi]`; infinite bounds are allowed.
    TruncatedNormal { mean: f64, std: f64, lo: f64, hi: f64 },
}

impl Density {
    pub fn uniform(lo: f64, hi: f64) -> Self {
        Density::Uniform(Interval::new(lo, hi))
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Density::Uniform(i) => (i.lo, i.hi),
            Density::TruncatedNormal { lo, hi, .. } => (lo, hi),
        }
    }

    pub fn in_support(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x >= lo && x <= hi
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !self.in_support(x) {
            return 0.0;
        }
        match *self {
            Density::Uniform(i) => 1.0 / i.width(),
            Density::TruncatedNormal { mean, std, lo, hi } => {
                let n = Normal::new(mean, std).expect("validated");
                n.pdf(x) / (n.cdf(hi) - n.cdf(lo))
            }
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if !self.in_support(x) {
            return f64::NEG_INFINITY;
        }
        match *self {
            Density::Uniform(i) => -i.width().ln(),
            Density::TruncatedNormal { mean, std, lo, hi } => {
                let n = Normal::new(mean, std).expect("validated");
                n.ln_pdf(x) - (n.cdf(hi) - n.cdf(lo)).ln()
            }
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        match *self {
            Density::Uniform(i) => {
                i.validate(name)?;
                if !(i.width() > 0.0) || !i.width().is_finite() {
                    return Err(Error::config(format!("{name}: uniform density needs a finite, non-empty interval")));
                }
            }
            Density::TruncatedNormal { mean, std, lo, hi } => {
                if !(std > 0.0) || !mean.is_finite() || !(lo < hi) {
                    return Err(Error::config(format!("{name}: invalid truncated normal")));
                }
                let n = Normal::new(mean, std).map_err(|e| Error::config(format!("{name}: {e}")))?;
                if !(n.cdf(hi) - n.cdf(lo) > 0.0) {
                    return Err(Error::config(format!("{name}: truncation leaves no mass")));
                }
            }
        }
        Ok(())
    }

    /// Flat form used in configuration files: `[lo, hi]` for a uniform,
    /// `[lo, hi, mean, std]` for a truncated normal.
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match *v {
            [lo, hi] => Ok(Density::uniform(lo, hi)),
            [lo, hi, mean, std] => Ok(Density::TruncatedNormal { mean, std, lo, hi }),
            _ => Err(Error::config("density must be [lo, hi] or [lo, hi, mean, std]")),
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        match *self {
            Density::Uniform(i) => vec![i.lo, i.hi],
            Density::TruncatedNormal { mean, std, lo, hi } => vec![lo, hi, mean, std],
        }
    }
}

/// Independently sampled quantities entering the likelihood ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Param(ParamField),
    InitialSpeed,
}

/// A density for every driver parameter and for the initial speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficDensities {
    pub time_gap: Density,
    pub max_accel: Density,
    pub desired_decel: Density,
    pub desired_speed: Density,
    pub jam_distance: Density,
    pub politeness: Density,
    pub initial_speed: Density,
}

impl TrafficDensities {
    pub fn get(&self, c: Component) -> &Density {
        match c {
            Component::Param(ParamField::TimeGap) => &self.time_gap,
            Component::Param(ParamField::MaxAccel) => &self.max_accel,
            Component::Param(ParamField::DesiredDecel) => &self.desired_decel,
            Component::Param(ParamField::DesiredSpeed) => &self.desired_speed,
            Component::Param(ParamField::JamDistance) => &self.jam_distance,
            Component::Param(ParamField::Politeness) => &self.politeness,
            Component::InitialSpeed => &self.initial_speed,
        }
    }

    pub fn get_mut(&mut self, c: Component) -> &mut Density {
        match c {
            Component::Param(ParamField::TimeGap) => &mut self.time_gap,
            Component::Param(ParamField::MaxAccel) => &mut self.max_accel,
            Component::Param(ParamField::DesiredDecel) => &mut self.desired_decel,
            Component::Param(ParamField::DesiredSpeed) => &mut self.desired_speed,
            Component::Param(ParamField::JamDistance) => &mut self.jam_distance,
            Component::Param(ParamField::Politeness) => &mut self.politeness,
            Component::InitialSpeed => &mut self.initial_speed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for f in ParamField::ALL {
            self.get(Component::Param(f)).validate(f.name())?;
        }
        self.initial_speed.validate("initial_speed")
    }
}

/// The sampling distribution q used by the traffic generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProposalModel(pub TrafficDensities);

impl ProposalModel {
    pub fn from_spawn(cfg: &SpawnConfig) -> Self {
        let i = &cfg.intervals;
        ProposalModel(TrafficDensities {
            time_gap: Density::Uniform(i.time_gap),
            max_accel: Density::Uniform(i.max_accel),
            desired_decel: Density::Uniform(i.desired_decel),
            desired_speed: Density::Uniform(i.desired_speed),
            jam_distance: Density::Uniform(i.jam_distance),
            politeness: Density::Uniform(i.politeness),
            initial_speed: Density::Uniform(cfg.initial_speed),
        })
    }
}

/// The naturalistic distribution p. Absolute calibrated rates depend
/// entirely on this choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalisticModel(pub TrafficDensities);

impl Default for NaturalisticModel {
    /// Milder drivers: longer time gaps, larger standstill distances and more
    /// politeness, each range extending the aggressive one.
    fn default() -> Self {
        NaturalisticModel(TrafficDensities {
            time_gap: Density::uniform(0.3, 2.0),
            max_accel: Density::uniform(0.8, 2.0),
            desired_decel: Density::uniform(1.0, 3.0),
            desired_speed: Density::uniform(27.0, 35.0),
            jam_distance: Density::uniform(0.2, 4.0),
            politeness: Density::uniform(0.1, 0.5),
            initial_speed: Density::uniform(27.0, 33.0),
        })
    }
}

/// Product of per-component ratios `p_j(x_j) / q_j(x_j)`, in log space.
/// Fails when a value could not have been drawn from q.
pub fn ln_likelihood_ratio(x: &[f64], p: &[Density], q: &[Density]) -> Result<f64> {
    assert_eq!(x.len(), p.len());
    assert_eq!(x.len(), q.len());
    let mut sum = 0.0;
    for (j, &xj) in x.iter().enumerate() {
        let lq = q[j].ln_pdf(xj);
        if lq == f64::NEG_INFINITY {
            return Err(Error::OutsideSupport {
                field: format!("component {j}"),
                value: xj,
            });
        }
        sum += p[j].ln_pdf(xj) - lq;
    }
    Ok(sum)
}

pub fn likelihood_ratio(x: &[f64], p: &[Density], q: &[Density]) -> Result<f64> {
    ln_likelihood_ratio(x, p, q).map(f64::exp)
}

/// Which sampled quantities of an episode are re-weighted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub naturalistic: NaturalisticModel,
    /// Only initial vehicles within this distance of the ego count (m).
    pub radius: f64,
    /// Include initial speeds (ego and surrounding vehicles).
    pub include_speeds: bool,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            naturalistic: NaturalisticModel::default(),
            radius: 100.0,
            include_speeds: true,
        }
    }
}

impl CalibrationConfig {
    pub fn validate(&self) -> Result<()> {
        self.naturalistic.0.validate()?;
        if !(self.radius >= 0.0) {
            return Err(Error::config("calibration radius must be non-negative"));
        }
        Ok(())
    }
}

/// Log likelihood ratio of an episode's initial scene.
pub fn episode_ln_likelihood(
    initial: &WorldState,
    records: &[SpawnRecord],
    q: &ProposalModel,
    cfg: &CalibrationConfig,
) -> Result<f64> {
    let p = &cfg.naturalistic.0;
    let q = &q.0;
    let mut sum = 0.0;
    let mut term = |c: Component, x: f64| -> Result<()> {
        let lq = q.get(c).ln_pdf(x);
        if lq == f64::NEG_INFINITY {
            let field = match c {
                Component::Param(f) => f.name().to_string(),
                Component::InitialSpeed => "initial_speed".to_string(),
            };
            return Err(Error::OutsideSupport { field, value: x });
        }
        sum += p.get(c).ln_pdf(x) - lq;
        Ok(())
    };
    if cfg.include_speeds {
        term(Component::InitialSpeed, initial.ego.kin.vx)?;
    }
    for r in records.iter().filter(|r| r.initial && r.offset.abs() <= cfg.radius) {
        for f in ParamField::ALL {
            term(Component::Param(f), r.params.get(f))?;
        }
        if cfg.include_speeds {
            term(Component::InitialSpeed, r.speed)?;
        }
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeLikelihood {
    pub episode: u64,
    pub likelihood: f64,
    pub collided: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsEstimate {
    pub rate: f64,
    pub std_error: f64,
}

/// `r̂ = (1/N) Σ I·L` with the sample standard error of the terms.
pub fn is_estimate(records: &[EpisodeLikelihood]) -> IsEstimate {
    let n = records.len();
    if n == 0 {
        return IsEstimate {
            rate: 0.0,
            std_error: 0.0,
        };
    }
    let term = |r: &EpisodeLikelihood| if r.collided { r.likelihood } else { 0.0 };
    let rate = records.iter().map(term).sum::<f64>() / n as f64;
    let std_error = if n > 1 {
        let var = records.iter().map(|r| (term(r) - rate).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    IsEstimate { rate, std_error }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn uniform_ratio() {
        let p = [Density::uniform(0.3, 2.0)];
        let q = [Density::uniform(0.3, 0.5)];
        let l = likelihood_ratio(&[0.4], &p, &q).unwrap();
        assert_abs_diff_eq!(l, (1.0 / 1.7) / (1.0 / 0.2), epsilon = 1e-12);
        assert_abs_diff_eq!(l, 0.1176, epsilon = 1e-4);
    }

    #[test]
    fn identical_models_give_one() {
        let q = ProposalModel::from_spawn(&SpawnConfig::default());
        let d = [q.0.time_gap, q.0.politeness];
        assert_abs_diff_eq!(likelihood_ratio(&[0.35, 0.2], &d, &d).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn outside_naturalistic_support_is_zero() {
        let p = [Density::uniform(0.8, 2.0)];
        let q = [Density::uniform(0.3, 0.5)];
        assert_eq!(likelihood_ratio(&[0.4], &p, &q).unwrap(), 0.0);
    }

    #[test]
    fn outside_proposal_support_is_an_error() {
        let p = [Density::uniform(0.3, 2.0)];
        let q = [Density::uniform(0.3, 0.5)];
        assert!(matches!(likelihood_ratio(&[0.9], &p, &q), Err(Error::OutsideSupport { .. })));
    }

    #[test]
    fn no_collisions_no_rate() {
        let r: Vec<_> = (0..5)
            .map(|i| EpisodeLikelihood { episode: i, likelihood: 3.0, collided: false })
            .collect();
        assert_eq!(is_estimate(&r).rate, 0.0);
    }

    #[test]
    fn discrete_toy() {
        // x ∈ {1, 2}, p = (0.9, 0.1), q = (0.5, 0.5), crash iff x = 2.
        let l = |x: u8| if x == 1 { 0.9 / 0.5 } else { 0.1 / 0.5 };
        let r: Vec<_> = [1u8, 2, 2, 1]
            .iter()
            .enumerate()
            .map(|(i, &x)| EpisodeLikelihood { episode: i as u64, likelihood: l(x), collided: x == 2 })
            .collect();
        assert_abs_diff_eq!(is_estimate(&r).rate, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn truncated_normal_integrates_to_one() {
        let d = Density::TruncatedNormal { mean: 0.5, std: 0.15, lo: 0.3, hi: 0.5 };
        let n = 20_000;
        let h = 0.2 / n as f64;
        let s: f64 = (0..n).map(|i| d.pdf(0.3 + (i as f64 + 0.5) * h) * h).sum();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(d.pdf(0.4).ln(), d.ln_pdf(0.4), epsilon = 1e-12);
    }

    #[test]
    fn flat_density_round_trip() {
        for v in [vec![0.3, 2.0], vec![0.3, 0.5, 0.5, 0.15]] {
            assert_eq!(Density::from_slice(&v).unwrap().to_vec(), v);
        }
        assert!(Density::from_slice(&[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn permutation_invariant(
            ls in prop::collection::vec((0.0..5.0f64, any::<bool>()), 1..40),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let r: Vec<_> = ls.iter().enumerate()
                .map(|(i, &(l, c))| EpisodeLikelihood { episode: i as u64, likelihood: l, collided: c })
                .collect();
            let mut s = r.clone();
            s.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let (a, b) = (is_estimate(&r), is_estimate(&s));
            prop_assert!((a.rate - b.rate).abs() < 1e-12);
            prop_assert!((a.std_error - b.std_error).abs() < 1e-12);
        }

        #[test]
        fn equal_models_give_empirical_rate(cs in prop::collection::vec(any::<bool>(), 1..60)) {
            let r: Vec<_> = cs.iter().enumerate()
                .map(|(i, &c)| EpisodeLikelihood { episode: i as u64, likelihood: 1.0, collided: c })
                .collect();
            let empirical = cs.iter().filter(|&&c| c).count() as f64 / cs.len() as f64;
            prop_assert!((is_estimate(&r).rate - empirical).abs() < 1e-12);
        }
    }
}
