//! Surrounding-vehicle behavior: IDM car following with velocity noise, MOBIL
//! lane changes, aggressive parameter sampling, spawning and the physics step.

mod idm;
mod mobil;
mod params;
mod scene;
mod spawn;
mod step;

pub use idm::{idm_acceleration, idm_deterministic, Lead};
pub use mobil::{mobil_decide, LaneChangeEval, LaneDecision};
pub use params::{DriverParams, Interval, ParamField, ParamIntervals, SpawnConfig};
pub use scene::{Agent, Scene};
pub use spawn::{maintain_corridor, spawn_traffic, spawn_with_density, Corridor, SpawnRecord};
pub use step::{advance_traffic, StepReport, TrafficModel};

pub(crate) use idm::idm_or_brake;
pub(crate) use scene::lead_of;
