//! Highway traffic simulation and collision-avoidance safeguards.
//!
//! The crate is organized bottom-up:
//!
//! - [`world`]: road geometry, ego kinematics, trajectory segments, collision
//!   detection and the ego's bounded observation of the scene.
//! - [`traffic`]: surrounding-vehicle behavior (IDM car following, MOBIL lane
//!   changes, aggressive parameter sampling, spawning and the physics step).
//! - [`policy`]: the ego driving policies (Gipps, human-like IDM+MOBIL) and the
//!   candidate action set used by the planner.
//! - [`safeguard`]: the benchmark safeguards (RSS braking, reachable-set
//!   brake-or-steer).
//! - [`belief`]: per-vehicle particle filters over hidden driver parameters.
//! - [`planner`]: the driving-policy adaptive safeguard, a policy-adaptive
//!   Monte-Carlo tree search over a belief-conditioned generative model.
//! - [`calibration`]: importance-sampling re-weighting of simulated collisions.
//! - [`harness`]: episodes, the experiment matrix, metrics and CSV output.

pub mod belief;
pub mod calibration;
pub mod error;
pub mod harness;
pub mod planner;
pub mod policy;
pub mod rng;
pub mod safeguard;
pub mod traffic;
pub mod world;

pub use error::{Error, Result};
