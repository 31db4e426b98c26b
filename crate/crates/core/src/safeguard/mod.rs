//! Benchmark safeguards: RSS braking and reachable-set brake-or-steer.

mod reachable;
mod rss;
mod tbc;

pub use reachable::{lane_score, reachable_set_supervise, ReachableSetParams};
pub use rss::{rss_distance, rss_margin, rss_supervise, rss_threat, RssParams};
pub use tbc::time_before_collision;
