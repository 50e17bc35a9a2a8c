//! Discrete-event simulator of all-optical LEO satellite constellations.
//!
//! Models Walker-Delta constellations with grid LISL topologies, a free
//! space optics link budget with turbulence and pointing impairments, four
//! onboard switch fabric technologies, Poisson chunk traffic between ground
//! stations, K-shortest-path wavelength scheduling, and the resulting
//! blocking ratio, latency, and energy efficiency metrics.

pub mod channel;
pub mod config;
pub mod engine;
pub mod orbit;
pub mod report;
pub mod routing;
pub mod switch;
pub mod topology;
pub mod traffic;

pub use channel::LinkBudgetParams;
pub use config::ScenarioConfig;
pub use engine::{run, RunOutput, Scenario};
pub use orbit::{preset, WalkerDeltaSpec, PRESET_NAMES};
pub use report::{summarize, SimReport};
pub use routing::RoutingMetric;
pub use switch::{builtin_fabrics, lookup, SwitchFabric};
