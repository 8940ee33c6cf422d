//! Event-driven simulator of QoS-assured degraded service provisioning in
//! service-differentiated multi-layer elastic optical networks.
//!
//! When congestion would block an arriving request, the simulator can
//! degrade service instead: in the electric layer by slowing existing
//! transfers down and prolonging their holding times (volume is conserved,
//! deadlines are honored), and in the elastic optical layer by shrinking
//! lightpath spectrum while raising modulation (capacity is conserved,
//! reach limits are honored). Degraded routes are chosen either for fewest
//! hops (MinRH) or fewest potentially affected requests (MinPDR).
//!
//! The `book/` directory of the repository walks through the concepts; the
//! `eonsim` binary drives batch experiments over load, policy, and seed.
//!
//! ```
//! use eonsim::net::{self, Layer};
//! use eonsim::routing;
//!
//! let net = net::load_topology(net::usnet_text()).unwrap();
//! let route = routing::min_rh_route(&net, Layer::Optical, 0, 23, 10.0).unwrap();
//! assert!(route.rh >= 4); // coast to coast takes a few hops
//! ```

#[cfg(doctest)]
mod book;
pub mod cli;
pub mod electric;
pub mod engine;
pub mod metrics;
pub mod net;
pub mod optical;
pub mod routing;
pub mod traffic;

pub use electric::{ed_ba, max_degraded_rate, AllocationPlan, ServiceRequest};
pub use engine::{run, PolicyConfig, SimConfig, SimulationReport};
pub use net::{load_topology, Layer, MultiLayerNet};
pub use optical::{ModulationTable, OpticalOutcome};
pub use routing::{min_pdr_route, min_rh_route, DegradedRoute, RoutePolicy};
pub use traffic::WorkloadConfig;
