//! Continuum-percolation model of malware spreading over device-to-device
//! links when randomly placed spatial firewalls protect every device within
//! their secured-zone radius.
//!
//! - [`spatial`]: Poisson point processes and grid neighbor queries.
//! - [`network`]: device classification, the infection-susceptible graph.
//! - [`percolation`]: spanning detection, Monte Carlo estimates, critical search.
//! - [`bounds`]: closed-form thresholds and bounds.
//! - [`lattice`]: geometric validators for the lattice couplings.

pub mod bounds;
pub mod error;
pub mod lattice;
pub mod network;
pub mod percolation;
pub mod seed;
pub mod spatial;

pub use bounds::{evaluate_all, BoundsReport, LambdaC1};
pub use error::{Error, Result};
pub use network::{build_isg, NetworkConfig, Realization};
pub use percolation::{
    estimate_percolation_probability, find_critical_firewall_intensity, CriticalSearch, CriticalSearchResult,
    PercolationEstimate,
};
pub use spatial::{sample_ppp, Point, PointSet, Window};
