//! Binary Naming Game on random networks: agent-based simulation, the
//! homogeneous pair approximation with and without committed agents, and
//! the analyses built on them.

pub mod analysis;
pub mod error;
pub mod integrator;
pub mod network;
pub mod oracle;
pub mod output;
pub mod pair;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use integrator::{integrate, OdeConfig, Termination, Trajectory};
pub use network::{generate_er, Network, Opinion};
pub use pair::{LinkState, LinkState6, LinkState9, Mode, NodeFractions};
pub use scalar::{Real, Scalar};
pub use sim::{ensemble, EnsembleStats, SimConfig};

/// Exact rational scalar used by the oracle checks.
pub type Exact = num_rational::BigRational;

pub type Link6 = LinkState6<f64>;
pub type Link9 = LinkState9<f64>;
pub type Fractions = NodeFractions<f64>;
pub type Link6f32 = LinkState6<f32>;
pub type Link9f32 = LinkState9<f32>;
pub type ExactLink6 = LinkState6<Exact>;
pub type ExactLink9 = LinkState9<Exact>;
pub type ExactFractions = NodeFractions<Exact>;
