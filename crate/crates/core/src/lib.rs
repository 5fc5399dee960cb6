//! Random graphical games with two actions per player.
//!
//! The crate samples games on a fixed or random interaction graph, counts
//! their pure Nash equilibria exactly, searches for small certificates that
//! no equilibrium exists, evaluates the per-graph Stein–Chen quantities that
//! bound the distance of the equilibrium count from Poisson(1), and runs
//! reproducible Monte Carlo sweeps over `G(n, p)`.

pub mod error;
pub mod experiments;
pub mod game;
pub mod graph;
pub mod pne;
pub mod stein;
pub mod witness;

pub use error::{Error, Result};
pub use game::{GraphicalGame, Profile};
pub use graph::Graph;
