//! Ground-truth networks: random graphs, transmission grids weighted by
//! line physics, balanced power injections and cost networks.

mod adjacency;
mod cost;
pub mod io;
mod power;
mod random;

pub use adjacency::AdjacencyMatrix;
pub use cost::hw_cost_network;
pub use power::{
    assign_powers, line_weight, normalize_network, normalize_weights, synthetic_power_grid, GridSpec,
    PowerLineConstants,
};
pub use random::random_graph;
