//! Single-step integrators recorded on a tape, plus untaped data
//! generators for the Kuramoto and Harris-Wilson systems.

mod generate;
mod harris_wilson;
mod kuramoto;
mod params;
mod series;

pub use generate::{
    equilibrate, generate_hw_dataset, generate_kuramoto_dataset, line_loads, select_loaded_cuts, simulate_power_cut,
    Equilibrium, HwDataSpec, PowerCutRecord, PowerCutSpec,
};
pub use harris_wilson::{
    demand_plain, demand_taped, harris_wilson_step, harris_wilson_step_plain, W_FLOOR,
};
pub use kuramoto::{
    coupling_sums, first_order_plain, kuramoto_step_first_order, kuramoto_step_second_order, second_order_plain,
    KuramotoTape,
};
pub use params::{HarrisWilsonParams, KuramotoParams, NoiseScheme, Order};
pub use series::{HwSeries, TimeSeries};
