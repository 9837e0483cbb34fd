//! Seeded Monte-Carlo path generation.
//!
//! Every normal draw is a pure function of `(seed, stream, path, step)`
//! through a Philox-4×32-10 counter-based generator, so a simulation is
//! bit-identical whatever the number of worker threads.

mod grid;
mod paths;
mod rng;
mod schemes;

pub use grid::TimeGrid;
pub use paths::{fmt17, PathSet};
pub use rng::{philox4x32_10, RngSpec};
pub use schemes::{
    euler_drifted, euler_driftless, euler_path, euler_summaries, map_paths, quadratic_variation, sample_vasicek_exact, simulate_gaussian_diffusion,
    simulate_rows, GaussianDiffusionParams, PathSummary, TimeFn,
};
