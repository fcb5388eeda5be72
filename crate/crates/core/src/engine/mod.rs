//! The optimization loops and their bookkeeping.

pub mod config;
pub mod crowding;
pub mod evaluator;
pub mod population;
pub mod run;

pub use config::{Algorithm, GammaSampling, RunConfig};
pub use crowding::{crowding_gamma, stationarity_met, window_deviation};
pub use evaluator::{EvalError, Evaluator};
pub use population::{apply_decision, population_update, sbd_decision, std_decision, Decision};
pub use run::{
    run, run_with_observer, time_saving, time_saving_counts, wall_time_saving, Engine, RunResult,
    StopReason, TraceRecord,
};
