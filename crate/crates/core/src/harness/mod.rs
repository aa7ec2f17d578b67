//! Config parsing, rate curves, posterior simulations and their CSV/SVG files.

pub mod config;
pub mod curves;
pub mod experiment;
pub mod svg;

pub use config::{ChainSettings, ExperimentConfig, GridSpec, Mode};
pub use curves::{rate_curves, CurveSet, RATES_COLUMNS};
pub use experiment::{
    calibrated_ln_eps_n, emit_plot, replicate_seed, run_compare, run_posterior_experiment,
    run_rate_curves, simulate, simulate_replicate, CompareReport, RatesReport, ReplicateOutcome,
    SimAggregate, SimRow, SimulationReport, WrongModelCurve,
};
pub use svg::render_svg;
