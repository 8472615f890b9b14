//! Experiment driver: configuration, extrapolation, CSV output and the
//! canonical experiments behind the command line.

pub mod config;
pub mod csv;
pub mod experiments;
pub mod extrapolate;

pub use config::{Dump, EvolveKind, Experiment, ExperimentConfig, RawConfig, KEYS};
pub use csv::{fmt_num, Cell, CsvTable};
pub use experiments::{run_experiment, Gate, Outcome};
pub use extrapolate::{extrapolate, romberg_weights, ExtrapolationModel, ExtrapolationResult};
