//! Experiment runner: configurations, boundedness probes, sweeps and the
//! flat-file reports consumed by plotting and acceptance scripts.

pub mod config;
pub mod probe;
pub mod report;
pub mod sweep;

pub use config::{CurveSpec, Depth, ExperimentConfig, ExponentSpec, FamilySpec, IndexSource};
pub use probe::{classify_trend, run_probe, test_family, LevelReport, ProbeReport, Trend, GROWTH_FACTOR};
pub use report::{fmt17, write_json, write_maximal_csv, write_probe_csv, write_submult_csv, write_weight_csv};
pub use sweep::{gamma_rectangle, run_sweep, write_sweep_csv, SweepRow, SWEEP_HEADER};
