//! Experiment files, sweeps, DoF extraction and deterministic CSV/SVG output.

pub mod csv;
mod run;
mod spec;
pub mod svg;

pub use run::{
    evaluate_row, format_report, load_config_set, parse_config_set, run_dof, run_eval, run_sweep,
    run_verify, RunOutput, DEFAULT_VERIFY_SET, VERIFY_REPORT,
};
pub use spec::{
    load_config, mc_from_toml, parse_experiment, read_text, validate_config, ConfigToml, DofSpec,
    ExperimentSpec, McOverrides, McToml, Sweep, SweepParameter,
};
