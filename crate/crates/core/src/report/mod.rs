//! Run configuration, result records, and their CSV/JSON renderings.

mod config;
mod output;
mod record;

pub use config::{Mode, RunConfig, SweepParam, SweepSpec, PRESETS};
pub use output::{fmt_f64, to_json, Table};
pub use record::{
    closed_form, evaluate, record_table, run_sweep, scan_table, summary, sweep_point, sweep_table, sweep_values,
    ClosedForm, Conventions, Ratio, ResultRecord, ANISOTROPY_WARNING, DOPPLER_WARNING,
};
