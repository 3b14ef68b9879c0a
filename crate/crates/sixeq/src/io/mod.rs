//! Configuration files, CSV snapshots, plot-script emission and run
//! comparison: everything the CLI needs around the solver.

mod config;
mod plot;
mod snapshot;

pub use config::{
    parse_case_file, parse_case_str, parse_config, parse_config_str, serialize_case,
    write_case_file, CaseSource, RunConfig,
};
pub use plot::emit_plot_script;
pub use snapshot::{
    compare_tables, read_snapshot, write_snapshot, DiffReport, FieldDiff, SnapshotTable,
};
