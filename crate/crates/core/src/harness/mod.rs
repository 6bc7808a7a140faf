mod experiment;
mod grids;
mod instances;

pub use grids::{planar_grid, toroidal_grid, GridOrientation};
pub use instances::{
    add_reverse_twins, default_corpus, disjoint_union, drop_arcs, generate, shuffle_rotations, CostModel, Family,
    InstanceSpec,
};
pub use experiment::{
    materialize, read_corpus, run_experiment, write_corpus, write_report, CorpusEntry, ExperimentConfig, ReportRow,
    REPORT_COLUMNS, REPORT_VERSION,
};
