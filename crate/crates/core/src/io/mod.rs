//! Configuration files, run artifacts and the external evaluator.

pub mod artifacts;
pub mod config;
pub mod external;

pub use artifacts::{
    load_archive_csv, read_archive_csv, save_archive_csv, write_archive_csv, ArchiveRow,
    Compromise, Summary, TraceWriter,
};
pub use config::{parse_config, ConfigFile, Problem, ProblemSpec};
pub use external::ExternalEvaluator;
