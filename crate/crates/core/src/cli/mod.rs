//! Case files, the coupled run loop and result output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{dump_case, load_case, parse_case, CaseConfig, ConfigError};
pub use output::{surface_csv, vtk_unstructured, write_fields};
pub use run::{run_case, FilmSolver, Results, RunError, Stage};
