//! Batch front end: problem-spec files in, deterministic JSON reports out.

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod report;
pub mod run;
pub mod spec;

pub use report::{render_report, write_report, ReportFile};
pub use run::{execute, execute_with_plot, Command};
pub use spec::{parse_problem_file, parse_problem_str, ProblemSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema violations:\n  {}", .0.join("\n  "))]
    Schema(Vec<String>),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => run::EXIT_SCHEMA,
            CliError::Io { .. } => run::EXIT_IO,
        }
    }
}
