//! Orchestration of the experiments and everything written to disk.
//!
//! Every run uses a single incident wave. Reports carry the tool version and
//! no timing data, so output is byte-identical for identical config and seed.

mod config;
mod oracle_check;
mod pipelines;
mod shapes;
mod uniqueness;

pub use config::{
    DiskCase, ExperimentConfig, LoadedScatterer, NodalConfig, OracleConfig, PathConfig, ScattererEntry,
    ScattererSource, SyntheticSpec, WaveConfig,
};
pub use oracle_check::{disk_row, run_oracle_check, DiskRow, OracleReport, RadialRow, ReciprocityRow};
pub use pipelines::{
    analyse_nodal, analyse_path, near_flat_candidates, nodal_window, pipeline_field, regular_target, run_nodal_pipeline,
    run_path_pipeline, run_solve, NodalArtifacts, NodalReport, PathArtifacts, PathRunReport, PipelineField,
    Refutation, SolveSummary, start_domain,
};
pub use shapes::Shape;
pub use uniqueness::{
    far_field_of, run_uniqueness, translation_phase_residual, DistanceMatrix, ScattererFailure, UniquenessResult,
};

use crate::geometry::GeometryError;
use crate::hiddenpath::PathError;
use crate::nodal::NodalError;
use crate::oracle::OracleError;
use crate::solver::SolverError;
use std::path::Path;
use thiserror::Error;

pub const TOOL_VERSION: &str = concat!("polyscat ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("malformed document: {0}")]
    Parse(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Nodal(#[from] NodalError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl ExperimentError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        ExperimentError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write(dir: &Path, name: &str, contents: &str) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| ExperimentError::io(&path, e))
}
