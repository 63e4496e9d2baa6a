use std::path::PathBuf;

use pachlab_core::bounds::BoundError;
use pachlab_core::cochains::CochainError;
use pachlab_core::coloring::ColoringError;
use pachlab_core::extraction::ExtractionError;
use pachlab_core::join_complex::ComplexError;
use pachlab_core::pipeline::PipelineError;
use pachlab_core::pl_map::MapError;
use pachlab_core::sphere::SphereError;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{command} is randomized and needs an explicit --seed")]
    MissingSeed { command: &'static str },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Extraction(#[from] ExtractionError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::MissingSeed { .. } => "missing_seed",
            CliError::Io { .. } => "io",
            CliError::Parse(_) => "parse",
            CliError::Complex(_) => "complex",
            CliError::Cochain(_) => "cochains",
            CliError::Bound(_) => "bounds",
            CliError::Coloring(_) => "coloring",
            CliError::Sphere(_) => "sphere",
            CliError::Map(_) => "map",
            CliError::Pipeline(PipelineError::InvalidMap(_)) => "invalid_map",
            CliError::Pipeline(_) => "pipeline",
            CliError::Extraction(_) => "extraction",
        }
    }

    pub fn details(&self) -> Value {
        match self {
            CliError::Pipeline(PipelineError::InvalidMap(report)) => json!({
                "violations": report.violations,
                "segments_checked": report.segments_checked,
            }),
            _ => Value::Null,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::MissingSeed { .. } => 2,
            _ => 1,
        }
    }
}
