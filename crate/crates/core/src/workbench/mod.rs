//! Configuration, pipelines, error metrics and result files.

pub mod config;
pub mod metrics;
pub mod output;
pub mod pipeline;

pub use config::{IntegralSource, RunConfig};
pub use metrics::{barrier, max_error, npe, HARTREE_TO_KCAL};
pub use output::{curve_csv, curve_json, write_curve, write_point};
pub use pipeline::{
    build_ansatz, prepare_system, run_curve, run_point, CurveResult, CurveRun, PointArtifacts, PointRecord,
    PreparedSystem,
};
