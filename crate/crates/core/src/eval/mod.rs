//! Trajectory error metrics, next-camera accuracy and the results table.

pub mod metrics;
pub mod report;

pub use metrics::{
    ade, align_nearest_time, fde, fde_axis, per_step_errors, topk_accuracy, PredictionCase, TopK, TrajectoryPair,
};
pub use report::{render_report, rows_from_json, write_per_step, ReportRow, REPORT_COLUMNS};
