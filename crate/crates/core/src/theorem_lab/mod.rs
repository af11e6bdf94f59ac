//! Desk-scale checks of the submatrix value gap, the naive Chernoff bounds on
//! random game values, and query-count scaling of the packing solver.

mod bounds;
mod fit;
mod gap;
mod scaling;

pub use bounds::{
    bound_calibration_experiment, naive_bound, predicted_beta, BoundDirection, BoundEstimate, CalibrationConfig,
    CalibrationRow,
};
pub use fit::{least_squares, LineFit};
pub use gap::{
    min_submatrix_value, min_submatrix_value_guarded, sampled_min_submatrix_value, theorem1_gap_experiment, GapCheckConfig,
    GapExperiment, GapReport, SeedSummary, SizeBranch, SubmatrixMin, ENUMERATION_GUARD,
};
pub use scaling::{
    fit_slopes, iteration_scaling_experiment, run_scaling_cell, ExperimentRecord, ScalingCell, ScalingConfig, ScalingRun, ScalingVariable,
    SlopeFit,
};
