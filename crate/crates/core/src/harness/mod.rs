//! Experiment orchestration: replicates, covariance estimation, normality
//! and proportionality checks, de-Poissonized runs, reports and the CLI.

pub mod cli;
mod config;
mod covariance;
mod experiments;
mod normality;
mod radius;
mod replicates;
mod report;

pub use config::{ExperimentConfig, Mode, SigmaSettings};
pub use covariance::{
    estimate_covariance, scaling_diagnostic, scaling_report, white_noise_check, white_noise_check_with,
    CovarianceEstimate, PairCheck, ProportionalityReport, ScalingReport,
};
pub use experiments::{
    clt_experiment, depoisson_experiment, empirical_process_experiment, fixed_n_experiment, CltReport, Criterion,
    EmpiricalProcessReport, EmpiricalScale, ReferenceCovariance, ScaleResult,
};
pub use normality::{
    bootstrap_p_value, ks_normal_statistic, lilliefors_null, test_normality, NormalityReport, ProjectionResult,
    BOOTSTRAP_RESAMPLES,
};
pub use radius::{stab_radius_experiment, RadiusEntry, StabRadiusConfig, StabRadiusReport};
pub use replicates::{run_replicates, SampleMatrix};
pub use report::{
    emit_report, qq_points, qq_svg, write_covariance_csv, write_histogram_csv, write_json, write_plot_data,
    write_qq_csv, write_samples_csv,
};
