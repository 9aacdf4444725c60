//! Comparison of observed graphs with fitted models.

mod capture;
mod gof;
mod histogram;
mod structure;

pub use capture::{ensemble_capture, ensemble_values, CaptureMetric, CaptureReport, FixedGraph, GraphSampler};
pub use gof::{chi_squared_gof, chi_squared_statistic, cumulative_error, ChiSquared};
pub use histogram::{
    default_bins, edge_count_histogram, histogram_csv, model_histogram, Bin, Binning, CountHistogram,
    HistogramSource,
};
pub use structure::{
    avg_clustering, avg_path_length, path_length_detail, saturation_curve, spectral_gap, spectral_gap_detail, Covered,
    SaturationPoint,
};
