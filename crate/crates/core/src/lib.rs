//! Line-of-sight MIMO channel analysis.
//!
//! Builds channel matrices from antenna array geometry, evaluates
//! equal-power log-det capacity, solves the quarter-wavelength path
//! difference design equations for parallel 2×2 arrays, and turns
//! per-pair frequency sweeps into measured channels and capacities.
//!
//! ```
//! use losmimo::{build_parallel_ulas, capacity, los_channel, optimal_spacing};
//! use losmimo::{Carrier, LosModel, Normalization, Snr};
//!
//! let carrier = Carrier::from_frequency(340e9).unwrap();
//! let design = optimal_spacing(0.20, &carrier, 0).unwrap();
//! let link = build_parallel_ulas(2, design.spacing, design.distance).unwrap();
//! let h = los_channel(&link.distance_matrix(), &carrier, LosModel::PhaseOnly);
//! let c = capacity(&h, Snr::from_db(0.0).unwrap(), Normalization::None).unwrap();
//! assert!((c.bps_per_hz - 2.0).abs() < 1e-4);
//! ```

pub mod capacity;
pub mod channel;
pub mod design;
pub mod fixture;
pub mod format;
pub mod geometry;
pub mod linalg;
pub mod measurement;
pub mod plot;
pub mod sweep;

pub use capacity::{
    capacity, capacity_2x2_closed_form, orthogonality_defect, CapacityError, CapacityResult, Normalization, Snr,
};
pub use channel::{apply_gains, los_channel, Carrier, ChannelError, ChannelMatrix, ChannelModel, GainProfile, LosModel};
pub use design::{optimal_distances, optimal_spacing, refine_exact, DesignError, DesignSolution, Vary};
pub use geometry::{build_parallel_ulas, ArrayGeometry, DistanceMatrix, GeometryError, LinkGeometry, Point3, Rotation3};
pub use linalg::ComplexMatrix;
pub use measurement::{
    channel_from_sweeps, measured_capacity, noise_floor, snr_estimate, MeasurementError, MeasurementSweep, Pair,
    SnrEstimate, SnrPolicy,
};
pub use plot::{emit_plot, PlotError};
pub use sweep::{run_sweep, Grid, PathModel, SweepError, SweepResult, SweepRow, SweepSpec, SweepVariable};

pub use num_complex::Complex64;
