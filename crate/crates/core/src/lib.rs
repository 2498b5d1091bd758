//! How many votes does a Mean Opinion Score need?
//!
//! `qvotes` resamples crowdsourced ACR rating data at increasing numbers of
//! votes per condition and tracks how validity (agreement with a reference
//! MOS) and reliability (certainty gain, CI width, inter-rater reliability)
//! evolve. Saturating power models `y = a * x^b + c` summarize the curves.
//!
//! Numeric routines in [`stats`], [`bootstrap`], [`modelfit`] and
//! [`special`] are generic over [`Real`]; the aliases below fix the scalar.

pub mod bootstrap;
pub mod data;
pub mod error;
pub mod modelfit;
pub mod real;
pub mod report;
pub mod simulate;
pub mod special;
pub mod stats;

pub use bootstrap::{bootstrap_ci_mos, clopper_pearson, max_ci_width, Interval};
pub use data::{
    empirical_score_dist, empirical_user_prob, load_ratings, load_reference, remove_outliers_iqr,
    OutlierScope, RatingDataset, RatingRecord, ReferenceMos, Score, TableSchema,
};
pub use error::{Error, Result};
pub use modelfit::{evaluate_model, fit_power_model, votes_for_target, PowerModel, TargetVotes};
pub use real::Real;
pub use simulate::{
    certainty_gain, ci_width_curve, irr_curve, irr_full, run_sweep, sample_condition, Metric,
    MetricCurve, SweepConfig,
};
pub use stats::{
    compare_to_reference, fit_first_order_map, mos_plain, mos_user_balanced, rmse, srcc, LinearMap,
    MosKind, MosVector,
};

pub type PowerModel64 = PowerModel<f64>;
pub type PowerModel32 = PowerModel<f32>;
pub type Interval64 = Interval<f64>;
pub type Interval32 = Interval<f32>;
pub type LinearMap64 = LinearMap<f64>;
pub type LinearMap32 = LinearMap<f32>;
