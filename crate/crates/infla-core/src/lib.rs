//! Numerical core for cross-sectional time-series structure analysis.
//!
//! The crate works on rectangular panels of dated observations (price or
//! index levels for a set of named entities) and provides five families of
//! analysis on top of them:
//!
//! * [`panel`] — panel data model, log returns and unit-L1 trajectory
//!   scaling shared by everything else.
//! * [`distance`] — pairwise L1 trajectory distances and agglomerative
//!   hierarchical clustering of the resulting matrix.
//! * [`spectrum`] — Jacobi eigendecomposition of symmetric matrices,
//!   threshold-based similarity counts and a power-iteration operator norm.
//! * [`centrality`] — rolling-regression slope trajectories, lead-lag
//!   offset search by normalized inner product, and offset-sum centrality
//!   scores.
//! * [`robustness`] — return distributions conditioned on extreme deciles
//!   of a driver series, compared with the 1-D Wasserstein distance.
//! * [`sectorcorr`] — rolling mean pairwise correlation within entity
//!   groups and window averages thereof.
//! * [`optimizer`] — rolling constrained maximization of excess return
//!   over portfolio variance with a fixed core holding and box bounds.
//!
//! All types are immutable after construction and every operation is a pure
//! function, so values can be shared freely across threads.
//!
//! The crate is `no_std`-compatible (with `alloc`): disable the default
//! `std` feature and enable `libm` to supply the float math.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod centrality;
pub mod date;
pub mod distance;
pub mod error;
pub(crate) mod fp;
pub mod matrix;
pub mod optimizer;
pub mod panel;
pub mod robustness;
pub mod sectorcorr;
pub mod spectrum;

pub use date::{Date, Frequency};
pub use error::{Error, Result};
pub use matrix::SquareMatrix;
pub use panel::{Column, NormalizedTrajectory, ReturnsPanel, TimeSeriesPanel};
