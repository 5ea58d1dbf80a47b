//! Sparse, cost-sensitive class-imbalance learning for point-anomaly detection.
//!
//! The crate is organised bottom-up:
//!
//! - [`sparse`], [`libsvm`], [`normalize`]: sparse rows, LIBSVM ingestion and
//!   column scaling for batch training.
//! - [`metrics`]: confusion accounting, Gmean / F-measure / Sum / mistake rate
//!   and online traces.
//! - [`losses`]: the cost-sensitive hinge, its smooth squared variant and the
//!   running class statistics that drive the online penalty.
//! - [`online`]: PA / PA-1 / PA-2, their cost-sensitive (PAGMEAN) versions and
//!   the accelerated stochastic proximal learner.
//! - [`optim`]: soft-thresholding, FISTA, L-BFGS, random coordinate descent
//!   and the cost-weighted batch objective.
//! - [`distributed`]: an in-process allreduce bus with consensus-ADMM and
//!   distributed FISTA trainers on top.
//! - [`svdd`]: kernel center-of-mass one-class detection.
//! - [`synthetic`]: seeded generators for imbalanced test streams.

pub mod distributed;
pub mod error;
pub mod libsvm;
pub mod losses;
pub mod metrics;
pub mod normalize;
pub mod online;
pub mod optim;
pub mod sparse;
pub mod svdd;
pub mod synthetic;

pub use error::{Error, Result};
pub use sparse::{Label, LabeledInstance, SparseVector};
