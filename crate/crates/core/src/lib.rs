//! Robust linear classification against strategic feature manipulation when
//! the manipulation cost is only known up to an uncertainty set.
//!
//! Agents facing a published linear classifier move their features to obtain a
//! positive prediction whenever the movement cost (a scaled p-norm) stays
//! below their utility. When the per-dimension cost scaling is unknown, the
//! learner can still certify and optimize worst-case performance over a box of
//! plausible scalings. This crate provides:
//!
//! - the shared domain types and derived constants ([`domain`]),
//! - scaled dual norms, their subgradients, and extrema over the uncertainty
//!   set ([`norms`]),
//! - agent best-response simulation and the strategic loss family
//!   ([`response`]),
//! - an exact breakpoint sweep maximizing strategic hinge risk over the cost
//!   set, plus a plug-in generalization certificate ([`adversary`]),
//! - two convergent minimax solvers: a full-batch subgradient method and
//!   stochastic mirror descent-ascent over a discretized cost net, together
//!   with convexity diagnostics ([`solvers`]),
//! - closed-form and Monte Carlo analysis of how badly a misspecified cost
//!   can hurt ([`analysis`]),
//! - CSV I/O and reproducible synthetic samplers ([`data`]).

pub mod adversary;
pub mod analysis;
pub mod data;
pub mod domain;
mod error;
pub mod norms;
pub mod response;
pub mod solvers;
pub(crate) mod util;

pub use domain::{
    lipschitz_constants, Classifier, CostModel, CostUncertaintySet, LabeledDataset, PNormSpec,
    SolveConfig, StrategicParams, DEFAULT_TOLERANCE,
};
pub use error::{Error, Result};
