//! Metrization of cone metric spaces.
//!
//! A cone metric `D : X × X → E` takes values in a space ordered by a cone `P`.
//! This crate computes the scalar metric `d(x, y) = inf{‖u‖ : D(x, y) ≤ u}`,
//! checks the metric axioms on both sides, verifies that contractive conditions
//! stated in the cone order carry over to `d`, and runs fixed-point iterations
//! driven by `d`.

// `!(x <= tol)` is used on purpose so that NaN counts as a violation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axioms;
pub mod cone;
pub mod error;
pub mod fixpoint;
pub mod linalg;
pub mod maps;
pub mod metrics;
pub mod metrize;
pub mod transfer;

pub use cone::{ConeSpec, NormSpec, OrderedVectorSpace};
pub use error::{Error, Result};
pub use maps::{PointMap, SelfMap};
pub use metrics::{ConeMetric, Point, ScalarMetric};
pub use metrize::{metrize_vector, MetrizationMethod, MetrizationResult};
