//! Exact arithmetic for the extended bicyclic semigroup `E = {a_ij : i, j ∈ Z}`
//! with `a_ij a_pq = a_{i+p-min(j,p), j+q-min(j,p)}`, viewed as a semiheap
//! under `[x y z] = x y* z`.
//!
//! - [`element`]: products, adjoints and the closed-form triple product.
//! - [`window`], [`family`], [`closure`]: finite views, symbolic
//!   subsemiheap families and saturation.
//! - [`classify`], [`enumerate`]: case labels, family recovery and
//!   exhaustive cross-checks on small windows.
//! - [`tro`]: the truncated left regular representation and norm checks.

pub mod classify;
pub mod closure;
pub mod element;
pub mod enumerate;
pub mod error;
pub mod family;
pub mod tro;
pub mod window;

pub use classify::{classify, compute_parameters, Bound, CaseLabel, ClassificationReport, Parameters};
pub use closure::{closure, is_window_semiheap, padded_closure, Violation};
pub use element::{
    adjoint, derived_pair_neg, derived_pair_pos, idempotent_le, is_idempotent, product, translate,
    triple, triple_oracle, Derived, Element, TripleCase,
};
pub use enumerate::{cross_validate, enumerate_window_semiheaps, CrossValidation};
pub use error::{Error, Result};
pub use family::Family;
pub use window::{Charset, ElementSet, Window};
