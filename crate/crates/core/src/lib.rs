//! Code verification for a one-dimensional finite-volume advection solver
//! using a manufactured solution.
//!
//! ```
//! use advect_verify::driver::{compute, preset};
//!
//! let outcome = compute(&preset("fig1b").unwrap()).unwrap();
//! assert!(outcome.bands_satisfied());
//! ```

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod banded;
pub mod driver;
pub mod errmodel;
mod error;
pub mod grid;
pub mod manufactured;
pub mod march;
pub mod scheme;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/manufactured.md")]
    mod manufactured {}
    #[doc = include_str!("../../../book/src/scheme.md")]
    mod scheme {}
    #[doc = include_str!("../../../book/src/time.md")]
    mod time {}
    #[doc = include_str!("../../../book/src/convergence.md")]
    mod convergence {}
    #[doc = include_str!("../../../book/src/error-model.md")]
    mod error_model {}
    #[doc = include_str!("../../../book/src/remedy.md")]
    mod remedy {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
