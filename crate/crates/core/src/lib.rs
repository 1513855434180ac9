//! Wave-optics and photon-counting model of heralded and ghost double-slit
//! experiments driven by a spontaneous parametric down-conversion source.
//!
//! The crate is `no_std` with `alloc`. File formats and the command line
//! live in the companion `heraldsim` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod biphoton;
pub mod detect;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod field;
pub mod optics;
pub mod rng;

pub use error::{Error, Result};
pub use field::{Axis, ComplexField};
