#![no_std]
// `!(x > 0.0)` guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bec;
pub mod dynamics;
pub mod error;
pub mod kinematics;
pub mod liouvillian;
pub mod ops;
pub mod rates;
pub mod sector;

pub use error::{Error, Result};
pub use kinematics::{AtomSpec, FrameConfig, KinematicState, Wedge};
pub use liouvillian::{DensityMatrix, Generator, SystemHamiltonian};
pub use rates::{CrossPairing, RateSet, Site};
