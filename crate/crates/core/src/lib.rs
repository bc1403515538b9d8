//! Additive inverse Gaussian noise (AIGN) channel model for molecular timing
//! channels.
//!
//! A molecule released at time `x` drifts (velocity `v`) and diffuses
//! (variance coefficient `σ²`) toward an absorbing receiver at distance `d`.
//! Its arrival is `y = x + n` with `n ~ IG(d/v, d²/σ²)`. This crate provides
//!
//! * the inverse Gaussian law and its GIG parent ([`ig`], [`bessel`]),
//! * the physical channel and a first-passage simulator ([`channel`]),
//! * mutual information and capacity bounds ([`capacity`]),
//! * ML/MAP receivers and error-probability analysis ([`receiver`]).
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]
// NaN-rejecting guards are written `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bessel;
pub mod capacity;
pub mod channel;
pub mod error;
pub mod ig;
pub mod quad;
pub mod receiver;
pub mod rng;
pub mod special;
pub mod stats;

pub use capacity::{InputKind, InputLaw};
pub use channel::{ChannelParams, FirstPassageSim, Observation};
pub use error::{Error, Result};
pub use ig::{combine_additive, GigParams, IgParams};
pub use receiver::{Constellation, DetectionReport, Detector};
