//! Core of the curricle workbench: dense tensors with reverse-mode
//! differentiation, a miniature transformer text classifier, dataset
//! handling, curriculum pacing regimes, and the forgetting/attention
//! analyses built on top of them.
//!
//! The crate is `no_std` (with `alloc`). Everything that touches the
//! filesystem or a terminal lives in the companion `curricle` crate;
//! this one only turns values into values, bytes, and strings.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod curriculum;
pub mod data;
pub(crate) mod math;
pub mod model;
pub mod numerics;
pub mod seed;
