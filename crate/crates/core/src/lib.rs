//! Hierarchical polar coding for block-fading channels.
//!
//! This crate implements a channel-coding stack built around binary polar
//! codes:
//!
//! * [`polar`] — encoding transform, reliability-based code construction,
//!   and successive-cancellation decoding for BSC and BEC observations.
//! * [`fading`] — the hierarchical scheme for block-fading binary symmetric
//!   channels: polar codes over channel uses combined with erasure-channel
//!   polar codes over fading blocks, so that no channel state information is
//!   needed at the transmitter.
//! * [`sim`] — seeded channel models (block-fading BSC, BPSK-over-AWGN
//!   reduction, fading additive exponential noise) with reproducible
//!   substream randomness.
//! * [`expansion`] — expansion coding for the fading additive exponential
//!   noise channel: binary expansion of inputs and noise, per-level fading
//!   BSC codes, carry resolution, and the associated rate analysis.
//!
//! All structural types are immutable after construction and safe to share
//! across threads; decoding allocates private working memory per call.

pub mod bits;
pub mod error;
pub mod expansion;
pub mod fading;
pub mod math;
pub mod polar;
pub mod sim;

pub use bits::BitVector;
pub use error::{Error, Result};
pub use fading::{FadingProfile, SetPartition};
pub use polar::{ChannelObservation, PolarCodeSpec};
pub use sim::{AenProfile, AwgnFadingProfile, Seed};
