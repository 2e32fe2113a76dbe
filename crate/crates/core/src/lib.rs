//! Uplink channels between single-antenna users and a large intelligent
//! surface (LIS): a square, edge-to-edge planar array centered at the origin
//! of the XY-plane.
//!
//! The crate provides
//!
//! * the element grid and transmitter geometry ([`geometry`]),
//! * exact per-element gains (with or without polarization mismatch), phases,
//!   far-field approximations, closed-form channel norms and streaming
//!   sufficient statistics ([`channel`]),
//! * MR and MMSE combining SINR and spectral efficiency ([`combining`]),
//! * deterministic experiment runners that produce tabular records
//!   ([`experiments`]).
//!
//! Every SINR used by the experiment runners is derived from three scalars,
//! `‖h₁‖²`, `‖h₂‖²` and `h₁ᴴh₂`, which are accumulated in one streaming pass
//! over the elements, so arrays with 10⁷–10⁸ elements never need to be
//! materialized.
//!
//! The crate is `no_std` (with `alloc`) when built without default features.
//! The `parallel` feature (on by default) spreads element and sweep-point work
//! over a rayon thread pool; results are bit-identical to the serial path.
#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod channel;
pub mod combining;
mod error;
pub mod experiments;
pub mod geometry;
mod math;
mod par;
pub mod sum;

pub use channel::{ChannelModel, ChannelStats, Complex, PolarizationMode};
pub use combining::{CombinerKind, LinkBudget, SinrReport};
pub use error::{Error, Result};
pub use geometry::{ElementGrid, Point3, UePolar};
