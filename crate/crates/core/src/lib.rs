// SPDX-License-Identifier: Apache-2.0

//! Measurement-analysis toolkit for mm-wave cryogenic qubit-control amplifiers.
//!
//! The crate is split by concern:
//!
//! - [`touchstone`]: Touchstone v1 (`.s1p`/`.s2p`) reading and writing.
//! - [`network`]: two-port algebra (S/Z/Y/ABCD/T conversions, cascade,
//!   de-embedding, interpolation, passivity and reciprocity checks).
//! - [`noise`]: noise temperature / noise figure conversions, Friis cascades
//!   and the cold-source DUT noise-figure extraction.
//! - [`metrics`]: center frequency, 3 dB band and input-referred P1dB.
//! - [`cryo`]: constant current-density back-gate solving and coupled
//!   inductor L/Q/k extraction with RT vs. cryogenic comparison.
//! - [`qubitlink`]: spin-qubit drive requirements and the pass/fail budget.

pub mod constants;
pub mod cryo;
mod interp;
pub mod metrics;
pub mod network;
pub mod noise;
pub mod qubitlink;
pub mod touchstone;

pub use network::{Mat2, RepresentationKind, TwoPortNetwork};
pub use touchstone::{parse_touchstone, serialize_touchstone, TouchstoneDocument};

