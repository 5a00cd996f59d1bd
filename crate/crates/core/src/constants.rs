// SPDX-License-Identifier: Apache-2.0

//! Exact SI / CODATA constants.

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380649e-23;
/// Planck constant, J·s.
pub const H: f64 = 6.62607015e-34;
/// Elementary charge, C.
pub const Q: f64 = 1.602176634e-19;
/// Standard noise reference temperature, K.
pub const T0: f64 = 290.0;
