//! Resonance analysis of complex-type cubic frequency vectors.
//!
//! Exact arithmetic in Q(Ω) ([`field`]), the principal iteration matrix with
//! its full spectrum ([`koch`]), resonant sequences and their oscillation
//! invariants ([`resonances`]), and the exponentially small maximal-splitting
//! estimate built from the lower envelope of the harmonic exponents
//! ([`splitting`]).

pub mod field;
pub mod koch;
pub mod rat;
pub mod real;
pub mod resonances;
pub mod splitting;
