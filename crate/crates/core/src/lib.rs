//! Power-free complementary binary morphisms.
//!
//! A library for repetition avoidance in binary words: exact critical
//! exponents, the ordered domain of exponent thresholds, complementary
//! morphisms built from the Thue-Morse word and two related automatic
//! sequences, the Kobayashi freeness criterion, base-2 automata, and a
//! registry of desk-scale verification checks.

pub mod automaton;
pub mod checks;
pub mod error;
pub mod exponent;
pub mod freeness;
pub mod morphism;
pub mod naive;
mod repetition;
pub mod sequence;
pub mod word;

pub use error::{Error, Result};
pub use exponent::{ExtExponent, Rational};
pub use word::{BinaryWord, CubeWitness, Occurrence, RepetitionWitness};
