//! Definitional reference implementations.
//!
//! Everything here follows the definitions directly — all factors, all
//! periods — with no algorithmic shortcuts, and works over any alphabet.
//! These are the oracles the fast bit-packed implementations are tested
//! against; keep them independent of [`crate::repetition`].

use crate::error::{Error, Result};
use crate::exponent::Rational;
use crate::word::{BinaryWord, CubeWitness, RepetitionWitness};

/// Smallest period by scanning p = 1, 2, ... and checking the definition.
pub fn smallest_period<T: Eq>(w: &[T]) -> Result<usize> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let n = w.len();
    for p in 1..=n {
        if (0..n - p).all(|i| w[i] == w[i + p]) {
            return Ok(p);
        }
    }
    unreachable!("p = n is always a period")
}

pub fn exponent<T: Eq>(w: &[T]) -> Result<Rational> {
    let p = smallest_period(w)?;
    Ok(Rational::new(w.len() as i64, p as i64))
}

/// Critical exponent with witness, by tabulating for every period `p` the
/// maximal stretches where `w[i] = w[i+p]`. Every factor's exponent is
/// `len/p` for some period `p` of it, so the maximum over all `(i, p)` pairs
/// is the critical exponent. Ties are broken by smallest period, then
/// smallest starting position.
pub fn critical_exponent<T: Eq>(w: &[T]) -> Result<(RepetitionWitness, Rational)> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let n = w.len();
    let mut best = (RepetitionWitness { position: 0, length: 1, period: 1 }, Rational::new(1, 1));
    for p in 1..n {
        let mut run = 0usize;
        let mut max_run = 0usize;
        let mut max_start = 0usize;
        for i in 0..n - p {
            if w[i] == w[i + p] {
                run += 1;
                if run > max_run {
                    max_run = run;
                    max_start = i + 1 - run;
                }
            } else {
                run = 0;
            }
        }
        let ratio = Rational::new((p + max_run) as i64, p as i64);
        if ratio > best.1 {
            best = (
                RepetitionWitness { position: max_start, length: p + max_run, period: p },
                ratio,
            );
        }
    }
    Ok(best)
}

/// Leftmost cube of smallest period, by the same tabulation.
pub fn contains_cube<T: Eq>(w: &[T]) -> Option<CubeWitness> {
    let n = w.len();
    for p in 1..=n / 3 {
        let mut run = 0usize;
        for i in 0..n - p {
            if w[i] == w[i + p] {
                run += 1;
                if run == 2 * p {
                    return Some(CubeWitness { position: i + 1 - run, period: p });
                }
            } else {
                run = 0;
            }
        }
    }
    None
}

pub fn smallest_period_word(w: &BinaryWord) -> Result<usize> {
    smallest_period(&w.to_bytes())
}

pub fn exponent_word(w: &BinaryWord) -> Result<Rational> {
    exponent(&w.to_bytes())
}

pub fn critical_exponent_word(w: &BinaryWord) -> Result<(RepetitionWitness, Rational)> {
    critical_exponent(&w.to_bytes())
}

pub fn contains_cube_word(w: &BinaryWord) -> Option<CubeWitness> {
    contains_cube(&w.to_bytes())
}
