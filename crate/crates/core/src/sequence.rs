//! The three automatic sequences everything here is built from: the
//! Thue-Morse word `t`, the sequence `x` (a zero followed by the complement
//! of `t`), and the sequence `y` (OEIS A059448), each with a direct
//! evaluator and a frozen base-2 DFAO presentation.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::automaton::{self, Dfao, ParsedAutomaton};
use crate::error::{Error, Result};
use crate::word::BinaryWord;

/// Which sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SequenceId {
    T,
    X,
    Y,
}

impl fmt::Display for SequenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SequenceId::T => "t",
            SequenceId::X => "x",
            SequenceId::Y => "y",
        })
    }
}

impl FromStr for SequenceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" | "T" => Ok(SequenceId::T),
            "x" | "X" => Ok(SequenceId::X),
            "y" | "Y" => Ok(SequenceId::Y),
            other => Err(Error::UnknownBuiltin(other.to_string())),
        }
    }
}

/// `t[n]`: parity of the number of one bits of `n`.
#[inline]
pub fn t_at(n: u64) -> u8 {
    (n.count_ones() & 1) as u8
}

/// `x[n]`: a single 0 followed by the complement of `t`.
#[inline]
pub fn x_at(n: u64) -> u8 {
    if n == 0 {
        0
    } else {
        1 - t_at(n - 1)
    }
}

/// `y[n]`: with `z = 0y`, `z[m]` is the parity of the number of nonleading
/// zeros in the binary representation of `m`; equivalently `y` is the
/// concatenation of the blocks mu^i(0 or 1) with alternating letters.
#[inline]
pub fn y_at(n: u64) -> u8 {
    let m = n + 1;
    let b = 63 - m.leading_zeros() as u64;
    let offset = m - (1 << b);
    t_at(offset) ^ (b & 1) as u8
}

pub fn seq_at(id: SequenceId, n: u64) -> u8 {
    match id {
        SequenceId::T => t_at(n),
        SequenceId::X => x_at(n),
        SequenceId::Y => y_at(n),
    }
}

/// Prefix of length `k` of the Thue-Morse word, by doubling: each prefix of
/// length 2^m is the previous one followed by its complement.
pub fn tm_prefix(k: usize) -> BinaryWord {
    let mut w = BinaryWord::from_bits(&[0]);
    while w.len() < k {
        let c = w.complement();
        w.extend_with(&c);
    }
    w.factor(0, k)
}

pub fn seq_prefix(id: SequenceId, k: usize) -> BinaryWord {
    match id {
        SequenceId::T => tm_prefix(k),
        SequenceId::X => {
            if k == 0 {
                return BinaryWord::new();
            }
            let mut w = BinaryWord::from_bits(&[0]);
            w.extend_with(&tm_prefix(k - 1).complement());
            w
        }
        SequenceId::Y => {
            let mut w = BinaryWord::new();
            let mut block = 0u32;
            while w.len() < k {
                w.extend_with(&n_block(block, (block & 1) as u8));
                block += 1;
            }
            w.factor(0, k)
        }
    }
}

/// The factor `t[ell .. ell+k)`.
pub fn tm_factor(ell: usize, k: usize) -> Result<BinaryWord> {
    if k == 0 {
        return Err(Error::ZeroLength);
    }
    Ok(tm_prefix(ell + k).factor(ell, k))
}

/// The block mu^n(a), of length 2^n.
pub fn n_block(n: u32, a: u8) -> BinaryWord {
    let block = tm_prefix(1usize << n);
    if a == 0 {
        block
    } else {
        block.complement()
    }
}

/// The complete set of length-`k` factors of `t`, computed by scanning
/// prefixes of doubling length until the factor set stabilizes across two
/// consecutive doublings.
pub fn tm_factors_of_length(k: usize) -> Result<BTreeSet<BinaryWord>> {
    if k == 0 {
        return Err(Error::ZeroLength);
    }
    let mut n = (4 * k).max(64);
    let mut prev = factors_of_prefix(k, n);
    loop {
        n *= 2;
        let next = factors_of_prefix(k, n);
        if next.len() == prev.len() {
            return Ok(next);
        }
        prev = next;
    }
}

fn factors_of_prefix(k: usize, n: usize) -> BTreeSet<BinaryWord> {
    let prefix = tm_prefix(n);
    let mut set = BTreeSet::new();
    for i in 0..=n - k {
        set.insert(prefix.factor(i, k));
    }
    set
}

/// Is `v` a factor of the Thue-Morse word?
pub fn is_tm_factor(v: &BinaryWord) -> bool {
    if v.is_empty() {
        return true;
    }
    tm_factors_of_length(v.len()).map(|set| set.contains(v)).unwrap_or(false)
}

const DFAO_T_TEXT: &str = include_str!("dfao_t.dfao");
const DFAO_X_TEXT: &str = include_str!("dfao_x.dfao");
const DFAO_Y_TEXT: &str = include_str!("dfao_y.dfao");

static DFAO_T: OnceLock<Dfao> = OnceLock::new();
static DFAO_X: OnceLock<Dfao> = OnceLock::new();
static DFAO_Y: OnceLock<Dfao> = OnceLock::new();

/// The frozen base-2 DFAO computing the sequence on canonical
/// most-significant-first input. The tables were derived once from the
/// direct evaluators by [`derive_dfao`] and checked in; a test re-derives
/// them.
pub fn dfao_for(id: SequenceId) -> &'static Dfao {
    let (cell, text) = match id {
        SequenceId::T => (&DFAO_T, DFAO_T_TEXT),
        SequenceId::X => (&DFAO_X, DFAO_X_TEXT),
        SequenceId::Y => (&DFAO_Y, DFAO_Y_TEXT),
    };
    cell.get_or_init(|| match automaton::parse(text) {
        Ok(ParsedAutomaton::Dfao(d)) => d,
        _ => unreachable!("embedded sequence table must parse as a dfao"),
    })
}

/// Depth used to derive (and re-verify) the sequence DFAOs.
pub const DFAO_DERIVE_DEPTH: u32 = 16;

/// Derives the DFAO from the direct evaluator by prefix merging and
/// minimization.
pub fn derive_dfao(id: SequenceId) -> Result<Dfao> {
    automaton::learn_dfao_from_oracle(|n| seq_at(id, n), DFAO_DERIVE_DEPTH)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_prefixes() {
        assert_eq!(seq_prefix(SequenceId::T, 16).to_string(), "0110100110010110");
        assert_eq!(seq_prefix(SequenceId::X, 9).to_string(), "010010110");
        assert_eq!(
            seq_prefix(SequenceId::Y, 38).to_string(),
            "01001101001011001101001100101101001011"
        );
        assert_eq!(seq_prefix(SequenceId::X, 0), BinaryWord::new());
    }

    #[test]
    fn point_evaluators_match_prefixes() {
        for id in [SequenceId::T, SequenceId::X, SequenceId::Y] {
            let prefix = seq_prefix(id, 4096);
            for n in 0..4096 {
                assert_eq!(seq_at(id, n as u64), prefix.get(n), "{id}[{n}]");
            }
        }
        assert_eq!(seq_at(SequenceId::T, 5), 0);
        assert_eq!(seq_at(SequenceId::X, 2), 0);
        assert_eq!(seq_at(SequenceId::Y, 4), 1);
    }

    #[test]
    fn factors_of_t() {
        assert_eq!(tm_factor(4, 4).unwrap().to_string(), "1001");
        assert_eq!(tm_factor(6, 4).unwrap().to_string(), "0110");
        assert_eq!(tm_factor(6, 7).unwrap().to_string(), "0110010");
        assert_eq!(tm_factor(0, 5).unwrap(), seq_prefix(SequenceId::T, 5));
        assert!(tm_factor(3, 0).is_err());
    }

    #[test]
    fn blocks() {
        assert_eq!(n_block(0, 0).to_string(), "0");
        assert_eq!(n_block(2, 0).to_string(), "0110");
        assert_eq!(n_block(3, 0).to_string(), "01101001");
        assert_eq!(n_block(2, 1).to_string(), "1001");
    }

    #[test]
    fn factor_enumeration_stabilizes() {
        let f1 = tm_factors_of_length(1).unwrap();
        assert_eq!(f1.len(), 2);
        let f2 = tm_factors_of_length(2).unwrap();
        assert_eq!(f2.len(), 4);
        let f5 = tm_factors_of_length(5).unwrap();
        assert_eq!(f5.len(), 12);
        assert!(is_tm_factor(&"100110010".parse().unwrap()));
        assert!(!is_tm_factor(&"000".parse().unwrap()));
    }

    #[test]
    fn y_is_parity_of_nonleading_zeros_shifted() {
        // z = 0y counts the parity of nonleading zeros of the index
        for m in 1u64..5000 {
            let nonleading_zeros = (64 - m.leading_zeros() as u64 - 1) - (m.count_ones() as u64 - 1);
            let z_m = (nonleading_zeros & 1) as u8;
            assert_eq!(y_at(m - 1), z_m, "m={m}");
        }
    }

    #[test]
    fn frozen_tables_match_rederivation() {
        for id in [SequenceId::T, SequenceId::X, SequenceId::Y] {
            let derived = derive_dfao(id).unwrap();
            assert_eq!(&derived, dfao_for(id), "{id} table drifted:\n{}", derived.serialize());
        }
        assert_eq!(dfao_for(SequenceId::T).state_count(), 2);
        assert_eq!(dfao_for(SequenceId::X).state_count(), 5);
        assert_eq!(dfao_for(SequenceId::Y).state_count(), 5);
    }

    // run with --ignored --nocapture to print fresh tables for the
    // checked-in constants
    #[test]
    #[ignore]
    fn regenerate_frozen_tables() {
        for id in [SequenceId::T, SequenceId::X, SequenceId::Y] {
            println!("== dfao_{id}.dfao ==\n{}", derive_dfao(id).unwrap().serialize());
        }
        println!(
            "== classifier_hk.dfa ==\n{}",
            crate::automaton::learn_classifier().unwrap().serialize()
        );
    }
}
