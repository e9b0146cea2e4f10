//! Bit-packed binary words with exact period and exponent computation.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{ExtExponent, Rational};
use crate::repetition;

const BLOCK_BITS: usize = 64;

/// A finite word over {0,1}, stored in 64-bit blocks, least significant bit
/// first. Bits past `len` in the last block are kept zero so that equality
/// and hashing work blockwise.
#[derive(Debug, Clone, Default, Eq)]
pub struct BinaryWord {
    blocks: Vec<u64>,
    len: usize,
}

/// A factor attaining the critical exponent: `w[position .. position+length)`
/// with smallest period `period`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionWitness {
    pub position: usize,
    pub length: usize,
    pub period: usize,
}

/// A cube witness: `w[position .. position+3*period)` has the given period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeWitness {
    pub position: usize,
    pub period: usize,
}

/// One occurrence of a needle, flagged internal when it is neither a prefix
/// nor a suffix of the haystack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    pub position: usize,
    pub internal: bool,
}

impl BinaryWord {
    pub fn new() -> Self {
        BinaryWord { blocks: Vec::new(), len: 0 }
    }

    pub fn with_capacity(bits: usize) -> Self {
        BinaryWord { blocks: Vec::with_capacity(bits.div_ceil(BLOCK_BITS)), len: 0 }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut w = BinaryWord::with_capacity(bits.len());
        for &b in bits {
            w.push(b);
        }
        w
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> u8) -> Self {
        let mut w = BinaryWord::with_capacity(len);
        for i in 0..len {
            w.push(f(i));
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len, "index {i} out of range for word of length {}", self.len);
        ((self.blocks[i / BLOCK_BITS] >> (i % BLOCK_BITS)) & 1) as u8
    }

    #[inline]
    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        if self.len % BLOCK_BITS == 0 {
            self.blocks.push(0);
        }
        if bit != 0 {
            *self.blocks.last_mut().unwrap() |= 1u64 << (self.len % BLOCK_BITS);
        }
        self.len += 1;
    }

    /// 64 bits starting at `bitpos`, zero-padded past the end.
    #[inline]
    fn chunk(&self, bitpos: usize) -> u64 {
        let q = bitpos / BLOCK_BITS;
        let r = bitpos % BLOCK_BITS;
        if q >= self.blocks.len() {
            return 0;
        }
        let lo = self.blocks[q] >> r;
        if r == 0 || q + 1 >= self.blocks.len() {
            lo
        } else {
            lo | (self.blocks[q + 1] << (BLOCK_BITS - r))
        }
    }

    /// The complement, flipping every bit.
    pub fn complement(&self) -> Self {
        let mut blocks: Vec<u64> = self.blocks.iter().map(|b| !b).collect();
        mask_tail(&mut blocks, self.len);
        BinaryWord { blocks, len: self.len }
    }

    /// The reversal.
    pub fn reverse(&self) -> Self {
        let mut w = BinaryWord::with_capacity(self.len);
        for i in (0..self.len).rev() {
            w.push(self.get(i));
        }
        w
    }

    /// The factor `w[start .. start+len)`.
    pub fn factor(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.len, "factor out of range");
        let mut blocks = Vec::with_capacity(len.div_ceil(BLOCK_BITS));
        let mut pos = start;
        let end = start + len;
        while pos < end {
            blocks.push(self.chunk(pos));
            pos += BLOCK_BITS;
        }
        mask_tail(&mut blocks, len);
        BinaryWord { blocks, len }
    }

    /// Appends another word.
    pub fn extend_with(&mut self, other: &BinaryWord) {
        if self.len % BLOCK_BITS == 0 {
            self.blocks.extend_from_slice(&other.blocks);
            self.len += other.len;
            mask_tail(&mut self.blocks, self.len);
            self.blocks.truncate(self.len.div_ceil(BLOCK_BITS));
            return;
        }
        let mut pos = 0;
        while pos < other.len {
            let chunk = other.chunk(pos);
            let take = (other.len - pos).min(BLOCK_BITS);
            self.append_chunk(chunk, take);
            pos += take;
        }
    }

    fn append_chunk(&mut self, chunk: u64, nbits: usize) {
        let r = self.len % BLOCK_BITS;
        if r == 0 {
            self.blocks.push(chunk);
        } else {
            *self.blocks.last_mut().unwrap() |= chunk << r;
            if nbits > BLOCK_BITS - r {
                self.blocks.push(chunk >> (BLOCK_BITS - r));
            }
        }
        self.len += nbits;
        mask_tail(&mut self.blocks, self.len);
    }

    pub fn concat(&self, other: &BinaryWord) -> Self {
        let mut w = self.clone();
        w.extend_with(other);
        w
    }

    /// Does `needle` occur at position `pos`?
    pub fn matches_at(&self, pos: usize, needle: &BinaryWord) -> bool {
        if pos + needle.len > self.len {
            return false;
        }
        let mut off = 0;
        while off < needle.len {
            let take = (needle.len - off).min(BLOCK_BITS);
            let mask = low_mask(take);
            if (self.chunk(pos + off) ^ needle.chunk(off)) & mask != 0 {
                return false;
            }
            off += take;
        }
        true
    }

    pub fn starts_with(&self, prefix: &BinaryWord) -> bool {
        self.matches_at(0, prefix)
    }

    /// Do the length-`len` factors at positions `a` and `b` coincide?
    pub fn ranges_equal(&self, a: usize, b: usize, len: usize) -> bool {
        assert!(a + len <= self.len && b + len <= self.len);
        let mut off = 0;
        while off < len {
            let take = (len - off).min(BLOCK_BITS);
            if (self.chunk(a + off) ^ self.chunk(b + off)) & low_mask(take) != 0 {
                return false;
            }
            off += take;
        }
        true
    }

    /// Is the length-`len` factor at `a` the complement of the one at `b`?
    pub fn ranges_complementary(&self, a: usize, b: usize, len: usize) -> bool {
        assert!(a + len <= self.len && b + len <= self.len);
        let mut off = 0;
        while off < len {
            let take = (len - off).min(BLOCK_BITS);
            let mask = low_mask(take);
            if (self.chunk(a + off) ^ self.chunk(b + off)) & mask != mask {
                return false;
            }
            off += take;
        }
        true
    }

    pub fn ends_with(&self, suffix: &BinaryWord) -> bool {
        self.len >= suffix.len && self.matches_at(self.len - suffix.len, suffix)
    }

    /// All occurrences of `needle`, in ascending position order.
    pub fn occurrences(&self, needle: &BinaryWord) -> Result<Vec<Occurrence>> {
        if needle.is_empty() {
            return Err(Error::EmptyNeedle);
        }
        let mut out = Vec::new();
        if needle.len > self.len {
            return Ok(out);
        }
        for pos in 0..=self.len - needle.len {
            if self.matches_at(pos, needle) {
                let internal = pos != 0 && pos + needle.len != self.len;
                out.push(Occurrence { position: pos, internal });
            }
        }
        Ok(out)
    }

    /// The word as one byte per symbol (values 0 and 1).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len);
        for q in 0..self.blocks.len() {
            let mut b = self.blocks[q];
            let n = (self.len - q * BLOCK_BITS).min(BLOCK_BITS);
            for _ in 0..n {
                out.push((b & 1) as u8);
                b >>= 1;
            }
        }
        out
    }

    /// Smallest period, by the border theorem: `per(w) = |w| - border(w)`.
    pub fn smallest_period(&self) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        let bytes = self.to_bytes();
        Ok(smallest_period_bytes(&bytes))
    }

    /// Exponent `|w| / per(w)` as an exact rational.
    pub fn exponent(&self) -> Result<Rational> {
        let p = self.smallest_period()?;
        Ok(Rational::new(self.len as i64, p as i64))
    }

    /// Critical exponent: the maximum of `exp(x)` over all nonempty factors
    /// `x`, exact. Uses near-linear repetition detection; the definitional
    /// scan lives in [`crate::naive`] and the two are required to agree.
    pub fn critical_exponent(&self) -> Result<Rational> {
        Ok(self.max_exponent_witness()?.1)
    }

    /// A factor attaining the critical exponent, with ties broken by
    /// smallest period, then smallest starting position.
    pub fn max_exponent_witness(&self) -> Result<(RepetitionWitness, Rational)> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(repetition::max_exponent(&self.to_bytes()))
    }

    /// A cube factor (exponent >= 3 over three full periods) if one exists,
    /// choosing the witness with smallest period, then smallest position.
    pub fn contains_cube(&self) -> Option<CubeWitness> {
        repetition::find_cube(&self.to_bytes())
    }

    /// Is the word `alpha`-free (`ce < alpha`, or `ce <= alpha` for the
    /// plus variant)?
    pub fn is_alpha_free(&self, alpha: ExtExponent) -> Result<bool> {
        Ok(alpha.admits(self.critical_exponent()?))
    }
}

pub(crate) fn smallest_period_bytes<T: Eq>(w: &[T]) -> usize {
    // prefix function; the smallest period is n minus the longest border
    let n = w.len();
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && w[i] != w[k] {
            k = pi[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        pi[i] = k;
    }
    n - pi[n - 1]
}

fn mask_tail(blocks: &mut [u64], len: usize) {
    let r = len % BLOCK_BITS;
    if r != 0 {
        if let Some(last) = blocks.last_mut() {
            *last &= low_mask(r);
        }
    }
}

#[inline]
fn low_mask(nbits: usize) -> u64 {
    if nbits >= 64 {
        !0
    } else {
        (1u64 << nbits) - 1
    }
}

impl PartialEq for BinaryWord {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.blocks == other.blocks
    }
}

impl Hash for BinaryWord {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.len.hash(state);
        self.blocks.hash(state);
    }
}

impl PartialOrd for BinaryWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BinaryWord {
    /// Lexicographic order; a proper prefix sorts first.
    fn cmp(&self, other: &Self) -> Ordering {
        let common_blocks = self.blocks.len().min(other.blocks.len());
        for q in 0..common_blocks {
            // reversing bits makes numeric order match position order
            let a = self.blocks[q].reverse_bits();
            let b = other.blocks[q].reverse_bits();
            if a != b {
                // only meaningful up to the shorter length within this block
                let common = (self.len.min(other.len)).saturating_sub(q * BLOCK_BITS).min(BLOCK_BITS);
                if common == 0 {
                    break;
                }
                let keep = !low_mask(64 - common); // high `common` bits after reversal
                let (am, bm) = (a & keep, b & keep);
                if am != bm {
                    return am.cmp(&bm);
                }
                break;
            }
        }
        self.len.cmp(&other.len)
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = BinaryWord::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => w.push(0),
                '1' => w.push(1),
                _ => return Err(Error::InvalidBit(c)),
            }
        }
        Ok(w)
    }
}

impl Serialize for BinaryWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinaryWord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    #[test]
    fn complement_examples() {
        assert_eq!(w("0110").complement().to_string(), "1001");
        assert_eq!(BinaryWord::new().complement(), BinaryWord::new());
    }

    #[test]
    fn reverse_examples() {
        assert_eq!(w("0010").reverse().to_string(), "0100");
        assert_eq!(BinaryWord::new().reverse(), BinaryWord::new());
    }

    #[test]
    fn periods_and_exponents() {
        assert_eq!(w("0").smallest_period().unwrap(), 1);
        assert_eq!(w("0110").smallest_period().unwrap(), 3);
        assert!(w("").smallest_period().is_err());
        assert_eq!(w("010010").exponent().unwrap(), Rational::new(2, 1));
    }

    #[test]
    fn factor_and_concat_across_blocks() {
        let long = BinaryWord::from_fn(200, |i| ((i * 7 + 3) % 5 == 0) as u8);
        let f = long.factor(63, 70);
        for i in 0..70 {
            assert_eq!(f.get(i), long.get(63 + i));
        }
        let c = f.concat(&long.factor(0, 10));
        assert_eq!(c.len(), 80);
        assert_eq!(c.get(75), long.get(5));
    }

    #[test]
    fn occurrences_with_internal_flags() {
        let h = w("0110");
        let occ = h.occurrences(&w("1")).unwrap();
        assert_eq!(
            occ,
            vec![
                Occurrence { position: 1, internal: true },
                Occurrence { position: 2, internal: true }
            ]
        );
        let whole = h.occurrences(&w("0110")).unwrap();
        assert_eq!(whole, vec![Occurrence { position: 0, internal: false }]);
        assert!(h.occurrences(&w("")).is_err());
    }

    #[test]
    fn lexicographic_order() {
        let mut v = vec![w("10"), w("0"), w("011"), w("01"), w("1")];
        v.sort();
        let got: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(got, ["0", "01", "011", "1", "10"]);
    }

    #[test]
    fn round_trip_display_parse() {
        let original = BinaryWord::from_fn(131, |i| (i % 3 == 1) as u8);
        let parsed: BinaryWord = original.to_string().parse().unwrap();
        assert_eq!(parsed, original);
        assert!("012".parse::<BinaryWord>().is_err());
    }

    #[test]
    fn fast_agrees_with_naive_exhaustively_to_len_12() {
        for len in 1..=12usize {
            for bits in 0u32..1 << len {
                let word = BinaryWord::from_fn(len, |i| ((bits >> i) & 1) as u8);
                let (fast_wit, fast_ce) = word.max_exponent_witness().unwrap();
                let (naive_wit, naive_ce) = crate::naive::critical_exponent_word(&word).unwrap();
                assert_eq!(fast_ce, naive_ce, "ce mismatch on {word}");
                assert_eq!(fast_wit, naive_wit, "witness mismatch on {word}");
                assert_eq!(
                    word.contains_cube(),
                    crate::naive::contains_cube_word(&word),
                    "cube mismatch on {word}"
                );
                assert_eq!(
                    word.smallest_period().unwrap(),
                    crate::naive::smallest_period_word(&word).unwrap(),
                    "period mismatch on {word}"
                );
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_word(max_len: usize) -> impl Strategy<Value = BinaryWord> {
            proptest::collection::vec(0u8..=1, 1..=max_len).prop_map(|bits| BinaryWord::from_bits(&bits))
        }

        proptest! {
            #[test]
            fn fast_matches_naive(word in arb_word(200)) {
                let (fw, fc) = word.max_exponent_witness().unwrap();
                let (nw, nc) = crate::naive::critical_exponent_word(&word).unwrap();
                prop_assert_eq!(fc, nc);
                prop_assert_eq!(fw, nw);
                prop_assert_eq!(word.contains_cube(), crate::naive::contains_cube_word(&word));
            }

            #[test]
            fn exponent_invariants(word in arb_word(120)) {
                let one = Rational::new(1, 1);
                let exp = word.exponent().unwrap();
                let ce = word.critical_exponent().unwrap();
                prop_assert!(exp >= one);
                prop_assert!(ce >= exp);
                prop_assert_eq!(word.reverse().critical_exponent().unwrap(), ce);
                prop_assert_eq!(word.complement().critical_exponent().unwrap(), ce);
                prop_assert_eq!(word.complement().complement(), word);
            }

            #[test]
            fn period_iff_no_proper(word in arb_word(60)) {
                let p = word.smallest_period().unwrap();
                prop_assert_eq!(p, crate::naive::smallest_period_word(&word).unwrap());
                // smallest_period = |w| iff no proper period
                let proper = (1..word.len()).any(|q| {
                    (0..word.len() - q).all(|i| word.get(i) == word.get(i + q))
                });
                prop_assert_eq!(p == word.len(), !proper);
            }
        }
    }
}
