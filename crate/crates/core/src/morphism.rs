//! Binary morphisms: application, composition, the named constant
//! morphisms, the families built from prefixes and factors of the three
//! sequences, and the per-length cubefree constructions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::freeness::{self, FreenessVerdict};
use crate::sequence::{self, SequenceId};
use crate::word::BinaryWord;

/// A morphism on {0,1}*, given by the images of the two letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMorphism {
    image0: BinaryWord,
    image1: BinaryWord,
}

impl BinaryMorphism {
    pub fn new(image0: BinaryWord, image1: BinaryWord) -> Result<Self> {
        if image0.is_empty() || image1.is_empty() {
            return Err(Error::EmptyImage);
        }
        Ok(BinaryMorphism { image0, image1 })
    }

    pub fn image(&self, letter: u8) -> &BinaryWord {
        if letter == 0 {
            &self.image0
        } else {
            &self.image1
        }
    }

    pub fn image0(&self) -> &BinaryWord {
        &self.image0
    }

    pub fn image1(&self) -> &BinaryWord {
        &self.image1
    }

    pub fn apply(&self, w: &BinaryWord) -> BinaryWord {
        let total = self.image0.len() + self.image1.len();
        let mut out = BinaryWord::with_capacity(w.len() * total / 2 + 1);
        for i in 0..w.len() {
            out.extend_with(self.image(w.get(i)));
        }
        out
    }

    /// `self . g`: apply `g` first, then `self`.
    pub fn compose(&self, g: &BinaryMorphism) -> BinaryMorphism {
        BinaryMorphism {
            image0: self.apply(&g.image0),
            image1: self.apply(&g.image1),
        }
    }

    /// `n`-fold composition with itself; the zeroth power is the identity.
    pub fn power(&self, n: u32) -> BinaryMorphism {
        let mut out = BinaryMorphism::identity();
        for _ in 0..n {
            out = self.compose(&out);
        }
        out
    }

    pub fn is_uniform(&self) -> bool {
        self.image0.len() == self.image1.len()
    }

    /// The common image length, for uniform morphisms.
    pub fn uniform_length(&self) -> Option<usize> {
        self.is_uniform().then_some(self.image0.len())
    }

    pub fn is_complementary(&self) -> bool {
        self.is_uniform() && self.image1 == self.image0.complement()
    }

    /// The complementary morphism mapping 0 to `v` and 1 to its complement.
    pub fn complementary_from(v: &BinaryWord) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::EmptyImage);
        }
        Ok(BinaryMorphism { image0: v.clone(), image1: v.complement() })
    }

    pub fn identity() -> Self {
        BinaryMorphism {
            image0: BinaryWord::from_bits(&[0]),
            image1: BinaryWord::from_bits(&[1]),
        }
    }

    /// The letter swap: 0 -> 1, 1 -> 0.
    pub fn theta() -> Self {
        BinaryMorphism {
            image0: BinaryWord::from_bits(&[1]),
            image1: BinaryWord::from_bits(&[0]),
        }
    }

    /// The doubling morphism 0 -> 01, 1 -> 10 whose fixed point is `t`.
    pub fn mu() -> Self {
        BinaryMorphism {
            image0: "01".parse().unwrap(),
            image1: "10".parse().unwrap(),
        }
    }

    /// The 3-uniform cubefree morphism 0 -> 001, 1 -> 011.
    pub fn rho() -> Self {
        BinaryMorphism {
            image0: "001".parse().unwrap(),
            image1: "011".parse().unwrap(),
        }
    }

    /// The 3-uniform cubefree morphism 0 -> 010, 1 -> 011.
    pub fn psi() -> Self {
        BinaryMorphism {
            image0: "010".parse().unwrap(),
            image1: "011".parse().unwrap(),
        }
    }

    /// The 12-uniform complementary cubefree morphism.
    pub fn g12() -> Self {
        BinaryMorphism {
            image0: "011001001101".parse().unwrap(),
            image1: "100110110010".parse().unwrap(),
        }
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "mu" => Ok(Self::mu()),
            "theta" => Ok(Self::theta()),
            "rho" => Ok(Self::rho()),
            "psi" => Ok(Self::psi()),
            "g12" => Ok(Self::g12()),
            "identity" => Ok(Self::identity()),
            other => Err(Error::UnknownBuiltin(other.to_string())),
        }
    }

    /// Necessary condition for freeness at non-integer thresholds: uniform,
    /// distinct first letters, distinct last letters. Returns the first
    /// failing clause.
    pub fn necessary_condition(&self) -> NecessaryCondition {
        if !self.is_uniform() {
            return NecessaryCondition::NotUniform;
        }
        if self.image0.get(0) == self.image1.get(0) {
            return NecessaryCondition::SharedFirstLetter;
        }
        if self.image0.get(self.image0.len() - 1) == self.image1.get(self.image1.len() - 1) {
            return NecessaryCondition::SharedLastLetter;
        }
        NecessaryCondition::Pass
    }
}

/// Outcome of the necessary-condition filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NecessaryCondition {
    Pass,
    NotUniform,
    SharedFirstLetter,
    SharedLastLetter,
}

impl NecessaryCondition {
    pub fn passes(self) -> bool {
        self == NecessaryCondition::Pass
    }
}

impl fmt::Display for NecessaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NecessaryCondition::Pass => "pass",
            NecessaryCondition::NotUniform => "not uniform",
            NecessaryCondition::SharedFirstLetter => "images share their first letter",
            NecessaryCondition::SharedLastLetter => "images share their last letter",
        })
    }
}

impl fmt::Display for BinaryMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0->{},1->{}", self.image0, self.image1)
    }
}

impl FromStr for BinaryMorphism {
    type Err = Error;

    /// Parses the text form `0->011,1->100`, ignoring whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let malformed = || Error::MalformedRules(s.trim().to_string());
        let mut image0 = None;
        let mut image1 = None;
        for rule in compact.split(',') {
            let (lhs, rhs) = rule.split_once("->").ok_or_else(malformed)?;
            let image: BinaryWord = rhs.parse().map_err(|_| malformed())?;
            match lhs {
                "0" if image0.is_none() => image0 = Some(image),
                "1" if image1.is_none() => image1 = Some(image),
                _ => return Err(malformed()),
            }
        }
        match (image0, image1) {
            (Some(i0), Some(i1)) => BinaryMorphism::new(i0, i1),
            _ => Err(malformed()),
        }
    }
}

/// The complementary morphism whose 0-image is the length-`k` prefix of `t`.
pub fn tm_prefix_morphism(k: usize) -> Result<BinaryMorphism> {
    if k == 0 {
        return Err(Error::ZeroLength);
    }
    BinaryMorphism::complementary_from(&sequence::tm_prefix(k))
}

/// The complementary morphism whose 0-image is `t[ell .. ell+k)`.
pub fn tm_factor_morphism(ell: usize, k: usize) -> Result<BinaryMorphism> {
    BinaryMorphism::complementary_from(&sequence::tm_factor(ell, k)?)
}

/// The complementary morphism whose 0-image is the length-`k` prefix of the
/// given sequence.
pub fn sequence_prefix_morphism(id: SequenceId, k: usize) -> Result<BinaryMorphism> {
    if k == 0 {
        return Err(Error::ZeroLength);
    }
    BinaryMorphism::complementary_from(&sequence::seq_prefix(id, k))
}

/// Which construction produced a cubefree uniform morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CubefreeRoute {
    /// `mu^n` itself (length a power of two).
    PowerOfTwo { exponent: u32 },
    /// The 3-uniform morphism rho (not complementary; length 3 admits no
    /// complementary cubefree morphism).
    Rho,
    /// rho composed after mu (length 6; same caveat).
    RhoMu,
    /// The 12-uniform complementary morphism composed with a power of mu,
    /// for lengths 3 * 2^n with n >= 2.
    GMu { mu_power: u32 },
    /// A clipped factor morphism `t[offset .. offset+k)`; `base_offset` is
    /// the offset of the odd-length core the prefix/suffix tables certify,
    /// with `offset = base_offset << scale`.
    Clipped { offset: usize, base_offset: usize, odd_part: usize, scale: u32 },
    /// Composition `mu^a . rho^b . (prefix morphism of x or y of length c)`
    /// with `k = 2^a 3^b c`.
    Composed { two_exp: u32, three_exp: u32, core: usize, family: SequenceId },
}

impl fmt::Display for CubefreeRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CubefreeRoute::PowerOfTwo { exponent } => write!(f, "mu^{exponent}"),
            CubefreeRoute::Rho => write!(f, "rho"),
            CubefreeRoute::RhoMu => write!(f, "rho.mu"),
            CubefreeRoute::GMu { mu_power } => write!(f, "g12.mu^{mu_power}"),
            CubefreeRoute::Clipped { offset, base_offset, odd_part, scale } => {
                write!(f, "clip[{offset}] (core clip[{base_offset}] len {odd_part}, scaled 2^{scale})")
            }
            CubefreeRoute::Composed { two_exp, three_exp, core, family } => {
                write!(f, "mu^{two_exp}.rho^{three_exp}.{family}-prefix[{core}]")
            }
        }
    }
}

/// How [`cubefree_uniform_of_length`] should construct its morphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstructionStrategy {
    /// Clipped factors of `t`, with the 12-uniform morphism covering the
    /// lengths `3 * 2^n`.
    #[default]
    Clipped,
    /// Compositions of mu, rho and the x/y prefix families.
    Composed,
}

/// A `k`-uniform cubefree binary morphism, verified before being returned,
/// together with the construction route. Lengths 3 and 6 admit no
/// complementary cubefree morphism, so those come out non-complementary.
pub fn cubefree_uniform_of_length(k: usize) -> Result<(BinaryMorphism, CubefreeRoute)> {
    cubefree_uniform_of_length_with(k, ConstructionStrategy::Clipped)
}

pub fn cubefree_uniform_of_length_with(
    k: usize,
    strategy: ConstructionStrategy,
) -> Result<(BinaryMorphism, CubefreeRoute)> {
    if k == 0 {
        return Err(Error::ZeroLength);
    }
    let (morphism, route) = match strategy {
        ConstructionStrategy::Clipped => clipped_route(k)?,
        ConstructionStrategy::Composed => composed_route(k)?,
    };
    verify_cubefree(k, &morphism, &route)?;
    Ok((morphism, route))
}

fn clipped_route(k: usize) -> Result<(BinaryMorphism, CubefreeRoute)> {
    let scale = k.trailing_zeros();
    let odd = k >> scale;
    if odd == 3 {
        return Ok(match scale {
            0 => (BinaryMorphism::rho(), CubefreeRoute::Rho),
            1 => (BinaryMorphism::rho().compose(&BinaryMorphism::mu()), CubefreeRoute::RhoMu),
            n => (
                BinaryMorphism::g12().compose(&BinaryMorphism::mu().power(n - 2)),
                CubefreeRoute::GMu { mu_power: n - 2 },
            ),
        });
    }
    if odd == 1 {
        return Ok((tm_prefix_morphism(k)?, CubefreeRoute::PowerOfTwo { exponent: scale }));
    }
    // odd >= 5: pick the clip offset for the odd core by its residue mod 8,
    // preferring the earlier candidate when two are stated
    let candidates: &[usize] = match odd % 8 {
        1 => &[4],
        3 => &[odd - 5, odd - 4],
        5 => &[0],
        7 => &[6],
        _ => unreachable!(),
    };
    let base_offset = candidates
        .iter()
        .copied()
        .find(|&ell| {
            sequence::tm_factor(ell, odd)
                .ok()
                .and_then(|core| freeness::clip_cubefree_sufficient(&core).ok())
                .unwrap_or(false)
        })
        .ok_or_else(|| {
            Error::ConstructionFailed(k, "no clip offset satisfies the prefix/suffix tables".into())
        })?;
    let offset = base_offset << scale;
    Ok((
        tm_factor_morphism(offset, k)?,
        CubefreeRoute::Clipped { offset, base_offset, odd_part: odd, scale },
    ))
}

fn composed_route(k: usize) -> Result<(BinaryMorphism, CubefreeRoute)> {
    let two_exp = k.trailing_zeros();
    let mut core = k >> two_exp;
    let mut three_exp = 0u32;
    while core % 3 == 0 {
        core /= 3;
        three_exp += 1;
    }
    let family = match core % 12 {
        1 | 5 => SequenceId::X,
        7 | 11 => SequenceId::Y,
        _ => unreachable!("core is coprime to 6"),
    };
    let inner = sequence_prefix_morphism(family, core)?;
    let morphism = BinaryMorphism::mu()
        .power(two_exp)
        .compose(&BinaryMorphism::rho().power(three_exp).compose(&inner));
    Ok((morphism, CubefreeRoute::Composed { two_exp, three_exp, core, family }))
}

const VERIFY_FALSIFY_LEN: usize = 6;

/// Defense in depth: every constructed morphism is checked before being
/// handed out. A clipped route with an odd core certified by the
/// prefix/suffix tables is already proved cubefree (the even lengths scale
/// by mu, which preserves cubes in both directions); everything else must
/// pass the freeness criterion or at least survive bounded falsification.
fn verify_cubefree(k: usize, morphism: &BinaryMorphism, route: &CubefreeRoute) -> Result<()> {
    let three = crate::ExtExponent::integer(3);
    if let CubefreeRoute::Clipped { base_offset, odd_part, .. } = route {
        let core = sequence::tm_factor(*base_offset, *odd_part)?;
        if freeness::clip_cubefree_sufficient(&core)? {
            return Ok(());
        }
    }
    match freeness::check_morphism_alpha_free(morphism, three, VERIFY_FALSIFY_LEN) {
        FreenessVerdict::Refuted { witness } => Err(Error::ConstructionFailed(
            k,
            format!("image of {witness} contains a cube"),
        )),
        FreenessVerdict::ProvedFree | FreenessVerdict::NoCounterexampleUpTo { .. } => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::SequenceId;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    #[test]
    fn apply_and_builtins() {
        let mu = BinaryMorphism::mu();
        assert_eq!(mu.apply(&w("01")), w("0110"));
        let h3 = tm_prefix_morphism(3).unwrap();
        assert_eq!(h3.apply(&w("0010")), w("011011100011"));
        assert_eq!(mu.apply(&BinaryWord::new()), BinaryWord::new());
        assert_eq!(BinaryMorphism::g12().image0(), &w("011001001101"));
        assert_eq!(BinaryMorphism::rho().image1(), &w("011"));
        assert_eq!(BinaryMorphism::psi().image0(), &w("010"));
        assert!(BinaryMorphism::builtin("nope").is_err());
    }

    #[test]
    fn composition_and_powers() {
        let theta_mu = BinaryMorphism::theta().compose(&BinaryMorphism::mu());
        assert_eq!(theta_mu.image0(), &w("10"));
        assert_eq!(theta_mu.image1(), &w("01"));
        let rho_mu = BinaryMorphism::rho().compose(&BinaryMorphism::mu());
        assert_eq!(rho_mu.image0(), &w("001011"));
        let mu = BinaryMorphism::mu();
        assert_eq!(mu.power(2).image0(), &w("0110"));
        assert_eq!(mu.power(3).image0(), &w("01101001"));
        assert_eq!(mu.power(0), BinaryMorphism::identity());
        let h = tm_factor_morphism(4, 5).unwrap();
        assert_eq!(h.compose(&BinaryMorphism::identity()), h);
    }

    #[test]
    fn families() {
        assert_eq!(tm_prefix_morphism(3).unwrap().image1(), &w("100"));
        assert_eq!(tm_prefix_morphism(2).unwrap(), BinaryMorphism::mu());
        assert_eq!(tm_prefix_morphism(5).unwrap().image0(), &w("01101"));
        assert_eq!(tm_factor_morphism(4, 4).unwrap().image0(), &w("1001"));
        assert_eq!(tm_factor_morphism(6, 4).unwrap().image0(), &w("0110"));
        assert_eq!(sequence_prefix_morphism(SequenceId::X, 5).unwrap().image0(), &w("01001"));
        assert_eq!(sequence_prefix_morphism(SequenceId::Y, 5).unwrap().image0(), &w("01001"));
        assert_eq!(sequence_prefix_morphism(SequenceId::X, 1).unwrap().image0(), &w("0"));
        assert!(tm_prefix_morphism(0).is_err());
        // the prefix morphism of t is the zero-offset factor morphism
        for k in [1, 2, 3, 7, 64, 100] {
            assert_eq!(tm_prefix_morphism(k).unwrap(), tm_factor_morphism(0, k).unwrap());
        }
    }

    #[test]
    fn complementary_structure() {
        let h = BinaryMorphism::complementary_from(&w("011")).unwrap();
        assert_eq!(h.image1(), &w("100"));
        assert!(h.is_complementary());
        assert!(BinaryMorphism::mu().is_complementary());
        assert!(!BinaryMorphism::rho().is_complementary());
        let id = BinaryMorphism::complementary_from(&w("0")).unwrap();
        assert_eq!(id, BinaryMorphism::identity());
    }

    #[test]
    fn necessary_condition_filter() {
        assert!(BinaryMorphism::mu().necessary_condition().passes());
        assert_eq!(
            BinaryMorphism::rho().necessary_condition(),
            NecessaryCondition::SharedFirstLetter
        );
        let nonuniform = BinaryMorphism::new(w("0"), w("01")).unwrap();
        assert_eq!(nonuniform.necessary_condition(), NecessaryCondition::NotUniform);
    }

    #[test]
    fn rules_text_round_trip() {
        let h: BinaryMorphism = "0->011,1->100".parse().unwrap();
        assert_eq!(h, tm_prefix_morphism(3).unwrap());
        assert_eq!(h.to_string(), "0->011,1->100");
        let spaced: BinaryMorphism = " 0 -> 01 , 1 -> 10 ".parse().unwrap();
        assert_eq!(spaced, BinaryMorphism::mu());
        assert!("0->011".parse::<BinaryMorphism>().is_err());
        assert!("0->,1->1".parse::<BinaryMorphism>().is_err());
        assert!("0->01,0->10".parse::<BinaryMorphism>().is_err());
    }

    #[test]
    fn morphism_complement_commutation() {
        // complementary morphisms commute with complement
        let h = tm_factor_morphism(4, 9).unwrap();
        let word = w("0110100110");
        assert_eq!(h.apply(&word.complement()), h.apply(&word).complement());
    }
}
