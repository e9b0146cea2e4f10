use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty word has no period")]
    EmptyWord,
    #[error("empty needle")]
    EmptyNeedle,
    #[error("invalid character {0:?} in binary word (expected '0' or '1')")]
    InvalidBit(char),
    #[error("morphism image must be nonempty")]
    EmptyImage,
    #[error("morphism length must be positive")]
    ZeroLength,
    #[error("unknown builtin morphism {0:?} (expected mu, theta, rho, psi, g12 or identity)")]
    UnknownBuiltin(String),
    #[error("malformed morphism rules {0:?} (expected \"0->...,1->...\")")]
    MalformedRules(String),
    #[error("malformed exponent {0:?} (expected \"p/q\", \"p\", optionally suffixed '+')")]
    MalformedExponent(String),
    #[error("exponent denominator is zero")]
    ZeroDenominator,
    #[error("exponent must be positive")]
    NonPositiveExponent,
    #[error("morphism is not uniform")]
    NotUniform,
    #[error("exponent threshold must exceed 2")]
    ThresholdTooSmall,
    #[error("degenerate morphism of length 1 has no minimal exponent above 2")]
    DegenerateMorphism,
    #[error("minimal exponent requires conditions (a), (b1)-(b3); condition {0} fails")]
    PreconditionFailed(&'static str),
    #[error("word is not a factor of the Thue-Morse word; lemma precondition violated")]
    NotThueMorseFactor,
    #[error("word too short for the prefix/suffix tables (need length >= 4)")]
    FactorTooShort,
    #[error("learning depth too small: hypothesis disagrees with the oracle on {0}")]
    LearnDepthTooSmall(u64),
    #[error("automaton parse error at line {line}: {reason}")]
    AutomatonParse { line: usize, reason: String },
    #[error("unknown check id {0:?}; valid ids: {1}")]
    UnknownCheck(String, String),
    #[error("check {check} does not take a parameter {param:?}")]
    UnknownParam { check: String, param: String },
    #[error("construction verification failed for length {0}: {1}")]
    ConstructionFailed(usize, String),
}

pub type Result<T> = std::result::Result<T, Error>;
