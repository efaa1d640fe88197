//! Monodromy factorizations of non-orientable Lefschetz fibrations, modelled
//! at the first-homology level of the orientation double cover.
//!
//! A fibration with fiber `N_g` is described by a word of signed, oriented
//! Dehn-twist letters over a curve dictionary. Each two-sided curve on `N_g`
//! is stored through its pair of lifts to the cover surface `Σ_{g-1}`, which
//! are exchanged by the deck involution. The crate provides:
//!
//! - exact integer symplectic linear algebra on `H_1(Σ_{g-1}; Z)`
//!   ([`homology`]),
//! - the curve dictionary and lift-pair bookkeeping ([`cover`]),
//! - factorization words and the elementary moves connecting isomorphic
//!   fibrations ([`words`]),
//! - the lift of a word to the achiral fibration on the cover ([`lifting`]),
//! - Euler-characteristic and monodromy invariants ([`invariants`]),
//! - a bidirectional certificate search over the move set ([`search`]),
//! - the text formats consumed and produced by the CLI ([`format`]).

pub mod cli;
pub mod cover;
pub mod format;
pub mod homology;
pub mod invariants;
pub mod lifting;
pub mod search;
pub mod words;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("the zero class has no transvection")]
    ZeroClass,
    #[error("matrix is not invertible over the integers")]
    NotUnimodular,
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("matrix does not commute with the deck involution, so it is not the lift of a mapping class of the base fiber")]
    NotALift,
    #[error("class is not primitive")]
    NonPrimitive,
    #[error("class meets its deck image: <γ, Jγ> = {0}, expected 0")]
    LiftPairIntersects(i64),
    #[error("duplicate curve id `{0}`")]
    DuplicateId(String),
    #[error("unknown curve id `{0}`")]
    UnknownCurve(String),
    #[error("curves `{0}` and `{1}` are not declared disjoint")]
    NotDeclaredDisjoint(String, String),
    #[error("cannot declare curve `{0}` disjoint from itself")]
    SelfDisjoint(String),
    #[error("declared disjoint pair `{0}`, `{1}` has lifts with pairing {2}")]
    DisjointPairingNonzero(String, String, i64),
    #[error("letters at positions {0} and {1} are not mutually inverse")]
    NotInversePair(usize, usize),
    #[error("position {pos} out of bounds for word of length {len}")]
    OutOfBounds { pos: usize, len: usize },
    #[error("fiber is orientable: letters carry no orientation tag")]
    OrientableFiber,
    #[error("fiber is non-orientable where an orientable one is required")]
    NonOrientableFiber,
    #[error("operation requires fiber genus >= 3, got {0}")]
    GenusTooSmall(u32),
    #[error("word does not match its fiber: {0}")]
    WordShape(String),
    #[error("certificate start hash {found} does not match the word hash {expected}")]
    StartHashMismatch { expected: String, found: String },
    #[error("replayed end word hash {found} does not match the certificate end hash {expected}")]
    EndHashMismatch { expected: String, found: String },
    #[error("illegal move at step {step}: {source}")]
    ReplayStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Located {
        line: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn at_line(self, line: usize) -> Error {
        Error::Located {
            line,
            source: Box::new(self),
        }
    }
}
