//! Factorization words over a fiber and base, and the elementary moves that
//! connect monodromy factorizations of isomorphic fibrations.
//!
//! A word lists signed, oriented Dehn-twist letters in left-to-right
//! application order. Over a non-orientable fiber the letters reference
//! dictionary curves; over an orientable fiber (lifted words) they carry
//! explicit cover classes. Moves come in five kinds: cancelling-pair
//! insertion and deletion, commutation of adjacent twists about disjoint
//! curves, simultaneous conjugation, and the orientation flip that trades a
//! twist for the inverse twist with the opposite neighborhood orientation.
//! Every move other than conjugation preserves the total monodromy matrix
//! exactly; conjugation conjugates it.

use std::collections::{BTreeMap, BTreeSet};

use crate::cover::{CoverClass, CurveDictionary, CurveId, OrientedCurve, Sign};
use crate::homology::{
    compose_word_matrices, deck_involution, pairing, transvection, transvection_inverse, MCMatrix,
};
use crate::{Error, Result};

/// Base surface of the fibration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Disk,
    Sphere,
}

impl Base {
    pub fn euler(self) -> i64 {
        match self {
            Base::Disk => 1,
            Base::Sphere => 2,
        }
    }
}

impl std::fmt::Display for Base {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Base::Disk => write!(f, "D2"),
            Base::Sphere => write!(f, "S2"),
        }
    }
}

/// Fiber surface descriptor: `N_g` for factorizations of non-orientable
/// fibrations, `Σ_k` for their lifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fiber {
    NonOrientable { genus: u32 },
    Orientable { genus: u32 },
}

impl Fiber {
    pub fn is_orientable(self) -> bool {
        matches!(self, Fiber::Orientable { .. })
    }

    /// Genus of the surface whose homology the letters act on: the cover
    /// genus `g - 1` for `N_g`, the genus itself for `Σ_k`.
    pub fn cover_genus(self) -> usize {
        match self {
            Fiber::NonOrientable { genus } => genus as usize - 1,
            Fiber::Orientable { genus } => genus as usize,
        }
    }

    pub fn rank(self) -> usize {
        2 * self.cover_genus()
    }
}

impl std::fmt::Display for Fiber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Fiber::NonOrientable { genus } => write!(f, "N{genus}"),
            Fiber::Orientable { genus } => write!(f, "O{genus}"),
        }
    }
}

/// One Dehn-twist letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    /// Twist about a dictionary curve of a non-orientable fiber, with the
    /// orientation tag of its tubular neighborhood.
    Dict {
        curve: OrientedCurve,
        exponent: Sign,
    },
    /// Twist about an explicit cover class on an orientable fiber.
    Cover { class: CoverClass, exponent: Sign },
}

impl Letter {
    pub fn exponent(&self) -> Sign {
        match self {
            Letter::Dict { exponent, .. } | Letter::Cover { exponent, .. } => *exponent,
        }
    }

    /// The inverse letter: same curve and orientation, negated exponent.
    pub fn inverse(&self) -> Letter {
        match self {
            Letter::Dict { curve, exponent } => Letter::Dict {
                curve: curve.clone(),
                exponent: exponent.flip(),
            },
            Letter::Cover { class, exponent } => Letter::Cover {
                class: class.clone(),
                exponent: exponent.flip(),
            },
        }
    }

    /// The same twist written with the opposite neighborhood orientation:
    /// flipped tag, negated exponent. Only meaningful over a non-orientable
    /// fiber.
    pub fn flipped(&self) -> Result<Letter> {
        match self {
            Letter::Dict { curve, exponent } => Ok(Letter::Dict {
                curve: OrientedCurve::new(curve.curve.clone(), curve.theta.flip()),
                exponent: exponent.flip(),
            }),
            Letter::Cover { .. } => Err(Error::OrientableFiber),
        }
    }

    /// Whether the two letters multiply to the identity: equal curves with
    /// opposite exponents, or (over `N_g`) opposite orientation tags with
    /// equal exponents.
    pub fn is_inverse_of(&self, other: &Letter) -> bool {
        match (self, other) {
            (
                Letter::Dict {
                    curve: c1,
                    exponent: e1,
                },
                Letter::Dict {
                    curve: c2,
                    exponent: e2,
                },
            ) => {
                c1.curve == c2.curve
                    && ((c1.theta == c2.theta && *e1 == e2.flip())
                        || (c1.theta == c2.theta.flip() && e1 == e2))
            }
            (
                Letter::Cover {
                    class: k1,
                    exponent: e1,
                },
                Letter::Cover {
                    class: k2,
                    exponent: e2,
                },
            ) => {
                *e1 == e2.flip()
                    && match (k1, k2) {
                        (CoverClass::Class(x), CoverClass::Class(y)) => x.same_unoriented(y),
                        (
                            CoverClass::Null { tag: t1, side: s1 },
                            CoverClass::Null { tag: t2, side: s2 },
                        ) => t1 == t2 && s1 == s2,
                        _ => false,
                    }
            }
            _ => false,
        }
    }

    /// Homology action of the letter. A dictionary letter contributes the
    /// matrix of its lifted twist pair; a cover letter contributes a single
    /// transvection. Twists about null-homologous curves act trivially.
    pub fn matrix(&self, dict: &CurveDictionary, rank: usize) -> Result<MCMatrix> {
        match self {
            Letter::Dict { curve, exponent } => {
                let (selected, companion) = dict.lift_pair(curve)?;
                match (selected, companion) {
                    (CoverClass::Class(sel), CoverClass::Class(comp)) => {
                        let mats = match exponent {
                            Sign::Plus => [transvection(&sel)?, transvection_inverse(&comp)?],
                            Sign::Minus => [transvection(&comp)?, transvection_inverse(&sel)?],
                        };
                        compose_word_matrices(rank, &mats)
                    }
                    _ => Ok(MCMatrix::identity(rank)),
                }
            }
            Letter::Cover { class, exponent } => match class {
                CoverClass::Class(g) => match exponent {
                    Sign::Plus => transvection(g),
                    Sign::Minus => transvection_inverse(g),
                },
                CoverClass::Null { .. } => Ok(MCMatrix::identity(rank)),
            },
        }
    }
}

impl std::fmt::Display for Letter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Letter::Dict { curve, exponent } => {
                write!(f, "{} {} {:+}", curve.curve, curve.theta, exponent.unit())
            }
            Letter::Cover { class, exponent } => match class {
                CoverClass::Class(g) => write!(f, "lift {} {:+}", g, exponent.unit()),
                CoverClass::Null { tag, side } => {
                    write!(f, "null {tag} {side} {:+}", exponent.unit())
                }
            },
        }
    }
}

/// Order of an inserted cancelling pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairOrder {
    /// `(l⁻¹, l)`
    InverseFirst,
    /// `(l, l⁻¹)`
    InverseLast,
}

/// An elementary move on a word.
#[derive(Clone, Debug, PartialEq)]
pub enum Move {
    InsertPair {
        pos: usize,
        letter: Letter,
        order: PairOrder,
    },
    DeletePair {
        pos: usize,
    },
    Commute {
        pos: usize,
    },
    ThetaFlip {
        pos: usize,
    },
    ConjugateAll {
        matrix: MCMatrix,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Insert,
    Delete,
    Commute,
    Flip,
    Conjugate,
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::InsertPair { .. } => MoveKind::Insert,
            Move::DeletePair { .. } => MoveKind::Delete,
            Move::Commute { .. } => MoveKind::Commute,
            Move::ThetaFlip { .. } => MoveKind::Flip,
            Move::ConjugateAll { .. } => MoveKind::Conjugate,
        }
    }
}

/// A replayable witness that two words are connected by elementary moves.
/// The hashes bind the exact serialized start and end words.
#[derive(Clone, Debug, PartialEq)]
pub struct MoveCertificate {
    pub start: String,
    pub end: String,
    pub moves: Vec<Move>,
}

/// Canonical form of one letter, used for word-level deduplication. Letters
/// that differ only by the orientation/exponent rewrite receive equal keys;
/// for curves whose two lifts coincide up to sign, and for null-homologous
/// curves, the adjusted orientation tag stays in the key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LetterKey {
    Twist(Vec<i64>),
    SelfTwist(Vec<i64>, Sign),
    NullTwist(String, Sign),
    CoverTwist(Vec<i64>, Sign),
    CoverNull(String, Sign, Sign),
}

/// Canonical form of a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordKey {
    pub fiber: Fiber,
    pub base: Base,
    pub letters: Vec<LetterKey>,
}

/// A factorization word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    fiber: Fiber,
    base: Base,
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(fiber: Fiber, base: Base, letters: Vec<Letter>) -> Result<Word> {
        let w = Word {
            fiber,
            base,
            letters,
        };
        w.check_shape()?;
        Ok(w)
    }

    pub fn empty(fiber: Fiber, base: Base) -> Word {
        Word {
            fiber,
            base,
            letters: Vec::new(),
        }
    }

    fn check_shape(&self) -> Result<()> {
        for l in &self.letters {
            match (self.fiber, l) {
                (Fiber::NonOrientable { .. }, Letter::Dict { .. }) => {}
                (Fiber::Orientable { .. }, Letter::Cover { class, .. }) => {
                    if let CoverClass::Class(g) = class {
                        if g.rank() != self.fiber.rank() {
                            return Err(Error::WordShape(format!(
                                "cover class of rank {} on a rank-{} fiber",
                                g.rank(),
                                self.fiber.rank()
                            )));
                        }
                        if g.is_zero() {
                            return Err(Error::WordShape(
                                "zero cover class; use a null marker instead".into(),
                            ));
                        }
                    }
                }
                _ => {
                    return Err(Error::WordShape(format!(
                        "letter kind does not match fiber {}",
                        self.fiber
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn fiber(&self) -> Fiber {
        self.fiber
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// A word is positive when every exponent is `+1`.
    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| l.exponent() == Sign::Plus)
    }

    /// Check every letter against the dictionary (and the fiber against the
    /// dictionary's surface).
    pub fn validate(&self, dict: &CurveDictionary) -> Result<()> {
        self.check_shape()?;
        if let Fiber::NonOrientable { genus } = self.fiber {
            if genus != dict.genus() {
                return Err(Error::WordShape(format!(
                    "word over N{genus} loaded against a dictionary for N{}",
                    dict.genus()
                )));
            }
            for l in &self.letters {
                if let Letter::Dict { curve, .. } = l {
                    dict.get(&curve.curve)?;
                }
            }
        }
        Ok(())
    }

    fn check_pos(&self, pos: usize, max_inclusive: usize) -> Result<()> {
        if pos > max_inclusive {
            return Err(Error::OutOfBounds {
                pos,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// Replace letter `i` by the same twist written with the opposite
    /// neighborhood orientation. The homology action of the word is
    /// unchanged.
    pub fn theta_flip(&self, i: usize) -> Result<Word> {
        if self.fiber.is_orientable() {
            return Err(Error::OrientableFiber);
        }
        if i >= self.len() {
            return Err(Error::OutOfBounds {
                pos: i,
                len: self.len(),
            });
        }
        let mut letters = self.letters.clone();
        letters[i] = letters[i].flipped()?;
        Ok(Word {
            fiber: self.fiber,
            base: self.base,
            letters,
        })
    }

    /// Rewrite every negative letter through the orientation flip so that
    /// all exponents are `+1`. Length and total monodromy are preserved.
    pub fn normalize_positive(&self) -> Result<Word> {
        if self.fiber.is_orientable() {
            return Err(Error::OrientableFiber);
        }
        let letters = self
            .letters
            .iter()
            .map(|l| {
                if l.exponent() == Sign::Minus {
                    l.flipped()
                } else {
                    Ok(l.clone())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word {
            fiber: self.fiber,
            base: self.base,
            letters,
        })
    }

    /// Insert a cancelling pair of `letter` at `pos`: `(l⁻¹, l)` or
    /// `(l, l⁻¹)`. The total monodromy is unchanged.
    pub fn insert_cancelling_pair(
        &self,
        pos: usize,
        letter: Letter,
        order: PairOrder,
        dict: &CurveDictionary,
    ) -> Result<Word> {
        self.check_pos(pos, self.len())?;
        match (&self.fiber, &letter) {
            (Fiber::NonOrientable { .. }, Letter::Dict { curve, .. }) => {
                dict.get(&curve.curve)?;
            }
            (Fiber::Orientable { .. }, Letter::Cover { .. }) => {}
            _ => {
                return Err(Error::WordShape(format!(
                    "inserted letter kind does not match fiber {}",
                    self.fiber
                )))
            }
        }
        let pair = match order {
            PairOrder::InverseFirst => [letter.inverse(), letter],
            PairOrder::InverseLast => [letter.clone(), letter.inverse()],
        };
        let mut letters = self.letters.clone();
        letters.splice(pos..pos, pair);
        let w = Word {
            fiber: self.fiber,
            base: self.base,
            letters,
        };
        w.check_shape()?;
        Ok(w)
    }

    /// Delete the mutually-inverse letters at `pos`, `pos + 1`.
    pub fn delete_cancelling_pair(&self, pos: usize) -> Result<Word> {
        if pos + 1 >= self.len() {
            return Err(Error::OutOfBounds {
                pos,
                len: self.len(),
            });
        }
        if !self.letters[pos].is_inverse_of(&self.letters[pos + 1]) {
            return Err(Error::NotInversePair(pos, pos + 1));
        }
        let mut letters = self.letters.clone();
        letters.drain(pos..=pos + 1);
        Ok(Word {
            fiber: self.fiber,
            base: self.base,
            letters,
        })
    }

    /// Precondition of [`Word::commute_adjacent`], without constructing the
    /// result.
    pub fn can_commute(&self, pos: usize, dict: &CurveDictionary) -> bool {
        if pos + 1 >= self.len() {
            return false;
        }
        match (&self.letters[pos], &self.letters[pos + 1]) {
            (Letter::Dict { curve: c1, .. }, Letter::Dict { curve: c2, .. }) => {
                c1.curve == c2.curve || dict.is_declared_disjoint(&c1.curve, &c2.curve)
            }
            (Letter::Cover { class: k1, .. }, Letter::Cover { class: k2, .. }) => {
                cover_classes_disjoint(k1, k2, self.fiber.cover_genus()).unwrap_or(false)
            }
            _ => false,
        }
    }

    /// Swap the adjacent letters at `pos`, `pos + 1`. Legal only for twists
    /// about the same curve or curves known to be disjoint: a declared pair
    /// for dictionary words, members of one lift pair for cover words.
    pub fn commute_adjacent(&self, pos: usize, dict: &CurveDictionary) -> Result<Word> {
        if pos + 1 >= self.len() {
            return Err(Error::OutOfBounds {
                pos,
                len: self.len(),
            });
        }
        let a = &self.letters[pos];
        let b = &self.letters[pos + 1];
        match (a, b) {
            (Letter::Dict { curve: c1, .. }, Letter::Dict { curve: c2, .. }) => {
                let same = c1.curve == c2.curve;
                if !same && !dict.is_declared_disjoint(&c1.curve, &c2.curve) {
                    return Err(Error::NotDeclaredDisjoint(
                        c1.curve.to_string(),
                        c2.curve.to_string(),
                    ));
                }
                debug_assert!(
                    {
                        let rank = dict.rank();
                        let ma = a.matrix(dict, rank)?;
                        let mb = b.matrix(dict, rank)?;
                        ma.commutes_with(&mb)?
                    },
                    "declared-disjoint letters must commute on homology"
                );
            }
            (Letter::Cover { class: k1, .. }, Letter::Cover { class: k2, .. }) => {
                if !cover_classes_disjoint(k1, k2, self.fiber.cover_genus())? {
                    return Err(Error::NotDeclaredDisjoint(
                        format!("{k1:?}"),
                        format!("{k2:?}"),
                    ));
                }
            }
            _ => return Err(Error::WordShape("mixed letter kinds".into())),
        }
        let mut letters = self.letters.clone();
        letters.swap(pos, pos + 1);
        Ok(Word {
            fiber: self.fiber,
            base: self.base,
            letters,
        })
    }

    /// Simultaneous conjugation: push every letter forward along the mapping
    /// class with homology action `m`. Exponents are preserved and the total
    /// monodromy is conjugated by `m`.
    ///
    /// Over a non-orientable fiber `m` must be the shadow of a lift
    /// (symplectic and commuting with the deck involution); the images of
    /// declared-disjoint pairs occurring in the word are declared disjoint
    /// again, since disjointness is preserved by diffeomorphisms.
    pub fn conjugate_all(&self, m: &MCMatrix, dict: &mut CurveDictionary) -> Result<Word> {
        if !m.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        match self.fiber {
            Fiber::NonOrientable { .. } => {
                if m.rank() != dict.rank() {
                    return Err(Error::DimensionMismatch(format!(
                        "rank-{} conjugator on a rank-{} lattice",
                        m.rank(),
                        dict.rank()
                    )));
                }
                if !m.commutes_with(&dict.deck())? {
                    return Err(Error::NotALift);
                }
                let mut letters = Vec::with_capacity(self.len());
                for l in &self.letters {
                    let Letter::Dict { curve, exponent } = l else {
                        unreachable!()
                    };
                    let image = dict.push_forward(m, curve)?;
                    letters.push(Letter::Dict {
                        curve: image,
                        exponent: *exponent,
                    });
                }
                // Carry declared disjointness over to the image curves.
                let ids: BTreeSet<CurveId> = self
                    .letters
                    .iter()
                    .filter_map(|l| match l {
                        Letter::Dict { curve, .. } => Some(curve.curve.clone()),
                        _ => None,
                    })
                    .collect();
                let mut images: BTreeMap<CurveId, CurveId> = BTreeMap::new();
                for id in &ids {
                    let image =
                        dict.push_forward(m, &OrientedCurve::new(id.clone(), Sign::Plus))?;
                    images.insert(id.clone(), image.curve);
                }
                let ids: Vec<&CurveId> = ids.iter().collect();
                for (i, a) in ids.iter().enumerate() {
                    for b in ids.iter().skip(i + 1) {
                        if dict.is_declared_disjoint(a, b) {
                            let (ia, ib) = (&images[*a], &images[*b]);
                            if ia != ib && !dict.is_declared_disjoint(ia, ib) {
                                dict.declare_disjoint(ia, ib)?;
                            }
                        }
                    }
                }
                Ok(Word {
                    fiber: self.fiber,
                    base: self.base,
                    letters,
                })
            }
            Fiber::Orientable { .. } => {
                if m.rank() != self.fiber.rank() {
                    return Err(Error::DimensionMismatch(format!(
                        "rank-{} conjugator on a rank-{} fiber",
                        m.rank(),
                        self.fiber.rank()
                    )));
                }
                let letters = self
                    .letters
                    .iter()
                    .map(|l| {
                        let Letter::Cover { class, exponent } = l else {
                            unreachable!()
                        };
                        let class = match class {
                            CoverClass::Class(g) => CoverClass::Class(m.apply(g)?),
                            CoverClass::Null { .. } => class.clone(),
                        };
                        Ok(Letter::Cover {
                            class,
                            exponent: *exponent,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Word {
                    fiber: self.fiber,
                    base: self.base,
                    letters,
                })
            }
        }
    }

    /// Total monodromy of the word: the composition of the letter matrices
    /// under the left-to-right word convention.
    pub fn monodromy(&self, dict: &CurveDictionary) -> Result<MCMatrix> {
        if let Fiber::NonOrientable { genus } = self.fiber {
            if genus != dict.genus() {
                return Err(Error::WordShape(format!(
                    "word over N{genus} computed against a dictionary for N{}",
                    dict.genus()
                )));
            }
        }
        let rank = self.fiber.rank();
        let mats = self
            .letters
            .iter()
            .map(|l| l.matrix(dict, rank))
            .collect::<Result<Vec<_>>>()?;
        compose_word_matrices(rank, &mats)
    }

    /// Repeatedly delete the leftmost adjacent mutually-inverse pair. The
    /// result is unique up to the letterwise canonical form.
    pub fn free_cancel(&self) -> Word {
        let mut letters = self.letters.clone();
        loop {
            let pos = (0..letters.len().saturating_sub(1))
                .find(|&i| letters[i].is_inverse_of(&letters[i + 1]));
            match pos {
                Some(i) => {
                    letters.drain(i..=i + 1);
                }
                None => break,
            }
        }
        Word {
            fiber: self.fiber,
            base: self.base,
            letters,
        }
    }

    /// Canonical key for deduplication: words equal after letterwise
    /// canonicalization receive equal keys.
    pub fn canonical_key(&self, dict: &CurveDictionary) -> Result<WordKey> {
        let letters = self
            .letters
            .iter()
            .map(|l| letter_key(l, dict))
            .collect::<Result<Vec<_>>>()?;
        Ok(WordKey {
            fiber: self.fiber,
            base: self.base,
            letters,
        })
    }

    /// Apply one elementary move.
    pub fn apply_move(&self, mv: &Move, dict: &mut CurveDictionary) -> Result<Word> {
        match mv {
            Move::InsertPair { pos, letter, order } => {
                self.insert_cancelling_pair(*pos, letter.clone(), *order, dict)
            }
            Move::DeletePair { pos } => self.delete_cancelling_pair(*pos),
            Move::Commute { pos } => self.commute_adjacent(*pos, dict),
            Move::ThetaFlip { pos } => self.theta_flip(*pos),
            Move::ConjugateAll { matrix } => self.conjugate_all(matrix, dict),
        }
    }

    /// Insert a cancelling pair of letter `i` immediately after letter
    /// `i + 1` — the first of the two insertion shapes used when relating
    /// factorizations of isomorphic fibrations.
    pub fn insert_trailing_pair(&self, i: usize, dict: &CurveDictionary) -> Result<Word> {
        if i + 1 >= self.len() {
            return Err(Error::OutOfBounds {
                pos: i,
                len: self.len(),
            });
        }
        self.insert_cancelling_pair(
            i + 2,
            self.letters[i].clone(),
            PairOrder::InverseFirst,
            dict,
        )
    }

    /// Insert a cancelling pair of letter `i + 1` immediately before letter
    /// `i` — the second insertion shape.
    pub fn insert_leading_pair(&self, i: usize, dict: &CurveDictionary) -> Result<Word> {
        if i + 1 >= self.len() {
            return Err(Error::OutOfBounds {
                pos: i,
                len: self.len(),
            });
        }
        self.insert_cancelling_pair(i, self.letters[i + 1].clone(), PairOrder::InverseLast, dict)
    }
}

/// Disjointness rule for cover letters: the same class, members of one lift
/// pair (deck images of each other with vanishing pairing), or the two lifts
/// of one null-homologous curve.
fn cover_classes_disjoint(a: &CoverClass, b: &CoverClass, k: usize) -> Result<bool> {
    match (a, b) {
        (CoverClass::Class(x), CoverClass::Class(y)) => {
            if x.same_unoriented(y) {
                return Ok(true);
            }
            let deck = deck_involution(k);
            Ok(deck.apply(x)?.same_unoriented(y) && pairing(x, y)? == 0)
        }
        (CoverClass::Null { tag: t1, .. }, CoverClass::Null { tag: t2, .. }) => Ok(t1 == t2),
        _ => Ok(false),
    }
}

fn letter_key(l: &Letter, dict: &CurveDictionary) -> Result<LetterKey> {
    match l {
        Letter::Dict { curve, exponent } => {
            let theta = if *exponent == Sign::Minus {
                curve.theta.flip()
            } else {
                curve.theta
            };
            let entry = dict.get(&curve.curve)?;
            match entry.lift() {
                crate::cover::CurveLift::Null { tag } => {
                    Ok(LetterKey::NullTwist(tag.clone(), theta))
                }
                crate::cover::CurveLift::Class(g) => {
                    let deck = dict.deck();
                    let jg = deck.apply(g)?;
                    if jg.same_unoriented(g) {
                        Ok(LetterKey::SelfTwist(g.canonical().coeffs().to_vec(), theta))
                    } else {
                        let selected = match theta {
                            Sign::Plus => g.clone(),
                            Sign::Minus => jg,
                        };
                        Ok(LetterKey::Twist(selected.canonical().coeffs().to_vec()))
                    }
                }
            }
        }
        Letter::Cover { class, exponent } => match class {
            CoverClass::Class(g) => Ok(LetterKey::CoverTwist(
                g.canonical().coeffs().to_vec(),
                *exponent,
            )),
            CoverClass::Null { tag, side } => {
                Ok(LetterKey::CoverNull(tag.clone(), *side, *exponent))
            }
        },
    }
}

/// The move sequence undoing `mv` applied to `before`. Deleted non-canonical
/// pairs are re-created as a canonical insertion followed by an orientation
/// flip.
pub fn inverse_moves(mv: &Move, before: &Word) -> Result<Vec<Move>> {
    match mv {
        Move::InsertPair { pos, .. } => Ok(vec![Move::DeletePair { pos: *pos }]),
        Move::DeletePair { pos } => {
            let len = before.len();
            if *pos + 1 >= len {
                return Err(Error::OutOfBounds { pos: *pos, len });
            }
            let first = before.letters()[*pos].clone();
            let second = &before.letters()[*pos + 1];
            if first.inverse() == *second {
                Ok(vec![Move::InsertPair {
                    pos: *pos,
                    letter: first,
                    order: PairOrder::InverseLast,
                }])
            } else {
                // Mutually inverse through the orientation rewrite: re-insert
                // the canonical pair, then flip the second letter into shape.
                Ok(vec![
                    Move::InsertPair {
                        pos: *pos,
                        letter: first,
                        order: PairOrder::InverseLast,
                    },
                    Move::ThetaFlip { pos: *pos + 1 },
                ])
            }
        }
        Move::Commute { pos } => Ok(vec![Move::Commute { pos: *pos }]),
        Move::ThetaFlip { pos } => Ok(vec![Move::ThetaFlip { pos: *pos }]),
        Move::ConjugateAll { matrix } => Ok(vec![Move::ConjugateAll {
            matrix: matrix.inverse()?,
        }]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::standard_dictionary;
    use crate::homology::HClass;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dict() -> CurveDictionary {
        // g = 5 keeps two deck-orbits in each of the a- and b-families, so
        // declared-disjoint pairs exist.
        standard_dictionary(5).unwrap()
    }

    fn letter(dict: &CurveDictionary, id: &str, theta: Sign, exponent: Sign) -> Letter {
        let id = CurveId::new(id).unwrap();
        assert!(dict.contains(&id));
        Letter::Dict {
            curve: OrientedCurve::new(id, theta),
            exponent,
        }
    }

    fn word(dict: &CurveDictionary, letters: Vec<Letter>) -> Word {
        Word::new(
            Fiber::NonOrientable {
                genus: dict.genus(),
            },
            Base::Disk,
            letters,
        )
        .unwrap()
    }

    fn random_word(dict: &CurveDictionary, seed: u64, len: usize) -> Word {
        let mut rng = StdRng::seed_from_u64(seed);
        let ids: Vec<String> = dict.curves().map(|c| c.id().to_string()).collect();
        let letters = (0..len)
            .map(|_| {
                let id = &ids[rng.gen_range(0..ids.len())];
                let theta = if rng.gen_bool(0.5) {
                    Sign::Plus
                } else {
                    Sign::Minus
                };
                let exponent = if rng.gen_bool(0.5) {
                    Sign::Plus
                } else {
                    Sign::Minus
                };
                letter(dict, id, theta, exponent)
            })
            .collect();
        word(dict, letters)
    }

    #[test]
    fn theta_flip_inverts_exponent() {
        let d = dict();
        let w = word(&d, vec![letter(&d, "a1", Sign::Plus, Sign::Minus)]);
        let flipped = w.theta_flip(0).unwrap();
        assert_eq!(
            flipped.letters()[0],
            letter(&d, "a1", Sign::Minus, Sign::Plus)
        );
        assert_eq!(flipped.theta_flip(0).unwrap(), w);
        assert_eq!(w.monodromy(&d).unwrap(), flipped.monodromy(&d).unwrap());
    }

    #[test]
    fn theta_flip_preserves_monodromy_of_random_word() {
        let d = dict();
        let w = random_word(&d, 7, 5);
        for i in 0..w.len() {
            assert_eq!(
                w.theta_flip(i).unwrap().monodromy(&d).unwrap(),
                w.monodromy(&d).unwrap()
            );
        }
    }

    #[test]
    fn theta_flip_bounds_and_fiber() {
        let d = dict();
        let w = word(&d, vec![]);
        assert!(matches!(w.theta_flip(0), Err(Error::OutOfBounds { .. })));
        let cover = Word::empty(Fiber::Orientable { genus: 2 }, Base::Disk);
        assert!(matches!(cover.theta_flip(0), Err(Error::OrientableFiber)));
    }

    #[test]
    fn normalize_positive_examples() {
        let d = dict();
        let empty = word(&d, vec![]);
        assert_eq!(empty.normalize_positive().unwrap(), empty);

        let w = word(
            &d,
            vec![
                letter(&d, "a1", Sign::Plus, Sign::Minus),
                letter(&d, "a2", Sign::Minus, Sign::Plus),
            ],
        );
        let n = w.normalize_positive().unwrap();
        assert_eq!(
            n.letters(),
            &[
                letter(&d, "a1", Sign::Minus, Sign::Plus),
                letter(&d, "a2", Sign::Minus, Sign::Plus)
            ]
        );
        assert!(n.is_positive());
        assert_eq!(n.len(), w.len());
        assert_eq!(n.monodromy(&d).unwrap(), w.monodromy(&d).unwrap());
        assert_eq!(n.normalize_positive().unwrap(), n);
    }

    #[test]
    fn insert_cancelling_pair_examples() {
        let d = dict();
        let empty = word(&d, vec![]);
        let l = letter(&d, "a1", Sign::Plus, Sign::Plus);
        let w = empty
            .insert_cancelling_pair(0, l.clone(), PairOrder::InverseFirst, &d)
            .unwrap();
        assert_eq!(w.len(), 2);
        assert!(w.monodromy(&d).unwrap().is_identity());

        let unknown = Letter::Dict {
            curve: OrientedCurve::new(CurveId::new("zz").unwrap(), Sign::Plus),
            exponent: Sign::Plus,
        };
        assert!(matches!(
            empty.insert_cancelling_pair(0, unknown, PairOrder::InverseFirst, &d),
            Err(Error::UnknownCurve(_))
        ));

        let w = random_word(&d, 11, 4);
        for pos in 0..=w.len() {
            let inserted = w
                .insert_cancelling_pair(pos, l.clone(), PairOrder::InverseLast, &d)
                .unwrap();
            assert_eq!(inserted.len(), w.len() + 2);
            assert_eq!(inserted.monodromy(&d).unwrap(), w.monodromy(&d).unwrap());
            assert_eq!(inserted.delete_cancelling_pair(pos).unwrap(), w);
        }
    }

    #[test]
    fn trailing_pair_matches_displayed_shape() {
        let d = dict();
        let w = random_word(&d, 3, 4);
        let out = w.insert_trailing_pair(1, &d).unwrap();
        // shape: l0 l1 l2 (l1^{-1} l1) l3
        assert_eq!(out.len(), 6);
        assert_eq!(out.letters()[3], w.letters()[1].inverse());
        assert_eq!(out.letters()[4], w.letters()[1]);
        assert_eq!(out.monodromy(&d).unwrap(), w.monodromy(&d).unwrap());

        let lead = w.insert_leading_pair(1, &d).unwrap();
        // shape: l0 (l2 l2^{-1}) l1 l2 l3
        assert_eq!(lead.letters()[1], w.letters()[2]);
        assert_eq!(lead.letters()[2], w.letters()[2].inverse());
    }

    #[test]
    fn delete_cancelling_pair_examples() {
        let d = dict();
        // Opposite orientation tags with equal exponents are inverse.
        let w = word(
            &d,
            vec![
                letter(&d, "a1", Sign::Plus, Sign::Plus),
                letter(&d, "a1", Sign::Minus, Sign::Plus),
            ],
        );
        assert!(w.delete_cancelling_pair(0).unwrap().is_empty());

        let w = word(
            &d,
            vec![
                letter(&d, "a1", Sign::Plus, Sign::Plus),
                letter(&d, "a1", Sign::Plus, Sign::Minus),
            ],
        );
        assert!(w.delete_cancelling_pair(0).unwrap().is_empty());

        let w = word(
            &d,
            vec![
                letter(&d, "a1", Sign::Plus, Sign::Plus),
                letter(&d, "a2", Sign::Minus, Sign::Plus),
            ],
        );
        assert!(matches!(
            w.delete_cancelling_pair(0),
            Err(Error::NotInversePair(0, 1))
        ));
    }

    #[test]
    fn commute_examples() {
        let d = dict();
        let ta = letter(&d, "a1", Sign::Plus, Sign::Plus);
        let tb = letter(&d, "a2", Sign::Minus, Sign::Plus);
        let w = word(&d, vec![ta.clone(), tb.clone()]);
        let swapped = w.commute_adjacent(0, &d).unwrap();
        assert_eq!(swapped.letters(), &[tb, ta.clone()]);
        assert_eq!(swapped.monodromy(&d).unwrap(), w.monodromy(&d).unwrap());

        let same = word(&d, vec![ta.clone(), ta.clone()]);
        assert_eq!(same.commute_adjacent(0, &d).unwrap(), same);

        // An undeclared pair is rejected even when every lift pairing
        // vanishes.
        let mut bare = CurveDictionary::new(5).unwrap();
        let lat = bare.lattice();
        bare.register(CurveId::new("c").unwrap(), lat.basis_a(1))
            .unwrap();
        bare.register(CurveId::new("e").unwrap(), lat.basis_a(2))
            .unwrap();
        let w = Word::new(
            Fiber::NonOrientable { genus: 5 },
            Base::Disk,
            vec![
                Letter::Dict {
                    curve: OrientedCurve::new(CurveId::new("c").unwrap(), Sign::Plus),
                    exponent: Sign::Plus,
                },
                Letter::Dict {
                    curve: OrientedCurve::new(CurveId::new("e").unwrap(), Sign::Plus),
                    exponent: Sign::Plus,
                },
            ],
        )
        .unwrap();
        assert!(matches!(
            w.commute_adjacent(0, &bare),
            Err(Error::NotDeclaredDisjoint(_, _))
        ));
        bare.declare_disjoint(&CurveId::new("c").unwrap(), &CurveId::new("e").unwrap())
            .unwrap();
        assert!(w.commute_adjacent(0, &bare).is_ok());
    }

    #[test]
    fn conjugate_all_examples() {
        let mut d = dict();
        let w = random_word(&d, 13, 4);
        let rank = d.rank();
        let id = MCMatrix::identity(rank);
        assert_eq!(w.conjugate_all(&id, &mut d).unwrap(), w);

        // Conjugator: lifted twist about the dictionary curve a1.
        let (sel, comp) = d
            .lift_pair(&OrientedCurve::new(CurveId::new("a1").unwrap(), Sign::Plus))
            .unwrap();
        let (CoverClass::Class(sel), CoverClass::Class(comp)) = (sel, comp) else {
            panic!()
        };
        let m = compose_word_matrices(
            rank,
            &[
                transvection(&sel).unwrap(),
                transvection_inverse(&comp).unwrap(),
            ],
        )
        .unwrap();

        let single = word(&d, vec![letter(&d, "b1", Sign::Plus, Sign::Plus)]);
        let conj = single.conjugate_all(&m, &mut d).unwrap();
        let lhs = conj.monodromy(&d).unwrap();
        let rhs = crate::homology::conjugate(&single.monodromy(&d).unwrap(), &m).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(conj.letters()[0].exponent(), Sign::Plus);

        let conj_word = w.conjugate_all(&m, &mut d).unwrap();
        assert_eq!(
            conj_word.monodromy(&d).unwrap().char_poly(),
            w.monodromy(&d).unwrap().char_poly()
        );
    }

    #[test]
    fn monodromy_examples() {
        let d = dict();
        assert!(word(&d, vec![]).monodromy(&d).unwrap().is_identity());

        let w = word(
            &d,
            vec![
                letter(&d, "b1", Sign::Plus, Sign::Plus),
                letter(&d, "b1", Sign::Minus, Sign::Plus),
            ],
        );
        assert!(w.monodromy(&d).unwrap().is_identity());

        // The product is always the reversed fold of the letter matrices,
        // and for some word the forward fold disagrees, so the convention
        // is observable.
        let rank = d.rank();
        let candidates = vec![
            vec![
                letter(&d, "a1", Sign::Plus, Sign::Plus),
                letter(&d, "b1", Sign::Plus, Sign::Plus),
                letter(&d, "a2", Sign::Plus, Sign::Plus),
            ],
            vec![
                letter(&d, "a1", Sign::Plus, Sign::Plus),
                letter(&d, "b1", Sign::Plus, Sign::Plus),
                letter(&d, "b1", Sign::Plus, Sign::Plus),
            ],
            vec![
                letter(&d, "b1", Sign::Plus, Sign::Plus),
                letter(&d, "a1", Sign::Plus, Sign::Plus),
                letter(&d, "b2", Sign::Minus, Sign::Plus),
            ],
        ];
        let mut some_order_sensitive = false;
        for letters in candidates {
            let w = word(&d, letters);
            let mats: Vec<MCMatrix> = w
                .letters()
                .iter()
                .map(|l| l.matrix(&d, rank).unwrap())
                .collect();
            let mut reversed = MCMatrix::identity(rank);
            for m in mats.iter().rev() {
                reversed = reversed.mul(m).unwrap();
            }
            assert_eq!(w.monodromy(&d).unwrap(), reversed);
            let mut forward = MCMatrix::identity(rank);
            for m in mats.iter() {
                forward = forward.mul(m).unwrap();
            }
            some_order_sensitive |= w.monodromy(&d).unwrap() != forward;
        }
        assert!(
            some_order_sensitive,
            "letter order must be observable in the product"
        );
    }

    #[test]
    fn free_cancel_reduces_planted_pairs() {
        let d = dict();
        let a = letter(&d, "a1", Sign::Plus, Sign::Plus);
        let b = letter(&d, "b1", Sign::Plus, Sign::Plus);
        // a b b⁻¹ a a⁻¹ a⁻¹ reduces to nothing.
        let w = word(
            &d,
            vec![
                a.clone(),
                b.clone(),
                b.inverse(),
                a.clone(),
                a.inverse(),
                a.inverse(),
            ],
        );
        assert!(w.free_cancel().is_empty());
        // A surviving letter stays put.
        let w = word(&d, vec![b.clone(), a.clone(), a.inverse()]);
        assert_eq!(w.free_cancel().letters(), &[b]);
    }

    #[test]
    fn inverse_moves_undo() {
        let mut d = dict();
        let w = random_word(&d, 17, 5);
        let l = letter(&d, "a2", Sign::Minus, Sign::Plus);
        let moves = vec![
            Move::InsertPair {
                pos: 2,
                letter: l,
                order: PairOrder::InverseFirst,
            },
            Move::ThetaFlip { pos: 0 },
        ];
        for mv in moves {
            let after = w.apply_move(&mv, &mut d).unwrap();
            let mut back = after.clone();
            for inv in inverse_moves(&mv, &w).unwrap() {
                back = back.apply_move(&inv, &mut d).unwrap();
            }
            assert_eq!(back, w);
        }
        // Deleting a flip-related pair restores through insert + flip.
        let pair = word(
            &d,
            vec![
                letter(&d, "a1", Sign::Plus, Sign::Plus),
                letter(&d, "a1", Sign::Minus, Sign::Plus),
            ],
        );
        let mv = Move::DeletePair { pos: 0 };
        let after = pair.apply_move(&mv, &mut d).unwrap();
        let mut back = after;
        for inv in inverse_moves(&mv, &pair).unwrap() {
            back = back.apply_move(&inv, &mut d).unwrap();
        }
        assert_eq!(back, pair);
    }

    #[test]
    fn canonical_key_invariant_under_reregistration() {
        // Same geometric data registered with flipped sign and with the
        // swapped lift must key identically.
        let mut d1 = CurveDictionary::new(3).unwrap();
        let mut d2 = CurveDictionary::new(3).unwrap();
        let g = HClass::new(vec![1, 2, 0, 0]);
        let jg = d1.deck().apply(&g).unwrap();
        d1.register(CurveId::new("c").unwrap(), g.clone()).unwrap();
        d2.register(CurveId::new("c").unwrap(), jg.neg()).unwrap();

        let w1 = Word::new(
            Fiber::NonOrientable { genus: 3 },
            Base::Disk,
            vec![Letter::Dict {
                curve: OrientedCurve::new(CurveId::new("c").unwrap(), Sign::Plus),
                exponent: Sign::Plus,
            }],
        )
        .unwrap();
        let w2 = Word::new(
            Fiber::NonOrientable { genus: 3 },
            Base::Disk,
            vec![Letter::Dict {
                curve: OrientedCurve::new(CurveId::new("c").unwrap(), Sign::Minus),
                exponent: Sign::Plus,
            }],
        )
        .unwrap();
        assert_eq!(
            w1.canonical_key(&d1).unwrap(),
            w2.canonical_key(&d2).unwrap()
        );

        // The orientation/exponent rewrite also keys identically, while the
        // inverse letter keys differently.
        let w3 = w1.theta_flip(0).unwrap();
        assert_eq!(
            w1.canonical_key(&d1).unwrap(),
            w3.canonical_key(&d1).unwrap()
        );
        let inv = Word::new(
            Fiber::NonOrientable { genus: 3 },
            Base::Disk,
            vec![w1.letters()[0].inverse()],
        )
        .unwrap();
        assert_ne!(
            w1.canonical_key(&d1).unwrap(),
            inv.canonical_key(&d1).unwrap()
        );
    }

    proptest! {
        #[test]
        fn prop_free_cancel_agrees_with_stack_reduction(seed in 0u64..500) {
            let d = dict();
            let w = random_word(&d, seed, 8);
            // Independent stack-based reduction oracle.
            let mut stack: Vec<Letter> = Vec::new();
            for l in w.letters() {
                if stack.last().map(|t| t.is_inverse_of(l)).unwrap_or(false) {
                    stack.pop();
                } else {
                    stack.push(l.clone());
                }
            }
            let reduced = w.free_cancel();
            let oracle = Word::new(w.fiber(), w.base(), stack).unwrap();
            prop_assert_eq!(
                reduced.canonical_key(&d).unwrap(),
                oracle.canonical_key(&d).unwrap()
            );
        }

        #[test]
        fn prop_normalize_is_idempotent_and_matrix_preserving(seed in 0u64..200) {
            let d = dict();
            let w = random_word(&d, seed, 6);
            let n = w.normalize_positive().unwrap();
            prop_assert!(n.is_positive());
            prop_assert_eq!(n.normalize_positive().unwrap(), n.clone());
            prop_assert_eq!(n.monodromy(&d).unwrap(), w.monodromy(&d).unwrap());
        }
    }
}
