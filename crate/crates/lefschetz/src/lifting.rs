//! Lifting factorization words through the orientation double cover.
//!
//! A twist about a two-sided curve on `N_g` lifts to the twist about one
//! lift of the curve composed with the inverse twist about the other, so a
//! positive word of length `n` lifts to an achiral word of length `2n` with
//! equal numbers of positive and negative letters. The lift is a
//! homomorphism for `g >= 3`; at the homology level this is checked by the
//! two-path tests below rather than assumed.

use crate::cover::CurveDictionary;
use crate::words::{Base, Fiber, Letter, Word};
use crate::{Error, Result};

fn require_liftable(word: &Word, dict: &CurveDictionary) -> Result<u32> {
    let Fiber::NonOrientable { genus } = word.fiber() else {
        return Err(Error::WordShape(
            "cannot lift a word over an orientable fiber".into(),
        ));
    };
    if genus != dict.genus() {
        return Err(Error::WordShape(format!(
            "word over N{genus} lifted against a dictionary for N{}",
            dict.genus()
        )));
    }
    if genus < 3 {
        return Err(Error::GenusTooSmall(genus));
    }
    Ok(genus)
}

/// Lift one letter to its twist pair on the cover: `t^{+1}` becomes
/// `(t_γ, t_{Jγ}^{-1})` for the orientation-selected lift `γ`, and `t^{-1}`
/// becomes the inverse pair in reverse order.
pub fn lift_letter(letter: &Letter, dict: &CurveDictionary) -> Result<[Letter; 2]> {
    let Letter::Dict { curve, exponent } = letter else {
        return Err(Error::WordShape(
            "cover letters cannot be lifted again".into(),
        ));
    };
    if dict.genus() < 3 {
        return Err(Error::GenusTooSmall(dict.genus()));
    }
    let (selected, companion) = dict.lift_pair(curve)?;
    use crate::cover::Sign::{Minus, Plus};
    Ok(match exponent {
        Plus => [
            Letter::Cover {
                class: selected,
                exponent: Plus,
            },
            Letter::Cover {
                class: companion,
                exponent: Minus,
            },
        ],
        Minus => [
            Letter::Cover {
                class: companion,
                exponent: Plus,
            },
            Letter::Cover {
                class: selected,
                exponent: Minus,
            },
        ],
    })
}

/// Lift a whole word: the concatenation of the letter lifts, an achiral word
/// over the genus-`(g-1)` cover with the same base.
pub fn lift_word(word: &Word, dict: &CurveDictionary) -> Result<Word> {
    let genus = require_liftable(word, dict)?;
    let mut letters = Vec::with_capacity(2 * word.len());
    for l in word.letters() {
        letters.extend(lift_letter(l, dict)?);
    }
    Word::new(Fiber::Orientable { genus: genus - 1 }, word.base(), letters)
}

/// Counts of `+1` and `-1` exponents.
pub fn exponent_counts(word: &Word) -> (usize, usize) {
    use crate::cover::Sign;
    let pos = word
        .letters()
        .iter()
        .filter(|l| l.exponent() == Sign::Plus)
        .count();
    (pos, word.len() - pos)
}

/// Homomorphism oracle: the matrix of the lift of `w1 ++ w2` must equal the
/// word-composition of the matrices of the two lifts. Always true; a failure
/// indicates an implementation bug, so this is exposed for tests.
pub fn check_homomorphism(w1: &Word, w2: &Word, dict: &CurveDictionary) -> Result<bool> {
    if w1.fiber() != w2.fiber() {
        return Err(Error::WordShape("words over different fibers".into()));
    }
    let mut letters = w1.letters().to_vec();
    letters.extend_from_slice(w2.letters());
    let concat = Word::new(w1.fiber(), w1.base(), letters)?;
    let whole = lift_word(&concat, dict)?.monodromy(dict)?;
    let first = lift_word(w1, dict)?.monodromy(dict)?;
    let second = lift_word(w2, dict)?.monodromy(dict)?;
    let composed = crate::homology::compose_word_matrices(first.rank(), &[first, second])?;
    Ok(whole == composed)
}

/// Convenience: an empty achiral word over the cover of `N_g`.
pub fn empty_lift(genus: u32, base: Base) -> Result<Word> {
    if genus < 3 {
        return Err(Error::GenusTooSmall(genus));
    }
    Ok(Word::empty(Fiber::Orientable { genus: genus - 1 }, base))
}
