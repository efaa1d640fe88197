//! Numerical invariants of a factorization: Euler characteristics of the
//! total space and its double cover, cover-genus consistency, total
//! monodromy, and the closure condition over the sphere.
//!
//! The singular-fiber count entering the Euler characteristic is taken from
//! the freely-cancelled word, so that it is stable under every elementary
//! move; the raw letter count is reported alongside.

use num_bigint::BigInt;

use crate::cover::CurveDictionary;
use crate::homology::MCMatrix;
use crate::words::{Base, Fiber, Word};
use crate::{Error, Result};

/// Euler characteristic of the total space of a fibration with fiber `N_g`
/// and `n` singular fibers: `(2 - g) · χ(base) + n`.
pub fn euler_characteristic(genus: u32, base: Base, n: usize) -> i64 {
    (2 - genus as i64) * base.euler() + n as i64
}

/// Recover the cover fiber genus from Euler-characteristic bookkeeping: the
/// double cover has `χ = 2 χ(X)` and `2n` singular fibers, so
/// `χ(Σ_k) · χ(base) + 2n = 2 ((2 - g) · χ(base) + n)` pins `k`. The result
/// is always `g - 1`; the equation is solved rather than assumed so the two
/// routes check each other. Requires `χ(base) != 0`, which holds for both
/// admissible bases.
pub fn cover_genus_from_euler(genus: u32, base: Base, n: usize) -> Result<u32> {
    let chi = base.euler();
    let chi_total = euler_characteristic(genus, base, n);
    let lhs = 2 * chi_total - 2 * n as i64; // = (2 - 2k) · χ(base)
    if lhs % chi != 0 {
        return Err(Error::WordShape(format!(
            "Euler bookkeeping does not close: {lhs} not divisible by χ(base) = {chi}"
        )));
    }
    let two_minus_2k = lhs / chi;
    let twice_k = 2 - two_minus_2k;
    if twice_k < 0 || twice_k % 2 != 0 {
        return Err(Error::WordShape(format!(
            "Euler bookkeeping yields a non-genus 2k = {twice_k}"
        )));
    }
    Ok((twice_k / 2) as u32)
}

/// Necessary closure condition for a factorization over the sphere: the
/// total monodromy must be the identity matrix. Sound but not sufficient —
/// the homology representation is not faithful.
pub fn s2_closure_check(word: &Word, dict: &CurveDictionary) -> Result<bool> {
    if word.base() != Base::Sphere {
        return Err(Error::WordShape("closure check requires base S2".into()));
    }
    Ok(word.monodromy(dict)?.is_identity())
}

/// Aggregated invariants of one factorization word.
#[derive(Clone, Debug, PartialEq)]
pub struct FibrationSummary {
    pub fiber: Fiber,
    pub base: Base,
    /// Letters as written.
    pub letters_raw: usize,
    /// Letters after free cancellation; the `n` entering χ.
    pub letters_reduced: usize,
    pub chi_total: i64,
    pub chi_cover: i64,
    pub cover_genus: u32,
    pub total_monodromy: MCMatrix,
    pub char_poly: Vec<BigInt>,
    pub trace: i64,
    /// Present only over the sphere.
    pub closure: Option<bool>,
}

/// Compute the full summary of a word over a non-orientable fiber.
pub fn summarize(word: &Word, dict: &CurveDictionary) -> Result<FibrationSummary> {
    let Fiber::NonOrientable { genus } = word.fiber() else {
        return Err(Error::WordShape(
            "summary requires a word over a non-orientable fiber".into(),
        ));
    };
    word.validate(dict)?;
    let reduced = word.free_cancel();
    let n = reduced.len();
    let chi_total = euler_characteristic(genus, word.base(), n);
    let chi_cover = 2 * chi_total;
    let cover_genus = cover_genus_from_euler(genus, word.base(), n)?;
    debug_assert_eq!(cover_genus, genus - 1);
    // Second route to the cover characteristic: the cover fibration itself.
    debug_assert_eq!(
        chi_cover,
        (2 - 2 * cover_genus as i64) * word.base().euler() + 2 * n as i64
    );
    let total_monodromy = word.monodromy(dict)?;
    debug_assert_eq!(total_monodromy, reduced.monodromy(dict)?);
    let char_poly = total_monodromy.char_poly();
    let trace = total_monodromy.trace();
    let closure = if word.base() == Base::Sphere {
        Some(total_monodromy.is_identity())
    } else {
        None
    };
    Ok(FibrationSummary {
        fiber: word.fiber(),
        base: word.base(),
        letters_raw: word.len(),
        letters_reduced: n,
        chi_total,
        chi_cover,
        cover_genus,
        total_monodromy,
        char_poly,
        trace,
        closure,
    })
}

impl std::fmt::Display for FibrationSummary {
    /// Flat `key=value` block with a stable key order, for scripting.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "fiber={}", self.fiber)?;
        writeln!(f, "base={}", self.base)?;
        writeln!(f, "letters_raw={}", self.letters_raw)?;
        writeln!(f, "letters_reduced={}", self.letters_reduced)?;
        writeln!(f, "chi_total={}", self.chi_total)?;
        writeln!(f, "chi_cover={}", self.chi_cover)?;
        writeln!(f, "cover_genus={}", self.cover_genus)?;
        writeln!(f, "trace={}", self.trace)?;
        let poly: Vec<String> = self.char_poly.iter().map(|c| c.to_string()).collect();
        writeln!(f, "char_poly={}", poly.join(","))?;
        writeln!(f, "monodromy={}", self.total_monodromy)?;
        if let Some(c) = self.closure {
            writeln!(f, "closure={c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{standard_dictionary, CurveId, OrientedCurve, Sign};
    use crate::words::Letter;

    fn letter(id: &str, theta: Sign, exponent: Sign) -> Letter {
        Letter::Dict {
            curve: OrientedCurve::new(CurveId::new(id).unwrap(), theta),
            exponent,
        }
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_characteristic(3, Base::Sphere, 4), 2);
        assert_eq!(euler_characteristic(2, Base::Disk, 0), 0);
        assert_eq!(euler_characteristic(1, Base::Sphere, 0), 2);
    }

    #[test]
    fn cover_genus_examples() {
        // g=3, S², n=4: 2χ(X) = 4, (2-2k)·2 + 8 = 4 forces k = 2.
        assert_eq!(cover_genus_from_euler(3, Base::Sphere, 4).unwrap(), 2);
        // g=5, D², n=0: (2-2k)·1 = 2(2-5) forces k = 4.
        assert_eq!(cover_genus_from_euler(5, Base::Disk, 0).unwrap(), 4);
        for g in 1..=12 {
            for n in [0, 1, 7] {
                assert_eq!(cover_genus_from_euler(g, Base::Disk, n).unwrap(), g - 1);
                assert_eq!(cover_genus_from_euler(g, Base::Sphere, n).unwrap(), g - 1);
            }
        }
    }

    #[test]
    fn closure_examples() {
        let d = standard_dictionary(3).unwrap();
        let fiber = Fiber::NonOrientable { genus: 3 };
        let empty = Word::empty(fiber, Base::Sphere);
        assert!(s2_closure_check(&empty, &d).unwrap());

        let cancelling = Word::new(
            fiber,
            Base::Sphere,
            vec![
                letter("a1", Sign::Plus, Sign::Plus),
                letter("a1", Sign::Minus, Sign::Plus),
            ],
        )
        .unwrap();
        assert!(s2_closure_check(&cancelling, &d).unwrap());

        let single = Word::new(
            fiber,
            Base::Sphere,
            vec![letter("a1", Sign::Plus, Sign::Plus)],
        )
        .unwrap();
        assert!(!s2_closure_check(&single, &d).unwrap());

        let disk = Word::empty(fiber, Base::Disk);
        assert!(s2_closure_check(&disk, &d).is_err());
    }

    #[test]
    fn summary_of_empty_word() {
        let d = standard_dictionary(3).unwrap();
        let w = Word::empty(Fiber::NonOrientable { genus: 3 }, Base::Sphere);
        let s = summarize(&w, &d).unwrap();
        assert_eq!(s.chi_total, -2);
        assert_eq!(s.chi_cover, -4);
        assert_eq!(s.cover_genus, 2);
        assert!(s.total_monodromy.is_identity());
        assert_eq!(s.closure, Some(true));
    }

    #[test]
    fn summary_of_reduced_four_letter_word() {
        let d = standard_dictionary(3).unwrap();
        let w = Word::new(
            Fiber::NonOrientable { genus: 3 },
            Base::Sphere,
            vec![
                letter("a1", Sign::Plus, Sign::Plus),
                letter("b1", Sign::Plus, Sign::Plus),
                letter("a1", Sign::Plus, Sign::Plus),
                letter("b1", Sign::Plus, Sign::Plus),
            ],
        )
        .unwrap();
        let s = summarize(&w, &d).unwrap();
        assert_eq!(s.letters_raw, 4);
        assert_eq!(s.letters_reduced, 4);
        assert_eq!(s.chi_total, 2);
        assert_eq!(s.chi_cover, 4);
        assert_eq!(s.cover_genus, 2);
        assert_eq!(s.chi_cover, 2 * s.chi_total);
    }

    #[test]
    fn summary_char_poly_invariant_under_conjugation() {
        let mut d = standard_dictionary(3).unwrap();
        let w = Word::new(
            Fiber::NonOrientable { genus: 3 },
            Base::Disk,
            vec![
                letter("a1", Sign::Plus, Sign::Plus),
                letter("b1", Sign::Minus, Sign::Plus),
                letter("a1", Sign::Minus, Sign::Plus),
            ],
        )
        .unwrap();
        let (sel, comp) = d
            .lift_pair(&OrientedCurve::new(CurveId::new("b1").unwrap(), Sign::Plus))
            .unwrap();
        let (crate::cover::CoverClass::Class(sel), crate::cover::CoverClass::Class(comp)) =
            (sel, comp)
        else {
            panic!()
        };
        let m = crate::homology::compose_word_matrices(
            d.rank(),
            &[
                crate::homology::transvection(&sel).unwrap(),
                crate::homology::transvection_inverse(&comp).unwrap(),
            ],
        )
        .unwrap();
        let conj = w.conjugate_all(&m, &mut d).unwrap();
        let s1 = summarize(&w, &d).unwrap();
        let s2 = summarize(&conj, &d).unwrap();
        assert_eq!(s1.char_poly, s2.char_poly);
        assert_eq!(s1.trace, s2.trace);
        assert_eq!(s1.chi_total, s2.chi_total);
    }

    #[test]
    fn count_of_reduced_letters_drives_chi() {
        let d = standard_dictionary(4).unwrap();
        let w = Word::new(
            Fiber::NonOrientable { genus: 4 },
            Base::Disk,
            vec![
                letter("a1", Sign::Plus, Sign::Plus),
                letter("a1", Sign::Plus, Sign::Minus),
                letter("b1", Sign::Plus, Sign::Plus),
            ],
        )
        .unwrap();
        let s = summarize(&w, &d).unwrap();
        assert_eq!(s.letters_raw, 3);
        assert_eq!(s.letters_reduced, 1);
        assert_eq!(s.chi_total, euler_characteristic(4, Base::Disk, 1));
    }
}
