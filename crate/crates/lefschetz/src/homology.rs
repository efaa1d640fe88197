//! Exact integer symplectic linear algebra on the first homology of a closed
//! orientable surface.
//!
//! The lattice `H_1(Σ_k; Z) = Z^{2k}` carries the ordered basis
//! `a_1, b_1, …, a_k, b_k` and the standard antisymmetric pairing with
//! `<a_i, b_i> = +1`. A right-handed Dehn twist about a simple closed curve
//! with class `γ` acts as the transvection `x ↦ x + <x, γ> γ`; the sign
//! convention is fixed here once and used by every other module. Words of
//! mapping classes multiply left-to-right, so the matrix of a word is the
//! product of its letter matrices in reverse order.
//!
//! All arithmetic is checked: overflow aborts instead of wrapping.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Sum two scalars, aborting on overflow.
#[inline]
fn add(a: i64, b: i64) -> i64 {
    a.checked_add(b)
        .expect("integer overflow in homology arithmetic")
}

/// Multiply two scalars, aborting on overflow.
#[inline]
fn mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b)
        .expect("integer overflow in homology arithmetic")
}

#[inline]
fn narrow(v: i128) -> i64 {
    i64::try_from(v).expect("integer overflow in homology arithmetic")
}

/// The first-homology lattice of the genus-`k` cover surface, rank `2k`,
/// with basis ordered `a_1, b_1, …, a_k, b_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    k: usize,
}

impl Lattice {
    pub fn new(k: usize) -> Self {
        Lattice { k }
    }

    /// Cover genus `k`.
    pub fn genus(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        2 * self.k
    }

    /// Basis class `a_i`, `i` one-based.
    pub fn basis_a(&self, i: usize) -> HClass {
        assert!(1 <= i && i <= self.k, "basis index out of range");
        let mut c = vec![0; self.rank()];
        c[2 * (i - 1)] = 1;
        HClass::new(c)
    }

    /// Basis class `b_i`, `i` one-based.
    pub fn basis_b(&self, i: usize) -> HClass {
        assert!(1 <= i && i <= self.k, "basis index out of range");
        let mut c = vec![0; self.rank()];
        c[2 * (i - 1) + 1] = 1;
        HClass::new(c)
    }

    /// Label of the basis vector at a raw coordinate index.
    pub fn basis_label(&self, idx: usize) -> String {
        let i = idx / 2 + 1;
        if idx.is_multiple_of(2) {
            format!("a{i}")
        } else {
            format!("b{i}")
        }
    }

    /// The pairing matrix `Q`, block diagonal in `[[0, 1], [-1, 0]]` blocks.
    pub fn pairing_matrix(&self) -> MCMatrix {
        let n = self.rank();
        let mut q = MCMatrix::zero(n);
        for i in 0..self.k {
            q.set(2 * i, 2 * i + 1, 1);
            q.set(2 * i + 1, 2 * i, -1);
        }
        q
    }
}

/// An integer first-homology class on the cover surface.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HClass {
    coeffs: Vec<i64>,
}

impl HClass {
    pub fn new(coeffs: Vec<i64>) -> Self {
        HClass { coeffs }
    }

    pub fn zero(rank: usize) -> Self {
        HClass {
            coeffs: vec![0; rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// A class is primitive when the gcd of its coefficients is 1.
    pub fn is_primitive(&self) -> bool {
        let mut g: i64 = 0;
        for &c in &self.coeffs {
            g = g.gcd(&c);
        }
        g == 1
    }

    pub fn neg(&self) -> HClass {
        HClass {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }

    /// Sign-canonical representative of `{γ, -γ}`: first nonzero coefficient
    /// positive.
    pub fn canonical(&self) -> HClass {
        match self.coeffs.iter().find(|&&c| c != 0) {
            Some(&c) if c < 0 => self.neg(),
            _ => self.clone(),
        }
    }

    /// True when `other` is `γ` or `-γ`.
    pub fn same_unoriented(&self, other: &HClass) -> bool {
        self == other || *self == other.neg()
    }
}

impl std::fmt::Display for HClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The algebraic intersection pairing `x^T Q y`.
///
/// Antisymmetric and unimodular on each lattice.
pub fn pairing(x: &HClass, y: &HClass) -> Result<i64> {
    if x.rank() != y.rank() || !x.rank().is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "pairing of classes of rank {} and {}",
            x.rank(),
            y.rank()
        )));
    }
    let mut acc: i128 = 0;
    for i in 0..x.rank() / 2 {
        let xa = x.coeffs[2 * i] as i128;
        let xb = x.coeffs[2 * i + 1] as i128;
        let ya = y.coeffs[2 * i] as i128;
        let yb = y.coeffs[2 * i + 1] as i128;
        acc = acc
            .checked_add(xa * yb - xb * ya)
            .expect("integer overflow in homology arithmetic");
    }
    Ok(narrow(acc))
}

/// A square integer matrix acting on the lattice; the homology shadow of a
/// mapping class of the cover surface.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MCMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl MCMatrix {
    pub fn zero(n: usize) -> Self {
        MCMatrix {
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MCMatrix::zero(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "matrix row of length {} in a {}-row matrix",
                    row.len(),
                    n
                )));
            }
            entries.extend_from_slice(row);
        }
        Ok(MCMatrix { n, entries })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.entries[r * self.n + c] = v;
    }

    pub fn is_identity(&self) -> bool {
        *self == MCMatrix::identity(self.n)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &MCMatrix) -> Result<MCMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{} matrices",
                self.n, self.n, other.n, other.n
            )));
        }
        let n = self.n;
        let mut out = MCMatrix::zero(n);
        for r in 0..n {
            for c in 0..n {
                let mut acc: i128 = 0;
                for j in 0..n {
                    let term = (self.get(r, j) as i128)
                        .checked_mul(other.get(j, c) as i128)
                        .expect("integer overflow in homology arithmetic");
                    acc = acc
                        .checked_add(term)
                        .expect("integer overflow in homology arithmetic");
                }
                out.set(r, c, narrow(acc));
            }
        }
        Ok(out)
    }

    /// Apply to a class: `M x`.
    #[allow(clippy::needless_range_loop)]
    pub fn apply(&self, x: &HClass) -> Result<HClass> {
        if x.rank() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "applying {}x{} matrix to rank-{} class",
                self.n,
                self.n,
                x.rank()
            )));
        }
        let mut out = vec![0i64; self.n];
        for r in 0..self.n {
            let mut acc: i128 = 0;
            for c in 0..self.n {
                acc = acc
                    .checked_add((self.get(r, c) as i128) * (x.coeffs[c] as i128))
                    .expect("integer overflow in homology arithmetic");
            }
            out[r] = narrow(acc);
        }
        Ok(HClass::new(out))
    }

    pub fn transpose(&self) -> MCMatrix {
        let mut out = MCMatrix::zero(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn trace(&self) -> i64 {
        let mut t: i64 = 0;
        for i in 0..self.n {
            t = add(t, self.get(i, i));
        }
        t
    }

    /// `M^T Q M == Q`: the matrix preserves the pairing.
    pub fn is_symplectic(&self) -> bool {
        self.pairing_conjugate().map(|p| p == 1).unwrap_or(false)
    }

    /// `M^T Q M == -Q`: the matrix reverses the pairing, as the deck
    /// involution of the orientation double cover does.
    pub fn is_anti_symplectic(&self) -> bool {
        self.pairing_conjugate().map(|p| p == -1).unwrap_or(false)
    }

    /// Returns `1` if `M^T Q M == Q`, `-1` if `== -Q`, `0` otherwise.
    fn pairing_conjugate(&self) -> Result<i64> {
        if !self.n.is_multiple_of(2) {
            return Ok(0);
        }
        let q = Lattice::new(self.n / 2).pairing_matrix();
        let m = self.transpose().mul(&q)?.mul(self)?;
        if m == q {
            Ok(1)
        } else if m == q.scale(-1) {
            Ok(-1)
        } else {
            Ok(0)
        }
    }

    fn scale(&self, s: i64) -> MCMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = mul(*e, s);
        }
        out
    }

    pub fn commutes_with(&self, other: &MCMatrix) -> Result<bool> {
        Ok(self.mul(other)? == other.mul(self)?)
    }

    /// Exact inverse over the integers. Fails unless the matrix is
    /// unimodular.
    #[allow(clippy::needless_range_loop)]
    pub fn inverse(&self) -> Result<MCMatrix> {
        let n = self.n;
        // Gauss-Jordan over exact rationals on the augmented system [M | I].
        let mut aug: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                (0..2 * n)
                    .map(|c| {
                        if c < n {
                            BigRational::from_integer(BigInt::from(self.get(r, c)))
                        } else if c - n == r {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !aug[r][col].is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => return Err(Error::NotUnimodular),
            };
            aug.swap(col, pivot);
            let inv = aug[col][col].recip();
            for c in 0..2 * n {
                aug[col][c] = &aug[col][c] * &inv;
            }
            for r in 0..n {
                if r != col && !aug[r][col].is_zero() {
                    let factor = aug[r][col].clone();
                    for c in 0..2 * n {
                        let sub = &factor * &aug[col][c];
                        aug[r][c] = &aug[r][c] - &sub;
                    }
                }
            }
        }
        let mut out = MCMatrix::zero(n);
        for r in 0..n {
            for c in 0..n {
                let v = &aug[r][n + c];
                if !v.is_integer() {
                    return Err(Error::NotUnimodular);
                }
                let big = v.to_integer();
                let small = i64::try_from(&big).map_err(|_| Error::NotUnimodular)?;
                out.set(r, c, small);
            }
        }
        Ok(out)
    }

    /// Coefficients of `det(xI - M)`, leading coefficient first.
    ///
    /// Faddeev-LeVerrier over arbitrary-precision integers; every interior
    /// division is exact.
    pub fn char_poly(&self) -> Vec<BigInt> {
        let n = self.n;
        let mut coeffs = vec![BigInt::one()];
        if n == 0 {
            return coeffs;
        }
        let a: Vec<BigInt> = self.entries.iter().map(|&e| BigInt::from(e)).collect();
        let big_mul = |x: &[BigInt], y: &[BigInt]| -> Vec<BigInt> {
            let mut out = vec![BigInt::zero(); n * n];
            for r in 0..n {
                for c in 0..n {
                    let mut acc = BigInt::zero();
                    for j in 0..n {
                        acc += &x[r * n + j] * &y[j * n + c];
                    }
                    out[r * n + c] = acc;
                }
            }
            out
        };
        let big_trace = |x: &[BigInt]| -> BigInt {
            let mut t = BigInt::zero();
            for i in 0..n {
                t += &x[i * n + i];
            }
            t
        };
        let mut m = a.clone();
        for k in 1..=n {
            if k > 1 {
                let mut shifted = m.clone();
                for i in 0..n {
                    shifted[i * n + i] += &coeffs[k - 1];
                }
                m = big_mul(&a, &shifted);
            }
            let t = big_trace(&m);
            let (q, r) = (-t).div_rem(&BigInt::from(k as i64));
            debug_assert!(
                r.is_zero(),
                "characteristic polynomial division must be exact"
            );
            coeffs.push(q);
        }
        coeffs
    }
}

impl std::fmt::Display for MCMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|r| {
                (0..self.n)
                    .map(|c| self.get(r, c).to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "{}", rows.join("; "))
    }
}

/// Homology action of the right-handed Dehn twist about `γ`:
/// the transvection `x ↦ x + <x, γ> γ`.
///
/// Unoriented: `transvection(γ) == transvection(-γ)`.
pub fn transvection(gamma: &HClass) -> Result<MCMatrix> {
    if gamma.is_zero() {
        return Err(Error::ZeroClass);
    }
    transvection_signed(gamma, 1)
}

/// Homology action of the left-handed twist about `γ`: `x ↦ x - <x, γ> γ`,
/// the inverse of [`transvection`].
pub fn transvection_inverse(gamma: &HClass) -> Result<MCMatrix> {
    if gamma.is_zero() {
        return Err(Error::ZeroClass);
    }
    transvection_signed(gamma, -1)
}

fn transvection_signed(gamma: &HClass, sign: i64) -> Result<MCMatrix> {
    let n = gamma.rank();
    if !n.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "odd-rank class of rank {n}"
        )));
    }
    let lat = Lattice::new(n / 2);
    let qg = lat.pairing_matrix().apply(gamma)?;
    // x + sign * <x, γ> γ, where <x, γ> = x^T (Q γ) = (Q γ)^T x.
    let mut m = MCMatrix::identity(n);
    for r in 0..n {
        for c in 0..n {
            let term = mul(mul(sign, gamma.coeffs[r]), qg.coeffs()[c]);
            m.set(r, c, add(m.get(r, c), term));
        }
    }
    Ok(m)
}

/// Matrix of a word of letters given left-to-right: mapping classes compose
/// in application order, so the product is taken in reverse,
/// `M(l_n) ⋯ M(l_1)`. The empty word is the identity.
pub fn compose_word_matrices(rank: usize, ms: &[MCMatrix]) -> Result<MCMatrix> {
    let mut acc = MCMatrix::identity(rank);
    for m in ms {
        if m.rank() != rank {
            return Err(Error::DimensionMismatch(format!(
                "rank-{} matrix in a rank-{} composition",
                m.rank(),
                rank
            )));
        }
        acc = m.mul(&acc)?;
    }
    Ok(acc)
}

/// Homology action of the deck transformation of the orientation double
/// cover: `a_i ↦ a_{k+1-i}`, `b_i ↦ -b_{k+1-i}`.
///
/// Squares to the identity, reverses the pairing, and has trace zero — the
/// shadow of a free orientation-reversing involution.
pub fn deck_involution(k: usize) -> MCMatrix {
    let n = 2 * k;
    let mut j = MCMatrix::zero(n);
    for i in 1..=k {
        let src_a = 2 * (i - 1);
        let dst_a = 2 * (k - i);
        j.set(dst_a, src_a, 1);
        j.set(dst_a + 1, src_a + 1, -1);
    }
    j
}

/// `N · M · N⁻¹` for unimodular `N`.
///
/// For symplectic `N` and a transvection `M` about `γ`, the result is the
/// transvection about `N γ`; for the anti-symplectic deck involution it is
/// the inverse of the transvection about `J γ`.
pub fn conjugate(m: &MCMatrix, n: &MCMatrix) -> Result<MCMatrix> {
    if m.rank() != n.rank() {
        return Err(Error::DimensionMismatch(format!(
            "conjugating rank-{} matrix by rank-{} matrix",
            m.rank(),
            n.rank()
        )));
    }
    let n_inv = n.inverse()?;
    n.mul(m)?.mul(&n_inv)
}
