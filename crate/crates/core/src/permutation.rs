//! Permutations of {1, ..., n} and words over two marked permutations σ, ω.
//!
//! Composition is right-to-left: (f ∘ g)(x) = f(g(x)), so in a word the
//! rightmost factor acts first. Points are labeled 1..n.
//!
//! The constructive heart of the module: when σ = (1, ..., m) and
//! ω = (1, m+1, ..., n) with 1 < m < n, every 3-cycle — and hence every even
//! permutation — is a product of commutator-shaped words in σ and ω with
//! vanishing exponent sums.

use crate::freegroup::Word;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("mapping is not a permutation of 1..={n}")]
    InvalidMapping { n: usize },
    #[error("point {p} is out of range 1..={n}")]
    PointOutOfRange { p: usize, n: usize },
    #[error("cycle points must be pairwise distinct")]
    RepeatedPoint,
    #[error("split position m = {m} must satisfy 1 < m < n = {n}")]
    BadSplit { m: usize, n: usize },
    #[error("only even permutations decompose into 3-cycles")]
    OddPermutation,
    #[error("substitution targets must be distinct generators")]
    EqualGenerators,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
}

/// A permutation of {1, ..., n}, stored as the image of each point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    /// Builds from the image list: `images[p - 1]` is the image of point p.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &q in &images {
            if q < 1 || q > n || seen[q - 1] {
                return Err(PermError::InvalidMapping { n });
            }
            seen[q - 1] = true;
        }
        Ok(Permutation { images })
    }

    /// One cycle (a_1, ..., a_k) on n points: a_1 -> a_2 -> ... -> a_k -> a_1.
    pub fn cycle(n: usize, points: &[usize]) -> Result<Self, PermError> {
        let mut p = Self::identity(n);
        for &x in points {
            if x < 1 || x > n {
                return Err(PermError::PointOutOfRange { p: x, n });
            }
        }
        for w in points.windows(2) {
            if p.images[w[0] - 1] != w[0] {
                return Err(PermError::RepeatedPoint);
            }
            p.images[w[0] - 1] = w[1];
        }
        if points.len() > 1 {
            let (first, last) = (points[0], points[points.len() - 1]);
            if p.images[last - 1] != last || first == last {
                return Err(PermError::RepeatedPoint);
            }
            p.images[last - 1] = first;
        }
        Ok(p)
    }

    /// Product of cycles, rightmost cycle applied first. The cycles need not
    /// be disjoint.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut acc = Self::identity(n);
        for c in cycles {
            acc = acc.compose(&Self::cycle(n, c)?);
        }
        Ok(acc)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, p: usize) -> usize {
        self.images[p - 1]
    }

    /// (self ∘ other): other acts first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n(), "size mismatch");
        Permutation {
            images: (1..=self.n()).map(|p| self.apply(other.apply(p))).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.n()];
        for p in 1..=self.n() {
            images[self.apply(p) - 1] = p;
        }
        Permutation { images }
    }

    pub fn pow(&self, k: i64) -> Permutation {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity(self.n());
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &q)| q == i + 1)
    }

    /// Non-trivial cycles, each rotated to start at its smallest point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 1..=n {
            if seen[start - 1] || self.apply(start) == start {
                continue;
            }
            let mut cyc = vec![start];
            seen[start - 1] = true;
            let mut p = self.apply(start);
            while p != start {
                seen[p - 1] = true;
                cyc.push(p);
                p = self.apply(p);
            }
            out.push(cyc);
        }
        out
    }

    pub fn parity(&self) -> Parity {
        let transpositions: usize = self.cycles().iter().map(|c| c.len() - 1).sum();
        if transpositions % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({})", self)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "id");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", p)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// The two marked permutations a word can speak about.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SWLetter {
    S,
    W,
}

/// A reduced word in the letters S and W with integer exponents.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SWWord {
    syls: Vec<(SWLetter, i64)>,
}

impl SWWord {
    pub fn empty() -> Self {
        SWWord { syls: Vec::new() }
    }

    pub fn letter(l: SWLetter, e: i64) -> Self {
        let mut w = Self::empty();
        w.push(l, e);
        w
    }

    pub fn push(&mut self, l: SWLetter, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(&mut (tl, ref mut te)) = self.syls.last_mut() {
            if tl == l {
                *te += e;
                if *te == 0 {
                    self.syls.pop();
                }
                return;
            }
        }
        self.syls.push((l, e));
    }

    pub fn syllables(&self) -> &[(SWLetter, i64)] {
        &self.syls
    }

    pub fn is_empty(&self) -> bool {
        self.syls.is_empty()
    }

    pub fn mul(&self, other: &SWWord) -> SWWord {
        let mut w = self.clone();
        for &(l, e) in &other.syls {
            w.push(l, e);
        }
        w
    }

    pub fn inverse(&self) -> SWWord {
        SWWord {
            syls: self.syls.iter().rev().map(|&(l, e)| (l, -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> SWWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::empty();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Net exponent of a letter.
    pub fn exponent_sum(&self, l: SWLetter) -> i64 {
        self.syls
            .iter()
            .filter(|&&(tl, _)| tl == l)
            .map(|&(_, e)| e)
            .sum()
    }

    /// Evaluates the word at S = sigma, W = omega (rightmost syllable first).
    pub fn evaluate(&self, sigma: &Permutation, omega: &Permutation) -> Permutation {
        assert_eq!(sigma.n(), omega.n(), "size mismatch");
        let mut acc = Permutation::identity(sigma.n());
        for &(l, e) in &self.syls {
            let p = match l {
                SWLetter::S => sigma.pow(e),
                SWLetter::W => omega.pow(e),
            };
            acc = acc.compose(&p);
        }
        acc
    }

    /// Rewrites the word over free-group generators: S -> g_i, W -> g_k.
    pub fn substitute(&self, i: usize, k: usize) -> Result<Word, PermError> {
        if i == k {
            return Err(PermError::EqualGenerators);
        }
        Ok(Word::from_syllables(self.syls.iter().map(|&(l, e)| {
            match l {
                SWLetter::S => (i, e),
                SWLetter::W => (k, e),
            }
        })))
    }
}

impl fmt::Display for SWWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syls.is_empty() {
            return write!(f, "1");
        }
        for (n, &(l, e)) in self.syls.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            let name = match l {
                SWLetter::S => "S",
                SWLetter::W => "W",
            };
            if e == 1 {
                write!(f, "{}", name)?;
            } else {
                write!(f, "{}^{}", name, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SWWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SWWord({})", self)
    }
}

fn validate_split(m: usize, n: usize) -> Result<(), PermError> {
    if m <= 1 || m >= n {
        return Err(PermError::BadSplit { m, n });
    }
    Ok(())
}

/// A word in σ = (1, ..., m), ω = (1, m+1, ..., n) evaluating to the 3-cycle
/// (k, i, j), with zero net exponent in both letters.
///
/// Cycles through the point 1 split into four cases: the mixed case is the
/// plain commutator σ^(i-1) ω^(j-m) σ^-(i-1) ω^-(j-m), and the three others
/// reduce to it by inversion or by a product of two mixed 3-cycles. A cycle
/// avoiding 1 is conjugated into reach by powers of ω ∘ σ = (1, 2, ..., n).
pub fn three_cycle_word(
    k: usize,
    i: usize,
    j: usize,
    m: usize,
    n: usize,
) -> Result<SWWord, PermError> {
    validate_split(m, n)?;
    for &p in &[k, i, j] {
        if p < 1 || p > n {
            return Err(PermError::PointOutOfRange { p, n });
        }
    }
    if k == i || i == j || k == j {
        return Err(PermError::RepeatedPoint);
    }
    // rotate the cycle so that a 1, if present, comes first
    let (k, i, j) = if i == 1 {
        (1, j, k)
    } else if j == 1 {
        (1, k, i)
    } else {
        (k, i, j)
    };
    if k == 1 {
        return Ok(cycle_through_one(i, j, m, n));
    }
    // conjugate by (ω ∘ σ)^(k-1) = (1, 2, ..., n)^(k-1), which shifts labels
    let shift = (k - 1) as i64;
    let wrap = |p: usize| -> usize { (p as i64 - shift - 1).rem_euclid(n as i64) as usize + 1 };
    let inner = cycle_through_one(wrap(i), wrap(j), m, n);
    let conj = SWWord::letter(SWLetter::W, 1).mul(&SWWord::letter(SWLetter::S, 1));
    Ok(conj.pow(shift).mul(&inner).mul(&conj.pow(-shift)))
}

/// Word for the 3-cycle (1, i, j); callers guarantee 1 < i, j <= n, i != j.
fn cycle_through_one(i: usize, j: usize, m: usize, n: usize) -> SWWord {
    use SWLetter::{S, W};
    if i <= m && j > m {
        // mixed case: the commutator of σ^(i-1) and ω^(j-m)
        let a = (i - 1) as i64;
        let b = (j - m) as i64;
        let mut w = SWWord::empty();
        w.push(S, a);
        w.push(W, b);
        w.push(S, -a);
        w.push(W, -b);
        w
    } else if i > m && j <= m {
        cycle_through_one(j, i, m, n).inverse()
    } else if i <= m && j <= m {
        // (1, i, j) = (1, j, m+1)^-1 ∘ (1, i, m+1)
        cycle_through_one(j, m + 1, m, n)
            .inverse()
            .mul(&cycle_through_one(i, m + 1, m, n))
    } else {
        // both beyond m: (1, i, j) = (1, 2, j) ∘ (1, 2, i)^-1
        cycle_through_one(2, j, m, n).mul(&cycle_through_one(2, i, m, n).inverse())
    }
}

/// Decomposes an even permutation into 3-cycle words over σ, ω.
///
/// Point-fixing sweep: take the smallest unfixed point p with image q and
/// peel off the 3-cycle (p, q, x). Following the remainder's own cycle with
/// x = rem(q) fixes p and q at once; when the cycle closes early (rem(q) = p)
/// an auxiliary moved point serves as x — evenness guarantees one exists,
/// since a lone transposition is odd. The smallest unfixed point strictly
/// increases, so the sweep terminates.
pub fn decompose_even(target: &Permutation, m: usize) -> Result<SWWord, PermError> {
    let n = target.n();
    validate_split(m, n)?;
    if target.parity() != Parity::Even {
        return Err(PermError::OddPermutation);
    }
    let mut rem = target.clone();
    let mut word = SWWord::empty();
    while let Some(p) = (1..=n).find(|&p| rem.apply(p) != p) {
        let q = rem.apply(p);
        let x = if rem.apply(q) != p {
            rem.apply(q)
        } else {
            (p + 1..=n)
                .find(|&x| x != q && rem.apply(x) != x)
                .expect("an even permutation cannot move exactly two points")
        };
        let c = Permutation::cycle(n, &[p, q, x]).expect("valid 3-cycle");
        word = word.mul(&three_cycle_word(p, q, x, m, n).expect("valid 3-cycle word"));
        rem = c.inverse().compose(&rem);
    }
    Ok(word)
}
