//! Reduced words of a free group F_r and its endomorphisms.
//!
//! Words are stored in syllable (run-length) form: a sequence of
//! `(generator index, exponent)` pairs with 1-based generator indices,
//! nonzero exponents, and distinct adjacent indices. All operations keep
//! words reduced.

use crate::matgroup::IntMatrix;
use std::fmt;

/// Exponent-sum vector of a word, one entry per generator.
pub type AbelianVector = Vec<i64>;

/// A reduced word over the generators g1, ..., gr.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    syls: Vec<(usize, i64)>,
}

impl Word {
    /// The empty word.
    pub fn empty() -> Self {
        Word { syls: Vec::new() }
    }

    /// The single generator g_i.
    pub fn gen(i: usize) -> Self {
        Self::gen_pow(i, 1)
    }

    /// The power g_i^e (empty when e = 0).
    pub fn gen_pow(i: usize, e: i64) -> Self {
        assert!(i >= 1, "generator index must be 1-based");
        if e == 0 {
            Word::empty()
        } else {
            Word { syls: vec![(i, e)] }
        }
    }

    /// Builds a word from raw syllables, merging and cancelling as needed.
    pub fn from_syllables<I: IntoIterator<Item = (usize, i64)>>(syllables: I) -> Self {
        let mut w = Word::empty();
        for (g, e) in syllables {
            assert!(g >= 1, "generator index must be 1-based");
            w.push_syllable(g, e);
        }
        w
    }

    fn push_syllable(&mut self, g: usize, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(&mut (tg, ref mut te)) = self.syls.last_mut() {
            if tg == g {
                *te += e;
                if *te == 0 {
                    self.syls.pop();
                }
                return;
            }
        }
        self.syls.push((g, e));
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syls
    }

    pub fn is_empty(&self) -> bool {
        self.syls.is_empty()
    }

    /// Number of letters, counting multiplicity (sum of |exponent|).
    pub fn letter_len(&self) -> usize {
        self.syls.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    /// Largest generator index occurring in the word (0 for the empty word).
    pub fn max_gen(&self) -> usize {
        self.syls.iter().map(|&(g, _)| g).max().unwrap_or(0)
    }

    pub fn contains_gen(&self, i: usize) -> bool {
        self.syls.iter().any(|&(g, _)| g == i)
    }

    /// Free product u * v, reduced at the junction.
    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.syls {
            w.push_syllable(g, e);
        }
        w
    }

    /// The inverse word: syllables reversed, exponents negated.
    pub fn inverse(&self) -> Word {
        Word {
            syls: self.syls.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    /// w^k for any integer k.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::empty();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Conjugate a^-1 * self * a.
    pub fn conjugate_by(&self, a: &Word) -> Word {
        a.inverse().mul(self).mul(a)
    }

    /// Net exponent of g_i in the word.
    pub fn exponent_sum(&self, i: usize) -> i64 {
        self.syls
            .iter()
            .filter(|&&(g, _)| g == i)
            .map(|&(_, e)| e)
            .sum()
    }

    /// Exponent-sum vector with respect to g1, ..., gr.
    pub fn abelianize(&self, r: usize) -> AbelianVector {
        assert!(self.max_gen() <= r, "word uses a generator above the rank");
        let mut v = vec![0i64; r];
        for &(g, e) in &self.syls {
            v[g - 1] += e;
        }
        v
    }

    /// True iff every exponent sum vanishes (membership in the derived subgroup
    /// of the free group, where the abelianization map kills the word).
    pub fn in_derived_subgroup(&self) -> bool {
        let r = self.max_gen();
        (1..=r).all(|i| self.exponent_sum(i) == 0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syls.is_empty() {
            return write!(f, "1");
        }
        for (n, &(g, e)) in self.syls.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            if e == 1 {
                write!(f, "g{}", g)?;
            } else {
                write!(f, "g{}^{}", g, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

/// An endomorphism of F_r, given by the images of the generators.
#[derive(Clone, PartialEq, Eq)]
pub struct Endo {
    images: Vec<Word>,
}

impl Endo {
    /// Identity endomorphism of F_r.
    pub fn identity(r: usize) -> Self {
        Endo {
            images: (1..=r).map(Word::gen).collect(),
        }
    }

    pub fn new(images: Vec<Word>) -> Self {
        let r = images.len();
        assert!(r >= 1, "rank must be positive");
        for w in &images {
            assert!(w.max_gen() <= r, "image uses a generator above the rank");
        }
        Endo { images }
    }

    /// The involution g_j -> g_j^-1, all other generators fixed.
    pub fn tau(j: usize, r: usize) -> Self {
        assert!((1..=r).contains(&j));
        let mut e = Endo::identity(r);
        e.images[j - 1] = Word::gen_pow(j, -1);
        e
    }

    /// g_j -> prefix * g_j, all other generators fixed. The prefix must not
    /// contain g_j, which makes the map an automorphism with the evident
    /// inverse (see `prefixed_inverse`).
    pub fn prefixed(r: usize, j: usize, prefix: &Word) -> Self {
        assert!((1..=r).contains(&j));
        assert!(
            !prefix.contains_gen(j),
            "prefix must not contain the substituted generator"
        );
        let mut e = Endo::identity(r);
        e.images[j - 1] = prefix.mul(&Word::gen(j));
        e
    }

    /// The inverse of `prefixed(r, j, prefix)`: g_j -> prefix^-1 * g_j.
    pub fn prefixed_inverse(r: usize, j: usize, prefix: &Word) -> Self {
        Self::prefixed(r, j, &prefix.inverse())
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    /// Image of the generator g_j.
    pub fn image(&self, j: usize) -> &Word {
        &self.images[j - 1]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(n, w)| w.syllables() == [(n + 1, 1)])
    }

    /// Applies the endomorphism to a word, substituting generator images.
    pub fn apply(&self, w: &Word) -> Word {
        assert!(w.max_gen() <= self.rank(), "word rank exceeds endo rank");
        let mut acc = Word::empty();
        for &(g, e) in w.syllables() {
            acc = acc.mul(&self.images[g - 1].pow(e));
        }
        acc
    }

    /// Composition self ∘ f (f applied first).
    pub fn compose(&self, f: &Endo) -> Endo {
        assert_eq!(self.rank(), f.rank(), "rank mismatch");
        Endo {
            images: f.images.iter().map(|w| self.apply(w)).collect(),
        }
    }

    /// The matrix of exponent counts: entry (i, j) is the net exponent of g_i
    /// in the image of g_j. Sends composition to matrix product.
    pub fn b_matrix(&self) -> IntMatrix {
        let r = self.rank();
        let mut m = IntMatrix::zero(r);
        for j in 1..=r {
            let col = self.images[j - 1].abelianize(r);
            for i in 1..=r {
                m.set(i, j, col[i - 1]);
            }
        }
        m
    }
}

impl fmt::Debug for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Endo(")?;
        for (n, w) in self.images.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", w)?;
        }
        write!(f, ")")
    }
}
