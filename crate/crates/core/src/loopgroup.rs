//! Loop subgroups of a free group and their coset geometry.
//!
//! A loop configuration s_1 / ... / s_r attaches to each generator g_i a loop
//! of length s_i through the base coset. The cosets are labeled 1..n with
//! n = 1 + Σ (s_i - 1): label 1 is the subgroup itself, and the nontrivial
//! cosets of loop i occupy the next block of s_i - 1 labels in order, so
//! g_i^t maps to label 1 + offset_i + t where offset_i = Σ_{l<i} (s_l - 1).
//!
//! Everything downstream — membership, the word basis, matrix images —
//! reads off the permutation action π on these labels.

use crate::freegroup::Word;
use crate::permutation::Permutation;
use serde::Serialize;
use std::fmt;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LoopError {
    #[error("a loop configuration needs at least 2 loops (got {r})")]
    RankTooSmall { r: usize },
    #[error("loop lengths must be at least 1 (loop {index} is {s})")]
    LoopTooShort { index: usize, s: usize },
    #[error("generator index {index} is out of range 1..={r}")]
    GeneratorOutOfRange { index: usize, r: usize },
    #[error("restriction needs two distinct non-trivial loops (loop {index} has length 1)")]
    LoopletRestriction { index: usize },
    #[error("restriction needs two distinct loops (got {index} twice)")]
    RepeatedLoop { index: usize },
}

/// The mod-2 profile of a loop configuration: bit i is 1 exactly when s_i is
/// even. It is the row vector the matrix image stabilizes.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ParityVector {
    bits: Vec<u8>,
}

impl ParityVector {
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(
            bits.iter().all(|&b| b <= 1),
            "parity bits must be 0 or 1"
        );
        ParityVector { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit for generator i (1-based).
    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
}

impl fmt::Debug for ParityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParityVector(")?;
        for &b in &self.bits {
            write!(f, "{}", b)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for ParityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (n, &b) in self.bits.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", b)?;
        }
        write!(f, ")")
    }
}

/// Two designated loops of a configuration viewed on their shared cosets.
///
/// Locally the first loop acts as σ = (1, ..., m) and the second as
/// ω = (1, m+1, ..., n); `to_global` maps local labels back to coset labels.
pub struct RestrictedLoops {
    pub m: usize,
    pub n: usize,
    pub sigma: Permutation,
    pub omega: Permutation,
    pub to_global: Vec<usize>,
}

/// A loop subgroup, presented by its loop lengths.
#[derive(Clone, PartialEq, Eq)]
pub struct LoopSubgroup {
    s: Vec<usize>,
    offsets: Vec<usize>,
    coset_count: usize,
}

impl LoopSubgroup {
    pub fn new(s: Vec<usize>) -> Result<Self, LoopError> {
        let r = s.len();
        if r < 2 {
            return Err(LoopError::RankTooSmall { r });
        }
        for (idx, &si) in s.iter().enumerate() {
            if si == 0 {
                return Err(LoopError::LoopTooShort {
                    index: idx + 1,
                    s: si,
                });
            }
        }
        let mut offsets = Vec::with_capacity(r);
        let mut acc = 0;
        for &si in &s {
            offsets.push(acc);
            acc += si - 1;
        }
        Ok(LoopSubgroup {
            s,
            offsets,
            coset_count: 1 + acc,
        })
    }

    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn loops(&self) -> &[usize] {
        &self.s
    }

    pub fn loop_len(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.rank(), "generator index out of range");
        self.s[i - 1]
    }

    /// Number of loops of length 1.
    pub fn looplet_count(&self) -> usize {
        self.s.iter().filter(|&&si| si == 1).count()
    }

    /// Index of the subgroup: the number of cosets, 1 + Σ (s_i - 1).
    pub fn coset_count(&self) -> usize {
        self.coset_count
    }

    fn check_gen(&self, i: usize) -> Result<(), LoopError> {
        if i < 1 || i > self.rank() {
            return Err(LoopError::GeneratorOutOfRange {
                index: i,
                r: self.rank(),
            });
        }
        Ok(())
    }

    /// Label of the coset g_i^t U for 0 <= t < s_i.
    pub fn coset_label(&self, i: usize, t: usize) -> usize {
        assert!(i >= 1 && i <= self.rank(), "generator index out of range");
        assert!(t < self.s[i - 1], "power beyond loop length");
        if t == 0 {
            1
        } else {
            1 + self.offsets[i - 1] + t
        }
    }

    /// Human-readable name of a coset label.
    pub fn coset_name(&self, label: usize) -> String {
        assert!(label >= 1 && label <= self.coset_count, "label out of range");
        if label == 1 {
            return "U".to_string();
        }
        for i in 1..=self.rank() {
            let (off, si) = (self.offsets[i - 1], self.s[i - 1]);
            if label > 1 + off && label <= off + si {
                let t = label - 1 - off;
                return if t == 1 {
                    format!("g{} U", i)
                } else {
                    format!("g{}^{} U", i, t)
                };
            }
        }
        unreachable!("every label belongs to some loop block")
    }

    /// The action of g_i on the cosets: one cycle around loop i.
    pub fn pi_generator(&self, i: usize) -> Result<Permutation, LoopError> {
        self.check_gen(i)?;
        let si = self.s[i - 1];
        if si == 1 {
            return Ok(Permutation::identity(self.coset_count));
        }
        let points: Vec<usize> = (0..si).map(|t| self.coset_label(i, t)).collect();
        Ok(Permutation::cycle(self.coset_count, &points).expect("loop blocks are disjoint"))
    }

    /// The action of a word on the cosets (rightmost letter first).
    pub fn pi_word(&self, w: &Word) -> Result<Permutation, LoopError> {
        let mut acc = Permutation::identity(self.coset_count);
        for &(i, e) in w.syllables() {
            acc = acc.compose(&self.pi_generator(i)?.pow(e));
        }
        Ok(acc)
    }

    /// Membership: w lies in the subgroup iff its action fixes the base coset.
    pub fn contains(&self, w: &Word) -> Result<bool, LoopError> {
        Ok(self.pi_word(w)?.apply(1) == 1)
    }

    /// Membership in the normal core: the action is trivial on every coset.
    pub fn in_normal_core(&self, w: &Word) -> Result<bool, LoopError> {
        Ok(self.pi_word(w)?.is_identity())
    }

    /// The parity profile: bit i set exactly when s_i is even.
    pub fn parity_vector(&self) -> ParityVector {
        ParityVector::new(self.s.iter().map(|&si| (si % 2 == 0) as u8).collect())
    }

    /// A free basis of the subgroup: the loop words g_i^(s_i), then the
    /// conjugates g_i^-k g_j g_i^k over i, then j, then k. Its cardinality is
    /// 1 + n(r - 1) for n cosets and r loops.
    pub fn basis(&self) -> Vec<Word> {
        let r = self.rank();
        let mut out = Vec::new();
        for i in 1..=r {
            out.push(Word::gen_pow(i, self.s[i - 1] as i64));
        }
        for i in 1..=r {
            for j in 1..=r {
                if j == i {
                    continue;
                }
                for k in 1..self.s[i - 1] {
                    let conj = Word::gen(j).conjugate_by(&Word::gen_pow(i, k as i64));
                    out.push(conj);
                }
            }
        }
        out
    }

    /// Views loops i and k on the cosets they move (plus the base coset):
    /// locally loop i becomes σ = (1, ..., m) and loop k becomes
    /// ω = (1, m+1, ..., n) with m = s_i and n = s_i + s_k - 1.
    pub fn restrict_to_loops(&self, i: usize, k: usize) -> Result<RestrictedLoops, LoopError> {
        self.check_gen(i)?;
        self.check_gen(k)?;
        if i == k {
            return Err(LoopError::RepeatedLoop { index: i });
        }
        for &idx in &[i, k] {
            if self.s[idx - 1] == 1 {
                return Err(LoopError::LoopletRestriction { index: idx });
            }
        }
        let m = self.s[i - 1];
        let n = m + self.s[k - 1] - 1;
        let mut to_global = Vec::with_capacity(n);
        for t in 0..self.s[i - 1] {
            to_global.push(self.coset_label(i, t));
        }
        for t in 1..self.s[k - 1] {
            to_global.push(self.coset_label(k, t));
        }
        let sigma = Permutation::cycle(n, &(1..=m).collect::<Vec<_>>()).expect("valid cycle");
        let mut omega_points = vec![1];
        omega_points.extend(m + 1..=n);
        let omega = Permutation::cycle(n, &omega_points).expect("valid cycle");
        Ok(RestrictedLoops {
            m,
            n,
            sigma,
            omega,
            to_global,
        })
    }

    /// The coset graph in DOT format: one node per coset, one edge per
    /// (coset, generator) pair. The output is deterministic byte-for-byte.
    pub fn coset_graph_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph cosets {\n");
        out.push_str("  rankdir=LR;\n");
        for c in 1..=self.coset_count {
            let _ = writeln!(out, "  n{} [label=\"{}\"];", c, self.coset_name(c));
        }
        for c in 1..=self.coset_count {
            for i in 1..=self.rank() {
                let image = self
                    .pi_generator(i)
                    .expect("generator index in range")
                    .apply(c);
                let _ = writeln!(out, "  n{} -> n{} [label=\"g{}\"];", c, image, i);
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Debug for LoopSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LoopSubgroup(")?;
        for (n, &si) in self.s.iter().enumerate() {
            if n > 0 {
                write!(f, "/")?;
            }
            write!(f, "{}", si)?;
        }
        write!(f, ")")
    }
}
