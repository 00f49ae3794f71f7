//! Integer and modular matrix groups: elementary matrices, congruence
//! subgroups, parity-vector stabilizers over F_2, and constructive
//! decompositions into named generators.
//!
//! Conventions: indices are 1-based, the commutator is [A, B] = A B A^-1 B^-1,
//! and X_ij = I + E_ij adds row j to row i when multiplied from the left.

use crate::loopgroup::ParityVector;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatError {
    #[error("matrix is not unimodular (determinant {det})")]
    NonUnimodular { det: i64 },
    #[error("matrix is singular modulo {modulus}")]
    Singular { modulus: u64 },
    #[error("determinant {det} is not +-1 modulo {modulus}")]
    DetNotUnit { det: u64, modulus: u64 },
    #[error("generators disagree in dimension or modulus")]
    MixedGenerators,
    #[error("closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("matrix does not stabilize the parity vector")]
    NotInStabilizer,
    #[error("brute-force enumeration is impractical at dimension {r}")]
    EnumerationTooLarge { r: usize },
}

/// Square integer matrix, row-major, 1-based accessors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    n: usize,
    e: Vec<i64>,
}

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1);
        IntMatrix { n, e: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 1..=n {
            m.set(i, i, 1);
        }
        m
    }

    /// Elementary matrix X_ij = I + E_ij, i != j.
    pub fn elementary(i: usize, j: usize, n: usize) -> Self {
        Self::elementary_pow(i, j, n, 1)
    }

    /// X_ij^c = I + c E_ij, i != j.
    pub fn elementary_pow(i: usize, j: usize, n: usize, c: i64) -> Self {
        assert!(i != j, "elementary matrix needs distinct indices");
        assert!((1..=n).contains(&i) && (1..=n).contains(&j));
        let mut m = Self::identity(n);
        m.set(i, j, c);
        m
    }

    /// T_i = Diag(1, ..., -1, ..., 1) with the -1 in position i.
    pub fn diag_t(i: usize, n: usize) -> Self {
        assert!((1..=n).contains(&i));
        let mut m = Self::identity(n);
        m.set(i, i, -1);
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let n = rows.len();
        assert!(n >= 1 && rows.iter().all(|r| r.len() == n));
        IntMatrix {
            n,
            e: rows.into_iter().flatten().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.e[(i - 1) * self.n + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.e[(i - 1) * self.n + (j - 1)] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.e.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut m = Self::zero(n);
        for i in 1..=n {
            for j in 1..=n {
                let mut s: i64 = 0;
                for k in 1..=n {
                    s += self.get(i, k) * other.get(k, j);
                }
                m.set(i, j, s);
            }
        }
        m
    }

    /// Exact determinant (fraction-free elimination).
    pub fn det(&self) -> i64 {
        let d = bareiss_det(&self.e.iter().map(|&x| x as i128).collect::<Vec<_>>(), self.n);
        i64::try_from(d).expect("determinant overflow")
    }

    /// Exact inverse; defined only for unimodular matrices.
    pub fn invert(&self) -> Result<IntMatrix, MatError> {
        let d = self.det();
        if d != 1 && d != -1 {
            return Err(MatError::NonUnimodular { det: d });
        }
        let n = self.n;
        let mut inv = Self::zero(n);
        for i in 1..=n {
            for j in 1..=n {
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                // adjugate: entry (j, i) is the (i, j) cofactor
                inv.set(j, i, d * sign * self.minor_det(i, j));
            }
        }
        Ok(inv)
    }

    fn minor_det(&self, drop_row: usize, drop_col: usize) -> i64 {
        let n = self.n;
        if n == 1 {
            return 1;
        }
        let mut sub = Vec::with_capacity((n - 1) * (n - 1));
        for i in 1..=n {
            if i == drop_row {
                continue;
            }
            for j in 1..=n {
                if j == drop_col {
                    continue;
                }
                sub.push(self.get(i, j) as i128);
            }
        }
        i64::try_from(bareiss_det(&sub, n - 1)).expect("minor determinant overflow")
    }

    /// M^k for any integer k (k < 0 requires unimodularity).
    pub fn pow(&self, k: i64) -> IntMatrix {
        let base = if k < 0 {
            self.invert().expect("negative power of a non-unimodular matrix")
        } else {
            self.clone()
        };
        let mut acc = Self::identity(self.n);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Entrywise reduction into Z/modulus.
    pub fn reduce_mod(&self, modulus: u64) -> ModMatrix {
        assert!(modulus >= 2, "modulus must be at least 2");
        ModMatrix {
            n: self.n,
            modulus,
            e: self
                .e
                .iter()
                .map(|&x| x.rem_euclid(modulus as i64) as u64)
                .collect(),
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.rows())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows = self.rows();
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for r in rows {
            seq.serialize_element(&r)?;
        }
        seq.end()
    }
}

fn bareiss_det(entries: &[i128], n: usize) -> i128 {
    let mut a = entries.to_vec();
    let at = |a: &Vec<i128>, i: usize, j: usize| a[i * n + j];
    let mut sign: i128 = 1;
    let mut prev: i128 = 1;
    for k in 0..n {
        if at(&a, k, k) == 0 {
            match (k + 1..n).find(|&p| at(&a, p, k) != 0) {
                Some(p) => {
                    for j in 0..n {
                        a.swap(k * n + j, p * n + j);
                    }
                    sign = -sign;
                }
                None => return 0,
            }
        }
        if k == n - 1 {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i * n + j] = (at(&a, i, j) * at(&a, k, k) - at(&a, i, k) * at(&a, k, j)) / prev;
            }
            a[i * n + k] = 0;
        }
        prev = at(&a, k, k);
    }
    sign * at(&a, n - 1, n - 1)
}

/// Square matrix over Z/modulus, row-major, 1-based accessors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMatrix {
    modulus: u64,
    n: usize,
    e: Vec<u64>,
}

impl ModMatrix {
    pub fn identity(n: usize, modulus: u64) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        IntMatrix::identity(n).reduce_mod(modulus)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.e[(i - 1) * self.n + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.e[(i - 1) * self.n + (j - 1)] = v % self.modulus;
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.e.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.modulus)
    }

    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        let n = self.n;
        let m = self.modulus;
        let mut out = Self::identity(n, m);
        for i in 1..=n {
            for j in 1..=n {
                let mut s: u64 = 0;
                for k in 1..=n {
                    s = (s + self.get(i, k) * other.get(k, j)) % m;
                }
                out.set(i, j, s);
            }
        }
        out
    }

    /// Determinant in Z/modulus (computed exactly over Z, then reduced).
    pub fn det(&self) -> u64 {
        let d = bareiss_det(&self.e.iter().map(|&x| x as i128).collect::<Vec<_>>(), self.n);
        d.rem_euclid(self.modulus as i128) as u64
    }

    pub fn is_invertible(&self) -> bool {
        gcd(self.det(), self.modulus) == 1
    }

    /// Inverse via adjugate times det^-1; fails when det is not a unit.
    pub fn invert(&self) -> Result<ModMatrix, MatError> {
        let d = self.det();
        let dinv = mod_inverse(d, self.modulus).ok_or(MatError::Singular {
            modulus: self.modulus,
        })?;
        let n = self.n;
        let m = self.modulus as i128;
        let mut inv = Self::identity(n, self.modulus);
        for i in 1..=n {
            for j in 1..=n {
                let sign: i128 = if (i + j) % 2 == 0 { 1 } else { -1 };
                let minor = self.minor_det_int(i, j);
                let val = (sign * minor).rem_euclid(m) as u64;
                inv.set(j, i, val * dinv % self.modulus);
            }
        }
        Ok(inv)
    }

    fn minor_det_int(&self, drop_row: usize, drop_col: usize) -> i128 {
        let n = self.n;
        if n == 1 {
            return 1;
        }
        let mut sub = Vec::with_capacity((n - 1) * (n - 1));
        for i in 1..=n {
            if i == drop_row {
                continue;
            }
            for j in 1..=n {
                if j == drop_col {
                    continue;
                }
                sub.push(self.get(i, j) as i128);
            }
        }
        bareiss_det(&sub, n - 1)
    }

    pub fn pow(&self, k: i64) -> Result<ModMatrix, MatError> {
        let base = if k < 0 { self.invert()? } else { self.clone() };
        let mut acc = Self::identity(self.n, self.modulus);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModMatrix(mod {}){:?}", self.modulus, self.rows())
    }
}

impl Serialize for ModMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows = self.rows();
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for r in rows {
            seq.serialize_element(&r)?;
        }
        seq.end()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// A named generator in one of the generating families used here.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum GenTag {
    /// X_ij = I + E_ij.
    Elementary { i: usize, j: usize },
    /// X_ik X_jk = I + E_ik + E_jk (i < j canonically).
    Double { i: usize, j: usize, k: usize },
    /// T_i = Diag(1, ..., -1, ..., 1).
    DiagNeg { i: usize },
}

impl GenTag {
    pub fn matrix_int(&self, n: usize) -> IntMatrix {
        self.power_int(n, 1)
    }

    /// Closed-form power: the off-diagonal parts square to zero, and T_i is
    /// an involution, so no repeated multiplication is needed.
    pub fn power_int(&self, n: usize, e: i64) -> IntMatrix {
        match *self {
            GenTag::Elementary { i, j } => IntMatrix::elementary_pow(i, j, n, e),
            GenTag::Double { i, j, k } => {
                assert!(i != j && j != k && i != k);
                let mut m = IntMatrix::identity(n);
                m.set(i, k, e);
                m.set(j, k, e);
                m
            }
            GenTag::DiagNeg { i } => {
                if e.rem_euclid(2) == 0 {
                    IntMatrix::identity(n)
                } else {
                    IntMatrix::diag_t(i, n)
                }
            }
        }
    }

    pub fn matrix_mod(&self, n: usize, modulus: u64) -> ModMatrix {
        self.power_int(n, 1).reduce_mod(modulus)
    }
}

impl fmt::Display for GenTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GenTag::Elementary { i, j } => write!(f, "X({},{})", i, j),
            GenTag::Double { i, j, k } => write!(f, "X({},{})X({},{})", i, k, j, k),
            GenTag::DiagNeg { i } => write!(f, "T({})", i),
        }
    }
}

/// A word in named generators: syllables (tag, nonzero exponent).
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct GenWord {
    syls: Vec<(GenTag, i64)>,
}

impl GenWord {
    pub fn empty() -> Self {
        GenWord { syls: Vec::new() }
    }

    pub fn push(&mut self, tag: GenTag, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(&mut (t, ref mut te)) = self.syls.last_mut() {
            if t == tag {
                *te += e;
                if *te == 0 {
                    self.syls.pop();
                }
                return;
            }
        }
        self.syls.push((tag, e));
    }

    pub fn syllables(&self) -> &[(GenTag, i64)] {
        &self.syls
    }

    pub fn len(&self) -> usize {
        self.syls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syls.is_empty()
    }

    /// Multiplies the syllables out over Z.
    pub fn product_int(&self, n: usize) -> IntMatrix {
        let mut acc = IntMatrix::identity(n);
        for &(tag, e) in &self.syls {
            acc = acc.mul(&tag.power_int(n, e));
        }
        acc
    }

    /// Multiplies the syllables out over Z/modulus.
    pub fn product_mod(&self, n: usize, modulus: u64) -> ModMatrix {
        let mut acc = ModMatrix::identity(n, modulus);
        for &(tag, e) in &self.syls {
            acc = acc.mul(&tag.power_int(n, e).reduce_mod(modulus));
        }
        acc
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syls.is_empty() {
            return write!(f, "1");
        }
        for (n, &(tag, e)) in self.syls.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            if e == 1 {
                write!(f, "{}", tag)?;
            } else {
                write!(f, "{}^{}", tag, e)?;
            }
        }
        Ok(())
    }
}

/// Generators of the principal congruence subgroup of level 2 in GL_r(Z):
/// the squared elementaries X_ij^2 together with the sign flips T_i.
pub fn gamma2_generators(r: usize) -> Vec<IntMatrix> {
    assert!(r >= 2);
    let mut gens = Vec::new();
    for i in 1..=r {
        for j in 1..=r {
            if i != j {
                gens.push(IntMatrix::elementary_pow(i, j, r, 2));
            }
        }
    }
    for i in 1..=r {
        gens.push(IntMatrix::diag_t(i, r));
    }
    gens
}

/// Alternative generating set for a group containing the level-2 congruence
/// subgroup, anchored at index i: the plain elementaries X_ik (k != i), the
/// squares X_ji^2 (j != i), and all T_j. Every X_jk^2 is recovered through
/// the relation X_jk^2 = [X_ji^2, X_ik].
pub fn gamma2_alt_generators(i: usize, r: usize) -> Vec<IntMatrix> {
    assert!(r >= 2 && (1..=r).contains(&i));
    let mut gens = Vec::new();
    for k in 1..=r {
        if k != i {
            gens.push(IntMatrix::elementary(i, k, r));
        }
    }
    for j in 1..=r {
        if j != i {
            gens.push(IntMatrix::elementary_pow(j, i, r, 2));
        }
    }
    for j in 1..=r {
        gens.push(IntMatrix::diag_t(j, r));
    }
    gens
}

/// True iff M is congruent to the identity mod `modulus` and unimodular.
pub fn in_principal_congruence(m: &IntMatrix, modulus: u64) -> bool {
    let d = m.det();
    if d != 1 && d != -1 {
        return false;
    }
    m.reduce_mod(modulus).is_identity()
}

/// Tagged generators of S(v) = {M in GL_r(F_2) : v M = v}: the elementaries
/// X_ij with v_i = 0 and the doubles X_ik X_jk with v_i = v_j = 1.
pub fn sv_generators_tagged(v: &ParityVector) -> Vec<(GenTag, ModMatrix)> {
    let r = v.len();
    assert!(r >= 2);
    let mut gens = Vec::new();
    for i in 1..=r {
        if v.bit(i) != 0 {
            continue;
        }
        for j in 1..=r {
            if j != i {
                let tag = GenTag::Elementary { i, j };
                gens.push((tag, tag.matrix_mod(r, 2)));
            }
        }
    }
    for i in 1..=r {
        for j in i + 1..=r {
            if v.bit(i) == 1 && v.bit(j) == 1 {
                for k in 1..=r {
                    if k != i && k != j {
                        let tag = GenTag::Double { i, j, k };
                        gens.push((tag, tag.matrix_mod(r, 2)));
                    }
                }
            }
        }
    }
    gens
}

pub fn sv_generators(v: &ParityVector) -> Vec<ModMatrix> {
    sv_generators_tagged(v).into_iter().map(|(_, m)| m).collect()
}

/// The order of GL_r(Z/2): the product of (2^r - 2^k) over k < r.
pub fn gl_mod2_order(r: usize) -> u64 {
    (0..r).map(|k| (1u64 << r) - (1u64 << k)).product()
}

/// The order of S(v): all of GL_r(Z/2) for v = 0, else its index-(2^r - 1)
/// point stabilizer (the action on nonzero row vectors is transitive).
pub fn sv_order(v: &ParityVector) -> u64 {
    let full = gl_mod2_order(v.len());
    if v.is_zero() {
        full
    } else {
        full / ((1u64 << v.len()) - 1)
    }
}

/// Enumerates S(v) = {M in GL_r(Z/2) : v M = v} by trying all r x r bit
/// matrices. Practical only up to r = 4.
pub fn sv_filter(v: &ParityVector) -> Result<BTreeSet<ModMatrix>, MatError> {
    let r = v.len();
    if r > 4 {
        return Err(MatError::EnumerationTooLarge { r });
    }
    let mut out = BTreeSet::new();
    for bits in 0u32..1 << (r * r) {
        let mut m = ModMatrix::identity(r, 2);
        for i in 1..=r {
            for j in 1..=r {
                m.set(i, j, (bits >> ((i - 1) * r + (j - 1)) & 1) as u64);
            }
        }
        if m.is_invertible() && in_sv(&m, v) {
            out.insert(m);
        }
    }
    Ok(out)
}

/// True iff v M = v over F_2. The matrix must be invertible mod 2.
pub fn in_sv(m: &ModMatrix, v: &ParityVector) -> bool {
    assert_eq!(m.modulus(), 2, "parity stabilizer lives mod 2");
    assert_eq!(m.n(), v.len(), "dimension mismatch");
    assert!(m.is_invertible(), "matrix is singular mod 2");
    let n = m.n();
    (1..=n).all(|c| {
        let s: u64 = (1..=n).map(|l| v.bit(l) as u64 * m.get(l, c)).sum();
        s % 2 == v.bit(c) as u64
    })
}

/// Writes M in S(v) as a product of the generators from `sv_generators`.
///
/// Row-reduces M to the identity column by column. A zero diagonal entry is
/// repaired with a row from below; when v_i = 1 the repair must ride along on
/// a second v-one row, and in the one cornered configuration (exactly two
/// ones in v, single available pivot row) the (X_ik X_jk X_ki X_kj)^2 swap is
/// used instead. Off-diagonal ones are cleared directly (v_l = 0) or in pairs
/// (v_l = 1), an even number of which always remains.
pub fn sv_reduce(m: &ModMatrix, v: &ParityVector) -> Result<GenWord, MatError> {
    assert_eq!(m.modulus(), 2, "parity stabilizer lives mod 2");
    assert_eq!(m.n(), v.len(), "dimension mismatch");
    if !m.is_invertible() {
        return Err(MatError::Singular { modulus: 2 });
    }
    if !in_sv(m, v) {
        return Err(MatError::NotInStabilizer);
    }

    let n = m.n();
    let mut a = m.clone();
    let mut word = GenWord::empty();
    let apply = |a: &mut ModMatrix, word: &mut GenWord, tag: GenTag| {
        // left-multiply by the generator: add source rows onto target rows
        let add_row = |a: &mut ModMatrix, dst: usize, src: usize| {
            for c in 1..=n {
                let x = (a.get(dst, c) + a.get(src, c)) % 2;
                a.set(dst, c, x);
            }
        };
        match tag {
            GenTag::Elementary { i, j } => add_row(a, i, j),
            GenTag::Double { i, j, k } => {
                add_row(a, i, k);
                add_row(a, j, k);
            }
            GenTag::DiagNeg { .. } => unreachable!("no sign flips over F_2"),
        }
        word.push(tag, 1);
    };

    for i in 1..=n {
        if a.get(i, i) == 0 {
            let below: Vec<usize> = (i + 1..=n).filter(|&p| a.get(p, i) == 1).collect();
            assert!(!below.is_empty(), "no pivot available in a regular matrix");
            if v.bit(i) == 0 {
                apply(&mut a, &mut word, GenTag::Elementary { i, j: below[0] });
            } else {
                let ones: Vec<usize> = (1..=n).filter(|&k| k != i && v.bit(k) == 1).collect();
                let pick = below.iter().find_map(|&j| {
                    ones.iter().find(|&&k| k != j).map(|&k| (j, k))
                });
                match pick {
                    Some((j, k)) => {
                        let (lo, hi) = (i.min(k), i.max(k));
                        apply(&mut a, &mut word, GenTag::Double { i: lo, j: hi, k: j });
                    }
                    None => {
                        // exactly two ones in v (at i and j), and row j holds
                        // the only pivot: swap rows i and j with the
                        // composite (X_ik X_jk X_ki X_kj)^2, any third row k
                        let j = below[0];
                        let k = (1..=n).find(|&k| k != i && k != j).expect("rank >= 3");
                        let double = GenTag::Double { i, j, k };
                        let eki = GenTag::Elementary { i: k, j: i };
                        let ekj = GenTag::Elementary { i: k, j };
                        // the product is applied factor by factor, rightmost first
                        for tag in [ekj, eki, double, ekj, eki, double] {
                            apply(&mut a, &mut word, tag);
                        }
                    }
                }
            }
        }
        debug_assert_eq!(a.get(i, i), 1);

        for l in 1..=n {
            if l != i && a.get(l, i) == 1 && v.bit(l) == 0 {
                apply(&mut a, &mut word, GenTag::Elementary { i: l, j: i });
            }
        }
        let ones: Vec<usize> = (1..=n)
            .filter(|&l| l != i && a.get(l, i) == 1 && v.bit(l) == 1)
            .collect();
        assert!(ones.len() % 2 == 0, "odd leftover forced by v M = v");
        for pair in ones.chunks(2) {
            apply(&mut a, &mut word, GenTag::Double { i: pair[0], j: pair[1], k: i });
        }
    }
    debug_assert!(a.is_identity());
    Ok(word)
}

/// Breadth-first closure of the subgroup generated by `gens` in
/// GL_r(Z/modulus). Deterministic; fails once the set would exceed `cap`.
pub fn closure(
    r: usize,
    modulus: u64,
    gens: &[ModMatrix],
    cap: usize,
) -> Result<BTreeSet<ModMatrix>, MatError> {
    for g in gens {
        if g.n() != r || g.modulus() != modulus {
            return Err(MatError::MixedGenerators);
        }
    }
    let mut step: Vec<ModMatrix> = Vec::new();
    for g in gens {
        step.push(g.clone());
        step.push(g.invert()?);
    }
    let id = ModMatrix::identity(r, modulus);
    let mut seen: HashSet<ModMatrix> = HashSet::new();
    seen.insert(id.clone());
    let mut queue: VecDeque<ModMatrix> = VecDeque::new();
    queue.push_back(id);
    while let Some(m) = queue.pop_front() {
        for g in &step {
            let p = m.mul(g);
            if !seen.contains(&p) {
                if seen.len() >= cap {
                    return Err(MatError::CapExceeded { cap });
                }
                seen.insert(p.clone());
                queue.push_back(p);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Writes a unimodular integer matrix as a word in {X_ij} and T_1.
///
/// Gaussian elimination with Euclidean gcd steps clears each column onto
/// +-e_i using only integer row additions; the remaining Diag(+-1) tail is
/// rewritten with the SL_2 identity (X_ab^-1 X_ba X_ab^-1)^2 = -I on pairs of
/// sign flips, and a single leftover flip becomes T_1, conjugated into place
/// when it sits below the first row.
pub fn decompose_glz(m: &IntMatrix) -> Result<GenWord, MatError> {
    let d = m.det();
    if d != 1 && d != -1 {
        return Err(MatError::NonUnimodular { det: d });
    }
    let n = m.n();
    let mut a: Vec<i128> = m.rows().into_iter().flatten().map(|x| x as i128).collect();
    let at = |a: &Vec<i128>, i: usize, j: usize| a[(i - 1) * n + (j - 1)];
    // row_dst += coef * row_src, recorded in application order
    let mut ops: Vec<(usize, usize, i128)> = Vec::new();
    let mut rowop = |a: &mut Vec<i128>, dst: usize, src: usize, coef: i128| {
        for c in 1..=n {
            a[(dst - 1) * n + (c - 1)] += coef * at(a, src, c);
        }
        ops.push((dst, src, coef));
    };

    for c in 1..=n {
        // Euclid between the diagonal row and each row below it
        for p in c + 1..=n {
            while at(&a, p, c) != 0 {
                if at(&a, c, c) == 0 {
                    rowop(&mut a, c, p, 1);
                    rowop(&mut a, p, c, -1);
                    break;
                }
                let q = div_round(at(&a, p, c), at(&a, c, c));
                if q != 0 {
                    rowop(&mut a, p, c, -q);
                } else {
                    let q2 = div_round(at(&a, c, c), at(&a, p, c));
                    rowop(&mut a, c, p, -q2);
                }
            }
        }
        assert!(
            at(&a, c, c).abs() == 1,
            "column gcd of a unimodular matrix must be 1"
        );
        // clear the rest of the column against the +-1 pivot
        for p in 1..=n {
            if p != c && at(&a, p, c) != 0 {
                let q = at(&a, p, c) * at(&a, c, c);
                rowop(&mut a, p, c, -q);
            }
        }
    }

    // invert the recorded reduction: M = op_1^-1 op_2^-1 ... op_t^-1 * D
    let mut word = GenWord::empty();
    for &(dst, src, coef) in &ops {
        let e = i64::try_from(-coef).expect("row operation coefficient overflow");
        word.push(GenTag::Elementary { i: dst, j: src }, e);
    }

    let flips: Vec<usize> = (1..=n).filter(|&i| at(&a, i, i) == -1).collect();
    for pair in flips.chunks(2) {
        if pair.len() == 2 {
            let (p, q) = (pair[0], pair[1]);
            // (X_pq^-1 X_qp X_pq^-1)^2 = -I on the (p, q) plane
            for _ in 0..2 {
                word.push(GenTag::Elementary { i: p, j: q }, -1);
                word.push(GenTag::Elementary { i: q, j: p }, 1);
                word.push(GenTag::Elementary { i: p, j: q }, -1);
            }
        } else {
            let d = pair[0];
            if d == 1 {
                word.push(GenTag::DiagNeg { i: 1 }, 1);
            } else {
                // conjugate T_1 by the plane rotation between rows 1 and d
                word.push(GenTag::Elementary { i: 1, j: d }, -1);
                word.push(GenTag::Elementary { i: d, j: 1 }, 1);
                word.push(GenTag::Elementary { i: 1, j: d }, -1);
                word.push(GenTag::DiagNeg { i: 1 }, 1);
                word.push(GenTag::Elementary { i: 1, j: d }, 1);
                word.push(GenTag::Elementary { i: d, j: 1 }, -1);
                word.push(GenTag::Elementary { i: 1, j: d }, 1);
            }
        }
    }
    Ok(word)
}

fn div_round(a: i128, b: i128) -> i128 {
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + if (r < 0) == (b < 0) { 1 } else { -1 }
    } else {
        q
    }
}
