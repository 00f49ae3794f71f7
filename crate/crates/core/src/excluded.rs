//! The configuration the sharp image computation excludes: one loop of
//! length s_1 >= 2 and looplets everywhere else.
//!
//! Here the subgroup is the preimage of an abelian condition — a word
//! belongs exactly when its g_1-exponent sum is divisible by s_1 — so the
//! matrix image of its stabilizer is the full integer stabilizer of the
//! column subspace U' = {v : v_1 ≡ 0 mod s_1}, a congruence-level
//! phenomenon rather than a parity one. This module provides a faithful
//! membership test for that stabilizer, the containment of the principal
//! congruence group of level s_1, and a certified generating set whose
//! mod-s_1 shadow is verified against brute-force enumeration at desk
//! scale.

use crate::freegroup::Word;
use crate::loopgroup::LoopSubgroup;
use crate::matgroup::{closure, in_principal_congruence, IntMatrix, MatError, ModMatrix};
use crate::report::{all_pass, CheckResult};
use crate::stabilizer::{preimage_elementary, tau_stabilizer, CertifiedStabilizer, ConstructionKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

/// Most permissive enumeration allowed by `verify_excluded`: the number of
/// candidate matrices m^(r^2) must stay below this.
const ENUMERATION_LIMIT: u128 = 2_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExcludedError {
    #[error("rank must be at least 2 (got {r})")]
    RankTooSmall { r: usize },
    #[error("the distinguished loop needs length at least 2 (got {s1})")]
    LoopTooShort { s1: usize },
    #[error("shadow modulus {modulus} must be a multiple of s1 = {s1}, at least 2")]
    BadModulus { modulus: u64, s1: usize },
    #[error("enumerating {count} matrices exceeds the practical limit")]
    EnumerationTooLarge { count: u128 },
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// The s_1/1/.../1 loop configuration.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ExcludedCase {
    r: usize,
    s1: usize,
}

impl ExcludedCase {
    pub fn new(r: usize, s1: usize) -> Result<Self, ExcludedError> {
        if r < 2 {
            return Err(ExcludedError::RankTooSmall { r });
        }
        if s1 < 2 {
            return Err(ExcludedError::LoopTooShort { s1 });
        }
        Ok(ExcludedCase { r, s1 })
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn s1(&self) -> usize {
        self.s1
    }

    /// The underlying loop subgroup s_1/1/.../1.
    pub fn loop_subgroup(&self) -> LoopSubgroup {
        let mut s = vec![1; self.r];
        s[0] = self.s1;
        LoopSubgroup::new(s).expect("r >= 2 with positive lengths")
    }

    /// Does M preserve the column subspace U' = {v : v_1 ≡ 0 mod s_1}?
    ///
    /// Decided definitionally: M and its exact inverse are applied to a
    /// basis of U' (s_1·e_1 and the later unit columns) and the first
    /// entry of every image is checked for divisibility. Unimodularity is
    /// required so that M·U' = U' reduces to the two containments.
    pub fn in_stab_uprime(&self, m: &IntMatrix) -> Result<bool, MatError> {
        assert_eq!(m.n(), self.r, "dimension mismatch");
        let inverse = m.invert()?;
        let s1 = self.s1 as i64;
        for cand in [m, &inverse] {
            // image of s_1 e_1: first entry s_1 m_11, divisible by design;
            // image of e_j: first entry m_1j
            for j in 2..=self.r {
                if cand.get(1, j).rem_euclid(s1) != 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The containment every principal congruence element enjoys: if
    /// M ≡ I mod s_1 (and M is unimodular), then M stabilizes U'. For
    /// matrices outside the congruence group the implication is vacuous.
    pub fn gamma_s1_contained(&self, m: &IntMatrix) -> bool {
        if !in_principal_congruence(m, self.s1 as u64) {
            return true;
        }
        self.in_stab_uprime(m)
            .expect("congruence members are unimodular")
    }

    /// The proposed certified generating set for the stabilizer image:
    /// sign flips τ_i, looplet elementaries X_ij (i ≠ 1), and the loop
    /// powers X_1j^(s_1) lifted through the prefix g_1^(s_1).
    pub fn candidate_generators(&self) -> Vec<CertifiedStabilizer> {
        let u = self.loop_subgroup();
        let mut out = Vec::new();
        for i in 1..=self.r {
            out.push(tau_stabilizer(&u, i).expect("sign flips always certify"));
        }
        for i in 2..=self.r {
            for j in 1..=self.r {
                if j != i {
                    out.push(
                        preimage_elementary(&u, i, j)
                            .expect("looplet elementaries always certify"),
                    );
                }
            }
        }
        let core_word = Word::gen_pow(1, self.s1 as i64);
        for j in 2..=self.r {
            out.push(
                CertifiedStabilizer::from_prefix(
                    &u,
                    j,
                    &core_word,
                    core_word.clone(),
                    ConstructionKind::CorePower,
                )
                .expect("the full loop word acts trivially on the cosets"),
            );
        }
        out
    }

    /// Enumerates the mod-`modulus` shadow of the stabilizer: matrices with
    /// determinant ±1 mod `modulus` such that both the matrix and its
    /// modular inverse keep the first-row tail ≡ 0 mod s_1.
    fn filtered_shadow(&self, modulus: u64) -> Result<BTreeSet<ModMatrix>, ExcludedError> {
        let n = self.r;
        let count = (modulus as u128).pow((n * n) as u32);
        if count > ENUMERATION_LIMIT {
            return Err(ExcludedError::EnumerationTooLarge { count });
        }
        let s1 = self.s1 as u64;
        let mut out = BTreeSet::new();
        let cells = n * n;
        let mut digits = vec![0u64; cells];
        loop {
            let mut m = ModMatrix::identity(n, modulus);
            for i in 1..=n {
                for j in 1..=n {
                    m.set(i, j, digits[(i - 1) * n + (j - 1)]);
                }
            }
            let d = m.det();
            if d == 1 || d == modulus - 1 {
                let tail_zero = |c: &ModMatrix| (2..=n).all(|j| c.get(1, j) % s1 == 0);
                if tail_zero(&m) {
                    if let Ok(inv) = m.invert() {
                        if tail_zero(&inv) {
                            out.insert(m);
                        }
                    }
                }
            }
            // odometer step over all m^(n^2) matrices
            let mut pos = 0;
            loop {
                if pos == cells {
                    return Ok(out);
                }
                digits[pos] += 1;
                if digits[pos] < modulus {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Runs the desk-scale verification: candidate images stabilize U'
    /// exactly, their closure mod `modulus` (s_1 by default) equals the
    /// brute-force shadow, and random principal congruence products land
    /// inside. The modulus may be raised to any multiple of s_1 within the
    /// enumeration limit.
    pub fn verify_excluded(
        &self,
        modulus: Option<u64>,
        cap: usize,
        trials: usize,
    ) -> Result<ExcludedReport, ExcludedError> {
        let m_shadow = modulus.unwrap_or(self.s1 as u64);
        if m_shadow < 2 || m_shadow % self.s1 as u64 != 0 {
            return Err(ExcludedError::BadModulus {
                modulus: m_shadow,
                s1: self.s1,
            });
        }
        let candidates = self.candidate_generators();
        let mut checks = Vec::new();

        let stab_ok = candidates
            .iter()
            .all(|c| self.in_stab_uprime(c.target()).unwrap_or(false));
        checks.push(CheckResult::new(
            "candidates-stabilize-subspace",
            stab_ok,
            format!(
                "{} candidate images checked against U' over the integers",
                candidates.len()
            ),
        ));

        let gens: Vec<ModMatrix> = candidates
            .iter()
            .map(|c| c.target().reduce_mod(m_shadow))
            .collect();
        let closed = closure(self.r, m_shadow, &gens, cap)?;
        let filtered = self.filtered_shadow(m_shadow)?;
        checks.push(CheckResult::new(
            "closure-matches-filtered-shadow",
            closed == filtered,
            format!(
                "closure has {} elements, filter has {}",
                closed.len(),
                filtered.len()
            ),
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(0x5717_ab00 + self.s1 as u64);
        let mut trials_ok = true;
        for _ in 0..trials {
            let len = rng.gen_range(1..=8);
            let mut m = IntMatrix::identity(self.r);
            for _ in 0..len {
                let i = rng.gen_range(1..=self.r);
                let mut j = rng.gen_range(1..=self.r - 1);
                if j >= i {
                    j += 1;
                }
                let e = if rng.gen_bool(0.5) { 1 } else { -1 };
                m = m.mul(&IntMatrix::elementary_pow(
                    i,
                    j,
                    self.r,
                    e * self.s1 as i64,
                ));
            }
            if !in_principal_congruence(&m, self.s1 as u64) || !self.gamma_s1_contained(&m) {
                trials_ok = false;
                break;
            }
            // the full implication, not just the premise-true half
            if !self.in_stab_uprime(&m).unwrap_or(false) {
                trials_ok = false;
                break;
            }
        }
        checks.push(CheckResult::new(
            "congruence-products-contained",
            trials_ok,
            format!(
                "{} random level-{} congruence products stayed inside the stabilizer",
                trials, self.s1
            ),
        ));

        Ok(ExcludedReport {
            schema: 1,
            r: self.r,
            s1: self.s1,
            modulus: m_shadow,
            candidate_count: candidates.len(),
            closure_order: closed.len() as u64,
            filtered_order: filtered.len() as u64,
            gamma_s1_trials: trials,
            checks,
        })
    }
}

/// The verification report for one excluded configuration.
#[derive(Clone, Debug, Serialize)]
pub struct ExcludedReport {
    pub schema: u32,
    pub r: usize,
    pub s1: usize,
    pub modulus: u64,
    pub candidate_count: usize,
    pub closure_order: u64,
    pub filtered_order: u64,
    pub gamma_s1_trials: usize,
    pub checks: Vec<CheckResult>,
}

impl ExcludedReport {
    pub fn passed(&self) -> bool {
        all_pass(&self.checks)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
