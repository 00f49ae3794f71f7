//! Shared fixtures for the benchmark suite.

use loopstab::loopgroup::LoopSubgroup;
use loopstab::matgroup::IntMatrix;
use loopstab::permutation::Permutation;

/// The 3/3/1 subgroup: the usual small worked-example target.
pub fn loops_331() -> LoopSubgroup {
    LoopSubgroup::new(vec![3, 3, 1]).unwrap()
}

/// An even permutation on 8 points that mixes both loop cycles.
pub fn even_8() -> Permutation {
    Permutation::from_cycles(8, &[vec![1, 3, 5], vec![2, 4, 6, 7, 8]]).unwrap()
}

/// A unimodular 3x3 matrix with mixed-sign entries, as an elimination workload.
pub fn unimodular_3() -> IntMatrix {
    IntMatrix::elementary_pow(1, 2, 3, 3)
        .mul(&IntMatrix::elementary_pow(2, 3, 3, -2))
        .mul(&IntMatrix::elementary_pow(3, 1, 3, 1))
        .mul(&IntMatrix::elementary_pow(1, 3, 3, -4))
}
