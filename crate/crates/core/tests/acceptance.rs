//! The acceptance gate: nine verdicts, one line each.
//!
//! Every test prints its "[PASS] criterion N" line only after all of its
//! assertions have held, so the printed summary is the earned verdict list.
//! Expected orders and counts are pinned as literals; they were computed by
//! independent enumeration before this suite was written and must never be
//! edited to match observed output.

use std::collections::{BTreeMap, BTreeSet};

use loopstab::excluded::ExcludedCase;
use loopstab::freegroup::{Endo, Word};
use loopstab::loopgroup::LoopSubgroup;
use loopstab::matgroup::{
    closure, gamma2_alt_generators, gamma2_generators, in_sv, sv_filter, sv_generators, sv_reduce,
    IntMatrix, ModMatrix,
};
use loopstab::permutation::{decompose_even, Parity, Permutation, SWLetter};
use loopstab::stabilizer::{
    gamma2_preimages, image_mod2, sv_preimages, upper_bound_check, CertifiedStabilizer,
    ConstructionKind,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: usize = 1_000_000;

fn subgroup(s: &[usize]) -> LoopSubgroup {
    LoopSubgroup::new(s.to_vec()).unwrap()
}

#[test]
fn criterion_1_rank_3_images_equal_the_parity_stabilizers() {
    let cases: [(&[usize], u64); 6] = [
        (&[3, 3, 1], 168),
        (&[2, 2, 1], 24),
        (&[2, 2, 2], 24),
        (&[2, 3, 3], 24),
        (&[5, 4, 3], 24),
        (&[4, 4, 1], 24),
    ];
    for (loops, order) in cases {
        let u = subgroup(loops);
        let image = image_mod2(&u, CAP).unwrap();
        let filter = sv_filter(&u.parity_vector()).unwrap();
        assert_eq!(image, filter, "image mismatch for loops {:?}", loops);
        assert_eq!(
            image.len() as u64,
            order,
            "order mismatch for loops {:?}",
            loops
        );
    }
    println!(
        "[PASS] criterion 1: rank-3 stabilizer images equal the brute-force \
         parity stabilizers (orders 168, 24, 24, 24, 24, 24)"
    );
}

#[test]
fn criterion_2_rank_4_images_equal_the_parity_stabilizers() {
    let cases: [(&[usize], u64); 3] = [
        (&[2, 3, 4, 5], 1344),
        (&[3, 3, 1, 1], 20160),
        (&[2, 2, 1, 1], 1344),
    ];
    for (loops, order) in cases {
        let u = subgroup(loops);
        let image = image_mod2(&u, CAP).unwrap();
        let filter = sv_filter(&u.parity_vector()).unwrap();
        assert_eq!(image, filter, "image mismatch for loops {:?}", loops);
        assert_eq!(
            image.len() as u64,
            order,
            "order mismatch for loops {:?}",
            loops
        );
    }
    println!(
        "[PASS] criterion 2: rank-4 stabilizer images equal the brute-force \
         parity stabilizers (orders 1344, 20160, 1344)"
    );
}

#[test]
fn criterion_3_the_four_textbook_automorphisms_certify_verbatim() {
    let u = subgroup(&[3, 3, 1]);

    // gamma_31: (g3 g1, g2, g3)
    let c = CertifiedStabilizer::from_prefix(
        &u,
        1,
        &Word::gen(3),
        Word::empty(),
        ConstructionKind::TrivialLooplet,
    )
    .unwrap();
    assert_eq!(*c.target(), IntMatrix::elementary(3, 1, 3));
    assert_eq!(c.gamma().image(1).to_string(), "g3 g1");
    assert_eq!(c.gamma().image(2).to_string(), "g2");
    assert_eq!(c.gamma().image(3).to_string(), "g3");

    // gamma_32: (g1, g3 g2, g3)
    let c = CertifiedStabilizer::from_prefix(
        &u,
        2,
        &Word::gen(3),
        Word::empty(),
        ConstructionKind::TrivialLooplet,
    )
    .unwrap();
    assert_eq!(*c.target(), IntMatrix::elementary(3, 2, 3));
    assert_eq!(c.gamma().image(2).to_string(), "g3 g2");

    // gamma_13: g3 -> (g2 g1 g2^-1 g1 g2 g1^-2 g2^-1) g1 g3
    let w13 = Word::from_syllables([(2, 1), (1, 1), (2, -1), (1, 1), (2, 1), (1, -2), (2, -1)]);
    assert_eq!(w13.exponent_sum(1), 0);
    assert_eq!(w13.exponent_sum(2), 0);
    let prefix = w13.mul(&Word::gen(1));
    assert!(u.in_normal_core(&prefix).unwrap());
    let c = CertifiedStabilizer::from_prefix(&u, 3, &prefix, w13, ConstructionKind::Odd).unwrap();
    assert_eq!(*c.target(), IntMatrix::elementary(1, 3, 3));
    assert_eq!(c.gamma().image(1).to_string(), "g1");
    assert_eq!(c.gamma().image(2).to_string(), "g2");

    // gamma_23: g3 -> (g1 g2 g1^-1 g2 g1 g2^-2 g1^-1) g2 g3
    let w23 = Word::from_syllables([(1, 1), (2, 1), (1, -1), (2, 1), (1, 1), (2, -2), (1, -1)]);
    assert_eq!(w23.exponent_sum(1), 0);
    assert_eq!(w23.exponent_sum(2), 0);
    assert!(w23.in_derived_subgroup());
    let prefix = w23.mul(&Word::gen(2));
    assert!(u.in_normal_core(&prefix).unwrap());
    let c = CertifiedStabilizer::from_prefix(&u, 3, &prefix, w23, ConstructionKind::Odd).unwrap();
    assert_eq!(*c.target(), IntMatrix::elementary(2, 3, 3));

    println!(
        "[PASS] criterion 3: the four textbook 3/3/1 automorphisms certify \
         verbatim with matrix images X31, X32, X13, X23"
    );
}

#[test]
fn criterion_4_even_permutations_decompose_and_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.gen_range(3..=8);
        let mut images: Vec<usize> = (1..=n).collect();
        images.shuffle(&mut rng);
        let mut p = Permutation::from_images(images).unwrap();
        if p.parity() == Parity::Odd {
            p = p.compose(&Permutation::cycle(n, &[1, 2]).unwrap());
        }
        for m in 2..n {
            let full: Vec<usize> = (1..=n).collect();
            let sigma = Permutation::cycle(n, &full[..m]).unwrap();
            let mut omega_pts = vec![1];
            omega_pts.extend(m + 1..=n);
            let omega = Permutation::cycle(n, &omega_pts).unwrap();
            let w = decompose_even(&p, m).unwrap();
            assert_eq!(w.evaluate(&sigma, &omega), p, "n={}, m={}", n, m);
            assert_eq!(w.exponent_sum(SWLetter::S), 0);
            assert_eq!(w.exponent_sum(SWLetter::W), 0);
        }
        checked += 1;
    }
    println!(
        "[PASS] criterion 4: 200 random even permutations (3 <= n <= 8) \
         decompose into balanced two-cycle words and evaluate back exactly"
    );
}

#[test]
fn criterion_5_parity_stabilizer_generators_close_and_reduce() {
    for bits in 0u8..8 {
        let v = loopstab::ParityVector::new(vec![bits & 1, bits >> 1 & 1, bits >> 2 & 1]);
        let closed = closure(3, 2, &sv_generators(&v), CAP).unwrap();
        let filter = sv_filter(&v).unwrap();
        assert_eq!(closed, filter, "closure mismatch for v = {}", v);
        for m in &closed {
            let word = sv_reduce(m, &v).unwrap();
            assert_eq!(word.product_mod(3, 2), *m, "round-trip failed for v = {}", v);
        }
    }
    println!(
        "[PASS] criterion 5: for all 8 parity vectors (r=3) the generator \
         closure equals the brute-force stabilizer and every member re-multiplies \
         from its reduction word"
    );
}

#[test]
fn criterion_6_congruence_generators_close_onto_the_mod_4_kernel() {
    // the kernel of reduction GL3(Z/4) -> GL3(Z/2) is {I + 2A}, 2^9 elements
    let mut kernel = BTreeSet::new();
    for bits in 0u32..512 {
        let mut m = ModMatrix::identity(3, 4);
        for cell in 0..9 {
            if bits >> cell & 1 == 1 {
                let (i, j) = (cell / 3 + 1, cell % 3 + 1);
                m.set(i, j, (m.get(i, j) + 2) % 4);
            }
        }
        kernel.insert(m);
    }
    assert_eq!(kernel.len(), 512);

    let gens: Vec<ModMatrix> = gamma2_generators(3)
        .iter()
        .map(|g| g.reduce_mod(4))
        .collect();
    let closed = closure(3, 4, &gens, CAP).unwrap();
    assert_eq!(closed, kernel);

    let alt: Vec<ModMatrix> = gamma2_alt_generators(3, 3)
        .iter()
        .map(|g| g.reduce_mod(4))
        .collect();
    let alt_closed = closure(3, 4, &alt, CAP).unwrap();
    assert!(alt_closed.is_superset(&kernel));

    println!(
        "[PASS] criterion 6: the squared-elementary generators close onto the \
         512-element mod-4 reduction kernel, and the looplet-anchored set's \
         closure contains it"
    );
}

#[test]
fn criterion_7_compositions_of_stabilizers_fix_the_parity_vector() {
    let suite: [&[usize]; 6] = [
        &[3, 3, 1],
        &[2, 2, 1],
        &[2, 2, 2],
        &[2, 3, 3],
        &[5, 4, 3],
        &[4, 4, 1],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for loops in suite {
        let u = subgroup(loops);
        let v = u.parity_vector();
        let mut stabs = sv_preimages(&u).unwrap();
        stabs.extend(gamma2_preimages(&u).unwrap());

        // long compositions, tracked through the matrix homomorphism
        for _ in 0..500 {
            let len = rng.gen_range(1..=10);
            let mut b = IntMatrix::identity(u.rank());
            for _ in 0..len {
                let pick = &stabs[rng.gen_range(0..stabs.len())];
                let factor = if rng.gen_bool(0.5) {
                    pick.target().clone()
                } else {
                    pick.target().invert().unwrap()
                };
                b = b.mul(&factor);
            }
            assert!(
                in_sv(&b.reduce_mod(2), &v),
                "composed image moved v for loops {:?}",
                loops
            );
        }
    }

    // short compositions, materialized as endomorphisms and cross-checked
    for loops in [&[3usize, 3, 1] as &[usize], &[2, 2, 1]] {
        let u = subgroup(loops);
        let mut stabs = sv_preimages(&u).unwrap();
        stabs.extend(gamma2_preimages(&u).unwrap());
        for _ in 0..100 {
            let len = rng.gen_range(1..=3);
            let mut endo = Endo::identity(u.rank());
            let mut product = IntMatrix::identity(u.rank());
            for _ in 0..len {
                let pick = &stabs[rng.gen_range(0..stabs.len())];
                let (gamma, target) = if rng.gen_bool(0.5) {
                    (pick.gamma().clone(), pick.target().clone())
                } else {
                    (pick.gamma_inverse().clone(), pick.target().invert().unwrap())
                };
                endo = endo.compose(&gamma);
                product = product.mul(&target);
            }
            assert_eq!(endo.b_matrix(), product);
            assert!(upper_bound_check(&u, &endo));
        }
    }

    println!(
        "[PASS] criterion 7: 500 random stabilizer compositions per subgroup \
         (length <= 10) fix the parity vector mod 2; materialized short \
         compositions agree with their matrix products"
    );
}

#[test]
fn criterion_8_the_excluded_configuration_verifies_for_small_levels() {
    let expected: [(usize, u64); 3] = [(2, 24), (3, 864), (4, 3072)];
    for (s1, order) in expected {
        let c = ExcludedCase::new(3, s1).unwrap();
        let report = c.verify_excluded(None, CAP, 100).unwrap();
        assert!(report.passed(), "excluded verification failed for s1={}", s1);
        assert_eq!(report.closure_order, order, "s1={}", s1);
        assert_eq!(report.filtered_order, order, "s1={}", s1);
        assert_eq!(report.candidate_count, 9);
    }
    // consistency one level up: the s1=2 candidates generate the full
    // filtered shadow mod 4 as well
    let c = ExcludedCase::new(3, 2).unwrap();
    let report = c.verify_excluded(Some(4), CAP, 25).unwrap();
    assert!(report.passed());
    assert_eq!(report.closure_order, 12288);
    assert_eq!(report.filtered_order, 12288);

    println!(
        "[PASS] criterion 8: excluded-case candidates stabilize the subspace \
         and close onto the filtered shadows (orders 24, 864, 3072; 12288 mod 4)"
    );
}

/// Minimal DOT reader for the exact shape `coset_graph_dot` emits.
fn parse_dot(dot: &str) -> (BTreeMap<String, String>, Vec<(String, String, String)>) {
    let mut labels = BTreeMap::new();
    let mut edges = Vec::new();
    for line in dot.lines() {
        let line = line.trim();
        let Some(rest) = line.strip_suffix("\"];") else {
            continue;
        };
        if let Some((from_to, label)) = rest.split_once(" [label=\"") {
            if let Some((src, dst)) = from_to.split_once(" -> ") {
                edges.push((src.to_string(), dst.to_string(), label.to_string()));
            } else {
                labels.insert(from_to.to_string(), label.to_string());
            }
        }
    }
    (labels, edges)
}

#[test]
fn criterion_9_the_coset_graph_is_two_loops_and_a_looplet() {
    let u = subgroup(&[3, 3, 1]);
    let dot = u.coset_graph_dot();
    assert_eq!(dot, u.coset_graph_dot(), "output must be deterministic");
    let (labels, edges) = parse_dot(&dot);
    assert_eq!(labels.len(), 5);
    assert_eq!(edges.len(), 15);

    // identify nodes by their coset labels
    let node = |name: &str| -> String {
        labels
            .iter()
            .find(|(_, l)| l.as_str() == name)
            .map(|(id, _)| id.clone())
            .unwrap_or_else(|| panic!("no node labeled {}", name))
    };
    let expect: Vec<(String, String, &str)> = vec![
        // first loop: U -> g1 U -> g1^2 U -> U
        (node("U"), node("g1 U"), "g1"),
        (node("g1 U"), node("g1^2 U"), "g1"),
        (node("g1^2 U"), node("U"), "g1"),
        // g1 fixes the cosets of the other loop
        (node("g2 U"), node("g2 U"), "g1"),
        (node("g2^2 U"), node("g2^2 U"), "g1"),
        // second loop: U -> g2 U -> g2^2 U -> U
        (node("U"), node("g2 U"), "g2"),
        (node("g2 U"), node("g2^2 U"), "g2"),
        (node("g2^2 U"), node("U"), "g2"),
        (node("g1 U"), node("g1 U"), "g2"),
        (node("g1^2 U"), node("g1^2 U"), "g2"),
        // the looplet: self-loops everywhere
        (node("U"), node("U"), "g3"),
        (node("g1 U"), node("g1 U"), "g3"),
        (node("g1^2 U"), node("g1^2 U"), "g3"),
        (node("g2 U"), node("g2 U"), "g3"),
        (node("g2^2 U"), node("g2^2 U"), "g3"),
    ];
    let actual: BTreeSet<(String, String, String)> = edges.into_iter().collect();
    let wanted: BTreeSet<(String, String, String)> = expect
        .into_iter()
        .map(|(a, b, l)| (a, b, l.to_string()))
        .collect();
    assert_eq!(actual, wanted);

    println!(
        "[PASS] criterion 9: the 3/3/1 coset graph is two 3-loops through the \
         base coset plus a looplet (5 nodes, 15 edges)"
    );
}
