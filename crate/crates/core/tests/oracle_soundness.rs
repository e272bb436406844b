//! Desk-scale soundness: certified quantities checked against exhaustive
//! oracles on instances small enough to enumerate.

use l1section::analysis::{
    exact_spread, kernel_basis, pushdown_certificate, Provenance, SpreadCertificate,
};
use l1section::expanders::{
    build_spectral_expander, profile_bruteforce_table, ProfileBound,
};
use l1section::kerdock::local_subspace;
use l1section::tanner::tanner_check_matrix;
use l1section::BipartiteGraph;
use l1section::SignCheckMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pushdown certificates never overclaim: on a small composed instance
/// with an exact inner spread and an exact profile, the exact spread of
/// the composition at the certified subset size is at least the certified
/// epsilon.
#[test]
fn pushdown_sound_on_small_instance() {
    // N = 8, every left vertex in exactly two neighborhoods
    let g = BipartiteGraph::new(
        8,
        2,
        4,
        vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![0, 2, 4, 6], vec![1, 3, 5, 7]],
    )
    .unwrap();
    let inner = SignCheckMatrix::from_dense_signs(&[vec![1, 1, 1, 1]], 4).unwrap();
    let inner_basis = kernel_basis(&inner).unwrap();
    let eps1 = exact_spread(&inner_basis, 1.0).unwrap();
    let inner_cert = SpreadCertificate::anchored(1.0, eps1, Provenance::ExactOracle);

    let table = profile_bruteforce_table(&g).unwrap();
    let profile = ProfileBound::BruteForce { table, n_right: g.n_right() };

    let composed = tanner_check_matrix(&g, &inner).unwrap();
    let basis = kernel_basis(&composed).unwrap();
    assert!(basis.dim() > 0);

    let cert = pushdown_certificate(&profile, &inner_cert, g.max_left_degree(), 0.5).unwrap();
    assert!(cert.is_useful());
    let exact = exact_spread(&basis, cert.t_high).unwrap();
    assert!(
        exact >= cert.epsilon - 1e-9,
        "exact {exact} under certified {}",
        cert.epsilon
    );
}

/// The spectral profile bound is a lower bound on sampled neighborhood
/// counts of the realized graph.
#[test]
fn spectral_profile_bound_holds_on_samples() {
    let (g, profile) = build_spectral_expander(3276, 6).unwrap();
    assert!(g.max_left_degree() <= 4);
    let left_adj = g.left_adjacency();
    let n = g.n_left();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut seen = vec![false; g.n_right()];
    for _ in 0..10_000 {
        let size = rng.gen_range(1..=64usize);
        let subset = rand::seq::index::sample(&mut rng, n, size);
        seen.iter_mut().for_each(|b| *b = false);
        let mut count = 0usize;
        for v in subset.iter() {
            for &j in &left_adj[v] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                }
            }
        }
        let bound = profile.evaluate(size as f64);
        assert!(
            count as f64 >= bound - 1e-9,
            "subset of size {size} has {count} neighbors, bound {bound}"
        );
    }
}

/// The local-subspace certificate is sound against the exhaustive oracle
/// at both admissible widths checkable in-budget.
#[test]
fn local_subspace_certificates_sound() {
    for (k, d) in [(16usize, 32usize), (16, 64)] {
        let space = local_subspace(k, d).unwrap();
        let basis = kernel_basis(&space.check).unwrap();
        let t = space.certificate.t_high;
        let exact = exact_spread(&basis, t).unwrap();
        assert!(
            exact >= space.certificate.epsilon - 1e-9,
            "(k={k}, d={d}): exact {exact} under certified {}",
            space.certificate.epsilon
        );
    }
}

/// Edge-count soundness of the eigenvalue: random vertex subsets of the
/// Cayley expander never exceed the spectral edge bound.
#[test]
fn alon_chung_bound_on_sampled_subsets() {
    use l1section::expanders::{alon_chung_check, build_lps};
    let y = build_lps(5, 13).unwrap();
    let lambda2 = y.lambda2();
    assert!(lambda2 > 0.0);
    let n = y.n_vertices();
    // full vertex set and singletons are the boundary cases
    let all: Vec<usize> = (0..n).collect();
    assert!(alon_chung_check(&y, &all, lambda2));
    assert!(alon_chung_check(&y, &[0], lambda2));
    let mut rng = ChaCha8Rng::seed_from_u64(513);
    for _ in 0..10_000 {
        let size = rng.gen_range(1..=n / 2);
        let subset = rand::seq::index::sample(&mut rng, n, size).into_vec();
        assert!(alon_chung_check(&y, &subset, lambda2));
    }
}

/// In exhaustive mode the sampled estimator coincides with the oracle, so
/// it inherits monotonicity in the subset size.
#[test]
fn sampled_estimate_monotone_when_exhaustive() {
    use l1section::analysis::sampled_spread;
    let space = local_subspace(4, 8).unwrap();
    let basis = kernel_basis(&space.check).unwrap();
    let mut prev = 1.0f64;
    for t in 0..=4 {
        let est = sampled_spread(&basis, t as f64, 100, 1);
        assert!(est <= prev + 1e-12);
        assert!((est - exact_spread(&basis, t as f64).unwrap()).abs() <= 1e-12);
        prev = est;
    }
}

/// Deleting left vertices never hurts the brute-force profile at any m
/// evaluated over the surviving vertices.
#[test]
fn left_deletion_monotone_for_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let n_left = rng.gen_range(6..=12usize);
        let n_right = rng.gen_range(2..=4usize);
        let d = rng.gen_range(2..=3usize).min(n_left - 1);
        let mut adjacency = Vec::new();
        for _ in 0..n_right {
            let mut s = std::collections::BTreeSet::new();
            while s.len() < d {
                s.insert(rng.gen_range(0..n_left));
            }
            adjacency.push(s.into_iter().collect::<Vec<_>>());
        }
        let Ok(g) = BipartiteGraph::new(n_left, n_right * d, d, adjacency.clone()) else {
            continue;
        };
        let full = profile_bruteforce_table(&g).unwrap();
        // delete the last left vertex wherever it occurs
        let keep = n_left - 1;
        let reduced: Vec<Vec<usize>> = adjacency
            .iter()
            .map(|nbrs| nbrs.iter().copied().filter(|&v| v < keep).collect())
            .collect();
        // measure neighborhoods directly (the reduced graph is not
        // right-regular, so enumerate by masks)
        let mut masks = vec![0u32; keep];
        for (j, nbrs) in reduced.iter().enumerate() {
            for &v in nbrs {
                masks[v] |= 1 << j;
            }
        }
        for m in 1..=keep {
            // minimum neighborhood over subsets of size m in the reduced graph
            let mut best = usize::MAX;
            for subset in 1u32..(1 << keep) {
                if subset.count_ones() as usize != m {
                    continue;
                }
                let mut union = 0u32;
                let mut bits = subset;
                while bits != 0 {
                    union |= masks[bits.trailing_zeros() as usize];
                    bits &= bits - 1;
                }
                best = best.min(union.count_ones() as usize);
            }
            // surviving subsets are a subfamily of the original ones, so
            // the minimum can only go up
            assert!(
                best >= full[m - 1],
                "deletion decreased profile at m={m}: {best} < {}",
                full[m - 1]
            );
        }
    }
}
