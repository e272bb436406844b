//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `--nocapture`). Tolerances and regression constants are
//! pinned here and nowhere else.

use l1section::algebra::{is_bent, walsh_transform};
use l1section::analysis::{
    compose_certificates, distortion_to_spread, exact_spread, kernel_basis, pushdown_certificate,
    spread_to_distortion, Provenance, SpreadCertificate,
};
use l1section::checkmat::SignCheckMatrix;
use l1section::expanders::{
    build_lps, profile_bruteforce_table, right_regularize, BipartiteGraph, ProfileBound,
    RawBipartite,
};
use l1section::kerdock::{assemble_matrix, build_bent_family, build_mub, local_subspace};
use l1section::report::Report;
use l1section::sensing::{basis_pursuit, recovery_curve, RecoveryCurve};
use l1section::tanner::tanner_check_matrix;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_l1section")
}

fn run_ok(args: &[&str]) -> String {
    let out = Command::new(bin()).args(args).output().expect("spawn CLI");
    assert!(
        out.status.success(),
        "CLI failed: {:?}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("l1section-acceptance-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn construct_reference_matrix(dir: &Path) -> SignCheckMatrix {
    let out = dir.join("thm1.check");
    run_ok(&[
        "construct",
        "--N",
        "1024",
        "--eta",
        "0.5",
        "--mode",
        "thm1-explicit",
        "--out",
        out.to_str().unwrap(),
    ]);
    SignCheckMatrix::parse_text(&std::fs::read_to_string(&out).unwrap()).unwrap()
}

#[test]
fn criterion_01_mub_exactness() {
    for k in [4usize, 16, 64, 256] {
        let mub = build_mub(k).unwrap();
        let bases: Vec<Vec<i32>> = (0..mub.num_bases())
            .map(|i| mub.basis(i).iter().map(|&s| s as i32).collect())
            .collect();
        // independent naive integer verification of every basis pair
        let mut gram = vec![0i64; k * k];
        for i in 0..bases.len() {
            for j in i..bases.len() {
                gram.iter_mut().for_each(|g| *g = 0);
                for x in 0..k {
                    let bi = &bases[i][x * k..(x + 1) * k];
                    let bj = &bases[j][x * k..(x + 1) * k];
                    for a in 0..k {
                        let s = bi[a] as i64;
                        let row = &mut gram[a * k..(a + 1) * k];
                        for (g, &t) in row.iter_mut().zip(bj) {
                            *g += s * t as i64;
                        }
                    }
                }
                for a in 0..k {
                    for b in 0..k {
                        let v = gram[a * k + b];
                        if i == j {
                            let want = if a == b { k as i64 } else { 0 };
                            assert_eq!(v, want, "k={k} basis {i} entry ({a},{b})");
                        } else {
                            assert_eq!(v * v, k as i64, "k={k} bases ({i},{j}) entry ({a},{b})");
                        }
                    }
                }
            }
        }
    }
    println!("[PASS] criterion 1: basis families pass exact scaled-integer unbiasedness checks");
}

#[test]
fn criterion_02_bentness() {
    for k in [4usize, 16, 64, 256] {
        let fam = build_bent_family(k).unwrap();
        let fs = fam.functions();
        for f in fs {
            assert!(is_bent(f).unwrap());
            assert!(walsh_transform(f).parseval_holds());
        }
        for i in 0..fs.len() {
            for j in (i + 1)..fs.len() {
                assert!(is_bent(&fs[i].xor(&fs[j]).unwrap()).unwrap());
            }
        }
    }
    println!("[PASS] criterion 2: all family members and pairwise sums are bent (exact integers)");
}

#[test]
fn criterion_03_matrix_norms_and_coherence() {
    let pairs: [(usize, &[usize]); 4] = [
        (4, &[4, 5, 6, 7, 8]),
        (16, &[16, 24, 32, 48, 64]),
        (64, &[64, 96, 128, 256, 512]),
        (256, &[256, 512, 1024, 1536, 2048]),
    ];
    let mut checked = 0;
    for (k, ds) in pairs {
        for &d in ds {
            let m = assemble_matrix(k, d).unwrap();
            let bound = (d as f64 / k as f64).ceil().sqrt();
            let est = m.operator_norm_estimate();
            assert!(est <= bound + 1e-9, "(k={k}, d={d}): norm {est} > {bound}");
            for i in 0..d {
                for j in (i + 1)..d {
                    let s = m.column_product(i, j);
                    assert!(s * s <= k as i64, "(k={k}, d={d}): coherence breach at ({i},{j})");
                }
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 20);
    println!("[PASS] criterion 3: 20 assembled matrices meet the norm and coherence bounds");
}

fn sigma_min_of_columns(m: &l1section::KerdockMatrix, subset: &[usize]) -> f64 {
    let t = subset.len();
    let k = m.k() as f64;
    let mut gram = DMatrix::zeros(t, t);
    for (a, &i) in subset.iter().enumerate() {
        for (b, &j) in subset.iter().enumerate().skip(a) {
            let v = if i == j { 1.0 } else { m.column_product(i, j) as f64 / k };
            gram[(a, b)] = v;
            gram[(b, a)] = v;
        }
    }
    gram.symmetric_eigenvalues().min().max(0.0).sqrt()
}

#[test]
fn criterion_04_near_orthogonality_soundness() {
    let floor = 1.0 / 2.0f64.sqrt() - 1e-9;
    // exhaustive column subsets for the two small instances
    for (k, d) in [(16usize, 32usize), (16, 64)] {
        let m = assemble_matrix(k, d).unwrap();
        for i in 0..d {
            assert!(sigma_min_of_columns(&m, &[i]) >= floor);
            for j in (i + 1)..d {
                assert!(
                    sigma_min_of_columns(&m, &[i, j]) >= floor,
                    "(k={k},d={d}) subset ({i},{j})"
                );
            }
        }
    }
    // sampled subsets up to size sqrt(k)/2 = 4 for the large instance
    let m = assemble_matrix(64, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(64256);
    for trial in 0..100_000 {
        let size = 1 + trial % 4;
        let subset = rand::seq::index::sample(&mut rng, 256, size).into_vec();
        assert!(
            sigma_min_of_columns(&m, &subset) >= floor,
            "(64,256) subset {subset:?}"
        );
    }
    // kernel spread certificates against the exact oracle
    for (k, d) in [(16usize, 32usize), (16, 64)] {
        let space = local_subspace(k, d).unwrap();
        let basis = kernel_basis(&space.check).unwrap();
        let t = (k as f64).sqrt() / 2.0;
        let certified = 0.25 * (k as f64 / d as f64).sqrt();
        let exact = exact_spread(&basis, t).unwrap();
        assert!(
            exact >= certified - 1e-9,
            "(k={k},d={d}): exact {exact} under certified {certified}"
        );
    }
    println!("[PASS] criterion 4: column subsets stay well conditioned; kernel certificates sound");
}

#[test]
fn criterion_05_cayley_graph_spectral_gap() {
    for (p, q) in [(5u64, 13u64), (13, 17)] {
        let y = build_lps(p, q).unwrap();
        assert_eq!(y.degree(), (p + 1) as usize);
        // simplicity and symmetry are enforced by construction; re-assert
        // the degree count from raw adjacency
        for v in 0..y.n_vertices() {
            let nbrs = y.neighbors(v);
            assert_eq!(nbrs.len(), (p + 1) as usize);
            assert!(nbrs.windows(2).all(|w| w[0] < w[1]));
            assert!(!nbrs.contains(&v));
        }
        let lambda2 = y.lambda2();
        let bound = 2.0 * (p as f64).sqrt();
        assert!(
            lambda2 <= bound + 1e-6,
            "lps({p},{q}): lambda2 {lambda2} above {bound}"
        );
    }
    println!("[PASS] criterion 5: Cayley expanders are regular and meet the eigenvalue bound");
}

fn random_left_regular(rng: &mut ChaCha8Rng) -> RawBipartite {
    loop {
        let n_left = rng.gen_range(4..=12usize);
        let left_degree = rng.gen_range(1..=3usize);
        let n_right = rng.gen_range(1..=4usize);
        let mut right = vec![std::collections::BTreeSet::new(); n_right];
        let mut ok = true;
        'outer: for v in 0..n_left {
            for _ in 0..left_degree {
                let mut placed = false;
                for _ in 0..40 {
                    let j = rng.gen_range(0..n_right);
                    if right[j].insert(v) {
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if !ok {
            continue;
        }
        let d = (n_left * left_degree).div_ceil(n_right);
        if d > n_left {
            continue;
        }
        return RawBipartite {
            n_left,
            left_degree,
            right_adjacency: right.into_iter().map(|s| s.into_iter().collect()).collect(),
        };
    }
}

fn profile_of_raw(raw: &RawBipartite) -> Vec<usize> {
    // irregular input: enumerate neighborhoods by masks directly
    let n_right = raw.right_adjacency.len();
    assert!(n_right <= 20);
    let mut masks = vec![0u32; raw.n_left];
    for (j, nbrs) in raw.right_adjacency.iter().enumerate() {
        for &v in nbrs {
            masks[v] |= 1 << j;
        }
    }
    let size = 1usize << n_right;
    let mut count = vec![0u32; size];
    for &m in &masks {
        count[m as usize] += 1;
    }
    for bit in 0..n_right {
        for r in 0..size {
            if r & (1 << bit) != 0 {
                count[r] += count[r ^ (1 << bit)];
            }
        }
    }
    let mut best = vec![usize::MAX; raw.n_left + 1];
    for (r, &c) in count.iter().enumerate() {
        let pc = (r as u32).count_ones() as usize;
        let c = (c as usize).min(raw.n_left);
        best[c] = best[c].min(pc);
    }
    for s in (0..raw.n_left).rev() {
        best[s] = best[s].min(best[s + 1]);
    }
    (1..=raw.n_left).map(|s| best[s]).collect()
}

#[test]
fn criterion_06_right_regularization() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for case in 0..100 {
        let raw = random_left_regular(&mut rng);
        let g = right_regularize(&raw).unwrap();
        let n = raw.right_adjacency.len();
        assert!(g.n_right() <= 2 * n, "case {case}: right side doubled past 2n");
        assert_eq!(g.right_degree(), (raw.n_left * raw.left_degree).div_ceil(n));
        let mut left_deg = vec![0usize; raw.n_left];
        for nbrs in g.adjacency() {
            for &v in nbrs {
                left_deg[v] += 1;
            }
        }
        assert!(left_deg.iter().all(|&d| d <= 2 * raw.left_degree));
        let before = profile_of_raw(&raw);
        let after = profile_bruteforce_table(&g).unwrap();
        for m in 0..raw.n_left {
            assert!(
                after[m] >= before[m],
                "case {case}: profile dropped at m={}",
                m + 1
            );
        }
    }
    println!("[PASS] criterion 6: 100 regularizations keep degrees and expansion profiles");
}

fn dense_rank(m: &DMatrix<f64>) -> usize {
    m.clone().svd(false, false).rank(1e-9 * m.amax().max(1.0))
}

#[test]
fn criterion_07_codimension_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut equality = 0usize;
    for _ in 0..50 {
        let (g, inner) = loop {
            let d = rng.gen_range(2..=6usize);
            let n_right = rng.gen_range(1..=5usize);
            let n_left = rng.gen_range(d.max(4)..=40usize);
            let mut adjacency = Vec::new();
            for _ in 0..n_right {
                let mut s = std::collections::BTreeSet::new();
                while s.len() < d {
                    s.insert(rng.gen_range(0..n_left));
                }
                adjacency.push(s.into_iter().collect::<Vec<_>>());
            }
            if let Ok(g) = BipartiteGraph::new(n_left, n_right * d, d, adjacency) {
                let k_inner = rng.gen_range(1..d);
                let signs: Vec<Vec<i8>> = (0..k_inner)
                    .map(|_| (0..d).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect())
                    .collect();
                break (g, SignCheckMatrix::from_dense_signs(&signs, d).unwrap());
            }
        };
        let m = tanner_check_matrix(&g, &inner).unwrap();
        let n = g.n_left();
        let dim_inner = inner.cols() - dense_rank(&inner.to_dense());
        let dim = n - dense_rank(&m.to_dense());
        let bound = n as i64 - ((inner.cols() - dim_inner) * g.n_right()) as i64;
        assert!(dim as i64 >= bound);
        if dim as i64 == bound {
            equality += 1;
        }
    }
    println!(
        "[PASS] criterion 7: kernel dimension bound holds on 50 instances (equality in {equality}/50)"
    );
}

struct SoundnessInstance {
    graph: BipartiteGraph,
    inner: SignCheckMatrix,
}

fn soundness_instances() -> Vec<SoundnessInstance> {
    let parity = |d: usize| {
        SignCheckMatrix::new(1, d, (0..d as u32).map(|c| (0, c, 1)).collect()).unwrap()
    };
    vec![
        // every left vertex in exactly two size-4 neighborhoods
        SoundnessInstance {
            graph: BipartiteGraph::new(
                8,
                2,
                4,
                vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![0, 2, 4, 6], vec![1, 3, 5, 7]],
            )
            .unwrap(),
            inner: parity(4),
        },
        // same graph, two-row sign inner space
        SoundnessInstance {
            graph: BipartiteGraph::new(
                8,
                2,
                4,
                vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![0, 2, 4, 6], vec![1, 3, 5, 7]],
            )
            .unwrap(),
            inner: SignCheckMatrix::from_dense_signs(
                &[vec![1, 1, -1, 1], vec![1, -1, 1, 1]],
                4,
            )
            .unwrap(),
        },
        // disjoint blocks (left degree 1)
        SoundnessInstance {
            graph: BipartiteGraph::new(8, 1, 4, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]])
                .unwrap(),
            inner: parity(4),
        },
        // two-regular design on 16 vertices
        SoundnessInstance {
            graph: BipartiteGraph::new(
                16,
                2,
                4,
                vec![
                    vec![0, 1, 2, 3],
                    vec![4, 5, 6, 7],
                    vec![8, 9, 10, 11],
                    vec![12, 13, 14, 15],
                    vec![0, 4, 8, 12],
                    vec![1, 5, 9, 13],
                    vec![2, 6, 10, 14],
                    vec![3, 7, 11, 15],
                ],
            )
            .unwrap(),
            inner: parity(4),
        },
        // two-regular design with degree-3 neighborhoods
        SoundnessInstance {
            graph: BipartiteGraph::new(
                12,
                2,
                3,
                vec![
                    vec![0, 1, 2],
                    vec![3, 4, 5],
                    vec![6, 7, 8],
                    vec![9, 10, 11],
                    vec![0, 3, 6],
                    vec![1, 4, 9],
                    vec![2, 7, 10],
                    vec![5, 8, 11],
                ],
            )
            .unwrap(),
            inner: parity(3),
        },
    ]
}

#[test]
fn criterion_08_pushdown_soundness() {
    let instances = soundness_instances();
    assert!(instances.len() >= 5);
    for (idx, inst) in instances.iter().enumerate() {
        let inner_basis = kernel_basis(&inst.inner).unwrap();
        let eps = exact_spread(&inner_basis, 1.0).unwrap();
        assert!(eps > 0.0, "instance {idx}: inner space has vanishing spread");
        let inner_cert = SpreadCertificate::anchored(1.0, eps, Provenance::ExactOracle);
        let profile = ProfileBound::BruteForce {
            table: profile_bruteforce_table(&inst.graph).unwrap(),
            n_right: inst.graph.n_right(),
        };
        let composed = tanner_check_matrix(&inst.graph, &inst.inner).unwrap();
        let basis = kernel_basis(&composed).unwrap();
        assert!(basis.dim() > 0, "instance {idx}: trivial kernel");

        // single pushdown
        let c1 =
            pushdown_certificate(&profile, &inner_cert, inst.graph.max_left_degree(), 0.5)
                .unwrap();
        let exact1 = exact_spread(&basis, c1.t_high).unwrap();
        assert!(
            exact1 >= c1.epsilon - 1e-9,
            "instance {idx}: exact {exact1} under certified {}",
            c1.epsilon
        );

        // chained pushdown when the first one gained ground
        if c1.is_useful() {
            let c2 = pushdown_certificate(
                &profile,
                &inner_cert,
                inst.graph.max_left_degree(),
                c1.t_high,
            )
            .unwrap();
            let chain = compose_certificates(&[c1.clone(), c2.clone()]).unwrap();
            let exact2 = exact_spread(&basis, chain.t_high).unwrap();
            assert!(
                exact2 >= chain.epsilon - 1e-9,
                "instance {idx}: chained exact {exact2} under {}",
                chain.epsilon
            );
        }
    }
    println!("[PASS] criterion 8: pushdown certificates never overclaim on {} small instances", instances.len());
}

#[test]
fn criterion_09_certificate_arithmetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for case in 0..1000 {
        let n = rng.gen_range(8..100_000usize);
        let t = rng.gen_range(0.5..n as f64 / 2.0);
        let eps = rng.gen_range(0.01..1.0f64);
        let cert = SpreadCertificate::anchored(t, eps, Provenance::ProvedArithmetic);
        let (upper, _) = spread_to_distortion(&cert, n).unwrap();
        let direct = (n as f64 / t).sqrt() * eps.powi(-2);
        assert!((upper - direct).abs() <= 1e-9 * direct, "case {case}");

        let delta = rng.gen_range(1.0..100.0f64);
        let back = distortion_to_spread(delta, n).unwrap();
        assert!((back.t_high - n as f64 / (2.0 * delta * delta)).abs() <= 1e-9);
        assert!((back.epsilon - 0.25 / delta).abs() <= 1e-12);

        // random valid chain composes to the product
        let len = rng.gen_range(1..6usize);
        let mut t_cur = rng.gen_range(0.0..0.5);
        let t0 = t_cur;
        let mut chain = Vec::new();
        let mut product = 1.0f64;
        for _ in 0..len {
            let next = t_cur + rng.gen_range(0.01..50.0);
            let e = rng.gen_range(0.05..1.0f64);
            product *= e;
            chain.push(SpreadCertificate::relative(t_cur, next, e, Provenance::ProvedArithmetic));
            t_cur = next;
        }
        let composed = compose_certificates(&chain).unwrap();
        assert_eq!(composed.t_low, t0);
        assert_eq!(composed.t_high, t_cur);
        assert!((composed.epsilon - product).abs() <= 1e-12 * product.max(1e-12));

        // rejected when the chain is broken or runs backwards
        if len >= 2 {
            let mut broken = chain.clone();
            broken[1].t_low += 0.5;
            assert!(compose_certificates(&broken).is_err(), "case {case}: broken accepted");
            let mut reversed = chain.clone();
            reversed.reverse();
            assert!(compose_certificates(&reversed).is_err(), "case {case}: reversed accepted");
        }
    }
    println!("[PASS] criterion 9: 1000 random tuples match direct recomputation; broken chains rejected");
}

#[test]
fn criterion_10_end_to_end_construction() {
    let dir = tempdir("c10");
    let out1 = dir.join("a.check");
    let out2 = dir.join("b.check");
    for out in [&out1, &out2] {
        run_ok(&[
            "construct",
            "--N",
            "1024",
            "--eta",
            "0.5",
            "--mode",
            "thm1-explicit",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    let bytes1 = std::fs::read(&out1).unwrap();
    let bytes2 = std::fs::read(&out2).unwrap();
    assert_eq!(bytes1, bytes2, "matrix bytes differ across runs");
    let rep1 = std::fs::read(dir.join("a.check.report")).unwrap();
    let rep2 = std::fs::read(dir.join("b.check.report")).unwrap();
    assert_eq!(rep1, rep2, "report bytes differ across runs");

    let matrix = SignCheckMatrix::parse_text(std::str::from_utf8(&bytes1).unwrap()).unwrap();
    assert!(matrix.rows() <= 512, "rows {} exceed eta N = 512", matrix.rows());
    assert_eq!(matrix.cols(), 1024);

    let analysis = dir.join("a.analysis");
    run_ok(&[
        "analyze",
        "--matrix",
        out1.to_str().unwrap(),
        "--out",
        analysis.to_str().unwrap(),
    ]);
    let report = Report::parse_text(&std::fs::read_to_string(&analysis).unwrap()).unwrap();
    let lower = report.get_f64("delta_lower").unwrap();
    let upper = report.get_f64("delta_upper").unwrap();
    assert!(lower >= 1.0);
    assert!(lower <= upper, "sandwich inverted: {lower} > {upper}");
    println!(
        "[PASS] criterion 10: deterministic construction at N=1024 ({} rows), sandwich {lower:.3} <= {upper:.3}",
        matrix.rows()
    );
}

#[test]
fn criterion_11a_basis_pursuit_unit_suite() {
    // zero measurements
    let m = DMatrix::from_row_slice(2, 4, &[1.0, -1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0]);
    let v = basis_pursuit(&m, &DVector::zeros(2), 1e-10, 1e-10).unwrap();
    assert!(v.amax() <= 1e-8);
    // 1x2 instance with known vertex optimum
    let m = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
    let v = basis_pursuit(&m, &DVector::from_vec(vec![2.0]), 1e-10, 1e-10).unwrap();
    assert!(v[0].abs() <= 1e-8 && (v[1] - 1.0).abs() <= 1e-8, "v = {v:?}");
    // identity rows pin the solution exactly
    let m = DMatrix::identity(5, 5);
    let y = DVector::from_vec(vec![0.5, -2.0, 0.0, 3.0, 1.0]);
    let v = basis_pursuit(&m, &y, 1e-10, 1e-10).unwrap();
    assert!((v - y).amax() <= 1e-8);
    println!("[PASS] criterion 11a: LP unit suite exact to 1e-8");
}

#[test]
fn criterion_11b_sparse_recovery_rate() {
    let dir = tempdir("c11b");
    let matrix = construct_reference_matrix(&dir);
    for s in [1usize, 2] {
        let curve = recovery_curve(&matrix, &[s], 200, 1111).unwrap();
        let rate = curve.points[0].rate;
        assert!(rate >= 0.99, "s={s}: rate {rate} below 0.99 over 200 trials");
    }
    println!("[PASS] criterion 11b: 1- and 2-sparse recovery at rate >= 0.99 over 200 trials");
}

/// Pinned after the first oracle run of the seeded curve below
/// (seed 20260810, 50 trials per point, grid 1..96): recovery is perfect
/// through s = 48, drops to 0.90 at s = 64 and to zero at s = 96.
const PINNED_TRANSITION_POINT: usize = 48;

#[test]
fn criterion_11c_recovery_curve_regression() {
    let dir = tempdir("c11c");
    let matrix = construct_reference_matrix(&dir);
    let grid = [1usize, 2, 4, 8, 16, 24, 32, 48, 64, 96];
    let curve = recovery_curve(&matrix, &grid, 50, 20260810).unwrap();
    let text = curve.write_text();
    let reparsed = RecoveryCurve::parse_text(&text).unwrap();
    assert_eq!(reparsed.points.len(), grid.len());
    // rates are non-increasing after isotonic smoothing
    let mut smoothed: Vec<f64> = curve.points.iter().map(|p| p.rate).collect();
    for i in (0..smoothed.len() - 1).rev() {
        smoothed[i] = smoothed[i].max(smoothed[i + 1]);
    }
    for (p, s) in curve.points.iter().zip(&smoothed) {
        assert!(p.rate <= s + 1e-12);
    }
    let transition = curve.transition_point(0.99).expect("at least s=1 must recover");
    assert_eq!(
        transition, PINNED_TRANSITION_POINT,
        "phase transition moved: curve\n{text}"
    );
    println!("[PASS] criterion 11c: recovery curve regression (transition at s = {transition})");
}

#[test]
fn criterion_12_seeded_mode_accounting() {
    let dir = tempdir("c12");
    for n in [4480usize, 8192] {
        let out1 = dir.join(format!("s{n}a.check"));
        let out2 = dir.join(format!("s{n}b.check"));
        for out in [&out1, &out2] {
            run_ok(&[
                "construct",
                "--N",
                &n.to_string(),
                "--eta",
                "0.5",
                "--mode",
                "thm2-seeded",
                "--seed",
                "7",
                "--out",
                out.to_str().unwrap(),
            ]);
        }
        assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
        let report = Report::parse_text(
            &std::fs::read_to_string(dir.join(format!("s{n}a.check.report"))).unwrap(),
        )
        .unwrap();
        let k: usize = report.require("k").unwrap().parse().unwrap();
        let d: usize = report.require("d").unwrap().parse().unwrap();
        let bits: usize = report.require("randomBitCount").unwrap().parse().unwrap();
        assert_eq!(bits, k * d, "N={n}: bit accounting off");
        assert!(bits <= d * d, "N={n}: bits exceed d^2");
        let rows: usize = report.require("rows").unwrap().parse().unwrap();
        assert!(rows as f64 <= 0.5 * n as f64);
    }
    println!("[PASS] criterion 12: seeded mode bit accounting exact and byte-deterministic");
}
