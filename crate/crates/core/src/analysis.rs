//! Spread/distortion calculus: certificates with provenance, conversion
//! rules, composition, the expander pushdown rule, an exact small-scale
//! spread oracle, and witnessed distortion lower bounds.
//!
//! A subspace X of R^n is (t, eps)-spread when every unit vector keeps
//! l2-mass at least eps outside any t coordinates. The relative form
//! (t, T, eps) compares the mass left after deleting T coordinates to the
//! mass left after deleting t. Certificates store the relative form; the
//! absolute form is the anchored case t <= 1/2.

use crate::checkmat::SignCheckMatrix;
use crate::expanders::ProfileBound;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("ambient dimension {0} exceeds dense analysis guard {1}")]
    AnalysisGuard(usize, usize),
    #[error("subset enumeration C({n}, {t}) exceeds budget {budget}")]
    EnumerationGuard { n: usize, t: usize, budget: u128 },
    #[error("certificate is not anchored: t = {0} > 1/2")]
    NotAnchored(f64),
    #[error("distortion must be >= 1, got {0}")]
    DistortionBelowOne(f64),
    #[error("cannot compose an empty certificate list")]
    EmptyComposition,
    #[error("broken certificate chain at position {0}: T = {1} but next t = {2}")]
    BrokenChain(usize, f64, f64),
    #[error("certificate subset sizes must be nondecreasing, got {0} after {1}")]
    DecreasingChain(f64, f64),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("spread value {0} too small for a distortion bound")]
    VanishingSpread(f64),
}

/// How a certified quantity was established, ordered from strongest to
/// weakest. Composition takes the weakest member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    ProvedArithmetic,
    ExactOracle,
    Sampled,
    AssumedConstant,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Provenance::ProvedArithmetic => "proved-arithmetic",
            Provenance::ExactOracle => "exact-oracle",
            Provenance::Sampled => "sampled",
            Provenance::AssumedConstant => "assumed-constant",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Provenance {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "proved-arithmetic" => Ok(Provenance::ProvedArithmetic),
            "exact-oracle" => Ok(Provenance::ExactOracle),
            "sampled" => Ok(Provenance::Sampled),
            "assumed-constant" => Ok(Provenance::AssumedConstant),
            other => Err(format!("unknown provenance `{other}`")),
        }
    }
}

/// A (t, T, eps) spread certificate with provenance and rule trail.
/// The absolute (t, eps) form is stored anchored as (0, t, eps).
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadCertificate {
    pub t_low: f64,
    pub t_high: f64,
    pub epsilon: f64,
    pub provenance: Provenance,
    pub trail: Vec<String>,
}

impl SpreadCertificate {
    pub fn anchored(t: f64, epsilon: f64, provenance: Provenance) -> Self {
        debug_assert!(epsilon > 0.0 && epsilon <= 1.0);
        SpreadCertificate { t_low: 0.0, t_high: t, epsilon, provenance, trail: Vec::new() }
    }

    pub fn relative(t_low: f64, t_high: f64, epsilon: f64, provenance: Provenance) -> Self {
        debug_assert!(t_low <= t_high);
        debug_assert!(epsilon > 0.0 && epsilon <= 1.0);
        SpreadCertificate { t_low, t_high, epsilon, provenance, trail: Vec::new() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.trail.push(note.into());
        self
    }

    /// Anchored certificates (t <= 1/2) are equivalent to the absolute
    /// (T, eps)-spread statement.
    pub fn is_anchored(&self) -> bool {
        self.t_low <= 0.5
    }

    /// A pushdown output is useful only when it moved the subset size up.
    pub fn is_useful(&self) -> bool {
        self.t_high > self.t_low
    }
}

/// Dense orthonormal basis of ker(A).
#[derive(Debug, Clone)]
pub struct KernelBasis {
    ambient: usize,
    basis: DMatrix<f64>,
}

pub const DEFAULT_ANALYSIS_MAX_N: usize = 4096;
pub const DEFAULT_ENUM_BUDGET: u128 = 1_000_000;

/// Singular values below this relative cutoff count as zero when deciding
/// rank.
const RANK_REL_CUTOFF: f64 = 1e-7;

impl KernelBasis {
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projection of x onto the subspace.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * x)
    }

    /// Construct a basis from an explicit orthonormal matrix (columns span
    /// the subspace). Used by tests and by subspaces given directly.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        let ambient = basis.nrows();
        for i in 0..basis.ncols() {
            for j in i..basis.ncols() {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = basis.column(i).dot(&basis.column(j));
                assert!((got - want).abs() <= 1e-9, "basis not orthonormal");
            }
        }
        KernelBasis { ambient, basis }
    }
}

pub fn kernel_basis(a: &SignCheckMatrix) -> Result<KernelBasis, AnalysisError> {
    kernel_basis_with_guard(a, DEFAULT_ANALYSIS_MAX_N)
}

/// Orthonormal kernel basis via eigendecomposition of A^T A; deterministic
/// given A. Guarded: dense factorization only up to `max_n` columns.
pub fn kernel_basis_with_guard(
    a: &SignCheckMatrix,
    max_n: usize,
) -> Result<KernelBasis, AnalysisError> {
    let n = a.cols();
    if n > max_n {
        return Err(AnalysisError::AnalysisGuard(n, max_n));
    }
    let dense = a.to_dense();
    let gram = dense.transpose() * &dense;
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).expect("finite eigenvalues")
    });
    let sigma_max = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.max(0.0))).sqrt();
    let cutoff = RANK_REL_CUTOFF * sigma_max;
    let kernel_cols: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| eig.eigenvalues[i].max(0.0).sqrt() <= cutoff)
        .collect();
    let mut basis = DMatrix::zeros(n, kernel_cols.len());
    for (out, &i) in kernel_cols.iter().enumerate() {
        basis.set_column(out, &eig.eigenvectors.column(i));
    }
    // kernel residual must vanish; anything else is an implementation bug
    let residual = (&dense * &basis).abs().max();
    assert!(
        residual <= 1e-8 * (a.rows().max(1) as f64),
        "kernel residual {residual} too large"
    );
    Ok(KernelBasis { ambient: n, basis })
}

pub(crate) fn binomial_capped(n: usize, k: usize, cap: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap {
            return cap + 1;
        }
    }
    acc
}

/// Largest eigenvalue of the Gram matrix of the selected basis rows. For a
/// basis with orthonormal columns, deleting rows S leaves a matrix whose
/// smallest singular value is sqrt(1 - lambda_max(Gram_S)).
fn deleted_sigma_min(basis: &DMatrix<f64>, subset: &[usize]) -> f64 {
    let t = subset.len();
    let lam_max = match t {
        0 => 0.0,
        1 => basis.row(subset[0]).norm_squared(),
        2 => {
            let g11 = basis.row(subset[0]).norm_squared();
            let g22 = basis.row(subset[1]).norm_squared();
            let g12 = basis.row(subset[0]).dot(&basis.row(subset[1]));
            let mid = (g11 + g22) / 2.0;
            let rad = ((g11 - g22) / 2.0).hypot(g12);
            mid + rad
        }
        _ => {
            let mut gram = DMatrix::zeros(t, t);
            for i in 0..t {
                for j in i..t {
                    let v = basis.row(subset[i]).dot(&basis.row(subset[j]));
                    gram[(i, j)] = v;
                    gram[(j, i)] = v;
                }
            }
            gram.symmetric_eigenvalues().max()
        }
    };
    (1.0 - lam_max).max(0.0).sqrt()
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k == 0 {
        f(&[]);
        return;
    }
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        // next lexicographic combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn exact_spread(basis: &KernelBasis, t: f64) -> Result<f64, AnalysisError> {
    exact_spread_with_budget(basis, t, DEFAULT_ENUM_BUDGET)
}

/// Exact spread oracle: minimum over all subsets |S| <= t of the smallest
/// singular value of the basis with rows S deleted. This grounds every
/// sampled claim in the system.
pub fn exact_spread_with_budget(
    basis: &KernelBasis,
    t: f64,
    budget: u128,
) -> Result<f64, AnalysisError> {
    let n = basis.ambient;
    let tf = t.floor().max(0.0) as usize;
    if basis.dim() == 0 {
        return Ok(1.0);
    }
    if tf == 0 {
        return Ok(1.0);
    }
    if tf >= n {
        return Ok(0.0);
    }
    if binomial_capped(n, tf, budget) > budget {
        return Err(AnalysisError::EnumerationGuard { n, t: tf, budget });
    }
    let mut best = f64::INFINITY;
    for_each_combination(n, tf, |subset| {
        let s = deleted_sigma_min(&basis.basis, subset);
        if s < best {
            best = s;
        }
        best > 1e-15
    });
    Ok(best.min(1.0))
}

/// Sampled upper estimate of the spread: minimizes over `samples` random
/// subsets only, so the true epsilon is at most this value. Never a
/// certified lower bound. Falls back to exhaustive enumeration when that is
/// cheaper than sampling.
pub fn sampled_spread(basis: &KernelBasis, t: f64, samples: usize, seed: u64) -> f64 {
    let n = basis.ambient;
    let tf = t.floor().max(0.0) as usize;
    if basis.dim() == 0 || tf == 0 {
        return 1.0;
    }
    if tf >= n {
        return 0.0;
    }
    if binomial_capped(n, tf, samples as u128) <= samples as u128 {
        return exact_spread_with_budget(basis, t, samples as u128 + 1)
            .expect("within budget by construction");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    let mut subset = Vec::with_capacity(tf);
    for _ in 0..samples {
        subset.clear();
        // Floyd's algorithm for a uniform t-subset
        for j in (n - tf)..n {
            let x = rng.gen_range(0..=j);
            if subset.contains(&x) {
                subset.push(j);
            } else {
                subset.push(x);
            }
        }
        let s = deleted_sigma_min(&basis.basis, &subset);
        if s < best {
            best = s;
        }
    }
    best.min(1.0)
}

/// Anchored (t, eps)-spread gives distortion at most sqrt(N/t) / eps^2.
pub fn spread_to_distortion(
    cert: &SpreadCertificate,
    n: usize,
) -> Result<(f64, Vec<String>), AnalysisError> {
    if !cert.is_anchored() {
        return Err(AnalysisError::NotAnchored(cert.t_low));
    }
    if cert.t_high <= 0.0 {
        return Err(AnalysisError::InvalidCertificate("t must be positive".into()));
    }
    if cert.epsilon <= 1e-12 {
        return Err(AnalysisError::VanishingSpread(cert.epsilon));
    }
    let bound = (n as f64 / cert.t_high).sqrt() / (cert.epsilon * cert.epsilon);
    let mut trail = cert.trail.clone();
    trail.push(format!(
        "distortion <= sqrt(N/t)/eps^2 with N={n} t={} eps={}",
        cert.t_high, cert.epsilon
    ));
    Ok((bound, trail))
}

/// Distortion D gives an (N/(2 D^2), 1/(4 D))-spread certificate.
pub fn distortion_to_spread(delta: f64, n: usize) -> Result<SpreadCertificate, AnalysisError> {
    if !delta.is_finite() || delta < 1.0 {
        return Err(AnalysisError::DistortionBelowOne(delta));
    }
    let t = n as f64 / (2.0 * delta * delta);
    let eps = 1.0 / (4.0 * delta);
    Ok(SpreadCertificate::anchored(t, eps, Provenance::ProvedArithmetic)
        .with_note(format!("from distortion bound {delta} on N={n}")))
}

/// Chained relative certificates compose: consecutive T_i = t_(i+1) with
/// nondecreasing subset sizes yield (t_0, T_r, product of eps).
pub fn compose_certificates(
    certs: &[SpreadCertificate],
) -> Result<SpreadCertificate, AnalysisError> {
    let first = certs.first().ok_or(AnalysisError::EmptyComposition)?;
    let mut eps = 1.0f64;
    let mut provenance = Provenance::ProvedArithmetic;
    let mut prev_t_high = first.t_low;
    for (i, c) in certs.iter().enumerate() {
        if c.t_low < prev_t_high {
            return Err(AnalysisError::DecreasingChain(c.t_low, prev_t_high));
        }
        if i > 0 && c.t_low != prev_t_high {
            return Err(AnalysisError::BrokenChain(i, prev_t_high, c.t_low));
        }
        if c.t_high < c.t_low {
            return Err(AnalysisError::InvalidCertificate(format!(
                "certificate {i} has t > T"
            )));
        }
        eps *= c.epsilon;
        provenance = provenance.max(c.provenance);
        prev_t_high = c.t_high;
    }
    let mut out = SpreadCertificate::relative(first.t_low, prev_t_high, eps, provenance);
    out.trail = certs.iter().flat_map(|c| c.trail.iter().cloned()).collect();
    out.trail.push(format!("composed {} certificates", certs.len()));
    Ok(out)
}

/// Pushdown rule: an (N, n, D, d) graph with expansion profile bound
/// `profile` and a (t, eps)-spread inner space certify that the composed
/// subspace is (T0, (t/D) Lambda(T0), eps/sqrt(2D))-spread. When the
/// profile is too weak to move T0 up, the output is clamped to (T0, T0, .)
/// and flagged in the trail as not useful.
pub fn pushdown_certificate(
    profile: &ProfileBound,
    inner: &SpreadCertificate,
    max_left_degree: usize,
    t0: f64,
) -> Result<SpreadCertificate, AnalysisError> {
    if !inner.is_anchored() {
        return Err(AnalysisError::NotAnchored(inner.t_low));
    }
    if t0 <= 0.0 {
        return Err(AnalysisError::InvalidCertificate("T0 must be positive".into()));
    }
    let d_left = max_left_degree.max(1) as f64;
    let raw_t = inner.t_high / d_left * profile.evaluate(t0);
    let eps = inner.epsilon / (2.0 * d_left).sqrt();
    let provenance = inner.provenance.max(profile.provenance());
    let useful = raw_t > t0;
    let mut cert =
        SpreadCertificate::relative(t0, raw_t.max(t0), eps, provenance);
    cert.trail = inner.trail.clone();
    cert.trail.push(format!(
        "pushdown: T0={t0} Lambda>={} D={max_left_degree} -> T={raw_t}{}",
        profile.evaluate(t0),
        if useful { "" } else { " (not useful, clamped)" }
    ));
    Ok(cert)
}

/// Witnessed lower bound on the distortion sqrt(N) ||x||_2 / ||x||_1.
#[derive(Debug, Clone)]
pub struct DistortionBound {
    pub n: usize,
    pub lower: f64,
    pub witness: DVector<f64>,
    pub witness_sparsity: usize,
    pub upper: Option<f64>,
}

fn ratio(n: usize, x: &DVector<f64>) -> f64 {
    let l1 = x.iter().map(|v| v.abs()).sum::<f64>();
    if l1 <= 1e-300 {
        return 1.0;
    }
    (n as f64).sqrt() * x.norm() / l1
}

fn sparsity(x: &DVector<f64>) -> usize {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0;
    }
    x.iter().filter(|v| v.abs() > 1e-8 * max).count()
}

/// Search for a high-ratio witness inside the subspace: coordinate-vector
/// projections, random sparse projections at dyadic sparsities, and local
/// refinement by projected sign-shrinkage. Every reported value comes from
/// a residual-checked witness, so it is always a valid lower bound.
pub fn distortion_lower_bound(
    basis: &KernelBasis,
    budget: usize,
    seed: u64,
) -> DistortionBound {
    let n = basis.ambient;
    if basis.dim() == 0 {
        return DistortionBound {
            n,
            lower: 1.0,
            witness: DVector::zeros(n),
            witness_sparsity: 0,
            upper: None,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_ratio = 1.0;
    let mut best: DVector<f64> = basis.basis.column(0).into_owned();
    let consider = |x: &DVector<f64>, best_ratio: &mut f64, best: &mut DVector<f64>| {
        let norm = x.norm();
        if norm <= 1e-12 {
            return;
        }
        let r = ratio(n, x);
        if r > *best_ratio {
            *best_ratio = r;
            *best = x / norm;
        }
    };

    // coordinate-vector projections: column i of B B^T is B * row_i(B)^T
    for i in 0..n {
        let x = &basis.basis * basis.basis.row(i).transpose();
        consider(&x, &mut best_ratio, &mut best);
    }

    // random sparse projections at dyadic sparsities
    let mut sparse_budget = budget;
    let mut s = 1usize;
    while sparse_budget > 0 {
        for _ in 0..budget.div_ceil(8).max(1) {
            if sparse_budget == 0 {
                break;
            }
            sparse_budget -= 1;
            let mut v = DVector::zeros(n);
            for _ in 0..s.min(n) {
                let i = rng.gen_range(0..n);
                v[i] += if rng.gen::<bool>() { 1.0 } else { -1.0 };
            }
            let x = basis.project(&v);
            consider(&x, &mut best_ratio, &mut best);
        }
        s *= 2;
        if s > n {
            s = 1;
        }
    }

    // local refinement: x <- normalize(project(sign_shrink(x)))
    let mut x = best.clone();
    for _ in 0..20 {
        let theta = 0.5 * x.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
        let shrunk = DVector::from_iterator(
            n,
            x.iter().map(|&v| v.signum() * (v.abs() - theta).max(0.0)),
        );
        let projected = basis.project(&shrunk);
        if projected.norm() <= 1e-12 {
            break;
        }
        x = &projected / projected.norm();
        consider(&x, &mut best_ratio, &mut best);
    }

    // witness must lie in the subspace
    let residual = (&best - basis.project(&best)).abs().max();
    assert!(residual <= 1e-7, "witness left the subspace: residual {residual}");

    DistortionBound {
        n,
        lower: best_ratio,
        witness_sparsity: sparsity(&best),
        witness: best,
        upper: None,
    }
}
