//! Mutually unbiased bases over the reals from quadratic bent functions,
//! the k x d sign matrix assembled from them, and the spread subspace
//! given by its kernel.
//!
//! The bent family is the trace construction: on F_2^a with a = 2s,
//! viewing an input as a pair (u, w) of GF(2^s) elements, the functions
//! f_lambda(u, w) = Tr(lambda u w) for lambda != 0 are bent and so is
//! every pairwise sum. That yields sqrt(k) - 1 functions, hence sqrt(k)
//! bases and admissible widths up to k^(3/2). The construction is
//! untrusted: every claimed property is verified before a value is
//! returned.

use crate::algebra::{is_bent, walsh_transform, BooleanFunction, Gf2mField, AlgebraError};
use crate::analysis::{Provenance, SpreadCertificate};
use crate::checkmat::SignCheckMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KerdockError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{0} is not a power of 4 (or is below 4)")]
    NotPowerOfFour(usize),
    #[error("dimension {k} exceeds the construction guard {max}")]
    TooLarge { k: usize, max: usize },
    #[error("width {d} outside admissible range [{k}, {max}] for {bases} bases")]
    WidthOutOfRange { d: usize, k: usize, max: usize, bases: usize },
    #[error("construction self-check failed: {0}")]
    SelfCheck(String),
}

const MAX_K: usize = 4096;

/// log4(k) when k is a power of 4 and at least 4.
fn log4(k: usize) -> Result<u32, KerdockError> {
    if k >= 4 && k.is_power_of_two() && k.trailing_zeros().is_multiple_of(2) {
        Ok(k.trailing_zeros() / 2)
    } else {
        Err(KerdockError::NotPowerOfFour(k))
    }
}

/// Quadratic bent functions whose pairwise sums are bent; both properties
/// are checked exhaustively at construction.
#[derive(Debug, Clone)]
pub struct BentFamily {
    k: usize,
    functions: Vec<BooleanFunction>,
}

impl BentFamily {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn functions(&self) -> &[BooleanFunction] {
        &self.functions
    }
}

pub fn build_bent_family(k: usize) -> Result<BentFamily, KerdockError> {
    let s = log4(k)?;
    if k > MAX_K {
        return Err(KerdockError::TooLarge { k, max: MAX_K });
    }
    let arity = 2 * s;
    let field = Gf2mField::new(s)?;
    let mask = (1u64 << s) - 1;
    let mut functions = Vec::with_capacity((1 << s) - 1);
    for lambda in 1u64..(1 << s) {
        let table: Vec<u8> = (0..1usize << arity)
            .map(|x| {
                let u = (x as u64) >> s;
                let w = (x as u64) & mask;
                field.trace_bits(field.mul_bits(lambda, field.mul_bits(u, w))) as u8
            })
            .collect();
        functions.push(BooleanFunction::from_table(arity, table).expect("table sized 2^arity"));
    }
    for (i, f) in functions.iter().enumerate() {
        if !is_bent(f)? {
            return Err(KerdockError::SelfCheck(format!("member {i} is not bent")));
        }
        for (j, g) in functions.iter().enumerate().skip(i + 1) {
            let sum = f.xor(g)?;
            if !is_bent(&sum)? {
                return Err(KerdockError::SelfCheck(format!("sum of members {i} and {j} not bent")));
            }
        }
    }
    Ok(BentFamily { k, functions })
}

/// Family of k x k sign matrices, each orthogonal after scaling by
/// 1/sqrt(k), with cross-basis inner products of magnitude exactly
/// sqrt(k). Entry (x, a) of basis i is (-1)^(f_i(x) xor a.x), with f_0 = 0
/// giving the plain character basis.
#[derive(Debug, Clone)]
pub struct MubSet {
    k: usize,
    bases: Vec<Vec<i8>>, // row-major k x k sign matrices
}

fn dot_parity(a: usize, x: usize) -> u32 {
    (a & x).count_ones() & 1
}

impl MubSet {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_bases(&self) -> usize {
        self.bases.len()
    }

    /// Sign at coordinate `x` of column `a` of basis `i`.
    pub fn sign(&self, basis: usize, x: usize, a: usize) -> i8 {
        self.bases[basis][x * self.k + a]
    }

    pub fn basis(&self, i: usize) -> &[i8] {
        &self.bases[i]
    }
}

pub fn build_mub(k: usize) -> Result<MubSet, KerdockError> {
    let family = build_bent_family(k)?;
    let mut bases = Vec::with_capacity(family.functions.len() + 1);
    let zero = vec![0u8; k];
    let tables: Vec<&[u8]> = std::iter::once(zero.as_slice())
        .chain(family.functions.iter().map(|f| f.table()))
        .collect();
    for table in &tables {
        let mut signs = vec![0i8; k * k];
        for x in 0..k {
            let fx = table[x] as u32;
            for a in 0..k {
                signs[x * k + a] = if (fx ^ dot_parity(a, x)) == 0 { 1 } else { -1 };
            }
        }
        bases.push(signs);
    }
    let set = MubSet { k, bases };
    verify_mub(&set, &tables)?;
    Ok(set)
}

/// Exact integer verification of the unbiasedness invariants.
///
/// Within a basis, the Gram of the sign columns equals the Gram of the
/// character basis (row sign flips cancel), so checking the character
/// basis through the fast transform covers every basis. Cross-basis
/// entries equal Walsh coefficients of the XOR of the defining functions,
/// whose magnitudes the bent checks pin to sqrt(k); the identity itself is
/// spot-checked against direct summation, and small sets are verified
/// exhaustively.
fn verify_mub(set: &MubSet, tables: &[&[u8]]) -> Result<(), KerdockError> {
    let k = set.k;
    // character-basis orthogonality: transform of column a must be k e_a
    for a in 0..k {
        let col: Vec<u8> = (0..k).map(|x| dot_parity(a, x) as u8).collect();
        let f = BooleanFunction::from_table(k.trailing_zeros(), col).expect("sized table");
        let w = walsh_transform(&f);
        for (u, &c) in w.coefficients().iter().enumerate() {
            let want = if u == a { k as i64 } else { 0 };
            if c != want {
                return Err(KerdockError::SelfCheck(format!(
                    "character basis column {a} not orthogonal at {u}"
                )));
            }
        }
    }
    // cross-basis magnitudes via the Walsh spectra of XORed tables
    let root = (k as f64).sqrt() as i64;
    for i in 0..set.bases.len() {
        for j in (i + 1)..set.bases.len() {
            let diff: Vec<u8> = (0..k).map(|x| tables[i][x] ^ tables[j][x]).collect();
            let f = BooleanFunction::from_table(k.trailing_zeros(), diff).expect("sized table");
            let w = walsh_transform(&f);
            if !w.coefficients().iter().all(|&c| c * c == k as i64) {
                return Err(KerdockError::SelfCheck(format!(
                    "cross product of bases {i}, {j} has an entry with square != k"
                )));
            }
            // identity spot check: Walsh coefficient = direct column product
            let step = (k / 8).max(1);
            for a in (0..k).step_by(step) {
                for b in (0..k).step_by(step) {
                    let direct: i64 = (0..k)
                        .map(|x| (set.sign(i, x, a) as i64) * (set.sign(j, x, b) as i64))
                        .sum();
                    if direct.abs() != root || direct != w.coefficients()[a ^ b] {
                        return Err(KerdockError::SelfCheck(format!(
                            "direct product check failed at bases ({i},{j}) entry ({a},{b})"
                        )));
                    }
                }
            }
        }
    }
    // exhaustive integer check at small sizes
    if k <= 64 {
        for i in 0..set.bases.len() {
            for j in i..set.bases.len() {
                for a in 0..k {
                    for b in 0..k {
                        let s: i64 = (0..k)
                            .map(|x| (set.sign(i, x, a) as i64) * (set.sign(j, x, b) as i64))
                            .sum();
                        let ok = if i == j {
                            s == if a == b { k as i64 } else { 0 }
                        } else {
                            s * s == k as i64
                        };
                        if !ok {
                            return Err(KerdockError::SelfCheck(format!(
                                "exhaustive check failed at ({i},{j}) entry ({a},{b})"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Dense k x d sign matrix whose scaled columns are unit vectors with
/// pairwise coherence at most 1/sqrt(k) and operator norm at most
/// sqrt(ceil(d/k)).
#[derive(Debug, Clone)]
pub struct KerdockMatrix {
    k: usize,
    d: usize,
    signs: Vec<i8>, // row-major k x d
}

impl KerdockMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sign(&self, row: usize, col: usize) -> i8 {
        self.signs[row * self.d + col]
    }

    /// Integer inner product of two sign columns; the scaled coherence is
    /// |value| / k.
    pub fn column_product(&self, i: usize, j: usize) -> i64 {
        (0..self.k)
            .map(|x| (self.signs[x * self.d + i] as i64) * (self.signs[x * self.d + j] as i64))
            .sum()
    }

    /// Operator norm of the 1/sqrt(k)-scaled matrix, estimated by 200
    /// rounds of power iteration from the all-ones vector. Converges from
    /// below, so it can never overstate the norm.
    pub fn operator_norm_estimate(&self) -> f64 {
        let k = self.k;
        let d = self.d;
        let mut v = vec![1.0f64; k];
        let mut w = vec![0.0f64; d];
        let mut u = vec![0.0f64; k];
        let mut lambda = 0.0;
        for _ in 0..200 {
            for (c, wc) in w.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (x, vx) in v.iter().enumerate() {
                    acc += self.signs[x * d + c] as f64 * vx;
                }
                *wc = acc;
            }
            for (x, ux) in u.iter_mut().enumerate() {
                let mut acc = 0.0;
                let row = &self.signs[x * d..(x + 1) * d];
                for (s, wc) in row.iter().zip(&w) {
                    acc += *s as f64 * wc;
                }
                *ux = acc / k as f64;
            }
            let vv: f64 = v.iter().map(|a| a * a).sum();
            let uv: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            lambda = uv / vv;
            let norm = u.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm <= 1e-300 {
                return 0.0;
            }
            for (vx, ux) in v.iter_mut().zip(&u) {
                *vx = ux / norm;
            }
        }
        lambda.max(0.0).sqrt()
    }

    /// The sign pattern as a check matrix on R^d (kernel unchanged by the
    /// 1/sqrt(k) scaling).
    pub fn to_check_matrix(&self) -> SignCheckMatrix {
        let mut entries = Vec::with_capacity(self.k * self.d);
        for r in 0..self.k {
            for c in 0..self.d {
                entries.push((r as u32, c as u32, self.signs[r * self.d + c]));
            }
        }
        SignCheckMatrix::new(self.k, self.d, entries).expect("dense sign matrix is valid")
    }
}

/// Columns of the first bases, in order, truncated to width d.
pub fn assemble_matrix(k: usize, d: usize) -> Result<KerdockMatrix, KerdockError> {
    let mub = build_mub(k)?;
    let max_d = mub.num_bases() * k;
    if d < k || d > max_d {
        return Err(KerdockError::WidthOutOfRange { d, k, max: max_d, bases: mub.num_bases() });
    }
    let mut signs = vec![0i8; k * d];
    for col in 0..d {
        let basis = col / k;
        let a = col % k;
        for x in 0..k {
            signs[x * d + col] = mub.sign(basis, x, a);
        }
    }
    let m = KerdockMatrix { k, d, signs };
    let bound = (d as f64 / k as f64).ceil().sqrt();
    let estimate = m.operator_norm_estimate();
    if estimate > bound + 1e-9 {
        return Err(KerdockError::SelfCheck(format!(
            "operator norm estimate {estimate} exceeds bound {bound}"
        )));
    }
    if d <= 256 {
        for i in 0..d {
            for j in (i + 1)..d {
                let s = m.column_product(i, j);
                let same_basis = i / k == j / k;
                let ok = if same_basis { s == 0 } else { s * s == k as i64 };
                if !ok {
                    return Err(KerdockError::SelfCheck(format!(
                        "column coherence check failed at ({i},{j}): product {s}"
                    )));
                }
            }
        }
    }
    Ok(m)
}

/// The kernel of the assembled sign matrix together with its certificate.
#[derive(Debug, Clone)]
pub struct LocalSubspace {
    pub matrix: KerdockMatrix,
    pub check: SignCheckMatrix,
    pub certificate: SpreadCertificate,
    /// d = k means a square orthogonal matrix: the kernel is {0} and the
    /// certificate is vacuous. Callers must not use such a space.
    pub degenerate: bool,
}

/// Explicit spread subspace of R^d with codimension k: the kernel of the
/// assembled matrix, certified (sqrt(k)/2, (1/4) sqrt(k/d))-spread via the
/// near-orthogonal-columns argument.
pub fn local_subspace(k: usize, d: usize) -> Result<LocalSubspace, KerdockError> {
    let matrix = assemble_matrix(k, d)?;
    let check = matrix.to_check_matrix();
    let t = (k as f64).sqrt() / 2.0;
    let eps = 0.25 * (k as f64 / d as f64).sqrt();
    let certificate = SpreadCertificate::anchored(t, eps, Provenance::ProvedArithmetic)
        .with_note(format!(
            "near-orthogonal columns: coherence 1/sqrt({k}), norm <= sqrt(ceil({d}/{k}))"
        ));
    Ok(LocalSubspace { check, certificate, degenerate: d == k, matrix })
}

/// Number of bases the default family provides, hence the admissible width
/// cap bases * k. A larger family widens the range without interface
/// changes.
pub fn num_bases(k: usize) -> Result<usize, KerdockError> {
    let s = log4(k)?;
    Ok(1usize << s)
}
