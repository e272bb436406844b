//! Sparse-recovery demonstration layer: basis pursuit (minimum l1 norm
//! subject to exact measurements) solved by a deterministic
//! predictor-corrector interior-point method, the best-k-term
//! approximation error, and seeded recovery experiments.
//!
//! The decoder solves min sum(u) s.t. -u <= v <= u, Mv = y. Substituting
//! v+ = (u+v)/2, v- = (u-v)/2 turns that split into the standard form
//! min 1'(v+, v-) s.t. [M -M](v+, v-) = y with nonnegative variables,
//! which is what the solver works on.

use crate::checkmat::SignCheckMatrix;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SensingError {
    #[error("measurement dimension {got} does not match matrix rows {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("infeasible measurements: least-squares residual {residual:.3e} exceeds tolerance")]
    Infeasible { residual: f64 },
    #[error("interior point did not converge in {iters} iterations (gap {gap:.3e})")]
    NonConvergence { iters: usize, gap: f64 },
    #[error("empty experiment: {0}")]
    EmptyExperiment(String),
    #[error("support size {s} outside [1, {n}]")]
    BadSupport { s: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub const DEFAULT_TOL_FEAS: f64 = 1e-8;
pub const DEFAULT_TOL_OPT: f64 = 1e-7;

/// Independent rows of `m` by Gaussian elimination with partial pivoting;
/// deterministic.
fn independent_rows(m: &DMatrix<f64>) -> Vec<usize> {
    let mut work = m.clone();
    let (rows, cols) = work.shape();
    let mut kept = Vec::new();
    let mut row_of = (0..rows).collect::<Vec<_>>();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (pivot, best) = (r..rows)
            .map(|i| (i, work[(i, c)].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if best <= 1e-9 {
            continue;
        }
        work.swap_rows(r, pivot);
        row_of.swap(r, pivot);
        kept.push(row_of[r]);
        for i in (r + 1)..rows {
            let f = work[(i, c)] / work[(r, c)];
            if f != 0.0 {
                for j in c..cols {
                    work[(i, j)] -= f * work[(r, j)];
                }
            }
        }
        r += 1;
    }
    kept.sort_unstable();
    kept
}

/// Basis pursuit: the minimum-l1-norm vector consistent with y = Mv.
/// Deterministic given inputs. Redundant rows are dropped before solving;
/// measurements outside the range of M are reported as infeasible,
/// distinctly from solver non-convergence.
pub fn basis_pursuit(
    m: &DMatrix<f64>,
    y: &DVector<f64>,
    tol_feas: f64,
    tol_opt: f64,
) -> Result<DVector<f64>, SensingError> {
    let n = m.ncols();
    if y.len() != m.nrows() {
        return Err(SensingError::DimensionMismatch { got: y.len(), want: m.nrows() });
    }
    // no constraints, or zero measurements: zero attains objective zero
    if m.nrows() == 0 {
        return Ok(DVector::zeros(n));
    }
    let y_scale = 1.0 + y.amax();
    if y.amax() == 0.0 {
        return Ok(DVector::zeros(n));
    }

    let kept = independent_rows(m);
    let mut a = DMatrix::zeros(kept.len(), n);
    let mut b = DVector::zeros(kept.len());
    for (i, &r) in kept.iter().enumerate() {
        a.set_row(i, &m.row(r));
        b[i] = y[r];
    }

    // feasibility: minimum-norm solution of the reduced system must satisfy
    // every original row
    let gram = &a * a.transpose();
    let chol = gram
        .clone()
        .cholesky()
        .or_else(|| {
            let ridge = 1e-12 * (gram.trace() / gram.nrows().max(1) as f64 + 1.0);
            (gram + DMatrix::identity(kept.len(), kept.len()) * ridge).cholesky()
        })
        .ok_or(SensingError::Infeasible { residual: f64::INFINITY })?;
    let w = chol.solve(&b);
    let v0 = a.transpose() * w;
    let residual = (m * &v0 - y).amax();
    if residual > tol_feas * y_scale {
        return Err(SensingError::Infeasible { residual });
    }

    let k = kept.len();
    let nn = 2 * n;
    // z = (v+, v-) >= 0; constraint matrix [A, -A]; objective all ones
    let mut z = DVector::from_element(nn, 1.0);
    let mut s = DVector::from_element(nn, 1.0);
    let mut lam = DVector::zeros(k);

    let apply_a = |z: &DVector<f64>| -> DVector<f64> {
        let zp = z.rows(0, n).into_owned();
        let zm = z.rows(n, n).into_owned();
        &a * (zp - zm)
    };
    let apply_at = |lam: &DVector<f64>| -> DVector<f64> {
        let at = a.transpose() * lam;
        let mut out = DVector::zeros(nn);
        out.rows_mut(0, n).copy_from(&at);
        out.rows_mut(n, n).copy_from(&(-&at));
        out
    };

    let max_iters = 300;
    let mut gap = f64::INFINITY;
    for _ in 0..max_iters {
        let r_p = &b - apply_a(&z);
        let r_d = DVector::from_element(nn, 1.0) - apply_at(&lam) - &s;
        let obj = z.sum();
        let dual_obj = b.dot(&lam);
        gap = (obj - dual_obj).abs() / (1.0 + obj.abs());
        if r_p.amax() <= tol_feas * y_scale && r_d.amax() <= tol_opt && gap <= tol_opt {
            let v = z.rows(0, n) - z.rows(n, n);
            return Ok(v.into_owned());
        }

        let mu = z.dot(&s) / nn as f64;
        let d: DVector<f64> = z.component_div(&s).map(|x| x.min(1e16));
        // normal matrix A diag(d) A^T = A (d+ + d-) A^T on the v-variables
        let dsum = d.rows(0, n) + d.rows(n, n);
        let mut scaled = a.clone();
        for c in 0..n {
            let f = dsum[c];
            for r in 0..k {
                scaled[(r, c)] *= f;
            }
        }
        let normal = &scaled * a.transpose();
        let chol = match normal.clone().cholesky() {
            Some(c) => c,
            None => {
                let ridge = 1e-12 * (normal.trace() / k.max(1) as f64 + 1.0);
                match (normal + DMatrix::identity(k, k) * ridge).cholesky() {
                    Some(c) => c,
                    None => break,
                }
            }
        };

        let solve_for = |rc: &DVector<f64>,
                         r_p: &DVector<f64>,
                         r_d: &DVector<f64>|
         -> (DVector<f64>, DVector<f64>, DVector<f64>) {
            // K dlam = r_p + A (d .* r_d - rc ./ s)
            let inner = d.component_mul(r_d) - rc.component_div(&s);
            let rhs = r_p + apply_a(&inner);
            let dlam = chol.solve(&rhs);
            let dz = d.component_mul(&(apply_at(&dlam) - r_d)) + rc.component_div(&s);
            let ds = (rc - s.component_mul(&dz)).component_div(&z);
            (dlam, dz, ds)
        };

        let step_len = |x: &DVector<f64>, dx: &DVector<f64>| -> f64 {
            let mut alpha: f64 = 1.0;
            for i in 0..x.len() {
                if dx[i] < 0.0 {
                    alpha = alpha.min(-x[i] / dx[i]);
                }
            }
            alpha
        };

        // affine scaling step
        let rc_aff = -z.component_mul(&s);
        let (_, dz_aff, ds_aff) = solve_for(&rc_aff, &r_p, &r_d);
        let ap = step_len(&z, &dz_aff).min(1.0);
        let ad = step_len(&s, &ds_aff).min(1.0);
        let mu_aff = (&z + &dz_aff * ap).dot(&(&s + &ds_aff * ad)) / nn as f64;
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

        // corrected step
        let rc = DVector::from_element(nn, sigma * mu)
            - z.component_mul(&s)
            - dz_aff.component_mul(&ds_aff);
        let (dlam, dz, ds) = solve_for(&rc, &r_p, &r_d);
        let ap = (0.99 * step_len(&z, &dz)).min(1.0);
        let ad = (0.99 * step_len(&s, &ds)).min(1.0);
        z += dz * ap;
        lam += dlam * ad;
        s += ds * ad;
    }
    Err(SensingError::NonConvergence { iters: max_iters, gap })
}

/// l1 error of the best k-sparse approximation: the sum of all but the k
/// largest magnitudes.
pub fn sigma_k(x: &[f64], k: usize) -> f64 {
    if k >= x.len() {
        return 0.0;
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    mags[k..].iter().sum()
}

/// Measurement of a known signal through a sign matrix.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub y: DVector<f64>,
    pub x_true: DVector<f64>,
    pub provenance: String,
}

pub fn encode(m: &SignCheckMatrix, x: &DVector<f64>, provenance: impl Into<String>) -> Measurement {
    let xs: Vec<f64> = x.iter().copied().collect();
    let y = DVector::from_vec(m.apply(&xs));
    Measurement { y, x_true: x.clone(), provenance: provenance.into() }
}

/// Outcome of one decode attempt.
#[derive(Debug, Clone)]
pub struct RecoveryReport {
    pub support_size: usize,
    pub success: bool,
    pub relative_l2_error: f64,
    pub sigma_k_value: f64,
    /// ||x - v||_2 sqrt(k) / sigma_k(x)_1 when the approximation error is
    /// nonzero; reported, never asserted.
    pub stability_ratio: Option<f64>,
}

const SUCCESS_REL_TOL: f64 = 1e-6;

/// Draw a signal with uniform support of size `s` and entries of magnitude
/// 1 + uniform[0,1) with random signs, optionally perturbed by a dense
/// vector of prescribed l1 mass, then encode and decode it.
pub fn recovery_trial(
    m: &SignCheckMatrix,
    s: usize,
    noise_level: f64,
    seed: u64,
) -> Result<RecoveryReport, SensingError> {
    let n = m.cols();
    if s < 1 || s > n {
        return Err(SensingError::BadSupport { s, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = rand::seq::index::sample(&mut rng, n, s);
    let mut x = DVector::zeros(n);
    for i in support.iter() {
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        x[i] = sign * (1.0 + rng.gen::<f64>());
    }
    if noise_level > 0.0 {
        let mut noise = DVector::zeros(n);
        for i in 0..n {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            noise[i] = sign * rng.gen::<f64>();
        }
        let mass: f64 = noise.iter().map(|v| v.abs()).sum();
        if mass > 0.0 {
            noise *= noise_level / mass;
        }
        x += noise;
    }
    let measurement = encode(m, &x, format!("trial s={s} seed={seed}"));
    debug_assert!(
        m.rows() == 0 || (m.to_dense() * &x - &measurement.y).amax() <= 1e-10
    );
    let dense = m.to_dense();
    let v = basis_pursuit(&dense, &measurement.y, DEFAULT_TOL_FEAS, DEFAULT_TOL_OPT)?;
    let err = (&x - &v).norm();
    let x_norm = x.norm();
    let (rel, success) = if x_norm > 0.0 {
        (err / x_norm, err / x_norm <= SUCCESS_REL_TOL)
    } else {
        (v.norm(), v.norm() <= DEFAULT_TOL_FEAS)
    };
    let xs: Vec<f64> = x.iter().copied().collect();
    let sig = sigma_k(&xs, s);
    let stability_ratio = (sig > 1e-15).then(|| err * (s as f64).sqrt() / sig);
    Ok(RecoveryReport {
        support_size: s,
        success,
        relative_l2_error: rel,
        sigma_k_value: sig,
        stability_ratio,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub s: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RecoveryCurve {
    pub points: Vec<CurvePoint>,
}

impl RecoveryCurve {
    /// Largest support size with success rate at least `threshold` (after
    /// which the curve is treated as failed).
    pub fn transition_point(&self, threshold: f64) -> Option<usize> {
        self.points.iter().rev().find(|p| p.rate >= threshold).map(|p| p.s)
    }

    pub fn write_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            writeln!(out, "{} {} {} {:.6}", p.s, p.trials, p.successes, p.rate).unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, SensingError> {
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(SensingError::Parse {
                    line: i + 1,
                    msg: format!("expected `s trials successes rate`, got `{line}`"),
                });
            }
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| SensingError::Parse {
                    line: i + 1,
                    msg: format!("bad integer `{s}`"),
                })
            };
            let rate: f64 = f[3].parse().map_err(|_| SensingError::Parse {
                line: i + 1,
                msg: format!("bad rate `{}`", f[3]),
            })?;
            points.push(CurvePoint { s: parse(f[0])?, trials: parse(f[1])?, successes: parse(f[2])?, rate });
        }
        Ok(RecoveryCurve { points })
    }
}

fn trial_seed(seed: u64, s: usize, trial: usize) -> u64 {
    // splitmix-style mixing keeps per-trial streams independent of
    // scheduling order
    let mut x = seed
        ^ (s as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (trial as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Success fraction per support size over seeded independent trials.
/// s = 0 rows are vacuous successes (the zero signal decodes to zero).
pub fn recovery_curve(
    m: &SignCheckMatrix,
    s_grid: &[usize],
    trials_per_s: usize,
    seed: u64,
) -> Result<RecoveryCurve, SensingError> {
    if trials_per_s == 0 {
        return Err(SensingError::EmptyExperiment("trials per support size is zero".into()));
    }
    if s_grid.is_empty() {
        return Err(SensingError::EmptyExperiment("support grid is empty".into()));
    }
    let mut points = Vec::new();
    for &s in s_grid {
        let mut successes = 0usize;
        for t in 0..trials_per_s {
            if s == 0 {
                successes += 1;
                continue;
            }
            let report = recovery_trial(m, s, 0.0, trial_seed(seed, s, t))?;
            if report.success {
                successes += 1;
            }
        }
        points.push(CurvePoint {
            s,
            trials: trials_per_s,
            successes,
            rate: successes as f64 / trials_per_s as f64,
        });
    }
    Ok(RecoveryCurve { points })
}
