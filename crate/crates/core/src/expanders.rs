//! Unbalanced bipartite expanders: the spectral (Cayley-graph incidence)
//! family, the sum-product family on F_p^3, the right-regularization
//! transform, and expansion-profile tooling (certified lower bounds plus a
//! brute-force oracle for small instances).
//!
//! Graph text format (bit-exact, LF endings): header `GRAPH N n D d`, then
//! n lines each holding d space-separated ascending 0-based left indices.

use crate::algebra::{find_prime_pq, is_prime, AlgebraError};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExpanderError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("graph is not left-regular: vertex {vertex} has degree {got}, expected {want}")]
    NotLeftRegular { vertex: usize, got: usize, want: usize },
    #[error("target right degree {d} exceeds left vertex count {n_left}")]
    DegreeExceedsLeft { d: usize, n_left: usize },
    #[error("lps parameters invalid: {0}")]
    LpsParameters(String),
    #[error("lps construction self-check failed: {0}")]
    LpsSelfCheck(String),
    #[error("graph is not degree-regular: vertex {vertex} has degree {got}, expected {want}")]
    NotRegular { vertex: usize, got: usize, want: usize },
    #[error("brute-force profile refused: N={n_left} right={n_right} exceed guards (N <= {max_left} or right <= {max_right})")]
    ProfileGuard { n_left: usize, n_right: usize, max_left: usize, max_right: usize },
    #[error("profile argument m={0} outside (0, N]")]
    ProfileArgument(f64),
    #[error("sum-product needs N >= 8, got {0}")]
    SumProductTooSmall(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Right-regular unbalanced bipartite graph: N left vertices, n right
/// vertices, left degrees at most D, right degrees exactly d. For each
/// right vertex j the sorted neighbor list holds d distinct left indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_left: usize,
    max_left_degree: usize,
    right_degree: usize,
    adjacency: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(
        n_left: usize,
        max_left_degree: usize,
        right_degree: usize,
        adjacency: Vec<Vec<usize>>,
    ) -> Result<Self, ExpanderError> {
        let g = BipartiteGraph { n_left, max_left_degree, right_degree, adjacency };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), ExpanderError> {
        let mut left_deg = vec![0usize; self.n_left];
        for (j, nbrs) in self.adjacency.iter().enumerate() {
            if nbrs.len() != self.right_degree {
                return Err(ExpanderError::NotRegular {
                    vertex: j,
                    got: nbrs.len(),
                    want: self.right_degree,
                });
            }
            for w in nbrs.windows(2) {
                assert!(w[0] < w[1], "right vertex {j}: neighbors not sorted distinct");
            }
            for &v in nbrs {
                assert!(v < self.n_left, "right vertex {j}: left index {v} out of range");
                left_deg[v] += 1;
            }
        }
        if let Some((v, &got)) =
            left_deg.iter().enumerate().find(|&(_, &d)| d > self.max_left_degree)
        {
            return Err(ExpanderError::NotLeftRegular {
                vertex: v,
                got,
                want: self.max_left_degree,
            });
        }
        Ok(())
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.adjacency.len()
    }

    /// Guaranteed upper bound on left degrees (the realized maximum may be
    /// smaller).
    pub fn max_left_degree(&self) -> usize {
        self.max_left_degree
    }

    pub fn right_degree(&self) -> usize {
        self.right_degree
    }

    pub fn neighbors(&self, right: usize) -> &[usize] {
        &self.adjacency[right]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Left-to-right adjacency lists (derived).
    pub fn left_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_left];
        for (j, nbrs) in self.adjacency.iter().enumerate() {
            for &v in nbrs {
                adj[v].push(j);
            }
        }
        adj
    }

    pub fn write_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "GRAPH {} {} {} {}",
            self.n_left,
            self.adjacency.len(),
            self.max_left_degree,
            self.right_degree
        )
        .unwrap();
        for nbrs in &self.adjacency {
            let line: Vec<String> = nbrs.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, ExpanderError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| ExpanderError::Parse { line: 1, msg: "empty file".into() })?;
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 5 || f[0] != "GRAPH" {
            return Err(ExpanderError::Parse {
                line: 1,
                msg: format!("expected `GRAPH N n D d` header, got `{header}`"),
            });
        }
        let nums: Result<Vec<usize>, _> = f[1..].iter().map(|s| s.parse::<usize>()).collect();
        let nums = nums.map_err(|_| ExpanderError::Parse {
            line: 1,
            msg: "non-numeric header field".into(),
        })?;
        let (n_left, n_right, d_max, d) = (nums[0], nums[1], nums[2], nums[3]);
        let mut adjacency = Vec::with_capacity(n_right);
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<usize>, _> =
                line.split_whitespace().map(|s| s.parse::<usize>()).collect();
            let row = row.map_err(|_| ExpanderError::Parse {
                line: i + 1,
                msg: "non-numeric left index".into(),
            })?;
            adjacency.push(row);
        }
        if adjacency.len() != n_right {
            return Err(ExpanderError::Parse {
                line: 1,
                msg: format!("header claims n={n_right} right vertices, found {}", adjacency.len()),
            });
        }
        BipartiteGraph::new(n_left, d_max, d, adjacency)
    }
}

/// Bipartite graph that is left-regular but not yet right-regular; the
/// input shape of the regularization transform.
#[derive(Debug, Clone)]
pub struct RawBipartite {
    pub n_left: usize,
    pub left_degree: usize,
    /// For each right vertex, the sorted list of distinct left neighbors.
    pub right_adjacency: Vec<Vec<usize>>,
}

impl RawBipartite {
    fn check_left_regular(&self) -> Result<(), ExpanderError> {
        let mut deg = vec![0usize; self.n_left];
        for nbrs in &self.right_adjacency {
            for &v in nbrs {
                deg[v] += 1;
            }
        }
        for (v, &d) in deg.iter().enumerate() {
            if d != self.left_degree {
                return Err(ExpanderError::NotLeftRegular {
                    vertex: v,
                    got: d,
                    want: self.left_degree,
                });
            }
        }
        Ok(())
    }
}

/// Split-and-pad right-regularization. Splits each right vertex into
/// chunks of the target degree d = ceil(ND/n) (edges distributed to clones
/// in ascending left-index order), then pads each remainder vertex with
/// filler edges placed greedily on left vertices ordered by
/// (filler-degree, index). Output: n' <= 2n right vertices, right degree
/// exactly d, left degrees at most 2D, and an expansion profile at least
/// that of the input.
pub fn right_regularize(raw: &RawBipartite) -> Result<BipartiteGraph, ExpanderError> {
    raw.check_left_regular()?;
    let n_left = raw.n_left;
    let n_right = raw.right_adjacency.len().max(1);
    let total_edges = n_left * raw.left_degree;
    let d = total_edges.div_ceil(n_right).max(1);
    if d > n_left {
        return Err(ExpanderError::DegreeExceedsLeft { d, n_left });
    }

    let mut chunks: Vec<Vec<usize>> = Vec::new();
    let mut remainders: Vec<usize> = Vec::new(); // indices into `chunks`
    for nbrs in &raw.right_adjacency {
        let mut it = nbrs.chunks(d);
        // full chunks keep degree d; a trailing short chunk becomes a
        // remainder vertex awaiting fillers
        for chunk in &mut it {
            if chunk.len() == d {
                chunks.push(chunk.to_vec());
            } else {
                remainders.push(chunks.len());
                chunks.push(chunk.to_vec());
            }
        }
    }

    // greedy filler placement: least-loaded left vertex first
    let mut filler_load = vec![0usize; n_left];
    let mut pool: BTreeSet<(usize, usize)> = (0..n_left).map(|v| (0usize, v)).collect();
    for &ci in &remainders {
        let need = d - chunks[ci].len();
        let members: BTreeSet<usize> = chunks[ci].iter().copied().collect();
        let mut picked = Vec::with_capacity(need);
        for _ in 0..need {
            let choice = pool
                .iter()
                .find(|&&(_, v)| !members.contains(&v) && !picked.contains(&v))
                .copied()
                .ok_or(ExpanderError::DegreeExceedsLeft { d, n_left })?;
            pool.remove(&choice);
            let (load, v) = choice;
            filler_load[v] = load + 1;
            pool.insert((load + 1, v));
            picked.push(v);
        }
        chunks[ci].extend(picked);
        chunks[ci].sort_unstable();
    }

    let max_filler = filler_load.iter().copied().max().unwrap_or(0);
    assert!(
        max_filler <= raw.left_degree,
        "filler placement exceeded D new edges on a left vertex"
    );
    BipartiteGraph::new(n_left, 2 * raw.left_degree, d, chunks)
}

/// Simple undirected degree-regular graph.
#[derive(Debug, Clone)]
pub struct RegularGraph {
    degree: usize,
    adjacency: Vec<Vec<usize>>,
}

impl RegularGraph {
    pub fn new(degree: usize, adjacency: Vec<Vec<usize>>) -> Result<Self, ExpanderError> {
        for (v, nbrs) in adjacency.iter().enumerate() {
            if nbrs.len() != degree {
                return Err(ExpanderError::NotRegular { vertex: v, got: nbrs.len(), want: degree });
            }
            for w in nbrs.windows(2) {
                assert!(w[0] < w[1], "vertex {v}: neighbors not sorted distinct");
            }
            for &u in nbrs {
                assert!(u != v, "self loop at {v}");
                assert!(
                    adjacency[u].binary_search(&v).is_ok(),
                    "adjacency not symmetric at ({v}, {u})"
                );
            }
        }
        Ok(RegularGraph { degree, adjacency })
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn is_connected(&self) -> bool {
        let n = self.adjacency.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }

    /// Second largest adjacency eigenvalue (signed; this is the quantity
    /// the edge-count bound uses). Dense symmetric eigensolve up to 4000
    /// vertices, deterministic seeded Lanczos with 500 iterations above.
    pub fn lambda2(&self) -> f64 {
        let n = self.adjacency.len();
        if n <= 4000 {
            let mut m = DMatrix::zeros(n, n);
            for (u, nbrs) in self.adjacency.iter().enumerate() {
                for &v in nbrs {
                    m[(u, v)] = 1.0;
                }
            }
            let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
            ev[1]
        } else {
            self.lambda2_lanczos(500, 0xda7a5eed)
        }
    }

    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            let mut acc = 0.0;
            for &v in nbrs {
                acc += x[v];
            }
            out[u] = acc;
        }
    }

    fn lambda2_lanczos(&self, iters: usize, seed: u64) -> f64 {
        let n = self.adjacency.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut q: Vec<Vec<f64>> = Vec::new();
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        let mut w = vec![0.0; n];
        for _ in 0..iters.min(n) {
            self.matvec(&v, &mut w);
            let alpha: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            alphas.push(alpha);
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi -= alpha * vi;
            }
            // two full reorthogonalization passes; one is not enough once
            // the residual is small relative to the matrix scale
            for _ in 0..2 {
                for qv in q.iter().chain(std::iter::once(&v)) {
                    let c: f64 = qv.iter().zip(&w).map(|(a, b)| a * b).sum();
                    for (wi, qi) in w.iter_mut().zip(qv) {
                        *wi -= c * qi;
                    }
                }
            }
            let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            q.push(v.clone());
            // the Krylov space saturates once every distinct eigenvalue is
            // captured; continuing would amplify rounding noise
            if beta <= 1e-10 * self.degree as f64 {
                break;
            }
            betas.push(beta);
            v = w.iter().map(|x| x / beta).collect();
        }
        let k = alphas.len();
        let mut tri = DMatrix::zeros(k, k);
        for i in 0..k {
            tri[(i, i)] = alphas[i];
            if i + 1 < k {
                tri[(i, i + 1)] = betas[i];
                tri[(i + 1, i)] = betas[i];
            }
        }
        let mut ev: Vec<f64> = tri.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if ev.len() > 1 {
            ev[1]
        } else {
            ev[0]
        }
    }
}

fn legendre(a: u64, q: u64) -> i64 {
    let a = a % q;
    if a == 0 {
        return 0;
    }
    let mut r: u64 = 1;
    let mut base = a;
    let mut e = (q - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

type Mat2 = [u64; 4];

fn mat_mul(a: &Mat2, b: &Mat2, q: u64) -> Mat2 {
    [
        (a[0] * b[0] + a[1] * b[2]) % q,
        (a[0] * b[1] + a[1] * b[3]) % q,
        (a[2] * b[0] + a[3] * b[2]) % q,
        (a[2] * b[1] + a[3] * b[3]) % q,
    ]
}

fn mat_det(m: &Mat2, q: u64) -> u64 {
    ((m[0] * m[3]) % q + q * q - (m[1] * m[2]) % q) % q
}

fn mod_inv(a: u64, q: u64) -> u64 {
    // q prime
    let mut r: u64 = 1;
    let mut base = a % q;
    let mut e = q - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    r
}

/// Scale so the first nonzero entry (reading order) is 1: the canonical
/// representative of a projective matrix class.
fn mat_canon(m: &Mat2, q: u64) -> Mat2 {
    for &e in m.iter() {
        if e % q != 0 {
            let inv = mod_inv(e, q);
            return [m[0] * inv % q, m[1] * inv % q, m[2] * inv % q, m[3] * inv % q];
        }
    }
    unreachable!("zero matrix cannot be canonicalized")
}

/// Number of vertices the Cayley-graph construction will produce for the
/// prime pair (p, q), without building it.
pub fn lps_vertex_count(p: u64, q: u64) -> usize {
    let full = q * (q * q - 1);
    if legendre(p, q) == 1 {
        (full / 2) as usize
    } else {
        full as usize
    }
}

/// Explicit (p+1)-regular Cayley expander of the projective 2x2 group over
/// F_q, with generators from the p+1 integer quaternions of norm p. The
/// vertex set is the square-determinant-class subgroup when p is a
/// quadratic residue mod q and the full projective group otherwise. The
/// second eigenvalue satisfies lambda2 <= 2 sqrt(p).
pub fn build_lps(p: u64, q: u64) -> Result<RegularGraph, ExpanderError> {
    if !is_prime(p) || !is_prime(q) {
        return Err(ExpanderError::LpsParameters(format!("p={p}, q={q} must be prime")));
    }
    if p % 4 != 1 || q % 4 != 1 {
        return Err(ExpanderError::LpsParameters("p and q must be 1 mod 4".into()));
    }
    if p == q {
        return Err(ExpanderError::LpsParameters("p and q must be distinct".into()));
    }
    if q * q <= 4 * p {
        return Err(ExpanderError::LpsParameters(format!("need q > 2 sqrt(p): q={q}, p={p}")));
    }

    // i with i^2 = -1 mod q exists since q = 1 mod 4
    let iq = (1..q)
        .find(|&x| x * x % q == q - 1)
        .expect("square root of -1 exists for q = 1 mod 4");

    // quaternion generators: a odd positive, b, c, d even
    let mut gens: Vec<Mat2> = Vec::new();
    let r = (p as f64).sqrt() as i64 + 1;
    for a in (1..=r).step_by(2) {
        for b in (-r..=r).filter(|x| x % 2 == 0) {
            for c in (-r..=r).filter(|x| x % 2 == 0) {
                for d in (-r..=r).filter(|x| x % 2 == 0) {
                    if a * a + b * b + c * c + d * d == p as i64 {
                        let qm = q as i64;
                        let md = |x: i64| x.rem_euclid(qm) as u64;
                        let m: Mat2 = [
                            md(a + b * iq as i64),
                            md(c + d * iq as i64),
                            md(-c + d * iq as i64),
                            md(a - b * iq as i64),
                        ];
                        gens.push(mat_canon(&m, q));
                    }
                }
            }
        }
    }
    if gens.len() != (p + 1) as usize {
        return Err(ExpanderError::LpsSelfCheck(format!(
            "expected {} generators, found {}",
            p + 1,
            gens.len()
        )));
    }

    // enumerate group elements in canonical form, sorted for determinism
    let want_square_class = legendre(p, q) == 1;
    let mut elems: Vec<Mat2> = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let m: Mat2 = [a, b, c, d];
                    let det = mat_det(&m, q);
                    if det == 0 {
                        continue;
                    }
                    if mat_canon(&m, q) != m {
                        continue;
                    }
                    if want_square_class && legendre(det, q) != 1 {
                        continue;
                    }
                    elems.push(m);
                }
            }
        }
    }
    elems.sort_unstable();
    let index: HashMap<Mat2, usize> = elems.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let n = elems.len();

    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (u, m) in elems.iter().enumerate() {
        for g in &gens {
            let prod = mat_canon(&mat_mul(m, g, q), q);
            let v = *index
                .get(&prod)
                .ok_or_else(|| ExpanderError::LpsSelfCheck("product left the vertex set".into()))?;
            if v == u {
                return Err(ExpanderError::LpsSelfCheck(format!("self loop at vertex {u}")));
            }
            adjacency[u].insert(v);
        }
    }
    let adjacency: Vec<Vec<usize>> =
        adjacency.into_iter().map(|s| s.into_iter().collect()).collect();
    for (v, nbrs) in adjacency.iter().enumerate() {
        if nbrs.len() != (p + 1) as usize {
            return Err(ExpanderError::LpsSelfCheck(format!(
                "vertex {v} has degree {} after deduplication, wanted {}",
                nbrs.len(),
                p + 1
            )));
        }
    }
    let graph = RegularGraph::new((p + 1) as usize, adjacency)?;
    if !graph.is_connected() {
        return Err(ExpanderError::LpsSelfCheck("graph is disconnected".into()));
    }
    Ok(graph)
}

/// Edge-vertex incidence bipartite graph: left vertices are the edges of Y
/// (sorted pairs, lexicographic), right vertices are the vertices of Y.
/// Left degree exactly 2, right degree equal to the degree of Y.
pub fn edge_vertex_incidence(y: &RegularGraph) -> Result<BipartiteGraph, ExpanderError> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for u in 0..y.n_vertices() {
        for &v in y.neighbors(u) {
            if u < v {
                edges.push((u, v));
            }
        }
    }
    edges.sort_unstable();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); y.n_vertices()];
    for (e, &(u, v)) in edges.iter().enumerate() {
        adjacency[u].push(e);
        adjacency[v].push(e);
    }
    BipartiteGraph::new(edges.len(), 2, y.degree(), adjacency)
}

/// Certified lower bound on the expansion profile of a bipartite graph.
/// `evaluate(m)` is nondecreasing in m and never exceeds the right side.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileBound {
    /// Edge-count argument through the second eigenvalue of the underlying
    /// Cayley graph. `degree_bound` is the incidence right degree p+1 the
    /// argument certifies (the realized right degree after deletion and
    /// regularization can only be smaller, which keeps the bound valid).
    Spectral { n_left: usize, n_right: usize, degree_bound: usize },
    /// Projection bound m^(1/3) for the sum-product family, optionally
    /// strengthened by an assumed exponent margin xi0 > 0.
    SumProduct { n_right: usize, xi0: f64 },
    /// Minimum left degree: any nonempty set has at least this many
    /// neighbors.
    Trivial { min_left_degree: usize, n_right: usize },
    /// Exact table from the brute-force oracle; entry s-1 is Lambda(s).
    BruteForce { table: Vec<usize>, n_right: usize },
}

impl ProfileBound {
    pub fn evaluate(&self, m: f64) -> f64 {
        if m <= 0.0 {
            return 0.0;
        }
        let v = match self {
            ProfileBound::Spectral { n_left, degree_bound, .. } => {
                let d = *degree_bound as f64;
                let a = m / (2.0 * d.sqrt());
                let b = (2.0 * (*n_left as f64) * m).sqrt() / d;
                a.min(b)
            }
            ProfileBound::SumProduct { n_right, xi0 } => {
                let trivial = m.cbrt();
                if *xi0 > 0.0 {
                    let strengthened =
                        ((*n_right as f64).powf(0.9) / 8.0).min(m.powf(1.0 / 3.0 + xi0));
                    trivial.max(strengthened)
                } else {
                    trivial
                }
            }
            ProfileBound::Trivial { min_left_degree, .. } => *min_left_degree as f64,
            ProfileBound::BruteForce { table, .. } => {
                let s = (m.ceil() as usize).min(table.len());
                if s == 0 {
                    0.0
                } else {
                    table[s - 1] as f64
                }
            }
        };
        v.min(self.n_right() as f64)
    }

    pub fn n_right(&self) -> usize {
        match self {
            ProfileBound::Spectral { n_right, .. }
            | ProfileBound::SumProduct { n_right, .. }
            | ProfileBound::Trivial { n_right, .. }
            | ProfileBound::BruteForce { n_right, .. } => *n_right,
        }
    }

    pub fn provenance(&self) -> crate::analysis::Provenance {
        match self {
            ProfileBound::SumProduct { xi0, .. } if *xi0 > 0.0 => {
                crate::analysis::Provenance::AssumedConstant
            }
            ProfileBound::BruteForce { .. } => crate::analysis::Provenance::ExactOracle,
            _ => crate::analysis::Provenance::ProvedArithmetic,
        }
    }
}

/// Spectral-family spectral expander: prime pair from the target degree,
/// Cayley graph, edge-vertex incidence, deletion of the highest-indexed
/// left vertices down to N, then right-regularization. Left degree at most
/// 4; right degree near d up to the prime granularity.
pub fn build_spectral_expander(
    n_left: usize,
    d: usize,
) -> Result<(BipartiteGraph, ProfileBound), ExpanderError> {
    let (p, q) = find_prime_pq(d as u64, n_left as u64)?;
    let y = build_lps(p, q)?;
    let incidence = edge_vertex_incidence(&y)?;
    spectral_from_incidence(&incidence, p, n_left)
}

/// Deletion + regularization step, separated so callers that already built
/// the incidence graph can reuse it.
fn spectral_from_incidence(
    incidence: &BipartiteGraph,
    p: u64,
    n_left: usize,
) -> Result<(BipartiteGraph, ProfileBound), ExpanderError> {
    assert!(incidence.n_left() >= n_left, "incidence graph smaller than target");
    let right_adjacency: Vec<Vec<usize>> = incidence
        .adjacency()
        .iter()
        .map(|nbrs| nbrs.iter().copied().filter(|&v| v < n_left).collect())
        .collect();
    let raw = RawBipartite { n_left, left_degree: 2, right_adjacency };
    let graph = right_regularize(&raw)?;
    let profile = ProfileBound::Spectral {
        n_left,
        n_right: graph.n_right(),
        degree_bound: (p + 1) as usize,
    };
    Ok((graph, profile))
}

/// Sum-product bipartite expander on F_p^3 for the smallest prime with
/// p^3 >= N: left vertex (a, b, c) is adjacent to (1,a), (2,b), (3,c) and
/// (4, a*b+c); the highest-indexed left vertices are deleted down to N and
/// the result is right-regularized. Right degree is ceil(N/p), about
/// N^(2/3).
pub fn build_sum_product(
    n_left: usize,
    xi0: f64,
) -> Result<(BipartiteGraph, ProfileBound), ExpanderError> {
    if n_left < 8 {
        return Err(ExpanderError::SumProductTooSmall(n_left));
    }
    let mut p = 2usize;
    while p * p * p < n_left || !is_prime(p as u64) {
        p += 1;
    }
    let n_right = 4 * p;
    let mut right_adjacency: Vec<Vec<usize>> = vec![Vec::new(); n_right];
    for idx in 0..n_left {
        let a = idx / (p * p);
        let b = (idx / p) % p;
        let c = idx % p;
        let targets = [a, p + b, 2 * p + c, 3 * p + (a * b + c) % p];
        for t in targets {
            right_adjacency[t].push(idx);
        }
    }
    let raw = RawBipartite { n_left, left_degree: 4, right_adjacency };
    let graph = right_regularize(&raw)?;
    let profile = ProfileBound::SumProduct { n_right: graph.n_right(), xi0 };
    Ok((graph, profile))
}

const PROFILE_MAX_LEFT: usize = 24;
const PROFILE_MAX_RIGHT: usize = 20;

/// Exact expansion profile Lambda(m): the minimum neighborhood size over
/// left subsets of size ceil(m). Feasible when the left side is small
/// enough to enumerate or the right side is small enough for the
/// covering-mask count. Refuses anything larger; callers fall back to
/// sampling.
pub fn profile_bruteforce(g: &BipartiteGraph, m: f64) -> Result<usize, ExpanderError> {
    if m <= 0.0 || m > g.n_left() as f64 {
        return Err(ExpanderError::ProfileArgument(m));
    }
    let table = profile_bruteforce_table(g)?;
    Ok(table[(m.ceil() as usize) - 1])
}

/// Full table Lambda(1..=N) in one pass.
pub fn profile_bruteforce_table(g: &BipartiteGraph) -> Result<Vec<usize>, ExpanderError> {
    let n_left = g.n_left();
    let n_right = g.n_right();
    if n_right <= PROFILE_MAX_RIGHT {
        return Ok(profile_table_by_masks(g));
    }
    if n_left <= PROFILE_MAX_LEFT {
        return Ok(profile_table_by_subsets(g));
    }
    Err(ExpanderError::ProfileGuard {
        n_left,
        n_right,
        max_left: PROFILE_MAX_LEFT,
        max_right: PROFILE_MAX_RIGHT,
    })
}

/// For every right-side mask R, count the left vertices whose neighborhood
/// is contained in R (subset-sum over masks); Lambda(s) is then the
/// smallest |R| whose count reaches s.
fn profile_table_by_masks(g: &BipartiteGraph) -> Vec<usize> {
    let n_left = g.n_left();
    let n_right = g.n_right();
    let left_adj = g.left_adjacency();
    let masks: Vec<u32> = left_adj
        .iter()
        .map(|nbrs| nbrs.iter().fold(0u32, |m, &j| m | (1 << j)))
        .collect();
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
    let mut best = vec![usize::MAX; n_left + 1];
    for (r, &c) in count.iter().enumerate() {
        let pc = (r as u32).count_ones() as usize;
        let c = (c as usize).min(n_left);
        if pc < best[c] {
            best[c] = pc;
        }
    }
    // best neighborhood size for *at least* s members: suffix minimum
    for s in (0..n_left).rev() {
        best[s] = best[s].min(best[s + 1]);
    }
    (1..=n_left).map(|s| best[s]).collect()
}

fn profile_table_by_subsets(g: &BipartiteGraph) -> Vec<usize> {
    let n_left = g.n_left();
    let left_adj = g.left_adjacency();
    let masks: Vec<u64> = left_adj
        .iter()
        .map(|nbrs| nbrs.iter().fold(0u64, |m, &j| m | (1 << j)))
        .collect();
    let mut best = vec![usize::MAX; n_left + 1];
    // enumerate all subsets once, tracking popcount of the union
    for subset in 1u64..(1 << n_left) {
        let mut union = 0u64;
        let mut bits = subset;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            union |= masks[v];
            bits &= bits - 1;
        }
        let s = subset.count_ones() as usize;
        let u = union.count_ones() as usize;
        if u < best[s] {
            best[s] = u;
        }
    }
    for s in (1..n_left).rev() {
        best[s] = best[s].min(best[s + 1]);
    }
    (1..=n_left).map(|s| best[s]).collect()
}

/// Edge-count soundness test for the spectral bound: the induced subgraph
/// on S must have at most (gamma^2 + gamma lambda2/d) d n / 2 edges.
pub fn alon_chung_check(y: &RegularGraph, subset: &[usize], lambda2: f64) -> bool {
    let n = y.n_vertices() as f64;
    let d = y.degree() as f64;
    let in_set: Vec<bool> = {
        let mut v = vec![false; y.n_vertices()];
        for &u in subset {
            v[u] = true;
        }
        v
    };
    let mut twice_edges = 0usize;
    for &u in subset {
        for &v in y.neighbors(u) {
            if in_set[v] {
                twice_edges += 1;
            }
        }
    }
    let gamma = subset.len() as f64 / n;
    let bound = (gamma * gamma + gamma * lambda2 / d) * d * n / 2.0;
    (twice_edges as f64 / 2.0) <= bound + 1e-9
}
