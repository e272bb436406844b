//! Command-line surface: construct check matrices, analyze their kernels,
//! build expander graphs, and run sparse-recovery experiments. Every
//! command is deterministic given its full flag set; identical invocations
//! produce byte-identical files.

use clap::{Parser, Subcommand, ValueEnum};
use l1section::algebra::AlgebraError;
use l1section::analysis::{
    distortion_lower_bound, exact_spread_with_budget, kernel_basis_with_guard, sampled_spread,
    spread_to_distortion, AnalysisError, Provenance, SpreadCertificate,
};
use l1section::checkmat::{CheckMatError, SignCheckMatrix};
use l1section::expanders::{
    alon_chung_check, build_lps, build_sum_product, build_spectral_expander,
    edge_vertex_incidence, profile_bruteforce_table, BipartiteGraph, ExpanderError, RegularGraph,
};
use l1section::report::Report;
use l1section::sensing::{recovery_curve, SensingError};
use l1section::tanner::{
    assemble_explicit, assemble_seeded, AssemblySchedule, LevelOutcome, TannerError, TannerParams,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Exit-code taxonomy: 0 success, 2 parameter-infeasible, 3 parse error,
/// 4 numerical guard exceeded (1 for I/O and internal failures).
#[derive(Debug)]
enum CliError {
    Infeasible(String),
    Parse(String),
    Guard(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Infeasible(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Guard(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Infeasible(m) | CliError::Parse(m) | CliError::Guard(m) | CliError::Io(m) => m,
        }
    }
}

impl From<TannerError> for CliError {
    fn from(e: TannerError) -> Self {
        match &e {
            TannerError::Infeasible(_) | TannerError::Precondition(_) => {
                CliError::Infeasible(e.to_string())
            }
            TannerError::DegreeMismatch { .. } => CliError::Infeasible(e.to_string()),
            TannerError::Expander(inner) => expander_error(inner, e.to_string()),
            TannerError::Kerdock(_) => CliError::Infeasible(e.to_string()),
            TannerError::Analysis(inner) => analysis_error(inner, e.to_string()),
            TannerError::CheckMat(inner) => match inner {
                CheckMatError::Parse { .. } => CliError::Parse(e.to_string()),
                _ => CliError::Infeasible(e.to_string()),
            },
        }
    }
}

fn expander_error(e: &ExpanderError, msg: String) -> CliError {
    match e {
        ExpanderError::Parse { .. } => CliError::Parse(msg),
        ExpanderError::ProfileGuard { .. } => CliError::Guard(msg),
        _ => CliError::Infeasible(msg),
    }
}

fn analysis_error(e: &AnalysisError, msg: String) -> CliError {
    match e {
        AnalysisError::AnalysisGuard(..) | AnalysisError::EnumerationGuard { .. } => {
            CliError::Guard(msg)
        }
        _ => CliError::Infeasible(msg),
    }
}

impl From<CheckMatError> for CliError {
    fn from(e: CheckMatError) -> Self {
        match e {
            CheckMatError::Parse { .. } => CliError::Parse(e.to_string()),
            _ => CliError::Infeasible(e.to_string()),
        }
    }
}

impl From<ExpanderError> for CliError {
    fn from(e: ExpanderError) -> Self {
        let msg = e.to_string();
        expander_error(&e, msg)
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Infeasible(e.to_string())
    }
}

impl From<SensingError> for CliError {
    fn from(e: SensingError) -> Self {
        match e {
            SensingError::Parse { .. } => CliError::Parse(e.to_string()),
            SensingError::NonConvergence { .. } => CliError::Guard(e.to_string()),
            _ => CliError::Infeasible(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Fully deterministic multi-level construction.
    #[value(name = "thm1-explicit")]
    Explicit,
    /// Single-level construction with a seeded random inner kernel.
    #[value(name = "thm2-seeded")]
    Seeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    #[value(name = "sum-product")]
    SumProduct,
    Spectral,
    Lps,
    /// Three-cycle incidence fixture.
    Triangle,
}

#[derive(Parser)]
#[command(
    name = "l1section",
    about = "Construct and certify well-spread subspaces given by sign check matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a check matrix and write it with its schedule/certificate report.
    Construct {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        eta: f64,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Stream seed; only the seeded mode consumes one.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.05)]
        beta0: f64,
        /// Schedule start constant.
        #[arg(long = "eps", default_value_t = 0.0625)]
        eps: f64,
        /// Assumed sum-product profile margin (0 = certified bound only).
        #[arg(long = "xi0", default_value_t = 0.0)]
        xi0: f64,
        /// Matrix file; the report goes to `<out>.report`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Kernel analysis of a CHECK file: spread values and the distortion sandwich.
    Analyze {
        #[arg(long)]
        matrix: PathBuf,
        /// Report file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "max-analysis-n", default_value_t = 4096)]
        max_analysis_n: usize,
        #[arg(long = "enum-budget", default_value_t = 1_000_000)]
        enum_budget: u128,
        /// Seed for the sampled estimators and witness search.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Build an expander graph file plus a profile report.
    Graph {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long = "xi0", default_value_t = 0.0)]
        xi0: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recovery-rate curve of basis pursuit against a CHECK matrix.
    Csdemo {
        #[arg(long)]
        matrix: PathBuf,
        /// Comma-separated support sizes, e.g. "0,1,2,4".
        #[arg(long = "s-grid")]
        s_grid: String,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn report_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".report");
    PathBuf::from(os)
}

fn certificate_keys(r: &mut Report, cert: &SpreadCertificate) {
    r.push("t", cert.t_low);
    r.push("T", cert.t_high);
    r.push("eps", cert.epsilon);
    r.push("provenance", cert.provenance);
    r.push("trail", cert.trail.join(" | "));
}

fn schedule_keys(r: &mut Report, s: &AssemblySchedule) {
    r.push("schedule.levels", s.level_count);
    r.push("schedule.eta_tilde", s.eta_tilde);
    r.push("schedule.beta0", s.beta0);
    r.push("schedule.epsilon", s.epsilon);
    r.push("schedule.delta", s.delta);
    r.push("schedule.loglog", s.loglog);
    r.push("schedule.threshold", s.threshold);
    match &s.base {
        Some(b) => {
            r.push("base.codim", b.codim);
            r.push("base.rows", b.rows);
        }
        None => r.push("base.codim", "none"),
    }
    for level in &s.levels {
        let prefix = format!("level.{}", level.index);
        r.push(format!("{prefix}.t"), level.t);
        r.push(format!("{prefix}.d_target"), level.d_target);
        match &level.outcome {
            LevelOutcome::Built { p, q, d_hat, n_right, inner, rows, cert_useful } => {
                r.push(format!("{prefix}.outcome"), "built");
                r.push(format!("{prefix}.p"), p);
                r.push(format!("{prefix}.q"), q);
                r.push(format!("{prefix}.d_hat"), d_hat);
                r.push(format!("{prefix}.n_right"), n_right);
                r.push(format!("{prefix}.inner"), inner);
                r.push(format!("{prefix}.rows"), rows);
                r.push(format!("{prefix}.cert_useful"), cert_useful);
            }
            LevelOutcome::Skipped { reason } => {
                r.push(format!("{prefix}.outcome"), "skipped");
                r.push(format!("{prefix}.reason"), reason);
            }
        }
        for (guard, held) in &level.guards {
            r.push(format!("{prefix}.guard[{guard}]"), held);
        }
    }
    r.push("rows.total", s.total_rows);
}

fn cmd_construct(
    n: usize,
    eta: f64,
    mode: Mode,
    seed: Option<u64>,
    params: TannerParams,
    out: &Path,
) -> Result<(), CliError> {
    let mut report = Report::new();
    report.push("command", "construct");
    report.push("N", n);
    report.push("eta", eta);
    let matrix = match mode {
        Mode::Explicit => {
            if seed.is_some() {
                return Err(CliError::Infeasible(
                    "mode thm1-explicit is deterministic and rejects --seed".into(),
                ));
            }
            report.push("mode", "thm1-explicit");
            let (matrix, schedule, cert) = assemble_explicit(n, eta, &params)?;
            report.push("rows", matrix.rows());
            report.push("cols", matrix.cols());
            certificate_keys(&mut report, &cert);
            schedule_keys(&mut report, &schedule);
            matrix
        }
        Mode::Seeded => {
            let seed = seed.ok_or_else(|| {
                CliError::Infeasible("mode thm2-seeded requires --seed".into())
            })?;
            report.push("mode", "thm2-seeded");
            report.push("seed", seed);
            let a = assemble_seeded(n, eta, seed, &params)?;
            report.push("rows", a.matrix.rows());
            report.push("cols", a.matrix.cols());
            report.push("k", a.inner_codim);
            report.push("d", a.degree);
            report.push("p", a.p);
            report.push("q", a.q);
            report.push("n_right", a.n_right);
            report.push("randomBitCount", a.random_bits);
            report.push("window_target", a.window_target);
            report.push("window_held", a.window_held);
            certificate_keys(&mut report, &a.certificate);
            a.matrix
        }
    };
    write_file(out, &matrix.write_text())?;
    write_file(&report_path(out), &report.write_text())?;
    Ok(())
}

fn cmd_analyze(
    matrix_path: &Path,
    out: Option<&Path>,
    max_analysis_n: usize,
    enum_budget: u128,
    seed: u64,
) -> Result<(), CliError> {
    let text = read_file(matrix_path)?;
    let matrix = SignCheckMatrix::parse_text(&text)?;
    let basis = kernel_basis_with_guard(&matrix, max_analysis_n)
        .map_err(|e| analysis_error(&e, e.to_string()))?;
    let n = basis.ambient();

    let mut report = Report::new();
    report.push("N", n);
    report.push("dim", basis.dim());
    if basis.dim() == 0 {
        report.push("mode", "degenerate");
        report.push("t", 0.0);
        report.push("T", 0.0);
        report.push("eps", 0.0);
        report.push("provenance", Provenance::ExactOracle);
        report.push("trail", "trivial kernel; spread and distortion vacuous");
        report.push("delta_lower", 1.0);
        report.push("delta_upper", 1.0);
        report.push("witness_sparsity", 0);
        let text = report.write_text();
        match out {
            Some(path) => write_file(path, &text)?,
            None => print!("{text}"),
        }
        return Ok(());
    }

    // exact spread while the subset enumeration fits the budget
    let mut best: Option<(f64, f64, f64)> = None; // (upper, t, eps)
    let mut t_exact_max = 0usize;
    let mut t = 1usize;
    while t < n {
        match exact_spread_with_budget(&basis, t as f64, enum_budget) {
            Ok(eps) => {
                report.push(format!("spread.exact.t{t}"), eps);
                t_exact_max = t;
                if eps > 1e-12 {
                    let cert = SpreadCertificate::anchored(t as f64, eps, Provenance::ExactOracle);
                    if let Ok((upper, _)) = spread_to_distortion(&cert, n) {
                        if best.is_none_or(|(u, _, _)| upper < u) {
                            best = Some((upper, t as f64, eps));
                        }
                    }
                }
                t += 1;
            }
            Err(_) => break,
        }
    }
    report.push("mode", if t_exact_max > 0 { "exact" } else { "sampled" });
    // sampled estimates further out, labeled, never certified
    for factor in [2usize, 8] {
        let ts = (t_exact_max.max(1)) * factor;
        if ts < n {
            let est = sampled_spread(&basis, ts as f64, 2000, seed);
            report.push(format!("spread.sampled.t{ts}"), est);
        }
    }

    let lower = distortion_lower_bound(&basis, 256, seed);
    match best {
        Some((upper, t, eps)) => {
            let cert = SpreadCertificate::anchored(t, eps, Provenance::ExactOracle)
                .with_note(format!("exact subset oracle at t={t}"));
            certificate_keys(&mut report, &cert);
            report.push("delta_lower", lower.lower);
            report.push("delta_upper", upper);
            if lower.lower > upper + 1e-6 {
                return Err(CliError::Guard(format!(
                    "distortion sandwich inverted: lower {} > upper {upper}",
                    lower.lower
                )));
            }
        }
        None => {
            report.push("t", 0.0);
            report.push("T", 0.0);
            report.push("eps", 0.0);
            report.push("provenance", Provenance::ExactOracle);
            report.push("trail", "no nonvanishing exact spread within budget");
            report.push("delta_lower", lower.lower);
            report.push("delta_upper", "inf");
        }
    }
    report.push("witness_sparsity", lower.witness_sparsity);

    let text = report.write_text();
    match out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn graph_profile_keys(report: &mut Report, g: &BipartiteGraph) {
    report.push("graph.N", g.n_left());
    report.push("graph.n", g.n_right());
    report.push("graph.D", g.max_left_degree());
    report.push("graph.d", g.right_degree());
    if let Ok(table) = profile_bruteforce_table(g) {
        for (i, v) in table.iter().enumerate() {
            report.push(format!("profile.bruteforce.m{}", i + 1), v);
        }
    }
}

fn lambda2_keys(report: &mut Report, y: &RegularGraph, p: u64) {
    let lambda2 = y.lambda2();
    report.push("lps.vertices", y.n_vertices());
    report.push("lps.degree", y.degree());
    report.push("lps.lambda2", lambda2);
    report.push("lps.bound", 2.0 * (p as f64).sqrt());
    // spot soundness of the eigenvalue via the edge-count bound
    let all: Vec<usize> = (0..y.n_vertices()).collect();
    report.push("lps.alon_chung_full", alon_chung_check(y, &all, lambda2));
}

fn cmd_graph(
    family: Family,
    n: Option<usize>,
    d: Option<usize>,
    p: Option<u64>,
    q: Option<u64>,
    xi0: f64,
    out: &Path,
) -> Result<(), CliError> {
    let mut report = Report::new();
    let graph = match family {
        Family::SumProduct => {
            let n = n.ok_or_else(|| CliError::Infeasible("sum-product requires --N".into()))?;
            report.push("family", "sum-product");
            let (g, profile) = build_sum_product(n, xi0)?;
            for m in [1.0, 2.0, 4.0, n as f64] {
                report.push(format!("profile.bound.m{m}"), profile.evaluate(m));
            }
            g
        }
        Family::Spectral => {
            let n = n.ok_or_else(|| CliError::Infeasible("spectral requires --N".into()))?;
            let d = d.ok_or_else(|| CliError::Infeasible("spectral requires --d".into()))?;
            report.push("family", "spectral");
            let (g, profile) = build_spectral_expander(n, d)?;
            for m in [1.0, 4.0, 16.0, n as f64] {
                report.push(format!("profile.bound.m{m}"), profile.evaluate(m));
            }
            g
        }
        Family::Lps => {
            let p = p.ok_or_else(|| CliError::Infeasible("lps requires --p".into()))?;
            let q = q.ok_or_else(|| CliError::Infeasible("lps requires --q".into()))?;
            report.push("family", "lps");
            let y = build_lps(p, q)?;
            lambda2_keys(&mut report, &y, p);
            edge_vertex_incidence(&y)?
        }
        Family::Triangle => {
            report.push("family", "triangle");
            let y = RegularGraph::new(2, vec![vec![1, 2], vec![0, 2], vec![0, 1]])
                .expect("triangle fixture");
            edge_vertex_incidence(&y)?
        }
    };
    graph_profile_keys(&mut report, &graph);
    write_file(out, &graph.write_text())?;
    write_file(&report_path(out), &report.write_text())?;
    print!("{}", report.write_text());
    Ok(())
}

fn cmd_csdemo(
    matrix_path: &Path,
    s_grid: &str,
    trials: usize,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let text = read_file(matrix_path)?;
    let matrix = SignCheckMatrix::parse_text(&text)?;
    let grid: Result<Vec<usize>, _> =
        s_grid.split(',').map(|s| s.trim().parse::<usize>()).collect();
    let grid = grid.map_err(|_| CliError::Parse(format!("bad --s-grid `{s_grid}`")))?;
    if trials == 0 {
        return Err(CliError::Infeasible("empty experiment: --trials is zero".into()));
    }
    let curve = recovery_curve(&matrix, &grid, trials, seed)?;
    write_file(out, &curve.write_text())?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Construct { n, eta, mode, seed, beta0, eps, xi0, out } => {
            let params = TannerParams { beta0, epsilon: eps, xi0, ..TannerParams::default() };
            cmd_construct(n, eta, mode, seed, params, &out)
        }
        Command::Analyze { matrix, out, max_analysis_n, enum_budget, seed } => {
            cmd_analyze(&matrix, out.as_deref(), max_analysis_n, enum_budget, seed)
        }
        Command::Graph { family, n, d, p, q, xi0, out } => {
            cmd_graph(family, n, d, p, q, xi0, &out)
        }
        Command::Csdemo { matrix, s_grid, trials, seed, out } => {
            cmd_csdemo(&matrix, &s_grid, trials, seed, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
