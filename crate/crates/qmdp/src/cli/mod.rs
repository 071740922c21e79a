//! Command-line front end: problem-file validation, classical embedding,
//! and solve orchestration.
//!
//! Exit codes are fixed for scripting: 0 success (optimal/certified),
//! 1 invariant violation, 2 parse or I/O failure, 3 solver non-convergence
//! or an unknown assumption verdict (results are still written).

pub mod files;

use crate::channel::{ChoiMatrix, CspPolicyChannel};
use crate::classical::embed_to_qmdp;
use crate::herm::{DensityOperator, HermitianOperator};
use crate::qsolve::{
    AssumptionStatus, BilOptions, ExtractedPolicy, PolicyRef, QSdpOptions, QmdpInstance,
    ValueNetOptions, check_assumption1, check_assumption2, default_horizon, default_probes,
    rollout, solve_bil_closed, solve_bil_open, solve_sdp_closed, solve_sdp_open, value_closed,
    value_net_open,
};
use crate::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use files::{PolicyJson, ProblemFile, ReportFile, matrix_from_json, matrix_to_json, sha256_hex};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "qmdp",
    about = "Quantum Markov decision processes: validation, embedding, and solvers",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a problem file against every structural invariant.
    Validate { path: PathBuf },
    /// Embed a classical MDP file as a q-MDP problem file.
    EmbedClassical {
        path: PathBuf,
        /// Initial distribution as a comma-separated list; defaults to the
        /// file's mu0.
        #[arg(long)]
        mu0: Option<String>,
        /// Output path; defaults to `<input stem>.qmdp.json`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve a q-MDP problem file.
    Solve {
        path: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Net resolution for the value-net mode.
        #[arg(long, default_value_t = 4)]
        net_resolution: usize,
        /// Rollout horizon; defaults to the discount tail rule.
        #[arg(long)]
        horizon: Option<usize>,
        /// Restarts for the bilinear-program modes.
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Frank-Wolfe iteration cap for the bilinear-program modes.
        #[arg(long, default_value_t = 60)]
        max_outer: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Report path; defaults to `<input stem>.<mode>.report.json`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Policy payload file for the rollout mode ({"pi": …} or
        /// {"choi": …}); defaults to the maximally mixed open-loop policy.
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        verbose: bool,
        /// Omit the timings field, making reports byte-deterministic.
        #[arg(long)]
        no_timings: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[value(name = "open-sdp")]
    OpenSdp,
    #[value(name = "open-dual")]
    OpenDual,
    #[value(name = "closed-sdp")]
    ClosedSdp,
    #[value(name = "closed-dual")]
    ClosedDual,
    #[value(name = "bil-open")]
    BilOpen,
    #[value(name = "bil-closed")]
    BilClosed,
    #[value(name = "value-net")]
    ValueNet,
    #[value(name = "value-closed")]
    ValueClosed,
    #[value(name = "rollout")]
    Rollout,
    #[value(name = "check-assumptions")]
    CheckAssumptions,
}

impl Mode {
    fn as_str(&self) -> &'static str {
        match self {
            Mode::OpenSdp => "open-sdp",
            Mode::OpenDual => "open-dual",
            Mode::ClosedSdp => "closed-sdp",
            Mode::ClosedDual => "closed-dual",
            Mode::BilOpen => "bil-open",
            Mode::BilClosed => "bil-closed",
            Mode::ValueNet => "value-net",
            Mode::ValueClosed => "value-closed",
            Mode::Rollout => "rollout",
            Mode::CheckAssumptions => "check-assumptions",
        }
    }
}

/// Run with arguments from the environment; returns the process exit code.
pub fn run_from_env() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            // clap handles --help/--version as "errors" with success codes.
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::EmbedClassical { path, mu0, output } => {
            cmd_embed_classical(&path, mu0.as_deref(), output.as_deref())
        }
        Command::Solve {
            path,
            mode,
            net_resolution,
            horizon,
            restarts,
            max_outer,
            tol,
            seed,
            output,
            policy,
            verbose,
            no_timings,
        } => {
            let flags = SolveFlags {
                mode,
                net_resolution,
                horizon,
                restarts,
                max_outer,
                tol,
                seed,
                output,
                policy,
                verbose,
                no_timings,
            };
            cmd_solve(&path, &flags)
        }
    }
}

fn read_problem(path: &Path) -> std::result::Result<(ProblemFile, Vec<u8>), i32> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_IO);
        }
    };
    match serde_json::from_slice::<ProblemFile>(&bytes) {
        Ok(p) => Ok((p, bytes)),
        Err(e) => {
            eprintln!("error: cannot parse {}: {e}", path.display());
            Err(EXIT_IO)
        }
    }
}

/// Build the in-memory instance, running every construction-time invariant.
fn instantiate(problem: &ProblemFile) -> Result<QmdpInstance> {
    match problem {
        ProblemFile::Qmdp(q) => q.to_instance(),
        ProblemFile::Classical(c) => {
            let mdp = c.to_mdp()?;
            embed_to_qmdp(&mdp, &c.mu0()?)
        }
    }
}

fn cmd_validate(path: &Path) -> i32 {
    let (problem, _) = match read_problem(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    match instantiate(&problem) {
        Ok(q) => {
            println!(
                "ok: {} instance, dim_x {} dim_a {} beta {}",
                match problem {
                    ProblemFile::Qmdp(_) => "qmdp",
                    ProblemFile::Classical(_) => "classical-mdp",
                },
                q.dim_x(),
                q.dim_a(),
                q.beta()
            );
            EXIT_OK
        }
        Err(e) => {
            eprintln!("invalid: {e}");
            EXIT_INVARIANT
        }
    }
}

fn parse_mu0(spec: &str, nx: usize) -> Result<Vec<f64>> {
    let mu: std::result::Result<Vec<f64>, _> =
        spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let mu = mu.map_err(|e| Error::NotStochastic(format!("cannot parse mu0: {e}")))?;
    if mu.len() != nx {
        return Err(Error::DimensionMismatch(format!(
            "mu0 has {} entries, expected {nx}",
            mu.len()
        )));
    }
    Ok(mu)
}

fn cmd_embed_classical(path: &Path, mu0: Option<&str>, output: Option<&Path>) -> i32 {
    let (problem, _) = match read_problem(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let ProblemFile::Classical(cf) = problem else {
        eprintln!("invalid: embed-classical expects a classical-mdp file");
        return EXIT_INVARIANT;
    };
    let built = cf.to_mdp().and_then(|mdp| {
        let mu = match mu0 {
            Some(spec) => parse_mu0(spec, mdp.nx())?,
            None => cf.mu0()?,
        };
        embed_to_qmdp(&mdp, &mu)
    });
    let q = match built {
        Ok(q) => q,
        Err(e) => {
            eprintln!("invalid: {e}");
            return EXIT_INVARIANT;
        }
    };
    let out_path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| path.with_extension("qmdp.json"));
    let file = ProblemFile::Qmdp(files::QmdpFile::from_instance(&q));
    match write_json_atomic(&out_path, &file) {
        Ok(()) => {
            println!("wrote {}", out_path.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", out_path.display());
            EXIT_IO
        }
    }
}

struct SolveFlags {
    mode: Mode,
    net_resolution: usize,
    horizon: Option<usize>,
    restarts: usize,
    max_outer: usize,
    tol: f64,
    seed: u64,
    output: Option<PathBuf>,
    policy: Option<PathBuf>,
    verbose: bool,
    no_timings: bool,
}

fn cmd_solve(path: &Path, flags: &SolveFlags) -> i32 {
    let (problem, bytes) = match read_problem(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let q = match instantiate(&problem) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("invalid: {e}");
            return EXIT_INVARIANT;
        }
    };

    if flags.mode == Mode::ValueNet {
        if let Ok(spec) = std::env::var("QMDP_THREADS") {
            if let Ok(n) = spec.parse::<usize>() {
                // Build the global worker pool once; a failure means it
                // already exists, which is fine.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
            }
        }
    }

    let mut report = ReportFile::new("solve", sha256_hex(&bytes));
    report.mode = Some(flags.mode.as_str().to_string());
    let started = Instant::now();
    let outcome = run_mode(&q, flags, &mut report);
    if !flags.no_timings {
        let mut timings = BTreeMap::new();
        timings.insert("total".to_string(), started.elapsed().as_secs_f64() * 1e3);
        report.timings_ms = Some(timings);
    }
    let code = match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("solver error: {e}");
            return EXIT_SOLVER;
        }
    };
    if let Err(e) = report.check_finite() {
        eprintln!("internal error: {e}");
        return EXIT_SOLVER;
    }
    let out_path = flags.output.clone().unwrap_or_else(|| {
        path.with_extension(format!("{}.report.json", flags.mode.as_str()))
    });
    if let Err(e) = write_json_atomic(&out_path, &report) {
        eprintln!("error: cannot write {}: {e}", out_path.display());
        return EXIT_IO;
    }
    print_summary(&report);
    println!("{:<24} {}", "report", out_path.display());
    code
}

fn run_mode(q: &QmdpInstance, flags: &SolveFlags, report: &mut ReportFile) -> Result<i32> {
    let sdp_opts = QSdpOptions { tol: flags.tol, max_iter: 200, verbose: flags.verbose };
    let probes = default_probes(q.dim_x(), 8, flags.seed);
    match flags.mode {
        Mode::OpenSdp | Mode::OpenDual => {
            let rep = solve_sdp_open(q, &sdp_opts)?;
            let assumption = check_assumption1(q, &rep.xi, &probes, 1e-6)?;
            report.solver_status = Some(format!("{:?}", rep.status));
            report.primal_value = Some(rep.primal_value);
            report.dual_value = Some(rep.dual_value);
            report.gap = Some(rep.gap);
            report.assumption_open = Some(assumption.status.to_string());
            if flags.mode == Mode::OpenDual {
                report.dual_certificate = Some(matrix_to_json(rep.xi.matrix()));
            }
            Ok(status_code(rep.status, assumption.status))
        }
        Mode::ClosedSdp | Mode::ClosedDual => {
            let rep = solve_sdp_closed(q, &sdp_opts)?;
            let assumption = check_assumption2(q, &rep.xi, &probes, 1e-6)?;
            report.solver_status = Some(format!("{:?}", rep.status));
            report.primal_value = Some(rep.primal_value);
            report.dual_value = Some(rep.dual_value);
            report.gap = Some(rep.gap);
            report.assumption_closed = Some(assumption.status.to_string());
            if flags.mode == Mode::ClosedDual {
                report.dual_certificate = Some(matrix_to_json(rep.xi.matrix()));
            }
            Ok(status_code(rep.status, assumption.status))
        }
        Mode::BilOpen | Mode::BilClosed => {
            let opts = BilOptions {
                max_outer: flags.max_outer,
                tol: flags.tol.max(1e-8),
                restarts: flags.restarts,
                seed: flags.seed,
                sdp: sdp_opts,
            };
            let rep = if flags.mode == Mode::BilOpen {
                solve_bil_open(q, &opts)?
            } else {
                solve_bil_closed(q, &opts)?
            };
            report.primal_value = Some(rep.objective);
            report.lower_bound = Some(rep.lower_bound);
            report.certificate_gap = Some(rep.certificate_gap);
            report.optimal_within_tol = Some(rep.optimal_within_tol);
            report.rollout_value = Some(rep.rollout_value);
            report.rollout_tail_bound = Some(rep.rollout_tail_bound);
            report.policy = Some(match &rep.policy {
                ExtractedPolicy::OpenLoop(p) => PolicyJson::open_loop(p.tail()),
                ExtractedPolicy::Csp(c) => PolicyJson::csp(c),
            });
            Ok(if rep.optimal_within_tol { EXIT_OK } else { EXIT_SOLVER })
        }
        Mode::ValueNet => {
            let opts = ValueNetOptions { cap: 20_000, sdp: sdp_opts };
            let net = value_net_open(q, flags.net_resolution, &opts)?;
            report.net_points = Some(net.len());
            report.net_dropped = Some(net.dropped);
            report.covering_radius = Some(net.covering_radius_estimate);
            report.primal_value = Some(net.evaluate(q.rho0()));
            Ok(if net.dropped == 0 { EXIT_OK } else { EXIT_SOLVER })
        }
        Mode::ValueClosed => {
            let cv = value_closed(q, &sdp_opts)?;
            report.values = Some(cv.diag().to_vec());
            report.primal_value = Some(cv.evaluate(q.rho0()));
            Ok(EXIT_OK)
        }
        Mode::Rollout => {
            let horizon = flags.horizon.unwrap_or_else(|| default_horizon(q));
            let (open_policy, csp_policy) = load_policy(q, flags.policy.as_deref())?;
            let ro = match (&open_policy, &csp_policy) {
                (Some(p), None) => rollout(q, PolicyRef::OpenLoop(p), horizon)?,
                (None, Some(c)) => rollout(q, PolicyRef::Csp(c), horizon)?,
                _ => unreachable!("load_policy returns exactly one"),
            };
            report.rollout_value = Some(ro.discounted_cost);
            report.rollout_tail_bound = Some(ro.cost_tail_bound);
            let resid = q
                .op_t(&ro.occupation)?
                .sub(&q.rho0().op().scale(1.0 - q.beta()))
                .hs_norm();
            report.occupation_flow_residual = Some(resid);
            if let Some(p) = &open_policy {
                report.policy = Some(PolicyJson::open_loop(p.tail()));
            }
            if let Some(c) = &csp_policy {
                report.policy = Some(PolicyJson::csp(c));
            }
            Ok(EXIT_OK)
        }
        Mode::CheckAssumptions => {
            let open = solve_sdp_open(q, &sdp_opts)?;
            let closed = solve_sdp_closed(q, &sdp_opts)?;
            let rep1 = check_assumption1(q, &open.xi, &probes, 1e-6)?;
            let rep2 = check_assumption2(q, &closed.xi, &probes, 1e-6)?;
            report.primal_value = Some(open.primal_value);
            report.dual_value = Some(open.dual_value);
            report.assumption_open = Some(rep1.status.to_string());
            report.assumption_closed = Some(rep2.status.to_string());
            let unknown = rep1.status == AssumptionStatus::Unknown
                || rep2.status == AssumptionStatus::Unknown;
            Ok(if unknown { EXIT_SOLVER } else { EXIT_OK })
        }
    }
}

fn status_code(status: crate::conic::SdpStatus, assumption: AssumptionStatus) -> i32 {
    let solver_ok = status == crate::conic::SdpStatus::Optimal;
    let _ = assumption; // assumption verdicts do not gate plain SDP solves
    if solver_ok { EXIT_OK } else { EXIT_SOLVER }
}

fn load_policy(
    q: &QmdpInstance,
    path: Option<&Path>,
) -> Result<(Option<crate::qsolve::OpenLoopPolicy>, Option<CspPolicyChannel>)> {
    let Some(path) = path else {
        let mixed = DensityOperator::maximally_mixed(q.dim_a());
        return Ok((Some(crate::qsolve::OpenLoopPolicy::stationary(mixed)), None));
    };
    let bytes = std::fs::read(path).map_err(|e| Error::Solver(format!("read policy: {e}")))?;
    let payload: PolicyJson = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Solver(format!("parse policy: {e}")))?;
    match (&payload.pi, &payload.choi) {
        (Some(pi), None) => {
            let op = HermitianOperator::new(matrix_from_json(pi)?)?;
            let pi = DensityOperator::new(op)?;
            Ok((Some(crate::qsolve::OpenLoopPolicy::stationary(pi)), None))
        }
        (None, Some(choi)) => {
            let mat = HermitianOperator::new(matrix_from_json(choi)?)?;
            let choi = ChoiMatrix::new(q.dim_x(), q.joint_dim(), mat)?;
            Ok((None, Some(CspPolicyChannel::new(choi)?)))
        }
        _ => Err(Error::InvalidInstance(
            "policy must carry exactly one of \"pi\" or \"choi\"".into(),
        )),
    }
}

fn print_summary(report: &ReportFile) {
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.9}")).unwrap_or_else(|| "-".into());
    println!("{:<24} {}", "mode", report.mode.as_deref().unwrap_or("-"));
    println!("{:<24} {}", "primal value", fmt(report.primal_value));
    println!("{:<24} {}", "dual value", fmt(report.dual_value));
    println!("{:<24} {}", "gap", fmt(report.gap));
    if report.lower_bound.is_some() {
        println!("{:<24} {}", "lower bound", fmt(report.lower_bound));
        println!("{:<24} {}", "certificate gap", fmt(report.certificate_gap));
    }
    if let Some(values) = &report.values {
        let joined: Vec<String> = values.iter().map(|v| format!("{v:.9}")).collect();
        println!("{:<24} [{}]", "values", joined.join(", "));
    }
    if report.covering_radius.is_some() {
        println!("{:<24} {}", "covering radius", fmt(report.covering_radius));
        println!(
            "{:<24} {}",
            "net points",
            report.net_points.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
        );
    }
    if report.rollout_value.is_some() {
        println!("{:<24} {}", "rollout value", fmt(report.rollout_value));
        println!("{:<24} {}", "rollout tail bound", fmt(report.rollout_tail_bound));
    }
    if let Some(a) = &report.assumption_open {
        println!("{:<24} {}", "assumption (open)", a);
    }
    if let Some(a) = &report.assumption_closed {
        println!("{:<24} {}", "assumption (closed)", a);
    }
}

fn write_json_atomic<T: serde::Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let json = serde_json::to_vec_pretty(value)?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &json)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
