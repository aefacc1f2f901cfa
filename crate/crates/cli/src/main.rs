use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use conekernel::kernel::{fit_bound_constants, lemma_key_check, scan_csv, LemmaOptions};
use conekernel::verify::{default_bound_grid, fd_compare, run_suite, FdCompareOptions, Suite, VerifyOptions};
use conekernel::{Error, GridPoint, HeatKernelEvaluator};

mod config;

use config::{RunConfig, Usage, UsageError};

#[derive(Debug, Parser)]
#[command(name = "conekernel", version, about = "Heat kernels of Schrödinger operators on metric cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the kernel on a grid and write CSV rows `t,r,s,d_h,kernel`.
    Eval(Flags),
    /// Run verification suites and print a pass/fail table.
    Verify(Flags),
    /// Fit the constants of the Gaussian upper bound and write a JSON report.
    Fitbound(Flags),
    /// Fit the constants of the key Bessel-sum estimate.
    LemmaCheck(Flags),
    /// Compare a finite-difference evolution with the series on a 2-cone.
    FdCompare(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// circle, sphere or matrix.
    #[arg(long)]
    section: Option<String>,
    /// Circle circumference.
    #[arg(long = "L")]
    l: Option<String>,
    /// Cone dimension of a sphere section.
    #[arg(long)]
    n: Option<String>,
    /// Constant potential on the section.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Spectral-data file of a matrix section.
    #[arg(long)]
    file: Option<String>,
    /// Times: comma list or a:b:step.
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    s: Option<String>,
    /// Section distances.
    #[arg(long)]
    dh: Option<String>,
    /// Relative truncation tolerance of the series.
    #[arg(long)]
    tol: Option<String>,
    /// Largest number of spectral blocks summed.
    #[arg(long = "k-max")]
    k_max: Option<String>,
    /// Candidate Gaussian constants c.
    #[arg(long = "c-list")]
    c_list: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Per-point scan CSV of fitbound.
    #[arg(long)]
    csv: Option<String>,
    /// Comma list of suites, or `all`.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    /// Bessel argument grid of lemma-check.
    #[arg(long)]
    z: Option<String>,
    /// Section distance grid of lemma-check.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    epsilon0: Option<String>,
    #[arg(long = "n-max")]
    n_max: Option<String>,
    #[arg(long)]
    t0: Option<String>,
    #[arg(long)]
    t1: Option<String>,
    /// Pole radius of fd-compare.
    #[arg(long)]
    pole: Option<String>,
    #[arg(long)]
    nr: Option<String>,
    #[arg(long)]
    ntheta: Option<String>,
    #[arg(long)]
    steps: Option<String>,
}

impl Flags {
    fn merge(&self) -> Usage<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let pairs = [
            ("section", &self.section),
            ("L", &self.l),
            ("n", &self.n),
            ("a", &self.a),
            ("file", &self.file),
            ("t", &self.t),
            ("r", &self.r),
            ("s", &self.s),
            ("dh", &self.dh),
            ("tol", &self.tol),
            ("k-max", &self.k_max),
            ("c-list", &self.c_list),
            ("out", &self.out),
            ("csv", &self.csv),
            ("suite", &self.suite),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("z", &self.z),
            ("delta", &self.delta),
            ("epsilon0", &self.epsilon0),
            ("n-max", &self.n_max),
            ("t0", &self.t0),
            ("t1", &self.t1),
            ("pole", &self.pole),
            ("nr", &self.nr),
            ("ntheta", &self.ntheta),
            ("steps", &self.steps),
        ];
        for (key, value) in pairs {
            cfg.set(key, value.as_ref());
        }
        Ok(cfg)
    }
}

enum Outcome {
    Ok,
    Fail,
    Usage(String),
    Truncation(String),
}

impl From<UsageError> for Outcome {
    fn from(e: UsageError) -> Self {
        Outcome::Usage(e.0)
    }
}

/// Input errors are usage errors; numerical breakdowns are failures.
fn classify(e: Error) -> Outcome {
    match e {
        Error::InvalidArgument(_)
        | Error::InvalidPoint(_)
        | Error::IndexOutOfRange { .. }
        | Error::Parse { .. }
        | Error::BadWeights(_)
        | Error::NotSymmetric { .. }
        | Error::NonPositiveSpectrum { .. }
        | Error::GridTooCoarse(_) => Outcome::Usage(e.to_string()),
        Error::TruncationFailure { .. } => Outcome::Truncation(e.to_string()),
        other => {
            eprintln!("error: {other}");
            Outcome::Fail
        }
    }
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<(), Outcome> {
    match cfg.get("out") {
        Some(path) => std::fs::write(path, text).map_err(|e| Outcome::Usage(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn evaluator(cfg: &RunConfig) -> Result<HeatKernelEvaluator, Outcome> {
    let mut ev = HeatKernelEvaluator::new(cfg.section()?).map_err(classify)?;
    if let Some(v) = cfg.get("tol") {
        ev = ev.with_tolerance(config::parse_number("tol", v)?).map_err(classify)?;
    }
    if cfg.has("k-max") {
        ev = ev.with_k_max(cfg.usize_or("k-max", 0)?).map_err(classify)?;
    }
    Ok(ev)
}

/// Product grid `t × r × s × d_h`, validated before any evaluation.
fn product_grid(cfg: &RunConfig) -> Result<Vec<GridPoint>, Outcome> {
    let mut axes = Vec::new();
    for key in ["t", "r", "s"] {
        match cfg.grid(key)? {
            Some(v) => axes.push(v),
            None => return Err(Outcome::Usage(format!("--{key} is required"))),
        }
    }
    let dh = cfg.grid("dh")?.unwrap_or_else(|| vec![0.0]);
    let mut grid = Vec::new();
    for &t in &axes[0] {
        for &r in &axes[1] {
            for &s in &axes[2] {
                for &d in &dh {
                    grid.push(GridPoint { t, r, s, dh: d });
                }
            }
        }
    }
    if grid.is_empty() {
        return Err(Outcome::Usage("empty grid".into()));
    }
    for g in &grid {
        if !(g.r > 0.0 && g.s > 0.0) {
            return Err(Outcome::Usage(format!("cone tip excluded: r and s must be positive (got r={}, s={})", g.r, g.s)));
        }
        if !(g.t > 0.0) {
            return Err(Outcome::Usage(format!("time must be positive, got {}", g.t)));
        }
        if !(g.dh >= 0.0) {
            return Err(Outcome::Usage(format!("d_h must be nonnegative, got {}", g.dh)));
        }
    }
    Ok(grid)
}

fn cmd_eval(cfg: &RunConfig) -> Result<Outcome, Outcome> {
    let ev = evaluator(cfg)?;
    let grid = product_grid(cfg)?;
    let mut csv = String::from("t,r,s,d_h,kernel\n");
    for (g, v) in grid.iter().zip(ev.evaluate_grid(&grid)) {
        match v {
            Ok(k) => {
                let _ = writeln!(csv, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", g.t, g.r, g.s, g.dh, k.value);
            }
            Err(e @ Error::TruncationFailure { .. }) => {
                return Err(Outcome::Truncation(format!(
                    "{e} at t={:.16e} r={:.16e} s={:.16e} d_h={:.16e}",
                    g.t, g.r, g.s, g.dh
                )));
            }
            Err(e) => return Err(classify(e)),
        }
    }
    write_output(cfg, &csv)?;
    Ok(Outcome::Ok)
}

fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, Outcome> {
    let suites = match cfg.get("suite").unwrap_or("all") {
        "all" => Suite::ALL.to_vec(),
        list => list
            .split(',')
            .map(|name| Suite::parse(name.trim()).ok_or_else(|| Outcome::Usage(format!("unknown suite '{name}'"))))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let defaults = VerifyOptions::default();
    let options = VerifyOptions {
        n: cfg.usize_or("n", defaults.n)?,
        seed: cfg.usize_or("seed", defaults.seed as usize)? as u64,
        samples: cfg.usize_or("samples", defaults.samples)?,
    };
    let mut table = String::new();
    let mut all_passed = true;
    for suite in suites {
        match run_suite(suite, &options) {
            Ok(report) => {
                all_passed &= report.passed;
                let _ = writeln!(table, "{report}");
            }
            Err(e @ (Error::InvalidArgument(_) | Error::GridTooCoarse(_))) => return Err(classify(e)),
            Err(e) => {
                all_passed = false;
                let _ = writeln!(table, "{:<11} FAIL error: {e}", suite.name());
            }
        }
    }
    write_output(cfg, &table)?;
    Ok(if all_passed { Outcome::Ok } else { Outcome::Fail })
}

fn cmd_fitbound(cfg: &RunConfig) -> Result<Outcome, Outcome> {
    let ev = evaluator(cfg)?;
    let grid = if ["t", "r", "s", "dh"].iter().any(|k| cfg.has(k)) {
        product_grid(cfg)?
    } else {
        default_bound_grid()
    };
    let candidates = cfg.grid("c-list")?.unwrap_or_else(|| vec![2.0, 4.0, 8.0, 16.0]);
    let report = fit_bound_constants(&ev, &grid, &candidates).map_err(classify)?;
    if let Some(path) = cfg.get("csv") {
        std::fs::write(path, scan_csv(&report.rows)).map_err(|e| Outcome::Usage(format!("cannot write {path}: {e}")))?;
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_output(cfg, &(json + "\n"))?;
    if report.big_c.is_finite() {
        Ok(Outcome::Ok)
    } else {
        let w = report.worst_point;
        eprintln!(
            "BOUND VIOLATED: kernel/bound ratios diverge for every candidate c (worst at t={} r={} s={} d_h={})",
            w.t, w.r, w.s, w.dh
        );
        Ok(Outcome::Fail)
    }
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

fn cmd_lemma_check(cfg: &RunConfig) -> Result<Outcome, Outcome> {
    let ev = evaluator(cfg)?;
    let z = cfg.grid("z")?.unwrap_or_else(|| log_spaced(1e-4, 1e2, 25));
    let diameter = ev.section().diameter();
    let delta = cfg
        .grid("delta")?
        .unwrap_or_else(|| (0..=12).map(|i| diameter * i as f64 / 12.0).collect());
    let options = LemmaOptions {
        epsilon0: cfg.f64_or("epsilon0", PI)?,
        n_max: cfg.get("n-max").map(|_| cfg.usize_or("n-max", 0)).transpose()?,
    };
    let report = lemma_key_check(&ev, &z, &delta, options).map_err(classify)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_output(cfg, &(json + "\n"))?;
    let finite = [report.small_z, report.small_z_beyond_pi, report.large_z_beyond_pi]
        .iter()
        .flatten()
        .all(|b| b.constant.is_finite())
        && report.best_n.map_or(true, |p| p.constant.is_finite());
    Ok(if finite { Outcome::Ok } else { Outcome::Fail })
}

fn cmd_fd_compare(cfg: &RunConfig) -> Result<Outcome, Outcome> {
    let d = FdCompareOptions::default();
    let options = FdCompareOptions {
        circumference: cfg.f64_or("L", d.circumference)?,
        potential: cfg.f64_or("a", d.potential)?,
        t0: cfg.f64_or("t0", d.t0)?,
        t1: cfg.f64_or("t1", d.t1)?,
        pole: cfg.f64_or("pole", d.pole)?,
        radial_nodes: cfg.usize_or("nr", d.radial_nodes)?,
        angular_nodes: cfg.usize_or("ntheta", d.angular_nodes)?,
        steps: cfg.usize_or("steps", d.steps)?,
        floor: d.floor,
    };
    let cmp = fd_compare(&options).map_err(classify)?;
    if let Some(path) = cfg.get("out") {
        let m = cmp.solution.angles.len();
        let mut csv = String::from("r,theta,fd,series\n");
        for (i, r) in cmp.solution.radii.iter().enumerate() {
            for (j, theta) in cmp.solution.angles.iter().enumerate() {
                let _ = writeln!(
                    csv,
                    "{r:.16e},{theta:.16e},{:.16e},{:.16e}",
                    cmp.solution.value(1, i, j),
                    cmp.series[i * m + j]
                );
            }
        }
        std::fs::write(path, csv).map_err(|e| Outcome::Usage(format!("cannot write {path}: {e}")))?;
    }
    let report = cmp.report();
    println!("{report}");
    Ok(if report.passed { Outcome::Ok } else { Outcome::Fail })
}

fn finish(name: Option<&str>, outcome: Outcome) -> ExitCode {
    let (status, code) = match outcome {
        Outcome::Ok => ("ok", 0),
        Outcome::Fail => ("fail", 1),
        Outcome::Usage(message) => {
            eprintln!("error: {message}");
            let mut cmd = Cli::command();
            cmd.build();
            let usage = match name.and_then(|n| cmd.find_subcommand_mut(n)) {
                Some(sub) => sub.render_usage(),
                None => cmd.render_usage(),
            };
            eprintln!("{usage}");
            ("usage", 2)
        }
        Outcome::Truncation(message) => {
            eprintln!("error: {message}");
            println!("{message}");
            ("fail", 3)
        }
    };
    println!("status={status}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                println!("status=usage");
                ExitCode::from(2)
            } else {
                println!("status=ok");
                ExitCode::SUCCESS
            };
        }
    };
    let (name, flags, run): (&str, &Flags, fn(&RunConfig) -> Result<Outcome, Outcome>) = match &cli.command {
        Command::Eval(f) => ("eval", f, cmd_eval),
        Command::Verify(f) => ("verify", f, cmd_verify),
        Command::Fitbound(f) => ("fitbound", f, cmd_fitbound),
        Command::LemmaCheck(f) => ("lemma-check", f, cmd_lemma_check),
        Command::FdCompare(f) => ("fd-compare", f, cmd_fd_compare),
    };
    let outcome = match flags.merge() {
        Ok(cfg) => run(&cfg).unwrap_or_else(|o| o),
        Err(e) => e.into(),
    };
    finish(Some(name), outcome)
}

