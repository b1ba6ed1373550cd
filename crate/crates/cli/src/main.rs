use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use srbbc_core::approx::{approximate, ApproxConfig, InitDistribution, Optimizer};
use srbbc_core::assembly::{Ansatz, ThetaSchedule};
use srbbc_core::bench::{bench_suite, results_table, BenchConfig};
use srbbc_core::circuit::{self, cnot_bound, gate_counts, lift_circuit, rz_bound, LiftSpec};
use srbbc_core::matcore::{frobenius_distance, phase_invariant_distance};
use srbbc_core::srbb::{build_rbb, build_srbb, summary_line};
use srbbc_core::targets::{TargetSpec, FOUR_QUBIT_SUITE, THREE_QUBIT_SUITE, TWO_QUBIT_SUITE};

#[derive(Parser)]
#[command(
    name = "srbbc",
    version,
    about = "Approximate unitaries with recursive block bases and emit CNOT + rotation circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the basis elements for n qubits (or a general dimension).
    Basis(BasisArgs),
    /// Fit a layer schedule to a target unitary.
    Compile(CompileArgs),
    /// Turn a schedule into an OpenQASM 2.0 circuit.
    Synth(SynthArgs),
    /// Compare a circuit with a target matrix.
    Verify(VerifyArgs),
    /// Gate counts against the per-layer bounds.
    Count(CountArgs),
    /// Build the (n+1)-qubit circuit template from an n-qubit schedule.
    Lift(LiftArgs),
    /// Run a target suite and write a results table.
    Bench(BenchArgs),
}

#[derive(Args)]
struct BasisArgs {
    /// Qubit count.
    #[arg(long, conflicts_with = "dim", required_unless_present = "dim")]
    n: Option<u32>,
    /// Matrix dimension for the generic basis (odd allowed).
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Uniform,
    Normal,
}

#[derive(Args)]
struct Search {
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// nelder-mead, powell or finite-difference-gradient.
    #[arg(long)]
    optimizer: Option<Optimizer>,
    #[arg(long)]
    max_evals: Option<usize>,
    #[arg(long)]
    phase_invariant: bool,
    /// Wall-clock budget in seconds per target.
    #[arg(long)]
    time_budget: Option<f64>,
}

#[derive(Args)]
struct CompileArgs {
    /// Matrix file (JSON with re/im) or builtin:NAME.
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    search: Search,
    #[arg(long, value_enum, default_value = "uniform")]
    init: Init,
    /// Standard deviation for --init normal.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    sigma: f64,
    /// Full report (JSON).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Fitted schedule (JSON).
    #[arg(long)]
    schedule_out: Option<PathBuf>,
    /// Synthesized circuit (OpenQASM 2.0).
    #[arg(long)]
    qasm_out: Option<PathBuf>,
    /// Exit with status 2 when epsilon is not reached.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// OpenQASM 2.0 file.
    #[arg(long)]
    circuit: PathBuf,
    /// Matrix file or builtin:NAME.
    #[arg(long)]
    target: String,
    /// Fail when the distance exceeds this value.
    #[arg(long)]
    tol: Option<f64>,
    /// Compare up to a global phase.
    #[arg(long)]
    phase_invariant: bool,
}

#[derive(Args)]
struct CountArgs {
    /// Count a circuit file instead of the synthesized template.
    #[arg(long, conflicts_with = "n")]
    circuit: Option<PathBuf>,
    #[arg(long, required_unless_present = "circuit")]
    n: Option<u32>,
    /// Layers for the bound; read from segment markers when omitted for a file.
    #[arg(long)]
    layers: Option<usize>,
}

#[derive(Args)]
struct LiftArgs {
    /// n-qubit schedule whose circuit is lifted.
    #[arg(long)]
    schedule: PathBuf,
    /// (n+1)-qubit schedule supplying the lifted angles; without it the tables are duplicated.
    #[arg(long)]
    angles: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    seed: u64,
    /// two, three, four or all.
    #[arg(long, default_value = "two", conflicts_with = "targets")]
    suite: String,
    /// Comma-separated target list.
    #[arg(long, value_delimiter = ',')]
    targets: Vec<String>,
    #[command(flatten)]
    search: Search,
    /// Results table; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_schedule(path: &Path) -> Result<ThetaSchedule> {
    ThetaSchedule::from_text(&read(path)?).with_context(|| format!("parsing schedule {}", path.display()))
}

fn apply_search(cfg: &mut ApproxConfig, s: &Search) {
    if let Some(l) = s.layers {
        cfg.max_layers = l;
    }
    if let Some(r) = s.restarts {
        cfg.restarts = r;
    }
    if let Some(e) = s.epsilon {
        cfg.epsilon = e;
    }
    if let Some(o) = s.optimizer {
        cfg.optimizer = o;
    }
    if let Some(m) = s.max_evals {
        cfg.max_evals = m;
    }
    cfg.phase_invariant = s.phase_invariant;
    cfg.time_budget = s.time_budget.map(Duration::from_secs_f64);
}

fn basis(a: BasisArgs) -> Result<ExitCode> {
    let b = match (a.n, a.dim) {
        (Some(n), _) => build_srbb(n)?,
        (None, Some(d)) => build_rbb(d)?,
        _ => unreachable!("clap enforces one of --n/--dim"),
    };
    println!("# j kind pair pauli trace");
    for e in &b.elements {
        println!("{}", summary_line(e));
    }
    Ok(ExitCode::SUCCESS)
}

fn compile(a: CompileArgs) -> Result<ExitCode> {
    let spec = TargetSpec::parse(&a.target);
    let u = spec.resolve().with_context(|| format!("loading target {spec}"))?;
    if !u.dim().is_power_of_two() || u.dim() < 2 {
        bail!("target dimension {} is not a power of two", u.dim());
    }
    let n = u.dim().trailing_zeros();
    let mut cfg = ApproxConfig::for_qubits(n);
    cfg.seed = a.seed;
    cfg.init = match a.init {
        Init::Uniform => InitDistribution::Uniform,
        Init::Normal => InitDistribution::Normal { sigma: a.sigma },
    };
    apply_search(&mut cfg, &a.search);
    let report = approximate(&u, &cfg)?;

    println!("target {spec}");
    for (t, e) in report.layer_errors.iter().enumerate() {
        println!("layer {} error {:e}", t + 1, e);
    }
    println!("final_error {:e}", report.final_error);
    println!("converged {}", report.converged);
    println!("evaluations {}", report.total_evals);
    println!("wall_seconds {:.3}", report.wall_seconds);

    if let Some(p) = &a.report {
        write(p, &report.to_text())?;
    }
    if let Some(p) = &a.schedule_out {
        write(p, &report.schedule.to_text())?;
    }
    if let Some(p) = &a.qasm_out {
        let c = circuit::synthesize(&Ansatz::new(n)?, &report.schedule)?.lowered()?;
        write(p, &circuit::export(&c)?)?;
    }
    if a.strict && !report.converged {
        eprintln!("error: epsilon {:e} not reached", cfg.epsilon);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn synth(a: SynthArgs) -> Result<ExitCode> {
    let s = read_schedule(&a.schedule)?;
    let c = circuit::synthesize(&Ansatz::new(s.n)?, &s)?.lowered()?;
    write(&a.out, &circuit::export(&c)?)?;
    let k = gate_counts(&c)?;
    println!("cnot {} rz {} ry {}", k.cnot, k.rz, k.ry);
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let c = circuit::parse(&read(&a.circuit)?)?;
    let spec = TargetSpec::parse(&a.target);
    let u = spec.resolve().with_context(|| format!("loading target {spec}"))?;
    if c.n > 10 {
        bail!("circuit has {} qubits; evaluation supports at most 10", c.n);
    }
    let m = circuit::evaluate(&c);
    let plain = frobenius_distance(&m, &u)?;
    let phase = phase_invariant_distance(&m, &u)?;
    println!("distance {plain:e}");
    println!("phase_invariant_distance {phase:e}");
    let reported = if a.phase_invariant { phase } else { plain };
    if let Some(tol) = a.tol {
        if reported > tol {
            eprintln!("error: distance {reported:e} exceeds {tol:e}");
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn count(a: CountArgs) -> Result<ExitCode> {
    let (c, layers) = match (&a.circuit, a.n) {
        (Some(p), _) => {
            let c = circuit::parse(&read(p)?)?;
            let marked = c.segments.iter().map(|s| s.layer).max().unwrap_or(0);
            let layers = a.layers.unwrap_or(marked.max(1));
            (c, layers)
        }
        (None, Some(n)) => {
            let layers = a.layers.unwrap_or(1);
            let ansatz = Ansatz::new(n)?;
            (circuit::synthesize(&ansatz, &ansatz.zero_schedule(layers))?.lowered()?, layers)
        }
        _ => unreachable!("clap enforces one of --circuit/--n"),
    };
    let k = gate_counts(&c)?;
    let (cb, rb) = (cnot_bound(c.n, layers), rz_bound(c.n, layers));
    println!("n {} layers {layers}", c.n);
    println!("cnot {} bound {cb}", k.cnot);
    println!("rz {} bound {rb}", k.rz);
    println!("ry {}", k.ry);
    let ok = k.cnot as i64 <= cb && k.rz as i64 <= rb;
    println!("within_bounds {ok}");
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn lift(a: LiftArgs) -> Result<ExitCode> {
    let s = read_schedule(&a.schedule)?;
    let small = circuit::synthesize(&Ansatz::new(s.n)?, &s)?;
    let spec = match &a.angles {
        None => LiftSpec::Template,
        Some(p) => {
            let big = read_schedule(p)?;
            if big.n != s.n + 1 {
                bail!("angle schedule has {} qubits, expected {}", big.n, s.n + 1);
            }
            LiftSpec::Schedule(big)
        }
    };
    let lifted = lift_circuit(&small, &spec)?.lowered()?;
    write(&a.out, &circuit::export(&lifted)?)?;
    let k = gate_counts(&lifted)?;
    println!("n {} cnot {} rz {} ry {}", lifted.n, k.cnot, k.rz, k.ry);
    Ok(ExitCode::SUCCESS)
}

fn bench(a: BenchArgs) -> Result<ExitCode> {
    let names: Vec<String> = if !a.targets.is_empty() {
        a.targets.clone()
    } else {
        let suite: Vec<&str> = match a.suite.as_str() {
            "two" => TWO_QUBIT_SUITE.to_vec(),
            "three" => THREE_QUBIT_SUITE.to_vec(),
            "four" => FOUR_QUBIT_SUITE.to_vec(),
            "all" => [TWO_QUBIT_SUITE, THREE_QUBIT_SUITE, FOUR_QUBIT_SUITE].concat(),
            other => bail!("unknown suite {other:?} (two, three, four, all)"),
        };
        suite.into_iter().map(String::from).collect()
    };
    let s = &a.search;
    let mut cfg = BenchConfig::new(a.seed);
    cfg.layers = s.layers.unwrap_or(1);
    cfg.restarts = s.restarts;
    cfg.epsilon = s.epsilon.unwrap_or(cfg.epsilon);
    cfg.optimizer = s.optimizer.unwrap_or(cfg.optimizer);
    cfg.max_evals = s.max_evals;
    cfg.phase_invariant = s.phase_invariant;
    cfg.time_budget_secs = s.time_budget;
    if cfg.layers == 0 || cfg.restarts == Some(0) || !(cfg.epsilon.is_finite() && cfg.epsilon > 0.0) {
        bail!("layers and restarts must be at least 1 and epsilon positive");
    }

    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let results = bench_suite(&refs, &cfg);
    for r in &results {
        eprintln!("{}\t{:.3}s", r.name, r.wall_seconds);
    }
    let table = results_table(&results, &cfg);
    match &a.out {
        Some(p) => write(p, &table)?,
        None => print!("{table}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SRBBC_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("SRBBC_THREADS={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let run = || -> Result<ExitCode> {
        init_threads()?;
        match cli.command {
            Command::Basis(a) => basis(a),
            Command::Compile(a) => compile(a),
            Command::Synth(a) => synth(a),
            Command::Verify(a) => verify(a),
            Command::Count(a) => count(a),
            Command::Lift(a) => lift(a),
            Command::Bench(a) => bench(a),
        }
    };
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
