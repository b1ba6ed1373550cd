//! Layer-by-layer approximation of a target unitary.
//!
//! Each step fits one layer A_t to the current residual R_t from a batch of
//! random starts, then sets R_{t+1} = R_t·A_t†. The accepted layers are
//! prepended, so the schedule multiplies out to A_T ⋯ A_1 ≈ U.

pub mod optim;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{Ansatz, ThetaSchedule};
use crate::error::{Error, Result};
use crate::matcore::{CMat, C64};

pub use optim::{levenberg_marquardt, nelder_mead, powell, OptOptions, OptOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    NelderMead,
    Powell,
    /// Levenberg–Marquardt on the entrywise residual with a central-difference Jacobian.
    FiniteDifferenceGradient,
}

impl FromStr for Optimizer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nelder-mead" | "nm" => Ok(Optimizer::NelderMead),
            "powell" => Ok(Optimizer::Powell),
            "finite-difference-gradient" | "fd-gradient" | "gradient" | "lm" => Ok(Optimizer::FiniteDifferenceGradient),
            other => Err(Error::InvalidArgument(format!("unknown optimizer {other:?}"))),
        }
    }
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Optimizer::NelderMead => "nelder-mead",
            Optimizer::Powell => "powell",
            Optimizer::FiniteDifferenceGradient => "finite-difference-gradient",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitDistribution {
    /// Uniform on [0, 2π).
    Uniform,
    /// Normal(π, σ) clipped to [0, 2π).
    Normal { sigma: f64 },
}

impl FromStr for InitDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(InitDistribution::Uniform),
            "normal" => Ok(InitDistribution::Normal { sigma: PI / 2.0 }),
            other => Err(Error::InvalidArgument(format!("unknown init distribution {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ApproxConfig {
    pub epsilon: f64,
    pub max_layers: usize,
    pub restarts: usize,
    pub init: InitDistribution,
    pub optimizer: Optimizer,
    /// Objective evaluations allowed per restart.
    pub max_evals: usize,
    pub seed: u64,
    pub phase_invariant: bool,
    /// Starting points for steps t = 1, 2, …; each replaces the first random start of its step.
    pub warm_start: Vec<Vec<f64>>,
    /// Wall-clock budget for the whole run.
    pub time_budget: Option<Duration>,
    /// Restarts evaluated per parallel batch. Results do not depend on the thread count.
    pub chunk: usize,
}

impl ApproxConfig {
    /// Defaults scaled to the qubit count: 32 restarts up to n = 2, 128 beyond.
    pub fn for_qubits(n: u32) -> Self {
        let d = 1usize << n;
        let k = d * d - 1;
        ApproxConfig {
            epsilon: 1e-6,
            max_layers: 1,
            restarts: if n <= 2 { 32 } else { 128 },
            init: InitDistribution::Uniform,
            optimizer: Optimizer::FiniteDifferenceGradient,
            max_evals: 4000 * k,
            seed: 0,
            phase_invariant: false,
            warm_start: Vec::new(),
            time_budget: None,
            chunk: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        if self.restarts == 0 || self.max_evals == 0 || self.max_layers == 0 || self.chunk == 0 {
            return Err(Error::InvalidArgument("restarts, max_evals, max_layers and chunk must be at least 1".into()));
        }
        if let InitDistribution::Normal { sigma } = self.init {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::InvalidArgument("normal init needs sigma > 0".into()));
            }
        }
        Ok(())
    }
}

/// Outcome of one approximation run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproxReport {
    pub n: u32,
    /// Error after each accepted step.
    pub layer_errors: Vec<f64>,
    /// Best cost of every restart that ran in the accepted batch of each step.
    pub restart_costs: Vec<Vec<f64>>,
    pub total_evals: usize,
    pub wall_seconds: f64,
    pub schedule: ThetaSchedule,
    pub final_error: f64,
    pub converged: bool,
    pub phase_invariant: bool,
    /// The target was divided by this scalar to land in SU(d).
    pub det_scale: [f64; 2],
    pub optimizer: Optimizer,
    pub seed: u64,
}

impl ApproxReport {
    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// ‖u − a‖_F, or sqrt(2d − 2|tr(u†a)|) when phase invariant.
pub fn distance(u: &CMat, a: &CMat, phase_invariant: bool) -> Result<f64> {
    if phase_invariant {
        crate::matcore::phase_invariant_distance(u, a)
    } else {
        crate::matcore::frobenius_distance(u, a)
    }
}

pub fn cost(ansatz: &Ansatz, u: &CMat, schedule: &ThetaSchedule, phase_invariant: bool) -> Result<f64> {
    if u.dim() != ansatz.dim() {
        return Err(Error::DimensionMismatch { expected: ansatz.dim(), got: u.dim() });
    }
    distance(u, &ansatz.assemble(schedule)?, phase_invariant)
}

/// Residual of one layer against a fixed target, optionally aligned in global phase.
fn layer_residual(ansatz: &Ansatz, target: &CMat, theta: &[f64], phase_invariant: bool, out: &mut [f64]) {
    let a = ansatz.layer(theta).expect("angle count checked by caller");
    let phase = if phase_invariant {
        let overlap: C64 = a.as_slice().iter().zip(target.as_slice()).map(|(x, y)| x.conj() * y).sum();
        if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    } else {
        C64::new(1.0, 0.0)
    };
    for (i, (x, y)) in a.as_slice().iter().zip(target.as_slice()).enumerate() {
        let z = x * phase - y;
        out[2 * i] = z.re;
        out[2 * i + 1] = z.im;
    }
}

fn layer_cost(ansatz: &Ansatz, target: &CMat, theta: &[f64], phase_invariant: bool) -> f64 {
    let mut r = vec![0.0; 2 * ansatz.dim() * ansatz.dim()];
    layer_residual(ansatz, target, theta, phase_invariant, &mut r);
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn restart_rng(seed: u64, step: usize, attempt: usize, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((step as u64) << 40) | ((attempt as u64) << 32) | restart as u64);
    rng
}

fn initial_point(cfg: &ApproxConfig, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match cfg.init {
        InitDistribution::Uniform => (0..k).map(|_| rng.random_range(0.0..TAU)).collect(),
        InitDistribution::Normal { sigma } => {
            let normal = Normal::new(PI, sigma).expect("sigma validated");
            let top = TAU.next_down();
            (0..k).map(|_| normal.sample(rng).clamp(0.0, top)).collect()
        }
    }
}

/// Runs one local optimization of a layer against `target`.
pub fn optimize_layer(
    ansatz: &Ansatz,
    target: &CMat,
    x0: &[f64],
    cfg: &ApproxConfig,
    deadline: Option<Instant>,
) -> OptOutcome {
    let opts = OptOptions { max_evals: cfg.max_evals, target: cfg.epsilon * 1e-3, deadline, ..Default::default() };
    let pi = cfg.phase_invariant;
    match cfg.optimizer {
        Optimizer::NelderMead => nelder_mead(&|t| layer_cost(ansatz, target, t, pi), x0, &opts),
        Optimizer::Powell => powell(&|t| layer_cost(ansatz, target, t, pi), x0, &opts),
        Optimizer::FiniteDifferenceGradient => {
            let m = 2 * ansatz.dim() * ansatz.dim();
            let res = |t: &[f64], r: &mut [f64]| layer_residual(ansatz, target, t, pi, r);
            let mut out = levenberg_marquardt(&res, m, x0, 1e-6, &opts);
            // Report the cost exactly as the other optimizers do.
            out.f = layer_cost(ansatz, target, &out.x, pi);
            out
        }
    }
}

struct Batch {
    best: Vec<f64>,
    best_cost: f64,
    costs: Vec<f64>,
    evals: usize,
}

fn run_batch(
    ansatz: &Ansatz,
    target: &CMat,
    cfg: &ApproxConfig,
    step: usize,
    attempt: usize,
    deadline: Option<Instant>,
) -> Batch {
    let k = ansatz.params();
    let mut costs = Vec::with_capacity(cfg.restarts);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut evals = 0;
    let mut start = 0;
    while start < cfg.restarts {
        let end = (start + cfg.chunk).min(cfg.restarts);
        let outcomes: Vec<OptOutcome> = (start..end)
            .into_par_iter()
            .map(|r| {
                // From step 2 on, restart 0 starts at the identity layer, whose cost is the
                // previous error, so a descent method cannot make the fit worse.
                let x0 = match cfg.warm_start.get(step - 1) {
                    Some(w) if r == 0 && attempt == 0 && w.len() == k => w.clone(),
                    _ if r == 0 && attempt == 0 && step > 1 => vec![0.0; k],
                    _ => initial_point(cfg, k, &mut restart_rng(cfg.seed, step, attempt, r)),
                };
                optimize_layer(ansatz, target, &x0, cfg, deadline)
            })
            .collect();
        for o in outcomes {
            evals += o.evals;
            costs.push(o.f);
            // Strict comparison keeps the lowest restart index on ties.
            if best.as_ref().is_none_or(|(c, _)| o.f < *c) {
                best = Some((o.f, o.x));
            }
        }
        start = end;
        let done = best.as_ref().is_some_and(|(c, _)| *c <= cfg.epsilon);
        if done || deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
    }
    let (best_cost, best) = best.expect("at least one restart");
    Batch { best, best_cost, costs, evals }
}

/// Greedy layered approximation of `u`.
pub fn approximate(u: &CMat, cfg: &ApproxConfig) -> Result<ApproxReport> {
    cfg.validate()?;
    let started = Instant::now();
    let deadline = cfg.time_budget.map(|b| started + b);
    let d = u.dim();
    if !d.is_power_of_two() || d < 2 {
        return Err(Error::InvalidArgument(format!("dimension {d} is not a qubit dimension")));
    }
    let defect = u.unitarity_defect();
    if defect > 1e-8 {
        return Err(Error::NotUnitary { defect });
    }
    let n = d.trailing_zeros();
    let ansatz = Ansatz::new(n)?;

    let (target, scale) = if (u.det() - C64::new(1.0, 0.0)).norm() > 1e-12 {
        u.to_special_unitary()
    } else {
        (u.clone(), C64::new(1.0, 0.0))
    };

    let mut residual = target.clone();
    let mut layers: Vec<Vec<f64>> = Vec::new();
    let mut layer_errors = Vec::new();
    let mut restart_costs = Vec::new();
    let mut total_evals = 0;
    let mut prev = f64::INFINITY;

    for step in 1..=cfg.max_layers {
        let mut accepted = None;
        for attempt in 0..4 {
            let batch = run_batch(&ansatz, &residual, cfg, step, attempt, deadline);
            total_evals += batch.evals;
            if batch.best_cost <= prev {
                accepted = Some(batch);
                break;
            }
            if deadline.is_some_and(|dl| Instant::now() >= dl) {
                break;
            }
        }
        let Some(batch) = accepted else { break };
        let a = ansatz.layer(&batch.best)?;
        residual = &residual * &a.adjoint();
        layers.insert(0, batch.best);
        layer_errors.push(batch.best_cost);
        restart_costs.push(batch.costs);
        prev = batch.best_cost;
        if prev <= cfg.epsilon || deadline.is_some_and(|dl| Instant::now() >= dl) {
            break;
        }
    }

    let schedule = if layers.is_empty() {
        ansatz.zero_schedule(1)
    } else {
        ThetaSchedule { n, layers, index_map: ansatz.index_map().to_vec() }
    };
    let final_error = cost(&ansatz, &target, &schedule, cfg.phase_invariant)?;
    Ok(ApproxReport {
        n,
        layer_errors,
        restart_costs,
        total_evals,
        wall_seconds: started.elapsed().as_secs_f64(),
        schedule,
        final_error,
        converged: final_error <= cfg.epsilon,
        phase_invariant: cfg.phase_invariant,
        det_scale: [scale.re, scale.im],
        optimizer: cfg.optimizer,
        seed: cfg.seed,
    })
}
