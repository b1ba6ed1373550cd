//! Benchmark suites over the built-in targets.
//!
//! The results table leaves out wall time so a fixed seed reproduces it byte for byte;
//! timings travel separately in [`BenchResult::wall_seconds`].

use std::fmt::Write as _;
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::approx::{approximate, ApproxConfig, Optimizer};
use crate::assembly::Ansatz;
use crate::circuit::{cnot_bound, gate_counts, rz_bound, synthesize};
use crate::error::Result;
use crate::targets::TargetSpec;

#[derive(Clone, Debug, Serialize)]
pub struct BenchConfig {
    pub seed: u64,
    pub layers: usize,
    /// None keeps the per-size default.
    pub restarts: Option<usize>,
    pub epsilon: f64,
    pub optimizer: Optimizer,
    pub max_evals: Option<usize>,
    pub phase_invariant: bool,
    /// Per target; a budgeted run is no longer reproducible.
    pub time_budget_secs: Option<f64>,
}

impl BenchConfig {
    pub fn new(seed: u64) -> Self {
        BenchConfig {
            seed,
            layers: 1,
            restarts: None,
            epsilon: 1e-6,
            optimizer: Optimizer::FiniteDifferenceGradient,
            max_evals: None,
            phase_invariant: false,
            time_budget_secs: None,
        }
    }

    pub fn approx_config(&self, n: u32) -> ApproxConfig {
        let mut cfg = ApproxConfig::for_qubits(n);
        cfg.seed = self.seed;
        cfg.max_layers = self.layers;
        cfg.epsilon = self.epsilon;
        cfg.optimizer = self.optimizer;
        cfg.phase_invariant = self.phase_invariant;
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        if let Some(m) = self.max_evals {
            cfg.max_evals = m;
        }
        cfg.time_budget = self.time_budget_secs.map(Duration::from_secs_f64);
        cfg
    }

    /// SHA-256 of the JSON encoding, hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub name: String,
    pub n: u32,
    pub layers: usize,
    pub final_error: f64,
    pub wall_seconds: f64,
    pub cnot: usize,
    pub rz: usize,
    pub seed: u64,
    /// None on success.
    pub failure: Option<String>,
}

impl BenchResult {
    pub fn within_bounds(&self) -> bool {
        self.failure.is_some()
            || (self.cnot as i64 <= cnot_bound(self.n, self.layers) && self.rz as i64 <= rz_bound(self.n, self.layers))
    }
}

fn run_one(name: &str, cfg: &BenchConfig) -> Result<BenchResult> {
    let spec = TargetSpec::parse(name);
    let u = spec.resolve()?;
    let n = u.dim().trailing_zeros();
    let report = approximate(&u, &cfg.approx_config(n))?;
    let circuit = synthesize(&Ansatz::new(n)?, &report.schedule)?.lowered()?;
    let counts = gate_counts(&circuit)?;
    Ok(BenchResult {
        name: spec.name(),
        n,
        layers: report.schedule.num_layers(),
        final_error: report.final_error,
        wall_seconds: report.wall_seconds,
        cnot: counts.cnot,
        rz: counts.rz,
        seed: cfg.seed,
        failure: None,
    })
}

/// Runs every target; failures are recorded and the suite carries on.
pub fn bench_suite(names: &[&str], cfg: &BenchConfig) -> Vec<BenchResult> {
    names
        .par_iter()
        .map(|name| {
            run_one(name, cfg).unwrap_or_else(|e| BenchResult {
                name: name.to_string(),
                n: 0,
                layers: 0,
                final_error: f64::NAN,
                wall_seconds: 0.0,
                cnot: 0,
                rz: 0,
                seed: cfg.seed,
                failure: Some(e.to_string()),
            })
        })
        .collect()
}

pub const RESULTS_COLUMNS: &str = "target\tn\tlayers\terror\tcnot\trz\tseed\tstatus";

/// Tab-separated table with a config-hash header.
pub fn results_table(results: &[BenchResult], cfg: &BenchConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# srbbc bench config-sha256={}", cfg.hash());
    let _ = writeln!(out, "# {RESULTS_COLUMNS}");
    for r in results {
        let status = match &r.failure {
            None => "ok".to_string(),
            Some(m) => format!("failed: {}", m.replace(['\t', '\n'], " ")),
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.6e}\t{}\t{}\t{}\t{}",
            r.name, r.n, r.layers, r.final_error, r.cnot, r.rz, r.seed, status
        );
    }
    out
}
