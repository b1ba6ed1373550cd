//! Gate-level circuits over CNOT, R_Z and R_Y.
//!
//! Qubit 1 is the most significant bit of a basis-state index. Gates act in
//! list order, so the unitary of [g₁, g₂, …] is ⋯g₂·g₁. Rotations follow
//! R_Z(θ) = diag(e^{iθ}, e^{−iθ}) and R_Y(θ) = [[cos θ, sin θ], [−sin θ, cos θ]].

pub mod lift;
pub mod mux;
pub mod qasm;
pub mod synth;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assembly::Parity;
use crate::error::{Error, Result};
use crate::matcore::{CMat, C64};

pub use lift::{lift_circuit, lift_pit, LiftSpec};
pub use mux::{lower_multiplexed, mux_matrix};
pub use qasm::{export, parse};
pub use synth::{
    decompose_block_diagonal, synthesize, synthesize_block_diagonal, synthesize_diagonal, synthesize_layer,
    synthesize_pit, BlockDecomposition,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Control {
    pub qubit: u32,
    /// Open controls select on |0⟩.
    pub open: bool,
}

impl Control {
    pub fn filled(qubit: u32) -> Self {
        Control { qubit, open: false }
    }
}

/// Block diagonal of 2^k single-qubit rotations on `target`, selected by the
/// control values; the first control is the most significant bit of the angle index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplexedRotation {
    pub axis: Axis,
    pub controls: Vec<Control>,
    pub target: u32,
    pub angles: Vec<f64>,
    /// Lower with the CNOTs leading instead of trailing.
    pub mirrored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Cnot { control: u32, target: u32 },
    Rz { qubit: u32, angle: f64 },
    Ry { qubit: u32, angle: f64 },
    Mux(MultiplexedRotation),
}

impl Gate {
    pub fn cnot(control: u32, target: u32) -> Gate {
        Gate::Cnot { control, target }
    }

    fn qubits(&self) -> Vec<u32> {
        match self {
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Rz { qubit, .. } | Gate::Ry { qubit, .. } => vec![*qubit],
            Gate::Mux(m) => m.controls.iter().map(|c| c.qubit).chain([m.target]).collect(),
        }
    }

    pub fn validate(&self, n: u32) -> Result<()> {
        let qs = self.qubits();
        if qs.iter().any(|&q| q == 0 || q > n) {
            return Err(Error::InvalidArgument(format!("gate {self:?} touches a qubit outside 1..={n}")));
        }
        let mut sorted = qs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qs.len() {
            return Err(Error::InvalidArgument(format!("gate {self:?} repeats a qubit")));
        }
        if let Gate::Mux(m) = self {
            if m.angles.len() != 1 << m.controls.len() {
                return Err(Error::AngleCount { expected: 1 << m.controls.len(), got: m.angles.len() });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentKind {
    /// ζ merged with the adjacent-pair factor of Ψ.
    Head,
    /// Block-diagonal core of group x (`psi.x` for even, `phi.x` for odd).
    Core {
        parity: Parity,
        x: usize,
    },
    /// CNOT network realising ΠT.
    PiT {
        parity: Parity,
        x: usize,
    },
    /// Stand-alone diagonal staircase.
    Zeta,
    Free,
}

impl SegmentKind {
    pub fn label(&self) -> String {
        match self {
            SegmentKind::Head => "head".into(),
            SegmentKind::Core { parity: Parity::Even, x } => format!("psi.{x}"),
            SegmentKind::Core { parity: Parity::Odd, x } => format!("phi.{x}"),
            SegmentKind::PiT { parity, x } => format!("pit.{}.{x}", parity.tag()),
            SegmentKind::Zeta => "zeta".into(),
            SegmentKind::Free => "free".into(),
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        let bad = || Error::MissingMetadata(format!("unknown segment label {s:?}"));
        let parts: Vec<&str> = s.split('.').collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let parity = |t: &str| match t {
            "e" => Ok(Parity::Even),
            "o" => Ok(Parity::Odd),
            _ => Err(bad()),
        };
        Ok(match parts.as_slice() {
            ["head"] => SegmentKind::Head,
            ["zeta"] => SegmentKind::Zeta,
            ["free"] => SegmentKind::Free,
            ["psi", x] => SegmentKind::Core { parity: Parity::Even, x: num(x)? },
            ["phi", x] => SegmentKind::Core { parity: Parity::Odd, x: num(x)? },
            ["pit", p, x] => SegmentKind::PiT { parity: parity(p)?, x: num(x)? },
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for SegmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub layer: usize,
    pub kind: SegmentKind,
    pub gates: Vec<Gate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: u32,
    pub segments: Vec<Segment>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub cnot: usize,
    pub rz: usize,
    pub ry: usize,
}

impl Circuit {
    pub fn new(n: u32) -> Self {
        Circuit { n, segments: Vec::new() }
    }

    /// A circuit made of one free segment.
    pub fn from_gates(n: u32, gates: Vec<Gate>) -> Self {
        Circuit { n, segments: vec![Segment { layer: 0, kind: SegmentKind::Free, gates }] }
    }

    pub fn push_segment(&mut self, layer: usize, kind: SegmentKind, gates: Vec<Gate>) {
        self.segments.push(Segment { layer, kind, gates });
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.segments.iter().flat_map(|s| s.gates.iter())
    }

    pub fn has_macros(&self) -> bool {
        self.gates().any(|g| matches!(g, Gate::Mux(_)))
    }

    pub fn validate(&self) -> Result<()> {
        self.gates().try_for_each(|g| g.validate(self.n))
    }

    /// Every macro expanded, then adjacent identical CNOT pairs removed inside each segment.
    pub fn lowered(&self) -> Result<Circuit> {
        let mut out = Circuit::new(self.n);
        for seg in &self.segments {
            let mut gates = Vec::new();
            for g in &seg.gates {
                match g {
                    Gate::Mux(m) => gates.extend(lower_multiplexed(m)?),
                    other => gates.push(other.clone()),
                }
            }
            out.push_segment(seg.layer, seg.kind, cancel_cnot_pairs(gates));
        }
        Ok(out)
    }
}

/// Removes adjacent identical CNOTs until none remain.
pub fn cancel_cnot_pairs(gates: Vec<Gate>) -> Vec<Gate> {
    let mut out: Vec<Gate> = Vec::with_capacity(gates.len());
    for g in gates {
        if let (Gate::Cnot { .. }, Some(prev @ Gate::Cnot { .. })) = (&g, out.last()) {
            if *prev == g {
                out.pop();
                continue;
            }
        }
        out.push(g);
    }
    out
}

/// Exact counts of a lowered circuit.
pub fn gate_counts(c: &Circuit) -> Result<GateCounts> {
    let mut k = GateCounts::default();
    for g in c.gates() {
        match g {
            Gate::Cnot { .. } => k.cnot += 1,
            Gate::Rz { .. } => k.rz += 1,
            Gate::Ry { .. } => k.ry += 1,
            Gate::Mux(_) => return Err(Error::MacroPresent),
        }
    }
    Ok(k)
}

/// L·(2·4ⁿ + (n−5)·2ⁿ).
pub fn cnot_bound(n: u32, layers: usize) -> i64 {
    let d = 1i64 << n;
    layers as i64 * (2 * d * d + (n as i64 - 5) * d)
}

/// L·((3/2)·4ⁿ − (5/2)·2ⁿ + 1).
pub fn rz_bound(n: u32, layers: usize) -> i64 {
    let d = 1i64 << n;
    layers as i64 * ((3 * d * d - 5 * d) / 2 + 1)
}

#[inline]
fn bit_of(n: u32, q: u32) -> usize {
    1usize << (n - q)
}

/// m ← g·m for one gate.
pub(crate) fn apply_gate_left(m: &mut CMat, n: u32, g: &Gate) {
    let d = m.dim();
    let data = m.as_mut_slice();
    let row_swap = |data: &mut [C64], r1: usize, r2: usize| {
        for c in 0..d {
            data.swap(r1 * d + c, r2 * d + c);
        }
    };
    match g {
        Gate::Cnot { control, target } => {
            let (cb, tb) = (bit_of(n, *control), bit_of(n, *target));
            for s in 0..d {
                if s & cb != 0 && s & tb == 0 {
                    row_swap(data, s, s | tb);
                }
            }
        }
        Gate::Rz { qubit, angle } => {
            let b = bit_of(n, *qubit);
            let (p0, p1) = (C64::from_polar(1.0, *angle), C64::from_polar(1.0, -*angle));
            for s in 0..d {
                let f = if s & b == 0 { p0 } else { p1 };
                for v in &mut data[s * d..(s + 1) * d] {
                    *v *= f;
                }
            }
        }
        Gate::Ry { qubit, angle } => {
            let b = bit_of(n, *qubit);
            let (sn, cs) = angle.sin_cos();
            for s in 0..d {
                if s & b == 0 {
                    rotate_rows(data, d, s, s | b, Axis::Y, sn, cs);
                }
            }
        }
        Gate::Mux(mx) => {
            let tb = bit_of(n, mx.target);
            let k = mx.controls.len();
            for s in 0..d {
                if s & tb != 0 {
                    continue;
                }
                let mut idx = 0usize;
                for (i, c) in mx.controls.iter().enumerate() {
                    let v = (s & bit_of(n, c.qubit) != 0) as usize;
                    let v = if c.open { 1 - v } else { v };
                    idx |= v << (k - 1 - i);
                }
                let (sn, cs) = mx.angles[idx].sin_cos();
                rotate_rows(data, d, s, s | tb, mx.axis, sn, cs);
            }
        }
    }
}

fn rotate_rows(data: &mut [C64], d: usize, r0: usize, r1: usize, axis: Axis, sn: f64, cs: f64) {
    for c in 0..d {
        let (a, b) = (data[r0 * d + c], data[r1 * d + c]);
        match axis {
            Axis::Y => {
                data[r0 * d + c] = a * cs + b * sn;
                data[r1 * d + c] = b * cs - a * sn;
            }
            Axis::Z => {
                data[r0 * d + c] = a * C64::new(cs, sn);
                data[r1 * d + c] = b * C64::new(cs, -sn);
            }
        }
    }
}

/// Unitary of the circuit. Macros are evaluated directly.
pub fn evaluate(c: &Circuit) -> CMat {
    assert!(c.n >= 1 && c.n <= 12, "evaluate supports 1..=12 qubits");
    let mut m = CMat::identity(1 << c.n);
    for g in c.gates() {
        apply_gate_left(&mut m, c.n, g);
    }
    m
}
