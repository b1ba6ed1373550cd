//! Synthesis of layers into CNOT + rotation circuits.
//!
//! Each group factor ΠT·M·ΠT becomes [ΠT network, core, ΠT network], where the
//! core M is block diagonal on adjacent pairs and is written as
//! ladder · F_Z(α) · F_Y(γ) · F_Z(β). The ladder is a diagonal on qubits 1..n−1
//! carrying the per-block phases.

use super::{Axis, Circuit, Control, Gate, MultiplexedRotation, Segment, SegmentKind};
use crate::assembly::{build_m_factor, lambda_of, Ansatz, LayerPlan, Parity, ThetaSchedule, TranspositionSet};
use crate::error::{Error, Result};
use crate::matcore::{CMat, C64};
use crate::srbb::SrbbBasis;

/// ζ as a product of CNOT staircases, one per Z-string: fan in to the deepest Z qubit,
/// rotate, fan out.
pub fn synthesize_diagonal(basis: &SrbbBasis, zeta_angles: &[f64]) -> Result<Circuit> {
    let n = basis.qubits.ok_or_else(|| Error::InvalidArgument("diagonal synthesis needs a qubit basis".into()))?;
    let d = basis.dim;
    if zeta_angles.len() != d - 1 {
        return Err(Error::AngleCount { expected: d - 1, got: zeta_angles.len() });
    }
    let mut gates = Vec::new();
    for (c, &theta) in zeta_angles.iter().enumerate() {
        let chi = c + 1;
        let zs: Vec<u32> = (1..=n).filter(|q| (chi >> (q - 1)) & 1 == 1).collect();
        let (&deep, rest) = zs.split_last().expect("χ > 0 has a Z");
        for &q in rest {
            gates.push(Gate::cnot(q, deep));
        }
        gates.push(Gate::Rz { qubit: deep, angle: theta });
        for &q in rest.iter().rev() {
            gates.push(Gate::cnot(q, deep));
        }
    }
    let mut circ = Circuit::new(n);
    circ.push_segment(1, SegmentKind::Zeta, gates);
    Ok(circ)
}

/// CNOT network for ΠT of group x; x = 0 gives the empty network.
pub(crate) fn pit_gates(n: u32, parity: Parity, x: usize) -> Vec<Gate> {
    let lambda = lambda_of(n, x);
    if lambda.is_empty() {
        return Vec::new();
    }
    let fan: Vec<Gate> = lambda.iter().map(|&i| Gate::cnot(n, i)).collect();
    match parity {
        Parity::Even => fan,
        Parity::Odd => {
            let m1 = lambda[0];
            let mut g = vec![Gate::cnot(m1, n)];
            g.extend(fan);
            g.push(Gate::cnot(m1, n));
            g
        }
    }
}

pub fn synthesize_pit(ts: &TranspositionSet) -> Circuit {
    let mut c = Circuit::new(ts.n);
    c.push_segment(1, SegmentKind::PiT { parity: ts.parity, x: ts.x }, pit_gates(ts.n, ts.parity, ts.x));
    c
}

/// Per-block Euler angles of a block-diagonal special unitary:
/// block j = e^{iφ_j}·R_Z(α_j)·R_Y(γ_j)·R_Z(β_j) with Σφ_j = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDecomposition {
    pub n: u32,
    pub alpha: Vec<f64>,
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub phases: Vec<f64>,
}

pub fn decompose_block_diagonal(m: &CMat) -> Result<BlockDecomposition> {
    let d = m.dim();
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("dimension {d} is not a qubit dimension")));
    }
    let n = d.trailing_zeros();
    for r in 0..d {
        for c in 0..d {
            if r / 2 != c / 2 && m.get(r, c).norm() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "entry ({}, {}) breaks the 2×2 block structure",
                    r + 1,
                    c + 1
                )));
            }
        }
    }
    let h = d / 2;
    let blocks: Vec<[C64; 4]> = (0..h)
        .map(|j| [m.get(2 * j, 2 * j), m.get(2 * j, 2 * j + 1), m.get(2 * j + 1, 2 * j), m.get(2 * j + 1, 2 * j + 1)])
        .collect();
    let mut phases: Vec<f64> = blocks.iter().map(|b| (b[0] * b[3] - b[1] * b[2]).arg() / 2.0).collect();
    // det M = 1 forces Σφ ∈ πZ; move the multiple of π onto block 0.
    let total: f64 = phases.iter().sum();
    phases[0] -= (total / std::f64::consts::PI).round() * std::f64::consts::PI;

    let (mut alpha, mut gamma, mut beta) = (Vec::with_capacity(h), Vec::with_capacity(h), Vec::with_capacity(h));
    for (b, &phi) in blocks.iter().zip(&phases) {
        let w = C64::from_polar(1.0, -phi);
        let (a, bb) = (b[0] * w, b[1] * w);
        let (pa, pb) = (if a.norm() > 0.0 { a.arg() } else { 0.0 }, if bb.norm() > 0.0 { bb.arg() } else { 0.0 });
        gamma.push(bb.norm().atan2(a.norm()));
        alpha.push((pa + pb) / 2.0);
        beta.push((pa - pb) / 2.0);
    }
    Ok(BlockDecomposition { n, alpha, gamma, beta, phases })
}

/// Angles of the phase ladder: entry i−1 holds the R_Z table for target qubit i
/// (controls 1..i−1), for i = 1..n−1.
pub fn ladder_angles(phases: &[f64]) -> Vec<Vec<f64>> {
    let mut cur = phases.to_vec();
    let mut levels = Vec::new();
    while cur.len() > 1 {
        let half = cur.len() / 2;
        levels.push((0..half).map(|p| (cur[2 * p] - cur[2 * p + 1]) / 2.0).collect::<Vec<_>>());
        cur = (0..half).map(|p| (cur[2 * p] + cur[2 * p + 1]) / 2.0).collect();
    }
    levels.reverse();
    levels
}

fn mux(axis: Axis, controls: std::ops::Range<u32>, target: u32, angles: Vec<f64>, mirrored: bool) -> Gate {
    Gate::Mux(MultiplexedRotation { axis, controls: controls.map(Control::filled).collect(), target, angles, mirrored })
}

/// Macro-level core: F_Z(β), mirrored F_Y(γ), F_Z(α), then the ladder.
pub fn core_gates(dec: &BlockDecomposition) -> Vec<Gate> {
    let n = dec.n;
    let mut g = vec![
        mux(Axis::Z, 1..n, n, dec.beta.clone(), false),
        mux(Axis::Y, 1..n, n, dec.gamma.clone(), true),
        mux(Axis::Z, 1..n, n, dec.alpha.clone(), false),
    ];
    for (i, angles) in ladder_angles(&dec.phases).into_iter().enumerate() {
        let q = i as u32 + 1;
        g.push(mux(Axis::Z, 1..q, q, angles, false));
    }
    g
}

/// Circuit (macro form) for a block-diagonal special unitary on adjacent pairs.
pub fn synthesize_block_diagonal(m: &CMat) -> Result<Circuit> {
    let dec = decompose_block_diagonal(m)?;
    let mut c = Circuit::new(dec.n);
    c.push_segment(1, SegmentKind::Free, core_gates(&dec));
    Ok(c)
}

fn head_matrix(ansatz: &Ansatz, theta: &[f64]) -> CMat {
    let plan = &ansatz.plan;
    let mut m = CMat::identity(ansatz.dim());
    let count = plan.zeta_len() + plan.first.len();
    for (&j, &t) in ansatz.index_map()[..count].iter().zip(&theta[..count]) {
        crate::assembly::apply_exp_right(&mut m, ansatz.basis.element(j), t);
    }
    m
}

/// Segments of one layer: odd groups x = K..1, even groups x = K..1, then the head.
pub fn synthesize_layer(ansatz: &Ansatz, theta: &[f64], layer: usize) -> Result<Vec<Segment>> {
    if theta.len() != ansatz.params() {
        return Err(Error::AngleCount { expected: ansatz.params(), got: theta.len() });
    }
    let n = ansatz.n();
    let plan: &LayerPlan = &ansatz.plan;
    let mut segs = Vec::new();
    let groups = plan.group_offsets();
    for parity in [Parity::Odd, Parity::Even] {
        for &(g, off) in groups.iter().rev().filter(|(g, _)| g.set.parity == parity) {
            let x = g.set.x;
            let core = build_m_factor(&ansatz.basis, &g.set, &theta[off..off + g.indices.len()])?;
            let pit = pit_gates(n, parity, x);
            segs.push(Segment { layer, kind: SegmentKind::PiT { parity, x }, gates: pit.clone() });
            segs.push(Segment {
                layer,
                kind: SegmentKind::Core { parity, x },
                gates: core_gates(&decompose_block_diagonal(&core)?),
            });
            segs.push(Segment { layer, kind: SegmentKind::PiT { parity, x }, gates: pit });
        }
    }
    let head = head_matrix(ansatz, theta);
    segs.push(Segment { layer, kind: SegmentKind::Head, gates: core_gates(&decompose_block_diagonal(&head)?) });
    Ok(segs)
}

/// Macro-form circuit for the whole schedule; layer L acts first.
pub fn synthesize(ansatz: &Ansatz, schedule: &ThetaSchedule) -> Result<Circuit> {
    schedule.validate_for(ansatz)?;
    let mut c = Circuit::new(ansatz.n());
    for l in (1..=schedule.num_layers()).rev() {
        c.segments.extend(synthesize_layer(ansatz, &schedule.layers[l - 1], l)?);
    }
    Ok(c)
}
