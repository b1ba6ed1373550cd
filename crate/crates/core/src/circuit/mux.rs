//! Multiplexed rotations and their recursive CNOT lowering.

use super::{evaluate, Axis, Circuit, Control, Gate, MultiplexedRotation};
use crate::error::{Error, Result};
use crate::matcore::CMat;

/// Dense matrix of a multiplexed rotation on n qubits.
pub fn mux_matrix(n: u32, m: &MultiplexedRotation) -> CMat {
    evaluate(&Circuit::from_gates(n, vec![Gate::Mux(m.clone())]))
}

fn rotation(axis: Axis, qubit: u32, angle: f64) -> Gate {
    match axis {
        Axis::Z => Gate::Rz { qubit, angle },
        Axis::Y => Gate::Ry { qubit, angle },
    }
}

/// Rewrites open controls as filled ones by permuting the angle table.
pub fn normalize_controls(m: &MultiplexedRotation) -> MultiplexedRotation {
    let k = m.controls.len();
    let mut flip = 0usize;
    for (i, c) in m.controls.iter().enumerate() {
        if c.open {
            flip |= 1 << (k - 1 - i);
        }
    }
    MultiplexedRotation {
        axis: m.axis,
        controls: m.controls.iter().map(|c| Control::filled(c.qubit)).collect(),
        target: m.target,
        angles: (0..m.angles.len()).map(|i| m.angles[i ^ flip]).collect(),
        mirrored: m.mirrored,
    }
}

fn lower_into(axis: Axis, controls: &[u32], target: u32, angles: &[f64]) -> Vec<Gate> {
    let Some((&c1, rest)) = controls.split_first() else {
        return vec![rotation(axis, target, angles[0])];
    };
    let h = angles.len() / 2;
    let theta: Vec<f64> = (0..h).map(|j| (angles[j] + angles[j + h]) / 2.0).collect();
    let phi: Vec<f64> = (0..h).map(|j| (angles[j] - angles[j + h]) / 2.0).collect();
    let mut first = lower_into(axis, rest, target, &theta);
    let mut second = lower_into(axis, rest, target, &phi);
    second.reverse();
    if !rest.is_empty() {
        // CX(c₂)·CX(c₁)·CX(c₂) = CX(c₁) because both act on the same target.
        first.pop();
        second.remove(0);
    }
    first.push(Gate::cnot(c1, target));
    first.extend(second);
    first.push(Gate::cnot(c1, target));
    first
}

/// Recursive halving on the first control:
/// F(ψ) = F'(θ) · CNOT(c₁→t) · F̃'(φ) · CNOT(c₁→t), F̃' the mirrored half, with θ = (ψ_j + ψ_{j+h})/2, φ = (ψ_j − ψ_{j+h})/2.
/// A mirrored rotation emits the same list reversed.
pub fn lower_multiplexed(m: &MultiplexedRotation) -> Result<Vec<Gate>> {
    if m.angles.len() != 1 << m.controls.len() {
        return Err(Error::AngleCount { expected: 1 << m.controls.len(), got: m.angles.len() });
    }
    let m = normalize_controls(m);
    let controls: Vec<u32> = m.controls.iter().map(|c| c.qubit).collect();
    let mut out = lower_into(m.axis, &controls, m.target, &m.angles);
    if m.mirrored {
        out.reverse();
    }
    Ok(out)
}
