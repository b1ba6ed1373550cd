//! Lifting an n-qubit layer circuit to the (n+1)-qubit template.
//!
//! The new qubit becomes qubit 1 and every old qubit q moves to q+1. Group y of
//! the larger circuit is built from group x of the smaller one, where
//! x = y for y < 2^{n−1} and x = y − 2^{n−1} otherwise; x = 0 stands for the
//! empty network and the head core.

use std::collections::HashMap;

use super::{Circuit, Control, Gate, MultiplexedRotation, Segment, SegmentKind};
use crate::assembly::{Ansatz, Parity, ThetaSchedule};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub enum LiftSpec {
    /// Every lifted table repeats the old one for both values of the new control.
    Template,
    /// Angles are taken from the synthesis of this (n+1)-qubit schedule.
    Schedule(ThetaSchedule),
}

fn shift(g: &Gate) -> Gate {
    match g {
        Gate::Cnot { control, target } => Gate::cnot(control + 1, target + 1),
        Gate::Rz { qubit, angle } => Gate::Rz { qubit: qubit + 1, angle: *angle },
        Gate::Ry { qubit, angle } => Gate::Ry { qubit: qubit + 1, angle: *angle },
        Gate::Mux(m) => Gate::Mux(MultiplexedRotation {
            controls: m.controls.iter().map(|c| Control { qubit: c.qubit + 1, open: c.open }).collect(),
            target: m.target + 1,
            ..m.clone()
        }),
    }
}

/// ΠT network of group y at n+1 qubits from the network of group x at n qubits.
pub fn lift_pit(n: u32, parity: Parity, gates: &[Gate], y: usize) -> Result<Vec<Gate>> {
    let half = 1usize << (n - 1);
    if y == 0 || y >= 2 * half {
        return Err(Error::InvalidArgument(format!("lifted group {y} outside 1..{}", 2 * half)));
    }
    let top = n + 1;
    let shifted: Vec<Gate> = gates.iter().map(shift).collect();
    if y < half {
        return Ok(shifted);
    }
    Ok(match parity {
        Parity::Even => {
            let mut g = vec![Gate::cnot(top, 1)];
            g.extend(shifted);
            g
        }
        Parity::Odd => {
            // Strip the odd wrap to get the even fan, then wrap it around qubit 1.
            let fan = if shifted.len() >= 2 { &shifted[1..shifted.len() - 1] } else { &shifted[..] };
            let mut g = vec![Gate::cnot(1, top), Gate::cnot(top, 1)];
            g.extend(fan.iter().cloned());
            g.push(Gate::cnot(1, top));
            g
        }
    })
}

/// Core macros at n+1 qubits: qubit 1 joins every table as the leading control and
/// a fresh R_Z on qubit 1 opens the ladder.
fn lift_core(gates: &[Gate]) -> Result<Vec<Gate>> {
    let mut out = Vec::with_capacity(gates.len() + 1);
    for (i, g) in gates.iter().enumerate() {
        let Gate::Mux(m) = g else {
            return Err(Error::MissingMetadata("core segments must be in macro form to lift".into()));
        };
        if i == 3 {
            out.push(Gate::Mux(MultiplexedRotation {
                axis: super::Axis::Z,
                controls: vec![],
                target: 1,
                angles: vec![0.0],
                mirrored: false,
            }));
        }
        let Gate::Mux(mut lifted) = shift(g) else { unreachable!() };
        lifted.controls.insert(0, Control::filled(1));
        lifted.angles = m.angles.iter().chain(&m.angles).copied().collect();
        out.push(Gate::Mux(lifted));
    }
    if gates.len() == 3 {
        out.push(Gate::Mux(MultiplexedRotation {
            axis: super::Axis::Z,
            controls: vec![],
            target: 1,
            angles: vec![0.0],
            mirrored: false,
        }));
    }
    Ok(out)
}

fn copy_angles(template: &mut [Gate], source: &[Gate]) -> Result<()> {
    if template.len() != source.len() {
        return Err(Error::MissingMetadata("lifted core does not match the direct synthesis".into()));
    }
    for (t, s) in template.iter_mut().zip(source) {
        match (t, s) {
            (Gate::Mux(a), Gate::Mux(b))
                if a.axis == b.axis && a.controls == b.controls && a.target == b.target && a.mirrored == b.mirrored =>
            {
                a.angles = b.angles.clone();
            }
            _ => return Err(Error::MissingMetadata("lifted core does not match the direct synthesis".into())),
        }
    }
    Ok(())
}

/// (n+1)-qubit template built segment by segment from an n-qubit macro circuit.
pub fn lift_circuit(c: &Circuit, spec: &LiftSpec) -> Result<Circuit> {
    let n = c.n;
    if n > 10 {
        return Err(Error::InvalidArgument(format!("cannot lift a {n}-qubit circuit")));
    }
    let mut by_layer: HashMap<usize, HashMap<SegmentKind, &Segment>> = HashMap::new();
    for s in &c.segments {
        by_layer.entry(s.layer).or_default().insert(s.kind, s);
    }
    let mut layers: Vec<usize> = by_layer.keys().copied().collect();
    layers.sort_unstable_by(|a, b| b.cmp(a));

    let direct = match spec {
        LiftSpec::Template => None,
        LiftSpec::Schedule(s) => {
            let ansatz = Ansatz::new(n + 1)?;
            if s.num_layers() != layers.len() {
                return Err(Error::InvalidArgument(format!(
                    "schedule has {} layers, circuit has {}",
                    s.num_layers(),
                    layers.len()
                )));
            }
            Some(super::synthesize(&ansatz, s)?)
        }
    };
    let direct_lookup: HashMap<(usize, SegmentKind), &Segment> = direct
        .as_ref()
        .map(|d| {
            d.segments
                .iter()
                .filter(|s| matches!(s.kind, SegmentKind::Core { .. } | SegmentKind::Head))
                .map(|s| ((s.layer, s.kind), s))
                .collect()
        })
        .unwrap_or_default();

    let half = 1usize << (n - 1);
    let k_new = 2 * half - 1;
    let mut out = Circuit::new(n + 1);
    for &layer in &layers {
        let segs = &by_layer[&layer];
        let get = |kind: SegmentKind| -> Result<&Segment> {
            segs.get(&kind)
                .copied()
                .ok_or_else(|| Error::MissingMetadata(format!("layer {layer} lacks segment {kind}")))
        };
        let finish = |kind: SegmentKind, gates: Vec<Gate>| -> Result<Vec<Gate>> {
            let mut gates = lift_core(&gates)?;
            if direct.is_some() {
                let src = direct_lookup
                    .get(&(layer, kind))
                    .ok_or_else(|| Error::MissingMetadata(format!("direct synthesis lacks {kind}")))?;
                copy_angles(&mut gates, &src.gates)?;
            }
            Ok(gates)
        };
        for parity in [Parity::Odd, Parity::Even] {
            for y in (1..=k_new).rev() {
                let x = if y < half { y } else { y - half };
                let (pit_src, core_src) = if x == 0 {
                    (Vec::new(), get(SegmentKind::Head)?.gates.clone())
                } else {
                    (
                        get(SegmentKind::PiT { parity, x })?.gates.clone(),
                        get(SegmentKind::Core { parity, x })?.gates.clone(),
                    )
                };
                let pit = lift_pit(n, parity, &pit_src, y)?;
                let kind = SegmentKind::Core { parity, x: y };
                out.push_segment(layer, SegmentKind::PiT { parity, x: y }, pit.clone());
                out.push_segment(layer, kind, finish(kind, core_src)?);
                out.push_segment(layer, SegmentKind::PiT { parity, x: y }, pit);
            }
        }
        let head = get(SegmentKind::Head)?.gates.clone();
        out.push_segment(layer, SegmentKind::Head, finish(SegmentKind::Head, head)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::build_transposition_sets;
    use crate::circuit::synth::pit_gates;
    use crate::circuit::{evaluate, synthesize_pit};
    use crate::matcore::CMat;

    #[test]
    fn even_pit_examples() {
        let e = build_transposition_sets(2, Parity::Even, 1).unwrap();
        let g = synthesize_pit(&e).segments[0].gates.clone();
        let low = lift_pit(2, Parity::Even, &g, 1).unwrap();
        let want = CMat::identity(2).kron(&evaluate(&synthesize_pit(&e)));
        assert_eq!(evaluate(&Circuit::from_gates(3, low)), want);

        let high = lift_pit(2, Parity::Even, &g, 3).unwrap();
        assert_eq!(high.len(), g.len() + 1);
        assert_eq!(high, pit_gates(3, Parity::Even, 3));
    }

    #[test]
    fn pit_lifts_match_direct_networks() {
        for n in 1..=4u32 {
            let half = 1usize << (n - 1);
            for parity in [Parity::Even, Parity::Odd] {
                for y in 1..2 * half {
                    let x = if y < half { y } else { y - half };
                    let lifted = lift_pit(n, parity, &pit_gates(n, parity, x), y).unwrap();
                    assert_eq!(lifted, pit_gates(n + 1, parity, y), "n={n} {parity} y={y}");
                }
            }
        }
    }

    fn random_schedule(a: &Ansatz, layers: usize, seed: u64) -> ThetaSchedule {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut s = a.zero_schedule(layers);
        for t in s.layers.iter_mut().flatten() {
            *t = rng.random_range(-3.0..3.0);
        }
        s
    }

    #[test]
    fn schedule_lift_equals_direct_synthesis() {
        use crate::circuit::synthesize;
        use crate::matcore::frobenius_distance;
        for n in 1..=3u32 {
            let small = Ansatz::new(n).unwrap();
            let big = Ansatz::new(n + 1).unwrap();
            let src = synthesize(&small, &random_schedule(&small, 2, 3 + n as u64)).unwrap();
            let s = random_schedule(&big, 2, 90 + n as u64);
            let lifted = lift_circuit(&src, &LiftSpec::Schedule(s.clone())).unwrap();
            let direct = synthesize(&big, &s).unwrap();
            assert_eq!(lifted.segments.len(), direct.segments.len());
            for (a, b) in lifted.segments.iter().zip(&direct.segments) {
                assert_eq!((a.layer, a.kind), (b.layer, b.kind));
            }
            let want = big.assemble(&s).unwrap();
            assert!(frobenius_distance(&evaluate(&lifted.lowered().unwrap()), &want).unwrap() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn template_lift_has_the_bound_counts() {
        use crate::circuit::{cnot_bound, gate_counts, rz_bound, synthesize};
        for n in 1..=3u32 {
            let small = Ansatz::new(n).unwrap();
            let src = synthesize(&small, &random_schedule(&small, 1, n as u64)).unwrap();
            let lifted = lift_circuit(&src, &LiftSpec::Template).unwrap();
            lifted.validate().unwrap();
            let k = gate_counts(&lifted.lowered().unwrap()).unwrap();
            assert_eq!(k.cnot as i64, cnot_bound(n + 1, 1));
            assert_eq!(k.rz as i64, rz_bound(n + 1, 1));
        }
    }

    #[test]
    fn lifting_needs_labels() {
        let c = Circuit::from_gates(2, vec![Gate::cnot(1, 2)]);
        assert!(matches!(lift_circuit(&c, &LiftSpec::Template), Err(Error::MissingMetadata(_))));
    }
}
