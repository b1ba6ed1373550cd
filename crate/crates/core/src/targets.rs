//! Named target unitaries.
//!
//! Conventions where the textbook name leaves room:
//! * `CPhase` is the controlled-Z, diag(1, 1, 1, −1).
//! * `XNOR` is (I⊗X)·CNOT, i.e. |a,b⟩ ↦ |a, ¬(a⊕b)⟩.
//! * `fSWAP` is SWAP with a −1 on |11⟩.
//! * `DCNOT` applies CNOT(1→2) then CNOT(2→1).
//! * `XXplusYY` is the XX+YY interaction at θ = π/2, β = 0.
//! * `Grover_n` is (2|s⟩⟨s| − I)·(I − 2|1…1⟩⟨1…1|), oracle first.
//! * `Peres` applies Toffoli then CNOT(1→2).

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::matcore::{
    haar_random_unitary, matrix_from_json, permutation_to_matrix, CMat, Permutation, C64, I, ONE, ZERO,
};

pub const BUILTIN_NAMES: &[&str] = &[
    "CNOT",
    "CNOT21",
    "SWAP",
    "iSWAP",
    "fSWAP",
    "DCNOT",
    "XNOR",
    "CPhase",
    "sqrtSWAP",
    "sqrtiSWAP",
    "XX",
    "YY",
    "ZZ",
    "XZ",
    "ZX",
    "ZY",
    "XXplusYY",
    "QFT2",
    "Grover2",
    "Toffoli",
    "Fredkin",
    "Peres",
    "QFT3",
    "Grover3",
    "CCCX",
    "QFT4",
    "Grover4",
];

/// The 19 two-qubit targets of the standard suite.
pub const TWO_QUBIT_SUITE: &[&str] = &[
    "CNOT",
    "CNOT21",
    "SWAP",
    "iSWAP",
    "fSWAP",
    "DCNOT",
    "XNOR",
    "CPhase",
    "sqrtSWAP",
    "sqrtiSWAP",
    "XX",
    "YY",
    "ZZ",
    "XZ",
    "ZX",
    "ZY",
    "XXplusYY",
    "QFT2",
    "Grover2",
];

pub const THREE_QUBIT_SUITE: &[&str] = &["Toffoli", "Fredkin", "Peres", "QFT3", "Grover3"];

pub const FOUR_QUBIT_SUITE: &[&str] = &["CCCX", "QFT4", "Grover4"];

fn perm(images: &[usize]) -> CMat {
    let p = Permutation::new(images.iter().map(|i| i + 1).collect()).expect("static permutation");
    permutation_to_matrix(&p)
}

fn rows(entries: [[C64; 4]; 4]) -> CMat {
    CMat::from_vec(4, entries.into_iter().flatten().collect()).expect("4x4 literal")
}

fn pauli(c: char) -> CMat {
    match c {
        'X' => CMat::from_vec(2, vec![ZERO, ONE, ONE, ZERO]),
        'Y' => CMat::from_vec(2, vec![ZERO, -I, I, ZERO]),
        'Z' => CMat::from_vec(2, vec![ONE, ZERO, ZERO, -ONE]),
        _ => CMat::from_vec(2, vec![ONE, ZERO, ZERO, ONE]),
    }
    .expect("2x2 literal")
}

pub fn qft(n: u32) -> CMat {
    let d = 1usize << n;
    let norm = 1.0 / (d as f64).sqrt();
    CMat::from_fn(d, |j, k| C64::from_polar(norm, 2.0 * PI * ((j * k) % d) as f64 / d as f64))
}

pub fn grover(n: u32) -> CMat {
    let d = 1usize << n;
    let diffusion = CMat::from_fn(d, |r, c| {
        let v = 2.0 / d as f64 - if r == c { 1.0 } else { 0.0 };
        C64::new(v, 0.0)
    });
    let mut oracle = CMat::identity(d);
    oracle.set(d - 1, d - 1, -ONE);
    &diffusion * &oracle
}

/// Multi-controlled X on n qubits with target n.
fn mcx(n: u32) -> CMat {
    let d = 1usize << n;
    let mut images: Vec<usize> = (0..d).collect();
    images.swap(d - 2, d - 1);
    perm(&images)
}

/// A named builtin, or `haar(n, seed)`.
pub fn builtin(name: &str) -> Result<CMat> {
    if let Some((n, seed)) = parse_haar(name)? {
        return Ok(haar_random_unitary(1 << n, seed));
    }
    let h = C64::new(0.5, 0.5);
    let hc = h.conj();
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let si = C64::new(0.0, FRAC_1_SQRT_2);
    let m = match name {
        "CNOT" => perm(&[0, 1, 3, 2]),
        "CNOT21" => perm(&[0, 3, 2, 1]),
        "SWAP" => perm(&[0, 2, 1, 3]),
        "iSWAP" => {
            rows([[ONE, ZERO, ZERO, ZERO], [ZERO, ZERO, I, ZERO], [ZERO, I, ZERO, ZERO], [ZERO, ZERO, ZERO, ONE]])
        }
        "fSWAP" => {
            rows([[ONE, ZERO, ZERO, ZERO], [ZERO, ZERO, ONE, ZERO], [ZERO, ONE, ZERO, ZERO], [ZERO, ZERO, ZERO, -ONE]])
        }
        // Column |ab⟩ goes to |b, a⊕b⟩.
        "DCNOT" => perm(&[0, 3, 1, 2]),
        // |ab⟩ goes to |a, ¬(a⊕b)⟩.
        "XNOR" => perm(&[1, 0, 2, 3]),
        "CPhase" => CMat::from_diagonal(&[ONE, ONE, ONE, -ONE]),
        "sqrtSWAP" => {
            rows([[ONE, ZERO, ZERO, ZERO], [ZERO, h, hc, ZERO], [ZERO, hc, h, ZERO], [ZERO, ZERO, ZERO, ONE]])
        }
        "sqrtiSWAP" => {
            rows([[ONE, ZERO, ZERO, ZERO], [ZERO, s, si, ZERO], [ZERO, si, s, ZERO], [ZERO, ZERO, ZERO, ONE]])
        }
        "XX" | "YY" | "ZZ" | "XZ" | "ZX" | "ZY" => {
            let mut c = name.chars();
            pauli(c.next().unwrap()).kron(&pauli(c.next().unwrap()))
        }
        "XXplusYY" => {
            rows([[ONE, ZERO, ZERO, ZERO], [ZERO, s, -si, ZERO], [ZERO, -si, s, ZERO], [ZERO, ZERO, ZERO, ONE]])
        }
        "QFT2" => qft(2),
        "QFT3" => qft(3),
        "QFT4" => qft(4),
        "Grover2" => grover(2),
        "Grover3" => grover(3),
        "Grover4" => grover(4),
        "Toffoli" => mcx(3),
        "CCCX" => mcx(4),
        "Fredkin" => perm(&[0, 1, 2, 3, 4, 6, 5, 7]),
        "Peres" => {
            // |a,b,c⟩ ↦ |a, a⊕b, c⊕ab⟩
            let images: Vec<usize> = (0..8)
                .map(|s| {
                    let (a, b, c) = ((s >> 2) & 1, (s >> 1) & 1, s & 1);
                    (a << 2) | ((a ^ b) << 1) | (c ^ (a & b))
                })
                .collect();
            perm(&images)
        }
        other => return Err(Error::InvalidArgument(format!("unknown builtin target {other:?}"))),
    };
    Ok(m)
}

fn parse_haar(name: &str) -> Result<Option<(u32, u64)>> {
    let Some(inner) = name.strip_prefix("haar(").and_then(|r| r.strip_suffix(')')) else {
        return Ok(None);
    };
    let bad = || Error::InvalidArgument(format!("expected haar(n, seed), got {name:?}"));
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    let n: u32 = a.trim().parse().map_err(|_| bad())?;
    let seed: u64 = b.trim().parse().map_err(|_| bad())?;
    if !(1..=10).contains(&n) {
        return Err(Error::InvalidArgument(format!("haar qubit count {n} outside 1..=10")));
    }
    Ok(Some((n, seed)))
}

/// Where a target matrix comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetSpec {
    Builtin(String),
    File(PathBuf),
}

impl TargetSpec {
    /// `builtin:NAME`, a bare builtin name or `haar(n, seed)`, otherwise a file path.
    pub fn parse(s: &str) -> TargetSpec {
        if let Some(name) = s.strip_prefix("builtin:") {
            return TargetSpec::Builtin(name.to_string());
        }
        if BUILTIN_NAMES.contains(&s) || s.starts_with("haar(") {
            return TargetSpec::Builtin(s.to_string());
        }
        TargetSpec::File(PathBuf::from(s))
    }

    pub fn resolve(&self) -> Result<CMat> {
        match self {
            TargetSpec::Builtin(name) => builtin(name),
            TargetSpec::File(path) => matrix_from_json(&std::fs::read_to_string(path)?),
        }
    }

    pub fn name(&self) -> String {
        match self {
            TargetSpec::Builtin(n) => n.clone(),
            TargetSpec::File(p) => p.display().to_string(),
        }
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSpec::Builtin(n) => write!(f, "builtin:{n}"),
            TargetSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::frobenius_distance;

    #[test]
    fn builtins_are_unitary() {
        for name in BUILTIN_NAMES {
            let m = builtin(name).unwrap();
            assert!(m.unitarity_defect() < 1e-14, "{name}");
        }
        assert_eq!(TWO_QUBIT_SUITE.len(), 19);
    }

    #[test]
    fn spot_checks() {
        let cnot = builtin("CNOT").unwrap();
        assert_eq!(cnot.get(3, 2), ONE);
        assert_eq!(cnot.get(0, 0), ONE);
        let swap = builtin("SWAP").unwrap();
        assert_eq!(swap.get(2, 1), ONE);
        let tof = builtin("Toffoli").unwrap();
        assert_eq!(tof.get(7, 6), ONE);
        assert_eq!(tof.get(6, 7), ONE);
        assert_eq!(tof.get(5, 5), ONE);
        let q = builtin("QFT3").unwrap();
        let w = C64::from_polar(1.0 / 8f64.sqrt(), 2.0 * PI * 6.0 / 8.0);
        assert!((q.get(2, 3) - w).norm() < 1e-15);

        // XNOR = (I⊗X)·CNOT
        let ix = CMat::identity(2).kron(&pauli('X'));
        assert_eq!(builtin("XNOR").unwrap(), &ix * &cnot);
        // DCNOT = CNOT21·CNOT
        assert_eq!(builtin("DCNOT").unwrap(), &builtin("CNOT21").unwrap() * &cnot);
        // Peres = CNOT(1→2)·Toffoli
        let c12 = cnot.kron(&CMat::identity(2));
        assert_eq!(builtin("Peres").unwrap(), &c12 * &tof);
        let sq = builtin("sqrtSWAP").unwrap();
        assert!(frobenius_distance(&(&sq * &sq), &swap).unwrap() < 1e-15);
        let si = builtin("sqrtiSWAP").unwrap();
        assert!(frobenius_distance(&(&si * &si), &builtin("iSWAP").unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn grover_two_qubit_marks_last_state() {
        let g = builtin("Grover2").unwrap();
        // G applied to |s⟩ with the last state marked lands on |11⟩.
        let s: Vec<C64> = (0..4).map(|r| (0..4).map(|c| g.get(r, c) * 0.5).sum()).collect();
        assert!((s[3] - ONE).norm() < 1e-15);
    }

    #[test]
    fn target_spec_parsing() {
        assert_eq!(TargetSpec::parse("builtin:CNOT"), TargetSpec::Builtin("CNOT".into()));
        assert_eq!(TargetSpec::parse("QFT2"), TargetSpec::Builtin("QFT2".into()));
        assert_eq!(TargetSpec::parse("haar(2, 7)").resolve().unwrap().dim(), 4);
        assert_eq!(TargetSpec::parse("u.json"), TargetSpec::File("u.json".into()));
        assert!(builtin("haar(2)").is_err());
        assert!(builtin("nope").is_err());
    }
}
