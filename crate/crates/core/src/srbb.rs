//! The recursive block basis of Hermitian unitaries and its qubit variant,
//! where the diagonal slots hold I/Z strings.
//!
//! Elements are stored structurally (sign vectors plus a coupled pair) and
//! only densified on request.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{CMat, C64, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PauliAxis::X => "X",
            PauliAxis::Y => "Y",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Diagonal {
        signs: Vec<i8>,
    },
    /// σ₁ or σ₂ on coordinates (alpha, beta), 1-based with alpha < beta, and
    /// ±1 elsewhere on the diagonal (`diag_signs` is 0 at alpha and beta).
    TwoLevel {
        alpha: usize,
        beta: usize,
        pauli: PauliAxis,
        diag_signs: Vec<i8>,
    },
    Identity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrbbElement {
    /// 1-based position in the basis.
    pub index: usize,
    pub dim: usize,
    pub kind: ElementKind,
}

impl SrbbElement {
    pub fn is_diagonal(&self) -> bool {
        !matches!(self.kind, ElementKind::TwoLevel { .. })
    }

    /// Entries at (alpha, beta) and (beta, alpha) of a two-level element.
    pub fn off_diag_entries(&self) -> Option<(C64, C64)> {
        match self.kind {
            ElementKind::TwoLevel { pauli: PauliAxis::X, .. } => Some((ONE, ONE)),
            ElementKind::TwoLevel { pauli: PauliAxis::Y, .. } => Some((-I, I)),
            _ => None,
        }
    }

    pub fn pair(&self) -> Option<(usize, usize)> {
        match self.kind {
            ElementKind::TwoLevel { alpha, beta, .. } => Some((alpha, beta)),
            _ => None,
        }
    }

    /// Diagonal entries (0 at the coupled pair of a two-level element).
    pub fn diagonal_signs(&self) -> Vec<i8> {
        match &self.kind {
            ElementKind::Diagonal { signs } => signs.clone(),
            ElementKind::TwoLevel { diag_signs, .. } => diag_signs.clone(),
            ElementKind::Identity => vec![1; self.dim],
        }
    }

    pub fn trace(&self) -> i64 {
        self.diagonal_signs().iter().map(|&s| s as i64).sum()
    }

    pub fn dense(&self) -> CMat {
        let mut m =
            CMat::from_diagonal(&self.diagonal_signs().iter().map(|&s| C64::new(s as f64, 0.0)).collect::<Vec<_>>());
        if let (Some((a, b)), Some((ab, ba))) = (self.pair(), self.off_diag_entries()) {
            m.set(a - 1, b - 1, ab);
            m.set(b - 1, a - 1, ba);
        }
        m
    }

    /// Appends one diagonal coordinate with the given sign.
    fn embed(&self, corner: i8) -> SrbbElement {
        let kind = match &self.kind {
            ElementKind::Diagonal { signs } => {
                let mut s = signs.clone();
                s.push(corner);
                ElementKind::Diagonal { signs: s }
            }
            ElementKind::TwoLevel { alpha, beta, pauli, diag_signs } => {
                let mut s = diag_signs.clone();
                s.push(corner);
                ElementKind::TwoLevel { alpha: *alpha, beta: *beta, pauli: *pauli, diag_signs: s }
            }
            ElementKind::Identity => {
                let mut s = vec![1i8; self.dim];
                s.push(corner);
                ElementKind::Diagonal { signs: s }
            }
        };
        SrbbElement { index: self.index, dim: self.dim + 1, kind }
    }

    pub fn kind_label(&self) -> &'static str {
        match self.kind {
            ElementKind::Diagonal { .. } => "diagonal",
            ElementKind::TwoLevel { .. } => "two-level",
            ElementKind::Identity => "identity",
        }
    }
}

/// Pair (α, β) with α < β, mapped to the indices of its σ₁- and σ₂-type elements.
pub type PairMap = BTreeMap<(usize, usize), (usize, usize)>;

#[derive(Clone, Debug)]
pub struct SrbbBasis {
    pub dim: usize,
    /// Qubit count when the basis was built as an SRBB.
    pub qubits: Option<u32>,
    pub elements: Vec<SrbbElement>,
    /// {l² − 1 : 2 ≤ l ≤ d} ∪ {d²}, ascending.
    pub diagonal_index_set: Vec<usize>,
    pub pair_map: PairMap,
}

impl SrbbBasis {
    /// Element with the 1-based index j.
    pub fn element(&self, j: usize) -> &SrbbElement {
        &self.elements[j - 1]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Index of the σ₁/σ₂ element coupling (α, β), in either order.
    pub fn pair_index(&self, a: usize, b: usize, pauli: PauliAxis) -> Result<usize> {
        let key = (a.min(b), a.max(b));
        let (jx, jy) = self.pair_map.get(&key).ok_or_else(|| Error::PairMap(format!("no element couples {key:?}")))?;
        Ok(match pauli {
            PauliAxis::X => *jx,
            PauliAxis::Y => *jy,
        })
    }

    /// Slots holding the non-trivial Z-strings, ordered so that slot i carries χ = i + 1.
    pub fn zeta_indices(&self) -> Vec<usize> {
        self.diagonal_index_set[..self.diagonal_index_set.len() - 1].to_vec()
    }
}

fn pauli_base() -> Vec<SrbbElement> {
    let two = |pauli| SrbbElement {
        index: 0,
        dim: 2,
        kind: ElementKind::TwoLevel { alpha: 1, beta: 2, pauli, diag_signs: vec![0, 0] },
    };
    let mut v = vec![
        two(PauliAxis::X),
        two(PauliAxis::Y),
        SrbbElement { index: 0, dim: 2, kind: ElementKind::Diagonal { signs: vec![1, -1] } },
        SrbbElement { index: 0, dim: 2, kind: ElementKind::Identity },
    ];
    for (i, e) in v.iter_mut().enumerate() {
        e.index = i + 1;
    }
    v
}

/// One recursion step from dimension d − 1 to d.
fn grow(prev: &[SrbbElement], d: usize) -> Vec<SrbbElement> {
    let mut out: Vec<SrbbElement> = Vec::with_capacity(d * d);
    let corner: i8 = if (d - 1).is_multiple_of(2) { 1 } else { -1 };
    for e in &prev[..(d - 1) * (d - 1) - 1] {
        out.push(e.embed(corner));
    }

    // σ on (d−1, d) with D = diag((−1)^{l−1}) above it, conjugated by the 2-cycle (k, d−1):
    // the block lands on (k, d) and coordinate d−1 inherits D_k.
    let d_sign = |l: usize| -> i8 {
        if (l - 1).is_multiple_of(2) {
            1
        } else {
            -1
        }
    };
    for pauli in [PauliAxis::X, PauliAxis::Y] {
        for k in 1..d {
            let mut s: Vec<i8> = (1..=d).map(|l| if l <= d - 2 { d_sign(l) } else { 0 }).collect();
            if k != d - 1 {
                s[d - 2] = s[k - 1];
                s[k - 1] = 0;
            }
            s[d - 1] = 0;
            out.push(SrbbElement {
                index: 0,
                dim: d,
                kind: ElementKind::TwoLevel { alpha: k, beta: d, pauli, diag_signs: s },
            });
        }
    }

    let signs: Vec<i8> = if d % 2 == 1 {
        (0..d).map(|i| if i <= d / 2 { 1 } else { -1 }).collect()
    } else {
        // Σ ⊕ (−σ₃) with Σ = I ⊕ −I; the literal Σ ⊕ σ₃ repeats an embedded element.
        let h = d / 2 - 1;
        let mut s: Vec<i8> = (0..2 * h).map(|i| if i < h { 1 } else { -1 }).collect();
        s.extend([-1, 1]);
        s
    };
    out.push(SrbbElement { index: 0, dim: d, kind: ElementKind::Diagonal { signs } });
    out.push(SrbbElement { index: 0, dim: d, kind: ElementKind::Identity });

    for (i, e) in out.iter_mut().enumerate() {
        e.index = i + 1;
    }
    out
}

fn rbb_elements(d: usize) -> Vec<SrbbElement> {
    let mut cur = pauli_base();
    for m in 3..=d {
        cur = grow(&cur, m);
    }
    cur
}

fn diagonal_index_set(d: usize) -> Vec<usize> {
    let mut j: Vec<usize> = (2..=d).map(|l| l * l - 1).collect();
    j.push(d * d);
    j
}

/// Recursive block basis of d×d Hermitian unitaries.
pub fn build_rbb(d: usize) -> Result<SrbbBasis> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("basis dimension must be at least 2, got {d}")));
    }
    let elements = rbb_elements(d);
    let mut basis = SrbbBasis {
        dim: d,
        qubits: None,
        elements,
        diagonal_index_set: diagonal_index_set(d),
        pair_map: PairMap::new(),
    };
    basis.pair_map = audit_pairs(&basis)?;
    Ok(basis)
}

/// Diagonal of the Z-string with the given χ value: qubit q (1-based) carries Z
/// when bit q−1 of χ is set, and qubit q is bit n−q of the 0-based state index.
pub fn zstring_signs(n: u32, chi: u64) -> Vec<i8> {
    let d = 1usize << n;
    (0..d)
        .map(|s| {
            let mut parity = 0u32;
            for q in 1..=n {
                if (chi >> (q - 1)) & 1 == 1 {
                    parity ^= ((s >> (n - q)) & 1) as u32;
                }
            }
            if parity == 0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Standard recursive block basis on n qubits.
pub fn build_srbb(n: u32) -> Result<SrbbBasis> {
    if n < 1 {
        return Err(Error::InvalidArgument("qubit count must be at least 1".into()));
    }
    if n > 12 {
        return Err(Error::InvalidArgument(format!("qubit count {n} is too large")));
    }
    let d = 1usize << n;
    let mut elements = rbb_elements(d);
    let j_set = diagonal_index_set(d);
    for (c, &j) in j_set[..d - 1].iter().enumerate() {
        elements[j - 1].kind = ElementKind::Diagonal { signs: zstring_signs(n, c as u64 + 1) };
    }
    elements[d * d - 1].kind = ElementKind::Identity;
    let mut basis =
        SrbbBasis { dim: d, qubits: Some(n), elements, diagonal_index_set: j_set, pair_map: PairMap::new() };
    basis.pair_map = audit_pairs(&basis)?;
    Ok(basis)
}

/// χ value of an I/Z string; the leftmost factor is the least significant bit.
pub fn chi_index(string: &str) -> Result<u64> {
    if string.is_empty() {
        return Err(Error::InvalidArgument("empty I/Z string".into()));
    }
    if string.chars().count() > 63 {
        return Err(Error::InvalidArgument("I/Z string too long".into()));
    }
    let mut v = 0u64;
    for (i, c) in string.chars().enumerate() {
        match c {
            'I' => {}
            'Z' => v |= 1 << i,
            other => return Err(Error::InvalidSymbol(other)),
        }
    }
    Ok(v)
}

/// Inverse of `chi_index` for strings of length n.
pub fn chi_string(n: u32, chi: u64) -> String {
    (0..n).map(|i| if (chi >> i) & 1 == 1 { 'Z' } else { 'I' }).collect()
}

/// (q−1)² + (q−1) + (k mod (q−1)).
pub fn f_index(q: usize, k: usize) -> Result<usize> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("f index needs q >= 2, got {q}")));
    }
    Ok((q - 1) * (q - 1) + (q - 1) + k % (q - 1))
}

/// (q−1)² + (k mod (q−1)).
pub fn h_index(q: usize, k: usize) -> Result<usize> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("h index needs q >= 2, got {q}")));
    }
    Ok((q - 1) * (q - 1) + k % (q - 1))
}

/// Scans the densified elements and returns the pair → (σ₁ index, σ₂ index) map.
/// Fails if an element breaks the two-level shape or if any pair is missing or repeated.
pub fn audit_pairs(basis: &SrbbBasis) -> Result<PairMap> {
    let d = basis.dim;
    let mut partial: BTreeMap<(usize, usize), (Option<usize>, Option<usize>)> = BTreeMap::new();
    for e in &basis.elements {
        let m = e.dense();
        let mut upper = Vec::new();
        let mut lower = 0usize;
        for r in 0..d {
            for c in 0..d {
                if r != c && m.get(r, c) != ZERO {
                    if r < c {
                        upper.push((r, c));
                    } else {
                        lower += 1;
                    }
                }
            }
        }
        if upper.is_empty() && lower == 0 {
            continue;
        }
        if upper.len() != 1 || lower != 1 {
            return Err(Error::StructuralViolation {
                index: e.index,
                reason: format!("{} off-diagonal nonzeros", upper.len() + lower),
            });
        }
        let (r, c) = upper[0];
        let v = m.get(r, c);
        if m.get(c, r) != v.conj() {
            return Err(Error::StructuralViolation { index: e.index, reason: "not Hermitian".into() });
        }
        let axis = if v == ONE {
            PauliAxis::X
        } else if v == -I {
            PauliAxis::Y
        } else {
            return Err(Error::StructuralViolation { index: e.index, reason: format!("off-diagonal entry {v}") });
        };
        let slot = partial.entry((r + 1, c + 1)).or_default();
        let target = match axis {
            PauliAxis::X => &mut slot.0,
            PauliAxis::Y => &mut slot.1,
        };
        if let Some(prev) = target.replace(e.index) {
            return Err(Error::PairMap(format!(
                "pair ({}, {}) has two {axis} elements: {prev} and {}",
                r + 1,
                c + 1,
                e.index
            )));
        }
    }
    let mut map = PairMap::new();
    for a in 1..=d {
        for b in a + 1..=d {
            match partial.get(&(a, b)) {
                Some((Some(x), Some(y))) => {
                    map.insert((a, b), (*x, *y));
                }
                _ => return Err(Error::PairMap(format!("pair ({a}, {b}) lacks a σ₁ or σ₂ element"))),
            }
        }
    }
    Ok(map)
}

/// Shapes of a non-diagonal element after conjugation by a 2-cycle: the σ block
/// on top, in the middle, or at the bottom of an otherwise ±1 diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockShape {
    Top,
    Middle,
    Bottom,
}

/// Classifies a dense matrix as one of the three two-level shapes. The
/// canonical 2-cycle is (α, β−1), which moves the coupled pair onto (β−1, β).
pub fn classify_shape(m: &CMat) -> Result<BlockShape> {
    let d = m.dim();
    let bad = |reason: String| Error::StructuralViolation { index: 0, reason };
    let mut pair = None;
    for r in 0..d {
        for c in r + 1..d {
            if (m.get(r, c) != ZERO || m.get(c, r) != ZERO) && pair.replace((r, c)).is_some() {
                return Err(bad("more than one coupled pair".into()));
            }
        }
    }
    let (a, b) = pair.ok_or_else(|| bad("diagonal matrix".into()))?;
    let (ab, ba) = (m.get(a, b), m.get(b, a));
    if !((ab == ONE && ba == ONE) || (ab == -I && ba == I)) {
        return Err(bad(format!("block entries {ab}, {ba} are not σ₁ or σ₂")));
    }
    for i in 0..d {
        let v = m.get(i, i);
        let ok = if i == a || i == b { v == ZERO } else { v == ONE || v == -ONE };
        if !ok {
            return Err(bad(format!("diagonal entry {v} at {}", i + 1)));
        }
    }
    Ok(if b + 1 == d {
        BlockShape::Bottom
    } else if b == 1 {
        BlockShape::Top
    } else {
        BlockShape::Middle
    })
}

/// One line per element: `j kind pair pauli trace`.
pub fn summary_line(e: &SrbbElement) -> String {
    let (pair, pauli) = match &e.kind {
        ElementKind::TwoLevel { alpha, beta, pauli, .. } => (format!("({alpha},{beta})"), pauli.to_string()),
        _ => ("-".to_string(), "-".to_string()),
    };
    format!("{} {} {} {} {}", e.index, e.kind_label(), pair, pauli, e.trace())
}
