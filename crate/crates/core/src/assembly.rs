//! The parametric layer ζ·Ψ·Φ built from structural exponentials of SRBB
//! elements, and the L-layer product.
//!
//! Per layer the factors are multiplied in this fixed order:
//!
//! * ζ: exponentials of the Z-strings, ascending χ;
//! * Ψ: σ₁ then σ₂ on each adjacent pair (2j−1, 2j), then the even groups x = 1..K;
//! * Φ: the odd groups x = 1..K.
//!
//! A group for transposition set T carries σ₁, σ₂ exponentials on two pairs per
//! transposition, chosen so that ΠT·(group product)·ΠT is block diagonal on
//! adjacent pairs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{permutation_to_matrix, CMat, Permutation, C64};
use crate::srbb::{build_srbb, ElementKind, PauliAxis, SrbbBasis, SrbbElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn tag(self) -> &'static str {
        match self {
            Parity::Even => "e",
            Parity::Odd => "o",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// exp(iθ·e) = cos θ·I + i sin θ·e, built without a matrix exponential.
pub fn exp_element(e: &SrbbElement, theta: f64) -> CMat {
    let mut m = CMat::identity(e.dim);
    apply_exp_right(&mut m, e, theta);
    m
}

/// a ← a·exp(iθ·e) in O(d²).
pub fn apply_exp_right(a: &mut CMat, e: &SrbbElement, theta: f64) {
    let d = a.dim();
    let (s, c) = theta.sin_cos();
    let plus = C64::new(c, s);
    let minus = C64::new(c, -s);
    let data = a.as_mut_slice();
    match &e.kind {
        ElementKind::Identity => {
            for v in data.iter_mut() {
                *v *= plus;
            }
        }
        ElementKind::Diagonal { signs } => {
            for row in data.chunks_exact_mut(d) {
                for (v, &sg) in row.iter_mut().zip(signs) {
                    *v *= if sg > 0 { plus } else { minus };
                }
            }
        }
        ElementKind::TwoLevel { alpha, beta, pauli, diag_signs } => {
            let (a0, b0) = (alpha - 1, beta - 1);
            // Block of exp: [[c, i s e_ab], [i s e_ba, c]].
            let (ab, ba) = match pauli {
                PauliAxis::X => (C64::new(0.0, s), C64::new(0.0, s)),
                PauliAxis::Y => (C64::new(s, 0.0), C64::new(-s, 0.0)),
            };
            for row in data.chunks_exact_mut(d) {
                for (v, &sg) in row.iter_mut().zip(diag_signs) {
                    if sg > 0 {
                        *v *= plus;
                    } else if sg < 0 {
                        *v *= minus;
                    }
                }
                let (x, y) = (row[a0], row[b0]);
                row[a0] = x * c + y * ba;
                row[b0] = x * ab + y * c;
            }
        }
    }
}

/// 2^{n−2} disjoint transpositions of one parity family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranspositionSet {
    pub n: u32,
    pub parity: Parity,
    pub x: usize,
    /// (α, β), 1-based, ascending in α.
    pub transpositions: Vec<(usize, usize)>,
}

impl TranspositionSet {
    /// Qubits whose bit is set in x, reading x as an (n−1)-bit string with qubit 1 as MSB.
    pub fn lambda(&self) -> Vec<u32> {
        lambda_of(self.n, self.x)
    }
}

pub(crate) fn lambda_of(n: u32, x: usize) -> Vec<u32> {
    (1..n).filter(|&q| (x >> (n - 1 - q)) & 1 == 1).collect()
}

pub fn build_transposition_sets(n: u32, parity: Parity, x: usize) -> Result<TranspositionSet> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("transposition sets need n >= 2, got {n}")));
    }
    let k = (1usize << (n - 1)) - 1;
    if x == 0 || x > k {
        return Err(Error::InvalidArgument(format!("x = {x} outside 1..={k}")));
    }
    // In 0-based state indices the set pairs 2m+1 with (2m+1) XOR 2x for every m whose bit at
    // the highest set bit of x is clear.
    let mask = 2 * x;
    let top = usize::BITS - 1 - mask.leading_zeros();
    let d = 1usize << n;
    let mut pairs = Vec::with_capacity(d / 4);
    for s in (1..d).step_by(2) {
        if (s >> top) & 1 == 1 {
            continue;
        }
        let t = match parity {
            Parity::Even => s ^ mask,
            Parity::Odd => s ^ mask ^ 1,
        };
        pairs.push((s + 1, t + 1));
    }
    Ok(TranspositionSet { n, parity, x, transpositions: pairs })
}

/// Product of the disjoint transpositions of the set.
pub fn pi_t(ts: &TranspositionSet) -> Permutation {
    let d = 1usize << ts.n;
    let mut image: Vec<usize> = (1..=d).collect();
    for &(a, b) in &ts.transpositions {
        image.swap(a - 1, b - 1);
    }
    Permutation::new(image).expect("disjoint transpositions form a permutation")
}

/// The two pairs carried by a transposition of the given parity.
pub fn group_pairs(parity: Parity, (a, b): (usize, usize)) -> [(usize, usize); 2] {
    match parity {
        Parity::Even => [(a, b - 1), (a - 1, b)],
        Parity::Odd => [(a - 1, b), (a, b + 1)],
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPlan {
    pub set: TranspositionSet,
    /// SRBB indices in multiplication order (4 per transposition).
    pub indices: Vec<usize>,
}

/// Where every angle of a layer goes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerPlan {
    pub n: u32,
    pub zeta: Vec<usize>,
    /// σ₁/σ₂ indices on (2j−1, 2j), j ascending.
    pub first: Vec<usize>,
    pub even: Vec<GroupPlan>,
    pub odd: Vec<GroupPlan>,
}

impl LayerPlan {
    pub fn new(basis: &SrbbBasis) -> Result<Self> {
        let n = basis.qubits.ok_or_else(|| Error::InvalidArgument("layer plans need a qubit basis".into()))?;
        let d = basis.dim;
        let zeta = basis.zeta_indices();
        let mut first = Vec::with_capacity(d);
        for j in 1..=d / 2 {
            first.push(basis.pair_index(2 * j - 1, 2 * j, PauliAxis::X)?);
            first.push(basis.pair_index(2 * j - 1, 2 * j, PauliAxis::Y)?);
        }
        let k = if n >= 2 { d / 2 - 1 } else { 0 };
        let group = |parity: Parity, x: usize| -> Result<GroupPlan> {
            let set = build_transposition_sets(n, parity, x)?;
            let mut indices = Vec::with_capacity(d);
            for &t in &set.transpositions {
                for (p, q) in group_pairs(parity, t) {
                    indices.push(basis.pair_index(p, q, PauliAxis::X)?);
                    indices.push(basis.pair_index(p, q, PauliAxis::Y)?);
                }
            }
            Ok(GroupPlan { set, indices })
        };
        let even = (1..=k).map(|x| group(Parity::Even, x)).collect::<Result<Vec<_>>>()?;
        let odd = (1..=k).map(|x| group(Parity::Odd, x)).collect::<Result<Vec<_>>>()?;
        let plan = LayerPlan { n, zeta, first, even, odd };

        let mut seen = plan.index_map();
        if seen.len() != d * d - 1 {
            return Err(Error::AngleCount { expected: d * d - 1, got: seen.len() });
        }
        seen.sort_unstable();
        if seen.iter().enumerate().any(|(i, &j)| j != i + 1) {
            return Err(Error::PairMap("layer plan does not cover every non-identity index once".into()));
        }
        Ok(plan)
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn zeta_len(&self) -> usize {
        self.zeta.len()
    }

    pub fn psi_len(&self) -> usize {
        self.first.len() + self.even.iter().map(|g| g.indices.len()).sum::<usize>()
    }

    pub fn phi_len(&self) -> usize {
        self.odd.iter().map(|g| g.indices.len()).sum()
    }

    pub fn angles_per_layer(&self) -> usize {
        self.zeta_len() + self.psi_len() + self.phi_len()
    }

    /// Flat angle position → SRBB index (ζ, then Ψ, then Φ).
    pub fn index_map(&self) -> Vec<usize> {
        let mut v = self.zeta.clone();
        v.extend(&self.first);
        for g in self.even.iter().chain(&self.odd) {
            v.extend(&g.indices);
        }
        v
    }

    /// Groups with their offsets into the flat angle vector.
    pub fn group_offsets(&self) -> Vec<(&GroupPlan, usize)> {
        let mut off = self.zeta_len() + self.first.len();
        let mut out = Vec::new();
        for g in self.even.iter().chain(&self.odd) {
            out.push((g, off));
            off += g.indices.len();
        }
        out
    }
}

fn product_of(basis: &SrbbBasis, indices: &[usize], angles: &[f64]) -> Result<CMat> {
    if indices.len() != angles.len() {
        return Err(Error::AngleCount { expected: indices.len(), got: angles.len() });
    }
    let mut m = CMat::identity(basis.dim);
    for (&j, &t) in indices.iter().zip(angles) {
        apply_exp_right(&mut m, basis.element(j), t);
    }
    Ok(m)
}

/// Ordered product of one group's exponentials (four angles per transposition).
pub fn build_group_factor(basis: &SrbbBasis, ts: &TranspositionSet, angles: &[f64]) -> Result<CMat> {
    let mut indices = Vec::with_capacity(4 * ts.transpositions.len());
    for &t in &ts.transpositions {
        for (p, q) in group_pairs(ts.parity, t) {
            indices.push(basis.pair_index(p, q, PauliAxis::X)?);
            indices.push(basis.pair_index(p, q, PauliAxis::Y)?);
        }
    }
    product_of(basis, &indices, angles)
}

/// ΠT·(group product)·ΠT: block diagonal with 2×2 blocks on (2i−1, 2i).
pub fn build_m_factor(basis: &SrbbBasis, ts: &TranspositionSet, angles: &[f64]) -> Result<CMat> {
    Ok(build_group_factor(basis, ts, angles)?.conjugate_by(&pi_t(ts)))
}

pub fn build_zeta(basis: &SrbbBasis, angles: &[f64]) -> Result<CMat> {
    product_of(basis, &basis.zeta_indices(), angles)
}

pub fn build_psi(basis: &SrbbBasis, angles: &[f64]) -> Result<CMat> {
    let plan = LayerPlan::new(basis)?;
    let mut idx = plan.first.clone();
    for g in &plan.even {
        idx.extend(&g.indices);
    }
    product_of(basis, &idx, angles)
}

pub fn build_phi(basis: &SrbbBasis, angles: &[f64]) -> Result<CMat> {
    let plan = LayerPlan::new(basis)?;
    let idx: Vec<usize> = plan.odd.iter().flat_map(|g| g.indices.iter().copied()).collect();
    product_of(basis, &idx, angles)
}

/// The transposition matrix ΠT as a dense matrix.
pub fn pi_t_matrix(ts: &TranspositionSet) -> CMat {
    permutation_to_matrix(&pi_t(ts))
}

/// Basis plus layer plan, reused across many evaluations.
#[derive(Clone, Debug)]
pub struct Ansatz {
    pub basis: SrbbBasis,
    pub plan: LayerPlan,
    order: Vec<usize>,
}

impl Ansatz {
    pub fn new(n: u32) -> Result<Self> {
        let basis = build_srbb(n)?;
        Self::from_basis(basis)
    }

    pub fn from_basis(basis: SrbbBasis) -> Result<Self> {
        let plan = LayerPlan::new(&basis)?;
        let order = plan.index_map();
        Ok(Ansatz { basis, plan, order })
    }

    pub fn n(&self) -> u32 {
        self.plan.n
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    pub fn params(&self) -> usize {
        self.order.len()
    }

    pub fn index_map(&self) -> &[usize] {
        &self.order
    }

    /// a ← a·layer(θ).
    pub fn apply_layer(&self, a: &mut CMat, theta: &[f64]) -> Result<()> {
        if theta.len() != self.order.len() {
            return Err(Error::AngleCount { expected: self.order.len(), got: theta.len() });
        }
        for (&j, &t) in self.order.iter().zip(theta) {
            apply_exp_right(a, self.basis.element(j), t);
        }
        Ok(())
    }

    pub fn layer(&self, theta: &[f64]) -> Result<CMat> {
        let mut a = CMat::identity(self.dim());
        self.apply_layer(&mut a, theta)?;
        Ok(a)
    }

    /// layer_1 · layer_2 ⋯ layer_L.
    pub fn assemble(&self, schedule: &ThetaSchedule) -> Result<CMat> {
        schedule.validate_for(self)?;
        let mut a = CMat::identity(self.dim());
        for layer in &schedule.layers {
            self.apply_layer(&mut a, layer)?;
        }
        Ok(a)
    }

    pub fn zero_schedule(&self, layers: usize) -> ThetaSchedule {
        ThetaSchedule { n: self.n(), layers: vec![vec![0.0; self.params()]; layers], index_map: self.order.clone() }
    }
}

pub fn assemble_layer(basis: &SrbbBasis, theta: &[f64]) -> Result<CMat> {
    let plan = LayerPlan::new(basis)?;
    product_of(basis, &plan.index_map(), theta)
}

pub fn assemble(basis: &SrbbBasis, schedule: &ThetaSchedule) -> Result<CMat> {
    Ansatz::from_basis(basis.clone())?.assemble(schedule)
}

/// Angles for every layer, stored flat in plan order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaSchedule {
    pub n: u32,
    pub layers: Vec<Vec<f64>>,
    /// Flat position → SRBB index, identical for every layer.
    pub index_map: Vec<usize>,
}

impl ThetaSchedule {
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn validate_for(&self, ansatz: &Ansatz) -> Result<()> {
        if self.n != ansatz.n() {
            return Err(Error::DimensionMismatch { expected: ansatz.n() as usize, got: self.n as usize });
        }
        if self.layers.is_empty() {
            return Err(Error::InvalidArgument("schedule has no layers".into()));
        }
        if self.index_map != ansatz.index_map() {
            return Err(Error::Format("index_map does not match the layer plan".into()));
        }
        for layer in &self.layers {
            if layer.len() != ansatz.params() {
                return Err(Error::AngleCount { expected: ansatz.params(), got: layer.len() });
            }
            if layer.iter().any(|t| !t.is_finite()) {
                return Err(Error::InvalidArgument("non-finite angle".into()));
            }
        }
        Ok(())
    }

    /// Slices (ζ, Ψ, Φ) of one layer.
    pub fn parts<'a>(&'a self, plan: &LayerPlan, layer: usize) -> (&'a [f64], &'a [f64], &'a [f64]) {
        let t = &self.layers[layer];
        let (z, rest) = t.split_at(plan.zeta_len());
        let (p, f) = rest.split_at(plan.psi_len());
        (z, p, f)
    }

    /// Copy with every angle reduced to [0, 2π).
    pub fn canonical(&self) -> ThetaSchedule {
        let tau = std::f64::consts::TAU;
        let mut s = self.clone();
        for t in s.layers.iter_mut().flatten() {
            *t = t.rem_euclid(tau);
            if *t >= tau {
                *t = 0.0;
            }
        }
        s
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialises")
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let s: ThetaSchedule = serde_json::from_str(text)?;
        let ansatz = Ansatz::new(s.n)?;
        s.validate_for(&ansatz)?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{expm_oracle, frobenius_distance, I, ONE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_angles(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
        (0..k).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
    }

    #[test]
    fn exp_examples() {
        let b = build_srbb(2).unwrap();
        for e in &b.elements {
            assert_eq!(exp_element(e, 0.0), CMat::identity(4));
            let want = expm_oracle(&e.dense().scale(C64::new(0.37, 0.0)));
            assert!(frobenius_distance(&exp_element(e, 0.37), &want).unwrap() < 1e-12);
        }
        let z = exp_element(b.element(8), std::f64::consts::FRAC_PI_2);
        let diag: Vec<C64> = b.element(8).diagonal_signs().iter().map(|&s| I * s as f64).collect();
        assert!(frobenius_distance(&z, &CMat::from_diagonal(&diag)).unwrap() < 1e-15);
    }

    #[test]
    fn transposition_examples() {
        let e = build_transposition_sets(2, Parity::Even, 1).unwrap();
        assert_eq!(e.transpositions, vec![(2, 4)]);
        let o = build_transposition_sets(2, Parity::Odd, 1).unwrap();
        assert_eq!(o.transpositions, vec![(2, 3)]);
        assert_eq!(pi_t(&e), Permutation::transposition(4, 2, 4).unwrap());
        assert!(build_transposition_sets(2, Parity::Even, 2).is_err());
        assert!(build_transposition_sets(1, Parity::Even, 1).is_err());

        let mut all: Vec<(usize, usize)> =
            (1..=3).flat_map(|x| build_transposition_sets(3, Parity::Even, x).unwrap().transpositions).collect();
        all.sort();
        assert_eq!(all, vec![(2, 4), (2, 6), (2, 8), (4, 6), (4, 8), (6, 8)]);
    }

    #[test]
    fn lambda_reads_qubit_one_as_msb() {
        assert_eq!(lambda_of(3, 1), vec![2]);
        assert_eq!(lambda_of(3, 2), vec![1]);
        assert_eq!(lambda_of(3, 3), vec![1, 2]);
    }

    #[test]
    fn m_factor_is_block_diagonal() {
        let b = build_srbb(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for parity in [Parity::Even, Parity::Odd] {
            for x in 1..=3 {
                let ts = build_transposition_sets(3, parity, x).unwrap();
                let m = build_m_factor(&b, &ts, &random_angles(&mut rng, 8)).unwrap();
                for r in 0..8 {
                    for c in 0..8 {
                        if r / 2 != c / 2 {
                            assert!(m.get(r, c).norm() < 1e-15, "{parity} x={x} entry ({r},{c})");
                        }
                    }
                }
                assert!((m.det() - ONE).norm() < 1e-12);
                let zero = build_m_factor(&b, &ts, &[0.0; 8]).unwrap();
                assert_eq!(zero, CMat::identity(8));
            }
        }
        let ts = build_transposition_sets(3, Parity::Odd, 1).unwrap();
        assert!(matches!(build_m_factor(&b, &ts, &[0.0; 3]), Err(Error::AngleCount { .. })));
    }

    #[test]
    fn zeta_examples() {
        let b1 = build_srbb(1).unwrap();
        let z = build_zeta(&b1, &[std::f64::consts::FRAC_PI_4]).unwrap();
        let w = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!(frobenius_distance(&z, &CMat::from_diagonal(&[w, w.conj()])).unwrap() < 1e-15);
        let b2 = build_srbb(2).unwrap();
        let z = build_zeta(&b2, &[0.3, 1.1, -0.4]).unwrap();
        assert_eq!(z.max_off_diagonal(), 0.0);
        assert!((z.det() - ONE).norm() < 1e-14);
        assert!(build_zeta(&b2, &[0.3]).is_err());
    }

    #[test]
    fn plan_sizes_and_first_factor() {
        for n in 1..=5 {
            let a = Ansatz::new(n).unwrap();
            let d = 1usize << n;
            assert_eq!(a.params(), d * d - 1);
            assert_eq!(a.plan.zeta_len(), d - 1);
            assert_eq!(a.plan.psi_len(), d + (d / 2).saturating_sub(1) * d);
        }
        let a = Ansatz::new(2).unwrap();
        assert_eq!(a.plan.first, vec![1, 2, 11, 14]);
    }

    #[test]
    fn n1_layer_is_zeta_then_paulis() {
        let a = Ansatz::new(1).unwrap();
        let t = [0.4, -1.3, 2.2];
        let b = &a.basis;
        let want =
            &(&exp_element(b.element(3), 0.4) * &exp_element(b.element(1), -1.3)) * &exp_element(b.element(2), 2.2);
        assert!(frobenius_distance(&a.layer(&t).unwrap(), &want).unwrap() < 1e-15);
    }

    #[test]
    fn layer_factors_multiply_to_layer() {
        let a = Ansatz::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random_angles(&mut rng, a.params());
        let s = ThetaSchedule { n: 3, layers: vec![t.clone()], index_map: a.index_map().to_vec() };
        let (z, p, f) = s.parts(&a.plan, 0);
        let b = &a.basis;
        let prod = &(&build_zeta(b, z).unwrap() * &build_psi(b, p).unwrap()) * &build_phi(b, f).unwrap();
        assert!(frobenius_distance(&prod, &a.layer(&t).unwrap()).unwrap() < 1e-12);
        assert!(frobenius_distance(&prod, &assemble_layer(b, &t).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn schedule_round_trip() {
        let a = Ansatz::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = ThetaSchedule {
            n: 2,
            layers: vec![random_angles(&mut rng, 15), random_angles(&mut rng, 15)],
            index_map: a.index_map().to_vec(),
        };
        let back = ThetaSchedule::from_text(&s.to_text()).unwrap();
        assert_eq!(back, s);
        for (x, y) in back.layers.iter().flatten().zip(s.layers.iter().flatten()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        let mut bad = s.clone();
        bad.index_map.swap(0, 1);
        assert!(ThetaSchedule::from_text(&bad.to_text()).is_err());
        let mut short = s;
        short.layers[1].pop();
        assert!(ThetaSchedule::from_text(&short.to_text()).is_err());
    }
}
