//! Dense complex matrices, permutations, Haar sampling and a reference
//! matrix exponential.
//!
//! Everything here is plain row-major `Complex64` storage. Dimensions in the
//! compiler never exceed a few dozen, so no blocking or BLAS is involved.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        CMat { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: data.len() });
        }
        Ok(CMat { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    pub fn from_diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * entries.len() + i] = v;
        }
        m
    }

    /// Builds a matrix from real rows; handy for permutation and Pauli literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            data.extend(row.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self::from_vec(dim, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let (a, b) = (self.dim, other.dim);
        CMat::from_fn(a * b, |r, c| self.get(r / b, c / b) * other.get(r % b, c % b))
    }

    /// ‖A†A − I‖_F.
    pub fn unitarity_defect(&self) -> f64 {
        let p = &self.adjoint() * self;
        frobenius_distance_unchecked(&p, &CMat::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    /// Largest modulus of any entry outside the diagonal.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c {
                    m = m.max(self.get(r, c).norm());
                }
            }
        }
        m
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> C64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = ONE;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .expect("non-empty pivot range");
            if a[p * n + k].norm() == 0.0 {
                return ZERO;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for r in k + 1..n {
                let f = a[r * n + k] / pivot;
                if f == ZERO {
                    continue;
                }
                for c in k..n {
                    let v = a[k * n + c];
                    a[r * n + c] -= f * v;
                }
            }
        }
        det
    }

    /// Rescales a unitary by det^{-1/d} (principal root) so the result has unit determinant.
    /// Returns the scalar that was divided out.
    pub fn to_special_unitary(&self) -> (CMat, C64) {
        let det = self.det();
        let root = C64::from_polar(det.norm().powf(1.0 / self.dim as f64), det.arg() / self.dim as f64);
        (self.scale(root.inv()), root)
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out[r * n..(r + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        CMat { dim: n, data: out }
    }

    /// Rows reordered by a permutation: returns P·A with P = permutation_to_matrix(p).
    pub fn permute_rows(&self, p: &Permutation) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for j in 0..n {
            let dst = p.image[j];
            out.data[dst * n..(dst + 1) * n].copy_from_slice(&self.data[j * n..(j + 1) * n]);
        }
        out
    }

    /// Columns reordered by a permutation: returns A·Pᵀ.
    pub fn permute_cols(&self, p: &Permutation) -> CMat {
        let inv = p.inverse();
        CMat::from_fn(self.dim, |r, c| self.get(r, inv.image[c]))
    }

    /// Conjugation P·A·Pᵀ, which for an involutive P is P·A·P.
    pub fn conjugate_by(&self, p: &Permutation) -> CMat {
        self.permute_rows(p).permute_cols(p)
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs)
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim);
        CMat { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim);
        CMat { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

fn frobenius_distance_unchecked(a: &CMat, b: &CMat) -> f64 {
    a.data.iter().zip(&b.data).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// ‖a − b‖_F.
pub fn frobenius_distance(a: &CMat, b: &CMat) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, got: b.dim });
    }
    Ok(frobenius_distance_unchecked(a, b))
}

/// min over global phases φ of ‖a − e^{iφ} b‖_F.
///
/// Equals sqrt(2d − 2|tr(a†b)|) for unitaries; the entrywise form keeps full
/// precision near zero.
pub fn phase_invariant_distance(a: &CMat, b: &CMat) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, got: b.dim });
    }
    let overlap: C64 = a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { ONE };
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| (x - phase * y).norm_sqr()).sum::<f64>().sqrt())
}

/// exp(i·h) by scaling and squaring around a truncated Taylor series.
///
/// Kept independent of the structural exponentials in `assembly`: it never
/// assumes h² = I and is only used to check them.
pub fn expm_oracle(h: &CMat) -> CMat {
    let n = h.dim();
    let a = h.scale(I);
    let norm1 = (0..n).map(|c| (0..n).map(|r| a.get(r, c).norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0u32;
    if norm1 > 0.5 {
        squarings = (norm1 / 0.5).log2().ceil() as u32;
    }
    let scaled = a.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));

    let mut result = CMat::identity(n);
    let mut term = CMat::identity(n);
    for k in 1..=30 {
        term = (&term * &scaled).scale(C64::new(1.0 / k as f64, 0.0));
        result = &result + &term;
        if term.frobenius_norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the R diagonal
/// made real-positive. Deterministic per seed.
pub fn haar_random_unitary(dim: usize, seed: u64) -> CMat {
    assert!(dim >= 1, "dimension must be positive");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    // Column-major Ginibre draw.
    let mut cols: Vec<Vec<C64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();

    // Gram-Schmidt with one re-orthogonalisation pass. R_kk = ‖v_k‖ > 0, which is
    // exactly the phase-normalised QR.
    for k in 0..dim {
        for _pass in 0..2 {
            for j in 0..k {
                let proj: C64 = cols[j].iter().zip(&cols[k]).map(|(q, v)| q.conj() * v).sum();
                let qj = cols[j].clone();
                for (v, q) in cols[k].iter_mut().zip(&qj) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[k].iter_mut() {
            *v /= norm;
        }
    }
    CMat::from_fn(dim, |r, c| cols[c][r])
}

/// Haar unitary projected onto SU(dim) by a global phase.
pub fn haar_random_special_unitary(dim: usize, seed: u64) -> CMat {
    haar_random_unitary(dim, seed).to_special_unitary().0
}

/// Numerical rank of a set of complex vectors (Gram-Schmidt with re-orthogonalisation).
/// A vector counts as independent when its residual norm exceeds `tol` times its original norm.
pub fn numerical_rank(vectors: &[Vec<C64>], tol: f64) -> usize {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let orig = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if orig == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &basis {
                let proj: C64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in w.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let res = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if res > tol * orig {
            for x in w.iter_mut() {
                *x /= res;
            }
            basis.push(w);
        }
    }
    basis.len()
}

/// A permutation of {1, …, dim}. Stored 0-based; the public surface is 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// `image[j-1]` is the image of j (1-based).
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let dim = image.len();
        if dim == 0 {
            return Err(Error::InvalidPermutation("empty".into()));
        }
        let mut seen = vec![false; dim];
        let mut zero_based = Vec::with_capacity(dim);
        for &v in &image {
            if v == 0 || v > dim {
                return Err(Error::InvalidPermutation(format!("image {v} outside 1..={dim}")));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::InvalidPermutation(format!("image {v} repeated")));
            }
            zero_based.push(v - 1);
        }
        Ok(Permutation { image: zero_based })
    }

    pub fn identity(dim: usize) -> Self {
        Permutation { image: (0..dim).collect() }
    }

    /// The 2-cycle (a b) on 1..=dim.
    pub fn transposition(dim: usize, a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 || a > dim || b > dim || a == b {
            return Err(Error::InvalidPermutation(format!("bad transposition ({a},{b}) in dim {dim}")));
        }
        let mut p = Self::identity(dim);
        p.image.swap(a - 1, b - 1);
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.image.len()
    }

    /// Image of the 1-based point j.
    pub fn apply(&self, j: usize) -> usize {
        self.image[j - 1] + 1
    }

    /// 1-based image array.
    pub fn image(&self) -> Vec<usize> {
        self.image.iter().map(|v| v + 1).collect()
    }

    /// self ∘ other: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(Permutation { image: other.image.iter().map(|&j| self.image[j]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.dim()];
        for (j, &v) in self.image.iter().enumerate() {
            inv[v] = j;
        }
        Permutation { image: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(j, &v)| j == v)
    }

    pub fn is_involution(&self) -> bool {
        self.image.iter().enumerate().all(|(j, &v)| self.image[v] == j)
    }

    /// 1-based points moved by the permutation.
    pub fn non_fixed_points(&self) -> Vec<usize> {
        self.image.iter().enumerate().filter(|(j, &v)| *j != v).map(|(j, _)| j + 1).collect()
    }

    pub fn is_transposition(&self) -> bool {
        self.non_fixed_points().len() == 2 && self.is_involution()
    }
}

/// 0/1 matrix with M[p(j), j] = 1.
pub fn permutation_to_matrix(p: &Permutation) -> CMat {
    let n = p.dim();
    let mut m = CMat::zeros(n);
    for j in 0..n {
        m.set(p.image[j], j, ONE);
    }
    m
}

/// On-disk matrix document: `{"n": 2, "dim": 4, "re": [...], "im": [...]}` (row-major).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMat) -> Self {
        let n = m.dim().is_power_of_two().then(|| m.dim().trailing_zeros() as usize);
        MatrixFile {
            n,
            dim: Some(m.dim()),
            re: m.as_slice().iter().map(|z| z.re).collect(),
            im: m.as_slice().iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let from_n = match self.n {
            Some(n) if n >= 31 => return Err(Error::Format(format!("qubit count {n} too large"))),
            Some(n) => Some(1usize << n),
            None => None,
        };
        let dim = match (from_n, self.dim) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Format(format!("fields disagree: n gives dim {a}, dim is {b}")))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(Error::Format("matrix document needs `n` or `dim`".into())),
        };
        if dim == 0 {
            return Err(Error::Format("dimension must be positive".into()));
        }
        if self.re.len() != dim * dim || self.im.len() != dim * dim {
            return Err(Error::Format(format!(
                "expected {} entries in re/im, got {}/{}",
                dim * dim,
                self.re.len(),
                self.im.len()
            )));
        }
        let data = self.re.iter().zip(&self.im).map(|(&r, &i)| C64::new(r, i)).collect();
        CMat::from_vec(dim, data)
    }
}

pub fn matrix_to_json(m: &CMat) -> String {
    serde_json::to_string_pretty(&MatrixFile::from_matrix(m)).expect("matrix serialises")
}

pub fn matrix_from_json(text: &str) -> Result<CMat> {
    let doc: MatrixFile = serde_json::from_str(text)?;
    doc.to_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pauli_x() -> CMat {
        CMat::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn pauli_z() -> CMat {
        CMat::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }

    #[test]
    fn frobenius_examples() {
        let i2 = CMat::identity(2);
        assert_eq!(frobenius_distance(&i2, &i2).unwrap(), 0.0);
        let d = frobenius_distance(&i2, &i2.scale(-ONE)).unwrap();
        assert!((d - 8f64.sqrt()).abs() < 1e-15);
        // X - Z = [[-1, 1], [1, 1]]
        let d = frobenius_distance(&pauli_x(), &pauli_z()).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
        assert!(frobenius_distance(&i2, &CMat::identity(3)).is_err());
    }

    #[test]
    fn expm_examples() {
        let e = expm_oracle(&CMat::zeros(3));
        assert!(frobenius_distance(&e, &CMat::identity(3)).unwrap() < 1e-15);

        let e = expm_oracle(&pauli_x().scale(C64::new(PI, 0.0)));
        assert!(frobenius_distance(&e, &CMat::identity(2).scale(-ONE)).unwrap() < 1e-12);

        let e = expm_oracle(&pauli_z().scale(C64::new(PI / 2.0, 0.0)));
        let want = CMat::from_diagonal(&[I, -I]);
        assert!(frobenius_distance(&e, &want).unwrap() < 1e-12);
    }

    #[test]
    fn haar_examples() {
        let u = haar_random_unitary(1, 5);
        assert!((u.get(0, 0).norm() - 1.0).abs() < 1e-14);
        assert_eq!(haar_random_unitary(4, 11), haar_random_unitary(4, 11));
        assert_ne!(haar_random_unitary(4, 11), haar_random_unitary(4, 12));
        assert!(haar_random_unitary(4, 3).unitarity_defect() <= 1e-12);
        let su = haar_random_special_unitary(8, 3);
        assert!((su.det() - ONE).norm() < 1e-12);
        assert!(su.unitarity_defect() <= 1e-12);
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(permutation_to_matrix(&Permutation::identity(4)), CMat::identity(4));

        let t = Permutation::transposition(4, 2, 4).unwrap();
        let m = permutation_to_matrix(&t);
        let want = CMat::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert_eq!(m, want);

        let a = Permutation::transposition(4, 1, 3).unwrap();
        let composed = a.compose(&t).unwrap();
        assert_eq!(permutation_to_matrix(&composed), &permutation_to_matrix(&a) * &m);
        assert!(composed.is_involution());
        assert!(!composed.is_transposition());
        assert!(t.is_transposition());
    }

    #[test]
    fn permutation_rejects_garbage() {
        assert!(Permutation::new(vec![1, 1, 2]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![]).is_err());
        assert!(Permutation::transposition(3, 2, 2).is_err());
    }

    #[test]
    fn conjugation_matches_dense_product() {
        let u = haar_random_unitary(4, 9);
        let p = Permutation::new(vec![3, 1, 4, 2]).unwrap();
        let pm = permutation_to_matrix(&p);
        let dense = &(&pm * &u) * &pm.adjoint();
        assert!(frobenius_distance(&dense, &u.conjugate_by(&p)).unwrap() < 1e-15);
    }

    #[test]
    fn determinant_and_su_projection() {
        let d = CMat::from_diagonal(&[I, I, ONE, ONE]);
        assert!((d.det() - C64::new(-1.0, 0.0)).norm() < 1e-15);
        let (su, root) = d.to_special_unitary();
        assert!((su.det() - ONE).norm() < 1e-14);
        assert!((root.powi(4) - d.det()).norm() < 1e-14);
    }

    #[test]
    fn matrix_file_round_trip_and_validation() {
        let u = haar_random_unitary(4, 1);
        let back = matrix_from_json(&matrix_to_json(&u)).unwrap();
        assert_eq!(back, u);

        assert!(matrix_from_json(r#"{"dim": 2, "re": [1,0,0], "im": [0,0,0]}"#).is_err());
        assert!(matrix_from_json(r#"{"n": 1, "dim": 3, "re": [1,0,0,1], "im": [0,0,0,0]}"#).is_err());
        assert!(matrix_from_json(r#"{"re": [1], "im": [0]}"#).is_err());
        let m = matrix_from_json(r#"{"n": 1, "re": [1,0,0,1], "im": [0,0,0,0]}"#).unwrap();
        assert_eq!(m, CMat::identity(2));
    }

    #[test]
    fn rank_detects_dependence() {
        let v1 = vec![ONE, ZERO, ONE];
        let v2 = vec![ZERO, ONE, ZERO];
        let v3 = vec![ONE, ONE, ONE];
        assert_eq!(numerical_rank(&[v1.clone(), v2.clone(), v3], 1e-10), 2);
        assert_eq!(numerical_rank(&[v1, v2, vec![ONE, ZERO, ZERO]], 1e-10), 3);
    }
}
