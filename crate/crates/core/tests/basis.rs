use proptest::prelude::*;
use srbbc_core::matcore::{numerical_rank, CMat, C64};
use srbbc_core::srbb::{build_rbb, build_srbb, chi_index, chi_string, zstring_signs, ElementKind, SrbbBasis};

const P: i64 = 1_000_000_007;

/// Rank of an integer matrix over GF(P).
fn rank_mod_p(mut rows: Vec<Vec<i64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let pow = |mut b: i64, mut e: i64| {
        let mut r = 1i64;
        b = b.rem_euclid(P);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c].rem_euclid(P) != 0) else { continue };
        rows.swap(rank, piv);
        let inv = pow(rows[rank][c], P - 2);
        for v in rows[rank].iter_mut() {
            *v = v.rem_euclid(P) * inv % P;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c].rem_euclid(P) != 0 {
                let f = rows[r][c].rem_euclid(P);
                let pivot = rows[rank].clone();
                for (v, p) in rows[r].iter_mut().zip(&pivot) {
                    *v = (*v - f * p).rem_euclid(P);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Complex independence of v_j equals real independence of {v_j, i·v_j}.
fn exact_complex_rank(b: &SrbbBasis) -> usize {
    let mut rows = Vec::new();
    for e in &b.elements {
        let m = e.dense();
        let (re, im): (Vec<i64>, Vec<i64>) = m.as_slice().iter().map(|z| (z.re as i64, z.im as i64)).unzip();
        assert!(m.as_slice().iter().all(|z| z.re.fract() == 0.0 && z.im.fract() == 0.0));
        rows.push(re.iter().chain(&im).copied().collect());
        rows.push(im.iter().map(|x| -x).chain(re.iter().copied()).collect());
    }
    rank_mod_p(rows) / 2
}

fn check_element_algebra(b: &SrbbBasis) {
    let d = b.dim;
    let id = CMat::identity(d);
    for e in &b.elements {
        let m = e.dense();
        assert_eq!(m.adjoint(), m, "d={d} j={} not Hermitian", e.index);
        assert_eq!(&m * &m, id, "d={d} j={} does not square to I", e.index);
        let tr = m.trace();
        assert_eq!(tr.im, 0.0);
        assert_eq!(tr.re as i64, e.trace());
        let want = match e.kind {
            ElementKind::Identity => d as i64,
            _ if d.is_multiple_of(2) => 0,
            _ => 1,
        };
        assert_eq!(e.trace(), want, "d={d} j={}", e.index);
    }
}

#[test]
fn rbb_algebra_for_all_small_dimensions() {
    for d in 2..=16 {
        let b = build_rbb(d).unwrap();
        assert_eq!(b.len(), d * d);
        check_element_algebra(&b);
    }
}

#[test]
fn rbb_exact_rank_up_to_eight() {
    for d in 2..=8 {
        assert_eq!(exact_complex_rank(&build_rbb(d).unwrap()), d * d, "d={d}");
    }
}

#[test]
fn numerical_rank_at_sixteen() {
    for b in [build_rbb(16).unwrap(), build_srbb(4).unwrap()] {
        let vs: Vec<Vec<C64>> = b.elements.iter().map(|e| e.dense().as_slice().to_vec()).collect();
        assert_eq!(numerical_rank(&vs, 1e-8), 256);
    }
}

#[test]
fn srbb_is_an_exact_basis() {
    for n in 1..=3 {
        let b = build_srbb(n).unwrap();
        check_element_algebra(&b);
        assert_eq!(exact_complex_rank(&b), 1 << (2 * n));
    }
}

#[test]
fn srbb_diagonal_slots_hold_z_strings() {
    let b = build_srbb(3).unwrap();
    assert_eq!(b.diagonal_index_set, vec![3, 8, 15, 24, 35, 48, 63, 64]);
    for (chi, &j) in b.diagonal_index_set[..7].iter().enumerate() {
        let chi = chi as u64 + 1;
        assert_eq!(b.element(j).diagonal_signs(), zstring_signs(3, chi));
        assert_eq!(chi_index(&chi_string(3, chi)).unwrap(), chi);
    }
    assert_eq!(zstring_signs(2, chi_index("ZI").unwrap()), vec![1, 1, -1, -1]);
    assert_eq!(zstring_signs(2, chi_index("IZ").unwrap()), vec![1, -1, 1, -1]);
}

#[test]
fn off_diagonal_elements_are_two_level() {
    for d in [4, 7, 8] {
        for e in &build_rbb(d).unwrap().elements {
            if let Some((a, b)) = e.pair() {
                assert!(a < b && b <= d);
                let m = e.dense();
                let off = (0..d)
                    .flat_map(|r| (0..d).map(move |c| (r, c)))
                    .filter(|&(r, c)| r != c && m.get(r, c) != C64::new(0.0, 0.0))
                    .count();
                assert_eq!(off, 2);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_elements_are_involutions(d in 2usize..=12, pick in 0usize..144) {
        let b = build_rbb(d).unwrap();
        let e = &b.elements[pick % b.len()];
        let m = e.dense();
        prop_assert_eq!(&m * &m, CMat::identity(d));
        prop_assert!(m.is_hermitian(0.0));
        prop_assert!(m.is_unitary(0.0));
    }

    #[test]
    fn chi_strings_round_trip(n in 1u32..=8, raw in 1u64..256) {
        let chi = 1 + (raw - 1) % ((1u64 << n) - 1);
        let s = chi_string(n, chi);
        prop_assert_eq!(s.len(), n as usize);
        prop_assert_eq!(chi_index(&s).unwrap(), chi);
        let signs = zstring_signs(n, chi);
        prop_assert_eq!(signs.iter().map(|&s| s as i64).sum::<i64>(), 0);
    }
}
