//! Randomized checks of the structural invariants: lattice algebra, the
//! Ringel form, enumeration determinism and signs, and the ideal/matching
//! correspondence.

use brane_dt::dimer::roundtrip;
use brane_dt::ideals::{
    dt_sign, enumerate_ideals, partition_function, partition_function_with, table_for, EnumOptions,
};
use brane_dt::model::{builtin_tiling, ringel_form, smith_normal_form, weight_lattice, DimVector, TilingSpec};
use proptest::prelude::*;

fn builtin(i: usize) -> TilingSpec {
    match i {
        0 => builtin_tiling("c3", None),
        1 => builtin_tiling("conifold", None),
        2 => builtin_tiling("spp", None),
        3 => builtin_tiling("dp3", None),
        _ => builtin_tiling("c3-zn", Some(i as u32 - 2)),
    }
    .unwrap()
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>], inner: usize, cols: usize) -> Vec<Vec<i64>> {
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

/// Determinant by fraction-free elimination.
fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_is_a_valid_factorization(
        (m, n, entries) in (1usize..=4, 1usize..=4)
            .prop_flat_map(|(m, n)| (Just(m), Just(n), prop::collection::vec(-6i64..=6, m * n)))
    ) {
        let a: Vec<Vec<i64>> = entries.chunks(n).map(|c| c.to_vec()).collect();
        let s = smith_normal_form(&a, n);
        let uav = matmul(&matmul(&s.u, &a, m, n), &s.v, n, n);
        prop_assert_eq!(&uav, &s.d);
        prop_assert_eq!(det(&s.u).abs(), 1);
        prop_assert_eq!(det(&s.v).abs(), 1);
        for i in 0..m {
            for j in 0..n {
                if i != j {
                    prop_assert_eq!(s.d[i][j], 0);
                }
            }
        }
        for w in s.invariants.windows(2) {
            prop_assert_eq!(w[1] % w[0], 0);
        }
        prop_assert!(s.invariants.iter().all(|&x| x > 0));
    }

    #[test]
    fn ringel_form_is_bilinear(
        which in 0usize..7,
        seed in prop::collection::vec(0u32..4, 18),
    ) {
        let t = builtin(which);
        let n = t.vertex_count;
        let a = DimVector(seed[..n].to_vec());
        let a2 = DimVector(seed[6..6 + n].to_vec());
        let b = DimVector(seed[12..12 + n].to_vec());
        let sum = DimVector(a.0.iter().zip(&a2.0).map(|(x, y)| x + y).collect());
        let lhs = ringel_form(&t, &sum, &b).unwrap();
        let rhs = ringel_form(&t, &a, &b).unwrap() + ringel_form(&t, &a2, &b).unwrap();
        prop_assert_eq!(lhs, rhs);
        let lhs = ringel_form(&t, &b, &sum).unwrap();
        let rhs = ringel_form(&t, &b, &a).unwrap() + ringel_form(&t, &b, &a2).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn counts_do_not_depend_on_threads(which in 0usize..7, vertex in 0usize..6, size in 0u32..=7, threads in 2usize..=4) {
        let t = builtin(which);
        let v = vertex % t.vertex_count;
        let one = partition_function(&t, v, size).unwrap();
        let mut opts = EnumOptions::new(size);
        opts.threads = threads;
        let many = partition_function_with(&t, v, &opts).unwrap();
        prop_assert_eq!(one.to_text(), many.to_text());
    }

    #[test]
    fn dt_coefficients_carry_the_sign(which in 0usize..7, vertex in 0usize..6) {
        let t = builtin(which);
        let v = vertex % t.vertex_count;
        let z = partition_function(&t, v, 6).unwrap();
        let signed = brane_dt::ideals::apply_dt_signs(&t, &z).unwrap();
        for (a, c) in z.sorted() {
            prop_assert!(c > 0);
            prop_assert_eq!(signed.get(a), dt_sign(&t, v, a).unwrap() as i128 * c);
        }
    }

    #[test]
    fn random_ideals_roundtrip(which in 0usize..6, vertex in 0usize..6, pick in any::<prop::sample::Index>()) {
        let t = builtin(which);
        let v = vertex % t.vertex_count;
        let mt = table_for(&t, v, 6, None).unwrap();
        let ideals = enumerate_ideals(&mt, 6).unwrap();
        let om = pick.get(&ideals);
        prop_assert!(om.is_closed(&mt).unwrap());
        prop_assert!(roundtrip(&mt, om).unwrap());
    }
}

#[test]
fn faces_cover_each_arrow_twice_and_share_a_weight() {
    for i in 0..7 {
        let t = builtin(i);
        let total: usize = t.faces.iter().map(|f| f.cycle.len()).sum();
        assert_eq!(total, 2 * t.arrows.len());
        let w = weight_lattice(&t).unwrap();
        for f in 0..t.faces.len() {
            assert_eq!(w.coord_of(&t.face_boundary(f)), w.omega_bar);
        }
        for r in &w.relation_basis {
            assert!(w.coord_of(r).iter().all(|&x| x == 0));
        }
    }
}

#[test]
fn enumeration_has_no_duplicates_and_grows() {
    for i in 0..6 {
        let t = builtin(i);
        for v in 0..t.vertex_count {
            let mt = table_for(&t, v, 7, None).unwrap();
            let ideals = enumerate_ideals(&mt, 7).unwrap();
            let unique: std::collections::BTreeSet<_> = ideals.iter().map(|o| o.elements.clone()).collect();
            assert_eq!(unique.len(), ideals.len());
            let sizes = partition_function(&t, v, 7).unwrap().by_size();
            for n in 1..sizes.len() - 1 {
                assert!(sizes[n + 1] >= sizes[n], "builtin {i} vertex {v}: {sizes:?}");
            }
        }
    }
}
