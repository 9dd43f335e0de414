use brane_dt::lp::Q;
use brane_dt::series::{detect_recurrence, expand_rational, plethystic_exp, plethystic_log, Polynomial, TruncatedSeries};
use proptest::prelude::*;

const D: u32 = 8;

fn series(nv: usize, constant: i64) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(
        (prop::collection::vec(0u32..=4, nv), -4i64..=4, 1i64..=3),
        0..6,
    )
    .prop_map(move |terms| {
        let mut s = TruncatedSeries::constant(nv, D, Q::from_integer(constant.into()));
        for (m, n, d) in terms {
            if m.iter().sum::<u32>() >= 1 {
                s.add_term(m, Q::new(n.into(), d.into()));
            }
        }
        s
    })
}

fn pair(constant: i64) -> impl Strategy<Value = (TruncatedSeries, TruncatedSeries)> {
    (1usize..=3).prop_flat_map(move |nv| (series(nv, constant), series(nv, constant)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn exp_log_inverse((f, _) in pair(0)) {
        prop_assert_eq!(plethystic_log(&plethystic_exp(&f).unwrap()).unwrap(), f);
    }

    #[test]
    fn log_exp_inverse((u, _) in pair(1)) {
        prop_assert_eq!(plethystic_exp(&plethystic_log(&u).unwrap()).unwrap(), u);
    }

    #[test]
    fn exp_turns_sums_into_products((f, g) in pair(0)) {
        let lhs = plethystic_exp(&f.add(&g).unwrap()).unwrap();
        let rhs = plethystic_exp(&f).unwrap().mul(&plethystic_exp(&g).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn log_turns_products_into_sums((u, v) in pair(1)) {
        let lhs = plethystic_log(&u.mul(&v).unwrap()).unwrap();
        let rhs = plethystic_log(&u).unwrap().add(&plethystic_log(&v).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn adams_composes((f, g) in pair(0), m in 1u32..=4, n in 1u32..=4) {
        prop_assert_eq!(f.adams(n).unwrap().adams(m).unwrap(), f.adams(m * n).unwrap());
        // Ring homomorphism, compared within the truncation.
        let lhs = f.mul(&g).unwrap().adams(n).unwrap();
        let rhs = f.adams(n).unwrap().mul(&g.adams(n).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let lhs = f.add(&g).unwrap().adams(n).unwrap();
        let rhs = f.adams(n).unwrap().add(&g.adams(n).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ordinary_exp_log_inverse((f, _) in pair(0)) {
        prop_assert_eq!(f.exp().unwrap().log().unwrap(), f);
    }

    #[test]
    fn recurrence_reproduces_rational_expansions(
        num in prop::collection::vec(-5i64..=5, 0..4),
        den_tail in prop::collection::vec(-3i64..=3, 1..4),
    ) {
        let num = Polynomial::from_ints(&num);
        let mut den = vec![1];
        den.extend(den_tail);
        let den = Polynomial::from_ints(&den);
        let seq = expand_rational(&num, &den, 19).unwrap().coefficients().unwrap();
        let g = detect_recurrence(&seq).expect("order at most 3 fits in 20 terms");
        let back = expand_rational(&g.numerator, &g.denominator, g.valid_through as u32)
            .unwrap()
            .coefficients()
            .unwrap();
        prop_assert_eq!(&back[..], &seq[..=g.valid_through]);
        prop_assert!(g.denominator.degree().unwrap_or(0) <= 3);
    }
}
