use num_rational::Rational64;
use num_traits::Zero;
use proptest::prelude::*;
use sjacobi::qseries::{golden, heat_on_series, rat, FourierJacobiSeries, QSeries, DQ, DZ};

const PREC: i64 = 8 * DQ;

fn qseries(lead: bool) -> impl Strategy<Value = QSeries> {
    proptest::collection::vec(-5i64..=5, 9).prop_map(move |c| {
        let mut s = QSeries::zero(PREC);
        for (e, v) in c.into_iter().enumerate() {
            let v = if lead && e == 0 && v == 0 { 1 } else { v };
            s.set(e as i64 * DQ, rat(v));
        }
        s
    })
}

fn jacobi() -> impl Strategy<Value = FourierJacobiSeries> {
    proptest::collection::vec((0i64..=6, -4i64..=4, -9i64..=9, 1i64..=7), 0..30).prop_map(|terms| {
        let mut s = FourierJacobiSeries::zero(-4, Rational64::from_integer(1), 6 * DQ);
        for (n, r, a, b) in terms {
            s.set(n * DQ, r * DZ, rat(a) / rat(b));
        }
        s
    })
}

fn same(a: &QSeries, b: &QSeries) -> bool {
    let p = a.prec.min(b.prec);
    a.truncate(p).max_abs_diff(&b.truncate(p)).is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_commutative_and_associative(a in qseries(false), b in qseries(false), c in qseries(false)) {
        prop_assert!(same(&a.mul(&b), &b.mul(&a)));
        prop_assert!(same(&a.mul(&b).mul(&c), &a.mul(&b.mul(&c))));
    }

    #[test]
    fn product_distributes(a in qseries(false), b in qseries(false), c in qseries(false)) {
        prop_assert!(same(&a.mul(&b.add(&c)), &a.mul(&b).add(&a.mul(&c))));
    }

    #[test]
    fn inverse_is_two_sided(a in qseries(true)) {
        let inv = a.inverse().unwrap();
        prop_assert!(same(&a.mul(&inv), &QSeries::one(PREC)));
    }

    #[test]
    fn q_derivative_is_a_derivation(a in qseries(false), b in qseries(false)) {
        let lhs = a.mul(&b).q_derivative();
        let rhs = a.q_derivative().mul(&b).add(&a.mul(&b.q_derivative()));
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn golden_round_trip(s in jacobi()) {
        let text = golden::dump(&s);
        prop_assert!(golden::check(&text, &s));
        prop_assert_eq!(golden::parse(&text).unwrap(), s);
    }

    #[test]
    fn heat_is_linear(a in jacobi(), b in jacobi(), k in -3i64..=3) {
        let lhs = heat_on_series(&a.add(&b.scale(&rat(k)))).unwrap();
        let rhs = heat_on_series(&a).unwrap().add(&heat_on_series(&b).unwrap().scale(&rat(k)));
        prop_assert!(lhs.max_abs_diff(&rhs).is_zero());
    }
}
