use limitcycle::trigpoly::{Poly2, TrigSeries};
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = Poly2> {
    prop::collection::vec((-6i64..=6, 1i64..=5, 0u32..=2, 0u32..=3), 0..4).prop_map(|terms| {
        terms
            .into_iter()
            .fold(Poly2::zero(), |acc, (n, d, hd, ed)| acc + Poly2::term(n, d, hd, ed))
    })
}

fn series() -> impl Strategy<Value = TrigSeries> {
    prop::collection::vec((0u32..=4, any::<bool>(), poly()), 0..4).prop_map(|parts| {
        parts.into_iter().fold(TrigSeries::zero(), |acc, (k, is_cos, c)| {
            let t = if is_cos || k == 0 {
                TrigSeries::cos(k, c)
            } else {
                TrigSeries::sin(k, c)
            };
            &acc + &t.unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_commutes(a in series(), b in series()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn product_associates(a in series(), b in series(), c in series()) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn product_distributes(a in series(), b in series(), c in series()) {
        let left = a.mul(&(&b + &c)).unwrap();
        let right = &a.mul(&b).unwrap() + &a.mul(&c).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn leibniz_rule(a in series(), b in series()) {
        let lhs = a.mul(&b).unwrap().differentiate();
        let rhs = &a.differentiate().mul(&b).unwrap() + &a.mul(&b.differentiate()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn symbolic_product_matches_numeric(a in series(), b in series(), tau in -3.0f64..3.0) {
        let (h, e) = (0.8, 1.3);
        let p = a.mul(&b).unwrap().eval(tau, h, e);
        let q = a.eval(tau, h, e) * b.eval(tau, h, e);
        prop_assert!((p - q).abs() <= 1e-9 * (1.0 + q.abs()));
    }

    #[test]
    fn deformation_solution_satisfies_equation(r in series()) {
        let sol = r.solve_deformation();
        let u = &sol.solution;
        let resonant = &TrigSeries::cos(1, sol.resonant_cos.clone()).unwrap()
            + &TrigSeries::sin(1, sol.resonant_sin.clone()).unwrap();
        // u'' + u reproduces the non-resonant part of r
        prop_assert_eq!(&u.differentiate().differentiate() + u, &r - &resonant);
        prop_assert!(u.value_at_zero().is_zero());
        prop_assert!(u.differentiate().value_at_zero().is_zero());
    }
}

#[test]
fn cube_of_sine() {
    let s = TrigSeries::sin(1, Poly2::one()).unwrap();
    let cube = s.pow(3).unwrap();
    let expected = &TrigSeries::sin(1, Poly2::term(3, 4, 0, 0)).unwrap()
        + &TrigSeries::sin(3, Poly2::term(-1, 4, 0, 0)).unwrap();
    assert_eq!(cube, expected);
}
