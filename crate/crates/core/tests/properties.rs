//! Property tests for the exact layer: algebraic laws of the value field
//! and the square-class invariance of the modified norm.

use gl2trace::exact::{rat, HalfPowRational, LogNumber};
use gl2trace::padic::{modified_norm_exp, omega, vp};
use proptest::prelude::*;

fn lognum_strategy() -> impl Strategy<Value = LogNumber> {
    let term = (prop_oneof![Just(2u64), Just(3u64), Just(5u64), Just(7u64)], -50i64..50, 1i64..20)
        .prop_map(|(p, n, d)| LogNumber::log_term(p, rat(n, d)));
    ((-100i64..100, 1i64..30), proptest::collection::vec(term, 0..4)).prop_map(
        |((cn, cd), terms)| {
            let mut v = LogNumber::from_rational(rat(cn, cd));
            for t in terms {
                v += &t;
            }
            v
        },
    )
}

fn nonzero_rational() -> impl Strategy<Value = gl2trace::Rational> {
    (-300i64..300, 1i64..120)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #[test]
    fn lognum_addition_laws(a in lognum_strategy(), b in lognum_strategy(), c in lognum_strategy()) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b + c));
        prop_assert!((a.clone() - a).is_zero());
    }

    #[test]
    fn lognum_eval_is_additive(a in lognum_strategy(), b in lognum_strategy()) {
        // evaluation respects addition up to the interval widths
        let ia = a.eval(12);
        let ib = b.eval(12);
        let isum = (a + b).eval(12);
        let lo = &ia.lo + &ib.lo;
        let hi = &ia.hi + &ib.hi;
        prop_assert!(isum.hi >= lo && isum.lo <= hi);
    }

    #[test]
    fn lognum_scaling_distributes(a in lognum_strategy(), n in -40i64..40, d in 1i64..20) {
        let c = rat(n, d);
        let left = a.scale(&c).eval_f64();
        let right = {
            use num_traits::ToPrimitive;
            a.eval_f64() * c.to_f64().unwrap()
        };
        prop_assert!((left - right).abs() <= 1e-9 * (1.0 + right.abs()));
    }

    #[test]
    fn halfpow_products_are_values(
        c1 in nonzero_rational(), c2 in nonzero_rational(),
        h1 in -5i64..5, h2 in -5i64..5, p in prop_oneof![Just(2u64), Just(3u64), Just(5u64)]
    ) {
        let a = HalfPowRational::new(c1, &[(p, h1)]);
        let b = HalfPowRational::new(c2, &[(p, h2)]);
        let prod = &a * &b;
        prop_assert!((prod.eval() - a.eval() * b.eval()).abs() <= 1e-9 * (1.0 + (a.eval() * b.eval()).abs()));
        // exponents add
        prop_assert_eq!(prod.half_exp(p), a.half_exp(p) + b.half_exp(p));
    }

    #[test]
    fn modified_norm_square_class(
        y in nonzero_rational(), a in nonzero_rational(),
        p in prop_oneof![Just(2u64), Just(3u64), Just(5u64), Just(7u64)]
    ) {
        let scaled = &a * &a * &y;
        let va = vp(&a, p).unwrap();
        prop_assert_eq!(
            modified_norm_exp(p, &scaled).unwrap(),
            modified_norm_exp(p, &y).unwrap() - 2 * va
        );
        prop_assert_eq!(omega(p, &scaled).unwrap(), omega(p, &y).unwrap());
    }
}
