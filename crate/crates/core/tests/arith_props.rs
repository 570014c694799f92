mod common;

use common::{pow2, q, round_oracle};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use orbitprec::interval::{
    iv_add, iv_mul, iv_sqr, iv_sub, logistic_derivative, mean_value_form, natural_extension, Interval, LogisticExpr,
};
use orbitprec::mpfloat::{round_nearest, Float, Rational, Round};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (any::<i64>(), 1i64..1_000_000_000, -80i64..80)
        .prop_map(|(n, d, k)| Rational::new(BigInt::from(n), BigInt::from(d)) * pow2(k))
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (0i64..=1_000_000, 1i64..=1_000_000).prop_map(|(a, b)| if a <= b { q(a, b) } else { q(b, a) })
}

fn mode() -> impl Strategy<Value = Round> {
    prop_oneof![Just(Round::Nearest), Just(Round::Down), Just(Round::Up)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn conversion_is_correctly_rounded(x in rational(), t in 1u32..120, m in mode()) {
        let f = Float::from_rational(&x, t, m);
        prop_assert_eq!(f.to_rational(), round_oracle(&x, t, m));
        prop_assert!(f.is_zero() || f.significand().magnitude().bits() == t as u64);
    }

    #[test]
    fn arithmetic_is_correctly_rounded(
        a in rational(), b in rational(), ta in 1u32..100, tb in 1u32..100, t in 1u32..100, m in mode()
    ) {
        let fa = round_nearest(&a, ta);
        let fb = round_nearest(&b, tb);
        let (ea, eb) = (fa.to_rational(), fb.to_rational());
        prop_assert_eq!(fa.add_round(&fb, t, m).to_rational(), round_oracle(&(&ea + &eb), t, m));
        prop_assert_eq!(fa.sub_round(&fb, t, m).to_rational(), round_oracle(&(&ea - &eb), t, m));
        prop_assert_eq!(fa.mul_round(&fb, t, m).to_rational(), round_oracle(&(&ea * &eb), t, m));
        if !eb.is_zero() {
            prop_assert_eq!(fa.div_round(&fb, t, m).unwrap().to_rational(), round_oracle(&(&ea / &eb), t, m));
        }
    }

    #[test]
    fn sticky_path_far_apart(a in rational(), shift in 100i64..3000, t in 1u32..64, m in mode()) {
        let fa = round_nearest(&a, 53);
        let fb = round_nearest(&(&a * pow2(-shift) + q(1, 3) * pow2(-shift)), 53);
        let exact = fa.to_rational() + fb.to_rational();
        prop_assert_eq!(fa.add_round(&fb, t, m).to_rational(), round_oracle(&exact, t, m));
    }

    #[test]
    fn directed_rounding_brackets(x in rational(), t in 1u32..80) {
        let lo = Float::from_rational(&x, t, Round::Down).to_rational();
        let hi = Float::from_rational(&x, t, Round::Up).to_rational();
        let near = Float::from_rational(&x, t, Round::Nearest).to_rational();
        prop_assert!(lo <= x && x <= hi);
        prop_assert!(near == lo || near == hi);
    }

    #[test]
    fn rounding_is_monotone(x in rational(), y in rational(), t in 1u32..80, m in mode()) {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(Float::from_rational(&a, t, m) <= Float::from_rational(&b, t, m));
    }

    #[test]
    fn nearest_error_is_half_ulp(x in rational(), t in 1u32..80) {
        let f = round_nearest(&x, t);
        if !f.is_zero() {
            let err = (f.to_rational() - &x).abs();
            prop_assert!(err <= f.ulp().unwrap().to_rational() / q(2, 1));
            // |x - fl| <= 2^-t |x| (relative bound with unit roundoff 2^-t).
            prop_assert!(err <= x.abs() * pow2(-(t as i64)));
        }
    }

    #[test]
    fn interval_ops_enclose(
        a in unit_rational(), b in unit_rational(), c in unit_rational(), d in unit_rational(),
        s in 0i64..=1000, u in 0i64..=1000, t in 2u32..60
    ) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let (c, d) = if c <= d { (c, d) } else { (d, c) };
        let x = Interval::from_rationals(&(&a - q(1, 3)), &b, t).unwrap();
        let y = Interval::from_rationals(&c, &d, t).unwrap();
        let px = &a - q(1, 3) + (&b - &a + q(1, 3)) * q(s, 1000);
        let py = &c + (&d - &c) * q(u, 1000);
        prop_assert!(x.contains_rational(&px) && y.contains_rational(&py));
        prop_assert!(iv_add(&x, &y, t).contains_rational(&(&px + &py)));
        prop_assert!(iv_sub(&x, &y, t).contains_rational(&(&px - &py)));
        prop_assert!(iv_mul(&x, &y, t).contains_rational(&(&px * &py)));
        let sq = iv_sqr(&x, t);
        prop_assert!(sq.contains_rational(&(&px * &px)));
        prop_assert!(!sq.lo().is_negative());
    }

    #[test]
    fn extensions_enclose_the_map(
        a in unit_rational(), b in unit_rational(), s in 0i64..=1000, mu_k in 1i64..=400, t in 2u32..80
    ) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let mu = q(mu_k, 100);
        let x = Interval::from_rationals(&a, &b, t).unwrap();
        let p = &a + (&b - &a) * q(s, 1000);
        for expr in LogisticExpr::ALL {
            let img = natural_extension(expr, &mu, &x, t);
            prop_assert!(img.contains_rational(&expr.eval_exact(&mu, &p)), "{expr:?}");
        }
        let mvf = mean_value_form(&mu, &x, t);
        prop_assert!(mvf.contains_rational(&LogisticExpr::Form1.eval_exact(&mu, &p)));
        let slope = logistic_derivative(&mu, &x, t);
        prop_assert!(slope.contains_rational(&(&mu * (q(1, 1) - &p * q(2, 1)))));
    }

    #[test]
    fn extensions_are_inclusion_monotone(
        a in unit_rational(), b in unit_rational(), s in 0i64..=1000, u in 0i64..=1000, mu_k in 1i64..=400
    ) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let mu = q(mu_k, 100);
        let t = 40;
        let outer = Interval::from_rationals(&a, &b, t).unwrap();
        let lo = &a + (&b - &a) * q(s.min(u), 1000);
        let hi = &a + (&b - &a) * q(s.max(u), 1000);
        let inner = Interval::from_rationals(&lo, &hi, t).unwrap();
        prop_assert!(inner.is_subset_of(&outer));
        for expr in LogisticExpr::ALL {
            prop_assert!(natural_extension(expr, &mu, &inner, t).is_subset_of(&natural_extension(expr, &mu, &outer, t)));
        }
    }
}
