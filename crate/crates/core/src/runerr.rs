//! Running error analysis.
//!
//! A value is carried as an [`Approx`]: a high-precision float together with
//! a low-precision, upward-rounded bound on its absolute error. One iteration
//! step propagates the bound through a local Lipschitz constant and adds the
//! fresh rounding error of the correctly rounded map evaluation.

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed};

use crate::dynsys::LogisticSystem;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::mpfloat::{round_nearest, Dyadic, Float, Prec, Rational, Round};

/// Precision of every error bound.
pub const ERR_PREC: Prec = 24;

/// A float with a guaranteed absolute-error bound: the claim is that the
/// true value lies in `[fl - err, fl + err]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approx {
    fl: Float,
    err: Float,
}

impl Approx {
    pub fn new(fl: Float, err: Float) -> Result<Approx> {
        if err.is_negative() {
            return Err(Error::InvalidParameter("negative error bound".into()));
        }
        Ok(Approx { fl, err })
    }

    pub fn exact(fl: Float) -> Approx {
        Approx {
            fl,
            err: Float::zero(ERR_PREC),
        }
    }

    /// Midpoint/half-width view of an interval: the float is the midpoint
    /// rounded to `m` bits and the error covers half the width plus the
    /// midpoint rounding.
    pub fn from_interval(x: &Interval, m: Prec) -> Approx {
        let mid = x.exact_mid();
        let fl = Float::from_dyadic(&mid, m, Round::Nearest);
        let shift = fl.to_dyadic().sub(&mid).abs();
        let radius = x.exact_width().scale(-1).add(&shift);
        Approx {
            fl,
            err: Float::from_dyadic(&radius, ERR_PREC, Round::Up),
        }
    }

    pub fn fl(&self) -> &Float {
        &self.fl
    }

    pub fn err(&self) -> &Float {
        &self.err
    }

    /// Working precision of the value.
    pub fn precision(&self) -> Prec {
        self.fl.prec()
    }

    pub fn lower(&self) -> Dyadic {
        self.fl.to_dyadic().sub(&self.err.to_dyadic())
    }

    pub fn upper(&self) -> Dyadic {
        self.fl.to_dyadic().add(&self.err.to_dyadic())
    }

    /// `[fl - err, fl + err]`, rounded outward to `t` bits.
    pub fn enclosure(&self, t: Prec) -> Interval {
        Interval::from_dyadics(&self.lower(), &self.upper(), t)
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        &self.lower() <= x && x <= &self.upper()
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        self.lower().to_rational() <= *x && *x <= self.upper().to_rational()
    }

    /// True when the two enclosures share a point, a necessary condition for
    /// both to contain the same true value.
    pub fn overlaps(&self, other: &Approx) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }
}

/// A map evaluated through running error analysis: a correctly rounded value
/// map, an enclosing extension of the derivative, and a compact domain.
pub trait ApproxMap {
    /// `f(x)` correctly rounded to nearest at `m` bits.
    fn value(&self, x: &Float, m: Prec) -> Float;

    /// An interval enclosing `f'` over `x`, at `t` bits.
    fn deriv_extension(&self, x: &Interval, t: Prec) -> Interval;

    /// An outward enclosure of the domain at `t` bits.
    fn domain(&self, t: Prec) -> Interval;

    fn contains_exact(&self, x: &Rational) -> bool;

    /// Global bound on `|f'|` over the domain.
    fn lipschitz_max(&self) -> Float;
}

/// Rounds `x` to `m` bits; the error is the exact rounding error, rounded up.
pub fn init_approx<M: ApproxMap + ?Sized>(f: &M, x: &Rational, m: Prec) -> Result<Approx> {
    if m == 0 {
        return Err(Error::InvalidPrecision);
    }
    if !f.contains_exact(x) {
        return Err(Error::OutsideDomain(x.to_string()));
    }
    let fl = round_nearest(x, m);
    let diff = (fl.to_rational() - x).abs();
    let err = Float::from_rational(&diff, ERR_PREC, Round::Up);
    Ok(Approx { fl, err })
}

/// Orbit seed: the rounded initial value with error `2^-m |fl|` (never below
/// the actual rounding error bound).
pub fn seed<M: ApproxMap + ?Sized>(f: &M, x: &Rational, m: Prec) -> Result<Approx> {
    let init = init_approx(f, x, m)?;
    let relative = fresh_rounding_bound(&init.fl, m);
    debug_assert!(init.err <= relative);
    let err = if init.err > relative { init.err } else { relative };
    Ok(Approx { fl: init.fl, err })
}

fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

/// Certifies a relative error of at most `10^-p`:
/// `err <= 10^-p / (1 + 10^-p) * |fl|`, decided exactly.
pub fn prec(x: &Approx, p: i32) -> bool {
    let err = x.err.to_dyadic();
    let fl = x.fl.to_dyadic().abs();
    if p >= 0 {
        // err * (10^p + 1) <= |fl|
        let k = pow10(p as u32) + BigInt::one();
        err.mul_int(&k) <= fl
    } else {
        // err * (1 + 10^k) <= 10^k |fl|
        let t = pow10(p.unsigned_abs());
        err.mul_int(&(&t + BigInt::one())) <= fl.mul_int(&t)
    }
}

/// Certifies an absolute error of at most `10^-p`.
pub fn abs_prec(x: &Approx, p: i32) -> bool {
    let err = x.err.to_dyadic();
    if p >= 0 {
        err.mul_int(&pow10(p as u32)) <= Dyadic::from_int(1)
    } else {
        err <= Dyadic::new(pow10(p.unsigned_abs()), 0)
    }
}

/// Upper bound on `sup |f'|` over `[fl - err, fl + err]` intersected with
/// the domain.
pub fn lipschitz_bound<M: ApproxMap + ?Sized>(f: &M, x: &Approx) -> Result<Float> {
    let enclosure = x.enclosure(ERR_PREC);
    let meet = enclosure.intersect(&f.domain(ERR_PREC))?;
    let slope = f.deriv_extension(&meet, ERR_PREC);
    Ok(slope.mag().round_to(ERR_PREC, Round::Up))
}

fn fresh_rounding_bound(value: &Float, m: Prec) -> Float {
    value.abs().scale_by_pow2(-(m as i64)).round_to(ERR_PREC, Round::Up)
}

/// One running-error step:
/// `fl' = f(fl)` and `err' = L * err + 2^-m |fl'|`, all rounded up.
///
/// A value that drifted off the domain is clamped to the nearest domain
/// endpoint and the clamp distance is added to the error.
pub fn step<M: ApproxMap + ?Sized>(f: &M, x: &Approx) -> Result<Approx> {
    let m = x.precision();
    let domain = f.domain(m);
    let clamped;
    let x = if domain.contains(&x.fl) {
        x
    } else {
        if !x.enclosure(m).meets(&domain) {
            return Err(Error::DomainDeparture);
        }
        let target = if x.fl < *domain.lo() { domain.lo() } else { domain.hi() };
        let dist = x.fl.sub_round(target, ERR_PREC, Round::Up).abs();
        clamped = Approx {
            fl: target.round_to(m, Round::Nearest),
            err: x.err.add_round(&dist, ERR_PREC, Round::Up),
        };
        if clamped.fl != *target {
            return Err(Error::DomainDeparture);
        }
        &clamped
    };
    let lipschitz = lipschitz_bound(f, x)?;
    let fl = f.value(&x.fl, m);
    let propagated = lipschitz.mul_round(&x.err, ERR_PREC, Round::Up);
    let err = propagated.add_round(&fresh_rounding_bound(&fl, m), ERR_PREC, Round::Up);
    Ok(Approx { fl, err })
}

/// Classical a-priori estimate `1.06 K 2^-m |value|` for `K` roundings,
/// valid only when `K <= 0.1 * 2^m`.
pub fn wilkinson_bound(ops: u64, m: Prec, magnitude: &Float) -> Result<Float> {
    let limit_ok = if m >= 64 {
        true
    } else {
        (ops as u128) * 10 <= 1u128 << m
    };
    if !limit_ok {
        return Err(Error::WilkinsonPrecondition { ops, prec: m });
    }
    let factor = Rational::new(BigInt::from(53u64 * ops), BigInt::from(50));
    Ok(magnitude
        .abs()
        .scale_by_pow2(-(m as i64))
        .mul_rational(&factor, ERR_PREC, Round::Up))
}

/// Analysis-mode step for the logistic map using the a-priori estimate
/// instead of the correctly-rounded bound:
/// `err' = L * err + 1.06 K 2^-m E(fl)` with `E(x) = x` for `mu <= 1` and
/// `mu / 4` otherwise.
pub fn wilkinson_step(sys: &LogisticSystem, x: &Approx, ops: u64) -> Result<Approx> {
    let m = x.precision();
    let lipschitz = lipschitz_bound(sys, x)?;
    let bound_arg = if *sys.mu() <= Rational::one() {
        x.fl.abs()
    } else {
        let quarter = sys.mu() / Rational::from_integer(BigInt::from(4));
        Float::from_rational(&quarter, ERR_PREC, Round::Up)
    };
    let fresh = wilkinson_bound(ops, m, &bound_arg)?;
    let fl = sys.apply(&x.fl, m);
    let err = lipschitz
        .mul_round(&x.err, ERR_PREC, Round::Up)
        .add_round(&fresh, ERR_PREC, Round::Up);
    Ok(Approx { fl, err })
}

/// Orbit of the analysis-mode recursion, seeded with `err_0 = 2^-m`.
pub fn wilkinson_orbit(sys: &LogisticSystem, x0: &Rational, steps: usize, m: Prec, ops: u64) -> Result<Vec<Approx>> {
    let init = init_approx(sys, x0, m)?;
    let mut x = Approx {
        fl: init.fl,
        err: Float::pow2(-(m as i64), ERR_PREC),
    };
    let mut out = Vec::with_capacity(steps + 1);
    for _ in 0..steps {
        let next = wilkinson_step(sys, &x, ops)?;
        out.push(x);
        x = next;
    }
    out.push(x);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::MapForm;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn logistic(n: i64, d: i64) -> LogisticSystem {
        LogisticSystem::new(q(n, d), MapForm::RunningError).unwrap()
    }

    fn approx(fl: Rational, m: Prec, err: Rational) -> Approx {
        Approx::new(round_nearest(&fl, m), Float::from_rational(&err, ERR_PREC, Round::Up)).unwrap()
    }

    #[test]
    fn init_examples() {
        let sys = logistic(2, 1);
        let a = init_approx(&sys, &q(1, 2), 8).unwrap();
        assert_eq!(a.fl().to_rational(), q(1, 2));
        assert!(a.err().is_zero());
        let s = seed(&sys, &q(1, 2), 8).unwrap();
        assert_eq!(s.err().to_rational(), q(1, 512));

        let b = init_approx(&sys, &q(22, 100), 5).unwrap();
        assert_eq!(b.fl().to_rational(), q(7, 32));
        assert!(b.err().to_rational() >= q(1, 800));
        assert!(b.contains_rational(&q(22, 100)));
        let sb = seed(&sys, &q(22, 100), 5).unwrap();
        assert!(sb.err().to_rational() >= b.err().to_rational());

        assert!(matches!(init_approx(&sys, &q(3, 2), 8), Err(Error::OutsideDomain(_))));
        assert_eq!(init_approx(&sys, &q(1, 2), 0), Err(Error::InvalidPrecision));
    }

    #[test]
    fn prec_examples() {
        let one = Approx::exact(Float::from_i64(1, 16, Round::Nearest));
        assert!(prec(&one, 6) && prec(&one, 300) && prec(&one, -3));
        let zero = Approx::exact(Float::zero(16));
        assert!(prec(&zero, 6));
        let a = approx(q(1, 1), 64, q(1, 1_000_000));
        // 24-bit upward rounding only makes err larger.
        assert!(!prec(&a, 6));
        let b = Approx::new(Float::from_i64(1, 64, Round::Nearest), Float::pow2(-21, ERR_PREC)).unwrap();
        assert!(prec(&b, 6));
        assert!(!prec(&b, 7));
    }

    #[test]
    fn prec_boundary_is_exact() {
        // err = |fl| / (10^p + 1) exactly representable: |fl| = 1001 * 2^-10, err = 2^-10, p = 3.
        let fl = Float::from_rational(&q(1001, 1024), 16, Round::Nearest);
        let err = Float::pow2(-10, ERR_PREC);
        assert!(prec(&Approx::new(fl.clone(), err.clone()).unwrap(), 3));
        let fl_less = Float::from_rational(&q(1000, 1024), 16, Round::Nearest);
        assert!(!prec(&Approx::new(fl_less, err).unwrap(), 3));
    }

    #[test]
    fn absolute_predicate() {
        let a = Approx::new(Float::zero(16), Float::pow2(-20, ERR_PREC)).unwrap();
        assert!(abs_prec(&a, 6));
        assert!(!abs_prec(&a, 7));
        assert!(abs_prec(&a, -1));
    }

    #[test]
    fn lipschitz_examples() {
        let l = lipschitz_bound(&logistic(4, 1), &Approx::exact(Float::zero(16))).unwrap();
        assert_eq!(l.to_rational(), q(4, 1));
        let l = lipschitz_bound(&logistic(2, 1), &approx(q(1, 2), 16, q(1, 4))).unwrap();
        assert_eq!(l.to_rational(), q(1, 1));
        let l = lipschitz_bound(&logistic(2, 1), &approx(q(1, 2), 16, q(0, 1))).unwrap();
        assert!(l.is_zero());
        let outside = Approx::new(Float::from_i64(3, 16, Round::Nearest), Float::pow2(-2, ERR_PREC)).unwrap();
        assert_eq!(lipschitz_bound(&logistic(2, 1), &outside), Err(Error::DomainDeparture));
    }

    #[test]
    fn step_at_superstable_point() {
        let sys = logistic(2, 1);
        let x = Approx::exact(round_nearest(&q(1, 2), 16));
        let y = step(&sys, &x).unwrap();
        assert_eq!(y.fl().to_rational(), q(1, 2));
        assert_eq!(y.err().to_rational(), q(1, 2) * q(1, 65536));
    }

    #[test]
    fn step_matches_rational_recursion() {
        let sys = logistic(2, 1);
        let e = q(1, 1 << 20);
        let x = approx(q(1, 4), 20, e.clone());
        let y = step(&sys, &x).unwrap();
        assert_eq!(y.fl().to_rational(), q(3, 8));
        // Oracle: L over [1/4 - e, 1/4 + e] is 2(1 - 2(1/4 - e)) = 1 + 4e, exactly
        // representable at 24 bits, so the only rounding is the final sum.
        let lip = q(1, 1) + q(4, 1) * &e;
        let exact = &lip * &e + q(3, 8) * &e;
        assert!(y.err().to_rational() >= exact);
        let slack = &exact * q(1, 1 << 22);
        assert!(y.err().to_rational() <= exact + slack);
    }

    #[test]
    fn step_clamps_value_outside_domain() {
        let sys = logistic(3, 1);
        let fl = Float::from_rational(&q(-1, 1024), 20, Round::Nearest);
        let x = Approx::new(fl, Float::pow2(-8, ERR_PREC)).unwrap();
        let y = step(&sys, &x).unwrap();
        assert!(y.fl().is_zero());
        // err >= L * (err + dist) with L = 3 over [0, 2^-8 + 2^-10]
        assert!(y.err().to_rational() >= q(3, 1) * (q(1, 256) + q(1, 1024)));
        let far = Approx::new(Float::from_i64(-1, 20, Round::Nearest), Float::pow2(-8, ERR_PREC)).unwrap();
        assert_eq!(step(&sys, &far), Err(Error::DomainDeparture));
    }

    #[test]
    fn lower_bound_consistency() {
        let sys = logistic(37, 10);
        let x = approx(q(3, 10), 40, q(1, 1 << 30));
        let y = step(&sys, &x).unwrap();
        let slope = sys.derivative_exact(&x.fl().to_rational()).abs();
        assert!(y.err().to_rational() >= slope * x.err().to_rational());
    }

    #[test]
    fn wilkinson_examples() {
        let one = Float::from_i64(1, 16, Round::Nearest);
        let w = wilkinson_bound(4, 10, &one).unwrap();
        let exact = q(424, 100) * q(1, 1024);
        assert!(w.to_rational() >= exact);
        assert!((w.to_f64() - 0.004140625).abs() < 1e-9);
        assert_eq!(
            wilkinson_bound(4, 5, &one),
            Err(Error::WilkinsonPrecondition { ops: 4, prec: 5 })
        );
        assert!(wilkinson_bound(0, 10, &one).unwrap().is_zero());
    }

    #[test]
    fn wilkinson_orbit_encloses_exact_orbit() {
        let sys = logistic(1, 2);
        let orbit = wilkinson_orbit(&sys, &q(22, 100), 8, 40, 4).unwrap();
        let mut x = q(22, 100);
        for a in &orbit {
            assert!(a.contains_rational(&x));
            x = sys.apply_exact(&x);
        }
    }
}
