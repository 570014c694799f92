//! Inf-sup interval arithmetic with outward rounding, the natural interval
//! extensions of the three algebraically equal forms of the logistic map, and the mean
//! value form.
//!
//! Each operation builds exact dyadic (or rational) endpoints and then rounds
//! the lower endpoint down and the upper endpoint up at the requested
//! precision, so every result encloses the exact range.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::mpfloat::{Dyadic, Float, Prec, Rational, Round};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

impl Interval {
    pub fn new(lo: Float, hi: Float) -> Result<Interval> {
        if lo > hi {
            return Err(Error::InvalidInterval);
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Float) -> Interval {
        Interval { lo: x.clone(), hi: x }
    }

    /// Tightest enclosure of an exact rational at precision `t`.
    pub fn from_rational(x: &Rational, t: Prec) -> Interval {
        Interval {
            lo: Float::from_rational(x, t, Round::Down),
            hi: Float::from_rational(x, t, Round::Up),
        }
    }

    pub fn from_rationals(lo: &Rational, hi: &Rational, t: Prec) -> Result<Interval> {
        Interval::new(
            Float::from_rational(lo, t, Round::Down),
            Float::from_rational(hi, t, Round::Up),
        )
    }

    /// Outward-rounded enclosure of the exact interval `[lo, hi]`.
    pub fn from_dyadics(lo: &Dyadic, hi: &Dyadic, t: Prec) -> Interval {
        debug_assert!(lo <= hi);
        Interval {
            lo: Float::from_dyadic(lo, t, Round::Down),
            hi: Float::from_dyadic(hi, t, Round::Up),
        }
    }

    /// `[0, 1]` at precision `t`.
    pub fn unit(t: Prec) -> Interval {
        Interval {
            lo: Float::zero(t),
            hi: Float::from_i64(1, t, Round::Nearest),
        }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> Prec {
        self.lo.prec().max(self.hi.prec())
    }

    /// `hi - lo`, rounded up.
    pub fn width(&self) -> Float {
        self.hi.sub_round(&self.lo, self.prec(), Round::Up)
    }

    pub fn exact_width(&self) -> Dyadic {
        self.hi.to_dyadic().sub(&self.lo.to_dyadic())
    }

    /// `(lo + hi) / 2`, rounded to nearest at `t`.
    pub fn midpoint(&self, t: Prec) -> Float {
        Float::from_dyadic(&self.exact_mid(), t, Round::Nearest)
    }

    pub fn exact_mid(&self) -> Dyadic {
        self.lo.to_dyadic().add(&self.hi.to_dyadic()).scale(-1)
    }

    /// `max(|lo|, |hi|)`.
    pub fn mag(&self) -> Float {
        let (a, b) = (self.lo.abs(), self.hi.abs());
        if a >= b {
            a
        } else {
            b
        }
    }

    pub fn contains(&self, x: &Float) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        &self.lo.to_dyadic() <= x && x <= &self.hi.to_dyadic()
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        &self.lo.to_rational() <= x && x <= &self.hi.to_rational()
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn meets(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Exact intersection; an empty result is a domain departure.
    pub fn intersect(&self, other: &Interval) -> Result<Interval> {
        let lo = if self.lo >= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi <= other.hi { &self.hi } else { &other.hi };
        if lo > hi {
            return Err(Error::DomainDeparture);
        }
        Ok(Interval {
            lo: lo.clone(),
            hi: hi.clone(),
        })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: if self.lo <= other.lo {
                self.lo.clone()
            } else {
                other.lo.clone()
            },
            hi: if self.hi >= other.hi {
                self.hi.clone()
            } else {
                other.hi.clone()
            },
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(10);
        write!(f, "[{:.d$}, {:.d$}]", self.lo, self.hi)
    }
}

fn min_max(values: [Dyadic; 4]) -> (Dyadic, Dyadic) {
    let [a, b, c, d] = values;
    let mut lo = a.clone();
    let mut hi = a;
    for v in [b, c, d] {
        if v < lo {
            lo = v.clone();
        }
        if v > hi {
            hi = v;
        }
    }
    (lo, hi)
}

pub fn iv_add(a: &Interval, b: &Interval, t: Prec) -> Interval {
    Interval {
        lo: a.lo.add_round(&b.lo, t, Round::Down),
        hi: a.hi.add_round(&b.hi, t, Round::Up),
    }
}

pub fn iv_sub(a: &Interval, b: &Interval, t: Prec) -> Interval {
    Interval {
        lo: a.lo.sub_round(&b.hi, t, Round::Down),
        hi: a.hi.sub_round(&b.lo, t, Round::Up),
    }
}

pub fn iv_mul(a: &Interval, b: &Interval, t: Prec) -> Interval {
    let (al, ah) = (a.lo.to_dyadic(), a.hi.to_dyadic());
    let (bl, bh) = (b.lo.to_dyadic(), b.hi.to_dyadic());
    let (lo, hi) = min_max([al.mul(&bl), al.mul(&bh), ah.mul(&bl), ah.mul(&bh)]);
    Interval::from_dyadics(&lo, &hi, t)
}

/// Range of `x^2` over `a` (tighter than `iv_mul(a, a)` when `a` straddles 0).
pub fn iv_sqr(a: &Interval, t: Prec) -> Interval {
    let (l, h) = (a.lo.to_dyadic(), a.hi.to_dyadic());
    let (ll, hh) = (l.mul(&l), h.mul(&h));
    if !l.is_negative() {
        Interval::from_dyadics(&ll, &hh, t)
    } else if !h.is_negative() && !h.is_zero() {
        let top = if ll >= hh { ll } else { hh };
        Interval::from_dyadics(&Dyadic::zero(), &top, t)
    } else {
        Interval::from_dyadics(&hh, &ll, t)
    }
}

/// `q * a` for an exact rational constant `q`.
pub fn iv_scale(a: &Interval, q: &Rational, t: Prec) -> Interval {
    let (x, y) = if q.is_negative() {
        (&a.hi, &a.lo)
    } else {
        (&a.lo, &a.hi)
    };
    Interval {
        lo: x.mul_rational(q, t, Round::Down),
        hi: y.mul_rational(q, t, Round::Up),
    }
}

/// `q - a` for an exact rational constant `q`.
pub fn iv_rsub(q: &Rational, a: &Interval, t: Prec) -> Interval {
    // q - x = (num - den * x) / den
    let num = Dyadic::new(q.numer().clone(), 0);
    let den_int = q.denom().clone();
    let den = den_int.magnitude();
    let minus = |x: &Float| num.sub(&x.to_dyadic().mul_int(&den_int));
    Interval {
        lo: Float::from_quotient(&minus(&a.hi), den, t, Round::Down),
        hi: Float::from_quotient(&minus(&a.lo), den, t, Round::Up),
    }
}

/// `a - q` for an exact rational constant `q`.
pub fn iv_sub_const(a: &Interval, q: &Rational, t: Prec) -> Interval {
    let neg = iv_rsub(q, a, t);
    Interval {
        lo: neg.hi.neg(),
        hi: neg.lo.neg(),
    }
}

/// The three algebraically equal forms of the logistic map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LogisticExpr {
    /// `mu * x * (1 - x)`
    Form1,
    /// `mu * (x - x^2)`
    Form2,
    /// `mu/4 - mu * (x - 1/2)^2`
    Form3,
}

impl LogisticExpr {
    pub const ALL: [LogisticExpr; 3] = [LogisticExpr::Form1, LogisticExpr::Form2, LogisticExpr::Form3];

    /// Exact value of the expression at a rational point.
    pub fn eval_exact(&self, mu: &Rational, x: &Rational) -> Rational {
        let one = Rational::one();
        match self {
            LogisticExpr::Form1 => mu * x * (&one - x),
            LogisticExpr::Form2 => mu * (x - x * x),
            LogisticExpr::Form3 => {
                let half = Rational::new(BigInt::from(1), BigInt::from(2));
                let d = x - half;
                mu / Rational::from_integer(BigInt::from(4)) - mu * &d * &d
            }
        }
    }
}

impl FromStr for LogisticExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "form1" => Ok(LogisticExpr::Form1),
            "form2" => Ok(LogisticExpr::Form2),
            "form3" => Ok(LogisticExpr::Form3),
            _ => Err(Error::Parse(format!("unknown expression form {s:?}"))),
        }
    }
}

/// Natural interval extension of `expr`, evaluated operation by operation in
/// the written order with outward rounding at precision `t`.
pub fn natural_extension(expr: LogisticExpr, mu: &Rational, x: &Interval, t: Prec) -> Interval {
    let one = Rational::one();
    match expr {
        LogisticExpr::Form1 => {
            let mx = iv_scale(x, mu, t);
            let rest = iv_rsub(&one, x, t);
            iv_mul(&mx, &rest, t)
        }
        LogisticExpr::Form2 => {
            let sq = iv_sqr(x, t);
            let diff = iv_sub(x, &sq, t);
            iv_scale(&diff, mu, t)
        }
        LogisticExpr::Form3 => {
            let half = Rational::new(BigInt::from(1), BigInt::from(2));
            let shifted = iv_sub_const(x, &half, t);
            let sq = iv_sqr(&shifted, t);
            let scaled = iv_scale(&sq, mu, t);
            let quarter = mu / Rational::from_integer(BigInt::from(4));
            iv_rsub(&quarter, &scaled, t)
        }
    }
}

/// Natural extension of the derivative `mu * (1 - 2x)`.
pub fn logistic_derivative(mu: &Rational, x: &Interval, t: Prec) -> Interval {
    let doubled = Interval {
        lo: x.lo.scale_by_pow2(1),
        hi: x.hi.scale_by_pow2(1),
    };
    let inner = iv_rsub(&Rational::one(), &doubled, t);
    iv_scale(&inner, mu, t)
}

/// Mean value form `f(c) + F'(X) * (X - c)` with `c` the rounded midpoint.
pub fn mean_value_form(mu: &Rational, x: &Interval, t: Prec) -> Interval {
    let c = x.midpoint(t);
    let fc = natural_extension(LogisticExpr::Form1, mu, &Interval::point(c.clone()), t);
    let slope = logistic_derivative(mu, x, t);
    let offset = iv_sub(x, &Interval::point(c), t);
    iv_add(&fc, &iv_mul(&slope, &offset, t), t)
}

pub fn intersect(x: &Interval, d: &Interval) -> Result<Interval> {
    x.intersect(d)
}

pub fn width(x: &Interval) -> Float {
    x.width()
}

pub fn midpoint(x: &Interval, t: Prec) -> Float {
    x.midpoint(t)
}
