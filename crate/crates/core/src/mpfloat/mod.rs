//! Arbitrary-precision binary floating point.
//!
//! A [`Float`] is `s * 2^(e - t)` with precision `t` bits, scale `e` and a
//! normalized significand `2^(t-1) <= |s| < 2^t` (or `s = 0, e = 0`). There is
//! no exponent range limit, no signed zero and no infinities.
//!
//! Every operation forms the exact dyadic (or rational) result first and
//! rounds once, so results are correctly rounded in the requested [`Round`]
//! direction.

mod dyadic;
mod format;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use dyadic::Dyadic;
pub use format::{format_rational_sci, format_significant, parse_rational};

/// Exact rational numbers (always kept in lowest terms).
pub type Rational = num_rational::BigRational;

/// Number of significand bits.
pub type Prec = u32;

/// Rounding direction for a single operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Round {
    /// To nearest, ties to even significand.
    Nearest,
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

#[derive(Clone, Debug)]
pub struct Float {
    sig: BigInt,
    scale: i64,
    prec: Prec,
}

impl Float {
    pub fn zero(prec: Prec) -> Float {
        Float {
            sig: BigInt::zero(),
            scale: 0,
            prec,
        }
    }

    /// Exact power of two `2^k` at precision `prec`.
    pub fn pow2(k: i64, prec: Prec) -> Float {
        Float {
            sig: BigInt::one() << (prec as u64 - 1),
            scale: k + 1,
            prec,
        }
    }

    pub fn from_i64(v: i64, prec: Prec, mode: Round) -> Float {
        Float::from_dyadic(&Dyadic::from_int(v), prec, mode)
    }

    pub fn from_dyadic(d: &Dyadic, prec: Prec, mode: Round) -> Float {
        let neg = d.is_negative();
        round_parts(neg, d.mantissa().magnitude().clone(), d.exponent(), false, prec, mode)
    }

    /// Rounds `num / den` (with `den > 0`) to `prec` bits.
    pub fn from_quotient(num: &Dyadic, den: &BigUint, prec: Prec, mode: Round) -> Float {
        assert!(!den.is_zero(), "quotient with zero denominator");
        if num.is_zero() {
            return Float::zero(prec);
        }
        if den.count_ones() == 1 {
            let k = den.bits() as i64 - 1;
            return Float::from_dyadic(&num.scale(-k), prec, mode);
        }
        let neg = num.is_negative();
        let mag = num.mantissa().magnitude();
        // Shift so the integer quotient carries at least prec + 2 bits.
        let k = prec as i64 + 3 + den.bits() as i64 - mag.bits() as i64;
        let (q, r) = if k >= 0 {
            (mag << k as u64).div_rem(den)
        } else {
            mag.div_rem(&(den << (-k) as u64))
        };
        round_parts(neg, q, num.exponent() - k, !r.is_zero(), prec, mode)
    }

    pub fn from_rational(q: &Rational, prec: Prec, mode: Round) -> Float {
        let num = Dyadic::new(q.numer().clone(), 0);
        Float::from_quotient(&num, q.denom().magnitude(), prec, mode)
    }

    /// Significand `s`.
    pub fn significand(&self) -> &BigInt {
        &self.sig
    }

    /// Scale `e`.
    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Precision `t` in bits.
    pub fn prec(&self) -> Prec {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.sig.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.sig.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.sig.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn to_dyadic(&self) -> Dyadic {
        Dyadic::new(self.sig.clone(), self.scale - self.prec as i64)
    }

    pub fn to_rational(&self) -> Rational {
        self.to_dyadic().to_rational()
    }

    pub fn to_f64(&self) -> f64 {
        self.to_dyadic().to_f64()
    }

    pub fn log2_abs(&self) -> f64 {
        self.to_dyadic().log2_abs()
    }

    pub fn neg(&self) -> Float {
        Float {
            sig: -&self.sig,
            scale: self.scale,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Float {
        Float {
            sig: self.sig.abs(),
            scale: self.scale,
            prec: self.prec,
        }
    }

    /// Exact multiplication by `2^k`.
    pub fn scale_by_pow2(&self, k: i64) -> Float {
        if self.is_zero() {
            return self.clone();
        }
        Float {
            sig: self.sig.clone(),
            scale: self.scale + k,
            prec: self.prec,
        }
    }

    /// Unit in the last place, `2^(e - t)`.
    pub fn ulp(&self) -> Result<Float> {
        if self.is_zero() {
            return Err(Error::UndefinedUlp);
        }
        Ok(Float::pow2(self.scale - self.prec as i64, self.prec))
    }

    /// Re-rounds to another precision.
    pub fn round_to(&self, prec: Prec, mode: Round) -> Float {
        Float::from_dyadic(&self.to_dyadic(), prec, mode)
    }

    pub fn compare_abs(&self, other: &Float) -> Ordering {
        self.to_dyadic().abs().cmp(&other.to_dyadic().abs())
    }

    pub fn add_round(&self, other: &Float, prec: Prec, mode: Round) -> Float {
        let (a, b) = (self.to_dyadic(), other.to_dyadic());
        Float::from_dyadic(&sum_for_rounding(&a, &b, prec), prec, mode)
    }

    pub fn sub_round(&self, other: &Float, prec: Prec, mode: Round) -> Float {
        let (a, b) = (self.to_dyadic(), other.to_dyadic().neg());
        Float::from_dyadic(&sum_for_rounding(&a, &b, prec), prec, mode)
    }

    pub fn mul_round(&self, other: &Float, prec: Prec, mode: Round) -> Float {
        Float::from_dyadic(&self.to_dyadic().mul(&other.to_dyadic()), prec, mode)
    }

    pub fn div_round(&self, other: &Float, prec: Prec, mode: Round) -> Result<Float> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // a/b = (sa * sign(sb)) / |sb| * 2^(ea - eb)
        let mut num = self.to_dyadic();
        if other.is_negative() {
            num = num.neg();
        }
        let num = num.scale(-(other.scale - other.prec as i64));
        Ok(Float::from_quotient(&num, other.sig.magnitude(), prec, mode))
    }

    /// `self * q` for an exact rational `q`, rounded once.
    pub fn mul_rational(&self, q: &Rational, prec: Prec, mode: Round) -> Float {
        let num = self.to_dyadic().mul_int(q.numer());
        Float::from_quotient(&num, q.denom().magnitude(), prec, mode)
    }

    pub fn add(&self, other: &Float, prec: Prec) -> Float {
        self.add_round(other, prec, Round::Nearest)
    }

    pub fn sub(&self, other: &Float, prec: Prec) -> Float {
        self.sub_round(other, prec, Round::Nearest)
    }

    pub fn mul(&self, other: &Float, prec: Prec) -> Float {
        self.mul_round(other, prec, Round::Nearest)
    }

    pub fn div(&self, other: &Float, prec: Prec) -> Result<Float> {
        self.div_round(other, prec, Round::Nearest)
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        format_rational_sci(&self.to_rational(), digits)
    }
}

/// Correctly rounded nearest-even conversion of a rational.
pub fn round_nearest(x: &Rational, prec: Prec) -> Float {
    Float::from_rational(x, prec, Round::Nearest)
}

pub fn ulp(x: &Float) -> Result<Float> {
    x.ulp()
}

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Float {}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Float {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_dyadic().cmp(&other.to_dyadic())
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(17);
        f.write_str(&self.to_sci_string(digits))
    }
}

/// Exact sum, except that an operand lying entirely below the rounding
/// position of the other is replaced by a tiny sticky stand-in of the same
/// sign. Rounding the stand-in sum to `prec` bits gives the same result in
/// every direction, without materializing huge shifts.
fn sum_for_rounding(a: &Dyadic, b: &Dyadic, prec: Prec) -> Dyadic {
    if a.is_zero() || b.is_zero() {
        return a.add(b);
    }
    let (big, small) = if a.top() >= b.top() { (a, b) } else { (b, a) };
    let grid = big.exponent().min(big.top() - prec as i64 - 3);
    if small.top() < grid - 1 {
        let sign = if small.is_negative() { -1 } else { 1 };
        let stand_in = Dyadic::new(BigInt::from(sign), grid - 2);
        return big.add(&stand_in);
    }
    a.add(b)
}

/// Rounds `(-1)^neg * (mag + sticky*eps) * 2^exp` to `prec` bits, where the
/// sticky flag marks a nonzero remainder below the last bit of `mag`.
fn round_parts(neg: bool, mut mag: BigUint, mut exp: i64, sticky: bool, prec: Prec, mode: Round) -> Float {
    assert!(prec >= 1, "precision must be at least one bit");
    if mag.is_zero() {
        debug_assert!(!sticky);
        return Float::zero(prec);
    }
    let t = prec as u64;
    let mut len = mag.bits();
    if sticky && len < t + 2 {
        let sh = t + 2 - len;
        mag <<= sh;
        exp -= sh as i64;
        len += sh;
    }
    let signed = |m: BigUint| {
        if neg {
            -BigInt::from(m)
        } else {
            BigInt::from(m)
        }
    };
    if len <= t && !sticky {
        let sh = t - len;
        mag <<= sh;
        exp -= sh as i64;
        return Float {
            sig: signed(mag),
            scale: exp + prec as i64,
            prec,
        };
    }
    let shift = len - t;
    let mut q = &mag >> shift;
    let half = mag.bit(shift - 1);
    let rest = sticky || mag.trailing_zeros().is_some_and(|tz| tz < shift - 1);
    let inexact = half || rest;
    let bump = match mode {
        Round::Nearest => half && (rest || q.bit(0)),
        Round::Up => inexact && !neg,
        Round::Down => inexact && neg,
    };
    let mut e = exp + shift as i64;
    if bump {
        q += 1u32;
        if q.bits() > t {
            q >>= 1;
            e += 1;
        }
    }
    Float {
        sig: signed(q),
        scale: e + prec as i64,
        prec,
    }
}
