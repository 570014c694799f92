use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

use super::Rational;

/// An exact dyadic rational `man * 2^exp`.
///
/// Used as the intermediate form of every floating-point operation: the
/// exact result is built here and rounded exactly once.
#[derive(Clone, Debug, Default)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        Dyadic { man, exp }
    }

    pub fn zero() -> Self {
        Dyadic::default()
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.man.sign()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    /// Position just above the leading bit: `2^(top-1) <= |x| < 2^top`.
    /// Meaningless for zero.
    pub fn top(&self) -> i64 {
        self.man.bits() as i64 + self.exp
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic::new(-&self.man, self.exp)
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic::new(self.man.abs(), self.exp)
    }

    pub fn scale(&self, k: i64) -> Dyadic {
        Dyadic::new(self.man.clone(), self.exp + k)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(other.exp);
        let a = &self.man << (self.exp - exp) as u64;
        let b = &other.man << (other.exp - exp) as u64;
        Dyadic::new(a + b, exp)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &other.man, self.exp + other.exp)
    }

    pub fn mul_int(&self, k: &BigInt) -> Dyadic {
        Dyadic::new(&self.man * k, self.exp)
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.man << self.exp as u64)
        } else {
            Rational::new(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Exact `num / den` when `den` is a power of two, `None` otherwise.
    pub fn from_rational(q: &Rational) -> Option<Dyadic> {
        let den_u: &BigUint = q.denom().magnitude();
        if den_u.count_ones() != 1 {
            return None;
        }
        let k = den_u.bits() as i64 - 1;
        Some(Dyadic::new(q.numer().clone(), -k))
    }

    /// Approximate `log2 |x|`; `-inf` for zero. Valid far outside the f64 exponent range.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let mag = self.man.magnitude();
        let bits = mag.bits();
        let shift = bits.saturating_sub(60);
        let head = (mag >> shift).iter_u64_digits().next().unwrap_or(0) as f64;
        head.log2() + shift as f64 + self.exp as f64
    }

    pub fn ln_abs(&self) -> f64 {
        self.log2_abs() * std::f64::consts::LN_2
    }

    /// Nearest-ish f64 value (truncated to 60 bits before conversion); saturates to 0 / inf.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mag = self.man.magnitude();
        let bits = mag.bits();
        let shift = bits.saturating_sub(60);
        let head = (mag >> shift).iter_u64_digits().next().unwrap_or(0) as f64;
        let e = shift as i64 + self.exp;
        let v = if e > 1100 {
            f64::INFINITY
        } else if e < -1200 {
            0.0
        } else {
            let e = e as i32;
            head * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
        };
        if self.is_negative() {
            -v
        } else {
            v
        }
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.man.signum(), other.man.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa.is_zero() {
            return Ordering::Equal;
        }
        // Same nonzero sign: compare magnitudes by leading-bit position first.
        let (ta, tb) = (self.top(), other.top());
        let mag = if ta != tb {
            ta.cmp(&tb)
        } else {
            let exp = self.exp.min(other.exp);
            let a = self.man.magnitude() << (self.exp - exp) as u64;
            let b = other.man.magnitude() << (other.exp - exp) as u64;
            a.cmp(&b)
        };
        if sa.is_negative() {
            mag.reverse()
        } else {
            mag
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exact_arithmetic() {
        let a = Dyadic::new(BigInt::from(3), -3); // 0.375
        let b = Dyadic::new(BigInt::from(1), -1); // 0.5
        assert_eq!(a.add(&b).to_rational(), q(7, 8));
        assert_eq!(a.sub(&b).to_rational(), q(-1, 8));
        assert_eq!(a.mul(&b).to_rational(), q(3, 16));
        assert!(a < b);
        assert!(a.neg() < b.neg().neg());
    }

    #[test]
    fn rational_round_trip() {
        assert_eq!(Dyadic::from_rational(&q(5, 16)).unwrap().to_rational(), q(5, 16));
        assert!(Dyadic::from_rational(&q(1, 3)).is_none());
    }

    #[test]
    fn log_of_tiny_values() {
        let tiny = Dyadic::new(BigInt::from(1), -5000);
        assert!((tiny.log2_abs() + 5000.0).abs() < 1e-12);
        assert_eq!(tiny.to_f64(), 0.0);
        assert!((Dyadic::new(BigInt::from(3), -2).to_f64() - 0.75).abs() < 1e-15);
    }
}
