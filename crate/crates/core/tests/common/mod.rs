//! Exact-rational reference implementations used as test oracles. None of
//! this goes through the library's rounding code.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use orbitprec::mpfloat::{Rational, Round};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow2(k: i64) -> Rational {
    if k >= 0 {
        Rational::from_integer(BigInt::one() << k as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-k) as usize)
    }
}

/// Exponent `e` with `2^(e-1) <= |x| < 2^e`, by exact comparison.
pub fn binade(x: &Rational) -> i64 {
    let a = x.abs();
    let mut e = a.numer().bits() as i64 - a.denom().bits() as i64;
    while a >= pow2(e) {
        e += 1;
    }
    while a < pow2(e - 1) {
        e -= 1;
    }
    e
}

/// `x` rounded to `t` significant bits.
pub fn round_oracle(x: &Rational, t: u32, mode: Round) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let e = binade(x);
    let scale = pow2(t as i64 - e);
    let scaled = x * &scale;
    let floor = scaled.numer().div_floor(scaled.denom());
    let frac = &scaled - Rational::from_integer(floor.clone());
    let n = match mode {
        Round::Down => floor,
        Round::Up => {
            if frac.is_zero() {
                floor
            } else {
                floor + 1
            }
        }
        Round::Nearest => match frac.cmp(&q(1, 2)) {
            std::cmp::Ordering::Less => floor,
            std::cmp::Ordering::Greater => floor + 1,
            std::cmp::Ordering::Equal => {
                if floor.is_even() {
                    floor
                } else {
                    floor + 1
                }
            }
        },
    };
    Rational::from_integer(n) / scale
}

/// Exact logistic orbit `x_0 .. x_n`.
pub fn exact_orbit(mu: &Rational, x0: &Rational, n: usize) -> Vec<Rational> {
    let mut out = vec![x0.clone()];
    for _ in 0..n {
        let x = out.last().unwrap();
        out.push(mu * x * (Rational::one() - x));
    }
    out
}
