//! The logistic family `f(x) = mu x (1 - x)` on `D = [0, 1]` and its
//! analytic companions.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::{iv_sub_const, logistic_derivative, Interval, LogisticExpr};
use crate::mpfloat::{Dyadic, Float, Prec, Rational, Round};
use crate::runerr::{prec, seed, step, Approx, ApproxMap, ERR_PREC};

/// How an orbit is computed: one of the three interval expressions, the
/// mean value form, or the running-error engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapForm {
    Form1,
    Form2,
    Form3,
    MeanValue,
    RunningError,
}

impl MapForm {
    pub const ALL: [MapForm; 5] = [
        MapForm::Form1,
        MapForm::Form2,
        MapForm::Form3,
        MapForm::MeanValue,
        MapForm::RunningError,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MapForm::Form1 => "form1",
            MapForm::Form2 => "form2",
            MapForm::Form3 => "form3",
            MapForm::MeanValue => "mean-value",
            MapForm::RunningError => "running-error",
        }
    }

    /// The interval expression behind a natural-extension form.
    pub fn expression(&self) -> Option<LogisticExpr> {
        match self {
            MapForm::Form1 => Some(LogisticExpr::Form1),
            MapForm::Form2 => Some(LogisticExpr::Form2),
            MapForm::Form3 => Some(LogisticExpr::Form3),
            _ => None,
        }
    }
}

impl fmt::Display for MapForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MapForm::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            Error::Parse(format!(
                "unknown form {s:?} (expected form1|form2|form3|mean-value|running-error)"
            ))
        })
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogisticSystem {
    mu: Rational,
    form: MapForm,
}

impl LogisticSystem {
    pub fn new(mu: Rational, form: MapForm) -> Result<LogisticSystem> {
        if !mu.is_positive() || mu > q(4, 1) {
            return Err(Error::InvalidParameter(format!("mu = {mu} is outside (0, 4]")));
        }
        Ok(LogisticSystem { mu, form })
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    pub fn form(&self) -> MapForm {
        self.form
    }

    pub fn with_form(&self, form: MapForm) -> LogisticSystem {
        LogisticSystem {
            mu: self.mu.clone(),
            form,
        }
    }

    /// `f(x)` correctly rounded to nearest at `m` bits.
    pub fn apply(&self, x: &Float, m: Prec) -> Float {
        let x = x.to_dyadic();
        let core = x.sub(&x.mul(&x)).mul_int(self.mu.numer());
        Float::from_quotient(&core, self.mu.denom().magnitude(), m, Round::Nearest)
    }

    pub fn apply_exact(&self, x: &Rational) -> Rational {
        &self.mu * x * (Rational::one() - x)
    }

    pub fn derivative_exact(&self, x: &Rational) -> Rational {
        &self.mu * (Rational::one() - x * q(2, 1))
    }

    /// Outward enclosure of `mu (1 - 2x)` over `x`.
    pub fn derivative_extension(&self, x: &Interval, t: Prec) -> Interval {
        logistic_derivative(&self.mu, x, t)
    }

    /// `f'(x)` times the denominator of `mu`, exactly.
    fn derivative_parts(&self, x: &Float) -> Dyadic {
        Dyadic::from_int(1)
            .sub(&x.to_dyadic().scale(1))
            .mul_int(self.mu.numer())
    }
}

impl ApproxMap for LogisticSystem {
    fn value(&self, x: &Float, m: Prec) -> Float {
        self.apply(x, m)
    }

    fn deriv_extension(&self, x: &Interval, t: Prec) -> Interval {
        self.derivative_extension(x, t)
    }

    fn domain(&self, t: Prec) -> Interval {
        Interval::unit(t)
    }

    fn contains_exact(&self, x: &Rational) -> bool {
        !x.is_negative() && *x <= Rational::one()
    }

    fn lipschitz_max(&self) -> Float {
        Float::from_rational(&self.mu, ERR_PREC, Round::Up)
    }
}

/// `f~(x) = f(x - M) + M` on `[M, 1 + M]`, which keeps orbits away from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedSystem {
    base: LogisticSystem,
    shift: Rational,
}

pub fn shift_system(sys: &LogisticSystem, shift: Rational) -> Result<ShiftedSystem> {
    if !shift.is_positive() {
        return Err(Error::InvalidParameter(format!("shift {shift} must exceed 0")));
    }
    Ok(ShiftedSystem {
        base: sys.clone(),
        shift,
    })
}

impl ShiftedSystem {
    pub fn base(&self) -> &LogisticSystem {
        &self.base
    }

    pub fn shift(&self) -> &Rational {
        &self.shift
    }

    pub fn apply_exact(&self, x: &Rational) -> Rational {
        self.base.apply_exact(&(x - &self.shift)) + &self.shift
    }

    pub fn derivative_exact(&self, x: &Rational) -> Rational {
        self.base.derivative_exact(&(x - &self.shift))
    }

    /// Exact domain `[M, 1 + M]`.
    pub fn domain_exact(&self) -> (Rational, Rational) {
        (self.shift.clone(), &self.shift + Rational::one())
    }
}

impl ApproxMap for ShiftedSystem {
    fn value(&self, x: &Float, m: Prec) -> Float {
        // With M = a/b and u = x b - a:
        // f~(x) = (mu_n u (b - u) + mu_d a b) / (mu_d b^2).
        let a = self.shift.numer();
        let b = self.shift.denom();
        let mu = self.base.mu();
        let u = x.to_dyadic().mul_int(b).sub(&Dyadic::new(a.clone(), 0));
        let rest = Dyadic::new(b.clone(), 0).sub(&u);
        let num = u
            .mul(&rest)
            .mul_int(mu.numer())
            .add(&Dyadic::new(mu.denom() * a * b, 0));
        let den: BigUint = (mu.denom() * b * b).magnitude().clone();
        Float::from_quotient(&num, &den, m, Round::Nearest)
    }

    fn deriv_extension(&self, x: &Interval, t: Prec) -> Interval {
        let inner = iv_sub_const(x, &self.shift, t);
        self.base.derivative_extension(&inner, t)
    }

    fn domain(&self, t: Prec) -> Interval {
        let (lo, hi) = self.domain_exact();
        Interval::from_rationals(&lo, &hi, t).expect("ordered domain")
    }

    fn contains_exact(&self, x: &Rational) -> bool {
        let (lo, hi) = self.domain_exact();
        lo <= *x && *x <= hi
    }

    fn lipschitz_max(&self) -> Float {
        self.base.lipschitz_max()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    /// `|f'| < 1`
    Stable,
    /// `|f'| = 1`
    Hyperbolic,
    /// `|f'| > 1`
    Unstable,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Hyperbolic => "hyperbolic",
            Stability::Unstable => "unstable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPoint {
    pub point: Rational,
    pub derivative: Rational,
    pub stability: Stability,
}

fn classify(d: &Rational) -> Stability {
    match d.abs().cmp(&Rational::one()) {
        std::cmp::Ordering::Less => Stability::Stable,
        std::cmp::Ordering::Equal => Stability::Hyperbolic,
        std::cmp::Ordering::Greater => Stability::Unstable,
    }
}

/// `0` always, and `1 - 1/mu` when `mu > 1`.
pub fn fixed_points(mu: &Rational) -> Result<Vec<FixedPoint>> {
    if !mu.is_positive() || *mu > q(4, 1) {
        return Err(Error::InvalidParameter(format!("mu = {mu} is outside (0, 4]")));
    }
    let mut out = vec![FixedPoint {
        point: Rational::zero(),
        derivative: mu.clone(),
        stability: classify(mu),
    }];
    if *mu > Rational::one() {
        let derivative = q(2, 1) - mu;
        out.push(FixedPoint {
            point: Rational::one() - mu.recip(),
            stability: classify(&derivative),
            derivative,
        });
    }
    Ok(out)
}

/// `ln x` for `x >= alpha`, `ln alpha` below.
pub fn eta_alpha(x: f64, alpha: f64) -> Result<f64> {
    if x.is_nan() || alpha.is_nan() || x <= 0.0 || alpha <= 0.0 {
        return Err(Error::NonPositive);
    }
    Ok(if x >= alpha { x.ln() } else { alpha.ln() })
}

/// Per-step data of a validated orbit: `ln |f'(x_k)|` at the computed
/// points plus a bound on how far that may be from the true value.
#[derive(Clone, Debug)]
pub struct DerivativeSamples {
    pub log_derivs: Vec<f64>,
    pub log_bounds: Vec<f64>,
    /// Number of samples with `|f'| < 2^(-2m)`.
    pub flagged: usize,
    /// Whether every point kept a relative error below `10^-3`.
    pub reliable: bool,
    /// First step where the relative error check failed.
    pub failed_at: Option<usize>,
    pub precision: Prec,
}

/// Collects `ln |f'|` along the running-error orbit of `x0` at `m` bits,
/// discarding `transient` leading steps.
pub fn derivative_samples(
    sys: &LogisticSystem,
    x0: &Rational,
    n: usize,
    transient: usize,
    m: Prec,
    stop_early: bool,
) -> Result<DerivativeSamples> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut out = DerivativeSamples {
        log_derivs: Vec::with_capacity(n),
        log_bounds: Vec::with_capacity(n),
        flagged: 0,
        reliable: true,
        failed_at: None,
        precision: m,
    };
    let log2_slope = 1.0 + ld(sys.mu());
    let ln_den = Dyadic::new(sys.mu().denom().clone(), 0).ln_abs();
    let guard = -2.0 * m as f64;
    let mut x: Approx = seed(sys, x0, m)?;
    for k in 0..transient + n {
        if out.reliable && !prec(&x, 3) {
            out.reliable = false;
            out.failed_at = Some(k);
            if stop_early {
                return Ok(out);
            }
        }
        if k >= transient {
            let num = sys.derivative_parts(x.fl());
            let log2_d = num.log2_abs() - ln_den / std::f64::consts::LN_2;
            if log2_d < guard {
                out.flagged += 1;
            }
            out.log_derivs.push(log2_d * std::f64::consts::LN_2);
            // |f'(x) - f'(fl)| <= 2 mu err, so ln|f'(x)| >= ln|f'(fl)| + ln(1 - r).
            let r = if x.err().is_zero() {
                0.0
            } else {
                (log2_slope + x.err().log2_abs() - log2_d).exp2()
            };
            out.log_bounds.push(if r < 0.5 { -(-r).ln_1p() } else { f64::INFINITY });
        }
        x = step(sys, &x)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovEstimate {
    pub value: f64,
    /// Bound on the distance between `value` and the same average along
    /// the true orbit.
    pub half_width: f64,
    pub samples: usize,
    pub flagged: usize,
    pub reliable: bool,
    pub precision: Prec,
}

impl LyapunovEstimate {
    pub fn singular(&self) -> bool {
        self.flagged > 0
    }
}

impl DerivativeSamples {
    /// Birkhoff average of `ln |f'|` over unflagged samples.
    pub fn lyapunov(&self) -> LyapunovEstimate {
        let mut sum = 0.0;
        let mut width = 0.0;
        let mut used = 0usize;
        let guard = -2.0 * self.precision as f64 * std::f64::consts::LN_2;
        for (v, b) in self.log_derivs.iter().zip(&self.log_bounds) {
            if *v < guard {
                continue;
            }
            sum += v;
            width += b;
            used += 1;
        }
        let (value, half_width) = if used == 0 {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            let value = sum / used as f64;
            // Slack for the floating-point summation itself.
            let slack = 1e-12 * (1.0 + value.abs());
            (value, width / used as f64 + slack)
        };
        LyapunovEstimate {
            value,
            half_width,
            samples: self.log_derivs.len(),
            flagged: self.flagged,
            reliable: self.reliable,
            precision: self.precision,
        }
    }

    /// Birkhoff average of `eta_alpha(|f'|)`.
    pub fn lambda_bar_alpha(&self, alpha: f64) -> Result<f64> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::NonPositive);
        }
        let floor = alpha.ln();
        let sum: f64 = self.log_derivs.iter().map(|v| v.max(floor)).sum();
        Ok(sum / self.log_derivs.len() as f64)
    }
}

/// `(1/n) sum_{k<n} ln |f'(x_k)|` on the validated orbit at `m` bits.
pub fn lyapunov_estimate(sys: &LogisticSystem, x0: &Rational, n: usize, m: Prec) -> Result<LyapunovEstimate> {
    Ok(derivative_samples(sys, x0, n, 0, m, false)?.lyapunov())
}

pub fn lambda_bar_alpha_estimate(sys: &LogisticSystem, x0: &Rational, n: usize, alpha: f64, m: Prec) -> Result<f64> {
    derivative_samples(sys, x0, n, 0, m, false)?.lambda_bar_alpha(alpha)
}

/// Lyapunov estimate with the working precision raised until the whole orbit
/// keeps a relative error below `10^-3`.
pub fn validated_lyapunov(
    sys: &LogisticSystem,
    x0: &Rational,
    n: usize,
    transient: usize,
    m_cap: Prec,
) -> Result<LyapunovEstimate> {
    let total = (n + transient) as u64;
    let mut m: Prec = 64.min(m_cap.max(1));
    loop {
        let samples = derivative_samples(sys, x0, n, transient, m, true)?;
        if samples.reliable {
            return Ok(samples.lyapunov());
        }
        if m >= m_cap {
            return Err(Error::NoHaltWithinCap {
                cap: m_cap,
                detail: format!("orbit lost relative accuracy at step {:?}", samples.failed_at),
            });
        }
        // Bits are consumed roughly linearly in the step count.
        let reached = samples.failed_at.unwrap_or(0).max(1) as u64;
        let projected = (m as u64 * total / reached) * 5 / 4 + 32;
        m = projected.max(2 * m as u64).min(m_cap as u64) as Prec;
    }
}

fn ld(x: &Rational) -> f64 {
    Dyadic::new(x.numer().clone(), 0).log2_abs() - Dyadic::new(x.denom().clone(), 0).log2_abs()
}

/// Analytic band `(lower, upper)` for the loss of significance rate of a
/// form. The mean value and running-error forms need a Lyapunov estimate.
pub fn analytic_sigma_bound(form: MapForm, mu: &Rational, lambda_hat: Option<f64>) -> Result<(f64, f64)> {
    if !mu.is_positive() {
        return Err(Error::NonPositive);
    }
    let form1 = (0.0, ld(mu).max(0.0));
    match form {
        MapForm::Form1 => Ok(form1),
        MapForm::Form2 => Ok((ld(mu).max(0.0), ld(&(mu * q(3, 1))).max(0.0))),
        MapForm::Form3 => {
            if *mu < Rational::one() {
                Ok((0.0, -ld(mu)))
            } else {
                Ok(form1)
            }
        }
        MapForm::MeanValue | MapForm::RunningError => {
            let lambda = lambda_hat.ok_or(Error::MissingLyapunov)?;
            let v = lambda.max(0.0) / std::f64::consts::LN_2;
            Ok((v, v))
        }
    }
}
