//! Validated orbit runs at a fixed precision and the search for the minimal
//! precision that certifies a whole orbit.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::dynsys::{analytic_sigma_bound, LogisticSystem, MapForm};
use crate::error::{Error, Result};
use crate::interval::{mean_value_form, natural_extension, Interval};
use crate::mpfloat::{Prec, Rational};
use crate::runerr::{abs_prec, init_approx, prec, seed, step, Approx, ApproxMap};

pub const DEFAULT_M_CAP: Prec = 1 << 20;

/// Bits below a bisection result that are re-run to catch a non-monotone
/// success pattern.
const BRACKET_BACKTRACK: Prec = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ErrorMode {
    /// `err <= 10^-p |x|`
    #[default]
    Relative,
    /// `err <= 10^-p`
    Absolute,
}

impl FromStr for ErrorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relative" => Ok(ErrorMode::Relative),
            "absolute" => Ok(ErrorMode::Absolute),
            _ => Err(Error::Parse(format!("unknown mode {s:?} (expected relative|absolute)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// `m = 1, 2, 3, ...`
    Increment,
    /// Doubling followed by bisection.
    #[default]
    BracketBisect,
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "increment" => Ok(SearchMode::Increment),
            "bracket" | "bracket-bisect" => Ok(SearchMode::BracketBisect),
            _ => Err(Error::Parse(format!(
                "unknown search {s:?} (expected increment|bracket)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Success,
    /// The accuracy check first failed at this step.
    PrecisionFail(usize),
    /// The enclosure no longer met the domain at this step.
    DomainFail(usize),
}

impl RunStatus {
    pub fn is_success(&self) -> bool {
        matches!(self, RunStatus::Success)
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunStatus::Success => f.write_str("success"),
            RunStatus::PrecisionFail(n) => write!(f, "precision-fail@{n}"),
            RunStatus::DomainFail(n) => write!(f, "domain-fail@{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRun {
    /// Checked points, up to and including a failing one.
    pub points: Vec<Approx>,
    pub status: RunStatus,
    pub precision: Prec,
}

fn accepts(x: &Approx, p: i32, mode: ErrorMode) -> bool {
    match mode {
        ErrorMode::Relative => prec(x, p),
        ErrorMode::Absolute => abs_prec(x, p),
    }
}

/// Running-error orbit of any [`ApproxMap`], checked after every step.
pub fn run_approx_map<M: ApproxMap + ?Sized>(
    f: &M,
    x0: &Rational,
    n: usize,
    p: i32,
    m: Prec,
    mode: ErrorMode,
) -> Result<OrbitRun> {
    let mut x = seed(f, x0, m)?;
    let mut points = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let ok = accepts(&x, p, mode);
        points.push(x);
        if !ok {
            return Ok(OrbitRun {
                points,
                status: RunStatus::PrecisionFail(k),
                precision: m,
            });
        }
        if k == n {
            break;
        }
        x = match step(f, &points[k]) {
            Ok(next) => next,
            Err(Error::DomainDeparture) => {
                return Ok(OrbitRun {
                    points,
                    status: RunStatus::DomainFail(k + 1),
                    precision: m,
                })
            }
            Err(e) => return Err(e),
        };
    }
    Ok(OrbitRun {
        points,
        status: RunStatus::Success,
        precision: m,
    })
}

fn interval_image(sys: &LogisticSystem, x: &Interval, m: Prec) -> Interval {
    match sys.form().expression() {
        Some(expr) => natural_extension(expr, sys.mu(), x, m),
        None => mean_value_form(sys.mu(), x, m),
    }
}

fn run_interval_form(sys: &LogisticSystem, x0: &Rational, n: usize, p: i32, m: Prec, mode: ErrorMode) -> OrbitRun {
    let domain = Interval::unit(m);
    let mut x = Interval::from_rational(x0, m);
    let mut points = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let a = Approx::from_interval(&x, m);
        let ok = accepts(&a, p, mode);
        points.push(a);
        if !ok {
            return OrbitRun {
                points,
                status: RunStatus::PrecisionFail(k),
                precision: m,
            };
        }
        if k == n {
            break;
        }
        x = match interval_image(sys, &x, m).intersect(&domain) {
            Ok(next) => next,
            Err(_) => {
                return OrbitRun {
                    points,
                    status: RunStatus::DomainFail(k + 1),
                    precision: m,
                }
            }
        };
    }
    OrbitRun {
        points,
        status: RunStatus::Success,
        precision: m,
    }
}

/// Iterates `n` steps at `m` bits with the system's form, checking the
/// accuracy target at every point `x_0 .. x_n`; stops at the first failure.
pub fn run_fixed_precision(
    sys: &LogisticSystem,
    x0: &Rational,
    n: usize,
    p: i32,
    m: Prec,
    mode: ErrorMode,
) -> Result<OrbitRun> {
    // Validates m and x0 for every form.
    init_approx(sys, x0, m)?;
    match sys.form() {
        MapForm::RunningError => run_approx_map(sys, x0, n, p, m, mode),
        _ => Ok(run_interval_form(sys, x0, n, p, m, mode)),
    }
}

/// Smallest `m <= m_cap` at which [`run_fixed_precision`] succeeds, together
/// with the successful run.
pub fn find_min_precision(
    sys: &LogisticSystem,
    x0: &Rational,
    n: usize,
    p: i32,
    mode: ErrorMode,
    search: SearchMode,
    m_cap: Prec,
) -> Result<(Prec, OrbitRun)> {
    if m_cap == 0 {
        return Err(Error::InvalidPrecision);
    }
    let run = |m: Prec| run_fixed_precision(sys, x0, n, p, m, mode);
    let no_halt = |last: &OrbitRun| Error::NoHaltWithinCap {
        cap: m_cap,
        detail: format!("last run at m={} ended with {}", last.precision, last.status),
    };
    match search {
        SearchMode::Increment => {
            let mut last = None;
            for m in 1..=m_cap {
                let r = run(m)?;
                if r.status.is_success() {
                    return Ok((m, r));
                }
                last = Some(r);
            }
            Err(no_halt(&last.expect("m_cap >= 1")))
        }
        SearchMode::BracketBisect => {
            let mut lo: Prec = 0;
            let mut m: Prec = 1;
            let mut best = loop {
                let r = run(m)?;
                if r.status.is_success() {
                    break r;
                }
                if m >= m_cap {
                    return Err(no_halt(&r));
                }
                lo = m;
                m = m.saturating_mul(2).min(m_cap);
            };
            let mut hi = m;
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                let r = run(mid)?;
                if r.status.is_success() {
                    hi = mid;
                    best = r;
                } else {
                    lo = mid;
                }
            }
            // hi - 1 failed by construction; look a few bits further down.
            'scan: loop {
                let floor = hi.saturating_sub(1 + BRACKET_BACKTRACK).max(1);
                for cand in floor..hi.saturating_sub(1) {
                    let r = run(cand)?;
                    if r.status.is_success() {
                        hi = cand;
                        best = r;
                        continue 'scan;
                    }
                }
                return Ok((hi, best));
            }
        }
    }
}

/// Unchecked running-error orbit `x_0 .. x_n` at `m_oracle` bits, used as
/// ground truth.
pub fn oracle_orbit<M: ApproxMap + ?Sized>(f: &M, x0: &Rational, n: usize, m_oracle: Prec) -> Result<Vec<Approx>> {
    let mut x = seed(f, x0, m_oracle)?;
    let mut out = Vec::with_capacity(n + 1);
    for _ in 0..n {
        let next = step(f, &x)?;
        out.push(x);
        x = next;
    }
    out.push(x);
    Ok(out)
}

/// Result record of one precision search.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub mu: Rational,
    pub form: MapForm,
    pub x0: Rational,
    pub n: usize,
    pub p: i32,
    pub m_min: Prec,
    pub sigma_est: f64,
    pub bound_lower: Option<f64>,
    pub bound_upper: Option<f64>,
    pub lambda_hat: Option<f64>,
    pub wall_time: Duration,
}

/// `sigma_est = m_min / N` plus the analytic band for the form.
pub fn sigma_estimate(
    sys: &LogisticSystem,
    x0: &Rational,
    n: usize,
    p: i32,
    m_min: Prec,
    lambda_hat: Option<f64>,
    wall_time: Duration,
) -> Result<RateReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1 for a rate".into()));
    }
    if m_min == 0 {
        return Err(Error::InvalidPrecision);
    }
    let (bound_lower, bound_upper) = match analytic_sigma_bound(sys.form(), sys.mu(), lambda_hat) {
        Ok((lo, hi)) => (Some(lo), Some(hi)),
        Err(Error::MissingLyapunov) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(RateReport {
        mu: sys.mu().clone(),
        form: sys.form(),
        x0: x0.clone(),
        n,
        p,
        m_min,
        sigma_est: m_min as f64 / n as f64,
        bound_lower,
        bound_upper,
        lambda_hat,
        wall_time,
    })
}
