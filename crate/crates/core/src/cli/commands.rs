use std::fmt::Write as _;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::SeedableRng;
use rayon::prelude::*;

use super::config::SweepConfig;
use crate::dynsys::{validated_lyapunov, LogisticSystem, LyapunovEstimate, MapForm};
use crate::error::{Error, Result};
use crate::mpfloat::{format_significant, Prec, Rational};
use crate::orbit::{find_min_precision, run_fixed_precision, sigma_estimate, OrbitRun, RateReport};

pub const SWEEP_HEADER: &str = "mu,form,x0,N,p,m_min,sigma_est,bound_lower,bound_upper,lambda_hat,status";
pub const LYAPUNOV_HEADER: &str = "mu,lambda_hat,sigma_lyapunov,half_width,status";

const SIG_DIGITS: usize = 10;

/// Bits allowed for the orbit behind a Lyapunov estimate.
pub const LYAPUNOV_M_CAP: Prec = 1 << 16;

fn dec(x: f64) -> String {
    format_significant(x, SIG_DIGITS)
}

fn dec_q(x: &Rational) -> String {
    dec(crate::mpfloat::Float::from_rational(x, 64, crate::mpfloat::Round::Nearest).to_f64())
}

fn opt(x: Option<f64>) -> String {
    x.map(dec).unwrap_or_default()
}

fn status_text(e: &Error) -> String {
    let text = match e {
        Error::NoHaltWithinCap { cap, .. } => format!("no-halt-within-cap m_cap={cap}"),
        other => format!("error: {other}"),
    };
    text.replace([',', '\n', '\r'], ";")
}

/// One line of a sweep CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub mu: Rational,
    pub form: MapForm,
    pub x0: Rational,
    pub n: usize,
    pub p: i32,
    pub m_min: Option<Prec>,
    pub sigma_est: Option<f64>,
    pub bound_lower: Option<f64>,
    pub bound_upper: Option<f64>,
    pub lambda_hat: Option<f64>,
    pub status: String,
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            dec_q(&self.mu),
            self.form,
            dec_q(&self.x0),
            self.n,
            self.p,
            self.m_min.map(|m| m.to_string()).unwrap_or_default(),
            opt(self.sigma_est),
            opt(self.bound_lower),
            opt(self.bound_upper),
            opt(self.lambda_hat),
            self.status
        )
    }

    pub fn is_ok(&self) -> bool {
        self.m_min.is_some()
    }

    fn empty(mu: &Rational, cfg: &SweepConfig) -> SweepRow {
        SweepRow {
            mu: mu.clone(),
            form: cfg.form,
            x0: cfg.x0.clone(),
            n: cfg.n,
            p: cfg.p,
            m_min: None,
            sigma_est: None,
            bound_lower: None,
            bound_upper: None,
            lambda_hat: None,
            status: String::new(),
        }
    }
}

impl From<&RateReport> for SweepRow {
    fn from(r: &RateReport) -> SweepRow {
        SweepRow {
            mu: r.mu.clone(),
            form: r.form,
            x0: r.x0.clone(),
            n: r.n,
            p: r.p,
            m_min: Some(r.m_min),
            sigma_est: Some(r.sigma_est),
            bound_lower: r.bound_lower,
            bound_upper: r.bound_upper,
            lambda_hat: r.lambda_hat,
            status: "ok".into(),
        }
    }
}

fn needs_lyapunov(form: MapForm) -> bool {
    matches!(form, MapForm::MeanValue | MapForm::RunningError)
}

/// Outcome of one precision search; the report is absent for `N = 0`,
/// where no rate is defined.
pub struct SearchResult {
    pub m_min: Prec,
    pub run: OrbitRun,
    pub report: Option<RateReport>,
}

impl SearchResult {
    pub fn row(&self, sys: &LogisticSystem, cfg: &SweepConfig) -> SweepRow {
        match &self.report {
            Some(r) => SweepRow::from(r),
            None => SweepRow {
                m_min: Some(self.m_min),
                status: "ok".into(),
                ..SweepRow::empty(sys.mu(), cfg)
            },
        }
    }
}

/// Precision search plus report for one parameter.
pub fn rate_report(sys: &LogisticSystem, cfg: &SweepConfig, lambda_hat: Option<f64>) -> Result<SearchResult> {
    let start = Instant::now();
    let (m_min, run) = find_min_precision(sys, &cfg.x0, cfg.n, cfg.p, cfg.mode, cfg.search, cfg.m_cap)?;
    let report = if cfg.n == 0 {
        None
    } else {
        Some(sigma_estimate(
            sys,
            &cfg.x0,
            cfg.n,
            cfg.p,
            m_min,
            lambda_hat,
            start.elapsed(),
        )?)
    };
    Ok(SearchResult { m_min, run, report })
}

fn lyapunov_for(sys: &LogisticSystem, cfg: &SweepConfig) -> Result<LyapunovEstimate> {
    validated_lyapunov(sys, &cfg.x0, cfg.iterations, cfg.transient, LYAPUNOV_M_CAP)
}

fn sweep_row(mu: &Rational, cfg: &SweepConfig) -> SweepRow {
    let failed = |status: String| SweepRow {
        status,
        ..SweepRow::empty(mu, cfg)
    };
    let sys = match LogisticSystem::new(mu.clone(), cfg.form) {
        Ok(s) => s,
        Err(e) => return failed(status_text(&e)),
    };
    let mut notes = Vec::new();
    let lambda = if needs_lyapunov(cfg.form) {
        match lyapunov_for(&sys, cfg) {
            Ok(est) if est.singular() => {
                notes.push("lyapunov-singular");
                None
            }
            Ok(est) => Some(est.value),
            Err(_) => {
                notes.push("lyapunov-unavailable");
                None
            }
        }
    } else {
        None
    };
    match rate_report(&sys, cfg, lambda) {
        Ok(found) => {
            let mut row = found.row(&sys, cfg);
            for n in notes {
                row.status.push(';');
                row.status.push_str(n);
            }
            row
        }
        Err(e) => failed(status_text(&e)),
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

/// Minimality re-check of one sweep row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpotCheck {
    pub row: usize,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub spot_checks: Vec<SpotCheck>,
}

impl SweepOutcome {
    pub fn csv(&self) -> String {
        sweep_csv(&self.rows)
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Re-runs `m_min` (must succeed) and `m_min - 1` (must not).
pub fn verify_minimality(row: &SweepRow, cfg: &SweepConfig) -> Result<bool> {
    let Some(m) = row.m_min else {
        return Ok(false);
    };
    let sys = LogisticSystem::new(row.mu.clone(), row.form)?;
    let at = run_fixed_precision(&sys, &row.x0, row.n, row.p, m, cfg.mode)?;
    if !at.status.is_success() {
        return Ok(false);
    }
    if m == 1 {
        return Ok(true);
    }
    let below = run_fixed_precision(&sys, &row.x0, row.n, row.p, m - 1, cfg.mode)?;
    Ok(!below.status.is_success())
}

/// Runs every grid point, in parallel, and re-verifies a seeded random
/// sample of successful rows.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let grid = cfg.grid()?;
    let mut rows = with_pool(cfg.jobs, || {
        grid.par_iter().map(|mu| sweep_row(mu, cfg)).collect::<Vec<_>>()
    })?;
    let ok: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].is_ok()).collect();
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut picked: Vec<usize> = sample(&mut rng, ok.len(), cfg.spot_checks.min(ok.len()))
        .into_iter()
        .map(|i| ok[i])
        .collect();
    picked.sort_unstable();
    let mut spot_checks = Vec::with_capacity(picked.len());
    for row in picked {
        let verified = verify_minimality(&rows[row], cfg)?;
        if !verified {
            rows[row].status.push_str(";minimality-unverified");
        }
        spot_checks.push(SpotCheck { row, verified });
    }
    Ok(SweepOutcome { rows, spot_checks })
}

/// One line of a Lyapunov CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovRow {
    pub mu: Rational,
    pub estimate: Option<LyapunovEstimate>,
    pub status: String,
}

impl LyapunovRow {
    pub fn lambda_hat(&self) -> Option<f64> {
        self.estimate.as_ref().filter(|e| !e.singular()).map(|e| e.value)
    }

    pub fn to_csv(&self) -> String {
        let lambda = self.lambda_hat();
        format!(
            "{},{},{},{},{}",
            dec_q(&self.mu),
            opt(lambda),
            opt(lambda.map(|l| l.max(0.0) / std::f64::consts::LN_2)),
            opt(self.estimate.as_ref().filter(|e| !e.singular()).map(|e| e.half_width)),
            self.status
        )
    }
}

pub fn lyapunov_row(mu: &Rational, cfg: &SweepConfig) -> LyapunovRow {
    let result = LogisticSystem::new(mu.clone(), MapForm::RunningError).and_then(|s| lyapunov_for(&s, cfg));
    match result {
        Ok(est) => {
            let status = if est.singular() { "singular" } else { "ok" }.to_string();
            LyapunovRow {
                mu: mu.clone(),
                estimate: Some(est),
                status,
            }
        }
        Err(e) => LyapunovRow {
            mu: mu.clone(),
            estimate: None,
            status: status_text(&e),
        },
    }
}

pub fn run_lyapunov_sweep(cfg: &SweepConfig) -> Result<Vec<LyapunovRow>> {
    let grid = cfg.grid()?;
    with_pool(cfg.jobs, || grid.par_iter().map(|mu| lyapunov_row(mu, cfg)).collect())
}

pub fn lyapunov_csv(rows: &[LyapunovRow]) -> String {
    let mut out = String::from(LYAPUNOV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Human-readable orbit listing: `n fl err` with enough digits for `p`.
pub fn orbit_listing(run: &OrbitRun, p: i32) -> String {
    let digits = (p.max(1) as usize) + 3;
    let mut out = String::from("# n fl err\n");
    for (n, a) in run.points.iter().enumerate() {
        let _ = writeln!(out, "{n} {} {}", a.fl().to_sci_string(digits), a.err().to_sci_string(3));
    }
    out
}

pub fn report_summary(r: &RateReport) -> String {
    let band = match (r.bound_lower, r.bound_upper) {
        (Some(lo), Some(hi)) => format!("[{}, {}]", dec(lo), dec(hi)),
        _ => "n/a".into(),
    };
    format!(
        "mu={} form={} x0={} N={} p={} m_min={} sigma_est={} bound={} lambda_hat={} wall_time={:.3}s",
        r.mu,
        r.form,
        r.x0,
        r.n,
        r.p,
        r.m_min,
        dec(r.sigma_est),
        band,
        opt(r.lambda_hat),
        r.wall_time.as_secs_f64()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_sweep_is_deterministic() {
        let cfg = SweepConfig {
            mu_start: q(1, 2),
            mu_end: q(3, 2),
            mu_step: q(1, 2),
            n: 40,
            jobs: Some(3),
            ..SweepConfig::desk()
        };
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&SweepConfig {
            jobs: Some(1),
            ..cfg.clone()
        })
        .unwrap();
        assert_eq!(a.csv(), b.csv());
        assert_eq!(a.rows.len(), 3);
        assert_eq!(a.spot_checks.len(), 3);
        assert!(a.spot_checks.iter().all(|c| c.verified));
        let text = a.csv();
        assert!(text.starts_with(SWEEP_HEADER));
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("0.5000000000,form1,0.2200000000,40,6,"));
    }

    #[test]
    fn failed_rows_keep_the_sweep_going() {
        let cfg = SweepConfig {
            mu_start: q(4, 1),
            mu_end: q(4, 1),
            x0: q(1, 2),
            n: 5,
            m_cap: 64,
            form: MapForm::RunningError,
            iterations: 20,
            transient: 0,
            ..SweepConfig::desk()
        };
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.rows.len(), 1);
        assert!(out.rows[0].status.starts_with("no-halt-within-cap"));
        assert!(out.spot_checks.is_empty());
    }

    #[test]
    fn lyapunov_rows() {
        let cfg = SweepConfig {
            iterations: 2000,
            ..SweepConfig::desk()
        };
        let row = lyapunov_row(&q(5, 2), &cfg);
        assert_eq!(row.status, "ok");
        assert!((row.lambda_hat().unwrap() - 0.5f64.ln()).abs() < 0.02);
        assert!(row.to_csv().starts_with("2.500000000,-0.69"));
        let flat = lyapunov_row(
            &q(2, 1),
            &SweepConfig {
                x0: q(1, 2),
                iterations: 10,
                ..cfg
            },
        );
        assert_eq!(flat.status, "singular");
        assert_eq!(flat.to_csv(), "2.000000000,,,,singular");
    }
}
