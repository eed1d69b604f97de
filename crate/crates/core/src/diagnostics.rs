//! Post-processing: convergence tables, stability verdicts and interface
//! height series.

use std::fmt;

use crate::assembly::Field;
use crate::cases::{BubbleHeight, RayleighTaylorConfig};
use crate::error::{Error, Result};
use crate::stepper::{EnergyReport, Scheme};

/// Errors at `t_end` for one refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorLevel {
    pub n: usize,
    pub h: f64,
    pub tau: f64,
    pub u: f64,
    pub p: f64,
    pub rho: f64,
}

impl ErrorLevel {
    pub fn errors(&self) -> [f64; 3] {
        [self.u, self.p, self.rho]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub scheme: Scheme,
    pub levels: Vec<ErrorLevel>,
}

impl ErrorTable {
    /// Levels must be ordered coarse to fine.
    pub fn new(scheme: Scheme, levels: Vec<ErrorLevel>) -> Result<Self> {
        if levels.windows(2).any(|w| !(w[1].h < w[0].h)) {
            return Err(Error::invalid("refinement levels must have strictly decreasing h"));
        }
        Ok(ErrorTable { scheme, levels })
    }

    pub fn rates(&self) -> Result<Rates> {
        convergence_rates(self)
    }
}

/// Observed orders between consecutive levels; entry `k` compares levels
/// `k` and `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub rho: Vec<f64>,
}

impl Rates {
    /// Rates `[u, p, ρ]` between the two finest levels.
    pub fn finest(&self) -> [f64; 3] {
        let last = |v: &Vec<f64>| *v.last().expect("at least one rate");
        [last(&self.u), last(&self.p), last(&self.rho)]
    }
}

/// `log2(coarse/fine)`; `+∞` when the fine error vanishes.
pub fn rate(coarse: f64, fine: f64) -> f64 {
    if fine == 0.0 {
        f64::INFINITY
    } else {
        (coarse / fine).log2()
    }
}

pub fn convergence_rates(table: &ErrorTable) -> Result<Rates> {
    if table.levels.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least two levels for a rate, got {}",
            table.levels.len()
        )));
    }
    let pairs = || table.levels.windows(2);
    Ok(Rates {
        u: pairs().map(|w| rate(w[0].u, w[1].u)).collect(),
        p: pairs().map(|w| rate(w[0].p, w[1].p)).collect(),
        rho: pairs().map(|w| rate(w[0].rho, w[1].rho)).collect(),
    })
}

impl fmt::Display for ErrorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme {}", self.scheme)?;
        writeln!(
            f,
            "{:>5} {:>10} {:>10} {:>12} {:>6} {:>12} {:>6} {:>12} {:>6}",
            "n", "h", "tau", "err_u", "rate", "err_p", "rate", "err_rho", "rate"
        )?;
        let rates = convergence_rates(self).ok();
        for (k, l) in self.levels.iter().enumerate() {
            let r = |which: usize| match (&rates, k) {
                (Some(r), k) if k > 0 => {
                    let v = [&r.u, &r.p, &r.rho][which][k - 1];
                    format!("{v:6.3}")
                }
                _ => format!("{:>6}", "-"),
            };
            writeln!(
                f,
                "{:>5} {:>10.3e} {:>10.3e} {:>12.4e} {} {:>12.4e} {} {:>12.4e} {}",
                l.n,
                l.h,
                l.tau,
                l.u,
                r(0),
                l.p,
                r(1),
                l.rho,
                r(2)
            )?;
        }
        Ok(())
    }
}

/// Which per-step inequality a verdict checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StabilityMode {
    /// Coupled schemes with `f = 0` and constant `μ`:
    /// `K_{n+1} + 2τD_{n+1} ≤ K_n + tol`.
    CoupledDecay { tol: f64 },
    /// Fractional step with `f = 0` and constant `μ`:
    /// `K̂_{n+1} + τ²P_{n+1} ≤ K̂_n + τ²P_n + tol`, and the weak divergence
    /// of `û` at most `tol`.
    FractionalDecay { tol: f64 },
    /// Finite values only.
    Finite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    pub run_id: String,
    pub max_kinetic: f64,
    /// Steps at which the checked inequality failed.
    pub violations: Vec<usize>,
    /// Largest amount by which the inequality was exceeded.
    pub max_excess: f64,
    /// First step with a non-finite entry.
    pub first_non_finite: Option<usize>,
    /// Total nodal density floor violations over the series.
    pub floor_violations: usize,
}

impl StabilityVerdict {
    pub fn monotone(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn finite(&self) -> bool {
        self.first_non_finite.is_none()
    }

    pub fn passed(&self) -> bool {
        self.monotone() && self.finite()
    }
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (max kinetic {:.6e}, max excess {:.3e}, {} violations, floor hits {}",
            self.run_id,
            if self.passed() { "pass" } else { "FAIL" },
            self.max_kinetic,
            self.max_excess,
            self.violations.len(),
            self.floor_violations
        )?;
        if let Some(s) = self.first_non_finite {
            write!(f, ", non-finite at step {s}")?;
        }
        if let Some(s) = self.violations.first() {
            write!(f, ", first violation at step {s}")?;
        }
        write!(f, ")")
    }
}

pub fn stability_verdict(run_id: &str, reports: &[EnergyReport], mode: StabilityMode) -> StabilityVerdict {
    let first_non_finite = reports.iter().find(|r| !r.is_finite()).map(|r| r.step);
    let max_kinetic = reports.iter().map(|r| r.kinetic.max(r.kinetic_hat)).fold(0.0, f64::max);
    let floor_violations = reports.iter().map(|r| r.floor_violations).sum();
    let mut violations = Vec::new();
    let mut max_excess = 0.0f64;
    let mut flag = |step: usize, excess: f64| {
        if excess > 0.0 || excess.is_nan() {
            violations.push(step);
        }
        if excess.is_finite() {
            max_excess = max_excess.max(excess);
        }
    };
    match mode {
        StabilityMode::CoupledDecay { tol } => {
            for w in reports.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                flag(b.step, b.kinetic + 2.0 * b.tau * b.dissipation - a.kinetic - tol);
            }
        }
        StabilityMode::FractionalDecay { tol } => {
            for w in reports.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                let t2 = b.tau * b.tau;
                flag(b.step, b.kinetic_hat + t2 * b.pressure_grad - a.kinetic_hat - t2 * a.pressure_grad - tol);
            }
            for r in reports {
                if let Some(d) = r.weak_divergence {
                    flag(r.step, d - tol);
                }
            }
            violations.sort_unstable();
            violations.dedup();
        }
        StabilityMode::Finite => {}
    }
    StabilityVerdict {
        run_id: run_id.to_string(),
        max_kinetic,
        violations,
        max_excess,
        first_non_finite,
        floor_violations,
    }
}

/// Interface height on the right wall at each snapshot time.
pub fn bubble_height_series<'a>(
    config: &RayleighTaylorConfig,
    snapshots: impl IntoIterator<Item = (f64, &'a Field)>,
) -> Vec<(f64, BubbleHeight)> {
    snapshots
        .into_iter()
        .map(|(t, rho)| (t, config.bubble_height(rho)))
        .collect()
}

/// Earliest index from which the series is non-decreasing up to `tol`;
/// `None` for an empty series.
pub fn monotone_from(values: &[f64], tol: f64) -> Option<usize> {
    if values.is_empty() {
        return None;
    }
    let mut start = values.len() - 1;
    while start > 0 && values[start] + tol >= values[start - 1] {
        start -= 1;
    }
    Some(start)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(n: usize, e: f64) -> ErrorLevel {
        ErrorLevel {
            n,
            h: 1.0 / n as f64,
            tau: 0.1 / n as f64,
            u: e,
            p: e,
            rho: e,
        }
    }

    #[test]
    fn rates_from_errors() {
        assert_eq!(rate(0.4, 0.1), 2.0);
        assert_eq!(rate(0.4, 0.2), 1.0);
        assert_eq!(rate(0.4, 0.0), f64::INFINITY);
        let t = ErrorTable::new(Scheme::Bdf1, vec![level(4, 0.4), level(8, 0.1)]).unwrap();
        assert_eq!(t.rates().unwrap().finest(), [2.0, 2.0, 2.0]);
        let one = ErrorTable::new(Scheme::Bdf1, vec![level(4, 0.4)]).unwrap();
        assert!(one.rates().is_err());
        assert!(ErrorTable::new(Scheme::Bdf1, vec![level(8, 0.4), level(4, 0.1)]).is_err());
    }

    #[test]
    fn onset() {
        assert_eq!(monotone_from(&[3.0, 1.0, 2.0, 2.0, 5.0], 0.0), Some(1));
        assert_eq!(monotone_from(&[1.0, 2.0], 0.0), Some(0));
        assert_eq!(monotone_from(&[], 0.0), None);
    }
}
