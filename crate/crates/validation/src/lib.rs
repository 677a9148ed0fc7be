//! Runner for the acceptance criteria of `opinv-core`.
//!
//! Each criterion produces one or more [`Measurement`]s; a criterion passes
//! when every measurement is below its tolerance and the wall-clock budget
//! (if any) is met. [`Criterion::run`] prints exactly one `PASS`/`FAIL`
//! line per criterion followed by indented detail lines.

use std::fmt;
use std::time::{Duration, Instant};

/// A measured quantity compared against a strict upper tolerance.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Measurement {
    pub fn new(label: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { label: label.into(), value, tolerance }
    }

    /// NaN never passes.
    pub fn pass(&self) -> bool {
        self.value < self.tolerance
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass() { "ok" } else { "FAILED" };
        write!(f, "{}: {:.3e} (tol {:.0e}) {verdict}", self.label, self.value, self.tolerance)
    }
}

/// Running maximum that poisons on NaN.
#[derive(Debug, Clone, Copy, Default)]
pub struct Worst(f64);

impl Worst {
    pub fn push(&mut self, v: f64) {
        if v.is_nan() || self.0.is_nan() {
            self.0 = f64::NAN;
        } else {
            self.0 = self.0.max(v);
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Relative residual `|a − b| / max(|a|, |b|, floor)`.
pub fn rel_diff(a: opinv_core::C64, b: opinv_core::C64, floor: f64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(floor)
}

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub budget: Option<Duration>,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u32,
    pub pass: bool,
    pub elapsed: Duration,
}

impl Criterion {
    pub fn new(id: u32, title: &'static str, budget_secs: Option<u64>) -> Self {
        Self { id, title, budget: budget_secs.map(Duration::from_secs) }
    }

    /// Runs `body`, prints the verdict line and details, and returns the
    /// verdict. An `Err` from `body` is a failure with the message shown.
    pub fn run<F>(&self, body: F) -> Verdict
    where
        F: FnOnce(&mut Vec<String>) -> Result<Vec<Measurement>, String>,
    {
        let mut notes = Vec::new();
        let start = Instant::now();
        let outcome = body(&mut notes);
        let elapsed = start.elapsed();
        let in_budget = self.budget.is_none_or(|b| elapsed <= b);
        let (pass, details) = match outcome {
            Ok(ms) => (!ms.is_empty() && ms.iter().all(Measurement::pass) && in_budget, ms.iter().map(|m| m.to_string()).collect()),
            Err(e) => (false, vec![format!("error: {e}")]),
        };
        let budget = match self.budget {
            Some(b) => format!("{:.2}s of {}s", elapsed.as_secs_f64(), b.as_secs()),
            None => format!("{:.2}s", elapsed.as_secs_f64()),
        };
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {}: {} [{budget}]", self.id, self.title);
        for d in details {
            println!("    {d}");
        }
        if !in_budget {
            println!("    runtime budget exceeded");
        }
        for n in notes {
            println!("    note: {n}");
        }
        Verdict { id: self.id, pass, elapsed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Measurement::new("m", f64::NAN, 1.0).pass());
        let mut w = Worst::default();
        w.push(1.0);
        w.push(f64::NAN);
        w.push(2.0);
        assert!(w.get().is_nan());
    }

    #[test]
    fn empty_measurements_fail() {
        let v = Criterion::new(0, "empty", None).run(|_| Ok(vec![]));
        assert!(!v.pass);
    }

    #[test]
    fn errors_fail_and_budget_applies() {
        assert!(!Criterion::new(0, "err", None).run(|_| Err("boom".into())).pass);
        assert!(Criterion::new(0, "ok", Some(10)).run(|_| Ok(vec![Measurement::new("m", 0.5, 1.0)])).pass);
    }
}
