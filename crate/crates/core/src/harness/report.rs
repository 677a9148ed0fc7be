use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::RunConfig;
use crate::series::pairs;
use crate::C64;

/// One residual behind a check: a `z` sample, a coefficient index, a grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleResidual {
    pub label: String,
    #[serde(with = "pairs::one")]
    pub z: C64,
    pub residual: f64,
}

impl SampleResidual {
    pub fn at(z: C64, residual: f64) -> Self {
        Self { label: format!("z={}", fmt_c(z)), z, residual }
    }

    pub fn labelled(label: impl Into<String>, residual: f64) -> Self {
        Self { label: label.into(), z: C64::new(0.0, 0.0), residual }
    }
}

fn fmt_c(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check_name: String,
    pub routes_compared: Vec<String>,
    /// `null` in JSON when the check could not be evaluated.
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub samples: Vec<SampleResidual>,
}

impl CheckRecord {
    pub fn new(name: &str, routes: &[&str], tolerance: f64, samples: Vec<SampleResidual>) -> Self {
        let max_residual = samples
            .iter()
            .map(|s| if s.residual.is_nan() { f64::INFINITY } else { s.residual })
            .fold(0.0, f64::max);
        Self {
            check_name: name.into(),
            routes_compared: routes.iter().map(|r| r.to_string()).collect(),
            max_residual,
            tolerance,
            pass: max_residual < tolerance,
            error: None,
            samples,
        }
    }

    pub fn failed(name: &str, routes: &[&str], tolerance: f64, err: &Error) -> Self {
        Self {
            check_name: name.into(),
            routes_compared: routes.iter().map(|r| r.to_string()).collect(),
            max_residual: f64::INFINITY,
            tolerance,
            pass: false,
            error: Some(err.to_string()),
            samples: Vec::new(),
        }
    }

    /// Builds the record from a fallible computation of the samples.
    pub fn from_result(
        name: &str,
        routes: &[&str],
        tolerance: f64,
        samples: Result<Vec<SampleResidual>>,
    ) -> Self {
        match samples {
            Ok(s) => Self::new(name, routes, tolerance, s),
            Err(e) => Self::failed(name, routes, tolerance, &e),
        }
    }
}

/// Build metadata only: nothing time- or host-dependent, so reports for
/// equal inputs are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub package: &'static str,
    pub version: &'static str,
    pub target_os: &'static str,
    pub target_arch: &'static str,
    pub prng: &'static str,
}

impl Default for Environment {
    fn default() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            target_os: std::env::consts::OS,
            target_arch: std::env::consts::ARCH,
            prng: "splitmix64",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub all_pass: bool,
    pub checks: Vec<CheckRecord>,
    pub environment: Environment,
    pub config: RunConfig,
}

impl Report {
    /// Checks are ordered by name so the output does not depend on the
    /// order in which they ran.
    pub fn new(command: &str, config: &RunConfig, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.check_name.cmp(&b.check_name));
        Self {
            command: command.into(),
            all_pass: checks.iter().all(|c| c.pass),
            checks,
            environment: Environment::default(),
            config: config.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// One row per residual: `check_name, label, z_re, z_im, residual`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
        w.write_record(["check_name", "label", "z_re", "z_im", "residual"]).map_err(io)?;
        for check in &self.checks {
            for s in &check.samples {
                w.write_record([
                    check.check_name.clone(),
                    s.label.clone(),
                    s.z.re.to_string(),
                    s.z.im.to_string(),
                    s.residual.to_string(),
                ])
                .map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))?;
        Ok(())
    }
}
