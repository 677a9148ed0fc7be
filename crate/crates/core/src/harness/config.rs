use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Params, Regime};
use crate::quad::QuadratureSpec;
use crate::rng::Draws;
use crate::series::{pairs, EntireSeries};
use crate::C64;

/// The function `f` fed through the operator round trips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InputSeries {
    Zero,
    /// `f(z) = z^power`.
    Monomial { power: usize },
    /// Coefficients drawn uniformly from the box `[−scale, scale]²` with the
    /// run seed.
    Random { scale: f64 },
    /// Explicit exponential coefficients `E_1, E_2, …` as `[re, im]` pairs.
    Coefficients {
        #[serde(with = "pairs")]
        coeffs: Vec<C64>,
    },
}

/// A complete run description, read from a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(with = "pairs::one")]
    pub x: C64,
    #[serde(with = "pairs::one")]
    pub nu: C64,
    pub truncation_n: usize,
    pub quad: QuadratureSpec,
    pub contour_c0: f64,
    #[serde(with = "pairs")]
    pub z_samples: Vec<C64>,
    pub seed: u64,
    pub output_path: String,
    pub input: InputSeries,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            x: C64::new(0.4, 0.0),
            nu: C64::new(-2.0, 0.0),
            truncation_n: 8,
            quad: QuadratureSpec::default(),
            contour_c0: 0.5,
            z_samples: vec![
                C64::new(0.3, 0.0),
                C64::new(0.0, 0.5),
                C64::new(-0.2, 0.4),
                C64::new(0.45, -0.25),
            ],
            seed: 0x5eed,
            output_path: "report.json".into(),
            input: InputSeries::Monomial { power: 1 },
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Structural checks that do not depend on the command.
    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        if self.truncation_n == 0 {
            return Err(Error::Config("truncation_n must be positive".into()));
        }
        if !(self.contour_c0 > 0.0 && self.contour_c0 < 1.0) {
            return Err(Error::Config(format!("contour_c0 must lie in (0, 1), got {}", self.contour_c0)));
        }
        if let InputSeries::Monomial { power: 0 } = self.input {
            return Err(Error::Config("monomial input needs power >= 1 (f(0) = 0)".into()));
        }
        if let InputSeries::Coefficients { coeffs } = &self.input {
            if coeffs.is_empty() {
                return Err(Error::Config("explicit input needs at least one coefficient".into()));
            }
        }
        Ok(())
    }

    pub fn params(&self, regime: Regime) -> Result<Params> {
        self.validate()?;
        Params::new(self.x, self.nu, regime)
    }

    /// The input series, padded to at least `truncation_n`.
    pub fn input_series(&self) -> EntireSeries {
        let n = self.truncation_n;
        match &self.input {
            InputSeries::Zero => EntireSeries::zeros(n),
            InputSeries::Monomial { power } => {
                let mut coeffs = vec![C64::new(0.0, 0.0); n.max(*power)];
                coeffs[power - 1] = C64::new(crate::series::factorial(*power), 0.0);
                EntireSeries::new(coeffs).expect("non-empty")
            }
            InputSeries::Random { scale } => Draws::new(self.seed).series(n, *scale),
            InputSeries::Coefficients { coeffs } => {
                let mut c = coeffs.clone();
                if c.len() < n {
                    c.resize(n, C64::new(0.0, 0.0));
                }
                EntireSeries::new(c).expect("non-empty")
            }
        }
    }
}
