use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::pairs;
use crate::C64;

/// How strictly `(x, ν)` is validated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Any finite `(x, ν)`; the matrix inversion pair is purely algebraic.
    Algebraic,
    /// `x ∉ ℝ⁻ ∪ {1}` and `Re ν < 1`: contour representations only.
    Representation,
    /// `x ∉ ℝ⁻ ∪ {1}` and `Re ν < 0`: the operator itself is defined.
    Operator,
}

/// The constants `(x, ν)`; `c`, `t̂`, `τ̂` are always derived on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(with = "pairs::one")]
    x: C64,
    #[serde(with = "pairs::one")]
    nu: C64,
    regime: Regime,
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl Params {
    pub fn new(x: C64, nu: C64, regime: Regime) -> Result<Self> {
        if !finite(x) || !finite(nu) {
            return Err(Error::domain("x and ν must be finite"));
        }
        if regime != Regime::Algebraic {
            if x.im == 0.0 && x.re <= 0.0 {
                return Err(Error::domain(format!("x = {x} lies on the closed negative real axis")));
            }
            if x == C64::new(1.0, 0.0) {
                return Err(Error::domain("x = 1 is excluded"));
            }
        }
        match regime {
            Regime::Operator if nu.re >= 0.0 => {
                return Err(Error::domain(format!("operator use needs Re(ν) < 0, got ν = {nu}")));
            }
            Regime::Representation if nu.re >= 1.0 => {
                return Err(Error::domain(format!("representation needs Re(ν) < 1, got ν = {nu}")));
            }
            _ => {}
        }
        Ok(Self { x, nu, regime })
    }

    /// Operator-level parameters (`Re ν < 0`).
    pub fn operator(x: C64, nu: C64) -> Result<Self> {
        Self::new(x, nu, Regime::Operator)
    }

    pub fn real(x: f64, nu: f64) -> Result<Self> {
        Self::operator(C64::new(x, 0.0), C64::new(nu, 0.0))
    }

    pub fn algebraic(x: C64, nu: C64) -> Result<Self> {
        Self::new(x, nu, Regime::Algebraic)
    }

    pub fn x(&self) -> C64 {
        self.x
    }

    pub fn nu(&self) -> C64 {
        self.nu
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `c = (1 − νx)/(1 − x)`.
    pub fn c(&self) -> C64 {
        (1.0 - self.nu * self.x) / (1.0 - self.x)
    }

    /// `t̂ = ν/(ν − 1)`, the maximiser of `t^{−ν}(1 − t)` for real `ν < 0`.
    pub fn t_hat(&self) -> C64 {
        self.nu / (self.nu - 1.0)
    }

    /// `τ̂ = t̂^{−ν}(1 − t̂)`.
    pub fn tau_hat(&self) -> C64 {
        let t = self.t_hat();
        (-self.nu * t.ln()).exp() * (1.0 - t)
    }

    /// `xν(1 − ν)/(1 − x)`, the scalar in `L = k·δ∘M`.
    pub fn factor_constant(&self) -> C64 {
        self.x * self.nu * (1.0 - self.nu) / (1.0 - self.x)
    }

    pub fn require_operator(&self) -> Result<()> {
        if self.regime == Regime::Algebraic {
            Self::operator(self.x, self.nu)?;
        }
        if self.nu.re >= 0.0 {
            return Err(Error::domain(format!("operator use needs Re(ν) < 0, got ν = {}", self.nu)));
        }
        Ok(())
    }

    pub fn require_representation(&self) -> Result<()> {
        if self.regime == Regime::Algebraic {
            Self::new(self.x, self.nu, Regime::Representation)?;
        }
        if self.nu.re >= 1.0 {
            return Err(Error::domain(format!("representation needs Re(ν) < 1, got ν = {}", self.nu)));
        }
        Ok(())
    }

    /// Real `x ∈ (0, 1)` and real `ν < 0`, as the Volterra branch construction needs.
    pub fn require_real(&self) -> Result<(f64, f64)> {
        if self.x.im != 0.0 || self.nu.im != 0.0 {
            return Err(Error::domain(format!(
                "Volterra form needs real parameters, got x = {}, ν = {}",
                self.x, self.nu
            )));
        }
        let (x, nu) = (self.x.re, self.nu.re);
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::domain(format!("Volterra form needs 0 < x < 1, got {x}")));
        }
        if !(nu < 0.0) {
            return Err(Error::domain(format!("Volterra form needs ν < 0, got {nu}")));
        }
        Ok((x, nu))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_excluded_x() {
        assert!(Params::operator(c(-0.5, 0.0), c(-1.0, 0.0)).is_err());
        assert!(Params::operator(c(0.0, 0.0), c(-1.0, 0.0)).is_err());
        assert!(Params::operator(c(1.0, 0.0), c(-1.0, 0.0)).is_err());
        assert!(Params::operator(c(-0.5, 1e-3), c(-1.0, 0.0)).is_ok());
        assert!(Params::algebraic(c(0.0, 0.0), c(0.0, 0.0)).is_ok());
    }

    #[test]
    fn regimes_gate_nu() {
        assert!(Params::operator(c(0.4, 0.0), c(0.0, 0.0)).is_err());
        assert!(Params::new(c(0.4, 0.0), c(0.5, 0.0), Regime::Representation).is_ok());
        assert!(Params::new(c(0.4, 0.0), c(1.5, 0.0), Regime::Representation).is_err());
    }

    #[test]
    fn derived_constants_for_nu_minus_two() {
        let p = Params::real(0.4, -2.0).unwrap();
        assert!((p.t_hat() - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((p.tau_hat() - c(4.0 / 27.0, 0.0)).norm() < 1e-15);
        assert!((p.c() - c(1.8 / 0.6, 0.0)).norm() < 1e-15);
        assert_eq!(p.require_real().unwrap(), (0.4, -2.0));
    }

    #[test]
    fn volterra_rejects_complex() {
        let p = Params::operator(c(0.4, 0.1), c(-2.0, 0.0)).unwrap();
        assert!(p.require_real().is_err());
    }
}
