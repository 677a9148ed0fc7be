use std::f64::consts::TAU;

use crate::contour::{BranchTracker, ContourPath};
use crate::error::{Error, Result};
use crate::quad::QuadratureSpec;
use crate::special::gamma::{is_nonpositive_integer, GammaRatio};
use crate::C64;

const SERIES_MAX_TERMS: usize = 100_000;
const SERIES_WINDOW: usize = 10;

/// Kummer series `Σ (α)_j / (β)_j · z^j / j!`.
pub fn confluent_phi_series(alpha: C64, beta: C64, z: C64) -> Result<C64> {
    if is_nonpositive_integer(beta) {
        return Err(Error::Pole { what: "confluent Φ lower parameter", at: beta });
    }
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut quiet = 0;
    for j in 0..SERIES_MAX_TERMS {
        let jf = j as f64;
        term *= (alpha + jf) / ((beta + jf) * (jf + 1.0)) * z;
        sum += term;
        if term == C64::new(0.0, 0.0) {
            return Ok(sum);
        }
        if term.norm() < 1e-16 * sum.norm() {
            quiet += 1;
            if quiet >= SERIES_WINDOW {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence { terms: SERIES_MAX_TERMS })
}

/// `Φ(α; β; z)` from its loop integral over the circle through `t = 1`
/// winding once around the origin, with default quadrature settings.
pub fn confluent_phi_contour(alpha: C64, beta: C64, z: C64, c0: f64) -> Result<C64> {
    let quad = QuadratureSpec::default().with_tolerances(1e-15, 1e-14);
    confluent_phi_contour_with(alpha, beta, z, c0, &quad)
}

/// As [`confluent_phi_contour`] with an explicit quadrature rule.
///
/// The loop needs `Re(β − α) > 0` (integrable at `t = 1`) and `α ∉ ℕ⁺`
/// (finite `Γ(1 − α)`). Kummer's transformation `Φ(α; β; z) = e^z Φ(β − α;
/// β; −z)` trades the endpoint exponent `Re(β − α)` for `Re α`; whichever
/// admissible form has the larger one is tried first, the other as fallback.
pub fn confluent_phi_contour_with(
    alpha: C64,
    beta: C64,
    z: C64,
    c0: f64,
    quad: &QuadratureSpec,
) -> Result<C64> {
    if is_nonpositive_integer(beta) {
        return Err(Error::Pole { what: "confluent Φ lower parameter", at: beta });
    }
    let direct = || loop_integral(alpha, beta, z, c0, quad);
    let kummer = || Ok(z.exp() * loop_integral(beta - alpha, beta, -z, c0, quad)?);
    let mut forms: Vec<(f64, &dyn Fn() -> Result<C64>)> = Vec::new();
    if loop_admissible(alpha, beta) {
        forms.push(((beta - alpha).re, &direct));
    }
    if loop_admissible(beta - alpha, beta) {
        forms.push((alpha.re, &kummer));
    }
    forms.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut first_err = None;
    for (_, form) in forms {
        match form() {
            Ok(v) => return Ok(v),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.unwrap_or_else(|| {
        Error::domain(format!(
            "no loop representation for Φ({alpha}; {beta}; ·): need Re(β−α) > 0 and α ∉ ℕ⁺, directly or after Kummer's transformation"
        ))
    }))
}

fn is_positive_integer(a: C64) -> bool {
    a.im == 0.0 && a.re >= 1.0 && a.re == a.re.round()
}

fn loop_admissible(alpha: C64, beta: C64) -> bool {
    (beta - alpha).re > 0.0 && !is_positive_integer(alpha)
}

fn loop_integral(alpha: C64, beta: C64, z: C64, c0: f64, quad: &QuadratureSpec) -> Result<C64> {
    let path = ContourPath::loop_around_zero(c0)?;
    let prefactor = -GammaRatio::new(vec![1.0 - alpha, beta], vec![beta - alpha]).eval()?
        / C64::new(0.0, TAU);
    let neg_t = BranchTracker::new(|s, sc| -path.point(s, sc).t)?;
    let one_minus_t = BranchTracker::new(|s, sc| path.point(s, sc).one_minus_t)?;
    let a1 = alpha - 1.0;
    let b1 = beta - alpha - 1.0;
    let out = path.integrate(quad, |p, s| {
        let ln_neg_t = neg_t.ln(s, -p.t);
        let ln_omt = one_minus_t.ln(s, p.one_minus_t);
        let v = (z * p.t + a1 * ln_neg_t + b1 * ln_omt).exp();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { at: s })
        }
    })?;
    Ok(prefactor * out.value)
}
