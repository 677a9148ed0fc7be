use crate::error::{Error, Result};
use crate::special::gamma::is_nonpositive_integer;
use crate::C64;

const SERIES_MAX_TERMS: usize = 100_000;
const SERIES_WINDOW: usize = 10;

/// `F(−m, β; γ; x)` as the terminating sum `Σ_{j≤m} (−m)_j (β)_j / (γ)_j · x^j / j!`.
///
/// Terms come from the forward ratio recurrence, so nothing overflows for
/// moderate `m` even when the Pochhammer symbols themselves would.
pub fn gauss_f_poly(m: usize, beta: C64, gamma: C64, x: C64) -> Result<C64> {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for j in 0..m {
        let denom = gamma + j as f64;
        if denom == C64::new(0.0, 0.0) {
            return Err(Error::Pole { what: "Pochhammer (γ)_j in hypergeometric polynomial", at: gamma });
        }
        let jf = j as f64;
        term *= (jf - m as f64) * (beta + jf) / (denom * (jf + 1.0)) * x;
        sum += term;
    }
    Ok(sum)
}

/// Gauss series `Σ (α)_j (β)_j / (γ)_j · z^j / j!` for `|z| < 1`.
pub fn gauss_f_series(alpha: C64, beta: C64, gamma: C64, z: C64) -> Result<C64> {
    if z.norm() >= 1.0 {
        return Err(Error::domain(format!("Gauss series needs |z| < 1, got {z}")));
    }
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut quiet = 0;
    for j in 0..SERIES_MAX_TERMS {
        let denom = gamma + j as f64;
        if denom == C64::new(0.0, 0.0) {
            return Err(Error::Pole { what: "Pochhammer (γ)_j in Gauss series", at: gamma });
        }
        let jf = j as f64;
        term *= (alpha + jf) * (beta + jf) / (denom * (jf + 1.0)) * z;
        sum += term;
        if term == C64::new(0.0, 0.0) {
            return Ok(sum);
        }
        if term.norm() <= 1e-17 * sum.norm() {
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

/// `F(α, β; γ; z)`: terminating sum when `α` or `β` is a non-positive
/// integer, otherwise the series (which needs `|z| < 1`).
pub fn gauss_f(alpha: C64, beta: C64, gamma: C64, z: C64) -> Result<C64> {
    if is_nonpositive_integer(alpha) {
        return gauss_f_poly((-alpha.re) as usize, beta, gamma, z);
    }
    if is_nonpositive_integer(beta) {
        return gauss_f_poly((-beta.re) as usize, alpha, gamma, z);
    }
    gauss_f_series(alpha, beta, gamma, z)
}
