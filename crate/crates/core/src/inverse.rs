//! `L⁻¹` by four independent routes — the triangular series solve and
//! three contour integrals — and `M⁻¹` by composition.
//!
//! Contour routes take `K` as any [`H0Function`]: a truncated series or an
//! opaque evaluator such as a quadrature of the forward operator.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::contour::{BranchTracker, ContourPath};
use crate::error::{Error, Result};
use crate::matrix::solve_system;
use crate::params::Params;
use crate::quad::QuadratureSpec;
use crate::series::{EntireSeries, H0Function, SignedSeries};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Value of a contour inverse plus what was learned on the way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseOutcome {
    #[serde(with = "crate::series::pairs::one")]
    pub value: C64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// Largest `|w|` at which `K(w)` was sampled.
    pub max_argument: f64,
    /// Size of the last retained term of `K` at `max_argument`, when `K` is
    /// a truncated series. Large values mean the truncation is unreliable
    /// along this path.
    pub series_tail: Option<f64>,
    /// Net argument change of each tracked power base along the path.
    pub branch_changes: Vec<f64>,
    /// Truncation height of the vertical line, if any.
    pub line_cutoff: Option<f64>,
}

impl InverseOutcome {
    fn zero() -> Self {
        Self {
            value: ZERO,
            error_estimate: 0.0,
            evaluations: 0,
            max_argument: 0.0,
            series_tail: None,
            branch_changes: Vec::new(),
            line_cutoff: None,
        }
    }
}

/// Which representation to invert with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "route")]
pub enum InverseRoute {
    Series,
    Loop0 { c0: f64 },
    Loop1 { c0: f64 },
    Line { c0: f64 },
}

impl InverseRoute {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Series => "series",
            Self::Loop0 { .. } => "loop0",
            Self::Loop1 { .. } => "loop1",
            Self::Line { .. } => "line",
        }
    }
}

fn finite_or(v: C64, at: f64) -> Result<C64> {
    if v.re.is_finite() && v.im.is_finite() { Ok(v) } else { Err(Error::NonFiniteIntegrand { at }) }
}

/// `((1−x)/(2πix)) e^z ∮ e^{−xtz}/(t(t−1)) K(z(−t)^ν(1−t)^{1−ν}) dt` over the
/// circle through `t = 1` of centre `1 − 1/(2c0)`, positively around `0`.
pub fn invert_l_loop0<K: H0Function>(
    params: &Params,
    k: &K,
    z: C64,
    c0: f64,
    quad: &QuadratureSpec,
) -> Result<InverseOutcome> {
    params.require_representation()?;
    let path = ContourPath::loop_around_zero(c0)?;
    if z == ZERO {
        return Ok(InverseOutcome::zero());
    }
    let (x, nu) = (params.x(), params.nu());
    let neg_t = BranchTracker::new(|s, sc| -path.point(s, sc).t)?;
    let omt = BranchTracker::new(|s, sc| path.point(s, sc).one_minus_t)?;
    let mut max_w: f64 = 0.0;
    let out = path.integrate(quad, |p, s| {
        let lw = nu * neg_t.ln(s, -p.t) + (1.0 - nu) * omt.ln(s, p.one_minus_t);
        let w = z * lw.exp();
        max_w = max_w.max(w.norm());
        let v = ((-x * p.t * z).exp() * k.value(w)?).fdiv(p.t * -p.one_minus_t);
        finite_or(v, s)
    })?;
    let pre = (1.0 - x) / (2.0 * PI * I * x) * z.exp();
    Ok(InverseOutcome {
        value: pre * out.value,
        error_estimate: pre.norm() * out.error_estimate,
        evaluations: out.evaluations,
        max_argument: max_w,
        series_tail: k.tail_bound(max_w),
        branch_changes: vec![neg_t.total_change(), omt.total_change()],
        line_cutoff: None,
    })
}

/// `((1−x)/(2πix)) e^{(1−x)z} ∮ e^{xtz}/(t(1−t)) K(z t^{1−ν}(t−1)^ν) dt` over
/// the circle through `t = 0` of centre `1/(2c0)`, positively around `1`.
pub fn invert_l_loop1<K: H0Function>(
    params: &Params,
    k: &K,
    z: C64,
    c0: f64,
    quad: &QuadratureSpec,
) -> Result<InverseOutcome> {
    params.require_operator()?;
    let path = ContourPath::loop_around_one(c0)?;
    if z == ZERO {
        return Ok(InverseOutcome::zero());
    }
    let (x, nu) = (params.x(), params.nu());
    let t_track = BranchTracker::new(|s, sc| path.point(s, sc).t)?;
    let tm1 = BranchTracker::new(|s, sc| -path.point(s, sc).one_minus_t)?;
    let mut max_w: f64 = 0.0;
    let out = path.integrate(quad, |p, s| {
        let lw = (1.0 - nu) * t_track.ln(s, p.t) + nu * tm1.ln(s, -p.one_minus_t);
        let w = z * lw.exp();
        max_w = max_w.max(w.norm());
        let v = ((x * p.t * z).exp() * k.value(w)?).fdiv(p.t * p.one_minus_t);
        finite_or(v, s)
    })?;
    let pre = (1.0 - x) / (2.0 * PI * I * x) * ((1.0 - x) * z).exp();
    Ok(InverseOutcome {
        value: pre * out.value,
        error_estimate: pre.norm() * out.error_estimate,
        evaluations: out.evaluations,
        max_argument: max_w,
        series_tail: k.tail_bound(max_w),
        branch_changes: vec![t_track.total_change(), tm1.total_change()],
        line_cutoff: None,
    })
}

/// Estimate of `|K'(0)|` for the line's tail bound.
fn linear_size<K: H0Function>(k: &K) -> Result<f64> {
    if let Some(c) = k.linear_coefficient() {
        return Ok(c.norm());
    }
    let h = 1e-4;
    let a = k.value(C64::new(h, 0.0))?.norm();
    let b = k.value(C64::new(0.0, h))?.norm();
    Ok(2.0 * a.max(b) / h)
}

/// `((1−x)/(2πix)) e^{(1−x)z} ∫ e^{xz/r}/(1−r) K(z(1−r)^ν/r) dr` along
/// `Re r = c0`.
///
/// The line is the image of the loop around `0` under `r = 1/(1 − t)`, and
/// that map sends the positively oriented loop to the line run *downwards*,
/// from `c0 + i∞` to `c0 − i∞`. The path is sampled upwards, so the result
/// carries a minus sign; integrating upwards without it yields `−L⁻¹K`.
///
/// The integrand decays like `|r|^{Re ν − 2}`; the line is cut at
/// `|Im r| = T` where the discarded tail is below `0.1·abs_tol`.
pub fn invert_l_line<K: H0Function>(
    params: &Params,
    k: &K,
    z: C64,
    c0: f64,
    quad: &QuadratureSpec,
) -> Result<InverseOutcome> {
    params.require_representation()?;
    let (x, nu) = (params.x(), params.nu());
    if nu.re >= 0.0 {
        return Err(Error::domain(format!(
            "vertical-line tail does not decay for Re(ν) ≥ 0 (ν = {nu})"
        )));
    }
    let path = ContourPath::vertical_line(c0)?;
    if z == ZERO {
        return Ok(InverseOutcome::zero());
    }
    // minus sign: downward orientation, see above
    let pre = -(1.0 - x) / (2.0 * PI * I * x) * ((1.0 - x) * z).exp();
    // |integrand| ≲ C |y|^{Re ν − 2} for large |y|
    let decay = 1.0 - nu.re;
    let big_c = 2.0 * pre.norm() * linear_size(k)? * z.norm() * (nu.im.abs() * PI / 2.0).exp();
    let cutoff = if big_c == 0.0 {
        f64::INFINITY
    } else {
        (2.0 * big_c / (decay * 0.1 * quad.abs_tol)).powf(1.0 / decay).max(1.0)
    };
    let omr = BranchTracker::new(|s, sc| path.point(s, sc).one_minus_t)?;
    let mut max_w: f64 = 0.0;
    let out = path.integrate(quad, |p, s| {
        if p.t.im.abs() > cutoff {
            return Ok(ZERO);
        }
        let r = p.t;
        let w = z * (nu * omr.ln(s, p.one_minus_t)).exp() / r;
        max_w = max_w.max(w.norm());
        let v = (x * z / r).exp() / p.one_minus_t * k.value(w)?;
        finite_or(v, s)
    })?;
    Ok(InverseOutcome {
        value: pre * out.value,
        error_estimate: pre.norm() * out.error_estimate,
        evaluations: out.evaluations,
        max_argument: max_w,
        series_tail: k.tail_bound(max_w),
        branch_changes: vec![omr.total_change()],
        line_cutoff: Some(cutoff),
    })
}

/// Series route: solves the triangular system for the first `n`
/// coefficients of `L⁻¹K`.
pub fn invert_l_series(params: &Params, k: &SignedSeries, n: usize) -> Result<EntireSeries> {
    params.require_operator()?;
    solve_system(params, &k.resized(n))
}

/// `L⁻¹K(z)` for a series `K` by the chosen route.
pub fn invert_l_entire(
    params: &Params,
    k: &EntireSeries,
    z: C64,
    route: InverseRoute,
    quad: &QuadratureSpec,
) -> Result<C64> {
    match route {
        InverseRoute::Series => Ok(invert_l_series(params, &k.to_signed(), k.order())?.eval(z)),
        InverseRoute::Loop0 { c0 } => invert_l_loop0(params, k, z, c0, quad).map(|o| o.value),
        InverseRoute::Loop1 { c0 } => invert_l_loop1(params, k, z, c0, quad).map(|o| o.value),
        InverseRoute::Line { c0 } => invert_l_line(params, k, z, c0, quad).map(|o| o.value),
    }
}

/// `M⁻¹g(z) = (xν(1−ν)/(1−x)) · L⁻¹(z g')(z)`, with `z g'` formed exactly on
/// the coefficients.
pub fn invert_m(
    params: &Params,
    g: &EntireSeries,
    z: C64,
    route: InverseRoute,
    quad: &QuadratureSpec,
) -> Result<C64> {
    params.require_operator()?;
    let zg = g.delta_op();
    Ok(params.factor_constant() * invert_l_entire(params, &zg, z, route, quad)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::FnH0;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_inputs_give_zero() {
        let p = Params::real(0.4, -2.0).unwrap();
        let q = QuadratureSpec::default();
        let zero_k = EntireSeries::zeros(4);
        let k = EntireSeries::identity(3);
        let z = c(0.3, 0.2);
        for route in [
            InverseRoute::Series,
            InverseRoute::Loop0 { c0: 0.5 },
            InverseRoute::Loop1 { c0: 0.5 },
            InverseRoute::Line { c0: 0.5 },
        ] {
            assert_eq!(invert_l_entire(&p, &zero_k, z, route, &q).unwrap(), ZERO, "{}", route.name());
            assert_eq!(invert_l_entire(&p, &k, ZERO, route, &q).unwrap(), ZERO, "{}", route.name());
            assert_eq!(invert_m(&p, &zero_k, z, route, &q).unwrap(), ZERO);
        }
    }

    #[test]
    fn line_rejects_nonnegative_nu() {
        let p = Params::new(c(0.4, 0.0), c(0.3, 0.0), crate::Regime::Representation).unwrap();
        let k = FnH0(|w: C64| Ok(w));
        assert!(invert_l_line(&p, &k, c(0.3, 0.0), 0.5, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn loop_branch_changes() {
        let p = Params::real(0.4, -2.0).unwrap();
        let k = EntireSeries::identity(2);
        let out = invert_l_loop0(&p, &k, c(0.3, 0.0), 0.5, &QuadratureSpec::default()).unwrap();
        assert!((out.branch_changes[0] - 2.0 * PI).abs() < 1e-6);
        assert!((out.branch_changes[1] - PI).abs() < 1e-6);
    }
}
