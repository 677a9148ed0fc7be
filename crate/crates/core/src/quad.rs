//! Quadrature on the unit interval.
//!
//! Integrands receive both the node `t` and its complement `1 − t`, each
//! computed without cancellation, so algebraic endpoint factors such as
//! `(1 − t)^{−ν}` stay accurate arbitrarily close to `t = 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadRule {
    GaussLegendreAdaptive,
    TanhSinh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointPolicy {
    /// Integrand is never sampled at an endpoint.
    OpenInterval,
    /// Endpoint samples are allowed; used only for rules that need them.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadRule,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    pub endpoint_policy: EndpointPolicy,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rule: QuadRule::TanhSinh,
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_panels: 2048,
            endpoint_policy: EndpointPolicy::OpenInterval,
        }
    }
}

impl QuadratureSpec {
    pub fn gauss_legendre() -> Self {
        Self { rule: QuadRule::GaussLegendreAdaptive, max_panels: 4000, ..Self::default() }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if self.max_panels < 4 {
            return Err(Error::Config("max_panels must be at least 4".into()));
        }
        Ok(())
    }

    fn target(&self, value: C64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

/// Value plus diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadOutcome {
    #[serde(with = "crate::series::pairs::one")]
    pub value: C64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// Panels for Gauss–Kronrod; refinement levels for tanh-sinh.
    pub panels: usize,
}

/// Integrates `f(t, 1 − t)` over `(0, 1)`.
pub fn integrate_unit<F>(spec: &QuadratureSpec, f: F) -> Result<QuadOutcome>
where
    F: FnMut(f64, f64) -> Result<C64>,
{
    spec.validate()?;
    match spec.rule {
        QuadRule::TanhSinh => tanh_sinh(spec, f),
        QuadRule::GaussLegendreAdaptive => gauss_kronrod(spec, f),
    }
}

/// Integrates `f(t)` over `(a, b)` by rescaling onto the unit interval.
pub fn integrate_interval<F>(spec: &QuadratureSpec, a: f64, b: f64, mut f: F) -> Result<QuadOutcome>
where
    F: FnMut(f64) -> Result<C64>,
{
    let width = b - a;
    let mut out = integrate_unit(spec, |s, sc| {
        let t = if s <= 0.5 { a + width * s } else { b - width * sc };
        f(t)
    })?;
    out.value *= width;
    out.error_estimate *= width.abs();
    Ok(out)
}

/// Deterministic pairwise reduction.
pub fn pairwise_sum(values: &[C64]) -> C64 {
    match values.len() {
        0 => C64::new(0.0, 0.0),
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

const TS_THETA_MAX: f64 = 6.0;
const TS_MIN_LEVEL: usize = 3;

/// Node `(t, 1 − t, weight density)` at abscissa `θ` of the tanh-sinh map
/// `t = 1/(1 + e^{−π sinh θ})`.
fn ts_node(theta: f64) -> (f64, f64, f64) {
    let u = PI * theta.sinh();
    let (t, tc) = if u >= 0.0 {
        let e = (-u).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = u.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    };
    (t, tc, PI * theta.cosh() * t * tc)
}

fn tanh_sinh<F>(spec: &QuadratureSpec, mut f: F) -> Result<QuadOutcome>
where
    F: FnMut(f64, f64) -> Result<C64>,
{
    let max_level = (spec.max_panels as f64).log2().ceil().max(TS_MIN_LEVEL as f64) as usize;
    let mut evaluations = 0usize;
    let mut contributions = Vec::new();

    let mut eval_at = |theta: f64, out: &mut Vec<C64>| -> Result<()> {
        let (t, tc, w) = ts_node(theta);
        if t <= 0.0 || tc <= 0.0 || w == 0.0 {
            return Ok(());
        }
        let v = f(t, tc)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteIntegrand { at: t });
        }
        out.push(v * w);
        Ok(())
    };

    // level 0: integer abscissae
    let kmax = TS_THETA_MAX as i64;
    for k in -kmax..=kmax {
        eval_at(k as f64, &mut contributions)?;
    }
    evaluations += contributions.len();
    let mut sum = pairwise_sum(&contributions);
    let mut estimate = sum;
    let mut last_delta = f64::INFINITY;

    for level in 1..=max_level {
        let h = 0.5f64.powi(level as i32);
        contributions.clear();
        let count = (TS_THETA_MAX / h) as i64;
        let mut k = -count + if count % 2 == 0 { 1 } else { 0 };
        while k <= count {
            eval_at(k as f64 * h, &mut contributions)?;
            k += 2;
        }
        evaluations += contributions.len();
        sum += pairwise_sum(&contributions);
        let next = sum * h;
        last_delta = (next - estimate).norm();
        estimate = next;
        if level >= TS_MIN_LEVEL && last_delta <= spec.target(estimate) {
            return Ok(QuadOutcome {
                value: estimate,
                error_estimate: last_delta,
                evaluations,
                panels: level,
            });
        }
    }
    Err(Error::QuadratureBudget { evaluations, estimate: last_delta })
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

fn gk15<F>(f: &mut F, a: f64, b: f64, evaluations: &mut usize) -> Result<Panel>
where
    F: FnMut(f64, f64) -> Result<C64>,
{
    let half = 0.5 * (b - a);
    let centre = a + half;
    let tail = 1.0 - b;
    let mut sample = |x: f64| -> Result<C64> {
        let t = centre + half * x;
        let tc = tail + half * (1.0 - x);
        let v = f(t, tc)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteIntegrand { at: t });
        }
        Ok(v)
    };
    let fc = sample(0.0)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let f1 = sample(-XGK[j])?;
        let f2 = sample(XGK[j])?;
        kronrod += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    *evaluations += 15;
    Ok(Panel { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).norm() })
}

fn gauss_kronrod<F>(spec: &QuadratureSpec, mut f: F) -> Result<QuadOutcome>
where
    F: FnMut(f64, f64) -> Result<C64>,
{
    let mut evaluations = 0;
    // Start from four panels so endpoint behaviour is isolated early.
    let mut panels = Vec::with_capacity(spec.max_panels);
    for i in 0..4 {
        panels.push(gk15(&mut f, i as f64 / 4.0, (i + 1) as f64 / 4.0, &mut evaluations)?);
    }
    loop {
        let values: Vec<C64> = panels.iter().map(|p| p.value).collect();
        let total = pairwise_sum(&values);
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= spec.target(total) {
            return Ok(QuadOutcome { value: total, error_estimate: error, evaluations, panels: panels.len() });
        }
        if panels.len() + 1 > spec.max_panels {
            return Err(Error::QuadratureBudget { evaluations, estimate: error });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("non-empty panel list");
        let p = panels.remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::QuadratureBudget { evaluations, estimate: error });
        }
        let left = gk15(&mut f, p.a, mid, &mut evaluations)?;
        let right = gk15(&mut f, mid, p.b, &mut evaluations)?;
        panels.insert(worst, right);
        panels.insert(worst, left);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(spec: &QuadratureSpec, f: impl Fn(f64, f64) -> f64) -> f64 {
        integrate_unit(spec, |t, tc| Ok(C64::new(f(t, tc), 0.0))).unwrap().value.re
    }

    #[test]
    fn polynomial_and_smooth_integrands() {
        for spec in [QuadratureSpec::default(), QuadratureSpec::gauss_legendre()] {
            assert!((real(&spec, |t, _| t * t) - 1.0 / 3.0).abs() < 1e-14);
            assert!((real(&spec, |t, _| (3.0 * t).cos()) - 3f64.sin() / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn algebraic_endpoint_singularities() {
        let spec = QuadratureSpec::default();
        // ∫ t^{-1/2} (1-t)^{-1/3} = B(1/2, 2/3)
        let beta = 2.58710955922979;
        let got = real(&spec, |t, tc| t.powf(-0.5) * tc.powf(-1.0 / 3.0));
        assert!((got - beta).abs() < 1e-12, "{got}");
        // Gauss–Kronrod gets there too, just slower
        let gl = QuadratureSpec { max_panels: 20000, ..QuadratureSpec::gauss_legendre() }
            .with_tolerances(1e-10, 1e-10);
        let got = real(&gl, |t, _| t.powf(-0.5));
        assert!((got - 2.0).abs() < 1e-9, "{got}");
    }

    #[test]
    fn complement_is_accurate_near_one() {
        let (t, tc, _) = ts_node(5.0);
        assert!(tc > 0.0 && tc < 1e-100);
        let (t2, tc2, _) = ts_node(-5.0);
        assert_eq!(t2, tc);
        assert_eq!(tc2, t);
    }

    #[test]
    fn interval_rescaling() {
        let spec = QuadratureSpec::default();
        let out = integrate_interval(&spec, 1.0, 3.0, |t| Ok(C64::new(t, 0.0))).unwrap();
        assert!((out.value.re - 4.0).abs() < 1e-13);
    }

    #[test]
    fn budget_and_validation_errors() {
        let spec = QuadratureSpec { max_panels: 2, ..Default::default() };
        assert!(matches!(spec.validate(), Err(Error::Config(_))));
        let tight = QuadratureSpec { max_panels: 8, ..QuadratureSpec::gauss_legendre() };
        let r = integrate_unit(&tight, |t, _| Ok(C64::new((40.0 * t).sin() / t.sqrt(), 0.0)));
        assert!(matches!(r, Err(Error::QuadratureBudget { .. })));
    }

    #[test]
    fn pairwise_sum_is_order_stable() {
        let v: Vec<C64> = (0..1000).map(|k| C64::new(1.0 / (k as f64 + 1.0), 0.0)).collect();
        assert_eq!(pairwise_sum(&v), pairwise_sum(&v.clone()));
    }
}
