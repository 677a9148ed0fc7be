//! The Volterra form of `M` for real `x ∈ (0, 1)`, `ν < 0`.
//!
//! `τ(t) = t^{−ν}(1 − t)` rises from `0` to `τ̂` on `[0, t̂]` and falls back
//! to `0` on `[t̂, 1]`. With `θ∓` the inverses of the two monotone pieces,
//!
//! `M f(z) = ∫₀^{τ̂} [Ψ₋ − Ψ₊](z, τ) f(zτ) dτ`,
//! `Ψ±(z, τ) = e^{−zθ^{−ν}(1 − (1 − x)θ)} / (θ^{−ν}(−ν + (ν − 1)θ))`, `θ = θ±(τ)`.
//!
//! Roots are found in variables that stay well conditioned at both ends:
//! near `t̂` through `t = t̂(1 + δ)`, where
//! `τ/τ̂ = (1 + δ)^{−ν}(1 + νδ)` and `sign(δ)·√(1 − τ/τ̂)` is smooth in `δ`;
//! for small `τ` through `ln τ` and the logarithm of the small one of `t`,
//! `1 − t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::forward_apply;
use crate::params::Params;
use crate::quad::{integrate_unit, QuadratureSpec};
use crate::series::EntireSeries;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `t ∈ [0, t̂]`, increasing in `τ`.
    Minus,
    /// `t ∈ [t̂, 1]`, decreasing in `τ`.
    Plus,
}

/// Above this relative gap `1 − τ/τ̂` the logarithmic formulation is used.
const GAP_SWITCH: f64 = 0.5;
const BISECT_WIDTH: f64 = 1e-3;
const MAX_ITER: usize = 400;

/// A root together with `t − t̂`, which near `t̂` is known far more
/// accurately than the difference of the two.
#[derive(Debug, Clone, Copy)]
struct Root {
    t: f64,
    ln_t: f64,
    t_minus_hat: f64,
}

#[derive(Debug, Clone, Copy)]
struct Shape {
    nu: f64,
    t_hat: f64,
    tau_hat: f64,
}

impl Shape {
    fn new(params: &Params) -> Result<(Self, f64)> {
        let (x, nu) = params.require_real()?;
        let t_hat = nu / (nu - 1.0);
        let tau_hat = (-nu * t_hat.ln()).exp() * (1.0 - t_hat);
        Ok((Self { nu, t_hat, tau_hat }, x))
    }

    /// `sign(δ)·√(1 − τ/τ̂)` at `t = t̂(1 + δ)` and its derivative.
    fn signed_root_gap(&self, delta: f64) -> (f64, f64) {
        let nu = self.nu;
        // φ = ln(τ/τ̂) = δ²·s: the O(δ) parts of the two logarithms cancel
        // exactly, and keeping δ² factored out avoids underflow near the peak
        let s = -nu * log_remainder_ratio(delta) + nu * nu * log_remainder_ratio(nu * delta);
        let phi = delta * delta * s;
        // gap/δ² = −(e^φ − 1)/δ²; φ = −∞ at the endpoint δ = −1
        let gap_over_sq = if phi.abs() < 1.0 { -s * exprel(phi) } else { -phi.exp_m1() / (delta * delta) };
        let scaled = gap_over_sq.max(0.0).sqrt();
        // d gap/dδ = −e^φ φ'(δ),  φ' = ν(1−ν)δ / ((1+δ)(1+νδ))
        let dgap_over_abs_delta = -phi.exp() * nu * (1.0 - nu) / ((1.0 + delta) * (1.0 + nu * delta));
        let deriv = if scaled > 0.0 { dgap_over_abs_delta / (2.0 * scaled) } else { (-nu * (1.0 - nu) / 2.0).sqrt() };
        (delta * scaled, deriv)
    }

    fn solve_near_peak(&self, branch: Branch, gap: f64) -> Result<Root> {
        let u = gap.sqrt();
        let (lo, hi, target) = match branch {
            Branch::Minus => (-1.0, 0.0, -u),
            Branch::Plus => (0.0, -1.0 / self.nu, u),
        };
        let g = |d| self.signed_root_gap(d);
        // close to the peak the signed gap is c₀δ(1 + O(δ)); bracketing the
        // linear estimate keeps Newton steps relative to the root's own size
        let c0 = (-self.nu * (1.0 - self.nu) / 2.0).sqrt();
        let guess = target / c0;
        let near = if guess.abs() < 1e-4 {
            let (a, b) = (0.5 * guess, 1.5 * guess);
            solve_increasing(g, target, a.min(b), a.max(b)).ok()
        } else {
            None
        };
        let delta = match near {
            Some(d) => d,
            None => solve_increasing(g, target, lo, hi)?,
        };
        let t = self.t_hat * (1.0 + delta);
        Ok(Root { t, ln_t: self.t_hat.ln() + delta.ln_1p(), t_minus_hat: self.t_hat * delta })
    }

    fn solve_small_tau(&self, branch: Branch, tau: f64) -> Result<Root> {
        let nu = self.nu;
        let ln_tau = tau.ln();
        match branch {
            Branch::Minus => {
                // −ν y + ln(1 − e^y) = ln τ,  y = ln t
                let g = |y: f64| {
                    let e = y.exp();
                    (-nu * y + (-e).ln_1p(), -nu - e / (1.0 - e))
                };
                // g(y) ≤ −νy puts the root just above ln τ/(−ν), often within
                // rounding of it; the lower end is moved clear
                let y = solve_increasing(g, ln_tau, ln_tau / -nu - 1.0, self.t_hat.ln())?;
                let t = y.exp();
                Ok(Root { t, ln_t: y, t_minus_hat: t - self.t_hat })
            }
            Branch::Plus => {
                // −ν ln(1 − e^y) + y = ln τ,  y = ln(1 − t)
                let g = |y: f64| {
                    let e = y.exp();
                    (-nu * (-e).ln_1p() + y, 1.0 + nu * e / (1.0 - e))
                };
                let y = solve_increasing(g, ln_tau, ln_tau - 1.0, (1.0 - self.t_hat).ln())?;
                let w = y.exp();
                Ok(Root { t: 1.0 - w, ln_t: (-w).ln_1p(), t_minus_hat: (1.0 - self.t_hat) - w })
            }
        }
    }

    /// Root for `τ = τ̂(1 − gap)`; both forms are passed so neither has to
    /// be recovered from the other by subtraction.
    fn solve(&self, branch: Branch, tau: f64, gap: f64) -> Result<Root> {
        if !(0.0..=1.0).contains(&gap) || !(tau >= 0.0) {
            return Err(Error::domain(format!("τ = {tau} outside [0, τ̂ = {}]", self.tau_hat)));
        }
        if tau == 0.0 {
            let t: f64 = if branch == Branch::Minus { 0.0 } else { 1.0 };
            return Ok(Root { t, ln_t: t.ln(), t_minus_hat: t - self.t_hat });
        }
        if gap == 0.0 {
            return Ok(Root { t: self.t_hat, ln_t: self.t_hat.ln(), t_minus_hat: 0.0 });
        }
        if gap > GAP_SWITCH { self.solve_small_tau(branch, tau) } else { self.solve_near_peak(branch, gap) }
    }

    fn psi(&self, x: f64, z: C64, root: Root) -> C64 {
        let nu = self.nu;
        let tn = (-nu * root.ln_t).exp();
        let num = (-z * tn * (1.0 - (1.0 - x) * root.t)).exp();
        num / (tn * (nu - 1.0) * root.t_minus_hat)
    }
}

/// `(ln(1 + a) − a)/a²`, accurate for small `a`.
fn log_remainder_ratio(a: f64) -> f64 {
    if a.abs() > 0.1 {
        return (a.ln_1p() - a) / (a * a);
    }
    // −1/2 + a/3 − a²/4 + …, 0.1^22 is below the f64 resolution
    let mut term = 1.0;
    let mut acc = 0.0;
    for k in 2..=24 {
        acc += term / k as f64;
        term *= -a;
    }
    -acc
}

/// `(e^p − 1)/p`, equal to 1 at `p = 0`.
fn exprel(p: f64) -> f64 {
    if p == 0.0 { 1.0 } else { p.exp_m1() / p }
}

/// Solves `g(v) = target` for increasing `g` on `[lo, hi]`: bisection until
/// the bracket is narrower than `1e−3`, then Newton steps that fall back to
/// bisection whenever they leave the bracket.
fn solve_increasing<G>(g: G, target: f64, mut lo: f64, mut hi: f64) -> Result<f64>
where
    G: Fn(f64) -> (f64, f64),
{
    let f = |v: f64| {
        let (val, d) = g(v);
        (val - target, d)
    };
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::RootSolver(format!(
            "target {target} not bracketed on [{lo}, {hi}] ({flo}, {fhi})"
        )));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    let mut v = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let (fv, dv) = f(v);
        if fv == 0.0 {
            return Ok(v);
        }
        if fv < 0.0 {
            lo = v;
        } else {
            hi = v;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(v);
        }
        let next = if hi - lo > BISECT_WIDTH || !(dv > 0.0) {
            mid
        } else {
            let step = v - fv / dv;
            if step > lo && step < hi { step } else { mid }
        };
        if (next - v).abs() <= 2.0 * f64::EPSILON * v.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        v = next;
    }
    Err(Error::RootSolver(format!("no convergence after {MAX_ITER} iterations (target {target}, bracket [{lo}, {hi}])")))
}

/// `τ(t) = t^{−ν}(1 − t)`.
pub fn tau_of(params: &Params, t: f64) -> Result<f64> {
    let (_, nu) = params.require_real()?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("t = {t} outside [0, 1]")));
    }
    Ok((-nu * t.ln()).exp() * (1.0 - t))
}

/// `θ±(τ)`: the point of the requested branch with `τ(t) = τ`.
pub fn theta(params: &Params, branch: Branch, tau: f64) -> Result<f64> {
    let (shape, _) = Shape::new(params)?;
    if tau > shape.tau_hat {
        return Err(Error::domain(format!("τ = {tau} exceeds τ̂ = {}", shape.tau_hat)));
    }
    let gap = (1.0 - tau / shape.tau_hat).max(0.0);
    shape.solve(branch, tau, gap).map(|r| r.t)
}

/// `Ψ±(z, τ)`; singular at `τ = τ̂` and, on the minus branch, at `τ = 0`.
pub fn kernel_psi(params: &Params, branch: Branch, z: C64, tau: f64) -> Result<C64> {
    let (shape, x) = Shape::new(params)?;
    if tau > shape.tau_hat {
        return Err(Error::domain(format!("τ = {tau} exceeds τ̂ = {}", shape.tau_hat)));
    }
    let gap = 1.0 - tau / shape.tau_hat;
    kernel_at(&shape, x, branch, z, tau, gap)
}

fn kernel_at(shape: &Shape, x: f64, branch: Branch, z: C64, tau: f64, gap: f64) -> Result<C64> {
    if gap <= 0.0 {
        return Err(Error::Pole { what: "Volterra kernel at τ̂", at: C64::new(tau, 0.0) });
    }
    if tau == 0.0 && branch == Branch::Minus {
        return Err(Error::Pole { what: "Volterra kernel Ψ₋ at τ = 0", at: C64::new(0.0, 0.0) });
    }
    Ok(shape.psi(x, z, shape.solve(branch, tau, gap)?))
}

/// `Ψ±` at `τ = τ̂(1 − gap)` with the gap given directly, so the kernel can
/// be sampled arbitrarily close to `τ̂`.
pub fn kernel_psi_at_gap(params: &Params, branch: Branch, z: C64, gap: f64) -> Result<C64> {
    let (shape, x) = Shape::new(params)?;
    kernel_at(&shape, x, branch, z, shape.tau_hat * (1.0 - gap), gap)
}

/// `M f(z) = ∫₀^{τ̂} [Ψ₋ − Ψ₊](z, τ) f(zτ) dτ`, integrated in `u` with
/// `τ = τ̂(1 − u²)`, which absorbs the `(τ̂ − τ)^{−1/2}` singularity.
pub fn apply_m_volterra(params: &Params, f: &EntireSeries, z: C64, quad: &QuadratureSpec) -> Result<C64> {
    let (shape, x) = Shape::new(params)?;
    if z == C64::new(0.0, 0.0) {
        return Ok(C64::new(0.0, 0.0));
    }
    let th = shape.tau_hat;
    let out = integrate_unit(quad, |u, uc| {
        let gap = u * u;
        let tau = th * uc * (1.0 + u);
        let fv = f.eval(z * tau);
        // u² underflows only where the quadrature weight is ~1e−150 or less;
        // the integrand itself stays bounded there
        if fv == C64::new(0.0, 0.0) || gap == 0.0 {
            return Ok(fv);
        }
        let minus = shape.psi(x, z, shape.solve(Branch::Minus, tau, gap)?);
        let plus = shape.psi(x, z, shape.solve(Branch::Plus, tau, gap)?);
        Ok((minus - plus) * fv * 2.0 * th * u)
    })?;
    Ok(out.value)
}

/// How many extra orders of `L E*` to keep beyond the order of `E*`; the
/// image series does not terminate.
const IMAGE_EXTRA_ORDERS: usize = 40;

/// `max_z |M E*(z) − K₁(z)|` where `K = L E*` comes from the triangular
/// system and `K₁ = ((1−x)/(xν(1−ν))) ∫₀^z K(ζ)/ζ dζ`.
pub fn solve_volterra_check(
    params: &Params,
    e_star: &EntireSeries,
    z_samples: &[C64],
    quad: &QuadratureSpec,
) -> Result<f64> {
    Shape::new(params)?;
    let k = forward_apply(params, e_star, e_star.order() + IMAGE_EXTRA_ORDERS)?;
    let k1 = k.to_entire().delta_antiderivative().scale(1.0 / params.factor_constant());
    let mut worst: f64 = 0.0;
    for &z in z_samples {
        let lhs = apply_m_volterra(params, e_star, z, quad)?;
        worst = worst.max((lhs - k1.eval(z)).norm());
    }
    Ok(worst)
}

/// Which part of the kernel a slope is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelPart {
    Minus,
    Plus,
    Difference,
}

/// `n` points spaced evenly in `log` between `lo` and `hi`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|j| (a + (b - a) * j as f64 / (n - 1).max(1) as f64).exp()).collect()
}

/// Least-squares slope of `ln|Ψ|` against `ln(τ̂ − τ)` over the given
/// relative gaps `1 − τ/τ̂`.
pub fn singularity_slope(params: &Params, z: C64, part: KernelPart, gaps: &[f64]) -> Result<f64> {
    let (shape, x) = Shape::new(params)?;
    let mut xs = Vec::with_capacity(gaps.len());
    let mut ys = Vec::with_capacity(gaps.len());
    for &gap in gaps {
        let tau = shape.tau_hat * (1.0 - gap);
        let m = || kernel_at(&shape, x, Branch::Minus, z, tau, gap);
        let p = || kernel_at(&shape, x, Branch::Plus, z, tau, gap);
        let v = match part {
            KernelPart::Minus => m()?,
            KernelPart::Plus => p()?,
            KernelPart::Difference => m()? - p()?,
        };
        xs.push((shape.tau_hat * gap).ln());
        ys.push(v.norm().ln());
    }
    Ok(linear_slope(&xs, &ys))
}

fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
