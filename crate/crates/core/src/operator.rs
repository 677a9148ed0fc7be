//! The forward operators `L` and `M` by quadrature over `[0, 1]`, and the
//! factorisation `L = k·δ∘M` with `k = xν(1 − ν)/(1 − x)`.

use crate::error::{Error, Result};
use crate::params::Params;
use crate::quad::{integrate_unit, EndpointPolicy, QuadOutcome, QuadratureSpec};
use crate::series::EntireSeries;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// `ℜ(ζ)` from `ζ` and `1 − ζ`; the complement keeps `(1 − ζ)^{−ν}`
/// accurate next to `ζ = 1`.
pub(crate) fn r_split(params: &Params, zeta: f64, one_minus_zeta: f64) -> Result<C64> {
    let (x, nu) = (params.x(), params.nu());
    let tail = if one_minus_zeta == 0.0 {
        if nu.re < 0.0 {
            return Ok(ZERO);
        }
        return Err(Error::domain("ℜ(1) is undefined unless Re(ν) < 0"));
    } else {
        (-nu * one_minus_zeta.ln()).exp()
    };
    let base = 1.0 - (1.0 - x) * zeta;
    Ok(x * tail * ((nu - 1.0) * base.ln()).exp())
}

/// `ℜ(ζ) = x(1 − ζ)^{−ν}(1 − (1 − x)ζ)^{ν−1}` for `ζ ∈ [0, 1]`.
pub fn r_eval(params: &Params, zeta: f64) -> Result<C64> {
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::domain(format!("ζ = {zeta} outside [0, 1]")));
    }
    r_split(params, zeta, 1.0 - zeta)
}

/// `L f(z)` with quadrature diagnostics.
pub fn apply_l_outcome(
    params: &Params,
    f: &EntireSeries,
    z: C64,
    quad: &QuadratureSpec,
) -> Result<QuadOutcome> {
    params.require_operator()?;
    if z == ZERO {
        return Ok(QuadOutcome { value: ZERO, error_estimate: 0.0, evaluations: 0, panels: 0 });
    }
    let c = params.c();
    integrate_unit(quad, |zeta, zc| {
        let r = r_split(params, zeta, zc)?;
        let rz = r * z;
        let (fv, fd) = f.eval_with_derivative(rz * zeta);
        Ok(((1.0 + rz) * fv - c * rz * fd) * (-rz).exp())
    })
}

/// `L f(z) = ∫₀¹ [(1 + zℜ) f(ζℜz) − c zℜ f'(ζℜz)] e^{−ℜz} dζ`.
pub fn apply_l(params: &Params, f: &EntireSeries, z: C64, quad: &QuadratureSpec) -> Result<C64> {
    apply_l_outcome(params, f, z, quad).map(|o| o.value)
}

/// `M f(z)` with quadrature diagnostics.
pub fn apply_m_outcome(
    params: &Params,
    f: &EntireSeries,
    z: C64,
    quad: &QuadratureSpec,
) -> Result<QuadOutcome> {
    params.require_operator()?;
    if quad.endpoint_policy != EndpointPolicy::OpenInterval {
        return Err(Error::Config("M needs an open-interval rule: the integrand is singular-looking at t = 0".into()));
    }
    if z == ZERO {
        return Ok(QuadOutcome { value: ZERO, error_estimate: 0.0, evaluations: 0, panels: 0 });
    }
    let (x, nu) = (params.x(), params.nu());
    integrate_unit(quad, |t, tc| {
        let tn = (-nu * t.ln()).exp();
        let expo = (-z * tn * (tc + x * t)).exp();
        Ok(expo * f.eval(z * tn * tc) / t)
    })
}

/// `M f(z) = ∫₀¹ e^{−z t^{−ν}(1 − (1 − x)t)} f(z t^{−ν}(1 − t)) dt/t`.
pub fn apply_m(params: &Params, f: &EntireSeries, z: C64, quad: &QuadratureSpec) -> Result<C64> {
    apply_m_outcome(params, f, z, quad).map(|o| o.value)
}

/// Central-difference step used for `z·d/dz`.
pub fn derivative_step(z: C64) -> f64 {
    1e-5 * z.norm().max(1.0)
}

/// `k · z · (M f)'(z)` by central differences, `k = xν(1 − ν)/(1 − x)`.
pub fn factored_l(params: &Params, f: &EntireSeries, z: C64, quad: &QuadratureSpec) -> Result<C64> {
    let h = derivative_step(z);
    let plus = apply_m(params, f, z + h, quad)?;
    let minus = apply_m(params, f, z - h, quad)?;
    Ok(params.factor_constant() * z * (plus - minus) / (2.0 * h))
}

/// `max |L f(z) − k·z·(M f)'(z)|` over the samples.
pub fn factorization_check(
    params: &Params,
    f: &EntireSeries,
    z_samples: &[C64],
    quad: &QuadratureSpec,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &z in z_samples {
        let direct = apply_l(params, f, z, quad)?;
        let factored = factored_l(params, f, z, quad)?;
        worst = worst.max((direct - factored).norm());
    }
    Ok(worst)
}

/// `max_{ζ ∈ [0,1]} |z ζ ℜ(ζ)|`, the largest argument at which `L f(z)`
/// samples `f`, estimated on a dense grid with a 5 % margin.
pub fn max_series_argument(params: &Params, z: C64) -> Result<f64> {
    const GRID: usize = 2000;
    let mut worst: f64 = 0.0;
    for j in 0..=GRID {
        let zeta = j as f64 / GRID as f64;
        worst = worst.max(zeta * r_split(params, zeta, 1.0 - zeta)?.norm());
    }
    Ok(1.05 * worst * z.norm())
}

/// `|E_N| (max|arg|)^N / N!` for `L f(z)`; callers want this below
/// `0.1 · abs_tol`.
pub fn truncation_bound(params: &Params, f: &EntireSeries, z: C64) -> Result<f64> {
    Ok(f.truncation_bound(max_series_argument(params, z)?))
}

/// `(ℓ + 1 − b) M_{b,ℓ} − ℓ c M_{b,ℓ−1}` with `M_{b,ℓ} = ∫₀¹ ζ^ℓ ℜ(ζ)^b dζ`:
/// the entry `Q_{b,ℓ}` straight from its defining moments.
pub fn q_entry_quadrature(params: &Params, b: usize, l: usize, quad: &QuadratureSpec) -> Result<C64> {
    let moment = |power: usize| -> Result<C64> {
        Ok(integrate_unit(quad, |zeta, zc| Ok(zeta.powi(power as i32) * r_split(params, zeta, zc)?.powu(b as u32)))?
            .value)
    };
    let first = moment(l)? * (l as f64 + 1.0 - b as f64);
    let second = moment(l - 1)? * params.c() * l as f64;
    Ok(first - second)
}
