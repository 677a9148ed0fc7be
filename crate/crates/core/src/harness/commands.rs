use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::contour::ContourPath;
use crate::error::Result;
use crate::harness::config::RunConfig;
use crate::harness::report::{CheckRecord, Report, SampleResidual};
use crate::inverse::{invert_l_line, invert_l_loop0, invert_l_loop1, invert_m, InverseRoute};
use crate::matrix::{build_a, build_b, forward_apply, solve_system};
use crate::operator::{apply_l, apply_m, factored_l};
use crate::params::{Params, Regime};
use crate::series::{sample_coefficients, EntireSeries, FnH0};
use crate::special::confluent_phi_series;
use crate::volterra::{
    apply_m_volterra, log_spaced, singularity_slope, solve_volterra_check, tau_of, theta, Branch, KernelPart,
};
use crate::C64;

const PAIR_TOL: f64 = 1e-10;
const ROUNDTRIP_TOL: f64 = 1e-6;
const AGREEMENT_TOL: f64 = 1e-7;
const COEFFICIENT_TOL: f64 = 1e-7;
const LOOP_INDEPENDENCE_TOL: f64 = 1e-9;
const LINE_INDEPENDENCE_TOL: f64 = 1e-8;
const BRANCH_TOL: f64 = 1e-6;
const FACTORIZATION_TOL: f64 = 1e-6;
const VOLTERRA_TOL: f64 = 1e-6;
const SLOPE_TOL: f64 = 0.02;
const THETA_TOL: f64 = 1e-12;
const REMARK_TOL: f64 = 1e-7;

/// Circle used to read exponential coefficients off sampled functions.
const SAMPLING_RADIUS: f64 = 0.5;
const SAMPLING_POINTS: usize = 64;
/// Coefficients compared between sampling and the triangular system.
const MAX_COMPARED_ORDER: usize = 8;
/// Extra orders kept when a finite input has an infinite image.
const IMAGE_EXTRA_ORDERS: usize = 40;
const REMARK_ORDER: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyPair,
    Roundtrip,
    Volterra,
    RemarkCheck,
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::VerifyPair => "verify-pair",
            Self::Roundtrip => "roundtrip",
            Self::Volterra => "volterra",
            Self::RemarkCheck => "remark-check",
            Self::All => "all",
        }
    }
}

pub fn run_command(cmd: Command, cfg: &RunConfig) -> Result<Report> {
    match cmd {
        Command::VerifyPair => cmd_verify_pair(cfg),
        Command::Roundtrip => cmd_roundtrip(cfg),
        Command::Volterra => cmd_volterra(cfg),
        Command::RemarkCheck => cmd_remark_check(cfg),
        Command::All => cmd_all(cfg),
    }
}

fn per_z<F>(zs: &[C64], mut f: F) -> Result<Vec<SampleResidual>>
where
    F: FnMut(C64) -> Result<f64>,
{
    zs.iter().map(|&z| Ok(SampleResidual::at(z, f(z)?))).collect()
}

// ---------------------------------------------------------------- pair

fn pair_checks(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let params = cfg.params(Regime::Algebraic)?;
    let n = cfg.truncation_n;
    let a = build_a(&params, n);
    let b = build_b(&params, n);
    let (a, b) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return Ok(vec![CheckRecord::failed("pair.build", &["A(x,ν)", "B(x,ν)"], PAIR_TOL, &e)]);
        }
    };
    let entrywise = |m: &crate::matrix::TriMatrix| -> Vec<SampleResidual> {
        let mut out = Vec::new();
        for row in 1..=n {
            let mut worst: f64 = 0.0;
            for col in 1..=row {
                let target = if row == col { 1.0 } else { 0.0 };
                worst = worst.max((m.get(row, col) - target).norm());
            }
            out.push(SampleResidual::labelled(format!("row={row}"), worst));
        }
        out
    };
    let mut checks = vec![
        CheckRecord::new("pair.ba_identity", &["B(x,ν)", "A(x,ν)"], PAIR_TOL, entrywise(&b.mul(&a))),
        CheckRecord::new("pair.ab_identity", &["A(x,ν)", "B(x,ν)"], PAIR_TOL, entrywise(&a.mul(&b))),
    ];
    checks.push(CheckRecord::from_result(
        "pair.b_vs_substitution_inverse",
        &["B(x,ν)", "forward-substitution inverse of A(x,ν)"],
        PAIR_TOL,
        a.lower_inverse().map(|inv| vec![SampleResidual::labelled("max-entry", inv.max_abs_diff(&b))]),
    ));
    Ok(checks)
}

pub fn cmd_verify_pair(cfg: &RunConfig) -> Result<Report> {
    Ok(Report::new(Command::VerifyPair.name(), cfg, pair_checks(cfg)?))
}

// ---------------------------------------------------------------- round trip

fn roundtrip_checks(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let params = cfg.params(Regime::Operator)?;
    let quad = cfg.quad;
    let f = cfg.input_series();
    let zs = &cfg.z_samples;
    let c0 = cfg.contour_c0;
    let k = FnH0(|w: C64| apply_l(&params, &f, w, &quad));
    let mut checks = Vec::new();

    // series route: coefficients of L f read off by sampling, then solved
    let n = cfg.truncation_n;
    let sampled = sample_coefficients(|w| apply_l(&params, &f, w, &quad), SAMPLING_RADIUS, SAMPLING_POINTS, n);
    let series_inverse = sampled.as_ref().map_err(Clone::clone).and_then(|s| solve_system(&params, &s.to_signed()));
    checks.push(CheckRecord::from_result(
        "coefficients.sampled_vs_triangular_system",
        &["apply_l sampled on a circle", "forward triangular system"],
        COEFFICIENT_TOL,
        sampled.as_ref().map_err(Clone::clone).and_then(|s| {
            let exact = forward_apply(&params, &f, n)?.to_entire();
            Ok((1..=n.min(MAX_COMPARED_ORDER))
                .map(|b| SampleResidual::labelled(format!("b={b}"), (s.coeff(b) - exact.coeff(b)).norm()))
                .collect())
        }),
    ));
    checks.push(CheckRecord::from_result(
        "roundtrip.series",
        &["input f", "series inverse of apply_l"],
        ROUNDTRIP_TOL,
        series_inverse.as_ref().map_err(Clone::clone).and_then(|e| per_z(zs, |z| Ok((e.eval(z) - f.eval(z)).norm()))),
    ));

    // contour routes
    let mut values: Vec<(&str, Result<Vec<C64>>)> = Vec::new();
    values.push(("loop0", zs.iter().map(|&z| invert_l_loop0(&params, &k, z, c0, &quad).map(|o| o.value)).collect()));
    values.push(("loop1", zs.iter().map(|&z| invert_l_loop1(&params, &k, z, c0, &quad).map(|o| o.value)).collect()));
    values.push(("line", zs.iter().map(|&z| invert_l_line(&params, &k, z, c0, &quad).map(|o| o.value)).collect()));
    values.push((
        "series",
        series_inverse.as_ref().map_err(Clone::clone).map(|e| zs.iter().map(|&z| e.eval(z)).collect()),
    ));
    for (name, vals) in &values[..3] {
        let label = format!("roundtrip.{name}");
        let route = format!("{name} inverse of apply_l");
        checks.push(CheckRecord::from_result(
            &label,
            &["input f", &route],
            ROUNDTRIP_TOL,
            vals.as_ref().map_err(Clone::clone).map(|v| {
                zs.iter().zip(v).map(|(&z, &e)| SampleResidual::at(z, (e - f.eval(z)).norm())).collect()
            }),
        ));
    }
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let (ni, vi) = &values[i];
            let (nj, vj) = &values[j];
            let samples = match (vi, vj) {
                (Ok(a), Ok(b)) => Ok(zs.iter().zip(a.iter().zip(b)).map(|(&z, (p, q))| SampleResidual::at(z, (p - q).norm())).collect()),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            checks.push(CheckRecord::from_result(&format!("agreement.{ni}_{nj}"), &[ni, nj], AGREEMENT_TOL, samples));
        }
    }

    // branch bookkeeping along the loop around 0
    checks.push(CheckRecord::from_result(
        "branch.loop0_arguments",
        &["branch tracker", "discrete winding number"],
        BRANCH_TOL,
        (|| {
            let z = zs.first().copied().unwrap_or(C64::new(0.3, 0.0));
            let out = invert_l_loop0(&params, &EntireSeries::identity(1), z, c0, &quad)?;
            let winding = ContourPath::loop_around_zero(c0)?.winding_number_about(C64::new(0.0, 0.0), 4096);
            Ok(vec![
                SampleResidual::labelled("arg(-t) change vs 2π·winding", (out.branch_changes[0] - TAU * winding).abs()),
                SampleResidual::labelled("arg(1-t) change vs π", (out.branch_changes[1] - PI).abs()),
            ])
        })(),
    ));

    // contour independence
    checks.push(CheckRecord::from_result(
        "independence.loop0_c0",
        &["loop0 c0=0.25", "loop0 c0=0.5", "loop0 c0=0.75"],
        LOOP_INDEPENDENCE_TOL,
        per_z(zs, |z| {
            let v: Vec<C64> = [0.25, 0.5, 0.75]
                .iter()
                .map(|&c| invert_l_loop0(&params, &k, z, c, &quad).map(|o| o.value))
                .collect::<Result<_>>()?;
            Ok((v[0] - v[1]).norm().max((v[1] - v[2]).norm()).max((v[0] - v[2]).norm()))
        }),
    ));
    checks.push(CheckRecord::from_result(
        "independence.line_c0",
        &["line c0=0.3", "line c0=0.7"],
        LINE_INDEPENDENCE_TOL,
        per_z(zs, |z| {
            let a = invert_l_line(&params, &k, z, 0.3, &quad)?.value;
            let b = invert_l_line(&params, &k, z, 0.7, &quad)?.value;
            Ok((a - b).norm())
        }),
    ));

    // factorisation L = k·δ∘M
    checks.push(CheckRecord::from_result(
        "factorization.l_vs_delta_m",
        &["apply_l quadrature", "k·z·d/dz apply_m (central differences)"],
        FACTORIZATION_TOL,
        per_z(zs, |z| Ok((apply_l(&params, &f, z, &quad)? - factored_l(&params, &f, z, &quad)?).norm())),
    ));

    // M⁻¹ on g = M f
    checks.push(CheckRecord::from_result(
        "roundtrip.invert_m_series",
        &["input f", "series M⁻¹ of sampled apply_m"],
        ROUNDTRIP_TOL,
        (|| {
            let g = sample_coefficients(|w| apply_m(&params, &f, w, &quad), SAMPLING_RADIUS, SAMPLING_POINTS, n)?;
            per_z(zs, |z| Ok((invert_m(&params, &g, z, InverseRoute::Series, &quad)? - f.eval(z)).norm()))
        })(),
    ));
    checks.push(CheckRecord::from_result(
        "roundtrip.invert_m_loop0",
        &["input f", "loop0 M⁻¹ of M f built from the triangular system"],
        ROUNDTRIP_TOL,
        (|| {
            let g = m_image_series(&params, &f)?;
            per_z(zs, |z| Ok((invert_m(&params, &g, z, InverseRoute::Loop0 { c0 }, &quad)? - f.eval(z)).norm()))
        })(),
    ));
    Ok(checks)
}

/// `M f = (1/k) ∫₀^z (L f)(ζ)/ζ dζ` as a series, `L f` from the triangular system.
fn m_image_series(params: &Params, f: &EntireSeries) -> Result<EntireSeries> {
    let k = forward_apply(params, f, f.order() + IMAGE_EXTRA_ORDERS)?;
    Ok(k.to_entire().delta_antiderivative().scale(1.0 / params.factor_constant()))
}

pub fn cmd_roundtrip(cfg: &RunConfig) -> Result<Report> {
    Ok(Report::new(Command::Roundtrip.name(), cfg, roundtrip_checks(cfg)?))
}

// ---------------------------------------------------------------- Volterra

const THETA_GRID: usize = 1000;
const SLOPE_POINTS: usize = 50;

fn volterra_checks(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let params = cfg.params(Regime::Operator)?;
    params.require_real()?;
    let quad = cfg.quad;
    let f = cfg.input_series();
    let zs = &cfg.z_samples;
    let mut checks = vec![CheckRecord::from_result(
        "volterra.apply_m_vs_volterra",
        &["apply_m over (0,1)", "Volterra form over (0,τ̂)"],
        VOLTERRA_TOL,
        per_z(zs, |z| Ok((apply_m_volterra(&params, &f, z, &quad)? - apply_m(&params, &f, z, &quad)?).norm())),
    )];
    checks.push(CheckRecord::from_result(
        "volterra.consistency_with_l_image",
        &["Volterra form of M E*", "(1/k)∫K(ζ)/ζ dζ with K from the triangular system"],
        VOLTERRA_TOL,
        per_z(zs, |z| solve_volterra_check(&params, &f, &[z], &quad)),
    ));
    let z = zs.first().copied().unwrap_or(C64::new(0.3, 0.0));
    let gaps = log_spaced(1e-4, 1e-2, SLOPE_POINTS);
    // the kernel that enters the Volterra equation is Ψ₋ − Ψ₊; the single
    // branches carry an O(√(τ̂ − τ)) correction that biases their slopes
    checks.push(CheckRecord::from_result(
        "volterra.kernel_slope",
        &["log–log regression of |Ψ₋ − Ψ₊| near τ̂", "exponent −1/2"],
        SLOPE_TOL,
        singularity_slope(&params, z, KernelPart::Difference, &gaps)
            .map(|s| vec![SampleResidual::labelled(format!("slope={s}"), (s + 0.5).abs())]),
    ));
    checks.push(CheckRecord::from_result(
        "volterra.theta_forward_inverse",
        &["θ± root solve", "forward map τ(t)"],
        THETA_TOL,
        theta_residuals(&params),
    ));
    Ok(checks)
}

fn theta_residuals(params: &Params) -> Result<Vec<SampleResidual>> {
    let tau_hat = params.tau_hat().re;
    let mut out = Vec::new();
    for branch in [Branch::Minus, Branch::Plus] {
        let mut worst: f64 = 0.0;
        for j in 0..THETA_GRID {
            let tau = tau_hat * j as f64 / (THETA_GRID - 1) as f64;
            let t = theta(params, branch, tau)?;
            worst = worst.max((tau_of(params, t)? - tau).abs());
        }
        out.push(SampleResidual::labelled(format!("{branch:?}"), worst));
    }
    Ok(out)
}

pub fn cmd_volterra(cfg: &RunConfig) -> Result<Report> {
    Ok(Report::new(Command::Volterra.name(), cfg, volterra_checks(cfg)?))
}

// ---------------------------------------------------------------- remark

/// `z e^{(1−x)z}` truncated at `order`: `E_ℓ = ℓ(1−x)^{ℓ−1}`.
pub(crate) fn remark_input(x: C64, order: usize) -> EntireSeries {
    let coeffs = (1..=order).map(|l| (1.0 - x).powu(l as u32 - 1) * l as f64).collect();
    EntireSeries::new(coeffs).expect("order >= 1")
}

fn remark_checks(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let params = cfg.params(Regime::Operator)?;
    let (x, nu) = (params.x(), params.nu());
    let quad = cfg.quad;
    let f = remark_input(x, REMARK_ORDER);
    let zs = &cfg.z_samples;
    let quadrature: Result<Vec<C64>> = zs.iter().map(|&z| apply_l(&params, &f, z, &quad)).collect();
    let compare = |closed: &dyn Fn(C64) -> Result<C64>| -> Result<Vec<SampleResidual>> {
        let q = quadrature.as_ref().map_err(Clone::clone)?;
        zs.iter().zip(q).map(|(&z, &v)| Ok(SampleResidual::at(z, (v - closed(z)?).norm()))).collect()
    };
    let alpha = 1.0 - 1.0 / nu;
    let image = forward_apply(&params, &f, REMARK_ORDER + IMAGE_EXTRA_ORDERS)?.to_entire();
    Ok(vec![
        CheckRecord::from_result(
            "remark.as_stated",
            &["apply_l quadrature", "−z e^{−z}/(1−x)"],
            REMARK_TOL,
            compare(&|z| Ok(-z * (-z).exp() / (1.0 - x))),
        ),
        CheckRecord::from_result(
            "remark.corrected",
            &["apply_l quadrature", "−(xz/(1−x)) Φ(1−1/ν; 2−1/ν; −xz)"],
            REMARK_TOL,
            compare(&|z| Ok(-(x * z / (1.0 - x)) * confluent_phi_series(alpha, alpha + 1.0, -x * z)?)),
        ),
        CheckRecord::from_result(
            "remark.triangular_system",
            &["apply_l quadrature", "forward triangular system"],
            REMARK_TOL,
            compare(&|z| Ok(image.eval(z))),
        ),
    ])
}

pub fn cmd_remark_check(cfg: &RunConfig) -> Result<Report> {
    Ok(Report::new(Command::RemarkCheck.name(), cfg, remark_checks(cfg)?))
}

// ---------------------------------------------------------------- all

/// Every check; a command whose parameters are inadmissible contributes a
/// failed record instead of aborting the rest.
pub fn cmd_all(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut checks = Vec::new();
    let groups: [(&str, fn(&RunConfig) -> Result<Vec<CheckRecord>>); 4] = [
        ("verify-pair", pair_checks),
        ("roundtrip", roundtrip_checks),
        ("volterra", volterra_checks),
        ("remark-check", remark_checks),
    ];
    for (name, run) in groups {
        match run(cfg) {
            Ok(mut c) => checks.append(&mut c),
            Err(e) => checks.push(CheckRecord::failed(&format!("{name}.setup"), &[name], 0.0, &e)),
        }
    }
    Ok(Report::new(Command::All.name(), cfg, checks))
}
