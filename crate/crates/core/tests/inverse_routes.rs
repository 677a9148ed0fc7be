use std::f64::consts::{PI, TAU};

use opinv_core::contour::ContourPath;
use opinv_core::inverse::*;
use opinv_core::matrix::forward_apply;
use opinv_core::operator::{apply_l, apply_m};
use opinv_core::rng::Draws;
use opinv_core::series::{FnH0, sample_coefficients};
use opinv_core::{C64, EntireSeries, Params, QuadratureSpec, SignedSeries};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// Contour integrands stall near 1e−11 relative for loops that pass close
/// to `t = 1`; all comparisons here are at 1e−7 or looser than 1e−9.
fn contour_quad() -> QuadratureSpec {
    QuadratureSpec::default().with_tolerances(1e-11, 1e-10)
}

const ZS: [C64; 3] = [C64::new(0.3, 0.0), C64::new(0.0, 0.5), C64::new(-0.2, 0.4)];

#[test]
fn loop_geometry() {
    let a = ContourPath::loop_around_zero(0.5).unwrap();
    assert_eq!(a.center(), Some(c(0.0, 0.0)));
    assert_eq!(a.radius(), 1.0);
    let b = ContourPath::loop_around_zero(0.25).unwrap();
    assert_eq!(b.center(), Some(c(-1.0, 0.0)));
    assert_eq!(b.radius(), 2.0);
    for path in [&a, &b] {
        assert!((path.point(0.0, 1.0).t - 1.0).norm() < 1e-15);
        assert!((path.point(1.0, 0.0).t - 1.0).norm() < 1e-15);
        assert!((path.winding_number_about(c(0.0, 0.0), 256) - 1.0).abs() < 1e-12);
    }
    let one = ContourPath::loop_around_one(0.4).unwrap();
    assert!(one.point(0.0, 1.0).t.norm() < 1e-15);
    assert!((one.winding_number_about(c(1.0, 0.0), 256) - 1.0).abs() < 1e-12);
    let line = ContourPath::vertical_line(0.3).unwrap();
    for s in [0.1, 0.4, 0.77] {
        assert_eq!(line.point(s, 1.0 - s).t.re, 0.3);
    }
    for bad in [0.0, 1.0, -0.2, f64::NAN] {
        assert!(ContourPath::loop_around_zero(bad).is_err());
    }
}

#[test]
fn zero_inputs_give_zero() {
    let p = Params::real(0.4, -2.0).unwrap();
    let k = EntireSeries::zeros(4);
    let q = quad();
    for z in [c(0.0, 0.0), c(0.3, 0.2)] {
        assert_eq!(invert_l_loop0(&p, &k, z, 0.5, &q).unwrap().value, c(0.0, 0.0));
        assert_eq!(invert_l_loop1(&p, &k, z, 0.5, &q).unwrap().value, c(0.0, 0.0));
        assert_eq!(invert_l_line(&p, &k, z, 0.5, &q).unwrap().value, c(0.0, 0.0));
    }
    let f = EntireSeries::identity(3);
    assert_eq!(invert_l_loop0(&p, &f, c(0.0, 0.0), 0.5, &q).unwrap().value, c(0.0, 0.0));
    assert_eq!(invert_m(&p, &k, c(0.4, 0.1), InverseRoute::Series, &q).unwrap(), c(0.0, 0.0));
    assert_eq!(invert_m(&p, &f, c(0.0, 0.0), InverseRoute::Series, &q).unwrap(), c(0.0, 0.0));
}

#[test]
fn loop0_recovers_identity() {
    let p = Params::real(0.4, -2.0).unwrap();
    let f = EntireSeries::identity(1);
    let q = quad();
    let k = FnH0(|w: C64| apply_l(&p, &f, w, &q));
    for z in ZS {
        let got = invert_l_loop0(&p, &k, z, 0.5, &q).unwrap().value;
        assert!((got - z).norm() < 1e-7, "z={z}: {got}");
    }
}

#[test]
fn loop1_recovers_square() {
    // f(z) = z²: E₂ = 2
    let p = Params::real(0.4, -2.0).unwrap();
    let f = EntireSeries::from_real(&[0.0, 2.0]).unwrap();
    let q = quad();
    let k = FnH0(|w: C64| apply_l(&p, &f, w, &q));
    for z in ZS {
        let got = invert_l_loop1(&p, &k, z, 0.5, &q).unwrap().value;
        assert!((got - z * z).norm() < 1e-7, "z={z}: {got}");
    }
}

#[test]
fn line_matches_across_abscissae_and_loop() {
    let p = Params::real(0.4, -2.0).unwrap();
    let f = Draws::new(21).series(4, 1.0);
    let q = contour_quad();
    let k = FnH0(|w: C64| apply_l(&p, &f, w, &q));
    for z in ZS {
        let a = invert_l_line(&p, &k, z, 0.3, &q).unwrap().value;
        let b = invert_l_line(&p, &k, z, 0.7, &q).unwrap().value;
        let l0 = invert_l_loop0(&p, &k, z, 0.5, &q).unwrap().value;
        assert!((a - b).norm() < 1e-8);
        assert!((a - l0).norm() < 1e-7);
        assert!((a - f.eval(z)).norm() < 1e-7);
    }
}

#[test]
fn line_needs_negative_real_part() {
    let p = Params::new(c(0.4, 0.0), c(0.3, 0.0), opinv_core::Regime::Representation).unwrap();
    let k = EntireSeries::identity(2);
    assert!(invert_l_line(&p, &k, c(0.3, 0.0), 0.5, &quad()).is_err());
    // the loop around 0 still evaluates for 0 ≤ Re ν < 1
    assert!(invert_l_loop0(&p, &k, c(0.3, 0.0), 0.5, &quad()).is_ok());
}

/// Representation equivalence on 20 random draws with `Re ν < 0`, `|z| ≤ 1`.
#[test]
fn representations_agree_on_random_draws() {
    let mut d = Draws::new(0x1e);
    let q = contour_quad();
    for _ in 0..20 {
        let x = d.complex_box((0.2, 0.8), (-0.3, 0.3));
        let nu = d.complex_box((-2.5, -0.3), (-0.3, 0.3));
        let p = Params::operator(x, nu).unwrap();
        let kser = d.series(6, 1.0);
        let z = d.complex_disc(1.0);
        let l0 = invert_l_loop0(&p, &kser, z, 0.5, &q).unwrap().value;
        let l1 = invert_l_loop1(&p, &kser, z, 0.5, &q).unwrap().value;
        let line = invert_l_line(&p, &kser, z, 0.5, &q).unwrap().value;
        assert!((l0 - l1).norm() < 1e-8, "x={x} ν={nu} z={z}: {l0} vs {l1}");
        assert!((l0 - line).norm() < 1e-7, "x={x} ν={nu} z={z}: {l0} vs {line}");
    }
}

#[test]
fn contour_independence_loop0() {
    let p = Params::operator(c(0.45, 0.1), c(-1.3, 0.2)).unwrap();
    let f = Draws::new(8).series(5, 1.0);
    let q = contour_quad();
    let k = FnH0(|w: C64| apply_l(&p, &f, w, &q));
    for z in ZS {
        let v: Vec<C64> = [0.25, 0.5, 0.75].iter().map(|&c0| invert_l_loop0(&p, &k, z, c0, &q).unwrap().value).collect();
        assert!((v[0] - v[1]).norm() < 1e-9 && (v[1] - v[2]).norm() < 1e-9);
    }
}

#[test]
fn branch_changes_along_loop() {
    let p = Params::real(0.4, -2.0).unwrap();
    let out = invert_l_loop0(&p, &EntireSeries::identity(1), c(0.3, 0.0), 0.5, &quad()).unwrap();
    // tracking stops just short of the endpoints, where 1 − t vanishes
    assert!((out.branch_changes[0] - TAU).abs() < 1e-6);
    // the loop starts and ends at the branch point t = 1 itself, so the
    // argument of 1 − t turns by a half revolution rather than returning
    assert!((out.branch_changes[1] - PI).abs() < 1e-6);
}

/// Left and right inverse on series with N ≤ 10.
#[test]
fn left_and_right_inverse() {
    let p = Params::real(0.4, -2.0).unwrap();
    let q = quad();
    let f = Draws::new(4).series(10, 0.5);
    // left: L⁻¹ L f = f
    let k = FnH0(|w: C64| apply_l(&p, &f, w, &q));
    for z in ZS {
        assert!((invert_l_loop0(&p, &k, z, 0.5, &q).unwrap().value - f.eval(z)).norm() < 1e-6);
    }
    // right: L L⁻¹ K = K, with L⁻¹ K built by the triangular system
    let kser = SignedSeries::new(Draws::new(5).series(10, 0.5).coeffs().to_vec()).unwrap();
    let e = invert_l_series(&p, &kser, 10).unwrap();
    let image = forward_apply(&p, &e, 10).unwrap();
    for b in 1..=10 {
        assert!((image.coeff(b) - kser.coeff(b)).norm() < 1e-10);
    }
    for z in ZS {
        assert!((apply_l(&p, &e.resized(10), z, &q).unwrap() - image_eval(&p, &e, z)).norm() < 1e-6);
    }
}

fn image_eval(p: &Params, e: &EntireSeries, z: C64) -> C64 {
    forward_apply(p, e, e.order() + 40).unwrap().eval(z)
}

#[test]
fn series_route_matches_loop_route() {
    let p = Params::operator(c(0.3, -0.1), c(-0.8, 0.1)).unwrap();
    let q = quad();
    let f = Draws::new(9).series(6, 1.0);
    let sampled = sample_coefficients(|w| apply_l(&p, &f, w, &q), 0.5, 64, 6).unwrap();
    let e = invert_l_series(&p, &sampled.to_signed(), 6).unwrap();
    let k = FnH0(|w: C64| apply_l(&p, &f, w, &q));
    for z in ZS {
        let loop0 = invert_l_loop0(&p, &k, z, 0.5, &q).unwrap().value;
        assert!((e.eval(z) - loop0).norm() < 1e-7);
        assert!((e.eval(z) - f.eval(z)).norm() < 1e-7);
    }
}

#[test]
fn invert_m_round_trip() {
    let p = Params::real(0.4, -2.0).unwrap();
    let q = quad();
    let f = Draws::new(12).series(6, 1.0);
    let g = sample_coefficients(|w| apply_m(&p, &f, w, &q), 0.5, 64, 6).unwrap();
    for z in ZS {
        assert!((invert_m(&p, &g, z, InverseRoute::Series, &q).unwrap() - f.eval(z)).norm() < 1e-6);
    }
}
