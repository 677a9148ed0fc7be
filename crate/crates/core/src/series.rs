//! Truncated exponential power series for functions in H₀.
//!
//! A series stores `E_1 … E_N` and represents `Σ E_ℓ z^ℓ / ℓ!`; the constant
//! term is implicitly zero. [`SignedSeries`] stores the alternating variant
//! `Σ (−1)^b K_b z^b / b!` used for right-hand sides.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Largest n with n! finite in double precision.
pub const FACTORIAL_MAX: usize = 170;

fn factorial_table() -> &'static [f64; FACTORIAL_MAX + 1] {
    static TABLE: OnceLock<[f64; FACTORIAL_MAX + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; FACTORIAL_MAX + 1];
        for n in 1..=FACTORIAL_MAX {
            t[n] = t[n - 1] * n as f64;
        }
        t
    })
}

/// `n!` as a float; infinite past [`FACTORIAL_MAX`].
pub fn factorial(n: usize) -> f64 {
    factorial_table().get(n).copied().unwrap_or(f64::INFINITY)
}

/// `ln n!`, exact table lookup up to [`FACTORIAL_MAX`] and summed beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= FACTORIAL_MAX {
        factorial(n).ln()
    } else {
        factorial(FACTORIAL_MAX).ln() + ((FACTORIAL_MAX + 1)..=n).map(|k| (k as f64).ln()).sum::<f64>()
    }
}

/// Exponential coefficients `E_1..E_order` of an analytic `g` with
/// `g(0) = 0`, from `points` samples on the circle `|w| = radius`:
/// `E_ℓ ≈ ℓ!/(points · radius^ℓ) Σ_j g(radius ω^j) ω^{−jℓ}`.
///
/// Aliasing from coefficient `ℓ + points` is the only truncation error, so
/// `points` should comfortably exceed `order`.
pub fn sample_coefficients<G>(mut g: G, radius: f64, points: usize, order: usize) -> Result<EntireSeries>
where
    G: FnMut(C64) -> Result<C64>,
{
    if !(radius > 0.0) || points <= order {
        return Err(Error::domain("sampling needs radius > 0 and more points than the order"));
    }
    let samples: Vec<C64> = (0..points)
        .map(|j| g(C64::from_polar(radius, std::f64::consts::TAU * j as f64 / points as f64)))
        .collect::<Result<_>>()?;
    let coeffs = (1..=order)
        .map(|l| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, v) in samples.iter().enumerate() {
                let phase = -std::f64::consts::TAU * ((j * l) % points) as f64 / points as f64;
                acc += v * C64::from_polar(1.0, phase);
            }
            acc * (ln_factorial(l) - l as f64 * radius.ln()).exp() / points as f64
        })
        .collect();
    EntireSeries::new(coeffs)
}

/// Something that can be evaluated as a member of H₀.
///
/// The inverse routes accept either a truncated series or an opaque
/// evaluator (for example a quadrature of the forward operator).
pub trait H0Function {
    fn value(&self, w: C64) -> Result<C64>;

    /// `f'(0)` when cheaply known; used for tail bounds on unbounded contours.
    fn linear_coefficient(&self) -> Option<C64> {
        None
    }

    /// Bound on the last retained term at the given radius, for truncated series.
    fn tail_bound(&self, _radius: f64) -> Option<f64> {
        None
    }
}

impl<T: H0Function + ?Sized> H0Function for &T {
    fn value(&self, w: C64) -> Result<C64> {
        (**self).value(w)
    }
    fn linear_coefficient(&self) -> Option<C64> {
        (**self).linear_coefficient()
    }
    fn tail_bound(&self, radius: f64) -> Option<f64> {
        (**self).tail_bound(radius)
    }
}

/// Wraps a closure as an [`H0Function`].
pub struct FnH0<F>(pub F);

impl<F> H0Function for FnH0<F>
where
    F: Fn(C64) -> Result<C64>,
{
    fn value(&self, w: C64) -> Result<C64> {
        (self.0)(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntireSeries {
    #[serde(with = "crate::series::pairs")]
    coeffs: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignedSeries {
    #[serde(with = "crate::series::pairs")]
    coeffs: Vec<C64>,
}

fn check_order(coeffs: &[C64]) -> Result<()> {
    if coeffs.is_empty() {
        return Err(Error::domain("series must have truncation order >= 1"));
    }
    Ok(())
}

impl EntireSeries {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        check_order(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zeros(order: usize) -> Self {
        assert!(order >= 1, "truncation order must be positive");
        Self { coeffs: vec![C64::new(0.0, 0.0); order] }
    }

    /// Series of `z`, padded with zeros to `order`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.coeffs[0] = C64::new(1.0, 0.0);
        s
    }

    /// `E_ℓ`, 1-based.
    pub fn coeff(&self, l: usize) -> C64 {
        self.coeffs[l - 1]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Pads with zeros or truncates to `order`.
    pub fn resized(&self, order: usize) -> Self {
        assert!(order >= 1, "truncation order must be positive");
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order, C64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn eval(&self, z: C64) -> C64 {
        // Horner on term ratios z/(ℓ+1): no factorials needed.
        let n = self.coeffs.len();
        let mut acc = self.coeffs[n - 1];
        for l in (1..n).rev() {
            acc = self.coeffs[l - 1] + acc * z / (l as f64 + 1.0);
        }
        acc * z
    }

    /// `(f(z), f'(z))` in one pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let n = self.coeffs.len();
        let mut value = self.coeffs[n - 1];
        // derivative polynomial: Σ_{ℓ=0}^{N-1} E_{ℓ+1} z^ℓ/ℓ!
        let mut deriv = self.coeffs[n - 1];
        for l in (1..n).rev() {
            value = self.coeffs[l - 1] + value * z / (l as f64 + 1.0);
            deriv = self.coeffs[l - 1] + deriv * z / l as f64;
        }
        (value * z, deriv)
    }

    /// Euler operator `z d/dz`: multiplies `E_ℓ` by `ℓ`.
    pub fn delta_op(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().enumerate().map(|(i, &c)| c * (i + 1) as f64).collect(),
        }
    }

    /// `∫₀^z g(ζ)/ζ dζ`: divides `E_ℓ` by `ℓ`.
    pub fn delta_antiderivative(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().enumerate().map(|(i, &c)| c / (i + 1) as f64).collect(),
        }
    }

    /// Splits `f'` into `f'(0)` and its H₀ part, which keeps the same order.
    pub fn derivative(&self) -> (C64, Self) {
        let mut coeffs: Vec<C64> = self.coeffs[1..].to_vec();
        coeffs.push(C64::new(0.0, 0.0));
        (self.coeffs[0], Self { coeffs })
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * k).collect() }
    }

    pub fn to_signed(&self) -> SignedSeries {
        SignedSeries { coeffs: alternate(&self.coeffs) }
    }

    /// `|E_N| r^N / N!`, the size of the last retained term on `|z| = r`.
    pub fn truncation_bound(&self, radius: f64) -> f64 {
        let n = self.coeffs.len();
        let last = self.coeffs[n - 1].norm();
        if last == 0.0 {
            return 0.0;
        }
        (last.ln() + n as f64 * radius.ln() - ln_factorial(n)).exp()
    }

    /// Largest radius at which the last retained term stays below `tol`.
    pub fn reliable_radius(&self, tol: f64) -> f64 {
        let n = self.coeffs.len();
        let last = self.coeffs[n - 1].norm();
        if last == 0.0 {
            return f64::INFINITY;
        }
        ((tol.ln() - last.ln() + ln_factorial(n)) / n as f64).exp()
    }

    /// Coefficient-wise combination truncated to the shorter order.
    fn zip_with(&self, other: &Self, op: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| op(a, b)).collect(),
        }
    }
}

impl Add for &EntireSeries {
    type Output = EntireSeries;
    fn add(self, rhs: Self) -> EntireSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &EntireSeries {
    type Output = EntireSeries;
    fn sub(self, rhs: Self) -> EntireSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<C64> for &EntireSeries {
    type Output = EntireSeries;
    fn mul(self, k: C64) -> EntireSeries {
        self.scale(k)
    }
}

impl H0Function for EntireSeries {
    fn value(&self, w: C64) -> Result<C64> {
        Ok(self.eval(w))
    }
    fn linear_coefficient(&self) -> Option<C64> {
        Some(self.coeffs[0])
    }
    fn tail_bound(&self, radius: f64) -> Option<f64> {
        Some(self.truncation_bound(radius))
    }
}

impl SignedSeries {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        check_order(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn zeros(order: usize) -> Self {
        assert!(order >= 1, "truncation order must be positive");
        Self { coeffs: vec![C64::new(0.0, 0.0); order] }
    }

    /// `K_b`, 1-based.
    pub fn coeff(&self, b: usize) -> C64 {
        self.coeffs[b - 1]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn resized(&self, order: usize) -> Self {
        assert!(order >= 1, "truncation order must be positive");
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order, C64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn to_entire(&self) -> EntireSeries {
        EntireSeries { coeffs: alternate(&self.coeffs) }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.to_entire().eval(z)
    }
}

impl H0Function for SignedSeries {
    fn value(&self, w: C64) -> Result<C64> {
        Ok(self.eval(w))
    }
    fn linear_coefficient(&self) -> Option<C64> {
        Some(-self.coeffs[0])
    }
    fn tail_bound(&self, radius: f64) -> Option<f64> {
        Some(self.to_entire().truncation_bound(radius))
    }
}

fn alternate(coeffs: &[C64]) -> Vec<C64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 0 { -c } else { c })
        .collect()
}

/// Serde helpers: complex numbers as `[re, im]` pairs.
pub mod pairs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::C64;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }

    pub mod one {
        use super::*;

        pub fn serialize<S: Serializer>(c: &C64, s: S) -> Result<S::Ok, S::Error> {
            [c.re, c.im].serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
            let [re, im] = <[f64; 2]>::deserialize(d)?;
            Ok(C64::new(re, im))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn series(v: &[f64]) -> EntireSeries {
        EntireSeries::from_real(v).unwrap()
    }

    #[test]
    fn eval_single_term_and_origin() {
        assert_eq!(series(&[1.0]).eval(c(2.0, 0.0)), c(2.0, 0.0));
        let f = series(&[0.3, -1.0, 2.5, 4.0]);
        assert_eq!(f.eval(c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn eval_matches_exponential_closed_form() {
        // z·e^{(1-x)z} has E_ℓ = ℓ(1-x)^{ℓ-1}
        let x = 0.4;
        let coeffs: Vec<f64> = (1..=25).map(|l| l as f64 * (1.0f64 - x).powi(l - 1)).collect();
        let f = series(&coeffs);
        let got = f.eval(c(1.0, 0.0));
        assert!((got - c(0.6f64.exp(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn delta_and_antiderivative_examples() {
        assert_eq!(series(&[1.0, 0.0, 0.0]).delta_op(), series(&[1.0, 0.0, 0.0]));
        assert_eq!(series(&[0.0, 1.0, 0.0]).delta_op(), series(&[0.0, 2.0, 0.0]));
        assert_eq!(series(&[1.0, 1.0, 1.0]).delta_op(), series(&[1.0, 2.0, 3.0]));
        assert_eq!(series(&[1.0, 0.0]).delta_antiderivative(), series(&[1.0, 0.0]));
        assert_eq!(series(&[0.0, 2.0]).delta_antiderivative(), series(&[0.0, 1.0]));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(series(&[1.0, 0.0]).derivative(), (c(1.0, 0.0), series(&[0.0, 0.0])));
        assert_eq!(series(&[0.0, 1.0, 0.0]).derivative(), (c(0.0, 0.0), series(&[1.0, 0.0, 0.0])));
    }

    #[test]
    fn derivative_matches_central_differences() {
        let f = series(&[0.7, -0.2, 1.3, 0.5, -2.0, 0.9]);
        let (d0, rest) = f.derivative();
        let h = 1e-6;
        for k in 0..10 {
            let ang = 0.37 + k as f64 * 0.61;
            let z = C64::from_polar(0.1 + 0.09 * k as f64, ang);
            let fd = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
            let exact = d0 + rest.eval(z);
            assert!((fd - exact).norm() < 1e-8, "{fd} vs {exact}");
            assert!((f.eval_with_derivative(z).1 - exact).norm() < 1e-14);
        }
    }

    #[test]
    fn empty_series_rejected() {
        assert!(EntireSeries::new(vec![]).is_err());
        assert!(SignedSeries::new(vec![]).is_err());
    }

    #[test]
    fn binary_ops_truncate_to_shorter_order() {
        let a = series(&[1.0, 2.0, 3.0]);
        let b = series(&[1.0, 1.0]);
        assert_eq!(&a + &b, series(&[2.0, 3.0]));
        assert_eq!(&a - &b, series(&[0.0, 1.0]));
    }

    #[test]
    fn json_is_array_of_pairs() {
        let f = EntireSeries::new(vec![c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, "[[1.0,-2.0],[0.5,0.0]]");
        let back: EntireSeries = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn reliable_radius_inverts_truncation_bound() {
        let f = series(&[1.0, 0.5, 0.25, 0.125]);
        let r = f.reliable_radius(1e-10);
        assert!((f.truncation_bound(r) - 1e-10).abs() < 1e-20);
    }

    #[test]
    fn sampled_coefficients_of_exp_minus_one() {
        let s = sample_coefficients(|w| Ok(w.exp() - 1.0), 1.5, 48, 10).unwrap();
        for l in 1..=10 {
            assert!((s.coeff(l) - 1.0).norm() < 1e-9, "{l}: {}", s.coeff(l));
        }
        assert!(sample_coefficients(|w| Ok(w), 1.0, 4, 4).is_err());
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
    }

    fn arb_series(max: usize) -> impl Strategy<Value = EntireSeries> {
        prop::collection::vec(arb_c64(), 1..=max).prop_map(|v| EntireSeries::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn eval_is_linear(f in arb_series(12), g in arb_series(12), a in arb_c64(), b in arb_c64(), z in arb_c64()) {
            let n = f.order().min(g.order());
            let (f, g) = (f.resized(n), g.resized(n));
            let combo = &(&f * a) + &(&g * b);
            let lhs = combo.eval(z);
            let rhs = a * f.eval(z) + b * g.eval(z);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm().max(lhs.norm())) * 10.0);
        }

        #[test]
        fn delta_roundtrips(f in arb_series(12)) {
            let back = f.delta_op().delta_antiderivative();
            for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
                prop_assert!((a - b).norm() <= 1e-15 * (1.0 + b.norm()));
            }
            let back = f.delta_antiderivative().delta_op();
            for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
                prop_assert!((a - b).norm() <= 1e-15 * (1.0 + b.norm()));
            }
        }

        #[test]
        fn signed_roundtrip_is_exact(f in arb_series(20)) {
            let k = f.to_signed();
            prop_assert_eq!(k.to_entire().to_signed(), k);
        }

        #[test]
        fn delta_equals_z_times_derivative(f in arb_series(20), r in 0.0..2.0f64, th in 0.0..std::f64::consts::TAU) {
            let z = C64::from_polar(r, th);
            let lhs = f.delta_op().eval(z);
            let rhs = z * f.eval_with_derivative(z).1;
            let scale = 1.0 + f.coeffs().iter().map(|c| c.norm()).sum::<f64>() * 8.0;
            prop_assert!((lhs - rhs).norm() < 1e-12 * scale);
        }
    }
}
