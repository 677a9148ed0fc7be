//! Lower-triangular hypergeometric matrices `A(x, ν)`, `B(x, ν)`, `Q`, the
//! triangular system linking `f`'s coefficients to those of `L f`, and its
//! explicit solution.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::params::Params;
use crate::series::{EntireSeries, SignedSeries};
use crate::special::{confluent_phi_series, gauss_f_poly, gauss_f_series, GammaRatio};
use crate::C64;

/// Square lower-triangular matrix with 1-based indices `1 ≤ ℓ ≤ b ≤ N`,
/// stored as a packed row-major triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMatrix {
    order: usize,
    entries: Vec<C64>,
}

fn packed_len(order: usize) -> usize {
    order * (order + 1) / 2
}

impl TriMatrix {
    pub fn zeros(order: usize) -> Self {
        Self { order, entries: vec![C64::new(0.0, 0.0); packed_len(order)] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for b in 1..=order {
            m.set(b, b, C64::new(1.0, 0.0));
        }
        m
    }

    /// Builds the matrix entry by entry.
    pub fn try_from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Result<C64>) -> Result<Self> {
        let mut entries = Vec::with_capacity(packed_len(order));
        for b in 1..=order {
            for l in 1..=b {
                entries.push(f(b, l)?);
            }
        }
        Ok(Self { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn index(&self, b: usize, l: usize) -> usize {
        assert!(
            1 <= l && l <= b && b <= self.order,
            "triangular index ({b}, {l}) outside 1 ≤ ℓ ≤ b ≤ {}",
            self.order
        );
        b * (b - 1) / 2 + (l - 1)
    }

    /// Entry `(b, ℓ)`. Panics outside the stored triangle.
    pub fn get(&self, b: usize, l: usize) -> C64 {
        self.entries[self.index(b, l)]
    }

    pub fn set(&mut self, b: usize, l: usize, v: C64) {
        let i = self.index(b, l);
        self.entries[i] = v;
    }

    /// Entry `(b, ℓ)` with the implicit zeros above the diagonal.
    pub fn get_full(&self, b: usize, l: usize) -> C64 {
        if l > b { C64::new(0.0, 0.0) } else { self.get(b, l) }
    }

    /// Row `b` as a slice of its `b` stored entries.
    pub fn row(&self, b: usize) -> &[C64] {
        let start = self.index(b, 1);
        &self.entries[start..start + b]
    }

    pub fn mul(&self, other: &TriMatrix) -> TriMatrix {
        assert_eq!(self.order, other.order, "matrix orders differ");
        let mut out = TriMatrix::zeros(self.order);
        for b in 1..=self.order {
            let row = self.row(b);
            for l in 1..=b {
                let mut acc = C64::new(0.0, 0.0);
                for (j, &a) in row.iter().enumerate().skip(l - 1) {
                    acc += a * other.get(j + 1, l);
                }
                out.set(b, l, acc);
            }
        }
        out
    }

    /// Matrix–vector product on a vector indexed from 1 (`v[0]` is entry 1).
    /// Shorter vectors are padded with zeros.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (1..=self.order)
            .map(|b| {
                self.row(b)
                    .iter()
                    .zip(v.iter())
                    .fold(C64::new(0.0, 0.0), |acc, (&m, &x)| acc + m * x)
            })
            .collect()
    }

    /// `max |M − I|` over the stored triangle.
    pub fn identity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for b in 1..=self.order {
            for l in 1..=b {
                let target = if l == b { 1.0 } else { 0.0 };
                worst = worst.max((self.get(b, l) - target).norm());
            }
        }
        worst
    }

    /// Inverse by forward substitution; needs a nonzero diagonal.
    pub fn lower_inverse(&self) -> Result<TriMatrix> {
        let n = self.order;
        let mut inv = TriMatrix::zeros(n);
        for col in 1..=n {
            for row in col..=n {
                let mut acc = if row == col { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                for j in col..row {
                    acc -= self.get(row, j) * inv.get(j, col);
                }
                let d = self.get(row, row);
                if d == C64::new(0.0, 0.0) {
                    return Err(crate::Error::Pole { what: "zero diagonal in triangular inverse", at: d });
                }
                inv.set(row, col, acc / d);
            }
        }
        Ok(inv)
    }

    pub fn max_abs_diff(&self, other: &TriMatrix) -> f64 {
        assert_eq!(self.order, other.order, "matrix orders differ");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Serialize for TriMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<[f64; 2]> = self.entries.iter().map(|c| [c.re, c.im]).collect();
        let mut st = s.serialize_struct("TriMatrix", 2)?;
        st.serialize_field("order", &self.order)?;
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}

/// `C(n, k)` by the multiplicative recurrence `C(n, j+1) = C(n, j)(n−j)/(j+1)`,
/// in exact integers while they fit and in floating point beyond.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut exact: u128 = 1;
    for j in 0..k {
        match exact.checked_mul((n - j) as u128) {
            Some(v) => exact = v / (j as u128 + 1),
            None => {
                let mut acc = exact as f64;
                for i in j..k {
                    acc = acc * (n - i) as f64 / (i + 1) as f64;
                }
                return acc;
            }
        }
    }
    exact as f64
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 { 1.0 } else { -1.0 }
}

/// `A_{n,k} = (−1)^k C(n,k) F(k−n, −nν; −n; x)`.
pub fn build_a(params: &Params, n: usize) -> Result<TriMatrix> {
    let (x, nu) = (params.x(), params.nu());
    TriMatrix::try_from_fn(n, |row, k| {
        let nf = row as f64;
        let f = gauss_f_poly(row - k, -nu * nf, C64::new(-nf, 0.0), x)?;
        Ok(f * sign(k) * binomial(row, k))
    })
}

/// `B_{n,k} = (−1)^k C(n,k) F(k−n, kν; k; x)`.
pub fn build_b(params: &Params, n: usize) -> Result<TriMatrix> {
    let (x, nu) = (params.x(), params.nu());
    TriMatrix::try_from_fn(n, |row, k| {
        let kf = k as f64;
        let f = gauss_f_poly(row - k, nu * kf, C64::new(kf, 0.0), x)?;
        Ok(f * sign(k) * binomial(row, k))
    })
}

/// `Γ(b)Γ(1−bν)/Γ(b−bν)`.
pub fn q_gamma_prefactor(nu: C64, b: usize) -> Result<C64> {
    let bf = b as f64;
    GammaRatio::new(vec![C64::new(bf, 0.0), 1.0 - nu * bf], vec![bf - nu * bf]).eval()
}

/// `Q_{b,ℓ} = Γ(b)Γ(1−bν)/Γ(b−bν) · x/(x−1) · F(ℓ−b, −bν; −b; x)`.
pub fn q_entry(params: &Params, b: usize, l: usize) -> Result<C64> {
    let (x, nu) = (params.x(), params.nu());
    let bf = b as f64;
    let f = gauss_f_poly(b - l, -nu * bf, C64::new(-bf, 0.0), x)?;
    Ok(q_gamma_prefactor(nu, b)? * x / (x - 1.0) * f)
}

/// The same entry written with Gauss functions of argument `1 − x`:
///
/// `Q_{b,ℓ} = −Γ(ℓ)Γ(1−bν)/Γ(ℓ+1−bν) · x^{1+b}/(1−x)
///   · [ν(b−ℓ) F(b(1−ν), ℓ; ℓ+1−bν; 1−x) + (ℓ−bν) F(b(1−ν), ℓ; ℓ−bν; 1−x)]`.
///
/// Needs `|1 − x| < 1`.
pub fn q_entry_shifted(params: &Params, b: usize, l: usize) -> Result<C64> {
    let (x, nu) = (params.x(), params.nu());
    let (bf, lf) = (b as f64, l as f64);
    let lc = C64::new(lf, 0.0);
    let pre = -GammaRatio::new(vec![lc, 1.0 - nu * bf], vec![lf + 1.0 - nu * bf]).eval()?
        * x.powu(b as u32 + 1)
        / (1.0 - x);
    let a1 = bf * (1.0 - nu);
    let f1 = gauss_f_series(a1, lc, lf + 1.0 - nu * bf, 1.0 - x)?;
    let f2 = gauss_f_series(a1, lc, lf - nu * bf, 1.0 - x)?;
    Ok(pre * (nu * (bf - lf) * f1 + (lf - nu * bf) * f2))
}

pub fn build_q(params: &Params, n: usize) -> Result<TriMatrix> {
    TriMatrix::try_from_fn(n, |b, l| q_entry(params, b, l))
}

/// The system matrix `(−1)^ℓ C(b,ℓ) Q_{b,ℓ}` acting on `E`.
pub fn build_system(params: &Params, n: usize) -> Result<TriMatrix> {
    TriMatrix::try_from_fn(n, |b, l| Ok(q_entry(params, b, l)? * sign(l) * binomial(b, l)))
}

/// Coefficients `K_b = Σ_ℓ (−1)^ℓ C(b,ℓ) Q_{b,ℓ} E_ℓ` of `L f` in the
/// alternating convention, for `b ≤ order`.
pub fn forward_apply(params: &Params, f: &EntireSeries, order: usize) -> Result<SignedSeries> {
    let sys = build_system(params, order)?;
    SignedSeries::new(sys.apply(f.coeffs()))
}

/// `K̃_b = Γ(b−bν)/(Γ(b)Γ(1−bν)) · ((x−1)/x) · K_b`.
pub fn scaled_k(params: &Params, k: &SignedSeries) -> Result<Vec<C64>> {
    let x = params.x();
    (1..=k.order())
        .map(|b| Ok(k.coeff(b) / q_gamma_prefactor(params.nu(), b)? * (x - 1.0) / x))
        .collect()
}

/// Solves the triangular system for `E` given the alternating coefficients
/// of `K`:
/// `E_b = ((x−1)/x) Σ_ℓ (−1)^ℓ C(b,ℓ) F(ℓ−b, ℓν; ℓ; x) Γ(ℓ−ℓν)/(Γ(ℓ)Γ(1−ℓν)) K_ℓ`.
pub fn solve_system(params: &Params, k: &SignedSeries) -> Result<EntireSeries> {
    let (x, nu) = (params.x(), params.nu());
    let n = k.order();
    let weights: Vec<C64> = (1..=n)
        .map(|l| Ok(k.coeff(l) / q_gamma_prefactor(nu, l)?))
        .collect::<Result<_>>()?;
    let mut e = Vec::with_capacity(n);
    for b in 1..=n {
        let mut acc = C64::new(0.0, 0.0);
        for l in 1..=b {
            let lf = l as f64;
            let f = gauss_f_poly(b - l, nu * lf, C64::new(lf, 0.0), x)?;
            acc += f * sign(l) * binomial(b, l) * weights[l - 1];
        }
        e.push(acc * (x - 1.0) / x);
    }
    EntireSeries::new(e)
}

/// `e^z Σ_k (−1)^k T_k z^k/k! Φ(kν; k; −xz)`.
pub fn egf_identity_eval(params: &Params, t_seq: &SignedSeries, z: C64) -> Result<C64> {
    let (x, nu) = (params.x(), params.nu());
    let mut acc = C64::new(0.0, 0.0);
    let mut power = C64::new(1.0, 0.0);
    for k in 1..=t_seq.order() {
        power *= z / k as f64;
        let tk = t_seq.coeff(k);
        if tk == C64::new(0.0, 0.0) {
            continue;
        }
        let kf = k as f64;
        let phi = confluent_phi_series(nu * kf, C64::new(kf, 0.0), -x * z)?;
        acc += tk * sign(k) * power * phi;
    }
    Ok(z.exp() * acc)
}

/// Matrix side of the generating-function identity: `Σ_n (B·T)_n z^n/n!`
/// with `B` built to `order` (the product does not terminate, so `order`
/// should exceed the length of `T` by enough for the tail to be negligible).
pub fn egf_matrix_route(params: &Params, t_seq: &SignedSeries, z: C64, order: usize) -> Result<C64> {
    let b = build_b(params, order)?;
    let s = EntireSeries::new(b.apply(t_seq.coeffs()))?;
    Ok(s.eval(z))
}
