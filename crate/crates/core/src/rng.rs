//! Seeded random draws. The generator is SplitMix64, so streams are
//! reproducible from a single `u64` seed on every platform.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::series::EntireSeries;
use crate::C64;

#[derive(Debug, Clone)]
pub struct Draws {
    rng: SplitMix64,
}

impl Draws {
    pub fn new(seed: u64) -> Self {
        Self { rng: SplitMix64::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Uniform in the rectangle `[re.0, re.1] × [im.0, im.1]`.
    pub fn complex_box(&mut self, re: (f64, f64), im: (f64, f64)) -> C64 {
        C64::new(self.uniform(re.0, re.1), self.uniform(im.0, im.1))
    }

    /// Uniform in the disc `|z| ≤ r`.
    pub fn complex_disc(&mut self, r: f64) -> C64 {
        let rho = r * self.uniform(0.0, 1.0).sqrt();
        C64::from_polar(rho, self.uniform(0.0, std::f64::consts::TAU))
    }

    /// Uniform in the annulus `r_min ≤ |z| ≤ r_max`.
    pub fn complex_annulus(&mut self, r_min: f64, r_max: f64) -> C64 {
        let rho = (self.uniform(r_min * r_min, r_max * r_max)).sqrt();
        C64::from_polar(rho, self.uniform(0.0, std::f64::consts::TAU))
    }

    /// A series with coefficients uniform in the unit box scaled by `scale`.
    pub fn series(&mut self, order: usize, scale: f64) -> EntireSeries {
        let coeffs = (0..order).map(|_| self.complex_box((-scale, scale), (-scale, scale))).collect();
        EntireSeries::new(coeffs).expect("order >= 1")
    }
}
