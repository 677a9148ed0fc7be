use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::C64;

// Lanczos approximation, g = 671/128, 14 terms.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;

pub fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln Γ(z)`; reflection is used for `Re z < 1/2`. Only `exp` of the result
/// (and of differences of results) is branch independent.
pub fn log_gamma(z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole { what: "gamma", at: z });
    }
    if z.re < 0.5 {
        let pi = C64::new(PI, 0.0);
        return Ok(pi.ln() - ln_sin_pi(z) - lanczos(1.0 - z));
    }
    Ok(lanczos(z))
}

pub fn gamma(z: C64) -> Result<C64> {
    log_gamma(z).map(|l| l.exp())
}

fn lanczos(z: C64) -> C64 {
    let tmp = z + LANCZOS_G;
    let tmp = (z + 0.5) * tmp.ln() - tmp;
    let mut ser = C64::new(LANCZOS_C0, 0.0);
    for (j, &c) in LANCZOS.iter().enumerate() {
        ser += c / (z + (j + 1) as f64);
    }
    tmp + (ser * SQRT_TWO_PI).ln() - z.ln()
}

/// `ln sin(πz)` without overflow for large `|Im z|`.
fn ln_sin_pi(z: C64) -> C64 {
    let w = z * PI;
    if w.im.abs() < 20.0 {
        return w.sin().ln();
    }
    // sin w = (i/2) e^{−iw} (1 − e^{2iw}) for Im w > 0, conjugate otherwise
    let i = C64::new(0.0, 1.0);
    if w.im > 0.0 {
        -i * w + (i * 0.5).ln() + (1.0 - (i * w * 2.0).exp()).ln()
    } else {
        i * w + (-i * 0.5).ln() + (1.0 - (-i * w * 2.0).exp()).ln()
    }
}

/// `Π Γ(numerator) / Π Γ(denominator)`, summed in logarithms so that the
/// ratio stays finite when the individual factors overflow.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GammaRatio {
    pub numerator_args: Vec<C64>,
    pub denominator_args: Vec<C64>,
}

impl GammaRatio {
    pub fn new(numerator_args: Vec<C64>, denominator_args: Vec<C64>) -> Self {
        Self { numerator_args, denominator_args }
    }

    pub fn ln(&self) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for &a in &self.numerator_args {
            acc += log_gamma(a)?;
        }
        for &a in &self.denominator_args {
            acc -= log_gamma(a)?;
        }
        Ok(acc)
    }

    pub fn eval(&self) -> Result<C64> {
        self.ln().map(|l| l.exp())
    }
}
