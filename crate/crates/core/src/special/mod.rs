//! Special functions: complex log-gamma, Gauss hypergeometric polynomials
//! and series, and Kummer's confluent function by series and loop contour.

mod confluent;
mod gamma;
mod hyper;

pub use confluent::{confluent_phi_contour, confluent_phi_contour_with, confluent_phi_series};
pub use gamma::{gamma, is_nonpositive_integer, log_gamma, GammaRatio};
pub use hyper::{gauss_f, gauss_f_poly, gauss_f_series};
