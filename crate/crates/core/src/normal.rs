//! Standard normal CDF and quantile.

use statrs::distribution::{ContinuousCDF, Normal};

fn standard() -> Normal {
    Normal::standard()
}

/// `Φ(x)`.
pub fn cdf(x: f64) -> f64 {
    standard().cdf(x)
}

/// `Φ⁻¹(p)` for `p` in `(0, 1)`.
pub fn quantile(p: f64) -> f64 {
    standard().inverse_cdf(p)
}
