//! Standard normal density and CDF.

const SQRT_2PI: f64 = 2.5066282746310002;

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Phi(x) via the complementary error function, good to ~1 ulp.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}
