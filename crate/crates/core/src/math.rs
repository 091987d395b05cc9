//! Small numeric helpers shared across modules.

/// log2(e), used when converting natural-log bounds to bits.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Binary entropy in bits. `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Binary convolution `a ⊛ b = a(1−b) + b(1−a)`, the crossover of two
/// cascaded binary-symmetric perturbations.
pub fn binary_convolution(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// Standard normal CDF via the complementary error function.
///
/// `libm::erfc` is a correctly-rounded-to-within-1-ulp port of the musl
/// implementation, so the absolute error here is far below 1e-12.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}
