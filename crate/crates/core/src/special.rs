//! Gamma function via the Lanczos approximation (g = 7, nine terms).
//!
//! Only half-integer arguments up to ~15 occur in this crate; the
//! approximation is accurate to a few ulps there.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real x, using reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * series
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(k: u32) -> f64 {
        (1..=k).map(f64::from).product()
    }

    #[test]
    fn integer_arguments_match_factorials() {
        for k in 1..=20u32 {
            let exact = factorial(k - 1);
            let rel = (gamma(f64::from(k)) - exact).abs() / exact;
            assert!(rel <= 1e-13, "Γ({k}) rel err {rel:e}");
        }
    }

    #[test]
    fn half_integer_arguments_match_closed_form() {
        // Γ(k + 1/2) = (2k)! √π / (4^k k!)
        for k in 0..=19u32 {
            let exact = factorial(2 * k) * PI.sqrt() / (4f64.powi(k as i32) * factorial(k));
            let x = f64::from(k) + 0.5;
            let rel = (gamma(x) - exact).abs() / exact;
            assert!(rel <= 1e-13, "Γ({x}) rel err {rel:e}");
        }
    }

    #[test]
    fn reflection_gives_gamma_of_minus_half() {
        let exact = -2.0 * PI.sqrt();
        assert!((gamma(-0.5) - exact).abs() < 1e-13);
    }
}
