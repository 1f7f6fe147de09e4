//! Complex log-gamma via the Lanczos approximation (g = 7, 9 terms).

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS: [f64; 9] = [
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

/// ln Gamma(z) up to multiples of 2 pi i (callers only exponentiate it or
/// use differences, so the branch is irrelevant). Returns infinity at the
/// poles z = 0, -1, -2, ...
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: lnG(z) = ln(pi / sin(pi z)) - lnG(1 - z)
        let s = (PI * z).sin();
        if s.norm() == 0.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn matches_real_factorials() {
        for n in 1..10u32 {
            let g = ln_gamma(Complex64::new(n as f64 + 1.0, 0.0)).exp();
            let fact: f64 = (1..=n).map(f64::from).product();
            assert_relative_eq!(g.re, fact, max_relative = 1e-13);
            assert!(g.im.abs() < 1e-12 * fact);
        }
    }

    #[test]
    fn half_integer_value() {
        // Gamma(1/2) = sqrt(pi)
        let g = ln_gamma(Complex64::new(0.5, 0.0)).exp();
        assert_relative_eq!(g.re, PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn functional_equation_complex() {
        // Gamma(z+1) = z Gamma(z) exercised off the real axis
        for &(re, im) in &[(0.3, 0.7), (-2.4, 1.1), (4.2, -3.3), (0.5, 20.0)] {
            let z = Complex64::new(re, im);
            let lhs = ln_gamma(z + 1.0).exp();
            let rhs = z * ln_gamma(z).exp();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
        }
    }

    #[test]
    fn reflection_zone_spot_value() {
        // Gamma(-2.3 + 0.5i) cross-checked against a 50-digit evaluation
        let g = ln_gamma(Complex64::new(-2.3, 0.5)).exp();
        let want = Complex64::new(-0.224_010_804_275_754_42, -0.448_696_006_282_789_85);
        assert!((g - want).norm() < 1e-11 * want.norm());
    }
}
