//! Self-contained special functions needed by the expansions: Airy Ai/Ai',
//! Bessel J_nu (real order, complex argument), modified Bessel I_0/I_1,
//! log-gamma and Lambert W_0. Implemented in-repo so branch cuts stay under
//! our control.

mod airy;
mod bessel;

pub use airy::{airy_ai, airy_ai_prime, airy_ai_prime_scaled, airy_ai_scaled};
pub use bessel::{bessel_j, bessel_j_prime, bessel_j_prime_scaled, bessel_j_scaled};

use crate::{Error, Result};

// Lanczos coefficients, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of Gamma(x) for real x > 0; relative accuracy ~1e-14.
pub fn log_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "log_gamma needs x > 0, got {x}");
    if x < 0.5 {
        // reflection keeps the series well conditioned near 0
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - log_gamma(1.0 - x);
    }
    let xm1 = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (xm1 + i as f64);
    }
    let t = xm1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (xm1 + 0.5) * t.ln() - t + a.ln()
}

/// Gamma(x) for real x, any sign (poles at non-positive integers).
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 {
        log_gamma(x).exp()
    } else {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let s = (std::f64::consts::PI * x).sin();
        std::f64::consts::PI / (s * gamma(1.0 - x))
    }
}

/// Principal branch of the Lambert W function for x >= -1/e.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let lower = -(-1.0f64).exp();
    if !(x >= lower) {
        return Err(Error::DomainError(format!("lambert_w0 needs x >= -1/e, got {x}")));
    }
    let mut w = if x > std::f64::consts::E {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    } else if x > -0.25 {
        let l = (1.0 + x).ln();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        // near the branch point
        let p = (2.0 * (1.0 + std::f64::consts::E * x)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0
    };
    for _ in 0..40 {
        let e = w.exp();
        let f = w * e - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        let delta = f / (e * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= delta;
        if delta.abs() <= 1e-16 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// Modified Bessel I_0 or I_1 for real x >= 0.
pub fn bessel_i01(order: u8, x: f64) -> f64 {
    assert!(order <= 1);
    assert!(x >= 0.0 && x.is_finite());
    let nu = order as f64;
    if x == 0.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    if x <= 30.0 {
        // positive-term power series, no cancellation; Gamma(1) = Gamma(2) = 1
        let q = 0.25 * x * x;
        let mut term = (0.5 * x).powi(order as i32);
        let mut sum = term;
        for k in 1..400 {
            term *= q / (k as f64 * (k as f64 + nu));
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum
    } else {
        // large-argument asymptotics, truncated at the smallest term
        let mut sum = 1.0f64;
        let mut term = 1.0f64;
        let mu = 4.0 * nu * nu;
        let mut last = f64::INFINITY;
        for k in 1..80 {
            let kf = k as f64;
            term *= -(mu - (2.0 * kf - 1.0) * (2.0 * kf - 1.0)) / (8.0 * kf * x);
            if term.abs() > last {
                break;
            }
            last = term.abs();
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        x.exp() / (2.0 * std::f64::consts::PI * x).sqrt() * sum
    }
}
