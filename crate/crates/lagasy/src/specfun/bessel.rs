//! Bessel J_nu for real order nu > -1 and complex argument.
//!
//! Power series in double-double for |z| <= 12 (alternating, loses ~|z|/ln 10
//! digits in plain doubles), Hankel large-argument asymptotics beyond. The
//! derivative uses J'_nu = (J_{nu-1} - J_{nu+1})/2.

use super::{gamma, log_gamma};
use crate::dd::{Dd, DdComplex};
use crate::{Error, Result};
use num_complex::Complex64;

const SWITCH_RADIUS: f64 = 12.0;

/// J_nu(z) as (mantissa, log_scale).
pub fn bessel_j_scaled(nu: f64, z: Complex64) -> Result<(Complex64, f64)> {
    if !(nu > -2.0) {
        return Err(Error::OrderOutOfRange(nu));
    }
    if !z.is_finite() || z.norm() > 1e12 {
        return Err(Error::RangeExceeded(format!("|z| = {}", z.norm())));
    }
    if nu < -0.5 && (nu - nu.round()).abs() < 1e-12 {
        // negative integer order: J_{-n} = (-1)^n J_n
        let n = (-nu.round()) as i32;
        let (m, ls) = bessel_j_scaled(-nu, z)?;
        let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
        return Ok((sgn * m, ls));
    }
    if z.norm() <= SWITCH_RADIUS {
        Ok((series_dd(nu, z), 0.0))
    } else {
        Ok(hankel(nu, z))
    }
}

pub fn bessel_j(nu: f64, z: Complex64) -> Result<Complex64> {
    let (m, ls) = bessel_j_scaled(nu, z)?;
    Ok(m * ls.exp())
}

/// J'_nu(z) as (mantissa, log_scale).
pub fn bessel_j_prime_scaled(nu: f64, z: Complex64) -> Result<(Complex64, f64)> {
    let (a, la) = bessel_j_scaled(nu - 1.0, z)?;
    let (b, lb) = bessel_j_scaled(nu + 1.0, z)?;
    let ls = la.max(lb);
    Ok(((a * (la - ls).exp() - b * (lb - ls).exp()) * 0.5, ls))
}

pub fn bessel_j_prime(nu: f64, z: Complex64) -> Result<Complex64> {
    let (m, ls) = bessel_j_prime_scaled(nu, z)?;
    Ok(m * ls.exp())
}

fn series_dd(nu: f64, z: Complex64) -> Complex64 {
    if z.norm() == 0.0 {
        return if nu == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if nu > 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    let q = {
        let zd = DdComplex::from_f64(z.re, z.im);
        (zd * zd).scale(Dd::from_f64(0.25))
    };
    let mut term = DdComplex::from_f64(1.0, 0.0);
    let mut sum = term;
    for k in 0..160 {
        let kf = k as f64;
        let div = Dd::from_f64(kf + 1.0) * (Dd::from_f64(nu) + Dd::from_f64(kf + 1.0));
        term = (term * q).div_scalar(-div);
        sum = sum + term;
        if term.norm_f64() < 1e-36 * sum.norm_f64().max(1.0) {
            break;
        }
    }
    // prefactor (z/2)^nu / Gamma(nu+1); fine in plain doubles (no cancellation)
    let pref = if nu == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        let g = if nu > -1.0 {
            log_gamma(nu + 1.0).exp()
        } else {
            gamma(nu + 1.0)
        };
        ((z / 2.0).ln() * nu).exp() / g
    };
    pref * sum.to_c64()
}

/// a_k(nu) = prod_{j=1..k}(4nu^2-(2j-1)^2)/(k! 8^k), the Hankel coefficients.
fn hankel_a(nu: f64, kmax: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(kmax + 1);
    a.push(1.0);
    let mu = 4.0 * nu * nu;
    for k in 1..=kmax {
        let kf = k as f64;
        let prev = a[k - 1];
        a.push(prev * (mu - (2.0 * kf - 1.0) * (2.0 * kf - 1.0)) / (kf * 8.0));
    }
    a
}

fn hankel(nu: f64, z: Complex64) -> (Complex64, f64) {
    let a = hankel_a(nu, 40);
    let mut p = Complex64::new(1.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    let z2 = z * z;
    let mut pow = Complex64::new(1.0, 0.0); // z^{-2k}
    let mut last = f64::INFINITY;
    for k in 0..20 {
        if 2 * k + 1 >= a.len() {
            break;
        }
        if k > 0 {
            pow /= z2;
            let t = a[2 * k] * pow;
            if t.norm() > last {
                break;
            }
            last = t.norm();
            p += if k % 2 == 1 { -t } else { t };
        }
        let tq = a[2 * k + 1] * pow / z;
        q += if k % 2 == 1 { -tq } else { tq };
        if (a[2 * k + 1] * pow / z).norm() < 1e-18 {
            break;
        }
    }
    let omega = z - (nu * 0.5 + 0.25) * std::f64::consts::PI;
    // scaled cos/sin: ls = |Im omega|
    let ls = omega.im.abs();
    let eip = (Complex64::new(0.0, 1.0) * omega - Complex64::new(ls, 0.0)).exp();
    let eim = (-Complex64::new(0.0, 1.0) * omega - Complex64::new(ls, 0.0)).exp();
    let cosw = 0.5 * (eip + eim);
    let sinw = Complex64::new(0.0, -0.5) * (eip - eim);
    let pref = (2.0 / (std::f64::consts::PI * z)).sqrt();
    (pref * (cosw * p - sinw * q), ls)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn j0_at_zero_and_half_order() {
        assert_eq!(bessel_j(0.0, Complex64::new(0.0, 0.0)).unwrap().re, 1.0);
        // J_{1/2}(x) = sqrt(2/(pi x)) sin x at x = 2
        let got = bessel_j(0.5, Complex64::new(2.0, 0.0)).unwrap();
        let want = (2.0 / (std::f64::consts::PI * 2.0)).sqrt() * 2f64.sin();
        assert!(rel(got, Complex64::new(want, 0.0)) < 1e-13, "got {got} want {want}");
    }

    #[test]
    fn half_order_terminating_consistency() {
        // alpha = 1/2 at |z| = 12: both branches, asymptotics terminate
        for &arg in &[0.0f64, 0.7, -1.1] {
            let z = Complex64::from_polar(12.0, arg);
            let s = series_dd(0.5, z);
            let (m, ls) = hankel(0.5, z);
            let h = m * ls.exp();
            assert!(rel(s, h) < 1e-11, "arg {arg}: {s} vs {h}");
        }
    }

    #[test]
    fn generic_order_consistency_at_switch() {
        for &nu in &[0.0f64, 0.3, 2.8] {
            let z = Complex64::new(12.0, 0.0);
            let s = series_dd(nu, z);
            let (m, ls) = hankel(nu, z);
            let h = m * ls.exp();
            assert!(rel(s, h) < 5e-11, "nu {nu}: {s} vs {h}");
        }
    }

    #[test]
    fn complex_reference_values() {
        // frozen independent references
        let got = bessel_j(0.3, Complex64::new(14.0, -2.0)).unwrap();
        let want = Complex64::new(0.77569778800027278672, 0.18675095786216903515);
        assert!(rel(got, want) < 1e-12, "got {got}");
        let got = bessel_j(2.8, Complex64::new(0.7, 0.2)).unwrap();
        let want = Complex64::new(0.0088432234561054582839, 0.0084169013603983158819);
        assert!(rel(got, want) < 1e-12, "got {got}");
    }

    #[test]
    fn derivative_identity() {
        // J_0' = -J_1
        let z = Complex64::new(3.7, 0.4);
        let d = bessel_j_prime(0.0, z).unwrap();
        let j1 = bessel_j(1.0, z).unwrap();
        assert!(rel(d, -j1) < 1e-12);
    }

    #[test]
    fn real_argument_is_real() {
        for &nu in &[0.0, 0.5, 2.8] {
            for &x in &[0.3, 5.0, 30.0] {
                let v = bessel_j(nu, Complex64::new(x, 0.0)).unwrap();
                assert!(v.im.abs() <= 1e-13 * v.norm().max(1e-300), "nu={nu} x={x}: {v}");
            }
        }
    }

    #[test]
    fn order_out_of_range() {
        assert!(bessel_j(-2.5, Complex64::new(1.0, 0.0)).is_err());
    }
}
