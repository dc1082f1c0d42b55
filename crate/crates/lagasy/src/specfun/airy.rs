//! Airy Ai and Ai' for complex argument.
//!
//! Maclaurin series for |z| <= 9 evaluated in double-double arithmetic (the
//! two solution branches cancel like e^{2 zeta} there, which plain doubles
//! cannot survive at this radius), asymptotic expansions beyond. For
//! |arg z| > 2 pi/3 the asymptotic branch goes through the connection formula
//! Ai(z) = -w Ai(w z) - w^2 Ai(w^2 z), w = e^{2 pi i/3}, so the negative real
//! axis is covered as well.

use super::log_gamma;
use crate::dd::{Dd, DdComplex};
use num_complex::Complex64;

const SWITCH_RADIUS: f64 = 9.0;
const SECTOR: f64 = 2.0 * std::f64::consts::PI / 3.0;

// Ai(0), Ai'(0) as double-double pairs (3^{-2/3}/Gamma(2/3), -3^{-1/3}/Gamma(1/3)).
const AI0: Dd = Dd { hi: 0.3550280538878172, lo: 2.05233632436212e-17 };
const AIP0: Dd = Dd { hi: -0.2588194037928068, lo: 2.522243111610832e-17 };

/// Ai(z) as (mantissa, log_scale): Ai = mantissa * exp(log_scale).
pub fn airy_ai_scaled(z: Complex64) -> (Complex64, f64) {
    airy_scaled(z).0
}

/// Ai'(z) as (mantissa, log_scale).
pub fn airy_ai_prime_scaled(z: Complex64) -> (Complex64, f64) {
    airy_scaled(z).1
}

pub fn airy_ai(z: Complex64) -> Complex64 {
    let (m, ls) = airy_ai_scaled(z);
    m * ls.exp()
}

pub fn airy_ai_prime(z: Complex64) -> Complex64 {
    let (m, ls) = airy_ai_prime_scaled(z);
    m * ls.exp()
}

fn airy_scaled(z: Complex64) -> ((Complex64, f64), (Complex64, f64)) {
    if z.norm() <= SWITCH_RADIUS {
        let (ai, aip) = series_dd(z);
        ((ai, 0.0), (aip, 0.0))
    } else if z.arg().abs() <= SECTOR {
        asymptotic(z)
    } else {
        connection(z)
    }
}

/// Maclaurin series in double-double. Four accumulators: f, f', g, g' with
/// Ai = c1 f - c2 g, Ai' = c1 f' - c2 g'.
fn series_dd(z: Complex64) -> (Complex64, Complex64) {
    let zd = DdComplex::from_f64(z.re, z.im);
    let z3 = zd * zd * zd;
    let half = Dd::from_f64(0.5);

    let mut tf = DdComplex::from_f64(1.0, 0.0); // z^{3k} terms of f
    let mut te = (zd * zd).scale(half); // z^{3k+2} terms of f'
    let mut tg = zd; // z^{3k+1} terms of g
    let mut tv = DdComplex::from_f64(1.0, 0.0); // z^{3k} terms of g'

    let mut f = tf;
    let mut fp = te;
    let mut g = tg;
    let mut gp = tv;

    for k in 0..120 {
        let kf = k as f64;
        tf = (tf * z3).div_scalar(Dd::from_f64((3.0 * kf + 2.0) * (3.0 * kf + 3.0)));
        te = (te * z3).div_scalar(Dd::from_f64((3.0 * kf + 3.0) * (3.0 * kf + 5.0)));
        tg = (tg * z3).div_scalar(Dd::from_f64((3.0 * kf + 3.0) * (3.0 * kf + 4.0)));
        tv = (tv * z3).div_scalar(Dd::from_f64((3.0 * kf + 1.0) * (3.0 * kf + 3.0)));
        f = f + tf;
        fp = fp + te;
        g = g + tg;
        gp = gp + tv;
        let biggest = tf.norm_f64().max(tg.norm_f64());
        if biggest < 1e-40 * (f.norm_f64() + g.norm_f64()) {
            break;
        }
    }
    let c2 = -AIP0; // 3^{-1/3}/Gamma(1/3) > 0
    let ai = f.scale(AI0) - g.scale(c2);
    let aip = fp.scale(AI0) - gp.scale(c2);
    (ai.to_c64(), aip.to_c64())
}

/// u_k, v_k coefficients of the large-z expansions, v_k = -(6k+1)/(6k-1) u_k.
fn uv(k: usize) -> (f64, f64) {
    let kf = k as f64;
    if k == 0 {
        return (1.0, 1.0);
    }
    let u = (log_gamma(3.0 * kf + 0.5) - kf * 54f64.ln() - log_gamma(kf + 1.0)
        - log_gamma(kf + 0.5))
        .exp();
    let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
    (u, v)
}

/// Asymptotic expansion, |arg z| < pi. Returns ((Ai mant, ls), (Ai' mant, ls)).
fn asymptotic(z: Complex64) -> ((Complex64, f64), (Complex64, f64)) {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let ls = -zeta.re;
    let phase = Complex64::new(0.0, -zeta.im).exp();
    let mut s = Complex64::new(1.0, 0.0);
    let mut sp = Complex64::new(1.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..80 {
        pow /= zeta;
        let (u, v) = uv(k);
        let term = u * pow;
        if term.norm() > last {
            break; // divergent tail reached
        }
        last = term.norm();
        let sgn = if k % 2 == 1 { -1.0 } else { 1.0 };
        s += sgn * term;
        sp += sgn * v * pow;
        if last < 1e-18 {
            break;
        }
    }
    let pref = 0.5 / std::f64::consts::PI.sqrt();
    let z14 = z.powf(0.25);
    let ai = (pref * phase / z14 * s, ls);
    let aip = (-pref * phase * z14 * sp, ls);
    (ai, aip)
}

/// Connection formula for the sector around the negative real axis.
fn connection(z: Complex64) -> ((Complex64, f64), (Complex64, f64)) {
    let om = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let om2 = om * om;
    let ((a1, l1), (d1, _)) = asymptotic(om * z);
    let ((a2, l2), (d2, _)) = asymptotic(om2 * z);
    let ls = l1.max(l2);
    let ai = (-om * a1 * (l1 - ls).exp() - om2 * a2 * (l2 - ls).exp(), ls);
    let aip = (-om2 * d1 * (l1 - ls).exp() - om * d2 * (l2 - ls).exp(), ls);
    (ai, aip)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn values_at_zero() {
        // 3^{-2/3}/Gamma(2/3) and -3^{-1/3}/Gamma(1/3), evaluated via log_gamma
        let ai0 = (-(2.0 / 3.0) * 3f64.ln() - log_gamma(2.0 / 3.0)).exp();
        let aip0 = -(-(1.0 / 3.0) * 3f64.ln() - log_gamma(1.0 / 3.0)).exp();
        assert!((airy_ai(Complex64::new(0.0, 0.0)).re - ai0).abs() < 1e-15);
        assert!((airy_ai_prime(Complex64::new(0.0, 0.0)).re - aip0).abs() < 1e-15);
    }

    #[test]
    fn real_axis_reference() {
        // frozen reference values
        let cases = [
            (1.0, 0.13529241631288141552, -0.15914744129679321279),
            (9.0, 2.4711684308724898433e-9, f64::NAN),
            (-9.0, -0.022133721547341403674, f64::NAN),
        ];
        for &(x, ai, aip) in &cases {
            let got = airy_ai(Complex64::new(x, 0.0));
            assert!(rel(got, Complex64::new(ai, 0.0)) < 1e-13, "Ai({x}) = {got}");
            if aip.is_finite() {
                let gotp = airy_ai_prime(Complex64::new(x, 0.0));
                assert!(rel(gotp, Complex64::new(aip, 0.0)) < 1e-13);
            }
        }
    }

    #[test]
    fn complex_reference() {
        let got = airy_ai(Complex64::new(12.0, 5.0));
        let want = Complex64::new(2.1001897847642027252e-13, 7.8727254711601254371e-13);
        assert!(rel(got, want) < 1e-12, "got {got}");
    }

    #[test]
    fn two_branch_consistency_at_switch() {
        // series and asymptotic agree at the switch radius to <= 10x target
        for &arg in &[0.0f64, 0.5, 1.5, 2.0] {
            let z = Complex64::from_polar(9.0, arg);
            let (s, _) = series_dd(z);
            let ((m, ls), _) = asymptotic(z);
            let a = m * ls.exp();
            assert!(rel(s, a) < 1e-12, "arg {arg}: {s} vs {a}");
        }
    }

    #[test]
    fn negative_axis_oscillation_scaled() {
        // Ai on the negative real axis must be real and O(|z|^{-1/4})
        for &x in &[-15.0, -40.0, -200.0] {
            let (m, ls) = airy_ai_scaled(Complex64::new(x, 0.0));
            assert!(ls.abs() < 1e-9, "ls {ls}");
            assert!(m.im.abs() < 1e-12 * m.norm());
            assert!(m.norm() < 1.0);
        }
    }
}
