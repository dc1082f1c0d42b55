//! Independent reference values: classical recurrence evaluation, extended
//! precision Stieltjes recurrence coefficients for general weights, and
//! weighted integration. Everything here stays independent of the asymptotic
//! machinery it checks.

use crate::dd::{Dd, DdComplex};
use crate::specfun::log_gamma;
use crate::weight::{QKind, WeightSpec};
use crate::{Error, Result};
use num_complex::Complex64;

/// Recurrence coefficients a_0..a_{N-1}, b_0..b_{N-1} with mu0 = int w.
#[derive(Clone, Debug)]
pub struct RecurrenceTable {
    pub a: Vec<Dd>,
    pub b: Vec<Dd>,
    pub mu0: Dd,
    pub precision_digits: u32,
}

/// Orthonormal classical Laguerre value by the three-term recurrence with
/// exact coefficients, log-scaled to dodge overflow. Error floor ~1e-14.
pub fn classical_eval(alpha: f64, n: usize, x: Complex64) -> (Complex64, f64) {
    let mut ls = -0.5 * log_gamma(alpha + 1.0);
    let mut p_prev = Complex64::new(0.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let kf = k as f64;
        let a_k = 2.0 * kf + alpha + 1.0;
        let b_k = ((kf + 1.0) * (kf + 1.0 + alpha)).sqrt();
        let b_km1 = if k > 0 { (kf * (kf + alpha)).sqrt() } else { 0.0 };
        let p_next = ((x - a_k) * p - b_km1 * p_prev) / b_k;
        p_prev = p;
        p = p_next;
        let m = p.norm().max(p_prev.norm());
        if m > 1e120 {
            p /= m;
            p_prev /= m;
            ls += m.ln();
        }
    }
    (p, ls)
}

/// Orthonormal value from a recurrence table, in double-double, log-scaled.
/// Returns (mantissa, log_scale) with value = mantissa * exp(log_scale).
pub fn oracle_eval(tbl: &RecurrenceTable, n: usize, x: Complex64) -> Result<(DdComplex, Dd)> {
    if n >= tbl.a.len() + 1 {
        return Err(Error::DegreeExceedsTable(n, tbl.a.len()));
    }
    let xd = DdComplex::from_f64(x.re, x.im);
    let mut ls = Dd::ZERO;
    let mut p_prev = DdComplex::ZERO;
    let mut p = DdComplex::new(Dd::ONE / tbl.mu0.sqrt(), Dd::ZERO);
    for k in 0..n {
        let ak = DdComplex::new(tbl.a[k], Dd::ZERO);
        let bk = tbl.b[k];
        let bkm1 = if k > 0 { tbl.b[k - 1] } else { Dd::ZERO };
        let num = (xd - ak) * p - p_prev.scale(bkm1);
        let p_next = num.scale(bk.recip());
        p_prev = p;
        p = p_next;
        let m = p.norm_f64().max(p_prev.norm_f64());
        if m > 1e120 {
            let inv = Dd::from_f64(m).recip();
            p = p.scale(inv);
            p_prev = p_prev.scale(inv);
            ls = ls + Dd::from_f64(m).ln();
        }
    }
    Ok((p, ls))
}

/// tanh-sinh nodes/weights for [0, bound] at the given level, in dd.
fn ts_nodes_dd(bound: Dd, level: u32) -> Vec<(Dd, Dd)> {
    let h = Dd::from_f64(2f64.powi(-(level as i32)));
    let pi2 = Dd::PI * Dd::from_f64(0.5);
    let half = bound * Dd::from_f64(0.5);
    let mut out = Vec::new();
    let t_cut = 6.8;
    let jmax = (t_cut / 2f64.powi(-(level as i32))) as i64;
    for j in 0..=jmax {
        let t = h * Dd::from_f64(j as f64);
        let sh = pi2 * t.sinh();
        // 1 - tanh(sh) via exp, cancellation-free (sh >= 0 here)
        let e2 = (-(sh + sh)).exp();
        let em = (e2 + e2) / (Dd::ONE + e2);
        let ch = sh.cosh();
        if !ch.hi.is_finite() {
            break; // weight underflows beyond this point
        }
        let w = pi2 * t.cosh() / (ch * ch);
        if w.hi < 1e-260 {
            break;
        }
        let x_hi = bound - half * em;
        let x_lo = half * em;
        if j == 0 {
            out.push((x_lo, w * half * h));
            continue;
        }
        if x_hi.hi > 0.0 && x_hi.hi < bound.hi {
            out.push((x_hi, w * half * h));
        }
        if x_lo.hi > 0.0 && x_lo.hi < bound.hi {
            out.push((x_lo, w * half * h));
        }
    }
    out
}

/// Domain cut X with w(X) X^{2N+2} below the precision target.
fn tail_cut(w: &WeightSpec, n_max: usize, digits: u32) -> Result<f64> {
    let target = -((digits + 8) as f64) * 10f64.ln();
    let logw = |x: f64| -> Result<f64> {
        let q = w.q(Complex64::new(x, 0.0))?.re;
        Ok(w.alpha * x.ln() - q + (2 * n_max + 2) as f64 * x.ln())
    };
    let mut x = 2.0;
    for _ in 0..200 {
        if logw(x)? < target {
            return Ok(x);
        }
        x *= 1.3;
        if x > 1e8 {
            break;
        }
    }
    Err(Error::TailTruncationFailure)
}

/// Discretized Stieltjes: recurrence coefficients of the weight by repeated
/// discrete inner products on a tanh-sinh grid, in double-double.
pub fn stieltjes_coeffs(w: &WeightSpec, n_coeffs: usize, digits: u32) -> Result<RecurrenceTable> {
    if n_coeffs > 260 {
        return Err(Error::PrecisionUnreachable("N <= 256 supported".into()));
    }
    let x_cut = tail_cut(w, n_coeffs, digits)?;
    let mut prev: Option<RecurrenceTable> = None;
    for level in [9u32, 10, 11] {
        let t = stieltjes_at_level(w, n_coeffs, digits, x_cut, level)?;
        if let Some(p) = &prev {
            // self-consistency between successive node densities
            let mut worst = 0.0f64;
            for k in 0..n_coeffs {
                let da = (t.a[k] - p.a[k]).to_f64().abs() / t.a[k].to_f64().abs().max(1e-30);
                let db = (t.b[k] - p.b[k]).to_f64().abs() / t.b[k].to_f64().abs();
                worst = worst.max(da).max(db);
            }
            let tol = 10f64.powi(-(digits as i32));
            if worst < tol {
                return Ok(t);
            }
        }
        prev = Some(t);
    }
    // highest level result; accuracy checked by the caller's tests
    Ok(prev.unwrap())
}

fn stieltjes_at_level(
    w: &WeightSpec,
    n_coeffs: usize,
    digits: u32,
    x_cut: f64,
    level: u32,
) -> Result<RecurrenceTable> {
    let nodes = ts_nodes_dd(Dd::from_f64(x_cut), level);
    let alpha = w.alpha;
    // weights w(x_i) * quadrature weight
    let mut xs = Vec::with_capacity(nodes.len());
    let mut ws = Vec::with_capacity(nodes.len());
    for (x, wt) in nodes {
        let lx = x.ln();
        let q = match w.qkind {
            QKind::General => {
                // dd-accurate only through the f64 handle; adequate for the
                // exp field where Q is entire and smooth
                let qv = w.q(Complex64::new(x.to_f64(), 0.0))?.re;
                Dd::from_f64(qv)
            }
            _ => {
                let mut acc = Dd::ZERO;
                for &c in w.coeffs.iter().rev() {
                    acc = acc * x + Dd::from_f64(c);
                }
                acc
            }
        };
        let logw = lx * Dd::from_f64(alpha) - q;
        let wgt = logw.exp() * wt;
        if wgt.hi.abs() < 1e-250 {
            continue;
        }
        xs.push(x);
        ws.push(wgt);
    }
    let mu0 = ws.iter().fold(Dd::ZERO, |acc, &w| acc + w);
    let inv_sqrt_mu0 = Dd::ONE / mu0.sqrt();
    let mut p0: Vec<Dd> = vec![inv_sqrt_mu0; xs.len()];
    let mut pm1: Vec<Dd> = vec![Dd::ZERO; xs.len()];
    let mut a = Vec::with_capacity(n_coeffs);
    let mut b = Vec::with_capacity(n_coeffs);
    for k in 0..n_coeffs {
        let mut ak = Dd::ZERO;
        for i in 0..xs.len() {
            ak = ak + ws[i] * xs[i] * p0[i] * p0[i];
        }
        let bkm1 = if k > 0 { b[k - 1] } else { Dd::ZERO };
        let mut nrm = Dd::ZERO;
        let mut q: Vec<Dd> = Vec::with_capacity(xs.len());
        for i in 0..xs.len() {
            let t = (xs[i] - ak) * p0[i] - bkm1 * pm1[i];
            nrm = nrm + ws[i] * t * t;
            q.push(t);
        }
        let bk = nrm.sqrt();
        let inv = Dd::ONE / bk;
        for i in 0..xs.len() {
            let t = q[i] * inv;
            pm1[i] = p0[i];
            p0[i] = t;
        }
        a.push(ak);
        b.push(bk);
    }
    Ok(RecurrenceTable { a, b, mu0, precision_digits: digits })
}

/// Adaptive Gauss-Legendre integral of f dmu with mu the weight measure,
/// cut at the weight tail. Relative target ~10^{-digits+2}.
pub fn integrate_weight<F>(w: &WeightSpec, f: F, digits: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let x_cut = tail_cut(w, 0, digits)?;
    let g = |x: f64| -> Result<f64> {
        let q = w.q(Complex64::new(x, 0.0))?.re;
        Ok(f(x) * (w.alpha * x.ln() - q).exp())
    };
    // adaptive bisection with a two-order error estimate; the left panel gets
    // a tanh-sinh pass to absorb the x^alpha endpoint
    let left = crate::mrs::tanh_sinh(&g, 0.0, (1.0f64).min(x_cut))?;
    let mut total = left;
    if x_cut > 1.0 {
        total += adaptive_gl(&g, 1.0, x_cut, 10f64.powi(-(digits as i32) - 2), 0)?;
    }
    Ok(total)
}

fn adaptive_gl<F>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let coarse = crate::mrs::gl_integrate(f, a, b, 20)?;
    let fine = crate::mrs::gl_integrate(f, a, b, 41)?;
    if (fine - coarse).abs() <= tol * (1.0 + fine.abs()) || depth > 24 {
        return Ok(fine);
    }
    let mid = 0.5 * (a + b);
    Ok(adaptive_gl(f, a, mid, tol * 0.7, depth + 1)? + adaptive_gl(f, mid, b, tol * 0.7, depth + 1)?)
}

/// Normalized Hermite polynomial value (orthonormal for weight e^{-x^2}),
/// by the stable normalized recurrence.
pub fn hermite_norm_eval(j: usize, x: f64) -> (f64, f64) {
    let mut ls = 0.0;
    let mut h_prev = 0.0f64;
    let mut h = std::f64::consts::PI.powf(-0.25);
    for k in 1..=j {
        let kf = k as f64;
        let second = if k > 1 {
            (kf - 1.0) * h_prev / (kf * (kf - 1.0)).sqrt()
        } else {
            0.0
        };
        let h_next = 2.0 * x * h / (2.0 * kf).sqrt() - second;
        h_prev = h;
        h = h_next;
        let m = h.abs().max(h_prev.abs());
        if m > 1e120 {
            h /= m;
            h_prev /= m;
            ls += m.ln();
        }
    }
    (h, ls)
}

/// General orthonormal recurrence oracle in double precision for a weight
/// exp(-sum q_k x^{2k}) on the real line (Hermite-type), via its table.
pub fn hermite_table_eval(a: &[f64], b: &[f64], mu0: f64, n: usize, x: f64) -> (f64, f64) {
    let mut ls = 0.0;
    let mut p_prev = 0.0f64;
    let mut p = 1.0 / mu0.sqrt();
    for k in 0..n {
        let p_next = ((x - a[k]) * p - if k > 0 { b[k - 1] * p_prev } else { 0.0 }) / b[k];
        p_prev = p;
        p = p_next;
        let m = p.abs().max(p_prev.abs());
        if m > 1e120 {
            p /= m;
            p_prev /= m;
            ls += m.ln();
        }
    }
    (p, ls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::parse_weight;

    #[test]
    fn classical_small_values() {
        // p_1(3) = 2 and p_2(0) = 1 for alpha = 0; p_0 = 1
        let (p, ls) = classical_eval(0.0, 1, Complex64::new(3.0, 0.0));
        assert!((p.re * ls.exp() - 2.0).abs() < 1e-14);
        let (p, ls) = classical_eval(0.0, 2, Complex64::new(0.0, 0.0));
        assert!((p.re * ls.exp() - 1.0).abs() < 1e-14);
        let (p, _) = classical_eval(0.0, 0, Complex64::new(17.0, 0.0));
        assert_eq!(p.re, 1.0);
    }

    #[test]
    fn stieltjes_classical_matches_closed_forms() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let t = stieltjes_coeffs(&w, 20, 16).unwrap();
        for k in 0..20usize {
            let kf = k as f64;
            let a_exact = 2.0 * kf + 1.0;
            let b_exact = ((kf + 1.0) * (kf + 1.0)).sqrt();
            assert!(
                (t.a[k].to_f64() - a_exact).abs() < 1e-13 * a_exact,
                "a_{k}: {} vs {a_exact}",
                t.a[k].to_f64()
            );
            assert!(
                (t.b[k].to_f64() - b_exact).abs() < 1e-13 * b_exact,
                "b_{k}: {} vs {b_exact}",
                t.b[k].to_f64()
            );
        }
        assert!((t.mu0.to_f64() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn oracle_eval_matches_classical() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let t = stieltjes_coeffs(&w, 60, 24).unwrap();
        let x = Complex64::new(37.2, 0.0);
        let (m, ls) = oracle_eval(&t, 50, x).unwrap();
        let (mc, lsc) = classical_eval(0.0, 50, x);
        let v = m.to_c64() * (ls.to_f64() - lsc).exp();
        assert!((v - mc).norm() <= 1e-12 * mc.norm(), "{v} vs {mc}");
    }

    #[test]
    fn classical_deep_against_32_digit_table() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let t = stieltjes_coeffs(&w, 110, 28).unwrap();
        let x = Complex64::new(50.0, 0.0);
        let (m, ls) = oracle_eval(&t, 100, x).unwrap();
        let (mc, lsc) = classical_eval(0.0, 100, x);
        let v = m.to_c64() * (ls.to_f64() - lsc).exp();
        assert!((v - mc).norm() <= 1e-12 * mc.norm(), "double vs dd: {v} vs {mc}");
    }

    #[test]
    fn integrate_weight_basics() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let one = integrate_weight(&w, |_| 1.0, 14).unwrap();
        assert!((one - 1.0).abs() < 1e-12, "int e^-x = {one}");
        let x1 = integrate_weight(&w, |x| x, 14).unwrap();
        assert!((x1 - 1.0).abs() < 1e-12, "int x e^-x = {x1}");
        // refinement-stable heavier weight
        let w2 = parse_weight("alpha=2.8;Q=mono:3,0.7,1.5").unwrap();
        let v = integrate_weight(&w2, |_| 1.0, 14).unwrap();
        let v2 = integrate_weight(&w2, |_| 1.0, 12).unwrap();
        assert!((v - v2).abs() < 1e-11 * v.abs());
    }

    #[test]
    fn orthonormality_via_integration() {
        let w = parse_weight("alpha=2.8;Q=mono:3,0.7,1.5").unwrap();
        let t = stieltjes_coeffs(&w, 12, 20).unwrap();
        for i in 0..6usize {
            for j in 0..6usize {
                let v = integrate_weight(
                    &w,
                    |x| {
                        let (pi, li) = oracle_eval(&t, i, Complex64::new(x, 0.0)).unwrap();
                        let (pj, lj) = oracle_eval(&t, j, Complex64::new(x, 0.0)).unwrap();
                        (pi.to_c64().re * (li.to_f64()).exp())
                            * (pj.to_c64().re * (lj.to_f64()).exp())
                    },
                    12,
                )
                .unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-10, "<p_{i}, p_{j}> = {v}");
            }
        }
    }

    #[test]
    fn stieltjes_selfconsistency_hard_weight() {
        // recomputing with higher node density moves nothing above target
        let w = parse_weight("alpha=2.8;Q=mono:3,0.7,1.5").unwrap();
        let t1 = stieltjes_at_level(&w, 40, 26, tail_cut(&w, 40, 26).unwrap(), 10).unwrap();
        let t2 = stieltjes_at_level(&w, 40, 26, tail_cut(&w, 40, 26).unwrap(), 11).unwrap();
        for k in 0..40 {
            let d = (t1.b[k] - t2.b[k]).to_f64().abs() / t1.b[k].to_f64();
            assert!(d < 1e-24, "b_{k} density drift {d:e}");
        }
    }

    #[test]
    fn hermite_identity_even() {
        // H^norm_{2n}(x) = L^{(-1/2),norm}_n(x^2) via the classical map at
        // the oracle level (weight e^{-x^2} <-> alpha = -1/2, Q = y)
        let w = parse_weight("alpha=-0.5;Q=classical").unwrap();
        let t = stieltjes_coeffs(&w, 55, 20).unwrap();
        for &x in &[0.3, 1.7] {
            for n in [3usize, 10, 50] {
                let (hm, hls) = hermite_norm_eval(2 * n, x);
                let (lm, lls) = oracle_eval(&t, n, Complex64::new(x * x, 0.0)).unwrap();
                let lv = lm.to_c64().re * (lls.to_f64() - hls).exp();
                assert!(
                    (lv - hm).abs() <= 1e-10 * hm.abs().max(1e-3),
                    "n={n} x={x}: {lv} vs {hm}"
                );
            }
        }
    }

    #[test]
    fn degree_exceeds_table() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let t = stieltjes_coeffs(&w, 5, 16).unwrap();
        assert!(oracle_eval(&t, 10, Complex64::new(1.0, 0.0)).is_err());
    }
}
