//! MRS numbers `beta_n`, the field polynomials `H_n` and `h_n`, the constant
//! `l_n`, and Taylor coefficients of `h_n` at the two endpoints.
//!
//! `beta_n` solves `2 pi n = int_0^beta Q'(x) sqrt(x/(beta-x)) dx`. For
//! monomial Q there is a closed form; for polynomial Q an asymptotic
//! expansion in fractional powers of n; otherwise a numeric solve.

use crate::auxfun::a_coef;
use crate::weight::{QKind, WeightSpec};
use crate::{Error, Result};
use num_complex::Complex64;
use std::sync::OnceLock;

/// Fractional-power expansion `beta_n = n^{1/m} sum_k beta^{1,k} n^{-k/m}`.
#[derive(Clone, Debug)]
pub struct MrsExpansion {
    pub m: usize,
    /// beta^{1,k} for k = 0..=kmax
    pub coeffs: Vec<f64>,
}

impl MrsExpansion {
    pub fn evaluate(&self, n: usize) -> f64 {
        let nf = n as f64;
        let eps = nf.powf(-1.0 / self.m as f64);
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * eps + c;
        }
        acc * nf.powf(1.0 / self.m as f64)
    }
}

/// Powers `beta^{k,l}`: coefficient of eps^l in (sum beta^{1,i} eps^i)^k.
#[derive(Clone, Debug)]
pub struct PowerTable {
    /// entries[k][l] = beta^{k,l}, k = 0..=kmax (row 0 is the unit)
    pub entries: Vec<Vec<f64>>,
}

impl PowerTable {
    /// Build from the beta^{1,l} row by repeated Cauchy products.
    pub fn build(first: &[f64], kmax: usize) -> PowerTable {
        let lmax = first.len() - 1;
        let mut entries = Vec::with_capacity(kmax + 1);
        let mut unit = vec![0.0; lmax + 1];
        unit[0] = 1.0;
        entries.push(unit);
        for k in 1..=kmax {
            let prev: Vec<f64> = entries[k - 1].clone();
            let mut row = vec![0.0; lmax + 1];
            for (l, r) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for i in 0..=l {
                    s += prev[i] * first[l - i];
                }
                *r = s;
            }
            entries.push(row);
        }
        PowerTable { entries }
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries
            .get(k)
            .and_then(|row| row.get(l))
            .copied()
            .unwrap_or(0.0)
    }
}

/// Everything the evaluators need about the field at a given degree.
#[derive(Clone, Debug)]
pub struct FieldData {
    pub beta: f64,
    /// coefficients of H_n(z) (length m for polynomial Q; empty for general)
    pub hn_poly: Vec<f64>,
    /// coefficients of h_n(z), the contour-integral field function
    pub h_poly: Vec<f64>,
    pub ln: f64,
    /// Taylor coefficients of h_n about 0 (d_l) and about 1 (c_l)
    pub d: Vec<f64>,
    pub c: Vec<f64>,
}

/// Closed form for monomial Q: `beta_n = n^{1/m} (m q_m A_m / 2)^{-1/m}`.
pub fn mrs_monomial(w: &WeightSpec, n: usize) -> Result<f64> {
    if w.qkind != QKind::Monomial {
        return Err(Error::WrongKind);
    }
    let m = w.degree().unwrap();
    let qm = w.coeffs[m];
    Ok((n as f64).powf(1.0 / m as f64) * (m as f64 * qm * a_coef(m) / 2.0).powf(-1.0 / m as f64))
}

/// Positive root of the degree-2 case: `beta = (-q1 + sqrt(q1^2 + 24 q2 n))/(3 q2)`.
pub fn mrs_quadratic_exact(w: &WeightSpec, n: usize) -> Result<f64> {
    if w.degree() != Some(2) {
        return Err(Error::WrongKind);
    }
    let q1 = w.coeffs[1];
    let q2 = w.coeffs[2];
    Ok((-q1 + (q1 * q1 + 24.0 * q2 * n as f64).sqrt()) / (3.0 * q2))
}

/// Asymptotic MRS number of the `Q = e^x` field: `W(8 pi n^2)/2`.
pub fn mrs_exp_asymptotic(n: usize) -> Result<f64> {
    let nf = n as f64;
    Ok(crate::specfun::lambert_w0(8.0 * std::f64::consts::PI * nf * nf)? / 2.0)
}

/// Coefficients beta^{1,k}, k <= kk, of the fractional-power expansion.
///
/// Seeded by beta^{1,0} = (m q_m A_m/2)^{-1/m}; each subsequent order is a
/// linear solve against the highest-order term of the defining relation
/// sum_k (k/2) q_k A_k beta^k = n.
pub fn mrs_poly_expansion(w: &WeightSpec, kk: usize) -> Result<MrsExpansion> {
    match w.qkind {
        QKind::Monomial | QKind::Polynomial => {}
        _ => return Err(Error::WrongKind),
    }
    let m = w.degree().unwrap();
    let qm = w.coeffs[m];
    let b10 = (m as f64 * qm * a_coef(m) / 2.0).powf(-1.0 / m as f64);
    let mut first = vec![0.0; kk + 1];
    first[0] = b10;
    let denom = (m * m) as f64 * qm * a_coef(m) * b10.powi(m as i32 - 1);
    for j in 1..=kk {
        // residual of sum_k k q_k A_k beta^{k, j-m+k} with beta^{1,j} = 0
        let table = PowerTable::build(&first, m);
        let mut r = 0.0;
        let k_lo = if m > j { m - j } else { 1 };
        for k in k_lo..=m {
            let l = j + k - m;
            r += k as f64 * w.coeffs[k] * a_coef(k) * table.get(k, l);
        }
        first[j] = -r / denom;
    }
    Ok(MrsExpansion { m, coeffs: first })
}

/// Numeric solve of the MRS relation for any Q increasing on the support.
///
/// The integral uses x = beta sin^2(theta), which removes the endpoint
/// singularity: `g(beta) = 2 beta int_0^{pi/2} Q'(beta sin^2 t) sin^2 t dt`.
pub fn mrs_numeric(w: &WeightSpec, n: usize, tol: f64) -> Result<f64> {
    let target = 2.0 * std::f64::consts::PI * n as f64;
    let g = |beta: f64| -> Result<f64> { mrs_integral(w, beta) };
    let guess = q_inverse(w, n as f64)?;
    let mut lo = guess / 8.0;
    let mut hi = guess * 8.0;
    let mut glo = g(lo)? - target;
    let mut ghi = g(hi)? - target;
    let mut grow = 0;
    while glo > 0.0 && grow < 60 {
        lo /= 4.0;
        glo = g(lo)? - target;
        grow += 1;
    }
    while ghi < 0.0 && grow < 120 {
        hi *= 4.0;
        ghi = g(hi)? - target;
        grow += 1;
    }
    if !(glo <= 0.0 && ghi >= 0.0) {
        return Err(Error::NoBracket);
    }
    // bisection with secant acceleration
    let mut a = lo;
    let mut b = hi;
    let mut fa = glo;
    let mut fb = ghi;
    for it in 0..200 {
        let mid = if it % 2 == 0 {
            let s = b - fb * (b - a) / (fb - fa);
            if s.is_finite() && s > a && s < b {
                s
            } else {
                0.5 * (a + b)
            }
        } else {
            0.5 * (a + b)
        };
        let fm = g(mid)? - target;
        if fm.abs() <= tol * target {
            return Ok(mid);
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
        if (b - a) <= 4.0 * f64::EPSILON * b {
            return Ok(0.5 * (a + b));
        }
    }
    Ok(0.5 * (a + b))
}

/// The MRS integral after the sin^2 substitution, by refining Gauss-Legendre.
pub fn mrs_integral(w: &WeightSpec, beta: f64) -> Result<f64> {
    let f = |theta: f64| -> Result<f64> {
        let s = theta.sin();
        let qp = w.q_prime(Complex64::new(beta * s * s, 0.0))?;
        Ok(2.0 * beta * qp.re * s * s)
    };
    let mut prev = f64::NAN;
    for pts in [40usize, 80, 160, 320, 640] {
        let v = gl_integrate(&f, 0.0, std::f64::consts::FRAC_PI_2, pts)?;
        if (v - prev).abs() <= 1e-13 * v.abs().max(1.0) {
            return Ok(v);
        }
        prev = v;
    }
    Ok(prev)
}

fn q_inverse(w: &WeightSpec, y: f64) -> Result<f64> {
    match w.qkind {
        QKind::General => Ok((w.general_q_inverse.as_ref().unwrap())(y).max(1e-8)),
        _ => {
            let m = w.degree().unwrap();
            let qm = w.coeffs[m];
            let mut x = (y.abs() / qm).powf(1.0 / m as f64).max(1e-8);
            for _ in 0..80 {
                let q = w.q(Complex64::new(x, 0.0))?.re - y;
                let qp = w.q_prime(Complex64::new(x, 0.0))?.re;
                if qp.abs() < 1e-300 {
                    break;
                }
                let step = q / qp;
                x -= step;
                if x <= 0.0 {
                    x = 1e-8;
                }
                if step.abs() < 1e-12 * (1.0 + x.abs()) {
                    break;
                }
            }
            Ok(x)
        }
    }
}

/// Coefficients of H_n(z) (length m): `sum_{j=k+1}^m q_j A_{j-k-1} beta^j / n`.
pub fn hn_poly(w: &WeightSpec, n: usize, beta: f64) -> Result<Vec<f64>> {
    match w.qkind {
        QKind::Monomial | QKind::Polynomial => {}
        _ => return Err(Error::WrongKind),
    }
    let m = w.degree().unwrap();
    let nf = n as f64;
    let mut out = vec![0.0; m];
    for (k, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for j in (k + 1)..=m {
            s += w.coeffs[j] * a_coef(j - k - 1) * beta.powi(j as i32) / nf;
        }
        *o = s;
    }
    Ok(out)
}

/// Coefficients of h_n(z) for polynomial Q, the degree-weighted variant
/// `sum_{j=k+1}^m j q_j A_{j-k-1} beta^j / n` (equals m H_n for monomials).
pub fn h_poly(w: &WeightSpec, n: usize, beta: f64) -> Result<Vec<f64>> {
    match w.qkind {
        QKind::Monomial | QKind::Polynomial => {}
        _ => return Err(Error::WrongKind),
    }
    let m = w.degree().unwrap();
    let nf = n as f64;
    let mut out = vec![0.0; m];
    for (k, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for j in (k + 1)..=m {
            s += j as f64 * w.coeffs[j] * a_coef(j - k - 1) * beta.powi(j as i32) / nf;
        }
        *o = s;
    }
    Ok(out)
}

/// l_n: polynomial closed form or the general-Q double integral.
pub fn ln_coeff(w: &WeightSpec, n: usize, beta: f64) -> Result<f64> {
    let nf = n as f64;
    match w.qkind {
        QKind::Monomial | QKind::Polynomial => {
            let mut s = 0.0;
            for (k, &q) in w.coeffs.iter().enumerate() {
                s += q * beta.powi(k as i32) * a_coef(k) / nf;
            }
            Ok(-4.0 * 2f64.ln() - s)
        }
        QKind::General => {
            let f = |y: f64| -> Result<f64> {
                let h = h_general_value(w, n, beta, Complex64::new(y, 0.0))?;
                Ok((0.5 - y).abs().ln() * (1.0 - y).sqrt()
                    / (2.0 * std::f64::consts::PI * y.sqrt())
                    * h.re)
            };
            let i1 = tanh_sinh(&f, 0.0, 0.5)?;
            let i2 = tanh_sinh(&f, 0.5, 1.0)?;
            let q_half = w.q(Complex64::new(beta / 2.0, 0.0))?.re;
            Ok(2.0 * (i1 + i2) - q_half / nf)
        }
    }
}

/// One evaluation of h_n(y) for general Q via the big contour around [0,1]
/// and y (circle centered at 1/2).
pub fn h_general_value(w: &WeightSpec, n: usize, beta: f64, y0: Complex64) -> Result<Complex64> {
    let nf = n as f64;
    let center = Complex64::new(0.5, 0.0);
    let radius = 1.3f64.max((y0 - center).norm() + 0.4);
    let mut prev = Complex64::new(f64::NAN, 0.0);
    for mm in [64usize, 128, 256, 512, 1024, 2048] {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..mm {
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.371) / mm as f64;
            let e = Complex64::from_polar(radius, th);
            let yy = center + e;
            let dy = Complex64::new(0.0, 1.0) * e * (2.0 * std::f64::consts::PI / mm as f64);
            let vp = w.q_prime(beta * yy)? * beta / nf;
            acc += yy.sqrt() * vp / ((yy - 1.0).sqrt() * (yy - y0)) * dy;
        }
        let val = acc / Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        if (val - prev).norm() <= 1e-13 * val.norm().max(1.0) {
            return Ok(val);
        }
        prev = val;
    }
    Ok(prev)
}

/// Side of a Taylor expansion of h_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Taylor coefficients of h_n about 0 (Left, the d_l) or 1 (Right, the c_l)
/// by an M-point trapezoid rule on a small circle, M doubled until stable.
/// The radius shrinks (x0.6, up to 4 times) if convergence stalls.
pub fn h_taylor(
    w: &WeightSpec,
    n: usize,
    beta: f64,
    side: Side,
    count: usize,
) -> Result<Vec<f64>> {
    let center = match side {
        Side::Left => Complex64::new(0.0, 0.0),
        Side::Right => Complex64::new(1.0, 0.0),
    };
    let hp = match w.qkind {
        QKind::General => Vec::new(),
        _ => h_poly(w, n, beta)?,
    };
    let h_at = |y: Complex64| -> Result<Complex64> {
        match w.qkind {
            QKind::General => h_general_value(w, n, beta, y),
            _ => {
                let mut acc = Complex64::new(0.0, 0.0);
                for &c in hp.iter().rev() {
                    acc = acc * y + c;
                }
                Ok(acc)
            }
        }
    };
    let mut radius = 0.5;
    for _shrink in 0..=4 {
        let mut prev: Option<Vec<Complex64>> = None;
        let mut m = 64usize.max(4 * count);
        let mut converged = None;
        for _ in 0..6 {
            let mut vals = vec![Complex64::new(0.0, 0.0); count];
            for j in 0..m {
                let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / m as f64;
                let e = Complex64::from_polar(radius, th);
                let hy = h_at(center + e)?;
                let mut p = Complex64::new(1.0, 0.0);
                for v in vals.iter_mut() {
                    *v += hy / p;
                    p *= e;
                }
            }
            let vals: Vec<Complex64> = vals.into_iter().map(|v| v / m as f64).collect();
            if let Some(p) = &prev {
                let diff = vals
                    .iter()
                    .zip(p)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                let scale = vals.iter().map(|v| v.norm()).fold(1.0, f64::max);
                if diff <= 5e-12 * scale {
                    converged = Some(vals.clone());
                    break;
                }
            }
            prev = Some(vals);
            m *= 2;
        }
        if let Some(vals) = converged {
            return Ok(vals.into_iter().map(|v| v.re).collect());
        }
        radius *= 0.6;
    }
    Err(Error::QuadratureStall("h_n Taylor contour did not converge".into()))
}

/// Assemble the FieldData for a weight at degree n. `beta_source` overrides
/// the automatic choice of beta_n when given.
pub fn build_field(w: &WeightSpec, n: usize, beta_source: Option<f64>) -> Result<FieldData> {
    let beta = match beta_source {
        Some(b) => b,
        None => match w.qkind {
            QKind::Monomial => mrs_monomial(w, n)?,
            QKind::Polynomial => mrs_poly_expansion(w, 2 * w.degree().unwrap())?.evaluate(n),
            QKind::General => mrs_numeric(w, n, 1e-13)?,
        },
    };
    let (hn, h) = match w.qkind {
        QKind::General => (Vec::new(), Vec::new()),
        _ => (hn_poly(w, n, beta)?, h_poly(w, n, beta)?),
    };
    let ln = ln_coeff(w, n, beta)?;
    let (d, c) = match w.qkind {
        QKind::General => {
            let d = h_taylor(w, n, beta, Side::Left, 12)?;
            let c = h_taylor(w, n, beta, Side::Right, 12)?;
            (d, c)
        }
        _ => {
            // exact binomial shifts of the polynomial h_n
            let d = h.clone();
            let m = h.len();
            let mut c = vec![0.0; m];
            for (l, cv) in c.iter_mut().enumerate() {
                let mut s = 0.0;
                for (j, &hj) in h.iter().enumerate().skip(l) {
                    s += binom_usize(j, l) * hj;
                }
                *cv = s;
            }
            (d, c)
        }
    };
    Ok(FieldData { beta, hn_poly: hn, h_poly: h, ln, d, c })
}

fn binom_usize(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r *= (n - i) as f64 / (i + 1) as f64;
    }
    r
}

// ---------------------------------------------------------------------------
// quadrature helpers
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
pub fn gl_nodes(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<
        std::sync::Mutex<std::collections::HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>,
    > = OnceLock::new();
    let cache = CACHE.get_or_init(|| std::sync::Mutex::new(std::collections::HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(v) = guard.get(&n) {
        return v;
    }
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pd(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pd(n, x);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let wgt = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = wgt;
        ws[n - 1 - i] = wgt;
    }
    let leaked: &'static (Vec<f64>, Vec<f64>) = Box::leak(Box::new((xs, ws)));
    guard.insert(n, leaked);
    leaked
}

fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre integral of a fallible integrand on [a, b].
pub fn gl_integrate<F>(f: &F, a: f64, b: f64, pts: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (xs, ws) = gl_nodes(pts);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(ws) {
        acc += w * f(mid + half * x)?;
    }
    Ok(acc * half)
}

/// tanh-sinh quadrature on (a, b); handles integrable endpoint singularities.
pub fn tanh_sinh<F>(f: &F, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let pi2 = 0.5 * std::f64::consts::PI;
    let mut h = 1.0;
    // level 0: all integer abscissas
    let mut total = pi2 * f(mid)?;
    {
        let mut j = 1u64;
        loop {
            let t = j as f64;
            if t > 6.5 {
                break;
            }
            let sh = pi2 * t.sinh();
            let em = 2.0 * (-2.0 * sh).exp() / (1.0 + (-2.0 * sh).exp());
            let wgt = pi2 * t.cosh() / sh.cosh().powi(2);
            let xp = b - half * em;
            let xm = a + half * em;
            if xp > a && xp < b {
                total += wgt * f(xp)?;
            }
            if xm > a && xm < b {
                total += wgt * f(xm)?;
            }
            j += 1;
        }
    }
    let mut prev = f64::NAN;
    for _level in 1..=12 {
        h *= 0.5;
        let mut acc = 0.0;
        let mut j = 1u64;
        loop {
            let t = j as f64 * h;
            if t > 6.5 {
                break;
            }
            let sh = pi2 * t.sinh();
            // 1 - tanh(sh) without cancellation: 2 e^{-2 sh}/(1 + e^{-2 sh})
            let em = 2.0 * (-2.0 * sh).exp() / (1.0 + (-2.0 * sh).exp());
            let wgt = pi2 * t.cosh() / sh.cosh().powi(2);
            let xp = b - half * em;
            let xm = a + half * em;
            if xp > a && xp < b {
                acc += wgt * f(xp)?;
            }
            if xm > a && xm < b {
                acc += wgt * f(xm)?;
            }
            j += 2;
        }
        total = 0.5 * total + h * acc;
        let val = total * half;
        if (val - prev).abs() <= 1e-14 * val.abs().max(1e-3) {
            return Ok(val);
        }
        prev = val;
    }
    Ok(prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::parse_weight;

    #[test]
    fn monomial_closed_forms() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        assert!((mrs_monomial(&w, 25).unwrap() - 100.0).abs() < 1e-12);

        let w2 = parse_weight("alpha=0;Q=mono:2,1").unwrap();
        assert!((mrs_monomial(&w2, 6).unwrap() - 4.0).abs() < 1e-13); // sqrt(8n/3)

        let w3 = parse_weight("alpha=0;Q=poly:0,2").unwrap();
        assert!((mrs_monomial(&w3, 10).unwrap() - 20.0).abs() < 1e-12); // 4n/q1
    }

    #[test]
    fn poly_expansion_classical_and_beta1() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let e = mrs_poly_expansion(&w, 3).unwrap();
        assert!((e.coeffs[0] - 4.0).abs() < 1e-14);
        for &c in &e.coeffs[1..] {
            assert!(c.abs() < 1e-13, "classical corrections vanish, got {c}");
        }
        // beta^{1,1} = -2(m-1) q_{m-1} / (m (2m-1) q_m) for Q = x^2 + x
        let w2 = parse_weight("alpha=0;Q=poly:0,1,1").unwrap();
        let e2 = mrs_poly_expansion(&w2, 2).unwrap();
        assert!((e2.coeffs[0] - (8.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((e2.coeffs[1] - (-1.0 / 3.0)).abs() < 1e-13, "got {}", e2.coeffs[1]);
    }

    #[test]
    fn power_table_cauchy_identity() {
        let first = vec![1.3, -0.2, 0.05, 0.7];
        let t = PowerTable::build(&first, 4);
        for k in 1..=4usize {
            for l in 0..first.len() {
                let mut s = 0.0;
                for i in 0..=l {
                    s += t.get(k - 1, i) * first[l - i];
                }
                assert!((t.get(k, l) - s).abs() <= 1e-14 * s.abs().max(1.0));
            }
        }
    }

    #[test]
    fn quadratic_exact_vs_expansion_and_numeric() {
        let w = parse_weight("alpha=0;Q=poly:0,1,1").unwrap();
        let b1 = mrs_quadratic_exact(&w, 1).unwrap();
        assert!((b1 - 4.0 / 3.0).abs() < 1e-14);
        let b = mrs_quadratic_exact(&w, 50).unwrap();
        let bn = mrs_numeric(&w, 50, 1e-13).unwrap();
        assert!((b - bn).abs() <= 1e-11 * b, "exact {b} numeric {bn}");
    }

    #[test]
    fn numeric_classical() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let b = mrs_numeric(&w, 100, 1e-13).unwrap();
        assert!((b - 400.0).abs() < 4e-11, "got {b}");
    }

    #[test]
    fn numeric_exp_weight_residual() {
        let w = parse_weight("alpha=0;Q=exp").unwrap();
        let n = 10;
        let b = mrs_numeric(&w, n, 1e-13).unwrap();
        // residual of 8n = 2 beta e^{beta/2} (I0(beta/2) + I1(beta/2))
        let half = b / 2.0;
        let rhs = 2.0
            * b
            * half.exp()
            * (crate::specfun::bessel_i01(0, half) + crate::specfun::bessel_i01(1, half));
        assert!(
            (rhs - 8.0 * n as f64).abs() <= 1e-10 * n as f64,
            "residual {}",
            (rhs - 8.0 * n as f64).abs()
        );
    }

    #[test]
    fn exp_asymptotic_value() {
        // W(8 pi 100)/2, frozen from the Lambert W oracle
        let b = mrs_exp_asymptotic(10).unwrap();
        assert!((b - 3.0161127927003795).abs() < 1e-12, "got {b}");
        // error vs numeric decays with n
        let w = parse_weight("alpha=0;Q=exp").unwrap();
        let mut prev = f64::INFINITY;
        for &n in &[10usize, 100, 1000] {
            let e = (mrs_exp_asymptotic(n).unwrap() - mrs_numeric(&w, n, 1e-13).unwrap()).abs();
            assert!(e < prev, "error should decrease: {e} vs {prev}");
            prev = e;
        }
    }

    #[test]
    fn hn_and_h_polys() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        assert_eq!(hn_poly(&w, 25, 100.0).unwrap(), vec![4.0]);
        let w2 = parse_weight("alpha=0;Q=mono:2,1").unwrap();
        let n = 6;
        let beta = mrs_monomial(&w2, n).unwrap();
        let h2 = hn_poly(&w2, n, beta).unwrap();
        assert!((h2[0] - 4.0 / 3.0).abs() < 1e-13 && (h2[1] - 8.0 / 3.0).abs() < 1e-13);
        // h_n = m H_n for monomials
        let hh = h_poly(&w2, n, beta).unwrap();
        assert!((hh[0] - 8.0 / 3.0).abs() < 1e-13 && (hh[1] - 16.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn ln_classical_and_shift() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let l = ln_coeff(&w, 10, 40.0).unwrap();
        assert!((l - (-2.0 - 4.0 * 2f64.ln())).abs() < 1e-13);
        let w2 = parse_weight("alpha=0;Q=mono:1,1,3").unwrap(); // q0 = 3
        let l2 = ln_coeff(&w2, 10, 40.0).unwrap();
        assert!((l2 - (l - 0.3)).abs() < 1e-13);
    }

    #[test]
    fn ln_monomial_vs_general_integral() {
        // m=2 check of the closed form against the h_n-weighted log integral
        let w = parse_weight("alpha=0;Q=mono:2,1").unwrap();
        let n = 6;
        let beta = mrs_monomial(&w, n).unwrap();
        let l_closed = ln_coeff(&w, n, beta).unwrap();
        let h = h_poly(&w, n, beta).unwrap();
        let f = |y: f64| -> Result<f64> {
            let hv = h[0] + h[1] * y;
            Ok((0.5 - y).abs().ln() * (1.0 - y).sqrt()
                / (2.0 * std::f64::consts::PI * y.sqrt())
                * hv)
        };
        let i = tanh_sinh(&f, 0.0, 0.5).unwrap() + tanh_sinh(&f, 0.5, 1.0).unwrap();
        let q_half = w.q(Complex64::new(beta / 2.0, 0.0)).unwrap().re;
        let l_int = 2.0 * i - q_half / n as f64;
        assert!((l_closed - l_int).abs() < 1e-9, "closed {l_closed} integral {l_int}");
    }

    #[test]
    fn h_taylor_classical_and_cross_checks() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let d = h_taylor(&w, 10, 40.0, Side::Left, 4).unwrap();
        let c = h_taylor(&w, 10, 40.0, Side::Right, 4).unwrap();
        assert!((d[0] - 4.0).abs() < 1e-12 && (c[0] - 4.0).abs() < 1e-12);
        for &t in d[1..].iter().chain(&c[1..]) {
            assert!(t.abs() < 1e-12);
        }
        // polynomial: contour coefficients match the closed-form shifts
        let w2 = parse_weight("alpha=0.3;Q=poly:0,1,1").unwrap();
        let n = 40;
        let beta = mrs_poly_expansion(&w2, 4).unwrap().evaluate(n);
        let fd = build_field(&w2, n, Some(beta)).unwrap();
        let d2 = h_taylor(&w2, n, beta, Side::Left, 2).unwrap();
        let c2 = h_taylor(&w2, n, beta, Side::Right, 2).unwrap();
        for i in 0..2 {
            assert!((d2[i] - fd.d[i]).abs() < 1e-10, "d[{i}]: {} vs {}", d2[i], fd.d[i]);
            assert!((c2[i] - fd.c[i]).abs() < 1e-10, "c[{i}]: {} vs {}", c2[i], fd.c[i]);
        }
    }

    #[test]
    fn h_taylor_general_exp_weight() {
        let w = parse_weight("alpha=0;Q=exp").unwrap();
        let n = 10;
        let beta = mrs_numeric(&w, n, 1e-13).unwrap();
        let c = h_taylor(&w, n, beta, Side::Right, 3).unwrap();
        assert!(c[0] > 0.0, "c_0 must be positive, got {}", c[0]);
        let d = h_taylor(&w, n, beta, Side::Left, 3).unwrap();
        assert!(d[0] > 0.0);
    }

    #[test]
    fn q0_does_not_move_expansion() {
        let w1 = parse_weight("alpha=0;Q=poly:0,1,0.5,2").unwrap();
        let w2 = parse_weight("alpha=0;Q=poly:7.5,1,0.5,2").unwrap();
        let e1 = mrs_poly_expansion(&w1, 6).unwrap();
        let e2 = mrs_poly_expansion(&w2, 6).unwrap();
        for (a, b) in e1.coeffs.iter().zip(&e2.coeffs) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn expansion_residual_decays() {
        let w = parse_weight("alpha=0;Q=poly:0,1,1").unwrap();
        let e = mrs_poly_expansion(&w, 4).unwrap();
        let mut prev = f64::INFINITY;
        for &n in &[10usize, 100, 1000] {
            let b = e.evaluate(n);
            let r = (mrs_integral(&w, b).unwrap() - 2.0 * std::f64::consts::PI * n as f64).abs()
                / (2.0 * std::f64::consts::PI * n as f64);
            assert!(r < prev);
            prev = r;
        }
        assert!(prev < 1e-8);
    }

    #[test]
    fn gl_and_tanh_sinh_basics() {
        let v = gl_integrate(&|x: f64| Ok(x * x), 0.0, 1.0, 40).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let t = tanh_sinh(&|x: f64| Ok(1.0 / x.sqrt()), 0.0, 1.0).unwrap();
        assert!((t - 2.0).abs() < 1e-12, "got {t}");
    }
}
