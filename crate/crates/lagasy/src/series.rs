//! Truncated power-series arithmetic used to build the jump-perturbation
//! tableaux. Series live in the variable u (a local square root: u^2 = z near
//! the left disk, u^2 = z-1 near the right disk), with coefficients in a
//! small ring: plain complex numbers for n-free builds, or polynomials in
//! eps = n^{-1/m} for the general-polynomial regime. All products are exact
//! finite convolutions.

use num_complex::Complex64;

/// Coefficient ring: complex numbers or truncated eps-polynomials.
pub trait Coeff: Clone {
    fn zero(len: usize) -> Self;
    fn one(len: usize) -> Self;
    fn eps_len(&self) -> usize;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn scale(&self, s: Complex64) -> Self;
    fn recip(&self) -> Self;
    fn norm(&self) -> f64;
    /// Coefficient of eps^l.
    fn eps_coeff(&self, l: usize) -> Complex64;
}

impl Coeff for Complex64 {
    fn zero(_len: usize) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one(_len: usize) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn eps_len(&self) -> usize {
        1
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scale(&self, s: Complex64) -> Self {
        self * s
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn norm(&self) -> f64 {
        num_complex::Complex::norm(*self)
    }
    fn eps_coeff(&self, l: usize) -> Complex64 {
        if l == 0 {
            *self
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

/// Truncated polynomial in eps = n^{-1/m}.
#[derive(Clone, Debug)]
pub struct EpsPoly(pub Vec<Complex64>);

impl EpsPoly {
    pub fn constant(c: Complex64, len: usize) -> EpsPoly {
        let mut v = vec![Complex64::new(0.0, 0.0); len];
        v[0] = c;
        EpsPoly(v)
    }
}

impl Coeff for EpsPoly {
    fn zero(len: usize) -> Self {
        EpsPoly(vec![Complex64::new(0.0, 0.0); len])
    }
    fn one(len: usize) -> Self {
        EpsPoly::constant(Complex64::new(1.0, 0.0), len)
    }
    fn eps_len(&self) -> usize {
        self.0.len()
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        EpsPoly(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
    fn sub(&self, rhs: &Self) -> Self {
        EpsPoly(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
    fn mul(&self, rhs: &Self) -> Self {
        let n = self.0.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, a) in self.0.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            for (j, b) in rhs.0.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        EpsPoly(out)
    }
    fn scale(&self, s: Complex64) -> Self {
        EpsPoly(self.0.iter().map(|a| a * s).collect())
    }
    fn recip(&self) -> Self {
        let n = self.0.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        out[0] = 1.0 / self.0[0];
        for l in 1..n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 1..=l {
                s += self.0[j] * out[l - j];
            }
            out[l] = -s / self.0[0];
        }
        EpsPoly(out)
    }
    fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
    fn eps_coeff(&self, l: usize) -> Complex64 {
        self.0.get(l).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }
}

/// Series sum_j c[j] u^{lead+j}, truncated at a caller-chosen length.
#[derive(Clone, Debug)]
pub struct USeries<C: Coeff> {
    pub lead: i32,
    pub c: Vec<C>,
}

impl<C: Coeff> USeries<C> {
    pub fn constant(v: C) -> USeries<C> {
        USeries { lead: 0, c: vec![v] }
    }

    pub fn zero(eps_len: usize) -> USeries<C> {
        USeries { lead: 0, c: vec![C::zero(eps_len)] }
    }

    fn eps_len(&self) -> usize {
        self.c.first().map(|c| c.eps_len()).unwrap_or(1)
    }

    /// Coefficient of u^p.
    pub fn coeff(&self, p: i32) -> C {
        let idx = p - self.lead;
        if idx < 0 || idx as usize >= self.c.len() {
            C::zero(self.eps_len())
        } else {
            self.c[idx as usize].clone()
        }
    }

    pub fn scale(&self, s: Complex64) -> USeries<C> {
        USeries { lead: self.lead, c: self.c.iter().map(|a| a.scale(s)).collect() }
    }

    pub fn shift(&self, k: i32) -> USeries<C> {
        USeries { lead: self.lead + k, c: self.c.clone() }
    }

    pub fn add(&self, rhs: &USeries<C>, maxlen: usize) -> USeries<C> {
        let lead = self.lead.min(rhs.lead);
        let hi = (self.lead + self.c.len() as i32).max(rhs.lead + rhs.c.len() as i32);
        let len = ((hi - lead) as usize).min(maxlen);
        let el = self.eps_len().max(rhs.eps_len());
        let mut c = vec![C::zero(el); len];
        for (i, a) in self.c.iter().enumerate() {
            let j = (self.lead - lead) as usize + i;
            if j < len {
                c[j] = c[j].add(a);
            }
        }
        for (i, b) in rhs.c.iter().enumerate() {
            let j = (rhs.lead - lead) as usize + i;
            if j < len {
                c[j] = c[j].add(b);
            }
        }
        USeries { lead, c }
    }

    pub fn sub(&self, rhs: &USeries<C>, maxlen: usize) -> USeries<C> {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)), maxlen)
    }

    pub fn mul(&self, rhs: &USeries<C>, maxlen: usize) -> USeries<C> {
        let len = (self.c.len() + rhs.c.len() - 1).min(maxlen);
        let el = self.eps_len().max(rhs.eps_len());
        let mut c = vec![C::zero(el); len];
        for (i, a) in self.c.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        USeries { lead: self.lead + rhs.lead, c }
    }

    /// 1/self; the leading coefficient must be invertible in the ring.
    pub fn recip(&self, maxlen: usize) -> USeries<C> {
        let el = self.eps_len();
        let mut g = vec![C::zero(el); maxlen];
        g[0] = self.c[0].recip();
        for j in 1..maxlen {
            let mut acc = C::zero(el);
            for i in 1..=j.min(self.c.len() - 1) {
                acc = acc.add(&self.c[i].mul(&g[j - i]));
            }
            g[j] = acc.mul(&g[0]).scale(Complex64::new(-1.0, 0.0));
        }
        USeries { lead: -self.lead, c: g }
    }

    /// exp(self); requires vanishing constant term (valuation >= 1).
    pub fn exp(&self, maxlen: usize) -> USeries<C> {
        let el = self.eps_len();
        // absolute-power layout
        let mut a = vec![C::zero(el); maxlen];
        for (i, v) in self.c.iter().enumerate() {
            let p = self.lead + i as i32;
            if p < 0 || (p == 0 && !v.is_zero()) {
                panic!("exp needs valuation >= 1");
            }
            if (p as usize) < maxlen {
                a[p as usize] = a[p as usize].add(v);
            }
        }
        let mut e = vec![C::zero(el); maxlen];
        e[0] = C::one(el);
        for n in 1..maxlen {
            let mut acc = C::zero(el);
            for j in 1..=n {
                if a[j].is_zero() {
                    continue;
                }
                acc = acc.add(&a[j].scale(Complex64::new(j as f64, 0.0)).mul(&e[n - j]));
            }
            e[n] = acc.scale(Complex64::new(1.0 / n as f64, 0.0));
        }
        USeries { lead: 0, c: e }
    }

    pub fn max_norm(&self) -> f64 {
        self.c.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// 2x2 matrix of series, row-major.
#[derive(Clone, Debug)]
pub struct MatSeries<C: Coeff> {
    pub e: [USeries<C>; 4],
}

impl<C: Coeff> MatSeries<C> {
    pub fn mul(&self, rhs: &MatSeries<C>, maxlen: usize) -> MatSeries<C> {
        let p = |a: usize, b: usize| self.e[a].mul(&rhs.e[b], maxlen);
        MatSeries {
            e: [
                p(0, 0).add(&p(1, 2), maxlen),
                p(0, 1).add(&p(1, 3), maxlen),
                p(2, 0).add(&p(3, 2), maxlen),
                p(2, 1).add(&p(3, 3), maxlen),
            ],
        }
    }

    pub fn scale_series(&self, s: &USeries<C>, maxlen: usize) -> MatSeries<C> {
        MatSeries { e: [
            self.e[0].mul(s, maxlen),
            self.e[1].mul(s, maxlen),
            self.e[2].mul(s, maxlen),
            self.e[3].mul(s, maxlen),
        ] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn mul_recip_roundtrip() {
        let s = USeries::<Complex64> { lead: -2, c: vec![c(2.0), c(1.0), c(0.5), c(-0.25), c(0.1)] };
        let inv = s.recip(12);
        let prod = s.mul(&inv, 12);
        assert_eq!(prod.lead, 0);
        assert!((prod.c[0] - c(1.0)).norm() < 1e-15);
        for t in &prod.c[1..] {
            assert!(t.norm() < 1e-14);
        }
    }

    #[test]
    fn exp_of_series() {
        // exp(u) truncated: coefficients 1/k!
        let s = USeries::<Complex64> { lead: 1, c: vec![c(1.0)] };
        let e = s.exp(8);
        let mut fact = 1.0;
        for k in 0..8 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((e.c[k] - c(1.0 / fact)).norm() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn eps_poly_recip() {
        let p = EpsPoly(vec![c(2.0), c(1.0), c(-0.5), c(0.0)]);
        let r = p.recip();
        let prod = p.mul(&r);
        assert!((prod.0[0] - c(1.0)).norm() < 1e-15);
        for t in &prod.0[1..] {
            assert!(t.norm() < 1e-15);
        }
    }
}
