//! Phase functions, the conformal map, the global parametrix, and the scalar
//! coefficient families shared by all regions. Principal branches throughout;
//! two-valued expressions are computed exactly as composed, not simplified.

use crate::mrs::FieldData;
use crate::weight::{QKind, WeightSpec};
use crate::{Error, Result};
use num_complex::Complex64;

/// Binding of a weight, a degree, and the field data at that degree.
#[derive(Clone, Debug)]
pub struct PhaseContext {
    pub weight: WeightSpec,
    pub n: usize,
    pub field: FieldData,
}

impl PhaseContext {
    pub fn new(weight: WeightSpec, n: usize, field: FieldData) -> PhaseContext {
        PhaseContext { weight, n, field }
    }
}

/// 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2(pub [Complex64; 4]);

impl Matrix2 {
    pub const fn identity() -> Matrix2 {
        Matrix2([
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
    }

    pub fn zero() -> Matrix2 {
        Matrix2([Complex64::new(0.0, 0.0); 4])
    }

    pub fn mul(&self, rhs: &Matrix2) -> Matrix2 {
        let a = &self.0;
        let b = &rhs.0;
        Matrix2([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    }

    pub fn add(&self, rhs: &Matrix2) -> Matrix2 {
        Matrix2([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
            self.0[3] + rhs.0[3],
        ])
    }

    pub fn sub(&self, rhs: &Matrix2) -> Matrix2 {
        Matrix2([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
            self.0[3] - rhs.0[3],
        ])
    }

    pub fn scale(&self, s: Complex64) -> Matrix2 {
        Matrix2([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }

    pub fn det(&self) -> Complex64 {
        self.0[0] * self.0[3] - self.0[1] * self.0[2]
    }

    pub fn inv(&self) -> Matrix2 {
        let d = self.det();
        Matrix2([self.0[3] / d, -self.0[1] / d, -self.0[2] / d, self.0[0] / d])
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// theta(z) = 1 for arg(z-1) > 0, else -1 (literal two-branch definition).
pub fn theta(z: Complex64) -> f64 {
    if (z - 1.0).arg() > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Conformal map phi(z) = 2z - 1 + 2 sqrt(z) sqrt(z-1) onto |phi| >= 1.
pub fn phi_conformal(z: Complex64) -> Result<Complex64> {
    if on_cut(z) {
        return Err(Error::OnCut);
    }
    Ok(phi_raw(z))
}

fn phi_raw(z: Complex64) -> Complex64 {
    2.0 * z - 1.0 + 2.0 * z.sqrt() * (z - 1.0).sqrt()
}

fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && (-1e-14..=1.0 + 1e-14).contains(&z.re)
}

/// Distance-to-cut test used by the public parametrix API.
pub fn near_cut(z: Complex64) -> bool {
    z.im.abs() <= 1e-14 && (-1e-14..=1.0 + 1e-14).contains(&z.re)
}

/// xi_n(z) = -i (H_n(z) sqrt(z) sqrt(1-z)/2 - 2 arccos(sqrt z)) for
/// polynomial Q; the h_n line integral from 1 to z otherwise.
pub fn xi_n(ctx: &PhaseContext, z: Complex64) -> Result<Complex64> {
    match ctx.weight.qkind {
        QKind::Monomial | QKind::Polynomial => Ok(xi_poly(&ctx.field.hn_poly, z)),
        QKind::General => xi_general(ctx, z),
    }
}

/// Closed form from the H_n coefficients.
pub fn xi_poly(hn: &[f64], z: Complex64) -> Complex64 {
    let mut h = Complex64::new(0.0, 0.0);
    for &c in hn.iter().rev() {
        h = h * z + c;
    }
    let i = Complex64::new(0.0, 1.0);
    -i * (h * z.sqrt() * (1.0 - z).sqrt() / 2.0 - 2.0 * z.sqrt().acos())
}

/// General-Q path: xi_n(z) = -(1/2) int_1^z sqrt(y-1)/sqrt(y) h_n(y) dy along
/// a straight segment, detouring through the upper half plane when the
/// segment would touch the cut [0, 1].
fn xi_general(ctx: &PhaseContext, z: Complex64) -> Result<Complex64> {
    let w = &ctx.weight;
    let n = ctx.n;
    let beta = ctx.field.beta;
    let f = |y: Complex64| -> Result<Complex64> {
        let h = crate::mrs::h_general_value(w, n, beta, y)?;
        Ok((y - 1.0).sqrt() / y.sqrt() * h)
    };
    // parametrize the path y(t), t in [0,1], y(0) = 1; substitute t = u^2 to
    // remove the sqrt(y-1) singularity at the starting point
    let needs_detour = z.im.abs() < 0.05 && z.re < 1.0 && z.re > -0.2;
    let (xs, ws) = crate::mrs::gl_nodes(48);
    let path_point: Box<dyn Fn(f64) -> (Complex64, Complex64)> = if needs_detour {
        let c = 0.5 * (z + 1.0);
        let r = 0.5 * (z - 1.0).norm();
        let th0 = (1.0 - c).arg();
        let mut th1 = (z - c).arg();
        if th1 <= th0 {
            th1 += 2.0 * std::f64::consts::PI;
        }
        Box::new(move |t: f64| {
            let th = th0 + (th1 - th0) * t;
            let e = Complex64::from_polar(r, th);
            (c + e, Complex64::new(0.0, th1 - th0) * e)
        })
    } else {
        Box::new(move |t: f64| (1.0 + t * (z - 1.0), z - 1.0))
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, wt) in xs.iter().zip(ws) {
        let u = 0.5 * (x + 1.0); // u in [0,1]
        let t = u * u;
        let (y, dy) = path_point(t);
        acc += wt * 0.5 * f(y)? * dy * 2.0 * u;
    }
    Ok(-0.5 * acc)
}

/// phibar_n(z) = xi_n(z)/2 - i pi/2.
pub fn phibar_n(ctx: &PhaseContext, z: Complex64) -> Result<Complex64> {
    Ok(xi_n(ctx, z)? / 2.0 - Complex64::new(0.0, std::f64::consts::FRAC_PI_2))
}

pub fn phibar_from_xi(xi: Complex64) -> Complex64 {
    xi / 2.0 - Complex64::new(0.0, std::f64::consts::FRAC_PI_2)
}

/// Airy argument f_n(z) = n^{2/3} (z-1) [-3 theta(z) xi_n(z) / (2 (z-1)^{3/2})]^{2/3},
/// computed without algebraic simplification. Within |z-1| < 0.02 the
/// removable singularity is handled through the series of xi about 1.
pub fn airy_arg(ctx: &PhaseContext, z: Complex64) -> Result<Complex64> {
    let nf = ctx.n as f64;
    let w = z - 1.0;
    if w.norm() < 0.02 {
        // xi(1+w) = w^{3/2} F(w); inner = -(3/2) F(w), analytic and positive
        // near w = 0 since F(0) = f_1 < 0
        let f = xi_edge_series(&ctx.field.c, w);
        let inner = -1.5 * f;
        return Ok(nf.powf(2.0 / 3.0) * w * inner.powf(2.0 / 3.0));
    }
    let xi = xi_n(ctx, z)?;
    let th = theta(z);
    let inner = -3.0 * th * xi / (2.0 * w.powf(1.5));
    let f = nf.powf(2.0 / 3.0) * w * inner.powf(2.0 / 3.0);
    // on the real axis f is real; drop the roundoff imaginary part so the
    // principal powers downstream stay on the upper-side branch
    if z.im == 0.0 {
        return Ok(Complex64::new(f.re, 0.0));
    }
    Ok(f)
}

/// F(w) with xi(1+w) = w^{3/2} F(w): F = sum_j f_{j+1} w^j from the c_l.
pub fn xi_edge_series(c: &[f64], w: Complex64) -> Complex64 {
    let nf = 24.min(c.len() + 6);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in (1..=nf).rev() {
        let mut fj = 0.0;
        for l in 0..j {
            if j - 1 - l < c.len() {
                fj += binom_mhalf(l) * c[j - 1 - l];
            }
        }
        fj = -fj / (2.0 * j as f64 + 1.0);
        acc = acc * w + fj;
    }
    acc
}

pub(crate) fn binom_mhalf(j: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..j {
        r *= (-0.5 - i as f64) / (i + 1) as f64;
    }
    r
}

pub(crate) fn binom_half(j: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..j {
        r *= (0.5 - i as f64) / (i + 1) as f64;
    }
    r
}

/// Global parametrix P^inf(z); errors on the cut [0, 1].
pub fn p_inf(alpha: f64, z: Complex64) -> Result<Matrix2> {
    if near_cut(z) {
        return Err(Error::OnCut);
    }
    Ok(p_inf_raw(alpha, z))
}

/// Principal-branch evaluation without the cut guard (used internally where
/// the product of factors is single-valued).
pub fn p_inf_raw(alpha: f64, z: Complex64) -> Matrix2 {
    let i = Complex64::new(0.0, 1.0);
    let phi = phi_raw(z);
    let sp = phi.sqrt();
    let pref = 1.0 / (2.0 * z.powf(0.25) * (z - 1.0).powf(0.25));
    let d1 = z.powc(Complex64::new(-alpha / 2.0, 0.0)) * phi.powc(Complex64::new(alpha / 2.0, 0.0));
    let d2 = 1.0 / d1;
    let ta = 2f64.powf(-alpha);
    let tb = 2f64.powf(alpha);
    Matrix2([
        ta * pref * sp * d1,
        ta * pref * (i / sp) * d2,
        tb * pref * (-i / sp) * d1,
        tb * pref * sp * d2,
    ])
}

/// A_k = 4^{-k} C(2k, k), via the stable running product.
pub fn a_coef(k: usize) -> f64 {
    let mut a = 1.0;
    for j in 1..=k {
        a *= (2 * j - 1) as f64 / (2 * j) as f64;
    }
    a
}

/// nu_k = -Gamma(3k - 1/2) 2^k / (2k 27^k sqrt(pi) Gamma(2k)).
pub fn nu_k(k: usize) -> f64 {
    use crate::specfun::log_gamma;
    let kf = k as f64;
    if k == 0 {
        return 1.0;
    }
    -(log_gamma(3.0 * kf - 0.5) + kf * 2f64.ln()
        - (2.0 * kf).ln()
        - kf * 27f64.ln()
        - 0.5 * std::f64::consts::PI.ln()
        - log_gamma(2.0 * kf))
        .exp()
}

/// Alternative closed form of nu_k used by the consistency tests.
pub fn nu_k_alt(k: usize) -> f64 {
    use crate::specfun::log_gamma;
    let kf = k as f64;
    if k == 0 {
        return 1.0;
    }
    (1.0 - (6.0 * kf + 1.0) / (6.0 * kf - 1.0))
        * (log_gamma(3.0 * kf + 0.5) - kf * 54f64.ln() - log_gamma(kf + 1.0) - log_gamma(kf + 0.5))
            .exp()
}

/// The Pochhammer-type factor (alpha, m): 1 for m = 0, else
/// 2^{-m} (m!)^{-1} prod_{j=1}^m (4 alpha^2 - (2j-1)^2).
pub fn poch_airy_bessel(alpha: f64, m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut p = 1.0;
    for j in 1..=m {
        p *= 4.0 * alpha * alpha - ((2 * j - 1) * (2 * j - 1)) as f64;
    }
    let mut fact = 1.0;
    for j in 1..=m {
        fact *= j as f64;
    }
    p / (2f64.powi(m as i32) * fact)
}

/// Hankel expansion coefficients a_k(alpha), b_k(alpha) of J_alpha and
/// J'_alpha; they drive the hard-edge jump matrices.
pub fn hankel_ab(alpha: f64, k: usize) -> (f64, f64) {
    if k == 0 {
        return (1.0, 1.0);
    }
    let mu = 4.0 * alpha * alpha;
    let mut prod = 1.0;
    for j in 1..k {
        prod *= mu - ((2 * j - 1) * (2 * j - 1)) as f64;
    }
    let mut fact = 1.0;
    for j in 1..=k {
        fact *= j as f64;
    }
    let den = fact * 8f64.powi(k as i32);
    let a = prod * (mu - ((2 * k - 1) * (2 * k - 1)) as f64) / den;
    let b = prod * (mu + (4 * k * k) as f64 - 1.0) / den;
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrs::build_field;
    use crate::weight::parse_weight;

    fn classical_ctx(n: usize) -> PhaseContext {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let f = build_field(&w, n, None).unwrap();
        PhaseContext::new(w, n, f)
    }

    #[test]
    fn theta_branches() {
        assert_eq!(theta(Complex64::new(1.0, 1.0)), 1.0);
        assert_eq!(theta(Complex64::new(2.0, 0.0)), -1.0);
        // literal reading: arg(-0.5) = pi > 0
        assert_eq!(theta(Complex64::new(0.5, 0.0)), 1.0);
    }

    #[test]
    fn phi_values() {
        let p = phi_conformal(Complex64::new(9.0 / 8.0, 0.0)).unwrap();
        assert!((p - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        // |phi| -> 1 near the cut
        for &x in &[0.2, 0.5, 0.8] {
            let p = phi_conformal(Complex64::new(x, 1e-12)).unwrap();
            assert!((p.norm() - 1.0).abs() < 1e-5);
        }
        // algebraic inverse identity at z = 3 + 2i
        let z = Complex64::new(3.0, 2.0);
        let p = phi_conformal(z).unwrap();
        let q = 2.0 * z - 1.0 - 2.0 * z.sqrt() * (z - 1.0).sqrt();
        assert!((p * q - 1.0).norm() < 5e-14);
        assert!(phi_conformal(Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn xi_classical_values() {
        let ctx = classical_ctx(10);
        let v = xi_n(&ctx, Complex64::new(1.0, 0.0)).unwrap();
        assert!(v.norm() < 1e-12, "xi(1) = {v}");
        let v = xi_n(&ctx, Complex64::new(0.5, 0.0)).unwrap();
        let want = Complex64::new(0.0, -(1.0 - std::f64::consts::FRAC_PI_2));
        assert!((v - want).norm() < 1e-14, "xi(1/2) = {v}");
        // n xi/i = -n(2 sqrt(z) sqrt(1-z) - 2 acos sqrt(z)) on (0,1)
        for &x in &[0.1, 0.33, 0.7, 0.9] {
            let z = Complex64::new(x, 0.0);
            let got = (10.0 * xi_n(&ctx, z).unwrap() / Complex64::new(0.0, 1.0)).re;
            let want = -10.0 * (2.0 * x.sqrt() * (1.0 - x).sqrt() - 2.0 * x.sqrt().acos());
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn phibar_values() {
        let ctx = classical_ctx(10);
        let v = phibar_n(&ctx, Complex64::new(0.0, 0.0)).unwrap();
        assert!(v.norm() < 1e-12, "phibar(0) = {v}");
        // vanishes like sqrt(z): ratio test on z = 10^{-k}
        for k in 2..6 {
            let z = Complex64::new(10f64.powi(-k), 0.0);
            let r = phibar_n(&ctx, z).unwrap().norm() / z.norm().sqrt();
            assert!((r - 2.0).abs() < 0.05, "phibar ~ 2 sqrt(z), ratio {r}");
        }
    }

    #[test]
    fn airy_arg_behaviour() {
        let ctx = classical_ctx(100);
        // real and increasing through 0 across z = 1
        let mut prev = f64::NEG_INFINITY;
        for &x in &[0.95, 0.99, 0.999, 1.001, 1.01, 1.05] {
            let f = airy_arg(&ctx, Complex64::new(x, 0.0)).unwrap();
            assert!(f.im.abs() < 1e-9 * f.norm().max(1.0), "f({x}) = {f}");
            assert!(f.re > prev);
            prev = f.re;
        }
        // series fallback agrees with direct evaluation just inside the
        // switch radius (the direct form loses digits closer to z = 1)
        for &x in &[1.0 + 0.015, 1.0 - 0.015] {
            let ctx2 = classical_ctx(50);
            let f_series = airy_arg(&ctx2, Complex64::new(x, 0.0)).unwrap();
            let xi = xi_n(&ctx2, Complex64::new(x, 0.0)).unwrap();
            let w = Complex64::new(x - 1.0, 0.0);
            let th = theta(Complex64::new(x, 0.0));
            let direct = 50f64.powf(2.0 / 3.0)
                * w
                * (-3.0 * th * xi / (2.0 * w.powf(1.5))).powf(2.0 / 3.0);
            assert!((f_series - direct).norm() <= 1e-9 * direct.norm(), "{f_series} vs {direct}");
        }
        // at 1e-6 from the edge the series value is finite and two-sided
        let fm = airy_arg(&classical_ctx(50), Complex64::new(1.0 - 1e-6, 0.0)).unwrap();
        let fp = airy_arg(&classical_ctx(50), Complex64::new(1.0 + 1e-6, 0.0)).unwrap();
        assert!(fm.re < 0.0 && fp.re > 0.0 && fm.is_finite() && fp.is_finite());
        // n^{2/3} scaling at fixed z
        let f1 = airy_arg(&classical_ctx(100), Complex64::new(1.1, 0.0)).unwrap();
        let f2 = airy_arg(&classical_ctx(1000), Complex64::new(1.1, 0.0)).unwrap();
        assert!(((f2 / f1).re - 10f64.powf(2.0 / 3.0)).abs() < 1e-6);
    }

    #[test]
    fn p_inf_identity_and_limits() {
        for &(re, im) in &[(2.0, 0.0), (1.0, 1.0), (-0.5, 0.3)] {
            let p = p_inf(0.7, Complex64::new(re, im)).unwrap();
            assert!((p.det() - 1.0).norm() < 1e-12, "det = {}", p.det());
        }
        // alpha = 0, z = 9/8: phi = 2
        let p = p_inf(0.0, Complex64::new(9.0 / 8.0, 0.0)).unwrap();
        let s2 = 2f64.sqrt();
        let pref = 1.0 / (2.0 * (9.0f64 / 8.0).powf(0.25) * (1.0f64 / 8.0).powf(0.25));
        assert!((p.0[0] - Complex64::new(pref * s2, 0.0)).norm() < 1e-13);
        // P -> diagonal as z -> infinity: a11/a22 -> 1
        let p = p_inf(0.3, Complex64::new(1e6, 0.0)).unwrap();
        assert!(((p.0[0] / p.0[3]).re - 1.0).abs() < 1e-5);
        assert!(p_inf(0.3, Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn scalar_families() {
        assert_eq!(a_coef(0), 1.0);
        assert!((a_coef(1) - 0.5).abs() < 1e-15);
        assert!((a_coef(3) - 5.0 / 16.0).abs() < 1e-15);
        assert!((nu_k(1) + 1.0 / 36.0).abs() < 1e-16);
        assert!((nu_k(2) + 35.0 / 5184.0).abs() < 1e-16);
        for k in 1..=10 {
            let a = nu_k(k);
            let b = nu_k_alt(k);
            assert!((a - b).abs() <= 1e-13 * a.abs(), "nu_{k}: {a} vs {b}");
        }
        assert_eq!(poch_airy_bessel(0.3, 0), 1.0);
        for m in 1..=4 {
            assert!(poch_airy_bessel(0.5, m).abs() < 1e-15, "(1/2, {m}) = 0");
        }
        // hankel a_k, b_k at k = 1: (4a^2-1)/8, (4a^2+3)/8
        let (a1, b1) = hankel_ab(0.3, 1);
        assert!((a1 - (4.0 * 0.09 - 1.0) / 8.0).abs() < 1e-15);
        assert!((b1 - (4.0 * 0.09 + 3.0) / 8.0).abs() < 1e-15);
        // nu_k = a_k + b_k of the Airy pair is checked in rseries
    }

    #[test]
    fn branch_consistency_on_lens() {
        // Im xi/i small on (0, 1) for classical Q
        let ctx = classical_ctx(25);
        for i in 1..20 {
            let z = Complex64::new(i as f64 / 20.0, 0.0);
            let xi = xi_n(&ctx, z).unwrap();
            let ratio = xi.re.abs() / xi.norm().max(1e-300);
            assert!(ratio <= 1e-13, "xi not imaginary at {z}: {xi}");
        }
    }

    #[test]
    fn xi_general_matches_poly_path() {
        // exp-field xi via segment integration against the m=1-style direct
        // comparison is covered in rseries; here: general integral on the
        // classical weight reproduces the closed form off the cut.
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let f = build_field(&w, 12, None).unwrap();
        let hn = f.hn_poly.clone();
        let mut wg = parse_weight("alpha=0;Q=exp").unwrap();
        // swap in a handle that evaluates classical Q to route through the
        // general path machinery
        wg = crate::weight::WeightSpec::general(
            0.0,
            std::sync::Arc::new(|z: Complex64| (z, Some(Complex64::new(1.0, 0.0)))),
            Some(std::sync::Arc::new(|y: f64| y)),
        )
        .unwrap();
        let fg = build_field(&wg, 12, Some(f.beta)).unwrap();
        let ctx = PhaseContext::new(wg, 12, fg);
        for &(re, im) in &[(1.4, 0.3), (0.5, 0.4), (0.3, 0.001)] {
            let z = Complex64::new(re, im);
            let a = xi_general(&ctx, z).unwrap();
            let b = xi_poly(&hn, z);
            assert!((a - b).norm() < 1e-8, "z={z}: {a} vs {b}");
        }
    }
}
