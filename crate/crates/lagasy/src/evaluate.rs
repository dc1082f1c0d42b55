//! Four-region evaluation of p_n(beta_n z) and the coefficient expansions
//! gamma_n, a_n, b_{n-1}, plus Hermite adapters and the derivative identity.
//!
//! Every exponentially large prefactor (beta^n, gamma_n, e^{n(V+l)/2}, the
//! Airy/Bessel growth) is carried in log space; mantissas stay order one.

use crate::auxfun::{self, PhaseContext};
use crate::mrs::{self, FieldData};
use crate::rseries::{RRegion, Tables};
use crate::specfun;
use crate::weight::{rescaled_field, QKind, WeightSpec};
use crate::{Error, Result};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The four evaluation regions of the rescaled plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Lens,
    Outer,
    RightDisk,
    LeftDisk,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Lens => "lens",
            Region::Outer => "outer",
            Region::RightDisk => "right-disk",
            Region::LeftDisk => "left-disk",
        }
    }
}

/// Disk radii and lens half-width used by `classify`.
#[derive(Clone, Copy, Debug)]
pub struct RegionCfg {
    pub r_left: f64,
    pub r_right: f64,
    pub lens_halfwidth: f64,
}

impl Default for RegionCfg {
    fn default() -> Self {
        RegionCfg { r_left: 0.2, r_right: 0.2, lens_halfwidth: 0.1 }
    }
}

/// Region of a rescaled point z.
pub fn classify(z: Complex64, cfg: &RegionCfg) -> Region {
    if z.norm() < cfg.r_left {
        Region::LeftDisk
    } else if (z - 1.0).norm() < cfg.r_right {
        Region::RightDisk
    } else if z.re > cfg.r_left && z.re < 1.0 - cfg.r_right && z.im.abs() < cfg.lens_halfwidth {
        Region::Lens
    } else {
        Region::Outer
    }
}

/// value = mantissa * exp(log_scale), |mantissa| kept near 1.
#[derive(Clone, Copy, Debug)]
pub struct ScaledValue {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn new(mantissa: Complex64, log_scale: f64) -> ScaledValue {
        let mut v = ScaledValue { mantissa, log_scale };
        v.normalize();
        v
    }

    pub fn normalize(&mut self) {
        let n = self.mantissa.norm();
        if n > 0.0 && n.is_finite() && !(0.01..=100.0).contains(&n) {
            self.log_scale += n.ln();
            self.mantissa /= n;
        }
    }

    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    pub fn scale_by(&self, m: Complex64, ls: f64) -> ScaledValue {
        ScaledValue::new(self.mantissa * m, self.log_scale + ls)
    }

    /// |self - other| / |other| without leaving log space.
    pub fn rel_err_to(&self, other_mantissa: Complex64, other_ls: f64) -> f64 {
        let d = self.log_scale - other_ls;
        if d.abs() > 300.0 {
            return f64::INFINITY;
        }
        (self.mantissa * d.exp() - other_mantissa).norm() / other_mantissa.norm()
    }
}

/// cos(a) as (mantissa, log_scale); safe for large |Im a|.
fn scaled_cos(a: Complex64) -> (Complex64, f64) {
    let ls = a.im.abs();
    let ep = (I * a - ls).exp();
    let em = (-I * a - ls).exp();
    (0.5 * (ep + em), ls)
}

/// Normalization of the returned polynomial values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Normalization {
    #[default]
    Orthonormal,
    Monic,
}

/// Degree-bound evaluator: weight + degree + field data + tableaux.
pub struct Evaluator {
    pub weight: WeightSpec,
    pub n: usize,
    pub ctx: PhaseContext,
    pub tables: Tables,
    pub cfg: RegionCfg,
}

impl Evaluator {
    /// Build everything needed to evaluate p_n for this weight at degree n
    /// with up to `terms` correction terms.
    pub fn new(weight: WeightSpec, n: usize, terms: usize) -> Result<Evaluator> {
        let field = mrs::build_field(&weight, n, None)?;
        let tables = crate::rseries::build_tables(&weight, &field, terms.max(1))?;
        let ctx = PhaseContext::new(weight.clone(), n, field);
        Ok(Evaluator { weight, n, ctx, tables, cfg: RegionCfg::default() })
    }

    /// Reuse prebuilt tables (the tableaux are n-free outside the general
    /// regime, so sharing them across degrees is cheap).
    pub fn with_tables(weight: WeightSpec, n: usize, tables: Tables) -> Result<Evaluator> {
        let field = mrs::build_field(&weight, n, None)?;
        let ctx = PhaseContext::new(weight.clone(), n, field);
        Ok(Evaluator { weight, n, ctx, tables, cfg: RegionCfg::default() })
    }

    pub fn beta(&self) -> f64 {
        self.ctx.field.beta
    }

    /// log gamma_n and its sign from the leading-coefficient expansion.
    pub fn gamma_n_log(&self, t_terms: usize) -> Result<(f64, i8)> {
        gamma_n_log(&self.tables, &self.ctx.field, self.weight.alpha, self.n, t_terms)
    }

    /// p_n(beta_n z) with T correction terms.
    pub fn eval(&self, z: Complex64, t_terms: usize) -> Result<ScaledValue> {
        self.eval_normalized(z, t_terms, Normalization::Orthonormal)
    }

    pub fn eval_normalized(
        &self,
        z: Complex64,
        t_terms: usize,
        norm: Normalization,
    ) -> Result<ScaledValue> {
        let region = classify(z, &self.cfg);
        let mut v = match region {
            Region::Lens => self.eval_lens(z, t_terms)?,
            Region::Outer => self.eval_outer(z, t_terms)?,
            Region::RightDisk => self.eval_right(z, t_terms)?,
            Region::LeftDisk => self.eval_left(z, t_terms)?,
        };
        if norm == Normalization::Monic {
            let (lg, sign) = self.gamma_n_log(t_terms)?;
            v = v.scale_by(Complex64::new(sign as f64, 0.0), -lg);
        }
        Ok(v)
    }

    /// Evaluate at the physical coordinate x = beta_n z.
    pub fn eval_at_x(&self, x: f64, t_terms: usize) -> Result<ScaledValue> {
        self.eval(Complex64::new(x / self.beta(), 0.0), t_terms)
    }

    pub fn region_of(&self, z: Complex64) -> Region {
        classify(z, &self.cfg)
    }

    /// Common log-scale prefactor gamma_n beta^n e^{n(V+l)/2} (real part in
    /// the log, phase returned as mantissa).
    fn prefactor(&self, z: Complex64, t_terms: usize) -> Result<(Complex64, f64)> {
        let nf = self.n as f64;
        let f = &self.ctx.field;
        let (lg, sign) = self.gamma_n_log(t_terms)?;
        let v = rescaled_field(&self.weight, self.n, f.beta, z)?;
        let expo = nf * (v + f.ln) / 2.0;
        let ls = lg + nf * f.beta.ln() + expo.re;
        let phase = Complex64::new(0.0, expo.im).exp() * sign as f64;
        Ok((phase, ls))
    }

    /// Lens formula.
    pub fn eval_lens(&self, z: Complex64, t_terms: usize) -> Result<ScaledValue> {
        if classify(z, &self.cfg) != Region::Lens {
            return Err(Error::RegionMismatch);
        }
        let alpha = self.weight.alpha;
        let nf = self.n as f64;
        let ro = self.tables.r_eval(z, self.n, t_terms, RRegion::Outer)?;
        let xi = auxfun::xi_n(&self.ctx, z)?;
        let ac = (2.0 * z - 1.0).acos();
        let phase = nf * (xi / I);
        let a1 = ac * (0.5 + alpha / 2.0) + phase - std::f64::consts::FRAC_PI_4;
        let a2 = ac * (alpha / 2.0 - 0.5) + phase - std::f64::consts::FRAC_PI_4;
        let (c1, l1) = scaled_cos(a1);
        let (c2, l2) = scaled_cos(a2);
        let lc = l1.max(l2);
        let v1 = 2f64.powf(-alpha) * c1 * (l1 - lc).exp();
        let v2 = -I * 2f64.powf(alpha) * c2 * (l2 - lc).exp();
        let row = ro.0[0] * v1 + ro.0[1] * v2;
        let den = z.powf(0.25) * (1.0 - z).powf(0.25) * z.powc(Complex64::new(alpha / 2.0, 0.0));
        let (ph, ls) = self.prefactor(z, t_terms)?;
        Ok(ScaledValue::new(ph * row / den, ls + lc))
    }

    /// Outer formula.
    pub fn eval_outer(&self, z: Complex64, t_terms: usize) -> Result<ScaledValue> {
        if classify(z, &self.cfg) != Region::Outer {
            return Err(Error::RegionMismatch);
        }
        let alpha = self.weight.alpha;
        let nf = self.n as f64;
        let f = &self.ctx.field;
        let ro = self.tables.r_eval(z, self.n, t_terms, RRegion::Outer)?;
        let xi = auxfun::xi_n(&self.ctx, z)?;
        let th = auxfun::theta(z);
        let ac = (2.0 * z - 1.0).acos();
        let (lg, sign) = self.gamma_n_log(t_terms)?;
        let v = rescaled_field(&self.weight, self.n, f.beta, z)?;
        let expo = nf * (v / 2.0 + th * xi + Complex64::new(f.ln / 2.0, 0.0));
        let ls = lg + nf * f.beta.ln() + expo.re;
        let phase = Complex64::new(0.0, expo.im).exp() * sign as f64;
        let sz = (I * th * ac * (alpha / 2.0)).exp();
        let v1 = 2f64.powf(-alpha) * (I * th * ac / 2.0).exp();
        let v2 = -I * 2f64.powf(alpha) * (-I * th * ac / 2.0).exp();
        let row = ro.0[0] * v1 + ro.0[1] * v2;
        let den = 2.0
            * z.powf(0.25)
            * (z - 1.0).powf(0.25)
            * z.powc(Complex64::new(alpha / 2.0, 0.0));
        Ok(ScaledValue::new(phase * sz * row / den, ls))
    }

    /// Right-disk (Airy) formula.
    pub fn eval_right(&self, z: Complex64, t_terms: usize) -> Result<ScaledValue> {
        if classify(z, &self.cfg) != Region::RightDisk {
            return Err(Error::RegionMismatch);
        }
        let alpha = self.weight.alpha;
        let rr = self.tables.r_eval(z, self.n, t_terms, RRegion::RightDisk)?;
        let fnz = auxfun::airy_arg(&self.ctx, z)?;
        let th = auxfun::theta(z);
        let (ai, lai) = specfun::airy_ai_scaled(fnz);
        let (aip, laip) = specfun::airy_ai_prime_scaled(fnz);
        let lm = lai.max(laip);
        let ai = ai * (lai - lm).exp();
        let aip = aip * (laip - lm).exp();
        let ac = (2.0 * z - 1.0).acos();
        let f14 = fnz.powf(0.25);
        let ca = (ac * (alpha + 1.0) / 2.0).cos();
        let sa = (ac * (alpha + 1.0) / 2.0).sin();
        let cb = (ac * (alpha - 1.0) / 2.0).cos();
        let sb = (ac * (alpha - 1.0) / 2.0).sin();
        let v1 = 2f64.powf(-alpha) * (ca * ai * f14 - I * sa * aip / f14 * th);
        let v2 = 2f64.powf(alpha) * (-I * cb * ai * f14 - sb * aip / f14 * th);
        let row = rr.0[0] * v1 + rr.0[1] * v2;
        let den = z.powf(0.25)
            * (z - 1.0).powf(0.25)
            * z.powc(Complex64::new(alpha / 2.0, 0.0));
        let (ph, ls) = self.prefactor(z, t_terms)?;
        let pref = std::f64::consts::PI.sqrt();
        Ok(ScaledValue::new(ph * pref * row / den, ls + lm))
    }

    /// Left-disk (Bessel) formula.
    pub fn eval_left(&self, z: Complex64, t_terms: usize) -> Result<ScaledValue> {
        if classify(z, &self.cfg) != Region::LeftDisk {
            return Err(Error::RegionMismatch);
        }
        let alpha = self.weight.alpha;
        let nf = self.n as f64;
        let rl = self.tables.r_eval(z, self.n, t_terms, RRegion::LeftDisk)?;
        let pb = auxfun::phibar_n(&self.ctx, z)?;
        let arg = 2.0 * I * nf * pb;
        let (jv, lj) = specfun::bessel_j_scaled(alpha, arg)?;
        let (jp, ljp) = specfun::bessel_j_prime_scaled(alpha, arg)?;
        let lm = lj.max(ljp);
        let jv = jv * (lj - lm).exp();
        let jp = jp * (ljp - lm).exp();
        let ac = (2.0 * z - 1.0).acos();
        let off = std::f64::consts::PI * alpha / 2.0;
        let s1 = (ac * (alpha + 1.0) / 2.0 - off).sin();
        let c1 = (ac * (alpha + 1.0) / 2.0 - off).cos();
        let s2 = (ac * (alpha - 1.0) / 2.0 - off).sin();
        let c2 = (ac * (alpha - 1.0) / 2.0 - off).cos();
        let v1 = 2f64.powf(-alpha) * (s1 * jv + c1 * jp);
        let v2 = -I * 2f64.powf(alpha) * (s2 * jv + c2 * jp);
        let row = rl.0[0] * v1 + rl.0[1] * v2;
        let den = z.powf(0.25)
            * (1.0 - z).powf(0.25)
            * z.powc(Complex64::new(alpha / 2.0, 0.0));
        let parity = if self.n % 2 == 0 { 1.0 } else { -1.0 };
        let root = (I * nf * pb * std::f64::consts::PI).sqrt();
        let (ph, ls) = self.prefactor(z, t_terms)?;
        Ok(ScaledValue::new(ph * parity * root * row / den, ls + lm))
    }

    /// Recurrence coefficients (a_n, b_{n-1}) from the U tableaux.
    pub fn recurrence_coeffs(&self, t_terms: usize) -> Result<(f64, f64)> {
        let alpha = self.weight.alpha;
        let beta = self.ctx.field.beta;
        let t = &self.tables;
        let n = self.n;
        let s11 = t.u_sum(1, 0, n, t_terms);
        let s12 = t.u_sum(1, 1, n, t_terms);
        let s21 = t.u_sum(1, 2, n, t_terms);
        let fam = 4f64.powf(-alpha);
        // a_n
        let num = fam * I * (alpha + 2.0) / 16.0
            + t.u_sum_side(mrs::Side::Left, 2, 1, n, t_terms)
            + t.u_sum_side(mrs::Side::Right, 2, 1, n, t_terms)
            + t.u_sum_side(mrs::Side::Right, 1, 1, n, t_terms)
            + s11 * (fam / 4.0 * I)
            + s12 * (alpha / 4.0);
        let den = fam / 4.0 * I + s12;
        let a_n = beta * (-alpha / 4.0 + s11.re + (num / den).re);
        // b_{n-1}
        let rad = 1.0
            + (4.0 * I * (s21 * fam - 4f64.powf(alpha) * s12)).re
            + (16.0 * s21 * s12).re;
        if rad <= 0.0 {
            return Err(Error::NegativeRadicand(t_terms));
        }
        let b_nm1 = beta / 4.0 * rad.sqrt();
        Ok((a_n, b_nm1))
    }

    /// sqrt(n) p_{n-1}^{(alpha+1)}(x), the derivative of p_n at x = beta_n z.
    /// Requires the derivative evaluator built by `derivative_evaluator`.
    pub fn deriv_with(&self, deriv: &Evaluator, x: f64, t_terms: usize) -> Result<ScaledValue> {
        let v = deriv.eval_at_x(x, t_terms)?;
        Ok(v.scale_by(Complex64::new((self.n as f64).sqrt(), 0.0), 0.0))
    }

    /// Companion evaluator for the derivative identity: weight alpha+1, same
    /// field Q, degree n-1.
    pub fn derivative_evaluator(&self, terms: usize) -> Result<Evaluator> {
        let mut w = self.weight.clone();
        w.alpha += 1.0;
        Evaluator::new(w, self.n - 1, terms)
    }
}

/// log gamma_n with sign, from the leading-coefficient expansion.
pub fn gamma_n_log(
    tables: &Tables,
    field: &FieldData,
    alpha: f64,
    n: usize,
    t_terms: usize,
) -> Result<(f64, i8)> {
    let nf = n as f64;
    let s12 = tables.u_sum(1, 1, n, t_terms);
    let rad = (1.0 - 4.0 * I * 4f64.powf(alpha) * s12).re;
    if rad <= 0.0 {
        return Err(Error::NegativeRadicand(t_terms));
    }
    let lg = (-nf - alpha / 2.0 - 0.5) * field.beta.ln() - nf * field.ln / 2.0
        + 0.5 * (2.0 / std::f64::consts::PI).ln()
        + alpha * 2f64.ln()
        - 0.5 * rad.ln();
    Ok((lg, 1))
}

/// Normalized Hermite-type evaluation through the Laguerre map: even degrees
/// go to alpha = -1/2, odd to alpha = +1/2, both at z = x^2 / beta.
pub struct HermiteEvaluator {
    even: Evaluator,
    odd: Evaluator,
}

impl HermiteEvaluator {
    /// `q` are the coefficients of the Hermite-type field sum q_k x^{2k}
    /// (q[0] constant); the Laguerre field is Q(y) = sum q_k y^k.
    pub fn new(q: &[f64], n_h: usize, terms: usize) -> Result<HermiteEvaluator> {
        let w_even = WeightSpec::polynomial(-0.5, q.to_vec())?;
        let w_odd = WeightSpec::polynomial(0.5, q.to_vec())?;
        let n_even = n_h / 2;
        let n_odd = if n_h >= 1 { (n_h - 1) / 2 } else { 0 };
        Ok(HermiteEvaluator {
            even: Evaluator::new(w_even, n_even.max(1), terms)?,
            odd: Evaluator::new(w_odd, n_odd.max(1), terms)?,
        })
    }

    /// H^norm_{n_h}(x) via the Laguerre identities.
    pub fn eval(&self, n_h: usize, x: f64, t_terms: usize) -> Result<ScaledValue> {
        if n_h % 2 == 0 {
            let e = &self.even;
            debug_assert_eq!(e.n, n_h / 2);
            e.eval(Complex64::new(x * x / e.beta(), 0.0), t_terms)
        } else {
            let e = &self.odd;
            debug_assert_eq!(e.n, (n_h - 1) / 2);
            let v = e.eval(Complex64::new(x * x / e.beta(), 0.0), t_terms)?;
            Ok(v.scale_by(Complex64::new(x, 0.0), 0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::classical_eval;
    use crate::specfun::log_gamma;
    use crate::weight::parse_weight;

    fn fit_slope(ns: &[usize], errs: &[f64]) -> f64 {
        let n = ns.len() as f64;
        let xs: Vec<f64> = ns.iter().map(|&v| (v as f64).ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|&e| e.max(1e-17).ln()).collect();
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    fn classical_rel_err(alpha: f64, n: usize, z: f64, corrections: usize) -> f64 {
        let w = parse_weight(&format!("alpha={alpha};Q=classical")).unwrap();
        let ev = Evaluator::new(w, n, corrections.max(1)).unwrap();
        let x = ev.beta() * z;
        let got = ev.eval(Complex64::new(z, 0.0), corrections).unwrap();
        let (om, ols) = classical_eval(alpha, n, Complex64::new(x, 0.0));
        got.rel_err_to(om, ols)
    }

    #[test]
    fn classify_regions() {
        let cfg = RegionCfg::default();
        assert_eq!(classify(Complex64::new(0.5, 0.0), &cfg), Region::Lens);
        assert_eq!(classify(Complex64::new(1.01, 0.0), &cfg), Region::RightDisk);
        assert_eq!(classify(Complex64::new(-2.0, 0.0), &cfg), Region::Outer);
        assert_eq!(classify(Complex64::new(0.05, 0.0), &cfg), Region::LeftDisk);
    }

    #[test]
    fn left_disk_fig2_point() {
        // classical alpha = 0 at z = 0.001 (x = 4n/1000): the Fig. 2 setup
        let errs: Vec<f64> = [64usize, 256, 1024]
            .iter()
            .map(|&n| classical_rel_err(0.0, n, 0.001, 2))
            .collect();
        let slope = fit_slope(&[64, 256, 1024], &errs);
        assert!(
            (-3.0 - slope).abs() < 0.35,
            "3-term slope {slope}, errs {errs:?}"
        );
        assert!(errs[2] < 1e-9, "n=1024 3-term error {:.2e}", errs[2]);
    }

    #[test]
    fn lens_and_outer_against_oracle() {
        // lens point, modest n
        let e = classical_rel_err(0.0, 100, 0.25, 3);
        assert!(e < 1e-7, "lens err {e:.2e}");
        // outer: complex point vs oracle
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let ev = Evaluator::new(w, 100, 3).unwrap();
        let z = Complex64::new(2.0, 0.5);
        let x = ev.beta() * z;
        let got = ev.eval(z, 3).unwrap();
        let (om, ols) = classical_eval(0.0, 100, x);
        let rel = got.rel_err_to(om, ols);
        assert!(rel < 1e-8, "outer err {rel:.2e}");
        // conjugate symmetry
        let gc = ev.eval(z.conj(), 3).unwrap();
        assert!(
            (gc.mantissa - got.mantissa.conj()).norm() < 1e-10 * got.mantissa.norm()
                && (gc.log_scale - got.log_scale).abs() < 1e-9
        );
    }

    #[test]
    fn right_disk_oracle_and_continuity() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let ev = Evaluator::new(w, 500, 2).unwrap();
        // analyticity across z = 1: both sides match the oracle closely
        for &z in &[1.0 - 1e-4, 1.0 + 1e-4] {
            let got = ev.eval(Complex64::new(z, 0.0), 2).unwrap();
            let (om, ols) = classical_eval(0.0, 500, Complex64::new(ev.beta() * z, 0.0));
            let rel = got.rel_err_to(om, ols);
            assert!(rel < 1e-6, "soft-edge z={z}: {rel:.2e}");
        }
        // against the oracle at z = 0.97, alpha = -1/2 (Fig. 3 setup)
        let errs: Vec<f64> = [64usize, 256, 1024]
            .iter()
            .map(|&n| classical_rel_err(-0.5, n, 0.97, 2))
            .collect();
        let slope = fit_slope(&[64, 256, 1024], &errs);
        assert!(slope < -2.4, "right-disk slope {slope}, errs {errs:?}");
    }

    #[test]
    fn realness_on_the_axis() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let ev = Evaluator::new(w, 200, 3).unwrap();
        for i in 1..20 {
            let z = Complex64::new(0.25 + 0.5 * i as f64 / 20.0, 0.0);
            let v = ev.eval(z, 3).unwrap();
            if v.mantissa.norm() > 1e-3 {
                assert!(
                    v.mantissa.im.abs() <= 1e-10 * v.mantissa.norm(),
                    "Im at {z}: {}",
                    v.mantissa.im / v.mantissa.norm()
                );
            }
        }
    }

    #[test]
    fn gamma_log_classical() {
        // exact: log gamma_n = -(log n! + log Gamma(n+1))/2 at alpha = 0
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let ev = Evaluator::new(w, 500, 3).unwrap();
        let (lg, sign) = ev.gamma_n_log(3).unwrap();
        assert_eq!(sign, 1);
        let exact = -log_gamma(501.0);
        assert!((lg - exact).abs() < 1e-8, "log gamma err {:.2e}", (lg - exact).abs());
        // leading order ratio -> 1 (T = 0)
        let (lg0, _) = ev.gamma_n_log(0).unwrap();
        assert!((lg0 - exact).abs() < 1e-2);
        // q0 shift: log gamma increases by q0/2
        let wq = parse_weight("alpha=0;Q=mono:1,1,3").unwrap();
        let evq = Evaluator::new(wq, 500, 3).unwrap();
        let (lgq, _) = evq.gamma_n_log(3).unwrap();
        assert!((lgq - lg - 1.5).abs() < 1e-10, "q0 shift {:.3e}", lgq - lg - 1.5);
    }

    #[test]
    fn recurrence_coeffs_classical() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let ev = Evaluator::new(w, 500, 3).unwrap();
        let (a, b) = ev.recurrence_coeffs(3).unwrap();
        let n = 500.0;
        assert!(((a - (2.0 * n + 1.0)) / (2.0 * n + 1.0)).abs() < 1e-8, "a_n = {a}");
        assert!(((b - n) / n).abs() < 1e-8, "b_nm1 = {b}");
        // leading ratios
        assert!((a / ev.beta() - 0.5).abs() < 1e-3);
        assert!((b / ev.beta() - 0.25).abs() < 1e-3);
    }

    #[test]
    fn deriv_identity() {
        // p_1(x) = x - 1 for alpha = 0: derivative == 1 == sqrt(1) p_0^{(1)}
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        // finite difference at higher degree
        let n = 100;
        let ev = Evaluator::new(w, n, 3).unwrap();
        let dev = ev.derivative_evaluator(3).unwrap();
        let x = 2.0 * n as f64;
        let d = ev.deriv_with(&dev, x, 3).unwrap();
        let h = 1e-5 * x;
        let vp = ev.eval_at_x(x + h, 3).unwrap();
        let vm = ev.eval_at_x(x - h, 3).unwrap();
        let ls = vp.log_scale.max(vm.log_scale);
        let fd = (vp.mantissa * (vp.log_scale - ls).exp() - vm.mantissa * (vm.log_scale - ls).exp())
            / (2.0 * h);
        let rel = (d.mantissa * (d.log_scale - ls).exp() - fd).norm() / fd.norm();
        assert!(rel < 1e-6, "derivative vs central difference: {rel:.2e}");
    }

    #[test]
    fn hermite_even_identity_and_decay() {
        // asymptotic path vs the Hermite recurrence oracle at x = sqrt(3.88 n)
        let mut errs = Vec::new();
        let ns = [64usize, 256, 1024];
        for &n in &ns {
            let h = HermiteEvaluator::new(&[0.0, 1.0], 2 * n, 3).unwrap();
            let x = (3.88 * n as f64).sqrt();
            let got = h.eval(2 * n, x, 2).unwrap();
            let (om, ols) = crate::oracle::hermite_norm_eval(2 * n, x);
            errs.push(got.rel_err_to(Complex64::new(om, 0.0), ols));
        }
        let slope = fit_slope(&ns, &errs);
        assert!(slope < -2.4, "hermite slope {slope}, errs {errs:?}");
    }

    #[test]
    fn monic_normalization() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let ev = Evaluator::new(w, 50, 3).unwrap();
        let z = Complex64::new(3.0, 0.0);
        let on = ev.eval(z, 3).unwrap();
        let mo = ev.eval_normalized(z, 3, Normalization::Monic).unwrap();
        let (lg, _) = ev.gamma_n_log(3).unwrap();
        assert!((mo.log_scale - (on.log_scale - lg)).abs() < 1e-9);
        // monic leading behaviour: value / z^n -> gamma-free growth
        let big = Complex64::new(1e4, 0.0);
        let vb = ev.eval_normalized(big, 3, Normalization::Monic).unwrap();
        let x = ev.beta() * big.re;
        let expect_ls = 50.0 * x.ln();
        assert!(
            ((vb.log_scale - expect_ls) / expect_ls).abs() < 1e-4,
            "monic growth: {} vs {expect_ls}",
            vb.log_scale
        );
    }

    #[test]
    fn overflow_safety_at_huge_n() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let ev = Evaluator::new(w, 1_000_000, 2).unwrap();
        for &(re, im) in &[(0.5, 0.0), (0.001, 0.0), (0.999, 0.0), (3.0, 1.0), (1.0001, 0.0)] {
            let v = ev.eval(Complex64::new(re, im), 2).unwrap();
            assert!(v.mantissa.is_finite() && v.log_scale.is_finite(), "at ({re},{im})");
        }
    }

    #[test]
    fn cross_region_boundary_consistency() {
        // LeftDisk and Lens formulas both track the oracle at the boundary,
        // with errors decaying in n
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let mut prev = f64::INFINITY;
        for &n in &[64usize, 256, 1024] {
            let ev = Evaluator::new(w.clone(), n, 3).unwrap();
            let mut worst = 0.0f64;
            for &z in &[ev.cfg.r_left - 1e-6, ev.cfg.r_left + 1e-6] {
                let got = ev.eval(Complex64::new(z, 0.0), 3).unwrap();
                let (om, ols) = classical_eval(0.0, n, Complex64::new(ev.beta() * z, 0.0));
                worst = worst.max(got.rel_err_to(om, ols));
            }
            assert!(worst < prev.max(1e-11) * 1.5, "boundary rel {worst:.2e} at n={n}");
            prev = worst;
        }
        assert!(prev < 1e-9, "boundary error at n=1024: {prev:.2e}");
    }
}
