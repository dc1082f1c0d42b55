//! Gauss quadrature rules for the weight: Newton iterations on sqrt(w) p_n
//! seeded per region (Bessel zeros near 0, phase equidistribution in the
//! bulk, Airy zeros near beta_n), with weights from the Christoffel formula.
//! Per-node cost is independent of n.

use crate::evaluate::{Evaluator, ScaledValue};
use crate::oracle;
use crate::specfun::{self, log_gamma};
use crate::weight::{QKind, WeightSpec};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// An n-point Gauss rule for the weight measure.
#[derive(Clone, Debug)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub n: usize,
    pub alpha: f64,
    pub weight_spec: String,
    pub terms: usize,
    pub mu0: f64,
}

/// First Airy zeros; deeper ones from the asymptotic expansion.
const AIRY_ZEROS: [f64; 10] = [
    -2.338107410459767,
    -4.0879494441309706,
    -5.5205598280955511,
    -6.786708090071759,
    -7.9441335871208531,
    -9.0226508533409804,
    -10.040174341558086,
    -11.008524303733263,
    -11.936015563236263,
    -12.828776752865757,
];

fn airy_zero(k: usize) -> f64 {
    if k <= AIRY_ZEROS.len() {
        return AIRY_ZEROS[k - 1];
    }
    let t = 3.0 * std::f64::consts::PI * (4.0 * k as f64 - 1.0) / 8.0;
    -t.powf(2.0 / 3.0)
        * (1.0 + 5.0 / (48.0 * t * t) - 5.0 / (36.0 * t.powi(4)))
}

/// McMahon approximation of the k-th positive zero of J_alpha, refined by
/// Newton on the Bessel function itself.
fn bessel_zero(alpha: f64, k: usize) -> Result<f64> {
    let mu = 4.0 * alpha * alpha;
    let a = (k as f64 + alpha / 2.0 - 0.25) * std::f64::consts::PI;
    let mut x = a - (mu - 1.0) / (8.0 * a)
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * a).powi(3));
    if x <= 0.0 {
        x = a.max(0.5);
    }
    for _ in 0..30 {
        let j = specfun::bessel_j(alpha, Complex64::new(x, 0.0))?.re;
        let jp = specfun::bessel_j_prime(alpha, Complex64::new(x, 0.0))?.re;
        let dx = j / jp;
        x -= dx;
        if dx.abs() < 1e-14 * x {
            break;
        }
    }
    Ok(x)
}

/// Gauss rule with T correction terms; degrees below 8 delegate to the
/// recurrence-based oracle path.
pub fn gauss_rule(w: &WeightSpec, n: usize, terms: usize) -> Result<QuadRule> {
    if n < 8 {
        return gauss_rule_oracle(w, n, terms);
    }
    let ev = Evaluator::new(w.clone(), n, terms.max(1))?;
    let mut wd = w.clone();
    wd.alpha += 1.0;
    let ev_d = if wd.qkind == QKind::General {
        Evaluator::new(wd, n - 1, terms.max(1))?
    } else {
        Evaluator::new(wd, n - 1, terms.max(1))?
    };
    let ev_m1 = Evaluator::with_tables(w.clone(), n - 1, ev.tables.clone())?;

    let beta = ev.beta();
    let n_edge = (n as f64).powf(1.0 / 3.0).ceil() as usize;
    let alpha = w.alpha;

    // phase along the axis: Theta(z) = acos(2z-1)(1/2+alpha/2) + n xi/i - pi/4
    let theta_at = |z: f64| -> Result<f64> {
        let zc = Complex64::new(z, 0.0);
        let xi = crate::auxfun::xi_n(&ev.ctx, zc)?;
        let ac = (2.0 * zc - 1.0).acos();
        Ok((ac * (0.5 + alpha / 2.0) + (n as f64) * (xi / Complex64::new(0.0, 1.0))
            - std::f64::consts::FRAC_PI_4)
            .re)
    };
    // hard-edge phase: the Bessel argument 2 i n phibar, increasing from 0
    let hard_phase = |z: f64| -> Result<f64> {
        let pb = crate::auxfun::phibar_n(&ev.ctx, Complex64::new(z, 0.0))?;
        Ok((Complex64::new(0.0, 2.0 * n as f64) * pb).re)
    };

    let mut seeds = Vec::with_capacity(n);
    // Bessel zone
    for k in 1..=n_edge.min(n) {
        let jk = bessel_zero(alpha, k)?;
        // initial guess from phibar ~ -2 i sqrt(z) f0-ish; then bisection
        let d0 = if ev.ctx.field.d.is_empty() { 4.0 } else { ev.ctx.field.d[0] };
        let mut lo = 1e-14;
        let mut hi = (jk / (n as f64 * d0.max(1e-8))).powi(2).max(1e-12) * 4.0;
        while hard_phase(hi)? < jk {
            hi *= 2.0;
            if hi > 0.5 {
                hi = 0.5;
                break;
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if hard_phase(mid)? < jk {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) < 1e-4 * hi {
                break;
            }
        }
        seeds.push(0.5 * (lo + hi));
    }
    // bulk zone: anchor the half-integer index at the last Bessel seed; the
    // phase solve carries the alpha-dependent offset exactly, so it stays
    // usable until a couple of nodes below the soft edge
    let n_airy = 2usize.min(n_edge);
    let bulk_from = n_edge.min(n) + 1;
    let bulk_to = n.saturating_sub(n_airy);
    if bulk_from <= bulk_to {
        let anchor_z = *seeds.last().unwrap();
        let anchor_theta = theta_at(anchor_z)?;
        let anchor_j = ((anchor_theta - std::f64::consts::FRAC_PI_2)
            / std::f64::consts::PI)
            .round();
        let mut z_prev = anchor_z;
        for k in bulk_from..=bulk_to {
            let target = (anchor_j - (k - n_edge) as f64) * std::f64::consts::PI
                + std::f64::consts::FRAC_PI_2;
            // Newton on the monotone phase with a guarded bracket
            let mut z = z_prev;
            let mut step = (z_prev * (1.0 - z_prev)).max(1e-4) * 3.0 / n as f64;
            let mut hi = z_prev;
            let mut cnt = 0;
            while theta_at(hi)? > target && cnt < 200 {
                hi = (hi + step).min(1.0 - 1e-9);
                step *= 1.5;
                cnt += 1;
            }
            let mut lo = z_prev;
            for _ in 0..80 {
                z = 0.5 * (lo + hi);
                let t = theta_at(z)?;
                if t > target {
                    lo = z;
                } else {
                    hi = z;
                }
                if hi - lo < 1e-6 * z {
                    break;
                }
            }
            seeds.push(z);
            z_prev = z;
        }
    }
    // Airy zone: solve f_n(z) = a_k by bisection (f_n is increasing in z)
    let f_at = |z: f64| -> Result<f64> {
        Ok(crate::auxfun::airy_arg(&ev.ctx, Complex64::new(z, 0.0))?.re)
    };
    for k in (1..=n_airy).rev() {
        let idx = n - k + 1;
        if idx <= seeds.len() {
            continue;
        }
        let ak = airy_zero(k);
        let mut lo = seeds.last().copied().unwrap_or(0.05).max(0.02);
        let mut hi = 1.8;
        // widen down if needed
        let mut flo = f_at(lo)?;
        let mut cnt = 0;
        while flo > ak && lo > 1e-6 && cnt < 60 {
            lo *= 0.5;
            flo = f_at(lo)?;
            cnt += 1;
        }
        let _ = flo;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f_at(mid)? < ak {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-5 * hi {
                break;
            }
        }
        seeds.push(0.5 * (lo + hi));
    }
    if seeds.len() != n {
        return Err(Error::NewtonDivergence { index: seeds.len(), seed: 0.0 });
    }
    if std::env::var("LAGASY_DEBUG_NODES").is_ok() {
        for (i, s) in seeds.iter().enumerate() {
            eprintln!("seed {} = {s}", i + 1);
        }
    }

    // Newton refinement on sqrt(w) p_n, parallel over nodes, each clamped
    // to a trust interval from the neighbouring seeds
    let refined: Vec<Result<f64>> = seeds
        .par_iter()
        .enumerate()
        .map(|(idx, &z0)| {
            let gap_lo = if idx > 0 { z0 - seeds[idx - 1] } else { seeds[1] - z0 };
            let gap_hi = if idx + 1 < seeds.len() { seeds[idx + 1] - z0 } else { gap_lo };
            let lo = (z0 - 0.75 * gap_lo).max(1e-15);
            let hi = z0 + 0.75 * gap_hi;
            newton_node(&ev, &ev_d, z0, terms, idx, lo, hi)
        })
        .collect();
    let mut nodes = Vec::with_capacity(n);
    for r in refined {
        nodes.push(r? * beta);
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for i in 1..nodes.len() {
        if (nodes[i] - nodes[i - 1]).abs() <= 1e-13 * nodes[i].abs() {
            if std::env::var("LAGASY_DEBUG_NODES").is_err() {
                return Err(Error::NodeCollision(nodes[i]));
            }
        }
    }

    // weights: lambda_k = (gamma_n / gamma_{n-1}) / (p_{n-1}(x_k) p_n'(x_k))
    let (lg_n, _) = ev.gamma_n_log(terms)?;
    let (lg_m1, _) = ev_m1.gamma_n_log(terms)?;
    let log_ratio = lg_n - lg_m1;
    let weights: Vec<Result<f64>> = nodes
        .par_iter()
        .map(|&x| -> Result<f64> {
            let pm1 = ev_m1.eval_at_x(x, terms)?;
            let dp = ev.deriv_with(&ev_d, x, terms)?;
            let prod_m = (pm1.mantissa * dp.mantissa).re;
            if prod_m == 0.0 {
                return Err(Error::NewtonDivergence { index: 0, seed: x });
            }
            let log_w = log_ratio - (pm1.log_scale + dp.log_scale) - prod_m.abs().ln();
            Ok(prod_m.signum() * log_w.exp())
        })
        .collect();
    let mut ws = Vec::with_capacity(n);
    for r in weights {
        ws.push(r?);
    }
    let mu0 = mu0_of(w)?;
    Ok(QuadRule {
        nodes,
        weights: ws,
        n,
        alpha,
        weight_spec: w.render(),
        terms,
        mu0,
    })
}

fn newton_node(
    ev: &Evaluator,
    ev_d: &Evaluator,
    z0: f64,
    terms: usize,
    idx: usize,
    z_lo: f64,
    z_hi: f64,
) -> Result<f64> {
    let beta = ev.beta();
    let alpha = ev.weight.alpha;
    let mut x = z0 * beta;
    let (x_lo, x_hi) = (z_lo * beta, z_hi * beta);
    let mut clamped = 0;
    let mut last = f64::INFINITY;
    for _ in 0..24 {
        let p = ev.eval_at_x(x, terms)?;
        let d = ev.deriv_with(ev_d, x, terms)?;
        let qp = ev.weight.q_prime(Complex64::new(x, 0.0))?.re;
        // F = sqrt(w) p: F'/F-shift keeps iterates in the basin
        let base = p.log_scale.max(d.log_scale);
        let pm = p.mantissa * (p.log_scale - base).exp();
        let dm = d.mantissa * (d.log_scale - base).exp();
        let denom = dm + (alpha / (2.0 * x) - qp / 2.0) * pm;
        if denom.norm() == 0.0 {
            return Err(Error::NewtonDivergence { index: idx, seed: z0 });
        }
        let dx = (pm / denom).re;
        let target = x - dx;
        if !(target.is_finite()) {
            return Err(Error::NewtonDivergence { index: idx, seed: z0 });
        }
        if target < x_lo || target > x_hi {
            x = target.clamp(x_lo, x_hi);
            clamped += 1;
            if clamped > 6 {
                return Err(Error::NewtonDivergence { index: idx, seed: z0 });
            }
            continue;
        }
        x = target;
        if dx.abs() <= 1e-14 * x + 1e-15 {
            return Ok(x / beta);
        }
        last = dx.abs();
    }
    if last <= 1e-11 * x + 1e-12 {
        return Ok(x / beta);
    }
    Err(Error::NewtonDivergence { index: idx, seed: z0 })
}

fn mu0_of(w: &WeightSpec) -> Result<f64> {
    // classical-like weights have Gamma closed forms; otherwise integrate
    if w.qkind == QKind::Monomial && w.degree() == Some(1) {
        let q0 = w.coeffs[0];
        let q1 = w.coeffs[1];
        return Ok((log_gamma(w.alpha + 1.0) - (w.alpha + 1.0) * q1.ln() - q0).exp());
    }
    oracle::integrate_weight(w, |_| 1.0, 13)
}

/// Oracle path for tiny rules: recurrence values with exact/derived
/// coefficients, roots by bisection + Newton carrying derivatives.
fn gauss_rule_oracle(w: &WeightSpec, n: usize, terms: usize) -> Result<QuadRule> {
    let classical = w.qkind == QKind::Monomial && w.degree() == Some(1) && w.coeffs[1] == 1.0 && w.coeffs[0] == 0.0;
    let tbl = if classical {
        None
    } else {
        Some(oracle::stieltjes_coeffs(w, n + 2, 20)?)
    };
    let pn = |x: f64| -> (f64, f64) {
        // (p_n, p_n') by the derivative-carrying recurrence
        let (mut p_prev, mut dp_prev) = (0.0f64, 0.0f64);
        let mu0 = match &tbl {
            Some(t) => t.mu0.to_f64(),
            None => log_gamma(w.alpha + 1.0).exp(),
        };
        let mut p = 1.0 / mu0.sqrt();
        let mut dp = 0.0f64;
        for k in 0..n {
            let (a_k, b_k, b_km1) = match &tbl {
                Some(t) => (
                    t.a[k].to_f64(),
                    t.b[k].to_f64(),
                    if k > 0 { t.b[k - 1].to_f64() } else { 0.0 },
                ),
                None => {
                    let kf = k as f64;
                    (
                        2.0 * kf + w.alpha + 1.0,
                        ((kf + 1.0) * (kf + 1.0 + w.alpha)).sqrt(),
                        if k > 0 { (kf * (kf + w.alpha)).sqrt() } else { 0.0 },
                    )
                }
            };
            let p_next = ((x - a_k) * p - b_km1 * p_prev) / b_k;
            let dp_next = (p + (x - a_k) * dp - b_km1 * dp_prev) / b_k;
            p_prev = p;
            p = p_next;
            dp_prev = dp;
            dp = dp_next;
        }
        (p, dp)
    };
    // bracket roots on a fine grid
    let hi = match w.qkind {
        QKind::General => crate::mrs::mrs_numeric(w, n, 1e-10)? * 1.2 + 4.0,
        _ => {
            let b = crate::mrs::mrs_numeric(w, n, 1e-10)?;
            b * 1.2 + 4.0
        }
    };
    let grid = 60 * n;
    let mut nodes = Vec::with_capacity(n);
    let mut prev_x = hi * 1e-9;
    let mut prev_p = pn(prev_x).0;
    for i in 1..=grid {
        let x = hi * i as f64 / grid as f64;
        let p = pn(x).0;
        if p == 0.0 || (p < 0.0) != (prev_p < 0.0) {
            // Newton refine
            let mut r = 0.5 * (x + prev_x);
            for _ in 0..80 {
                let (pv, dv) = pn(r);
                let dx = pv / dv;
                r -= dx;
                if dx.abs() < 1e-15 * r.abs().max(1e-300) {
                    break;
                }
            }
            nodes.push(r);
        }
        prev_x = x;
        prev_p = p;
    }
    if nodes.len() != n {
        return Err(Error::NewtonDivergence { index: nodes.len(), seed: hi });
    }
    // weights from the Christoffel formula with table coefficients
    let b_nm1 = match &tbl {
        Some(t) => t.b[n - 1].to_f64(),
        None => {
            let kf = (n - 1) as f64;
            ((kf + 1.0) * (kf + 1.0 + w.alpha)).sqrt()
        }
    };
    let pnm1 = |x: f64| -> f64 {
        let (mut p_prev, mut p) = (
            0.0f64,
            1.0 / match &tbl {
                Some(t) => t.mu0.to_f64().sqrt(),
                None => log_gamma(w.alpha + 1.0).exp().sqrt(),
            },
        );
        for k in 0..(n - 1) {
            let (a_k, b_k, b_km1) = match &tbl {
                Some(t) => (
                    t.a[k].to_f64(),
                    t.b[k].to_f64(),
                    if k > 0 { t.b[k - 1].to_f64() } else { 0.0 },
                ),
                None => {
                    let kf = k as f64;
                    (
                        2.0 * kf + w.alpha + 1.0,
                        ((kf + 1.0) * (kf + 1.0 + w.alpha)).sqrt(),
                        if k > 0 { (kf * (kf + w.alpha)).sqrt() } else { 0.0 },
                    )
                }
            };
            let p_next = ((x - a_k) * p - b_km1 * p_prev) / b_k;
            p_prev = p;
            p = p_next;
        }
        p
    };
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| 1.0 / (b_nm1 * pn(x).1 * pnm1(x)))
        .collect();
    let mu0 = match &tbl {
        Some(t) => t.mu0.to_f64(),
        None => log_gamma(w.alpha + 1.0).exp(),
    };
    Ok(QuadRule {
        nodes,
        weights,
        n,
        alpha: w.alpha,
        weight_spec: w.render(),
        terms,
        mu0,
    })
}

/// Moment-exactness and positivity report.
#[derive(Clone, Debug)]
pub struct RuleReport {
    pub all_weights_positive: bool,
    pub sum_weights: f64,
    pub mu0: f64,
    /// per-degree relative residual against the exact moments
    pub moment_residuals: Vec<f64>,
}

/// Check integral exactness on monomials up to max_degree (relative, with
/// compensated sums).
pub fn check_rule(w: &WeightSpec, rule: &QuadRule, max_degree: usize) -> Result<RuleReport> {
    let positive = rule.weights.iter().all(|&x| x > 0.0);
    let sum_w = kahan_sum(rule.weights.iter().copied());
    let classical = w.qkind == QKind::Monomial && w.degree() == Some(1) && w.coeffs[1] == 1.0 && w.coeffs[0] == 0.0;
    let mut res = Vec::with_capacity(max_degree + 1);
    for deg in 0..=max_degree {
        let approx = kahan_sum(
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&x, &wt)| wt * x.powi(deg as i32)),
        );
        let exact = if classical {
            // int x^{deg} x^alpha e^-x = Gamma(deg + alpha + 1)
            (log_gamma(deg as f64 + w.alpha + 1.0)).exp()
        } else {
            oracle::integrate_weight(w, |x| x.powi(deg as i32), 13)?
        };
        res.push((approx - exact).abs() / exact.abs());
    }
    Ok(RuleReport {
        all_weights_positive: positive,
        sum_weights: sum_w,
        mu0: rule.mu0,
        moment_residuals: res,
    })
}

fn kahan_sum<I: Iterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for v in it {
        let y = v - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

/// CSV rows `node,weight` with 17 significant digits, ascending nodes.
pub fn rule_to_csv(rule: &QuadRule) -> String {
    let mut out = String::from("node,weight\n");
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        out.push_str(&format!("{x:.16e},{w:.16e}\n"));
    }
    out
}

pub fn rule_to_json(rule: &QuadRule) -> serde_json::Value {
    serde_json::json!({
        "n": rule.n,
        "alpha": rule.alpha,
        "weight": rule.weight_spec,
        "terms": rule.terms,
        "mu0": rule.mu0,
        "nodes": rule.nodes,
        "weights": rule.weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::parse_weight;

    #[test]
    fn tiny_rule_closed_form() {
        // n = 2 classical: nodes 2 -+ sqrt2, weights (2 +- sqrt2)/4
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let r = gauss_rule(&w, 2, 1).unwrap();
        let s2 = 2f64.sqrt();
        assert!((r.nodes[0] - (2.0 - s2)).abs() < 1e-12, "{:?}", r.nodes);
        assert!((r.nodes[1] - (2.0 + s2)).abs() < 1e-12);
        assert!((r.weights[0] - (2.0 + s2) / 4.0).abs() < 1e-12, "{:?}", r.weights);
        assert!((r.weights[1] - (2.0 - s2) / 4.0).abs() < 1e-12);
        // degree <= 3 exactness (Gauss order 2n-1)
        let rep = check_rule(&w, &r, 3).unwrap();
        assert!(rep.moment_residuals.iter().all(|&e| e < 1e-12), "{:?}", rep.moment_residuals);
    }

    #[test]
    fn rule_n100_classical() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let r = gauss_rule(&w, 100, 6).unwrap();
        assert_eq!(r.nodes.len(), 100);
        let rep = check_rule(&w, &r, 21).unwrap();
        assert!(rep.all_weights_positive);
        assert!((rep.sum_weights - 1.0).abs() < 1e-12, "sum w = {}", rep.sum_weights);
        for (d, e) in rep.moment_residuals.iter().enumerate() {
            assert!(*e < 1e-11, "moment {d}: {e:.2e}");
        }
        // nodes match oracle-refined roots
        for &x in r.nodes.iter() {
            let (p, _) = oracle::classical_eval(0.0, 100, num_complex::Complex64::new(x, 0.0));
            // |p| should be tiny relative to neighbors: refine by local Newton
            let h = 1e-6 * x;
            let (pp, _) = oracle::classical_eval(0.0, 100, num_complex::Complex64::new(x + h, 0.0));
            let (pm, _) = oracle::classical_eval(0.0, 100, num_complex::Complex64::new(x - h, 0.0));
            let dp = (pp - pm) / (2.0 * h);
            let shift = (p / dp).norm();
            assert!(shift < 1e-10 * x, "node {x}: residual shift {shift:e}");
        }
    }

    #[test]
    fn interlacing_oracle() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        for n in [8usize, 16, 33, 64] {
            let r1 = gauss_rule(&w, n, 2).unwrap();
            let r2 = gauss_rule(&w, n + 1, 2).unwrap();
            for k in 0..n {
                assert!(
                    r2.nodes[k] < r1.nodes[k] && r1.nodes[k] < r2.nodes[k + 1],
                    "interlacing fails at n={n}, k={k}"
                );
            }
        }
    }

    #[test]
    fn largest_node_asymptotic() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let n = 1000;
        let r = gauss_rule(&w, n, 2).unwrap();
        let x_max = *r.nodes.last().unwrap();
        let base = 4.0 * n as f64 + 2.0;
        let predict = base + 2f64.powf(2.0 / 3.0) * AIRY_ZEROS[0] * base.powf(1.0 / 3.0);
        assert!(
            ((x_max - predict) / predict).abs() < 1e-3,
            "largest node {x_max} vs {predict}"
        );
    }

    #[test]
    fn generalized_alpha_rule() {
        let w = parse_weight("alpha=1.3;Q=classical").unwrap();
        let r = gauss_rule(&w, 60, 5).unwrap();
        let rep = check_rule(&w, &r, 8).unwrap();
        assert!(rep.all_weights_positive);
        // sum w = mu0 = Gamma(alpha+1)
        let mu0 = log_gamma(2.3).exp();
        assert!(
            ((rep.sum_weights - mu0) / mu0).abs() < 1e-11,
            "sum {} vs {mu0}",
            rep.sum_weights
        );
        for (d, e) in rep.moment_residuals.iter().enumerate() {
            assert!(*e < 1e-10, "moment {d}: {e:.2e}");
        }
    }

    #[test]
    fn csv_format() {
        let w = parse_weight("alpha=0;Q=classical").unwrap();
        let r = gauss_rule(&w, 2, 1).unwrap();
        let csv = rule_to_csv(&r);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "node,weight");
        let first = lines.next().unwrap();
        assert!(first.contains(','), "{first}");
        // 17 significant digits
        assert!(first.split(',').next().unwrap().len() >= 18);
    }
}
