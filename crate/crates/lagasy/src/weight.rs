//! Weight specification `w(x) = x^alpha e^{-Q(x)}` and the rescaled field
//! `V_n(z) = Q(beta_n z)/n`.

use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Shape of the exterior field Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QKind {
    /// Q(x) = q_m x^m + q_0
    Monomial,
    /// Q(x) = sum q_k x^k, degree m >= 1, q_m > 0
    Polynomial,
    /// Q given by an evaluator handle (built-in: e^x)
    General,
}

/// General-Q evaluator: returns Q(z) and optionally Q'(z).
pub type GeneralQ = Arc<dyn Fn(Complex64) -> (Complex64, Option<Complex64>) + Send + Sync>;

/// The weight `x^alpha e^{-Q(x)}`. Immutable after construction.
#[derive(Clone)]
pub struct WeightSpec {
    pub alpha: f64,
    pub qkind: QKind,
    /// q_0..q_m for Monomial/Polynomial; empty for General.
    pub coeffs: Vec<f64>,
    pub general_q: Option<GeneralQ>,
    /// Optional inverse of Q on the positive reals (initial MRS guess).
    pub general_q_inverse: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    /// Tag used for rendering/serialization of the General variant.
    general_tag: Option<String>,
}

impl fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSpec")
            .field("alpha", &self.alpha)
            .field("qkind", &self.qkind)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for WeightSpec {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha
            && self.qkind == other.qkind
            && self.coeffs == other.coeffs
            && self.general_tag == other.general_tag
    }
}

impl WeightSpec {
    /// Polynomial weight from q_0..q_m. Classifies Monomial automatically.
    pub fn polynomial(alpha: f64, coeffs: Vec<f64>) -> Result<WeightSpec> {
        if !(alpha > -1.0) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        let m = coeffs.len().saturating_sub(1);
        if m < 1 {
            return Err(Error::MalformedSpec("Q needs degree m >= 1".into()));
        }
        let qm = coeffs[m];
        if !(qm > 0.0) {
            return Err(Error::NonPositiveLeading(qm));
        }
        let monomial = coeffs[1..m].iter().all(|&c| c == 0.0);
        Ok(WeightSpec {
            alpha,
            qkind: if monomial { QKind::Monomial } else { QKind::Polynomial },
            coeffs,
            general_q: None,
            general_q_inverse: None,
            general_tag: None,
        })
    }

    /// The classical weight `x^alpha e^{-x}`.
    pub fn classical(alpha: f64) -> Result<WeightSpec> {
        WeightSpec::polynomial(alpha, vec![0.0, 1.0])
    }

    /// General weight from an evaluator handle.
    pub fn general(
        alpha: f64,
        q: GeneralQ,
        q_inverse: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    ) -> Result<WeightSpec> {
        if !(alpha > -1.0) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        Ok(WeightSpec {
            alpha,
            qkind: QKind::General,
            coeffs: Vec::new(),
            general_q: Some(q),
            general_q_inverse: Some(q_inverse.unwrap_or_else(|| Arc::new(|_| 1.0))),
            general_tag: None,
        })
    }

    /// Built-in `Q(x) = e^x` field.
    pub fn exp_field(alpha: f64) -> Result<WeightSpec> {
        let mut w = WeightSpec::general(
            alpha,
            Arc::new(|z: Complex64| (z.exp(), Some(z.exp()))),
            Some(Arc::new(|y: f64| y.max(1.5).ln())),
        )?;
        w.general_tag = Some("exp".into());
        Ok(w)
    }

    /// Degree of the polynomial field (None for General).
    pub fn degree(&self) -> Option<usize> {
        match self.qkind {
            QKind::General => None,
            _ => Some(self.coeffs.len() - 1),
        }
    }

    /// Q(z) for complex z.
    pub fn q(&self, z: Complex64) -> Result<Complex64> {
        match self.qkind {
            QKind::General => {
                let (v, _) = (self.general_q.as_ref().unwrap())(z);
                if !v.is_finite() {
                    return Err(Error::EvaluatorFailure(format!("{z}")));
                }
                Ok(v)
            }
            _ => {
                let mut acc = Complex64::new(0.0, 0.0);
                for &c in self.coeffs.iter().rev() {
                    acc = acc * z + c;
                }
                Ok(acc)
            }
        }
    }

    /// Q'(z); central finite difference if the handle does not supply one.
    pub fn q_prime(&self, z: Complex64) -> Result<Complex64> {
        match self.qkind {
            QKind::General => {
                let (_, d) = (self.general_q.as_ref().unwrap())(z);
                if let Some(d) = d {
                    if !d.is_finite() {
                        return Err(Error::EvaluatorFailure(format!("Q'({z})")));
                    }
                    return Ok(d);
                }
                let h = 1e-7 * (1.0 + z.norm());
                let hp = Complex64::new(h, 0.0);
                let (a, _) = (self.general_q.as_ref().unwrap())(z + hp);
                let (b, _) = (self.general_q.as_ref().unwrap())(z - hp);
                Ok((a - b) / (2.0 * h))
            }
            _ => {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in (1..self.coeffs.len()).rev() {
                    acc = acc * z + k as f64 * self.coeffs[k];
                }
                Ok(acc)
            }
        }
    }

    /// Render back to the textual grammar. `parse_weight(render(w)) == w`.
    pub fn render(&self) -> String {
        match self.qkind {
            QKind::General => format!(
                "alpha={};Q={}",
                self.alpha,
                self.general_tag.as_deref().unwrap_or("exp")
            ),
            QKind::Monomial => {
                let m = self.coeffs.len() - 1;
                if self.coeffs[0] == 0.0 {
                    format!("alpha={};Q=mono:{},{}", self.alpha, m, self.coeffs[m])
                } else {
                    format!("alpha={};Q=mono:{},{},{}", self.alpha, m, self.coeffs[m], self.coeffs[0])
                }
            }
            QKind::Polynomial => {
                let list: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
                format!("alpha={};Q=poly:{}", self.alpha, list.join(","))
            }
        }
    }

    /// JSON form `{"alpha": r, "Q": {"type": ..., "coeffs": [...]}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let (ty, coeffs) = match self.qkind {
            QKind::Monomial => ("mono", self.coeffs.clone()),
            QKind::Polynomial => ("poly", self.coeffs.clone()),
            QKind::General => ("exp", vec![]),
        };
        serde_json::json!({ "alpha": self.alpha, "Q": { "type": ty, "coeffs": coeffs } })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<WeightSpec> {
        let alpha = v["alpha"]
            .as_f64()
            .ok_or_else(|| Error::MalformedSpec("missing alpha".into()))?;
        let ty = v["Q"]["type"]
            .as_str()
            .ok_or_else(|| Error::MalformedSpec("missing Q.type".into()))?;
        match ty {
            "exp" => WeightSpec::exp_field(alpha),
            "poly" | "mono" => {
                let coeffs: Vec<f64> = v["Q"]["coeffs"]
                    .as_array()
                    .ok_or_else(|| Error::MalformedSpec("missing Q.coeffs".into()))?
                    .iter()
                    .map(|x| x.as_f64().unwrap_or(f64::NAN))
                    .collect();
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::MalformedSpec("non-finite coefficient".into()));
                }
                WeightSpec::polynomial(alpha, coeffs)
            }
            other => Err(Error::MalformedSpec(format!("unknown Q type {other}"))),
        }
    }
}

/// Parse the textual grammar:
/// `alpha=<real>;Q=poly:<q0>,...,<qm>` | `Q=mono:<m>,<qm>[,<q0>]` | `Q=exp` | `Q=classical`.
pub fn parse_weight(spec: &str) -> Result<WeightSpec> {
    let mut alpha: Option<f64> = None;
    let mut qpart: Option<&str> = None;
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| Error::MalformedSpec(format!("expected key=value, got '{part}'")))?;
        match key.trim() {
            "alpha" => {
                alpha = Some(val.trim().parse::<f64>().map_err(|_| {
                    Error::MalformedSpec(format!("bad alpha '{val}'"))
                })?)
            }
            "Q" => qpart = Some(val.trim()),
            other => return Err(Error::MalformedSpec(format!("unknown key '{other}'"))),
        }
    }
    let alpha = alpha.ok_or_else(|| Error::MalformedSpec("missing alpha".into()))?;
    if !(alpha > -1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let q = qpart.ok_or_else(|| Error::MalformedSpec("missing Q".into()))?;

    if q == "classical" {
        return WeightSpec::classical(alpha);
    }
    if q == "exp" {
        return WeightSpec::exp_field(alpha);
    }
    if let Some(rest) = q.strip_prefix("poly:") {
        let coeffs = parse_reals(rest)?;
        return WeightSpec::polynomial(alpha, coeffs);
    }
    if let Some(rest) = q.strip_prefix("mono:") {
        let vals = parse_reals(rest)?;
        if vals.len() < 2 || vals.len() > 3 {
            return Err(Error::MalformedSpec("mono:<m>,<qm>[,<q0>]".into()));
        }
        let m = vals[0];
        if m.fract() != 0.0 || m < 1.0 {
            return Err(Error::MalformedSpec(format!("bad monomial degree {m}")));
        }
        let m = m as usize;
        let qm = vals[1];
        let q0 = vals.get(2).copied().unwrap_or(0.0);
        let mut coeffs = vec![0.0; m + 1];
        coeffs[0] = q0;
        coeffs[m] = qm;
        return WeightSpec::polynomial(alpha, coeffs);
    }
    Err(Error::MalformedSpec(format!("unknown Q form '{q}'")))
}

fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::MalformedSpec(format!("bad number '{t}'")))
        })
        .collect()
}

/// The rescaled field V_n(z) = Q(beta z)/n.
pub fn rescaled_field(w: &WeightSpec, n: usize, beta: f64, z: Complex64) -> Result<Complex64> {
    assert!(n >= 1 && beta > 0.0);
    Ok(w.q(beta * z)? / n as f64)
}
