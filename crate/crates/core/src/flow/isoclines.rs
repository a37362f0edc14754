use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::policy::FiscalRegime;
use crate::prefs::lambda_big;
use crate::steady::{a_dot_locus, activist_denominator, fisher_residual};

/// Points in the phase plane stored as parallel arrays.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub a: Vec<f64>,
    pub pi: Vec<f64>,
}

impl Polyline {
    pub fn push(&mut self, a: f64, pi: f64) {
        self.a.push(a);
        self.pi.push(pi);
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// The `π̇ = 0` locus, or the inflation levels it collapses to when `β = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PiDotLocus {
    Curve { line: Polyline },
    Degenerate { fisher_roots: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Isoclines {
    pub pi_dot_zero: PiDotLocus,
    /// Split wherever the locus runs off to infinity.
    pub a_dot_zero: Vec<Polyline>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoclineOptions {
    pub points: usize,
    /// Points with `|a|` beyond this are dropped.
    pub a_limit: f64,
}

impl Default for IsoclineOptions {
    fn default() -> Self {
        IsoclineOptions {
            points: 801,
            a_limit: 10.0,
        }
    }
}

/// Liabilities on the `π̇ = 0` locus, `a = (Ψ - π - ρ)Λ / [β(ρ+μ)]`.
pub fn pi_dot_locus(model: &Model, pi: f64) -> Result<f64> {
    let p = &model.params;
    let w = p.wealth_coeff();
    if w == 0.0 {
        return Err(Error::Domain("pi-dot locus is degenerate when beta = 0".into()));
    }
    let nominal = model.rule.psi(pi);
    Ok((nominal - pi - p.rho) * lambda_big(nominal, p)? / w)
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Both isoclines over `pi_range`, parameterized by inflation.
pub fn isoclines(model: &Model, pi_range: (f64, f64), opts: &IsoclineOptions) -> Result<Isoclines> {
    let (lo, hi) = pi_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("invalid inflation range [{lo}, {hi}]")));
    }
    let pis = grid(lo, hi, opts.points);

    let pi_dot_zero = if model.params.wealth_coeff() == 0.0 {
        let f = |pi: f64| fisher_residual(pi, 0.0, &model.params, &model.rule).unwrap_or(f64::NAN);
        let mut roots = Vec::new();
        for w in pis.windows(2) {
            let (fa, fb) = (f(w[0]), f(w[1]));
            if fa == 0.0 {
                roots.push(w[0]);
            } else if fa * fb < 0.0 {
                let (mut x0, mut x1) = (w[0], w[1]);
                while x1 - x0 > 1e-15 {
                    let mid = 0.5 * (x0 + x1);
                    if (f(mid) < 0.0) == (fa < 0.0) {
                        x0 = mid;
                    } else {
                        x1 = mid;
                    }
                }
                roots.push(0.5 * (x0 + x1));
            }
        }
        PiDotLocus::Degenerate { fisher_roots: roots }
    } else {
        let mut line = Polyline::default();
        for &pi in &pis {
            let a = pi_dot_locus(model, pi)?;
            if a.abs() <= opts.a_limit {
                line.push(a, pi);
            }
        }
        PiDotLocus::Curve { line }
    };

    let a_dot_zero = match &model.regime {
        FiscalRegime::DebtTargeting(d) => {
            let mut line = Polyline::default();
            for &pi in &pis {
                line.push(d.a_star, pi);
            }
            vec![line]
        }
        FiscalRegime::Activist(act) => {
            let mut pieces = Vec::new();
            let mut cur = Polyline::default();
            let mut last_sign: Option<bool> = None;
            for &pi in &pis {
                let sign = activist_denominator(&model.params, &model.rule, act, pi) < 0.0;
                let a = a_dot_locus(&model.params, &model.rule, act, pi);
                let broken = last_sign.is_some_and(|s| s != sign);
                last_sign = Some(sign);
                if broken || !(a.abs() <= opts.a_limit) {
                    if !cur.is_empty() {
                        pieces.push(std::mem::take(&mut cur));
                    }
                    if !(a.abs() <= opts.a_limit) {
                        continue;
                    }
                }
                cur.push(a, pi);
            }
            if !cur.is_empty() {
                pieces.push(cur);
            }
            pieces
        }
    };

    Ok(Isoclines {
        pi_dot_zero,
        a_dot_zero,
    })
}
