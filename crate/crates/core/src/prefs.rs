//! CES preference kernel.
//!
//! With a CES subutility over consumption and real balances, the
//! consumption-to-money ratio is `Ω(R) = (δ/(1-δ))^ε R^ε` and the
//! total-consumption multiplier is `Λ(R) = 1 + R/Ω(R)`. All functions are
//! defined for strictly positive nominal rates only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Demographic and preference constants. Rates are per year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Pure rate of time preference.
    pub rho: f64,
    /// Death hazard.
    pub mu: f64,
    /// Population growth.
    pub n: f64,
    /// Birth rate, always `n + mu`.
    pub beta: f64,
    /// Elasticity of substitution between consumption and real balances.
    pub eps: f64,
    /// CES share weight on consumption.
    pub delta: f64,
}

impl ModelParams {
    /// Builds a parameter set with `beta = n + mu`.
    pub fn new(rho: f64, mu: f64, n: f64, eps: f64, delta: f64) -> Result<Self> {
        let p = ModelParams {
            rho,
            mu,
            n,
            beta: n + mu,
            eps,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks every invariant, returning all violations at once.
    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(problems.join("; ")))
        }
    }

    pub(crate) fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let all = [self.rho, self.mu, self.n, self.beta, self.eps, self.delta];
        if all.iter().any(|x| !x.is_finite()) {
            out.push("params: all fields must be finite".to_string());
            return out;
        }
        if self.rho <= 0.0 {
            out.push(format!("params.rho must be > 0 (got {})", self.rho));
        }
        if self.mu <= 0.0 {
            out.push(format!("params.mu must be > 0 (got {})", self.mu));
        }
        if (self.beta - (self.n + self.mu)).abs() > 1e-12 {
            out.push(format!(
                "params.beta must equal n + mu (got beta = {}, n + mu = {})",
                self.beta,
                self.n + self.mu
            ));
        }
        if self.beta < -1e-15 {
            out.push(format!("params.beta must be >= 0 (got {})", self.beta));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            out.push(format!("params.eps must lie in (0, 1) (got {})", self.eps));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            out.push(format!("params.delta must lie in (0, 1) (got {})", self.delta));
        }
        out
    }

    /// `β(ρ+μ)`, the weight of financial wealth in aggregate consumption growth.
    pub fn wealth_coeff(&self) -> f64 {
        self.beta * (self.rho + self.mu)
    }

    fn share_ratio(&self) -> f64 {
        self.delta / (1.0 - self.delta)
    }
}

fn check_rate(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "money demand is undefined for nominal rate R = {r}"
        )))
    }
}

/// Consumption-to-money ratio `Ω(R)`.
pub fn omega(r: f64, p: &ModelParams) -> Result<f64> {
    check_rate(r)?;
    Ok(p.share_ratio().powf(p.eps) * r.powf(p.eps))
}

/// Total-consumption multiplier `Λ(R) = 1 + (δ/(1-δ))^-ε R^(1-ε)`.
pub fn lambda_big(r: f64, p: &ModelParams) -> Result<f64> {
    check_rate(r)?;
    Ok(1.0 + p.share_ratio().powf(-p.eps) * r.powf(1.0 - p.eps))
}

/// `Λ'(R) = (1-ε)(δ/(1-δ))^-ε R^-ε`.
pub fn lambda_prime(r: f64, p: &ModelParams) -> Result<f64> {
    check_rate(r)?;
    Ok((1.0 - p.eps) * p.share_ratio().powf(-p.eps) * r.powf(-p.eps))
}

/// Share weight `δ` that makes consumption velocity of money equal to
/// `velocity` when the nominal rate is `r_star`.
pub fn calibrate_delta(velocity: f64, r_star: f64, eps: f64) -> Result<f64> {
    if !(velocity > 0.0 && velocity.is_finite()) {
        return Err(Error::Domain(format!("velocity must be > 0 (got {velocity})")));
    }
    check_rate(r_star)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1) (got {eps})")));
    }
    let ratio = velocity.powf(1.0 / eps) / r_star;
    Ok(ratio / (1.0 + ratio))
}

/// Kernel evaluations at a single rate, used on hot paths.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel {
    pub lambda: f64,
    pub lambda_prime: f64,
}

impl Kernel {
    pub fn at(r: f64, p: &ModelParams) -> Result<Self> {
        Ok(Kernel {
            lambda: lambda_big(r, p)?,
            lambda_prime: lambda_prime(r, p)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(eps: f64, delta: f64) -> ModelParams {
        ModelParams::new(0.04, 0.012366, 0.0047, eps, delta).unwrap()
    }

    #[test]
    fn velocity_one_point() {
        let p = params(0.5, 0.9434);
        assert!((omega(0.06, &p).unwrap() - 1.0).abs() < 1e-4);
        let d = calibrate_delta(1.0, 0.06, 0.5).unwrap();
        assert_eq!((d * 1e4).round() / 1e4, 0.9434);
        let p = params(0.6, d);
        assert!((omega(0.06, &p).unwrap() - 1.0).abs() < 1e-14);
        assert!((lambda_big(0.06, &p).unwrap() - 1.06).abs() < 1e-14);
    }

    #[test]
    fn velocity_one_is_eps_independent() {
        let a = calibrate_delta(1.0, 0.06, 0.5).unwrap();
        let b = calibrate_delta(1.0, 0.06, 0.6).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn high_velocity_inversion() {
        let d = calibrate_delta(20.0, 0.06, 0.5).unwrap();
        assert!((d / (1.0 - d) - 400.0 / 0.06).abs() < 1e-6);
        let p = params(0.5, d);
        assert!((omega(0.06, &p).unwrap() - 20.0).abs() < 1e-10);
    }

    #[test]
    fn low_rate_values() {
        // Oracle: (1/0.06)^0.6 * 0.001^0.6, (0.06)^0.6 * 0.001^0.4, 0.4 * 0.06^0.6 * 0.001^-0.6
        // evaluated independently with exact delta = 1/1.06.
        let d = calibrate_delta(1.0, 0.06, 0.6).unwrap();
        let p = params(0.6, d);
        let k: f64 = 0.06f64.powf(0.6);
        assert!((omega(0.001, &p).unwrap() - 0.001f64.powf(0.6) / k).abs() < 1e-14);
        assert!((lambda_big(0.001, &p).unwrap() - 1.011_665_161_349_761).abs() < 1e-12);
        assert!((lambda_prime(0.001, &p).unwrap() - 4.666_064_539_904_497).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_positive_rate() {
        let p = params(0.5, 0.9434);
        assert!(matches!(omega(0.0, &p), Err(Error::Domain(_))));
        assert!(matches!(lambda_big(-0.01, &p), Err(Error::Domain(_))));
        assert!(matches!(lambda_prime(f64::NAN, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn lambda_prime_vanishes_as_eps_to_one() {
        let mut last = f64::INFINITY;
        for eps in [0.9, 0.99, 0.999, 0.9999] {
            let p = params(eps, 0.9);
            let v = lambda_prime(0.05, &p).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn validation_collects_all_problems() {
        let p = ModelParams {
            rho: -1.0,
            mu: 0.01,
            n: 0.0,
            beta: 0.5,
            eps: 1.5,
            delta: 0.5,
        };
        let msg = p.validate().unwrap_err().to_string();
        assert!(msg.contains("rho"));
        assert!(msg.contains("beta"));
        assert!(msg.contains("eps"));
    }
}
