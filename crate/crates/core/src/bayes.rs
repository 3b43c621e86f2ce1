//! The orthogonality weight as a Gamma–Poisson posterior.
//!
//! A `Gamma(3/2, 2/λ² - 1)` prior on the energy, updated with a Poisson
//! observation `ℓ`, gives `Gamma(ℓ+3/2, 2/λ²)`, which is the weight of the
//! ℓ-wave polynomials. Equivalently `ω(E) ∝ τ(λ)^{2E} q(E)` with
//! `τ(λ) = e^{-1/λ²}` and `q(E) = E^{ℓ+1/2}`.
//!
//! Gamma distributions are parameterized by rate throughout.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_halfline_real, QuadOptions};
use crate::specfun::lgamma;

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, x, "must be positive and finite"))
    }
}

/// `E^ℓ e^{-E} / ℓ!`.
pub fn poisson_pmf(ell: u32, energy: f64) -> Result<f64> {
    check_positive("energy", energy)?;
    let l = ell as f64;
    Ok((l * energy.ln() - energy - lgamma(l + 1.0)).exp())
}

/// Rate-parameterized Gamma distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaDist {
    pub shape: f64,
    pub rate: f64,
}

impl GammaDist {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        check_positive("shape", shape)?;
        check_positive("rate", rate)?;
        Ok(Self { shape, rate })
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_positive("x", x)?;
        let ln = self.shape * self.rate.ln() + (self.shape - 1.0) * x.ln() - self.rate * x - lgamma(self.shape);
        Ok(ln.exp())
    }

    /// Conjugate update with one Poisson count `j`: `(α, β) → (α + j, β + 1)`.
    pub fn update_poisson(&self, j: u32) -> Self {
        Self {
            shape: self.shape + j as f64,
            rate: self.rate + 1.0,
        }
    }
}

/// `rate^shape x^{shape-1} e^{-rate x} / Γ(shape)`.
pub fn gamma_pdf(x: f64, shape: f64, rate: f64) -> Result<f64> {
    GammaDist::new(shape, rate)?.pdf(x)
}

/// Prior `Gamma(3/2, 2/λ² - 1)`; requires `λ² < 2` so the rate is positive.
pub fn prior(lambda: f64) -> Result<GammaDist> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(invalid("lambda", lambda, "basis scale must be nonzero and finite"));
    }
    let rate = 2.0 / (lambda * lambda) - 1.0;
    if !(rate > 0.0) {
        return Err(invalid("lambda", lambda, "prior rate 2/lambda^2 - 1 must be positive (lambda^2 < 2)"));
    }
    GammaDist::new(1.5, rate)
}

/// Prior density `π_λ(E)`.
pub fn prior_pi(lambda: f64, energy: f64) -> Result<f64> {
    prior(lambda)?.pdf(energy)
}

/// Prior times likelihood of observing `ell`, normalized over `E` by quadrature.
pub fn posterior_numeric(ell: u32, lambda: f64, energy: f64, opts: &QuadOptions) -> Result<f64> {
    let pr = prior(lambda)?;
    let joint = |e: f64| -> f64 {
        match (pr.pdf(e), poisson_pmf(ell, e)) {
            (Ok(a), Ok(b)) => a * b,
            _ => f64::NAN,
        }
    };
    let post = pr.update_poisson(ell);
    let evidence = integrate_halfline_real(
        |e| joint(e) / (e.powf(post.shape - 1.0) * (-post.rate * e).exp()),
        post.shape - 1.0,
        post.rate,
        opts,
    )?;
    Ok(joint(energy) / evidence)
}

/// `ω(E) ∝ τ(λ)^{2E} q(E)` for a fixed observation `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BayesDecomp {
    pub ell: u32,
}

impl BayesDecomp {
    pub fn new(ell: u32) -> Self {
        Self { ell }
    }

    /// `τ(λ) = e^{-1/λ²}`.
    pub fn tau(&self, lambda: f64) -> Result<f64> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(invalid("lambda", lambda, "basis scale must be nonzero and finite"));
        }
        Ok((-1.0 / (lambda * lambda)).exp())
    }

    /// `q(E) = E^{ℓ+1/2}`.
    pub fn q(&self, energy: f64) -> Result<f64> {
        if !(energy >= 0.0) || !energy.is_finite() {
            return Err(invalid("energy", energy, "energy must be nonnegative"));
        }
        Ok(energy.powf(self.ell as f64 + 0.5))
    }

    pub fn prior_shape(&self) -> f64 {
        1.5
    }

    pub fn prior_rate(&self, lambda: f64) -> Result<f64> {
        prior(lambda).map(|p| p.rate)
    }

    /// Posterior after observing `ell`: `Gamma(ℓ+3/2, 2/λ²)`.
    pub fn posterior(&self, lambda: f64) -> Result<GammaDist> {
        prior(lambda).map(|p| p.update_poisson(self.ell))
    }

    /// `f(E) q(E)`, constant in `E` and equal to `2^{-(ℓ+1/2)}`.
    pub fn factorial_constant(&self) -> f64 {
        2f64.powf(-(self.ell as f64 + 0.5))
    }

    /// `τ^{2E} q(E) / ∫ τ^{2y} q(y) dy` with a quadrature denominator.
    pub fn reconstruct_weight(&self, lambda: f64, energy: f64, opts: &QuadOptions) -> Result<f64> {
        let tau = self.tau(lambda)?;
        if tau == 0.0 {
            return Err(Error::InvalidArgument {
                name: "lambda",
                value: lambda,
                reason: "prior generator underflows",
            });
        }
        let mu = self.ell as f64 + 0.5;
        let rate = -2.0 * tau.ln();
        let term = |y: f64| tau.powf(2.0 * y) * self.q(y).unwrap_or(f64::NAN);
        let denom = integrate_halfline_real(|y| term(y) / (y.powf(mu) * (-rate * y).exp()), mu, rate, opts)?;
        Ok(term(energy) / denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gk::factorial_f;
    use crate::lwave::{weight, LWaveParams};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn poisson_examples() {
        assert_relative_eq!(poisson_pmf(0, 2.5).unwrap(), (-2.5f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(poisson_pmf(2, 1.0).unwrap(), 0.183_939_720_585_721_16, max_relative = 1e-14);
        assert!(poisson_pmf(1, 0.0).is_err());
    }

    #[test]
    fn poisson_sums_to_one() {
        for e in [0.3, 1.0, 7.5, 40.0] {
            let top = (e + 40.0 * f64::sqrt(e) + 50.0) as u32;
            let total: f64 = (0..=top).map(|l| poisson_pmf(l, e).unwrap()).sum();
            assert_relative_eq!(total, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_examples() {
        assert_relative_eq!(gamma_pdf(1.0, 1.0, 1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert!(gamma_pdf(1.0, 0.0, 1.0).is_err());
        assert!(gamma_pdf(-1.0, 1.0, 1.0).is_err());
        for (ell, lam) in [(0, 0.7), (1, 1.0), (3, 2.5)] {
            let params = LWaveParams::new(ell, lam).unwrap();
            for e in [0.01, 0.5, 3.0, 20.0] {
                let g = gamma_pdf(e, ell as f64 + 1.5, 2.0 / (lam * lam)).unwrap();
                assert_relative_eq!(g, weight(&params, e).unwrap(), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn gamma_integrates_to_one() {
        let d = GammaDist::new(2.3, 0.7).unwrap();
        let total =
            integrate_halfline_real(|x| d.pdf(x).unwrap() / (x.powf(1.3) * (-0.7 * x).exp()), 1.3, 0.7, &QuadOptions::default())
                .unwrap();
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn prior_examples() {
        for e in [0.2, 1.0, 3.0] {
            let expect = 2.0 / PI.sqrt() * f64::sqrt(e) * (-e).exp();
            assert_relative_eq!(prior_pi(1.0, e).unwrap(), expect, max_relative = 1e-14);
        }
        assert!(prior(2f64.sqrt()).is_err());
        assert!(prior(1.5).is_err());
        let msg = prior(1.5).unwrap_err().to_string();
        assert!(msg.contains("prior rate"));
    }

    #[test]
    fn conjugate_update() {
        let d = BayesDecomp::new(2);
        let post = d.posterior(0.9).unwrap();
        assert_eq!(post.shape, 3.5);
        assert_relative_eq!(post.rate, 2.0 / 0.81, max_relative = 1e-15);
        assert_eq!(d.prior_shape(), 1.5);
        assert_relative_eq!(d.prior_rate(1.0).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn posterior_equals_weight() {
        let opts = QuadOptions::default();
        for ell in [0, 1, 2, 5] {
            for lam in [0.5, 0.8, 1.0, 1.3] {
                let params = LWaveParams::new(ell, lam).unwrap();
                for e in [0.1, 1.0, 5.0, 20.0] {
                    let post = posterior_numeric(ell, lam, e, &opts).unwrap();
                    assert_relative_eq!(post, weight(&params, e).unwrap(), max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let d = BayesDecomp::new(0);
        assert_relative_eq!(d.tau(1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert_eq!(d.q(1.0).unwrap(), 1.0);
        assert_relative_eq!(d.q(4.0).unwrap(), 2.0, max_relative = 1e-15);
        assert!(d.tau(0.0).is_err());
    }

    #[test]
    fn decomposition_reproduces_weight() {
        let opts = QuadOptions::default();
        for ell in [0, 1, 2] {
            let d = BayesDecomp::new(ell);
            for lam in [0.8, 1.0, 1.3] {
                let params = LWaveParams::new(ell, lam).unwrap();
                for e in [0.1, 0.5, 2.0, 7.0, 20.0] {
                    let w = d.reconstruct_weight(lam, e, &opts).unwrap();
                    assert_relative_eq!(w, weight(&params, e).unwrap(), max_relative = 1e-12);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn factorial_is_inverse_q_up_to_constant(ell in 0u32..6, e in 0.01f64..50.0) {
            let d = BayesDecomp::new(ell);
            let product = factorial_f(ell, e).unwrap() * d.q(e).unwrap();
            prop_assert!((product / d.factorial_constant() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tau_in_unit_interval(lam in 0.05f64..50.0) {
            let t = BayesDecomp::new(0).tau(lam).unwrap();
            prop_assert!(t > 0.0 && t < 1.0);
        }
    }
}
