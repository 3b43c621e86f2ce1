//! Gazeau–Klauder coherent states for the ℓ-wave model.
//!
//! With the factorial function `f(E) = (2E)^{-(ℓ+1/2)}` the states
//! `|s,γ⟩ = N(s)^{-1/2} ∫ s^E f(E)^{-1/2} e^{-iγE} |E⟩ dE` coincide with the
//! tridiagonal coherent states once `s = e^{-1/λ²}`.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::lwave::{eigenstate, EigenNormalization};
use crate::quad::{integrate_halfline, integrate_halfline_real, integrate_radial, QuadOptions};
use crate::specfun::lgamma;

fn order(ell: u32) -> f64 {
    ell as f64 + 0.5
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(invalid("s", s, "label must lie in (0, 1)"))
    }
}

/// `f(E) = (2E)^{-(ℓ+1/2)}`.
pub fn factorial_f(ell: u32, energy: f64) -> Result<f64> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(invalid("energy", energy, "factorial function requires positive energy"));
    }
    Ok((2.0 * energy).powf(-order(ell)))
}

/// `σ(s) = ln(1/s)^{ℓ-1/2} / (s Γ(ℓ+1/2))` on `(0,1)`, zero for `s ≥ 1`.
pub fn sigma_weight(ell: u32, s: f64) -> Result<f64> {
    if !(s > 0.0) || s.is_nan() {
        return Err(invalid("s", s, "moment weight requires s > 0"));
    }
    if s >= 1.0 {
        return Ok(0.0);
    }
    let t = -s.ln();
    Ok(((ell as f64 - 0.5) * t.ln() - s.ln() - lgamma(order(ell))).exp())
}

/// `∫₀¹ s^{2E} σ(s) ds`, evaluated in `t = ln(1/s)`.
pub fn sigma_moment(ell: u32, energy: f64, opts: &QuadOptions) -> Result<f64> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(invalid("energy", energy, "moment order must be positive"));
    }
    let alpha = ell as f64 - 0.5;
    integrate_halfline_real(
        |t| {
            // beyond this the rule weight e^{-2Et} is negligible and 1/s overflows
            if t > 575.0 {
                return 0.0;
            }
            let s = (-t).exp();
            // ds = s dt; the e^{-2Et} factor is carried by the rule
            sigma_weight(ell, s).unwrap_or(0.0) * s / t.powf(alpha)
        },
        alpha,
        2.0 * energy,
        opts,
    )
}

/// `N(s) = ½ Γ(ℓ+3/2) ln(1/s)^{-(ℓ+3/2)}`.
pub fn gk_normalization(ell: u32, s: f64) -> Result<f64> {
    check_s(s)?;
    let t = -s.ln();
    let g = ell as f64 + 1.5;
    Ok(0.5 * (lgamma(g) - g * t.ln()).exp())
}

/// `N(s) = ∫₀^∞ s^{2E}/f(E) dE` by quadrature.
pub fn gk_normalization_quadrature(ell: u32, s: f64, opts: &QuadOptions) -> Result<f64> {
    check_s(s)?;
    let mu = order(ell);
    integrate_halfline_real(
        |e| factorial_f(ell, e).map(|f| 1.0 / (f * e.powf(mu))).unwrap_or(0.0),
        mu,
        -2.0 * s.ln(),
        opts,
    )
}

/// `s = e^{-1/λ²}`.
pub fn reparametrize(lambda: f64) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(invalid("lambda", lambda, "basis scale must be nonzero and finite"));
    }
    Ok((-1.0 / (lambda * lambda)).exp())
}

/// `λ = ln(1/s)^{-1/2}`, the positive inverse of [`reparametrize`].
pub fn lambda_from_s(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok((-s.ln()).powf(-0.5))
}

/// Gazeau–Klauder label `(s, γ)` for angular momentum `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GkLabel {
    s: f64,
    gamma: f64,
    ell: u32,
}

impl GkLabel {
    pub fn new(ell: u32, s: f64, gamma: f64) -> Result<Self> {
        check_s(s)?;
        if !gamma.is_finite() {
            return Err(invalid("gamma", gamma, "evolution parameter must be finite"));
        }
        Ok(Self { s, gamma, ell })
    }

    pub fn from_lambda(ell: u32, lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(ell, reparametrize(lambda)?, gamma)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn lambda(&self) -> f64 {
        (-self.s.ln()).powf(-0.5)
    }

    /// `ln(1/s)`.
    fn depth(&self) -> f64 {
        -self.s.ln()
    }
}

/// `⟨r|s,γ⟩ = N(s)^{-1/2} ∫ s^E f(E)^{-1/2} e^{-iγE} sqrt(r) J_{ℓ+1/2}(r sqrt(2E)) dE`.
///
/// Uses the δ-normalized eigenstates; the integrand behaves as `E^{ℓ+1/2}`
/// near zero, which is absorbed into the rule.
pub fn gk_wavefunction(label: &GkLabel, r: f64, opts: &QuadOptions) -> Result<Complex64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("r", r, "radius must be positive"));
    }
    let ell = label.ell;
    let mu = order(ell);
    let integral = integrate_halfline(
        |e| {
            let amp = factorial_f(ell, e).unwrap_or(f64::NAN).powf(-0.5);
            let psi = eigenstate(ell, e, r, EigenNormalization::Delta).unwrap_or(f64::NAN);
            Complex64::new(amp * psi / e.powf(mu), 0.0)
        },
        mu,
        Complex64::new(label.depth(), label.gamma),
        opts,
    )?;
    Ok(integral.value / gk_normalization(ell, label.s)?.sqrt())
}

/// `∫₀^∞ |⟨r|s,γ⟩|² dr` with the state evaluated by quadrature at every node.
///
/// Far out the state is tiny and cancellation limits the energy integral,
/// so the absolute tolerance is raised to at least `1e-12` of the state scale.
pub fn gk_norm_squared(label: &GkLabel, radial_points: usize, opts: &QuadOptions) -> Result<f64> {
    let t = label.depth();
    let scale = gk_normalization(label.ell, label.s)?.sqrt();
    let opts = &QuadOptions {
        abs_tol: opts.abs_tol.max(1e-12 * scale),
        ..*opts
    };
    let kappa = t / (t * t + label.gamma * label.gamma);
    let failure = RefCell::new(None);
    let total = integrate_radial(
        |r| match gk_wavefunction(label, r, opts) {
            Ok(v) => v.norm_sqr(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        order(label.ell),
        kappa,
        radial_points,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lwave::{basis_phi, cs_closed, LWaveParams};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn factorial_examples() {
        assert_eq!(factorial_f(0, 0.5).unwrap(), 1.0);
        assert_eq!(factorial_f(1, 0.5).unwrap(), 1.0);
        assert_relative_eq!(factorial_f(2, 2.0).unwrap(), 4f64.powf(-2.5), max_relative = 1e-15);
        assert!(factorial_f(0, 0.0).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_relative_eq!(sigma_weight(0, (-1.0f64).exp()).unwrap(), E / PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(sigma_weight(0, (-1.0f64).exp()).unwrap(), 1.533_626_292_763_742_3, max_relative = 1e-13);
        assert_eq!(sigma_weight(1, 1.0).unwrap(), 0.0);
        assert_eq!(sigma_weight(1, 2.0).unwrap(), 0.0);
        assert!(sigma_weight(0, 0.0).is_err());
    }

    #[test]
    fn moment_problem() {
        let opts = QuadOptions::default();
        for ell in 0..=3 {
            for e in [0.1, 0.25, 1.0, 4.0, 10.0] {
                let m = sigma_moment(ell, e, &opts).unwrap();
                assert_relative_eq!(m, factorial_f(ell, e).unwrap(), max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn normalization_examples() {
        let s = (-1.0f64).exp();
        assert_relative_eq!(gk_normalization(0, s).unwrap(), PI.sqrt() / 4.0, max_relative = 1e-14);
        assert!(gk_normalization(0, 1.0).is_err());
        assert!(gk_normalization(0, 0.0).is_err());
        assert!(gk_normalization(1, 0.999_999).unwrap() > 1e14);
        let opts = QuadOptions::default();
        for ell in 0..=3 {
            for s in [0.1, s, 0.9] {
                let q = gk_normalization_quadrature(ell, s, &opts).unwrap();
                assert_relative_eq!(q, gk_normalization(ell, s).unwrap(), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn reparametrization() {
        assert_relative_eq!(reparametrize(1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert!(reparametrize(1e4).unwrap() < 1.0);
        assert!(reparametrize(1e4).unwrap() > 1.0 - 1e-7);
        assert!(reparametrize(0.0).is_err());
        assert_eq!(reparametrize(-2.0).unwrap(), reparametrize(2.0).unwrap());
    }

    #[test]
    fn label_validation() {
        assert!(GkLabel::new(0, 1.0, 0.0).is_err());
        assert!(GkLabel::new(0, 0.5, f64::INFINITY).is_err());
        let label = GkLabel::from_lambda(1, 1.3, 0.2).unwrap();
        assert_relative_eq!(label.lambda(), 1.3, max_relative = 1e-14);
    }

    #[test]
    fn wavefunction_matches_closed_form() {
        let opts = QuadOptions::default();
        for ell in [0, 1] {
            let params = LWaveParams::new(ell, 1.0).unwrap();
            for gamma in [0.0, 0.5, 2.0] {
                let label = GkLabel::from_lambda(ell, 1.0, gamma).unwrap();
                for r in [0.5, 1.0, 2.0] {
                    let gk = gk_wavefunction(&label, r, &opts).unwrap();
                    let closed = cs_closed(&params, gamma, r).unwrap();
                    assert!((gk - closed).norm() < 1e-8, "ell={ell} gamma={gamma} r={r}");
                }
            }
        }
    }

    #[test]
    fn wavefunction_real_at_zero_gamma() {
        let params = LWaveParams::new(2, 0.8).unwrap();
        let label = GkLabel::from_lambda(2, 0.8, 0.0).unwrap();
        let v = gk_wavefunction(&label, 1.1, &QuadOptions::default()).unwrap();
        assert_eq!(v.im, 0.0);
        assert_relative_eq!(v.re, basis_phi(&params, 0, 1.1).unwrap(), max_relative = 1e-9);
    }

    #[test]
    fn states_are_normalized() {
        let opts = QuadOptions::default();
        for (ell, lam, gamma) in [(0, 1.0, 0.0), (1, 1.0, 2.0), (2, 0.7, 0.5)] {
            let label = GkLabel::from_lambda(ell, lam, gamma).unwrap();
            let n = gk_norm_squared(&label, 16, &opts).unwrap();
            assert_relative_eq!(n, 1.0, max_relative = 1e-8);
        }
    }

    proptest! {
        #[test]
        fn round_trip(lam in 0.3f64..10.0) {
            let back = lambda_from_s(reparametrize(lam).unwrap()).unwrap();
            prop_assert!((back - lam).abs() <= 1e-14 * lam.max(1.0) * 10.0);
        }

        #[test]
        fn sigma_nonnegative(ell in 0u32..8, s in 1e-6f64..0.999_999) {
            prop_assert!(sigma_weight(ell, s).unwrap() >= 0.0);
        }
    }
}
