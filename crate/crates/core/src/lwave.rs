//! The free particle in the ℓ-wave, `H = -½ d²/dr² + ½ ℓ(ℓ+1)/r²`, in the
//! Laguerre basis. Everything here has a closed form; the generic
//! tridiagonal machinery is checked against it.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::quad::integrate_radial;
use crate::specfun::{bessel_j_half_unchecked, laguerre, laguerre_sequence, lgamma};
use crate::tridiag::{
    kernel_abel, AbelOptions, AbelSum, Envelope, LadderSpec, SpectralModel, TridiagonalSpec,
};

/// Angular momentum `ell` and basis scale `lambda > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LWaveParams {
    ell: u32,
    lambda: f64,
}

impl LWaveParams {
    pub fn new(ell: u32, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda", lambda, "basis scale must be positive"));
        }
        Ok(Self { ell, lambda })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Laguerre order `ell + 1/2`.
    pub fn order(&self) -> f64 {
        self.ell as f64 + 0.5
    }

    /// Gamma shape `ell + 3/2` of the weight.
    pub fn shape(&self) -> f64 {
        self.ell as f64 + 1.5
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(invalid("r", r, "radius must be positive and finite"))
    }
}

fn check_energy(energy: f64) -> Result<()> {
    if energy >= 0.0 && energy.is_finite() {
        Ok(())
    } else {
        Err(invalid("energy", energy, "energy must be nonnegative and finite"))
    }
}

/// `ln` of `sqrt(2λ n!/Γ(n+ℓ+3/2)) (λr)^{ℓ+1} e^{-λ²r²/2}`.
fn ln_basis_prefactor(p: &LWaveParams, n: usize, r: f64) -> f64 {
    let lam = p.lambda;
    let nf = n as f64;
    0.5 * ((2.0 * lam).ln() + lgamma(nf + 1.0) - lgamma(nf + p.shape()))
        + (p.ell as f64 + 1.0) * (lam * r).ln()
        - 0.5 * (lam * r).powi(2)
}

/// Basis function `φ_n(r)`, orthonormal on `(0, ∞)`.
pub fn basis_phi(params: &LWaveParams, n: usize, r: f64) -> Result<f64> {
    check_r(r)?;
    let lag = laguerre(n, params.order(), (params.lambda * r).powi(2))?;
    Ok(ln_basis_prefactor(params, n, r).exp() * lag)
}

/// `φ_0(r), ..., φ_n(r)`.
pub fn basis_sequence(params: &LWaveParams, n: usize, r: f64) -> Result<Vec<f64>> {
    check_r(r)?;
    let lag = laguerre_sequence(n, params.order(), (params.lambda * r).powi(2))?;
    Ok(lag
        .into_iter()
        .enumerate()
        .map(|(k, l)| ln_basis_prefactor(params, k, r).exp() * l)
        .collect())
}

/// `a_n = (λ²/2)(2n+ℓ+3/2)`, `b_n = (λ²/2) sqrt((n+1)(n+ℓ+3/2))`.
pub fn tridiag_coeffs(params: &LWaveParams) -> TridiagonalSpec {
    let half = 0.5 * params.lambda * params.lambda;
    let shape = params.shape();
    TridiagonalSpec::new(
        move |n| half * (2.0 * n as f64 + shape),
        move |n| half * ((n as f64 + 1.0) * (n as f64 + shape)).sqrt(),
    )
}

/// `P_n(E) = (-1)^n sqrt(n! Γ(ℓ+3/2)/Γ(n+ℓ+3/2)) L_n^{(ℓ+1/2)}(2E/λ²)`.
pub fn polynomial_closed(params: &LWaveParams, n: usize, energy: f64) -> Result<f64> {
    check_energy(energy)?;
    let x = 2.0 * energy / params.lambda.powi(2);
    let lag = laguerre(n, params.order(), x)?;
    let nf = n as f64;
    let scale = (0.5 * (lgamma(nf + 1.0) + lgamma(params.shape()) - lgamma(nf + params.shape()))).exp();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * scale * lag)
}

/// Orthogonality weight: the Gamma density with shape `ℓ+3/2` and rate `2/λ²`.
pub fn weight(params: &LWaveParams, energy: f64) -> Result<f64> {
    check_energy(energy)?;
    if energy == 0.0 {
        return Ok(0.0);
    }
    let rate = 2.0 / params.lambda.powi(2);
    let x = rate * energy;
    Ok((rate.ln() - lgamma(params.shape()) + params.order() * x.ln() - x).exp())
}

/// `(c_n, d_{n+1}) = (λ/√2)(sqrt(n+ℓ+3/2), sqrt(n+1))`.
pub fn ladder_closed(params: &LWaveParams, n: usize) -> (f64, f64) {
    let s = params.lambda / SQRT_2;
    let nf = n as f64;
    (s * (nf + params.shape()).sqrt(), s * (nf + 1.0).sqrt())
}

/// Closed-form ladder tabulated to `depth`.
pub fn ladder_closed_spec(params: &LWaveParams, depth: usize) -> LadderSpec {
    LadderSpec::from_fn(depth, |n| ladder_closed(params, n).0, |n| ladder_closed(params, n - 1).1)
}

/// Which Gamma factor enters the closed kernel constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelConstant {
    /// `Γ(ℓ+1/2)`, as printed in the original derivation.
    Paper,
    /// `Γ(ℓ+3/2)`, the value implied by the basis and polynomial normalizations.
    #[default]
    Corrected,
}

impl KernelConstant {
    /// Ratio of this mode's kernel to the corrected one.
    pub fn factor(self, ell: u32) -> f64 {
        match self {
            KernelConstant::Corrected => 1.0,
            KernelConstant::Paper => {
                let l = ell as f64;
                (0.5 * (lgamma(l + 0.5) - lgamma(l + 1.5))).exp()
            }
        }
    }
}

/// `K(r,E) = ½ λ^{ℓ+1} sqrt(r) sqrt(2λΓ) e^{E/λ²} (2E)^{-(ℓ+1/2)/2} J_{ℓ+1/2}(r sqrt(2E))`.
pub fn kernel_closed(params: &LWaveParams, r: f64, energy: f64, mode: KernelConstant) -> Result<f64> {
    check_r(r)?;
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(invalid("energy", energy, "kernel requires positive energy"));
    }
    let lam = params.lambda;
    let ell = params.ell as f64;
    let ln_gamma_const = match mode {
        KernelConstant::Paper => lgamma(ell + 0.5),
        KernelConstant::Corrected => lgamma(ell + 1.5),
    };
    let ln_pref = 0.5f64.ln() + (ell + 1.0) * lam.ln() + 0.5 * r.ln() + 0.5 * ((2.0 * lam).ln() + ln_gamma_const)
        + energy / (lam * lam)
        - 0.5 * params.order() * (2.0 * energy).ln();
    let bessel = bessel_j_half_unchecked(params.ell, r * (2.0 * energy).sqrt());
    Ok(ln_pref.exp() * bessel)
}

/// The conditionally convergent series `Σ φ_j(r) P_j(E)` summed in the Abel sense.
pub fn kernel_series(params: &LWaveParams, r: f64, energy: f64, opts: &AbelOptions) -> Result<AbelSum> {
    check_r(r)?;
    check_energy(energy)?;
    let needed = ((18.0 * std::f64::consts::LN_10) / (1.0 - opts.h)).ceil() as usize + 2;
    let len = needed.min(opts.trunc);
    let phis = basis_sequence(params, len, r)?;
    let spec = tridiag_coeffs(params);
    let polys = crate::tridiag::eval_polynomials(&spec, energy, len)?.values;
    kernel_abel(
        |j| phis.get(j).copied().unwrap_or(0.0),
        |j| polys.get(j).copied().unwrap_or(0.0),
        opts,
    )
}

/// The ℓ-wave model as a [`SpectralModel`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LWaveModel {
    pub params: LWaveParams,
    pub mode: KernelConstant,
}

impl LWaveModel {
    pub fn new(params: LWaveParams) -> Self {
        Self {
            params,
            mode: KernelConstant::default(),
        }
    }
}

impl SpectralModel for LWaveModel {
    fn tridiagonal(&self) -> TridiagonalSpec {
        tridiag_coeffs(&self.params)
    }

    fn weight(&self, energy: f64) -> f64 {
        weight(&self.params, energy).unwrap_or(f64::NAN)
    }

    fn kernel(&self, r: f64, energy: f64) -> Result<f64> {
        kernel_closed(&self.params, r, energy, self.mode)
    }

    fn envelope(&self) -> Envelope {
        Envelope {
            alpha: self.params.order(),
            rate: 1.0 / self.params.lambda.powi(2),
        }
    }

    /// `K ω / (E^{ℓ+1/2} e^{-E/λ²})`, which is smooth and bounded in `E`.
    fn reduced_kernel(&self, r: f64, energy: f64) -> Result<f64> {
        check_r(r)?;
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(invalid("energy", energy, "kernel requires positive energy"));
        }
        let p = &self.params;
        let lam2 = p.lambda * p.lambda;
        let mu = p.order();
        let ln_pref = 0.5 * (r.ln() + (2.0 / lam2).ln() - lgamma(p.shape()))
            + 0.5 * mu * (2.0 / lam2).ln()
            - 0.5 * mu * energy.ln();
        let bessel = bessel_j_half_unchecked(p.ell, r * (2.0 * energy).sqrt());
        Ok(self.mode.factor(p.ell) * ln_pref.exp() * bessel)
    }
}

/// `1/β² = 1/λ² + iγ`.
pub fn inverse_beta_sq(params: &LWaveParams, gamma: f64) -> Complex64 {
    Complex64::new(1.0 / params.lambda.powi(2), gamma)
}

/// Principal-branch `β` with `1/β² = 1/λ² + iγ`.
pub fn complex_beta(params: &LWaveParams, gamma: f64) -> Complex64 {
    inverse_beta_sq(params, gamma).powf(-0.5)
}

/// Evolved coherent state in closed form,
/// `√2 Γ(ℓ+3/2)^{-1/2} λ^{-(ℓ+3/2)} r^{ℓ+1} a^{-(ℓ+3/2)} e^{-r²/(2a)}`, `a = 1/λ² + iγ`.
pub fn cs_closed(params: &LWaveParams, gamma: f64, r: f64) -> Result<Complex64> {
    check_r(r)?;
    if !gamma.is_finite() {
        return Err(invalid("gamma", gamma, "evolution parameter must be finite"));
    }
    let a = inverse_beta_sq(params, gamma);
    let g = params.shape();
    let ln_real = 0.5 * (2f64.ln() - lgamma(g)) - g * params.lambda.ln() + (params.ell as f64 + 1.0) * r.ln();
    let pow = a.powf(-g);
    let gauss = (-(r * r) / (2.0 * a)).exp();
    Ok(pow * gauss * ln_real.exp())
}

/// Ground basis function continued to a complex scale `β` with `Re β² > 0`.
pub fn phi0_complex(ell: u32, beta: Complex64, r: f64) -> Result<Complex64> {
    check_r(r)?;
    let g = ell as f64 + 1.5;
    let norm = (2.0 * beta / lgamma(g).exp()).sqrt();
    Ok(norm * (beta * r).powi(ell as i32 + 1) * (-(beta * beta) * r * r / 2.0).exp())
}

/// `(β/λ)^{ℓ+3/2} φ_0^{(ℓ,β)}(r)`, the closed state written as a rescaled ground state.
pub fn cs_via_beta(params: &LWaveParams, gamma: f64, r: f64) -> Result<Complex64> {
    let beta = complex_beta(params, gamma);
    let scale = (beta / params.lambda).powf(params.shape());
    Ok(scale * phi0_complex(params.ell, beta, r)?)
}

/// Energy eigenstate normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenNormalization {
    /// Riccati–Bessel form `sqrt(kr) J_{ℓ+1/2}(kr)`.
    Paper,
    /// `sqrt(r) J_{ℓ+1/2}(kr)`, normalized to `δ(E - E')`.
    Delta,
}

/// Regular energy eigenfunction with `k = sqrt(2E)`.
pub fn eigenstate(ell: u32, energy: f64, r: f64, norm: EigenNormalization) -> Result<f64> {
    check_r(r)?;
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(invalid("energy", energy, "eigenstate requires positive energy"));
    }
    let k = (2.0 * energy).sqrt();
    let j = bessel_j_half_unchecked(ell, k * r);
    Ok(match norm {
        EigenNormalization::Paper => (k * r).sqrt() * j,
        EigenNormalization::Delta => r.sqrt() * j,
    })
}

/// Radial Gaussian scale `λ²/(1+λ⁴γ²)` of the evolved density.
pub fn density_kappa(params: &LWaveParams, gamma: f64) -> f64 {
    let lam2 = params.lambda.powi(2);
    lam2 / (1.0 + lam2 * lam2 * gamma * gamma)
}

/// Position density `|⟨r|λ,γ⟩|²`.
pub fn density_rho(params: &LWaveParams, gamma: f64, r: f64) -> Result<f64> {
    check_r(r)?;
    let lam = params.lambda;
    let g = params.shape();
    let spread = 1.0 + lam.powi(4) * gamma * gamma;
    let ln_val = 2f64.ln() + 2.0 * g * lam.ln() - lgamma(g) - g * spread.ln() + 2.0 * (params.ell as f64 + 1.0) * r.ln()
        - density_kappa(params, gamma) * r * r;
    Ok(ln_val.exp())
}

fn gamma_ratio(ell: u32) -> f64 {
    let l = ell as f64;
    (lgamma(l + 2.0) - lgamma(l + 1.5)).exp()
}

/// `r̄(γ) = Γ(ℓ+2)/Γ(ℓ+3/2) sqrt(1/λ² + λ²γ²)`.
pub fn mean_position(params: &LWaveParams, gamma: f64) -> f64 {
    let lam2 = params.lambda.powi(2);
    gamma_ratio(params.ell) * (1.0 / lam2 + lam2 * gamma * gamma).sqrt()
}

/// `dr̄/dγ`.
pub fn velocity(params: &LWaveParams, gamma: f64) -> f64 {
    let lam2 = params.lambda.powi(2);
    gamma_ratio(params.ell) * lam2 * gamma / (1.0 / lam2 + lam2 * gamma * gamma).sqrt()
}

/// `lim_{γ→∞} dr̄/dγ = λ Γ(ℓ+2)/Γ(ℓ+3/2)`.
pub fn velocity_asymptote(params: &LWaveParams) -> f64 {
    params.lambda * gamma_ratio(params.ell)
}

/// Basis scale whose ground ladder eigenvalue is `z`: `λ = 2z/sqrt(2ℓ+3)`.
pub fn lambda_for_label(ell: u32, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(invalid("z", z, "label must be positive"));
    }
    Ok(2.0 * z / (2.0 * ell as f64 + 3.0).sqrt())
}

/// `∫₀^∞ ρ dr` by an `n`-point rule.
pub fn density_integral(params: &LWaveParams, gamma: f64, n: usize) -> Result<f64> {
    integrate_radial(
        |r| density_rho(params, gamma, r).unwrap_or(0.0),
        params.order(),
        density_kappa(params, gamma),
        n,
    )
}

/// `∫₀^∞ r ρ dr` by an `n`-point rule.
pub fn mean_position_quadrature(params: &LWaveParams, gamma: f64, n: usize) -> Result<f64> {
    integrate_radial(
        |r| r * density_rho(params, gamma, r).unwrap_or(0.0),
        params.ell as f64 + 1.0,
        density_kappa(params, gamma),
        n,
    )
}

/// Right end of the plotting grid: five mean positions at the widest `γ`.
pub fn default_r_max(params: &LWaveParams, gammas: &[f64]) -> f64 {
    let widest = gammas.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    5.0 * mean_position(params, widest)
}
