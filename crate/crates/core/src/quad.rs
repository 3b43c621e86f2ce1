//! Generalized Gauss–Laguerre quadrature on the half line.
//!
//! Nodes are the eigenvalues of the symmetric Jacobi matrix of the Laguerre
//! family (Golub–Welsch), polished by Newton iteration on the orthonormal
//! polynomial. Weights come from the Christoffel function
//! `w_i = Γ(α+1) / Σ_k p_k(x_i)²`, which keeps full relative accuracy even
//! for the exponentially small weights of the outer nodes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::specfun::lgamma;

/// Largest supported rule.
pub const MAX_RULE_SIZE: usize = 512;

const NODE_TOL: f64 = 1e-14;

/// An n-point rule for the weight `x^α e^{-x}` on `[0, ∞)`.
///
/// Outer weights can fall below the smallest positive `f64`; they are stored
/// as zero in `weights` and kept exactly in `ln_weights`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadRule {
    order_alpha: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    ln_weights: Vec<f64>,
}

impl QuadRule {
    pub fn order_alpha(&self) -> f64 {
        self.order_alpha
    }

    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ln_weights(&self) -> &[f64] {
        &self.ln_weights
    }

    /// `Σ w_i f(x_i)`, i.e. `∫ f(x) x^α e^{-x} dx`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(x, w)| w * f(*x))
            .sum()
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(x, w)| f(*x) * *w)
            .sum()
    }

    /// Weights for integrating a bare function, `∫ g(x) dx ≈ Σ W_i g(x_i)`
    /// with `W_i = w_i x_i^{-α} e^{x_i}`; exact when `g` is a polynomial
    /// times `x^α e^{-x}`.
    pub fn bare_weights(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes
            .iter()
            .zip(&self.ln_weights)
            .map(move |(x, lw)| (*x, (lw - self.order_alpha * x.ln() + x).exp()))
    }
}

/// Builds the n-point generalized Gauss–Laguerre rule.
pub fn gauss_laguerre_rule(alpha: f64, n: usize) -> Result<QuadRule> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(invalid("alpha", alpha, "Gauss-Laguerre order must exceed -1"));
    }
    if n < 1 || n > MAX_RULE_SIZE {
        return Err(invalid(
            "n",
            n as f64,
            "rule size must lie in 1..=512",
        ));
    }

    let mut diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let mut off: Vec<f64> = (0..n)
        .map(|k| {
            let k = (k + 1) as f64;
            (k * (k + alpha)).sqrt()
        })
        .collect();
    off[n - 1] = 0.0;
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(|a, b| a.total_cmp(b));

    let ln_mass = lgamma(alpha + 1.0);
    let mut nodes = Vec::with_capacity(n);
    let mut ln_weights = Vec::with_capacity(n);
    for guess in diag {
        let x = polish_node(alpha, n, guess)?;
        let (ln_sum, _) = christoffel(alpha, n, x);
        nodes.push(x);
        ln_weights.push(ln_mass - ln_sum);
    }
    for pair in nodes.windows(2) {
        if !(pair[1] > pair[0]) || !(pair[0] > 0.0) {
            return Err(Error::NoConvergence {
                what: "Gauss-Laguerre nodes",
                iterations: 0,
                last_change: pair[1] - pair[0],
            });
        }
    }
    let weights = ln_weights.iter().map(|lw| lw.exp()).collect();
    Ok(QuadRule {
        order_alpha: alpha,
        nodes,
        weights,
        ln_weights,
    })
}

/// Shared cached rule; rules are immutable so they are handed out behind `Arc`.
pub fn cached_rule(alpha: f64, n: usize) -> Result<Arc<QuadRule>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<QuadRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (alpha.to_bits(), n);
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_laguerre_rule(alpha, n)?);
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(key, Arc::clone(&rule));
    Ok(rule)
}

/// Orthonormal Laguerre recurrence at `x`.
///
/// Returns `(ln Σ_{k<n} p_k², p_n / p_n')`. Values are rescaled on the fly,
/// so nothing overflows for large `n` or `x`.
fn christoffel(alpha: f64, n: usize, x: f64) -> (f64, f64) {
    const BIG: f64 = 1e150;
    let b = |k: usize| -> f64 {
        let k = k as f64;
        (k * (k + alpha)).sqrt()
    };
    let mut p_prev = 0.0;
    let mut p = 1.0;
    let mut dp_prev = 0.0;
    let mut dp = 0.0;
    let mut sum = 0.0;
    let mut ln_scale = 0.0;
    for k in 0..n {
        sum += p * p;
        let a_k = 2.0 * k as f64 + alpha + 1.0;
        let b_k = b(k);
        let b_next = b(k + 1);
        let p_next = ((x - a_k) * p - b_k * p_prev) / b_next;
        let dp_next = ((x - a_k) * dp + p - b_k * dp_prev) / b_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        if p.abs() > BIG || dp.abs() > BIG {
            p /= BIG;
            p_prev /= BIG;
            dp /= BIG;
            dp_prev /= BIG;
            sum /= BIG * BIG;
            ln_scale += BIG.ln();
        }
    }
    (sum.ln() + 2.0 * ln_scale, p / dp)
}

fn polish_node(alpha: f64, n: usize, guess: f64) -> Result<f64> {
    let mut x = guess;
    let mut prev_step = f64::INFINITY;
    for _ in 0..20 {
        let (_, step) = christoffel(alpha, n, x);
        x -= step;
        if step.abs() <= NODE_TOL * x.abs() {
            return Ok(x);
        }
        // stalled at the rounding floor of the recurrence
        if step.abs() >= 0.5 * prev_step.abs() && step.abs() <= 1e-12 * x.abs().max(1.0) {
            return Ok(x);
        }
        prev_step = step;
    }
    if prev_step.abs() <= 1e-12 * x.abs().max(1.0) {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            what: "Newton refinement of Gauss-Laguerre node",
            iterations: 20,
            last_change: prev_step,
        })
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts. `off[i]` couples rows `i` and `i+1`; `off[n-1]` is
/// ignored. On return `diag` holds the (unsorted) eigenvalues.
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n == 1 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    what: "tridiagonal QL eigenvalues",
                    iterations: iter,
                    last_change: off[l],
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// Controls for [`integrate_halfline`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadOptions {
    /// Starting rule size; doubled until two successive rules agree.
    pub rule_size: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_rule_size: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rule_size: 32,
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            max_rule_size: MAX_RULE_SIZE,
        }
    }
}

impl QuadOptions {
    /// Raises the starting size for an integrand oscillating like
    /// `e^{-iωu}` in the scaled variable: `max(32, 8⌈ω⌉)`.
    pub fn for_oscillation(mut self, omega: f64) -> Self {
        let want = 32usize.max(8 * omega.abs().ceil() as usize);
        self.rule_size = self.rule_size.max(want).min(self.max_rule_size / 2);
        self
    }
}

/// A converged half-line integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    /// Change between the last two rule sizes.
    pub error_estimate: f64,
    pub rule_size: usize,
}

/// `∫₀^∞ f(E) E^α e^{-scale·E} dE` for complex `scale` with positive real part.
///
/// The real part of the scale is absorbed by the substitution
/// `u = Re(scale)·E`; the oscillating factor `e^{-i Im(scale) E}` is carried
/// with `f`. The rule size doubles until successive results agree to
/// `max(rel_tol·|I|, abs_tol)`.
pub fn integrate_halfline<F>(f: F, alpha: f64, scale: Complex64, opts: &QuadOptions) -> Result<Integral>
where
    F: Fn(f64) -> Complex64,
{
    if !(scale.re > 0.0) || !scale.re.is_finite() || !scale.im.is_finite() {
        return Err(invalid("scale", scale.re, "real part of the scale must be positive"));
    }
    if opts.rule_size < 1 {
        return Err(invalid("rule_size", 0.0, "rule size must be positive"));
    }
    let a = scale.re;
    let b = scale.im;
    let prefactor = (-(alpha + 1.0) * a.ln()).exp();
    let eval = |n: usize| -> Result<Complex64> {
        let rule = cached_rule(alpha, n)?;
        let sum = rule.integrate_complex(|u| {
            let e = u / a;
            f(e) * Complex64::from_polar(1.0, -b * e)
        });
        Ok(sum * prefactor)
    };

    let max = opts.max_rule_size.min(MAX_RULE_SIZE);
    let mut n = opts.rule_size.min(max / 2).max(1);
    let mut coarse = eval(n)?;
    let mut last_change = f64::INFINITY;
    let mut steps = 0;
    while 2 * n <= max {
        let fine = eval(2 * n)?;
        last_change = (fine - coarse).norm();
        steps += 1;
        if last_change <= (opts.rel_tol * fine.norm()).max(opts.abs_tol) {
            return Ok(Integral {
                value: fine,
                error_estimate: last_change,
                rule_size: 2 * n,
            });
        }
        coarse = fine;
        n *= 2;
    }
    Err(Error::NoConvergence {
        what: "half-line Gauss-Laguerre integral",
        iterations: steps,
        last_change,
    })
}

/// Real-valued convenience wrapper around [`integrate_halfline`].
pub fn integrate_halfline_real<F>(f: F, alpha: f64, rate: f64, opts: &QuadOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_halfline(|e| Complex64::new(f(e), 0.0), alpha, Complex64::new(rate, 0.0), opts)
        .map(|i| i.value.re)
}

/// `∫₀^∞ g(r) dr` for integrands with envelope `r^{2α+1} e^{-κ r²}`.
///
/// Uses `u = κ r²` and a fixed `n`-point rule of order `α`; `g` is the full
/// integrand, so underflow at the outer nodes is harmless.
pub fn integrate_radial<F>(g: F, alpha: f64, kappa: f64, n: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(invalid("kappa", kappa, "radial Gaussian scale must be positive"));
    }
    let rule = cached_rule(alpha, n)?;
    let sum: f64 = rule
        .bare_weights()
        .map(|(u, w)| {
            if w == 0.0 || !w.is_finite() {
                return 0.0;
            }
            let r = (u / kappa).sqrt();
            // dr = du / (2 sqrt(κ u))
            w * g(r) / (2.0 * (kappa * u).sqrt())
        })
        .sum();
    Ok(sum)
}
