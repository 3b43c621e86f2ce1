//! Tridiagonal construction of Glauber-type coherent states.
//!
//! A Hamiltonian with a tridiagonal matrix in an orthonormal basis
//! `{φ_n}` generates orthogonal polynomials `P_n(E)` through its three-term
//! recurrence. From their values at `E = 0` the factorization `H = A†A`
//! follows, and the eigenstates of the lowering operator `A` have expansion
//! coefficients `Q_n(z)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_halfline, QuadOptions};

type Coefficient = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Diagonal `a_n` and off-diagonal `b_n` of `⟨φ_n|H|φ_m⟩`, generated on demand.
#[derive(Clone)]
pub struct TridiagonalSpec {
    a: Coefficient,
    b: Coefficient,
}

impl fmt::Debug for TridiagonalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TridiagonalSpec")
            .field("a0", &(self.a)(0))
            .field("b0", &(self.b)(0))
            .finish()
    }
}

impl TridiagonalSpec {
    pub fn new<A, B>(a: A, b: B) -> Self
    where
        A: Fn(usize) -> f64 + Send + Sync + 'static,
        B: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        Self {
            a: Arc::new(a),
            b: Arc::new(b),
        }
    }

    pub fn a(&self, n: usize) -> f64 {
        (self.a)(n)
    }

    pub fn b(&self, n: usize) -> f64 {
        (self.b)(n)
    }

    fn checked_b(&self, n: usize) -> Result<f64> {
        let b = self.b(n);
        if b > 0.0 && b.is_finite() {
            Ok(b)
        } else {
            Err(invalid("b_n", b, "off-diagonal coefficients must be positive"))
        }
    }
}

/// `P_0(E), ..., P_N(E)` at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySequence {
    pub energy: f64,
    pub values: Vec<f64>,
}

impl PolySequence {
    /// Largest residual of `E P_n = b_{n-1} P_{n-1} + a_n P_n + b_n P_{n+1}`.
    pub fn recurrence_residual(&self, spec: &TridiagonalSpec) -> f64 {
        let p = &self.values;
        (1..p.len().saturating_sub(1))
            .map(|n| {
                let rhs = spec.b(n - 1) * p[n - 1] + spec.a(n) * p[n] + spec.b(n) * p[n + 1];
                (self.energy * p[n] - rhs).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Evaluates the orthogonal polynomials of `spec` at `energy` up to degree `n_max`.
pub fn eval_polynomials(spec: &TridiagonalSpec, energy: f64, n_max: usize) -> Result<PolySequence> {
    if !energy.is_finite() {
        return Err(invalid("energy", energy, "energy must be finite"));
    }
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(1.0);
    if n_max >= 1 {
        values.push((energy - spec.a(0)) / spec.checked_b(0)?);
    }
    for n in 1..n_max {
        let next = ((energy - spec.a(n)) * values[n] - spec.b(n - 1) * values[n - 1]) / spec.checked_b(n)?;
        values.push(next);
    }
    Ok(PolySequence { energy, values })
}

/// Ladder coefficients of `A|φ_n⟩ = c_n|φ_n⟩ + d_n|φ_{n-1}⟩`.
///
/// Stored up to a finite depth: `c_0..=c_depth` and `d_0..=d_{depth+1}`,
/// with `d_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderSpec {
    c: Vec<f64>,
    d: Vec<f64>,
}

impl LadderSpec {
    /// Tabulates closed-form coefficients; `d(n)` is only queried for `n >= 1`.
    pub fn from_fn(depth: usize, c: impl Fn(usize) -> f64, d: impl Fn(usize) -> f64) -> Self {
        let c = (0..=depth).map(c).collect();
        let d = std::iter::once(0.0).chain((1..=depth + 1).map(d)).collect();
        Self { c, d }
    }

    pub fn depth(&self) -> usize {
        self.c.len() - 1
    }

    pub fn c(&self, n: usize) -> Option<f64> {
        self.c.get(n).copied()
    }

    pub fn d(&self, n: usize) -> Option<f64> {
        self.d.get(n).copied()
    }

    pub fn c_values(&self) -> &[f64] {
        &self.c
    }

    pub fn d_values(&self) -> &[f64] {
        &self.d
    }

    fn c_checked(&self, n: usize) -> Result<f64> {
        self.c(n).ok_or(Error::LadderTooShort {
            requested: n,
            available: self.depth(),
        })
    }

    fn d_checked(&self, n: usize) -> Result<f64> {
        self.d(n).ok_or(Error::LadderTooShort {
            requested: n,
            available: self.depth() + 1,
        })
    }
}

/// Factorizes `H = A†A` from the polynomial values at zero energy:
/// `d_{n+1}² = -b_n P_n(0)/P_{n+1}(0)` and `c_n² = -b_n P_{n+1}(0)/P_n(0)`.
///
/// Positive roots are taken for both.
pub fn ladder_from_tridiagonal(spec: &TridiagonalSpec, depth: usize) -> Result<LadderSpec> {
    let p0 = eval_polynomials(spec, 0.0, depth + 1)?.values;
    let mut c = Vec::with_capacity(depth + 1);
    let mut d = Vec::with_capacity(depth + 2);
    d.push(0.0);
    for n in 0..=depth {
        let b = spec.b(n);
        let d_sq = -b * p0[n] / p0[n + 1];
        let c_sq = -b * p0[n + 1] / p0[n];
        if !(d_sq > 0.0) || !(c_sq > 0.0) || !d_sq.is_finite() || !c_sq.is_finite() {
            return Err(Error::NotFactorizable { index: n });
        }
        c.push(c_sq.sqrt());
        d.push(d_sq.sqrt());
    }
    Ok(LadderSpec { c, d })
}

/// `Q_n(z) = Π_{j<n} (z - c_j)/d_{j+1}` for `n = 0..=n_max`.
///
/// When `z` equals some `c_k` exactly, every `Q_n` with `n > k` is zero.
pub fn q_coefficients(ladder: &LadderSpec, z: f64, n_max: usize) -> Result<Vec<f64>> {
    let mut q = Vec::with_capacity(n_max + 1);
    q.push(1.0);
    for j in 0..n_max {
        let d = ladder.d_checked(j + 1)?;
        if d == 0.0 {
            return Err(invalid("d_{j+1}", d, "ladder shift coefficient vanishes"));
        }
        let next = q[j] * (z - ladder.c_checked(j)?) / d;
        q.push(next);
    }
    Ok(q)
}

/// Controls for [`normalization_nz`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    /// Relative size of a tail increment considered negligible.
    pub tol: f64,
    /// Number of consecutive negligible increments required.
    pub patience: usize,
    /// Term cap; hitting it is reported as divergence.
    pub max_terms: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            tol: 1e-16,
            patience: 10,
            max_terms: 100_000,
        }
    }
}

/// `N(z) = Σ_n Q_n(z)²`.
///
/// Exact finite sum when the series terminates (`z = c_k`), otherwise
/// partial sums until `patience` consecutive increments fall below
/// `tol` times the running sum. The ladder must be at least as deep as the
/// number of terms needed, capped at `max_terms`.
pub fn normalization_nz(ladder: &LadderSpec, z: f64, opts: &NormOptions) -> Result<f64> {
    if !z.is_finite() {
        return Err(invalid("z", z, "label must be finite"));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("tol", opts.tol, "tolerance must be positive"));
    }
    let mut q = 1.0f64;
    let mut sum = 1.0f64;
    let mut quiet = 0;
    let cap = opts.max_terms.min(ladder.depth() + 1);
    for n in 1..=cap {
        let d = ladder.d_checked(n)?;
        if d == 0.0 {
            return Err(invalid("d_n", d, "ladder shift coefficient vanishes"));
        }
        q *= (z - ladder.c_checked(n - 1)?) / d;
        if q == 0.0 {
            return Ok(sum);
        }
        let inc = q * q;
        sum += inc;
        if !sum.is_finite() {
            return Err(Error::Divergent {
                terms: n,
                partial_sum: sum,
            });
        }
        if inc < opts.tol * sum {
            quiet += 1;
            if quiet >= opts.patience {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Divergent {
        terms: cap,
        partial_sum: sum,
    })
}

/// Controls for the Abel-regularized kernel series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelOptions {
    /// Maximum number of series terms.
    pub trunc: usize,
    /// Regularization parameter closest to 1; the ladder uses
    /// `h_k = 1 - k (1 - h)` for `k = 1..=nodes`.
    pub h: f64,
    pub nodes: usize,
    /// Accepted disagreement between the two highest extrapolation orders.
    pub tol: f64,
}

impl Default for AbelOptions {
    fn default() -> Self {
        Self {
            trunc: 20_000,
            h: 0.97,
            nodes: 10,
            tol: 1e-8,
        }
    }
}

/// An extrapolated Abel sum and its estimated error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelSum {
    pub value: f64,
    pub error_estimate: f64,
}

/// `lim_{h→1⁻} Σ_{j<trunc} h^j φ_j(r) P_j(E)`.
///
/// `phi(j)` and `poly(j)` supply `φ_j(r)` and `P_j(E)` at fixed `r`, `E`.
/// The series is only conditionally convergent, so it is summed for a
/// ladder of `h < 1` and the limit is taken by polynomial extrapolation in
/// `1 - h`. Intended as an independent oracle for closed-form kernels.
pub fn kernel_abel<P, Q>(phi: P, poly: Q, opts: &AbelOptions) -> Result<AbelSum>
where
    P: Fn(usize) -> f64,
    Q: Fn(usize) -> f64,
{
    if opts.trunc < 1 {
        return Err(invalid("trunc", 0.0, "at least one term is required"));
    }
    if !(opts.h > 0.0 && opts.h < 1.0) {
        return Err(invalid("h", opts.h, "Abel parameter must lie in (0, 1)"));
    }
    let step = 1.0 - opts.h;
    let nodes = opts.nodes.max(2);
    if step * nodes as f64 >= 1.0 {
        return Err(invalid("h", opts.h, "ladder of Abel parameters leaves (0, 1)"));
    }

    let mut terms: Vec<f64> = Vec::new();
    let mut term = |j: usize| -> f64 {
        while terms.len() <= j {
            let k = terms.len();
            terms.push(phi(k) * poly(k));
        }
        terms[j]
    };

    let mut deltas = Vec::with_capacity(nodes);
    let mut sums = Vec::with_capacity(nodes);
    for k in 1..=nodes {
        let delta = step * k as f64;
        let h = 1.0 - delta;
        let mut sum = 0.0;
        let mut weight = 1.0;
        let mut biggest = 0.0f64;
        for j in 0..opts.trunc {
            let t = term(j);
            biggest = biggest.max(t.abs());
            sum += weight * t;
            weight *= h;
            if weight * biggest < 1e-18 * biggest.max(sum.abs()) {
                break;
            }
        }
        deltas.push(delta);
        sums.push(sum);
    }

    let full = neville_at_zero(&deltas, &sums);
    let reduced = neville_at_zero(&deltas[..nodes - 1], &sums[..nodes - 1]);
    let error_estimate = (full - reduced).abs();
    if error_estimate > opts.tol * full.abs().max(1.0) {
        return Err(Error::NoConvergence {
            what: "Abel extrapolation of kernel series",
            iterations: nodes,
            last_change: error_estimate,
        });
    }
    Ok(AbelSum {
        value: full,
        error_estimate,
    })
}

fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Energy envelope `E^alpha e^{-rate E}` carried by `K(r,E) ω(E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub alpha: f64,
    pub rate: f64,
}

/// A model with a purely continuous spectrum on `[0, ∞)` and closed forms
/// for its kernel and orthogonality weight.
pub trait SpectralModel {
    fn tridiagonal(&self) -> TridiagonalSpec;

    /// Orthogonality density `ω(E)`.
    fn weight(&self, energy: f64) -> f64;

    /// Closed form of `K(r, E) = Σ_j φ_j(r) P_j(E)`.
    fn kernel(&self, r: f64, energy: f64) -> Result<f64>;

    fn envelope(&self) -> Envelope;

    /// `K(r,E) ω(E) / (E^alpha e^{-rate E})`. Models should override this
    /// when the product overflows at large energies.
    fn reduced_kernel(&self, r: f64, energy: f64) -> Result<f64> {
        let env = self.envelope();
        let k = self.kernel(r, energy)?;
        Ok(k * self.weight(energy) / (energy.powf(env.alpha) * (-env.rate * energy).exp()))
    }
}

/// Label `(z, γ)` of the state `e^{-iγH}|φ_z⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsLabel {
    pub z: f64,
    pub gamma: f64,
}

/// `⟨r|c_k, γ⟩ = N(c_k)^{-1/2} ∫ K(r,y) S(c_k,y) ω(y) e^{-iγy} dy`
/// with `S(u,y) = Σ_{n≤k} Q_n(u) P_n(y)`, evaluated by quadrature.
pub fn cs_wavefunction_numeric<M: SpectralModel + ?Sized>(
    model: &M,
    ladder: &LadderSpec,
    k: usize,
    gamma: f64,
    r: f64,
    opts: &QuadOptions,
) -> Result<Complex64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("r", r, "radius must be positive"));
    }
    if !gamma.is_finite() {
        return Err(invalid("gamma", gamma, "evolution parameter must be finite"));
    }
    let z = ladder.c_checked(k)?;
    let q = q_coefficients(ladder, z, k)?;
    let norm: f64 = q.iter().map(|v| v * v).sum();
    let spec = model.tridiagonal();
    let env = model.envelope();

    // reject bad kernels up front so the integrand can stay infallible
    model.reduced_kernel(r, 1.0)?;
    let integrand = |energy: f64| -> Complex64 {
        let s: f64 = match eval_polynomials(&spec, energy, k) {
            Ok(p) => p.values.iter().zip(&q).map(|(p, q)| p * q).sum(),
            Err(_) => f64::NAN,
        };
        let kern = model.reduced_kernel(r, energy).unwrap_or(f64::NAN);
        Complex64::new(kern * s, 0.0)
    };
    let integral = integrate_halfline(integrand, env.alpha, Complex64::new(env.rate, gamma), opts)?;
    if !integral.value.is_finite() {
        return Err(Error::NoConvergence {
            what: "coherent-state integral (non-finite integrand)",
            iterations: 0,
            last_change: f64::NAN,
        });
    }
    Ok(integral.value / norm.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lwave_spec(ell: u32, lambda: f64) -> TridiagonalSpec {
        let nu = ell as f64 + 1.5;
        let s = lambda * lambda / 2.0;
        TridiagonalSpec::new(
            move |n| s * (2.0 * n as f64 + nu),
            move |n| s * ((n as f64 + 1.0) * (n as f64 + nu)).sqrt(),
        )
    }

    #[test]
    fn degree_zero_is_one() {
        let spec = lwave_spec(2, 0.7);
        let p = eval_polynomials(&spec, 3.3, 0).unwrap();
        assert_eq!(p.values, vec![1.0]);
    }

    #[test]
    fn first_degree_uses_initial_condition() {
        let spec = lwave_spec(0, 2f64.sqrt());
        assert_relative_eq!(spec.a(0), 1.5, max_relative = 1e-15);
        assert_relative_eq!(spec.b(0), 1.5f64.sqrt(), max_relative = 1e-15);
        let e = 0.8;
        let p = eval_polynomials(&spec, e, 1).unwrap();
        assert_relative_eq!(p.values[1], (e - 1.5) / 1.5f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn recurrence_residual_small() {
        let spec = lwave_spec(1, 1.3);
        let p = eval_polynomials(&spec, 7.1, 40).unwrap();
        let scale = p.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(p.recurrence_residual(&spec) < 1e-10 * scale);
    }

    #[test]
    fn rejects_nonfinite_energy() {
        let spec = lwave_spec(0, 1.0);
        assert!(eval_polynomials(&spec, f64::NAN, 3).is_err());
    }

    #[test]
    fn ladder_known_values() {
        let spec = lwave_spec(0, 2f64.sqrt());
        let ladder = ladder_from_tridiagonal(&spec, 3).unwrap();
        assert_eq!(ladder.d(0), Some(0.0));
        assert_relative_eq!(ladder.c(0).unwrap(), 1.5f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(ladder.c(0).unwrap().powi(2), spec.a(0), max_relative = 1e-14);
        assert_relative_eq!(ladder.d(1).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn non_factorizable_reports_index() {
        let spec = TridiagonalSpec::new(|_| -1.0, |_| 1.0);
        assert_eq!(
            ladder_from_tridiagonal(&spec, 4).unwrap_err(),
            Error::NotFactorizable { index: 0 }
        );
    }

    #[test]
    fn q_examples() {
        let spec = lwave_spec(0, 2f64.sqrt());
        let ladder = ladder_from_tridiagonal(&spec, 5).unwrap();
        let q = q_coefficients(&ladder, 0.3, 0).unwrap();
        assert_eq!(q, vec![1.0]);
        let c0 = ladder.c(0).unwrap();
        let q = q_coefficients(&ladder, c0, 4).unwrap();
        assert!(q[1..].iter().all(|v| *v == 0.0));

        let c1 = ladder.c(1).unwrap();
        let q = q_coefficients(&ladder, c1, 1).unwrap();
        assert_relative_eq!(q[1], 2.5f64.sqrt() - 1.5f64.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn q_terminates_after_index_k() {
        let ladder = ladder_from_tridiagonal(&lwave_spec(2, 0.8), 30).unwrap();
        for k in 0..10 {
            let q = q_coefficients(&ladder, ladder.c(k).unwrap(), 20).unwrap();
            assert!(q[..=k].iter().all(|v| *v != 0.0));
            assert!(q[k + 1..].iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn q_rejects_short_ladder_and_zero_shift() {
        let ladder = LadderSpec::from_fn(2, |_| 1.0, |_| 1.0);
        assert!(matches!(q_coefficients(&ladder, 0.5, 5), Err(Error::LadderTooShort { .. })));
        let flat = LadderSpec::from_fn(2, |_| 1.0, |_| 0.0);
        assert!(q_coefficients(&flat, 0.5, 2).is_err());
    }

    #[test]
    fn normalization_terminating_series() {
        let ladder = ladder_from_tridiagonal(&lwave_spec(0, 1.0), 20).unwrap();
        let opts = NormOptions::default();
        assert_eq!(normalization_nz(&ladder, ladder.c(0).unwrap(), &opts).unwrap(), 1.0);
        for k in 1..6 {
            let ck = ladder.c(k).unwrap();
            let q = q_coefficients(&ladder, ck, k).unwrap();
            let finite: f64 = q.iter().map(|v| v * v).sum();
            assert_relative_eq!(normalization_nz(&ladder, ck, &opts).unwrap(), finite, max_relative = 1e-15);
        }
    }

    #[test]
    fn normalization_infinite_series_converges() {
        // reference: 10^4-term partial sum in 30-digit arithmetic
        let ladder = ladder_from_tridiagonal(&lwave_spec(0, 1.0), 20_000).unwrap();
        let n = normalization_nz(&ladder, 0.1, &NormOptions::default()).unwrap();
        assert_relative_eq!(n, 40.606_790_579_524_185_204, max_relative = 1e-10);

        let ladder = ladder_from_tridiagonal(&lwave_spec(1, 2.0), 20_000).unwrap();
        let n = normalization_nz(&ladder, 0.5, &NormOptions::default()).unwrap();
        assert_relative_eq!(n, 30.829_007_062_283_275_591, max_relative = 1e-10);
    }

    #[test]
    fn normalization_reports_divergence() {
        let ladder = ladder_from_tridiagonal(&lwave_spec(0, 1.0), 2_000).unwrap();
        let opts = NormOptions {
            max_terms: 1_000,
            ..NormOptions::default()
        };
        assert!(matches!(
            normalization_nz(&ladder, 0.0, &opts),
            Err(Error::Divergent { .. })
        ));
        assert!(matches!(
            normalization_nz(&ladder, -0.5, &opts),
            Err(Error::Divergent { .. })
        ));
    }

    #[test]
    fn abel_single_term() {
        let opts = AbelOptions {
            trunc: 1,
            ..AbelOptions::default()
        };
        let s = kernel_abel(|_| 0.75, |_| 1.0, &opts).unwrap();
        assert_relative_eq!(s.value, 0.75, max_relative = 1e-14);
    }

    #[test]
    fn abel_sums_grandi_series() {
        // Σ (-1)^j is Abel-summable to 1/2
        let s = kernel_abel(|j| if j % 2 == 0 { 1.0 } else { -1.0 }, |_| 1.0, &AbelOptions::default())
            .unwrap();
        assert_relative_eq!(s.value, 0.5, max_relative = 1e-10);
    }

    #[test]
    fn abel_rejects_bad_parameters() {
        let bad = AbelOptions {
            h: 1.0,
            ..AbelOptions::default()
        };
        assert!(kernel_abel(|_| 1.0, |_| 1.0, &bad).is_err());
        let bad = AbelOptions {
            trunc: 0,
            ..AbelOptions::default()
        };
        assert!(kernel_abel(|_| 1.0, |_| 1.0, &bad).is_err());
    }
}
