//! Special-function kernel: log-Gamma, generalized Laguerre polynomials and
//! Bessel functions of the first kind of half-integer order.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Largest |x| accepted by the Laguerre evaluators.
///
/// Upward recurrence in the degree stays accurate through the oscillatory
/// region `0 <= x <= 4n` and beyond it, where `L_n` is monotone and the
/// recurrence follows the dominant solution. For arguments far past the last
/// zero the values overflow long before the recurrence degrades, so the
/// domain is simply capped.
pub const LAGUERRE_MAX_X: f64 = 1.0e6;

// Lanczos approximation with g = 671/128 and 14 correction terms.
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_092;
const LANCZOS_COF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid("x", x, "ln_gamma requires a finite positive argument"));
    }
    Ok(lgamma(x))
}

/// `Γ(x)` for `x > 0`, computed as `exp(ln_gamma(x))`.
pub fn gamma(x: f64) -> Result<f64> {
    ln_gamma(x).map(f64::exp)
}

/// Unchecked log-Gamma used on validated hot paths.
pub(crate) fn lgamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let tmp = x + LANCZOS_G;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut y = x;
    let mut ser = LANCZOS_C0;
    for c in LANCZOS_COF {
        y += 1.0;
        ser += c / y;
    }
    tmp + (SQRT_2PI * ser / x).ln()
}

fn check_laguerre_args(alpha: f64, x: f64) -> Result<()> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(invalid("alpha", alpha, "Laguerre order must exceed -1"));
    }
    if !x.is_finite() {
        return Err(invalid("x", x, "Laguerre argument must be finite"));
    }
    if x.abs() > LAGUERRE_MAX_X {
        return Err(invalid("x", x, "Laguerre argument outside supported range"));
    }
    Ok(())
}

/// Generalized Laguerre polynomial `L_n^(alpha)(x)` by upward recurrence in `n`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> Result<f64> {
    check_laguerre_args(alpha, x)?;
    Ok(laguerre_unchecked(n, alpha, x))
}

/// `L_0^(alpha)(x), ..., L_n^(alpha)(x)`.
pub fn laguerre_sequence(n: usize, alpha: f64, x: f64) -> Result<Vec<f64>> {
    check_laguerre_args(alpha, x)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return Ok(out);
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    out.push(cur);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    Ok(out)
}

pub(crate) fn laguerre_unchecked(n: usize, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Bessel function of the first kind `J_{ell+1/2}(x)` for `x > 0`.
///
/// Uses `J_{ell+1/2}(x) = sqrt(2x/pi) j_ell(x)` with the spherical Bessel
/// function `j_ell` from forward recurrence when `ell + 1/2 < x` and from
/// Miller's normalized downward recurrence otherwise.
pub fn bessel_j_half(ell: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid("x", x, "half-integer Bessel requires finite x > 0"));
    }
    Ok(bessel_j_half_unchecked(ell, x))
}

pub(crate) fn bessel_j_half_unchecked(ell: u32, x: f64) -> f64 {
    (2.0 * x / PI).sqrt() * spherical_j(ell, x)
}

/// `j_0(x)` with a series near the origin.
fn sph_j0(x: f64) -> f64 {
    if x < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// `j_1(x)`; the closed form cancels badly for small x.
fn sph_j1(x: f64) -> f64 {
    if x < 1e-2 {
        let x2 = x * x;
        x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0)))
    } else {
        let (s, c) = x.sin_cos();
        (s / x - c) / x
    }
}

fn spherical_j(ell: u32, x: f64) -> f64 {
    let l = ell as usize;
    if l == 0 {
        return sph_j0(x);
    }
    if l == 1 {
        return sph_j1(x);
    }
    if (l as f64) + 0.5 < x {
        // forward recurrence is stable while the order stays below the argument
        let mut prev = sph_j0(x);
        let mut cur = sph_j1(x);
        for k in 1..l {
            let next = (2.0 * k as f64 + 1.0) / x * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    miller_spherical_j(l, x)
}

fn miller_spherical_j(l: usize, x: f64) -> f64 {
    const BIG: f64 = 1.0e250;
    let top = (l as f64).max(x);
    let start = top as usize + 30 + (10.0 * top).sqrt() as usize;

    let mut next = 0.0; // f_{k+1}
    let mut cur = 1.0e-300; // f_k
    let mut at_l = 0.0;
    let f0;
    let mut f1 = 0.0;
    let mut k = start;
    loop {
        if k == l {
            at_l = cur;
        }
        if k == 1 {
            f1 = cur;
        }
        if k == 0 {
            f0 = cur;
            break;
        }
        let prev = (2.0 * k as f64 + 1.0) / x * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.abs() > BIG {
            cur /= BIG;
            next /= BIG;
            at_l /= BIG;
            f1 /= BIG;
        }
    }
    let j0 = sph_j0(x);
    let j1 = sph_j1(x);
    if j0.abs() >= j1.abs() {
        at_l * (j0 / f0)
    } else {
        at_l * (j1 / f1)
    }
}
