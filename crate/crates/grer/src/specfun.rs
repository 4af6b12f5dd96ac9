//! Scalar special functions behind the closed-form normalizations.
//!
//! Everything here is pure and reentrant. The one numerically delicate piece
//! is the exponentially scaled modified spherical Bessel function: upward
//! recurrence on `i_l` loses all precision within a few steps, so the table
//! is filled by backward (Miller) recurrence normalized against the closed
//! form of the scaled order zero.

use crate::{Error, Result};

/// Maximum Legendre degree accepted by [`legendre_p`].
pub const MAX_LEGENDRE_DEGREE: u32 = 10_000;

/// Largest `n` for which `n!` is representable in `f64`.
pub const MAX_FACTORIAL: u32 = 170;

/// Largest `n` for which `n!!` is representable in `f64`.
pub const MAX_DOUBLE_FACTORIAL: i32 = 300;

/// Slack accepted on `|x| <= 1` before [`legendre_p`] rejects the argument.
const LEGENDRE_DOMAIN_SLACK: f64 = 1e-9;

/// Below this argument the scaled Bessel table switches to the ascending
/// series; above it, Miller backward recurrence.
const BESSEL_SMALL_X: f64 = 0.5;

/// Value and truncation bookkeeping of a truncated series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SeriesResult {
    /// The converged (or best-effort) sum.
    pub value: f64,
    /// Number of terms that contributed at the requested tolerance. For the
    /// finite sums this is the exact number of evaluated terms.
    pub terms_used: usize,
    /// Whether the truncation rule was satisfied within the term budget.
    pub converged: bool,
}

/// Legendre polynomial `P_l(x)` by the Bonnet three-term recurrence.
///
/// Arguments within `1e-9` of the endpoints are clamped onto `[-1, 1]`.
pub fn legendre_p(degree: u32, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0 + LEGENDRE_DOMAIN_SLACK) {
        return Err(Error::Domain(format!(
            "legendre_p requires |x| <= 1 (+{LEGENDRE_DOMAIN_SLACK:e} slack), got {x}"
        )));
    }
    if degree > MAX_LEGENDRE_DEGREE {
        return Err(Error::DegreeLimit {
            degree,
            max: MAX_LEGENDRE_DEGREE,
        });
    }
    let x = x.clamp(-1.0, 1.0);
    if degree == 0 {
        return Ok(1.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for l in 1..degree {
        let l = l as f64;
        let p_next = ((2.0 * l + 1.0) * x * p - l * p_prev) / (l + 1.0);
        p_prev = p;
        p = p_next;
    }
    Ok(p)
}

/// Exponentially scaled modified spherical Bessel function of the first
/// kind, `e^{-x} i_l(x)`.
///
/// The scaling keeps every normalization series finite for lobe exponents up
/// to at least `1e4`; the unscaled `i_l` overflows near `x = 710`.
pub fn scaled_mod_sph_bessel_i(degree: u32, x: f64) -> Result<f64> {
    let mut table = ScaledBesselTable::new(x)?;
    Ok(table.get(degree as usize))
}

/// Scaled order zero in closed form: `(1 - e^{-2x}) / (2x)`.
fn scaled_i0(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        -f64::exp_m1(-2.0 * x) / (2.0 * x)
    }
}

/// Lazily grown table of `e^{-x} i_l(x)` for `l = 0..`, shared by the series
/// evaluations so each degree costs one backward-recurrence pass at most.
pub(crate) struct ScaledBesselTable {
    x: f64,
    values: Vec<f64>,
}

impl ScaledBesselTable {
    pub(crate) fn new(x: f64) -> Result<Self> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!(
                "scaled modified spherical Bessel requires x >= 0, got {x}"
            )));
        }
        Ok(Self {
            x,
            values: Vec::new(),
        })
    }

    pub(crate) fn get(&mut self, degree: usize) -> f64 {
        if degree >= self.values.len() {
            let target = (2 * self.values.len()).max(degree + 16);
            self.fill(target);
        }
        self.values[degree]
    }

    fn fill(&mut self, max_degree: usize) {
        let x = self.x;
        if x == 0.0 {
            self.values = vec![0.0; max_degree + 1];
            self.values[0] = 1.0;
        } else if x < BESSEL_SMALL_X {
            self.values = (0..=max_degree).map(|l| scaled_small_x(l, x)).collect();
        } else {
            self.values = miller_backward(max_degree, x);
        }
    }
}

/// Ascending series `i_l(x) = sum_k x^{l+2k} / (2^k k! (2l+2k+1)!!)`, scaled.
/// Only used for small `x`, where it converges in a handful of terms.
fn scaled_small_x(degree: usize, x: f64) -> f64 {
    let mut dfact = 1.0f64; // (2l+1)!!
    for j in 1..=degree {
        dfact *= (2 * j + 1) as f64;
    }
    let mut term = x.powi(degree as i32) / dfact;
    if term == 0.0 || !term.is_finite() {
        return 0.0;
    }
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= x * x / (2.0 * k as f64 * (2 * degree + 2 * k + 1) as f64);
        let next = sum + term;
        if next == sum {
            break;
        }
        sum = next;
    }
    sum * (-x).exp()
}

/// Backward (Miller) recurrence for the scaled `i_l`, normalized against the
/// closed-form order zero. Stable at every degree because `i_l` is the
/// solution that grows as `l` decreases.
fn miller_backward(max_degree: usize, x: f64) -> Vec<f64> {
    let start = miller_start(max_degree, x);
    let mut out = vec![0.0f64; max_degree + 1];
    let mut above = 0.0f64; // f_{l+1}
    let mut current = 1e-280f64; // f_l, arbitrary tiny seed
    for l in (1..=start).rev() {
        let below = above + (2 * l + 1) as f64 / x * current;
        if l - 1 <= max_degree {
            out[l - 1] = below;
        }
        above = current;
        current = below;
        if current.abs() > 1e280 {
            let scale = 1e-280;
            current *= scale;
            above *= scale;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
    }
    let norm = scaled_i0(x) / out[0];
    for v in out.iter_mut() {
        *v *= norm;
    }
    out
}

/// Starting order for the backward recurrence: far enough above both the
/// target degree and the turning point `l ~ x` that the contamination of the
/// minimal solution has decayed below double precision.
fn miller_start(max_degree: usize, x: f64) -> usize {
    let mut l = max_degree.max(x.ceil() as usize) + 1;
    let mut decades = 0.0f64;
    while decades < 45.0 {
        decades += ((2 * l + 3) as f64 / x).ln().max(0.05);
        l += 1;
    }
    l
}

/// Half-range Legendre moment `b_l = int_0^1 sqrt(u) P_l(u) du` in signed
/// closed form.
///
/// Even degrees `l = 2m`: `b_l = (-1)^{m+1} * 2 / ((4m-1)(4m+3))`.
/// Odd degrees `l = 2m+1`: `b_l = (-1)^m * 2 / ((4m+1)(4m+5))`.
/// In both cases `|b_l| = 2 / ((2l-1)(2l+3))` up to the sign of the
/// denominator at `l = 0`.
pub fn b_coefficient(degree: u32) -> f64 {
    let l = i64::from(degree);
    if l % 2 == 0 {
        let m = l / 2;
        let sign = if (m + 1) % 2 == 0 { 1.0 } else { -1.0 };
        sign * 2.0 / (((4 * m - 1) * (4 * m + 3)) as f64)
    } else {
        let m = (l - 1) / 2;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sign * 2.0 / (((4 * m + 1) * (4 * m + 5)) as f64)
    }
}

/// `b_l` via the two-step recurrence `b_{l+2} = -(2l-1)/(2l+7) b_l` from
/// `b_0 = 2/3`, `b_1 = 2/5`. Kept as an independent cross-check of the
/// closed forms.
pub fn b_coefficient_recurrence(degree: u32) -> f64 {
    let mut value = if degree % 2 == 0 { 2.0 / 3.0 } else { 2.0 / 5.0 };
    let mut l = i64::from(degree % 2);
    while l + 2 <= i64::from(degree) {
        value *= -((2 * l - 1) as f64) / ((2 * l + 7) as f64);
        l += 2;
    }
    value
}

/// `n!` as `f64`; errors above [`MAX_FACTORIAL`].
pub fn factorial(n: u32) -> Result<f64> {
    if n > MAX_FACTORIAL {
        return Err(Error::Overflow(format!(
            "{n}! is not representable in f64 (limit {MAX_FACTORIAL})"
        )));
    }
    let mut r = 1.0f64;
    for i in 2..=u64::from(n) {
        r *= i as f64;
    }
    Ok(r)
}

/// Double factorial `n!!` with the empty-product convention
/// `(-1)!! = 0!! = 1`; errors above [`MAX_DOUBLE_FACTORIAL`].
pub fn double_factorial(n: i32) -> Result<f64> {
    if n < -1 {
        return Err(Error::Domain(format!(
            "double factorial requires n >= -1, got {n}"
        )));
    }
    if n > MAX_DOUBLE_FACTORIAL {
        return Err(Error::Overflow(format!(
            "{n}!! is not representable in f64 (limit {MAX_DOUBLE_FACTORIAL})"
        )));
    }
    let mut r = 1.0f64;
    let mut k = n;
    while k > 1 {
        r *= f64::from(k);
        k -= 2;
    }
    Ok(r)
}

/// Binomial coefficient `C(n, k)` as `f64` (0 when `k > n`).
///
/// Computed by the multiplicative formula, which stays accurate far beyond
/// the factorial overflow point; errors once the result itself exceeds the
/// `f64` range.
pub fn binomial(n: u32, k: u32) -> Result<f64> {
    if k > n {
        return Ok(0.0);
    }
    let k = k.min(n - k);
    let mut r = 1.0f64;
    for i in 1..=u64::from(k) {
        r *= (u64::from(n - k) + i) as f64 / i as f64;
        if !r.is_finite() {
            return Err(Error::Overflow(format!(
                "C({n}, {k}) exceeds the f64 range"
            )));
        }
    }
    Ok(r)
}

/// `ln(n!)` table for `0..=n_max`, used by the log-domain paths of the
/// exact RER sums at large exponents.
pub(crate) fn ln_factorial_table(n_max: usize) -> Vec<f64> {
    let mut t = vec![0.0f64; n_max + 1];
    let mut acc = 0.0f64;
    for n in 1..=n_max {
        acc += (n as f64).ln();
        t[n] = acc;
    }
    t
}

/// `ln(n!!)` table for `0..=n_max` (index 0 holds `ln(0!!) = 0`).
pub(crate) fn ln_double_factorial_table(n_max: usize) -> Vec<f64> {
    let mut t = vec![0.0f64; n_max + 1];
    for n in 2..=n_max {
        t[n] = t[n - 2] + (n as f64).ln();
    }
    t
}
