//! Brute-force hemispherical quadrature and least-squares fitting.
//!
//! This module is the independent route to every normalization number: it
//! never calls into [`crate::patterns`], so an agreement between the two is
//! meaningful evidence. Integration runs in `u = cos(theta_s)` — the
//! integrand `sqrt(cos theta_s) sin(theta_s)` is smooth in `u`, so
//! Gauss–Legendre converges fast despite the square-root behavior at
//! grazing — and in equispaced azimuth nodes, which are spectrally accurate
//! for the periodic direction.

use crate::{Error, Result};

/// Node counts and refinement policy for [`integrate_hemisphere`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss–Legendre order in `u = cos(theta_s)`.
    pub nodes_u: usize,
    /// Equispaced node count in `phi_s`.
    pub nodes_phi: usize,
    /// Stop once successive estimates agree to this relative tolerance.
    pub refine_until: f64,
    /// Give up (with an error) after this many node-count doublings.
    pub max_refinements: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_u: 64,
            nodes_phi: 128,
            refine_until: 1e-9,
            max_refinements: 6,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if self.nodes_u < 4 || self.nodes_phi < 4 {
            return Err(Error::Domain(format!(
                "quadrature needs at least 4 nodes per axis, got {}x{}",
                self.nodes_u, self.nodes_phi
            )));
        }
        if !(self.refine_until > 0.0) {
            return Err(Error::Domain(format!(
                "refine_until must be positive, got {}",
                self.refine_until
            )));
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// `P_n`, with the usual cosine initial guesses.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = vec![(0.0f64, 0.0f64); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0f64;
            let mut p2 = 0.0f64;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let j = j as f64;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        out[i] = (-z, w);
        out[n - 1 - i] = (z, w);
    }
    out
}

/// Integrates `integrand(theta_s, phi_s) * sin(theta_s)` over the upper
/// hemisphere (`theta_s` in `[0, pi/2]`, `phi_s` in `[0, 2pi)`), doubling
/// both node counts until successive estimates agree to
/// `spec.refine_until` relatively.
pub fn integrate_hemisphere<F>(integrand: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    spec.validate()?;
    let mut nu = spec.nodes_u;
    let mut nphi = spec.nodes_phi;
    let mut previous = tensor_pass(&integrand, nu, nphi);
    for _ in 0..spec.max_refinements {
        nu *= 2;
        nphi *= 2;
        let estimate = tensor_pass(&integrand, nu, nphi);
        let scale = estimate.abs().max(previous.abs()).max(f64::MIN_POSITIVE);
        if (estimate - previous).abs() <= spec.refine_until * scale {
            return Ok(estimate);
        }
        previous = estimate;
    }
    Err(Error::QuadratureNonConvergence {
        refinements: spec.max_refinements,
    })
}

/// One tensor-product pass at fixed node counts, Kahan-compensated so the
/// summation order (and hence the result) is fully deterministic.
fn tensor_pass<F>(integrand: &F, nodes_u: usize, nodes_phi: usize) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let gl = gauss_legendre(nodes_u);
    let dphi = std::f64::consts::TAU / nodes_phi as f64;
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for &(x, w) in &gl {
        // Map [-1, 1] onto u = cos(theta_s) in [0, 1].
        let u = 0.5 * (x + 1.0);
        let wu = 0.5 * w;
        let theta_s = u.clamp(0.0, 1.0).acos();
        let mut row = 0.0f64;
        let mut row_carry = 0.0f64;
        for k in 0..nodes_phi {
            let phi = dphi * k as f64;
            let term = integrand(theta_s, phi) - row_carry;
            let next = row + term;
            row_carry = (next - row) - term;
            row = next;
        }
        let term = wu * row * dphi - carry;
        let next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    sum
}

/// Discrete least-squares projection of sampled `F(mu)` onto `sqrt(mu)`:
/// `K = sum F sqrt(mu) w / sum mu w`, with trapezoid weights derived from
/// the (sorted) sample grid.
///
/// This is the discrete counterpart of `K = <F, sqrt(mu)> / <sqrt(mu),
/// sqrt(mu)>` over `mu = cos(theta_i)` in `[0, 1]`.
pub fn ls_fit_sqrt_cos(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Degenerate(format!(
            "least-squares fit needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let mut pts: Vec<(f64, f64)> = samples.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for pair in pts.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::Degenerate(format!(
                "duplicate abscissa mu = {}",
                pair[0].0
            )));
        }
    }
    for &(mu, _) in &pts {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::Domain(format!("mu = {mu} outside [0, 1]")));
        }
    }
    let n = pts.len();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 0..n {
        let w = if i == 0 {
            (pts[1].0 - pts[0].0) / 2.0
        } else if i == n - 1 {
            (pts[n - 1].0 - pts[n - 2].0) / 2.0
        } else {
            (pts[i + 1].0 - pts[i - 1].0) / 2.0
        };
        let (mu, f) = pts[i];
        num += f * mu.sqrt() * w;
        den += mu * w;
    }
    if den == 0.0 {
        return Err(Error::Degenerate("zero Gram weight".into()));
    }
    Ok(num / den)
}
