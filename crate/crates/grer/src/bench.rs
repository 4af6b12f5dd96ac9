//! Term-count and wall-clock benchmark harness, with CSV emitters for the
//! standard sweeps.
//!
//! Term accounting: one "iteration" is one series term for the Gaussian
//! `K` series, one `j` for the simplified RER constant, and one `(j, l)`
//! pair for the exact RER double sum. The rational approximation always
//! reports a single term. The exact RER sum is evaluated at a fixed
//! 45-degree incidence (the count itself does not depend on the angle).

use std::io::Write;
use std::time::Instant;

use crate::patterns::{
    equivalent_alpha_grer, grer_k_pade, grer_k_series, grer_normalization_series, rer_k,
    rer_normalization_exact,
};
use crate::{Error, Result};

/// Incidence used when a method needs one.
const BENCH_THETA_I_DEG: f64 = 45.0;

/// The four normalization routes under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchMethod {
    FRerExact,
    KRer,
    KGrerSeries,
    KGrerPade,
}

impl BenchMethod {
    pub fn name(&self) -> &'static str {
        match self {
            BenchMethod::FRerExact => "f_rer_exact",
            BenchMethod::KRer => "k_rer",
            BenchMethod::KGrerSeries => "k_grer_series",
            BenchMethod::KGrerPade => "k_grer_pade",
        }
    }

    fn requires_integer(&self) -> bool {
        matches!(self, BenchMethod::FRerExact | BenchMethod::KRer)
    }
}

/// One measurement: exponent, method, term count, wall time and value.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BenchRecord {
    pub alpha_r: f64,
    pub method: BenchMethod,
    pub terms: usize,
    pub wall_ns: u64,
    pub value: f64,
}

fn integer_alpha(method: BenchMethod, alpha_r: f64) -> Result<u32> {
    if alpha_r.fract() != 0.0 || alpha_r < 0.0 || alpha_r > u32::MAX as f64 {
        return Err(Error::Domain(format!(
            "{} requires a non-negative integer exponent, got {alpha_r}",
            method.name()
        )));
    }
    Ok(alpha_r as u32)
}

fn evaluate(method: BenchMethod, alpha_r: f64, rel_tol: f64) -> Result<(f64, usize)> {
    match method {
        BenchMethod::FRerExact => {
            let r = rer_normalization_exact(
                integer_alpha(method, alpha_r)?,
                BENCH_THETA_I_DEG.to_radians(),
            )?;
            Ok((r.value, r.terms_used))
        }
        BenchMethod::KRer => {
            let r = rer_k(integer_alpha(method, alpha_r)?);
            Ok((r.value, r.terms_used))
        }
        BenchMethod::KGrerSeries => {
            let r = grer_k_series(alpha_r, rel_tol)?;
            Ok((r.value, r.terms_used))
        }
        BenchMethod::KGrerPade => Ok((grer_k_pade(alpha_r)?, 1)),
    }
}

/// Evaluates the method once and records its term count and single-shot
/// wall time.
pub fn count_terms(method: BenchMethod, alpha_r: f64, rel_tol: f64) -> Result<BenchRecord> {
    let start = Instant::now();
    let (value, terms) = evaluate(method, alpha_r, rel_tol)?;
    let wall_ns = (start.elapsed().as_nanos() as u64).max(1);
    Ok(BenchRecord {
        alpha_r,
        method,
        terms,
        wall_ns,
        value,
    })
}

/// Median per-call wall time of `f`, from `samples` timed samples of
/// `inner` calls each (after a short warm-up). Monotonic clock; single
/// thread.
pub fn median_ns<F: FnMut()>(mut f: F, samples: usize, inner: usize) -> u64 {
    let samples = samples.max(1);
    let inner = inner.max(1);
    for _ in 0..inner.min(100) {
        f();
    }
    let mut times: Vec<u64> = (0..samples)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..inner {
                f();
            }
            ((start.elapsed().as_nanos() / inner as u128) as u64).max(1)
        })
        .collect();
    times.sort_unstable();
    times[times.len() / 2]
}

/// Evaluates the method with robust timing: median per-call time over
/// `samples` measurements.
pub fn time_method(
    method: BenchMethod,
    alpha_r: f64,
    rel_tol: f64,
    samples: usize,
) -> Result<BenchRecord> {
    let (value, terms) = evaluate(method, alpha_r, rel_tol)?;
    let inner = match method {
        BenchMethod::KGrerPade => 512,
        _ => 8,
    };
    let wall_ns = median_ns(
        || {
            std::hint::black_box(evaluate(method, std::hint::black_box(alpha_r), rel_tol).ok());
        },
        samples,
        inner,
    );
    Ok(BenchRecord {
        alpha_r,
        method,
        terms,
        wall_ns,
        value,
    })
}

/// Iteration-count sweep (`alpha,method,terms,wall_ns,value`), one row per
/// (alpha, method) pair. Methods that need integer exponents skip
/// non-integer grid points.
pub fn sweep_iterations<W: Write>(
    alpha_grid: &[f64],
    rel_tol: f64,
    methods: &[BenchMethod],
    mut out: W,
) -> Result<()> {
    writeln!(out, "alpha,method,terms,wall_ns,value").map_err(io_err)?;
    for &alpha in alpha_grid {
        for &method in methods {
            if method.requires_integer() && alpha.fract() != 0.0 {
                continue;
            }
            let r = count_terms(method, alpha, rel_tol)?;
            writeln!(
                out,
                "{},{},{},{},{}",
                alpha,
                method.name(),
                r.terms,
                r.wall_ns,
                r.value
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

/// Rational-vs-series fidelity sweep
/// (`alpha,k_series,k_pade,pade_over_series`).
pub fn sweep_pade_fidelity<W: Write>(alpha_grid: &[f64], mut out: W) -> Result<()> {
    writeln!(out, "alpha,k_series,k_pade,pade_over_series").map_err(io_err)?;
    for &alpha in alpha_grid {
        let k_series = grer_k_series(alpha, 1e-9)?.value;
        let k_pade = grer_k_pade(alpha)?;
        writeln!(
            out,
            "{},{},{},{}",
            alpha,
            k_series,
            k_pade,
            k_pade / k_series
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// Normalization-shape sweep
/// (`theta_i_deg,alpha,F,F_over_F0,sqrt_cos`): how the full normalization
/// tracks `sqrt(cos theta_i)` as the exponent grows.
pub fn sweep_normalization_shape<W: Write>(
    theta_grid_deg: &[f64],
    alpha_grid: &[f64],
    mut out: W,
) -> Result<()> {
    writeln!(out, "theta_i_deg,alpha,F,F_over_F0,sqrt_cos").map_err(io_err)?;
    for &alpha in alpha_grid {
        let f0 = grer_normalization_series(alpha, 0.0, 1e-9)?.value;
        for &theta_deg in theta_grid_deg {
            let f = grer_normalization_series(alpha, theta_deg.to_radians(), 1e-9)?.value;
            writeln!(
                out,
                "{},{},{},{},{}",
                theta_deg,
                alpha,
                f,
                f / f0,
                theta_deg.to_radians().cos().sqrt()
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

/// Matched-lobe sweep (`alpha_rer,alpha_grer_equiv`).
pub fn sweep_equivalent_alpha<W: Write>(alpha_rer_grid: &[u32], mut out: W) -> Result<()> {
    writeln!(out, "alpha_rer,alpha_grer_equiv").map_err(io_err)?;
    for &alpha_rer in alpha_rer_grid {
        writeln!(out, "{},{}", alpha_rer, equivalent_alpha_grer(alpha_rer)?).map_err(io_err)?;
    }
    Ok(())
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(format!("write failed: {e}"))
}

/// Log-spaced grid helper for the sweeps.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    (0..points)
        .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
        .collect()
}
