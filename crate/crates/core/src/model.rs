//! Analytic reference quantities for prime and twin-prime counts, and the
//! inverse-log law `m(x) = C/x` for decay constants, with `x = ln π₁`.
//!
//! All logarithms are natural.

use serde::Serialize;
use thiserror::Error;

/// Twin prime constant, to the precision used throughout.
pub const C2: f64 = 0.661618;

/// `2·c₂`, the constant the inverse-log law is compared against.
pub const TWO_C2: f64 = 2.0 * C2;

/// Default absolute tolerance for the logarithmic integrals.
pub const DEFAULT_QUAD_TOL: f64 = 1e-6;

const MAX_DEPTH: u32 = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{what} requires {requirement}, got {value}")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("inverse-log fit needs at least 2 points, have {0}")]
    TooFewPoints(usize),
    #[error("point {index} is unusable: x = {x}, sigma = {sigma}")]
    BadPoint { index: usize, x: f64, sigma: f64 },
}

fn domain(what: &'static str, requirement: &'static str, value: f64) -> ModelError {
    ModelError::Domain {
        what,
        requirement,
        value,
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute error `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrates over doubling panels `[2, 4], [4, 8], …` so that each panel
/// is smooth on its own scale; the tolerance is shared by panel width.
fn integrate_from_two<F: Fn(f64) -> f64>(f: F, n: u64, tol: f64) -> f64 {
    let upper = n as f64;
    let span = upper - 2.0;
    let mut total = 0.0;
    let mut a = 2.0;
    while a < upper {
        let b = (2.0 * a).min(upper);
        total += adaptive_simpson(&f, a, b, tol * (b - a) / span);
        a = b;
    }
    total
}

fn check_integral_args(what: &'static str, n: u64, tol: f64) -> Result<(), ModelError> {
    if n < 2 {
        return Err(domain(what, "N >= 2", n as f64));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(domain(what, "a positive tolerance", tol));
    }
    Ok(())
}

/// `∫₂^N dx / ln x`.
pub fn li1(n: u64, tol: f64) -> Result<f64, ModelError> {
    check_integral_args("li1", n, tol)?;
    Ok(integrate_from_two(|x| 1.0 / x.ln(), n, tol))
}

/// `2c₂ ∫₂^N dx / (ln x)²`.
pub fn li2(n: u64, tol: f64) -> Result<f64, ModelError> {
    check_integral_args("li2", n, tol)?;
    let inner_tol = tol / TWO_C2;
    Ok(TWO_C2
        * integrate_from_two(
            |x| {
                let l = x.ln();
                1.0 / (l * l)
            },
            n,
            inner_tol,
        ))
}

/// `N / ln N`.
pub fn pi1_simple(n: u64) -> Result<f64, ModelError> {
    if n < 3 {
        return Err(domain("pi1_simple", "N >= 3", n as f64));
    }
    let x = n as f64;
    Ok(x / x.ln())
}

/// `2c₂ N / (ln N)²`.
pub fn pi2_simple(n: u64) -> Result<f64, ModelError> {
    if n < 3 {
        return Err(domain("pi2_simple", "N >= 3", n as f64));
    }
    let x = n as f64;
    let l = x.ln();
    Ok(TWO_C2 * x / (l * l))
}

fn singletons(pi1: u64, pi2: u64) -> Result<u64, ModelError> {
    match pi1.checked_sub(2 * pi2) {
        Some(d) if pi2 >= 1 => Ok(d),
        _ => Err(domain("s0", "pi1 >= 2*pi2 and pi2 >= 1", pi1 as f64)),
    }
}

/// Singletons per twin if twins were evenly interspersed: `(π₁ − 2π₂)/π₂`.
pub fn s0(pi1: u64, pi2: u64) -> Result<f64, ModelError> {
    Ok(singletons(pi1, pi2)? as f64 / pi2 as f64)
}

/// `π₂ / (π₁ − 2π₂)`, the reciprocal of [`s0`].
pub fn m0(pi1: u64, pi2: u64) -> Result<f64, ModelError> {
    let d = singletons(pi1, pi2)?;
    if d == 0 {
        return Err(domain("m0", "pi1 > 2*pi2", pi1 as f64));
    }
    Ok(pi2 as f64 / d as f64)
}

/// `s̃₀` under the `N/ln N` approximations: `((ln N − 4c₂)/2c₂, ln N/2c₂)`.
pub fn s0_tilde(n: u64) -> Result<(f64, f64), ModelError> {
    if n < 3 {
        return Err(domain("s0_tilde", "N >= 3", n as f64));
    }
    let l = (n as f64).ln();
    Ok(((l - 4.0 * C2) / TWO_C2, l / TWO_C2))
}

/// Lowest-order reconstruction of `ln N` from `π̃₁`: `ln π̃₁ + ln ln π̃₁`.
pub fn log_relation(pi1_tilde: f64) -> Result<f64, ModelError> {
    if !(pi1_tilde > std::f64::consts::E) {
        return Err(domain("log_relation", "pi1 > e", pi1_tilde));
    }
    let l = pi1_tilde.ln();
    Ok(l + l.ln())
}

/// `2c₂ / ln π₁`.
pub fn m_tilde(pi1: f64) -> Result<f64, ModelError> {
    if !(pi1 > 1.0) {
        return Err(domain("m_tilde", "pi1 > 1", pi1));
    }
    Ok(TWO_C2 / pi1.ln())
}

/// Every analytic estimate for one `(N, π₁, π₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceEstimates {
    pub n: u64,
    pub li1: f64,
    pub li2: f64,
    pub pi1_simple: f64,
    pub pi2_simple: f64,
    pub s0: f64,
    pub m0: f64,
    pub s0_tilde_exact: f64,
    pub s0_tilde_simplified: f64,
    /// `ln π̃₁ / 2c₂`, dropping the `ln ln` term.
    pub s0_tilde_from_pi1: f64,
    /// `(ln π̃₁ + ln ln π̃₁) / 2c₂`, keeping it.
    pub s0_tilde_from_pi1_loglog: f64,
    /// `2c₂ / ln π̃₁` with `π̃₁ = N/ln N`.
    pub m_tilde: f64,
    /// `2c₂ / ln π₁` with the counted `π₁`.
    pub m_tilde_counted: f64,
}

impl ReferenceEstimates {
    pub fn compute(n: u64, pi1: u64, pi2: u64, tol: f64) -> Result<Self, ModelError> {
        let (s0_tilde_exact, s0_tilde_simplified) = s0_tilde(n)?;
        let pi1_tilde = pi1_simple(n)?;
        let ln_pi1_tilde = pi1_tilde.ln();
        Ok(ReferenceEstimates {
            n,
            li1: li1(n, tol)?,
            li2: li2(n, tol)?,
            pi1_simple: pi1_tilde,
            pi2_simple: pi2_simple(n)?,
            s0: s0(pi1, pi2)?,
            m0: m0(pi1, pi2)?,
            s0_tilde_exact,
            s0_tilde_simplified,
            s0_tilde_from_pi1: ln_pi1_tilde / TWO_C2,
            s0_tilde_from_pi1_loglog: log_relation(pi1_tilde)? / TWO_C2,
            m_tilde: m_tilde(pi1_tilde)?,
            m_tilde_counted: m_tilde(pi1 as f64)?,
        })
    }
}

/// One observed decay constant at `x = ln π₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopePoint {
    pub x: f64,
    pub m: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelFit {
    pub c: f64,
    pub c_err: f64,
    pub points_used: usize,
}

impl ModelFit {
    pub fn slope_at(&self, x: f64) -> f64 {
        self.c / x
    }
}

/// Inverse-variance weighted least squares for `m = C/x`.
pub fn fit_inverse_log(points: &[SlopePoint]) -> Result<ModelFit, ModelError> {
    if points.len() < 2 {
        return Err(ModelError::TooFewPoints(points.len()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (index, p) in points.iter().enumerate() {
        let usable = p.x > 0.0 && p.x.is_finite() && p.sigma > 0.0 && p.sigma.is_finite() && p.m.is_finite();
        if !usable {
            return Err(ModelError::BadPoint {
                index,
                x: p.x,
                sigma: p.sigma,
            });
        }
        let w = 1.0 / (p.sigma * p.sigma);
        num += w * p.m / p.x;
        den += w / (p.x * p.x);
    }
    Ok(ModelFit {
        c: num / den,
        c_err: den.powf(-0.5),
        points_used: points.len(),
    })
}
