//! One-parameter, normalization-constrained exponential decay fit.
//!
//! The relative frequency of separation `s` is modelled as
//! `ln f(s) = -m·s + ln m`; tying the intercept to `ln m` keeps the
//! frequencies normalized, which leaves the decay constant `m` as the only
//! free parameter. `m` minimizes
//!
//! ```text
//! S(m) = Σ w_s (ln f_s + m·s − ln m)²
//! ```
//!
//! found as a bracketed root of `S'(m)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::FrequencyTable;

/// Lower end of the slope search interval.
pub const MIN_SLOPE: f64 = 1e-6;
/// Upper end of the slope search interval.
pub const MAX_SLOPE: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("fit needs at least 2 separation bins, have {0}")]
    InsufficientData(usize),
    #[error("relative frequency {rel_freq} of separation {separation} is outside (0, 1]")]
    InvalidFrequency { separation: u64, rel_freq: f64 },
    #[error("invalid fit options: {0}")]
    InvalidOptions(String),
    #[error("no stationary point of the objective in [{MIN_SLOPE}, {MAX_SLOPE}]")]
    NoBracket,
    #[error("fit did not converge in {iterations} iterations (last slope {last_slope})")]
    NonConvergence { last_slope: f64, iterations: u32 },
}

impl FitError {
    /// Short machine-readable status used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            FitError::InsufficientData(_) => "insufficient_data",
            FitError::InvalidFrequency { .. } => "invalid_frequency",
            FitError::InvalidOptions(_) => "invalid_options",
            FitError::NoBracket => "no_bracket",
            FitError::NonConvergence { .. } => "non_convergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Each bin weighted by its event count.
    #[default]
    CountWeighted,
    /// Every observed separation weighted equally.
    Unweighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub weighting: Weighting,
    /// Relative stationarity tolerance: `|S'(m)| <= tolerance · S(m)`.
    pub tolerance: f64,
    pub max_iterations: u32,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            weighting: Weighting::CountWeighted,
            tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

impl FitOptions {
    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = weighting;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    /// Decay constant.
    pub m: f64,
    /// Gauss–Newton standard error of `m`.
    pub std_error: f64,
    /// `S(m)` at the optimum.
    pub objective: f64,
    pub bins_used: usize,
    /// `1/m`, the expected number of singletons between consecutive twins.
    pub mean_separation: f64,
    pub iterations: u32,
}

impl SlopeFit {
    /// Intercept of the fitted line, `ln m`.
    pub fn intercept(&self) -> f64 {
        self.m.ln()
    }

    /// Fitted log frequency at separation `s`.
    pub fn ln_frequency(&self, s: u64) -> f64 {
        -self.m * s as f64 + self.intercept()
    }
}

pub fn mean_separation(fit: &SlopeFit) -> f64 {
    1.0 / fit.m
}

/// Weighted points `(s, ln f, w)` of a table.
#[derive(Debug, Clone)]
pub struct Objective {
    points: Vec<(f64, f64, f64)>,
}

impl Objective {
    pub fn new(table: &FrequencyTable, weighting: Weighting) -> Result<Self, FitError> {
        let mut points = Vec::with_capacity(table.len());
        for row in table.rows() {
            if !(row.rel_freq > 0.0 && row.rel_freq <= 1.0) {
                return Err(FitError::InvalidFrequency {
                    separation: row.separation,
                    rel_freq: row.rel_freq,
                });
            }
            let w = match weighting {
                Weighting::CountWeighted => row.count as f64,
                Weighting::Unweighted => 1.0,
            };
            points.push((row.separation as f64, row.ln_rel_freq, w));
        }
        if points.len() < 2 {
            return Err(FitError::InsufficientData(points.len()));
        }
        Ok(Objective { points })
    }

    /// `S(m)`.
    pub fn value(&self, m: f64) -> f64 {
        let ln_m = m.ln();
        self.points
            .iter()
            .map(|&(s, y, w)| {
                let r = y + m * s - ln_m;
                w * r * r
            })
            .sum()
    }

    /// `S'(m) = 2 Σ w (ln f + m·s − ln m)(s − 1/m)`.
    pub fn derivative(&self, m: f64) -> f64 {
        let ln_m = m.ln();
        let inv = 1.0 / m;
        2.0 * self
            .points
            .iter()
            .map(|&(s, y, w)| w * (y + m * s - ln_m) * (s - inv))
            .sum::<f64>()
    }

    /// `Σ w (s − 1/m)²`, the Gauss–Newton curvature.
    fn curvature(&self, m: f64) -> f64 {
        let inv = 1.0 / m;
        self.points
            .iter()
            .map(|&(s, _, w)| w * (s - inv) * (s - inv))
            .sum()
    }

    /// `1 / (w-weighted mean separation)`; exact for ideal geometric data.
    fn seed(&self) -> f64 {
        let (num, den) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(n, d), &(s, _, w)| (n + w * s, d + w));
        let mean = num / den;
        if mean > 0.0 {
            (1.0 / mean).clamp(MIN_SLOPE, MAX_SLOPE)
        } else {
            1.0
        }
    }
}

pub fn fit_constrained(table: &FrequencyTable, opts: &FitOptions) -> Result<SlopeFit, FitError> {
    if !(opts.tolerance > 0.0 && opts.tolerance.is_finite()) {
        return Err(FitError::InvalidOptions(format!(
            "tolerance must be positive, got {}",
            opts.tolerance
        )));
    }
    if opts.max_iterations == 0 {
        return Err(FitError::InvalidOptions("max_iterations must be positive".into()));
    }
    let objective = Objective::new(table, opts.weighting)?;
    let (m, iterations) = minimize(&objective, opts)?;

    let s_min = objective.value(m);
    let bins = objective.points.len();
    let variance = (s_min / (bins - 1) as f64) / objective.curvature(m);
    Ok(SlopeFit {
        m,
        std_error: variance.sqrt(),
        objective: s_min,
        bins_used: bins,
        mean_separation: 1.0 / m,
        iterations,
    })
}

/// Root of `S'` by Illinois false position inside an expanding bracket,
/// bisecting whenever the secant step stalls.
fn minimize(objective: &Objective, opts: &FitOptions) -> Result<(f64, u32), FitError> {
    let seed = objective.seed();
    let (mut lo, mut hi) = (seed, seed);
    let mut g_lo = objective.derivative(lo);
    let mut g_hi = g_lo;
    while g_lo > 0.0 {
        if lo <= MIN_SLOPE {
            return Err(FitError::NoBracket);
        }
        hi = lo;
        g_hi = g_lo;
        lo = (lo * 0.5).max(MIN_SLOPE);
        g_lo = objective.derivative(lo);
    }
    while g_hi < 0.0 {
        if hi >= MAX_SLOPE {
            return Err(FitError::NoBracket);
        }
        lo = hi;
        g_lo = g_hi;
        hi = (hi * 2.0).min(MAX_SLOPE);
        g_hi = objective.derivative(hi);
    }
    if g_lo == 0.0 {
        return Ok((lo, 0));
    }
    if g_hi == 0.0 {
        return Ok((hi, 0));
    }

    // Invariant: g_lo < 0 < g_hi.
    let mut side = 0i8;
    let mut m = 0.5 * (lo + hi);
    for iteration in 1..=opts.max_iterations {
        let mut candidate = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        if !(candidate > lo && candidate < hi) {
            candidate = 0.5 * (lo + hi);
        }
        m = candidate;
        let g = objective.derivative(m);
        let s = objective.value(m);
        if g.abs() <= opts.tolerance * s || hi - lo <= 4.0 * f64::EPSILON * m {
            return Ok((m, iteration));
        }
        if g < 0.0 {
            lo = m;
            g_lo = g;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = m;
            g_hi = g;
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
        }
    }
    Err(FitError::NonConvergence {
        last_slope: m,
        iterations: opts.max_iterations,
    })
}
