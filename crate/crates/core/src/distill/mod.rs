//! Distillation analytics for the OR-AND wiring: the n-copy Hardy success law and
//! its optimal copy count, Tsirelson gain, the quantum Hardy `(r, s)` family,
//! λ-mixture CHSH laws and the grid sweeps built on them.

mod chsh_lambda;
mod family;
pub mod sweep;

use thiserror::Error;

use crate::nsbox::NsError;
use crate::wiring::{pow_n, WiringError};

pub use chsh_lambda::{
    chsh_n_lambda, chsh_n_lambda_continuous, lambda_mixture, peak_chsh_lambda, two_copy_threshold,
    ChshPeak, PEAK_ANSATZ_ALPHA,
};
pub use family::{
    distillable_region, distillation_gap, hardy_family, hardy_mixture, limit_distilled_hardy,
    mixture_distillation, GapResult,
};
pub use sweep::{sweep, Axis, Grid, Quantity, SweepRecord};

#[derive(Debug, Error)]
pub enum DistillError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error(transparent)]
    Ns(#[from] NsError),
    #[error(transparent)]
    Wiring(#[from] WiringError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn domain(msg: impl Into<String>) -> DistillError {
    DistillError::Domain(msg.into())
}

const WEIGHT_TOL: f64 = 1e-12;

fn check_hardy_weights(c0: f64, c1: f64) -> Result<(), DistillError> {
    if !(c0.is_finite() && c1.is_finite()) {
        return Err(domain(format!("non-finite weights c0={c0}, c1={c1}")));
    }
    if c0 <= 0.0 {
        return Err(domain(format!("c0 = {c0} must be positive")));
    }
    if c1 < 0.0 {
        return Err(domain(format!("c1 = {c1} must be non-negative")));
    }
    if c0 + c1 > 1.0 + WEIGHT_TOL {
        return Err(domain(format!("c0 + c1 = {} exceeds 1", c0 + c1)));
    }
    Ok(())
}

/// Hardy success of the `n`-copy OR-AND child of a Hardy-form box:
/// `(c₀/2 + c₁)ⁿ − c₁ⁿ`.
pub fn hardy_success_n(c0: f64, c1: f64, n: u64) -> Result<f64, DistillError> {
    check_hardy_weights(c0, c1)?;
    if n < 1 {
        return Err(domain("copy count must be at least 1"));
    }
    Ok(hardy_success_unchecked(c0, c1, n as f64))
}

fn hardy_success_unchecked(c0: f64, c1: f64, n: f64) -> f64 {
    pow_n(c0 / 2.0 + c1, n) - pow_n(c1, n)
}

/// Optimal number of copies for Hardy distillation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopyOptimum {
    /// Stationary point `x*` of the continuous relaxation; `None` when `c₁ = 0`.
    pub n_star: Option<f64>,
    pub n_opt: u64,
    pub value_opt: f64,
}

/// Continuous maximizer of `(c₀/2 + c₁)ˣ − c₁ˣ`.
fn critical_point(c0: f64, c1: f64) -> Option<f64> {
    if c1 <= 0.0 {
        return None;
    }
    let q = c0 / 2.0 + c1;
    Some((c1.ln() / q.ln()).ln() / (q / c1).ln())
}

/// Picks the better of `N = max(1, ⌊x*⌋)` and `N + 1`. When two copies do not beat
/// one (`c₀/2 + 2c₁ ≤ 1`) or `c₁ = 0`, the success decreases in `n` and one copy is
/// optimal.
pub fn optimal_copies(c0: f64, c1: f64) -> Result<CopyOptimum, DistillError> {
    check_hardy_weights(c0, c1)?;
    if c1 >= 1.0 {
        return Err(domain(format!("c1 = {c1} must be below 1")));
    }
    let n_star = critical_point(c0, c1);
    let single = CopyOptimum {
        n_star,
        n_opt: 1,
        value_opt: hardy_success_unchecked(c0, c1, 1.0),
    };
    let Some(x_star) = n_star else {
        return Ok(single);
    };
    if c0 / 2.0 + 2.0 * c1 <= 1.0 {
        return Ok(single);
    }
    let floor = x_star.floor().max(1.0) as u64;
    let at = |n: u64| hardy_success_unchecked(c0, c1, n as f64);
    let (n_opt, value_opt) = if at(floor + 1) > at(floor) {
        (floor + 1, at(floor + 1))
    } else {
        (floor, at(floor))
    };
    Ok(CopyOptimum {
        n_star,
        n_opt,
        value_opt,
    })
}

/// CHSH improvement normalized by the gap `2(√2 − 1)` between the local and
/// Tsirelson bounds, in percent.
pub fn tsirelson_gain(b_parent: f64, b_child: f64) -> f64 {
    (b_child - b_parent) / (2.0 * (2f64.sqrt() - 1.0)) * 100.0
}

/// Radius `2c₀/3` of the ball around `P_L1` inside which `λC + (1−λ)P_L1` is
/// distilled by two copies.
pub fn two_copy_ball_radius(c0: f64) -> Result<f64, DistillError> {
    if !(0.0..=1.0).contains(&c0) {
        return Err(domain(format!("c0 = {c0} outside [0, 1]")));
    }
    Ok(2.0 * c0 / 3.0)
}
