use super::{domain, optimal_copies, DistillError};
use crate::nsbox::{decompose_simplex, mix, p_l, Behavior};

fn check_closed_unit(name: &str, v: f64) -> Result<(), DistillError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(domain(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

fn check_open_unit(name: &str, v: f64) -> Result<(), DistillError> {
    if !(v > 0.0 && v < 1.0) {
        return Err(domain(format!("{name} = {v} outside (0, 1)")));
    }
    Ok(())
}

/// Two-parameter family of quantum Hardy boxes. `p(00|00) = (1−r)r(1−s)s/(1−rs)`
/// and the three Hardy zeros hold for every `(r, s)`.
pub fn hardy_family(r: f64, s: f64) -> Result<Behavior, DistillError> {
    check_closed_unit("r", r)?;
    check_closed_unit("s", s)?;
    let (rb, sb) = (1.0 - r, 1.0 - s);
    // 1 − rs without the cancellation near rs = 1
    let d = rb + r * sb;
    if d <= 0.0 {
        return Err(domain("hardy family is undefined at rs = 1"));
    }
    let p = [
        [rb * r * sb * s / d, rb * rb * s / d, rb * sb, r],
        [0.0, rb * s, sb / d, rb * r * s * s / d],
        [0.0, s, rb * sb / d, r * sb * sb / d],
        [r * sb * s / d, rb * s / d, sb, 0.0],
    ];
    Ok(Behavior::new(p)?)
}

/// Whether two (and then any number of) OR-AND copies of `hardy_family(r, s)`
/// raise its Hardy success: `r²(s+s²) − r(s²+2s) + (2s−1) > 0`.
pub fn distillable_region(r: f64, s: f64) -> bool {
    r * r * (s + s * s) - r * (s * s + 2.0 * s) + (2.0 * s - 1.0) > 0.0
}

/// Parent and optimally distilled Hardy success of a Hardy-form box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapResult {
    pub parent: f64,
    pub distilled: f64,
    pub gap: f64,
    pub n_opt: u64,
}

fn gap_of(b: &Behavior) -> Result<GapResult, DistillError> {
    let c = decompose_simplex(b)?;
    let opt = optimal_copies(c.c(0), c.c(1))?;
    let parent = c.c(0) / 2.0;
    Ok(GapResult {
        parent,
        distilled: opt.value_opt,
        gap: opt.value_opt - parent,
        n_opt: opt.n_opt,
    })
}

/// Optimal OR-AND distillation of `hardy_family(r, s)`; zero gap with one copy
/// outside the distillable region.
pub fn distillation_gap(r: f64, s: f64) -> Result<GapResult, DistillError> {
    check_open_unit("r", r)?;
    check_open_unit("s", s)?;
    gap_of(&hardy_family(r, s)?)
}

/// `λ·hardy_family(r, s) + (1 − λ)·P_L1`.
pub fn hardy_mixture(r: f64, s: f64, lambda: f64) -> Result<Behavior, DistillError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(domain(format!("lambda = {lambda} outside (0, 1]")));
    }
    Ok(mix(&[lambda, 1.0 - lambda], &[hardy_family(r, s)?, p_l(1)])?)
}

/// Optimal OR-AND distillation of [`hardy_mixture`].
pub fn mixture_distillation(r: f64, s: f64, lambda: f64) -> Result<GapResult, DistillError> {
    check_open_unit("r", r)?;
    check_open_unit("s", s)?;
    gap_of(&hardy_mixture(r, s, lambda)?)
}

/// `λ → 0` limit of the optimally distilled Hardy success of [`hardy_mixture`].
pub fn limit_distilled_hardy(r: f64, s: f64) -> Result<f64, DistillError> {
    check_open_unit("r", r)?;
    check_open_unit("s", s)?;
    let a = (1.0 - r) * r * s;
    let denom = 1.0 - s + a;
    let base = denom / (1.0 - s + a * s);
    let exponent = 1.0 - 1.0 / a - 1.0 / (1.0 - s);
    Ok((1.0 - r) * r * (1.0 - s) * s * base.powf(exponent) / denom)
}
