use super::{domain, DistillError};
use crate::nsbox::catalog::b_q_max;
use crate::nsbox::{mix, p_l, Behavior};

/// Small-λ ansatz constant: the CHSH-optimal copy count is close to `α/λ`.
pub const PEAK_ANSATZ_ALPHA: f64 = 1.047391;

/// Below this λ the peak is located around the ansatz instead of by a full scan.
const ANSATZ_LAMBDA: f64 = 1e-5;

/// `λ·B_Q^max + (1 − λ)·P_L1`.
pub fn lambda_mixture(lambda: f64) -> Result<Behavior, DistillError> {
    check_lambda(lambda)?;
    Ok(mix(&[lambda, 1.0 - lambda], &[b_q_max(), p_l(1)])?)
}

fn check_lambda(lambda: f64) -> Result<(), DistillError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(domain(format!("lambda = {lambda} outside [0, 1]")));
    }
    Ok(())
}

/// `(1 − kλ)ⁿ` via `exp(n·ln(1 − kλ))`, accurate for tiny `kλ` and huge `n`.
fn decay(k: f64, lambda: f64, n: f64) -> f64 {
    let t = k * lambda;
    if t >= 1.0 {
        return if n == 0.0 { 1.0 } else { 0.0 };
    }
    (n * (-t).ln_1p()).exp()
}

/// CHSH value of the `n`-copy child of [`lambda_mixture`], with `n` allowed to be real.
pub fn chsh_n_lambda_continuous(lambda: f64, n: f64) -> f64 {
    let r2 = 2f64.sqrt();
    2.0 - 8.0 * decay(0.5, lambda, n) + 12.0 * decay((6.0 - r2) / 8.0, lambda, n)
        - 4.0 * decay((6.0 + r2) / 8.0, lambda, n)
}

/// `B⁽ⁿ⁾(λ) = 2 − 8(1−λ/2)ⁿ + 12(1−(6−√2)λ/8)ⁿ − 4(1−(6+√2)λ/8)ⁿ`.
pub fn chsh_n_lambda(lambda: f64, n: u64) -> Result<f64, DistillError> {
    check_lambda(lambda)?;
    if n < 1 {
        return Err(domain("copy count must be at least 1"));
    }
    Ok(chsh_n_lambda_continuous(lambda, n as f64))
}

/// λ below which two copies of [`lambda_mixture`] raise the CHSH value:
/// `8(13 − √2)/167`.
pub fn two_copy_threshold() -> f64 {
    8.0 * (13.0 - 2f64.sqrt()) / 167.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshPeak {
    pub n_opt: u64,
    pub value: f64,
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > width {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Integer copy count maximizing [`chsh_n_lambda`]. For `λ < 10⁻⁵` the continuous
/// relaxation is maximized by golden section on `[α/(2λ), 2α/λ]` and the flanking
/// integers compared; otherwise `n = 1..⌈10/λ⌉` is scanned. Ties go to the smaller n.
pub fn peak_chsh_lambda(lambda: f64) -> Result<ChshPeak, DistillError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(domain(format!("lambda = {lambda} outside (0, 1]")));
    }
    let eval = |n: u64| chsh_n_lambda_continuous(lambda, n as f64);
    let candidates: Vec<u64> = if lambda < ANSATZ_LAMBDA {
        let guess = PEAK_ANSATZ_ALPHA / lambda;
        let x = golden_section_max(
            |n| chsh_n_lambda_continuous(lambda, n),
            0.5 * guess,
            2.0 * guess,
            1.0,
        );
        let floor = x.floor().max(1.0) as u64;
        vec![floor, floor + 1]
    } else {
        (1..=(10.0 / lambda).ceil() as u64).collect()
    };
    let mut best = ChshPeak {
        n_opt: candidates[0],
        value: eval(candidates[0]),
    };
    for &n in &candidates[1..] {
        let v = eval(n);
        if v > best.value {
            best = ChshPeak { n_opt: n, value: v };
        }
    }
    Ok(best)
}
