//! The OR-AND wiring: every parent receives the same inputs, Alice outputs the OR of
//! her parents' outputs and Bob the AND of his.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::nsbox::{Behavior, NsError, SimplexDecomposition, Table};

#[derive(Debug, Error)]
pub enum WiringError {
    #[error("wiring needs at least one parent")]
    EmptyList,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid weights: {0}")]
    Weight(String),
    #[error(transparent)]
    Ns(#[from] NsError),
}

/// How a child box was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WiringMethod {
    ClosedForm,
    Chained,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WiringResult {
    pub child: Behavior,
    pub parents_count: u64,
    pub method: WiringMethod,
}

const P00: usize = 0;
const P01: usize = 1;
const P10: usize = 2;
const P11: usize = 3;

/// Two-parent OR-AND wiring `W[b1, b2]`.
pub fn wire_pair(b1: &Behavior, b2: &Behavior) -> Behavior {
    let mut p: Table = [[0.0; 4]; 4];
    for (row, out) in p.iter_mut().enumerate() {
        let u = &b1.table()[row];
        let v = &b2.table()[row];
        // a = a₁ ∨ a₂ = 0 needs a₁ = a₂ = 0; b = b₁ ∧ b₂ = 0 needs some bᵢ = 0.
        out[P00] = u[P00] * v[P00] + u[P00] * v[P01] + u[P01] * v[P00];
        out[P01] = u[P01] * v[P01];
        // b = 1 needs b₁ = b₂ = 1; a = 1 needs some aᵢ = 1.
        out[P11] = u[P11] * v[P11] + u[P11] * v[P01] + u[P01] * v[P11];
        out[P10] = 1.0 - out[P00] - out[P01] - out[P11];
    }
    Behavior::from_derived(p)
}

/// `xⁿ` evaluated in the log domain so that `n ~ 10⁷` neither underflows nor loses
/// precision for bases close to one.
pub(crate) fn pow_n(base: f64, n: f64) -> f64 {
    if base <= 0.0 {
        if n == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (n * base.ln()).exp()
    }
}

/// Child of `n` identical parents:
/// `p⁽ⁿ⁾(00) = (p00+p01)ⁿ − p01ⁿ`, `p⁽ⁿ⁾(01) = p01ⁿ`, `p⁽ⁿ⁾(11) = (p11+p01)ⁿ − p01ⁿ`.
pub fn wire_n_closed(b: &Behavior, n: u64) -> Result<Behavior, WiringError> {
    if n < 1 {
        return Err(WiringError::Domain("copy count must be at least 1".into()));
    }
    if n == 1 {
        return Ok(*b);
    }
    let nf = n as f64;
    let mut p: Table = [[0.0; 4]; 4];
    for (row, out) in p.iter_mut().enumerate() {
        let r = &b.table()[row];
        let both_one = pow_n(r[P01], nf);
        out[P00] = pow_n(r[P00] + r[P01], nf) - both_one;
        out[P01] = both_one;
        out[P11] = pow_n(r[P11] + r[P01], nf) - both_one;
        out[P10] = 1.0 - out[P00] - out[P01] - out[P11];
    }
    Ok(Behavior::from_derived(p))
}

/// Left fold of [`wire_pair`] over `bs`.
pub fn wire_chain(bs: &[Behavior]) -> Result<Behavior, WiringError> {
    let (first, rest) = bs.split_first().ok_or(WiringError::EmptyList)?;
    Ok(rest.iter().fold(*first, |acc, b| wire_pair(&acc, b)))
}

/// Wires `bs`, choosing the closed form when every parent is identical.
pub fn wire(bs: &[Behavior]) -> Result<WiringResult, WiringError> {
    let first = bs.first().ok_or(WiringError::EmptyList)?;
    let n = bs.len() as u64;
    if bs.iter().all(|b| b == first) {
        Ok(WiringResult {
            child: wire_n_closed(first, n)?,
            parents_count: n,
            method: WiringMethod::ClosedForm,
        })
    } else {
        Ok(WiringResult {
            child: wire_chain(bs)?,
            parents_count: n,
            method: WiringMethod::Chained,
        })
    }
}

/// Empirical outcome frequencies of a sampled wiring.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalBox {
    pub freq: Table,
    /// `sqrt(p̂(1 − p̂)/rounds)` per cell.
    pub std_err: Table,
    pub rounds: u64,
}

impl EmpiricalBox {
    /// Largest `|p̂ − p| / σ` over cells, with `σ` from the reference probability `p`.
    /// Cells where `p` is 0 or 1 must match exactly; a mismatch there is infinite.
    pub fn max_z_score(&self, reference: &Behavior) -> f64 {
        let mut worst = 0.0f64;
        for (row, ref_row) in reference.table().iter().enumerate() {
            for (col, &p) in ref_row.iter().enumerate() {
                let diff = (self.freq[row][col] - p).abs();
                let sigma = (p * (1.0 - p) / self.rounds as f64).sqrt();
                let z = if sigma > 0.0 {
                    diff / sigma
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(z);
            }
        }
        worst
    }
}

const MC_BLOCK: u64 = 1 << 16;

fn sample_cell(row: &[f64; 4], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &p) in row.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = i;
        }
        acc += p;
        if u < acc {
            return i;
        }
    }
    last_nonzero
}

/// Monte Carlo estimate of the OR-AND child of `bs`: for every setting and round each
/// parent draws an outcome pair independently; Alice's bits are OR-ed and Bob's
/// AND-ed. Each `(setting, block of rounds)` owns its own ChaCha stream, so results
/// depend only on `seed`, never on thread scheduling.
pub fn monte_carlo_wire(
    bs: &[Behavior],
    rounds: u64,
    seed: u64,
) -> Result<EmpiricalBox, WiringError> {
    if bs.is_empty() {
        return Err(WiringError::EmptyList);
    }
    if rounds < 1 {
        return Err(WiringError::Domain("rounds must be at least 1".into()));
    }
    let blocks = rounds.div_ceil(MC_BLOCK);
    let jobs: Vec<(usize, u64)> = (0..4)
        .flat_map(|setting| (0..blocks).map(move |block| (setting, block)))
        .collect();
    let tallies: Vec<(usize, [u64; 4])> = jobs
        .par_iter()
        .map(|&(setting, block)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((setting as u64) << 48) | block);
            let start = block * MC_BLOCK;
            let end = (start + MC_BLOCK).min(rounds);
            let mut counts = [0u64; 4];
            for _ in start..end {
                let mut a = 0usize;
                let mut b = 1usize;
                for parent in bs {
                    let cell = sample_cell(&parent.table()[setting], rng.random::<f64>());
                    a |= cell >> 1;
                    b &= cell & 1;
                }
                counts[2 * a + b] += 1;
            }
            (setting, counts)
        })
        .collect();

    let mut counts = [[0u64; 4]; 4];
    for (setting, c) in tallies {
        for (dst, src) in counts[setting].iter_mut().zip(c) {
            *dst += src;
        }
    }
    let n = rounds as f64;
    let mut freq = [[0.0; 4]; 4];
    let mut std_err = [[0.0; 4]; 4];
    for row in 0..4 {
        for col in 0..4 {
            let p = counts[row][col] as f64 / n;
            freq[row][col] = p;
            std_err[row][col] = (p * (1.0 - p) / n).sqrt();
        }
    }
    Ok(EmpiricalBox {
        freq,
        std_err,
        rounds,
    })
}

const SHAPE_TOL: f64 = 1e-12;
const WEIGHT_TOL: f64 = 1e-10;

/// Simplex weights of the 2-copy child of a Hardy-form box
/// `c₀P_NL + c₁P_L1 + … + c₅P_L5`. The child keeps the same six-vertex support.
pub fn two_copy_hardy_coeffs(
    c: &SimplexDecomposition,
) -> Result<SimplexDecomposition, WiringError> {
    if let Some(i) = (6..9).find(|&i| c.c(i).abs() > SHAPE_TOL) {
        return Err(WiringError::Shape(format!(
            "weight c{i} = {} is not zero",
            c.c(i)
        )));
    }
    let [c0, c1, c2, c3, c4, c5, ..] = c.weights;
    let q = c0 / 2.0 + c1;
    let weights = [
        2.0 * (q * q - c1 * c1),
        c1 * c1,
        c0 * (1.0 - c0 / 2.0) + 2.0 * c2 * (1.0 - c2 / 2.0) - c0 * (c1 + c2),
        c3 * (2.0 - c0 - c3 - 2.0 * c2),
        c4 * (c0 + 2.0 * c1 + c4),
        c5 * (c0 + 2.0 * c1 + 2.0 * c4 + c5),
        0.0,
        0.0,
        0.0,
    ];
    let child = SimplexDecomposition::from_weights(weights);
    let direct = wire_n_closed(&c.reconstruct()?, 2)?;
    let residual = child.reconstruct()?.max_abs_diff(&direct);
    Ok(SimplexDecomposition { weights, residual })
}

fn check_weights(c: &SimplexDecomposition) -> Result<(), WiringError> {
    if let Some((i, w)) = c
        .weights
        .iter()
        .enumerate()
        .find(|(_, w)| !w.is_finite() || **w < -WEIGHT_TOL)
    {
        return Err(WiringError::Weight(format!("c{i} = {w}")));
    }
    if (c.sum() - 1.0).abs() > WEIGHT_TOL {
        return Err(WiringError::Weight(format!("weights sum to {}", c.sum())));
    }
    Ok(())
}

/// CHSH value `K⁽²⁾` of the 2-copy child of `Σ cᵢ Pᵢ`, with `c₈` eliminated through
/// normalization.
pub fn chsh_after_two_copy(c: &SimplexDecomposition) -> Result<f64, WiringError> {
    check_weights(c)?;
    let [c0, c1, c2, c3, c4, c5, c6, c7, _] = c.weights;
    Ok(2.0 + c0 * c0 + 4.0 * c0 * (c1 + 2.0 * c4)
        + 8.0 * c4 * (c1 + c2 + c3 + c5 + c6 - 1.0)
        + 8.0 * c4 * c4
        - 8.0 * c5 * c7)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsbox::catalog::{h_ns, h_ns_weights, h_q_max_weights};
    use crate::nsbox::{hardy_test, p_l, p_nl, DEFAULT_HARDY_TOL};

    #[test]
    fn two_pr_boxes() {
        let child = wire_pair(&p_nl(), &p_nl());
        assert_eq!(child.table()[0], [0.25, 0.0, 0.5, 0.25]);
        for row in 1..4 {
            assert_eq!(child.table()[row], [0.0, 0.25, 0.75, 0.0]);
        }
        assert_eq!(child.chsh(), 3.0);
        assert_eq!(wire_n_closed(&p_nl(), 2).unwrap(), child);
    }

    #[test]
    fn local_l1_is_neutral() {
        let c = h_ns();
        assert!(wire_pair(&p_l(1), &c).max_abs_diff(&c) < 1e-15);
        assert!(wire_pair(&c, &p_l(1)).max_abs_diff(&c) < 1e-15);
        assert_eq!(wire_pair(&p_l(1), &p_l(1)), p_l(1));
        assert!(wire_chain(&[p_l(1), c, p_l(1)]).unwrap().max_abs_diff(&c) < 1e-15);
    }

    #[test]
    fn chain_edge_cases() {
        assert!(matches!(wire_chain(&[]), Err(WiringError::EmptyList)));
        assert_eq!(wire_chain(&[h_ns()]).unwrap(), h_ns());
        assert!(matches!(wire_n_closed(&h_ns(), 0), Err(WiringError::Domain(_))));
        assert_eq!(wire_n_closed(&h_ns(), 1).unwrap(), h_ns());
    }

    #[test]
    fn eight_copies_of_h_ns() {
        let child = wire_n_closed(&h_ns(), 8).unwrap();
        let success = hardy_test(&child, DEFAULT_HARDY_TOL).success;
        assert!((success - 0.157977).abs() < 1e-6);
        let chained = wire_chain(&[h_ns(); 8]).unwrap();
        assert!(chained.max_abs_diff(&child) < 1e-12);
    }

    #[test]
    fn wire_dispatches_on_identical_parents() {
        let r = wire(&[h_ns(); 3]).unwrap();
        assert_eq!(r.method, WiringMethod::ClosedForm);
        assert_eq!(r.parents_count, 3);
        let r = wire(&[p_l(1), h_ns()]).unwrap();
        assert_eq!(r.method, WiringMethod::Chained);
    }

    #[test]
    fn deterministic_parents_sample_exactly() {
        let est = monte_carlo_wire(&[p_l(1), p_l(1)], 1000, 3).unwrap();
        assert_eq!(&est.freq, p_l(1).table());
        assert!(est.std_err.iter().flatten().all(|s| *s == 0.0));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let a = monte_carlo_wire(&[h_ns(), h_ns()], 200_000, 11).unwrap();
        let b = monte_carlo_wire(&[h_ns(), h_ns()], 200_000, 11).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_wire(&[h_ns(), h_ns()], 200_000, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn hardy_coeff_map_on_pure_l1() {
        let mut w = [0.0; 9];
        w[1] = 1.0;
        let child = two_copy_hardy_coeffs(&SimplexDecomposition::from_weights(w)).unwrap();
        assert_eq!(child.weights, w);
    }

    #[test]
    fn hardy_coeff_map_values() {
        let child =
            two_copy_hardy_coeffs(&SimplexDecomposition::from_weights(h_ns_weights())).unwrap();
        assert!((child.c(0) / 2.0 - 0.0875).abs() < 1e-12);
        assert!(child.residual < 1e-12);
        let child =
            two_copy_hardy_coeffs(&SimplexDecomposition::from_weights(h_q_max_weights())).unwrap();
        assert!((child.c(0) - 0.06889).abs() < 1e-5);
        assert!(child.residual < 1e-12);
    }

    #[test]
    fn hardy_coeff_map_rejects_wrong_support() {
        let mut w = h_ns_weights();
        w[1] -= 0.01;
        w[7] = 0.01;
        assert!(matches!(
            two_copy_hardy_coeffs(&SimplexDecomposition::from_weights(w)),
            Err(WiringError::Shape(_))
        ));
    }

    #[test]
    fn k2_examples() {
        let unit = |i: usize| {
            let mut w = [0.0; 9];
            w[i] = 1.0;
            SimplexDecomposition::from_weights(w)
        };
        assert_eq!(chsh_after_two_copy(&unit(0)).unwrap(), 3.0);
        assert_eq!(chsh_after_two_copy(&unit(1)).unwrap(), 2.0);
        let k2 = chsh_after_two_copy(&SimplexDecomposition::from_weights(h_ns_weights())).unwrap();
        assert!((k2 - 2.35).abs() < 1e-12);
        let bad = SimplexDecomposition::from_weights([0.5; 9]);
        assert!(matches!(chsh_after_two_copy(&bad), Err(WiringError::Weight(_))));
    }
}
