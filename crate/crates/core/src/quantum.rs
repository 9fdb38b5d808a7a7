//! Two-qubit realization of the quantum Hardy family.
//!
//! Alice measures `{|0⟩, |1⟩}` for `x = 0` and `{|u₀⟩, |u₁⟩}` for `x = 1`, with
//! `|u₀⟩ = C_α|0⟩ + e^{iφ}S_α|1⟩` and `|u₁⟩ = −S_α|0⟩ + e^{iφ}C_α|1⟩`, where
//! `C_z = cos(z/2)` and `S_z = sin(z/2)`. Bob does the same with `β`, `ξ` and
//! `|v₀⟩, |v₁⟩`. The shared state is
//! `|ψ⟩ ∝ |u₀v₀⟩ + W_α|u₁v₀⟩ + W_β|u₀v₁⟩` with `W_z = cot(z/2)`.
//!
//! The resulting table equals [`hardy_family`](crate::distill::hardy_family) at
//! `r = 1 − C_α²C_β²` and `s = S_α²/r`, for every choice of phases.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::nsbox::Behavior;

#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    #[error("degenerate angle: {0}")]
    DegenerateAngle(String),
    #[error("domain error: {0}")]
    Domain(String),
}

type Ket = [Complex64; 2];
type Projector = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRealization {
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
    pub xi: f64,
    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩` (Alice's qubit first).
    pub state: [Complex64; 4],
    /// `proj_a[x][a]` projects onto Alice's outcome `a` of setting `x`.
    pub proj_a: [[Projector; 2]; 2],
    pub proj_b: [[Projector; 2]; 2],
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn basis_pair(angle: f64, phase: f64) -> (Ket, Ket) {
    let (s, co) = (angle / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, phase);
    ([c(co), e * s], [c(-s), e * co])
}

fn kron(u: &Ket, v: &Ket) -> [Complex64; 4] {
    [u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]]
}

fn projector(k: &Ket) -> Projector {
    let mut p = [[c(0.0); 2]; 2];
    for (i, row) in p.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = k[i] * k[j].conj();
        }
    }
    p
}

fn measurements(u0: Ket, u1: Ket) -> [[Projector; 2]; 2] {
    let e0 = [c(1.0), c(0.0)];
    let e1 = [c(0.0), c(1.0)];
    [[projector(&e0), projector(&e1)], [projector(&u0), projector(&u1)]]
}

fn check_angle(name: &str, v: f64) -> Result<(), QuantumError> {
    if !(0.0..=PI).contains(&v) {
        return Err(QuantumError::Domain(format!("{name} = {v} outside [0, π]")));
    }
    if (v / 2.0).sin() == 0.0 {
        return Err(QuantumError::DegenerateAngle(format!("{name} = 0 makes cot({name}/2) diverge")));
    }
    Ok(())
}

pub fn realization_from_angles(
    alpha: f64,
    beta: f64,
    phi: f64,
    xi: f64,
) -> Result<QuantumRealization, QuantumError> {
    check_angle("alpha", alpha)?;
    check_angle("beta", beta)?;
    for (name, v) in [("phi", phi), ("xi", xi)] {
        if !(0.0..2.0 * PI).contains(&v) {
            return Err(QuantumError::Domain(format!("{name} = {v} outside [0, 2π)")));
        }
    }
    let (u0, u1) = basis_pair(alpha, phi);
    let (v0, v1) = basis_pair(beta, xi);
    let wa = 1.0 / (alpha / 2.0).tan();
    let wb = 1.0 / (beta / 2.0).tan();
    let norm = (1.0 + wa * wa + wb * wb).sqrt();
    let (t0, t1, t2) = (kron(&u0, &v0), kron(&u1, &v0), kron(&u0, &v1));
    let mut state = [c(0.0); 4];
    for i in 0..4 {
        state[i] = (t0[i] + t1[i] * wa + t2[i] * wb) / norm;
    }
    Ok(QuantumRealization {
        alpha,
        beta,
        phi,
        xi,
        state,
        proj_a: measurements(u0, u1),
        proj_b: measurements(v0, v1),
    })
}

/// Hardy-family parameters `(r, s) = (1 − C_α²C_β², S_α²/r)` of a realization.
pub fn rs_of(re: &QuantumRealization) -> (f64, f64) {
    let ca = (re.alpha / 2.0).cos();
    let cb = (re.beta / 2.0).cos();
    let sa = (re.alpha / 2.0).sin();
    let r = 1.0 - ca * ca * cb * cb;
    (r, sa * sa / r)
}

/// Inverse of [`rs_of`] with zero phases: `α = 2 arcsin √(rs)` and
/// `C_β² = (1 − r)/(1 − rs)`.
pub fn realization_from_rs(r: f64, s: f64) -> Result<QuantumRealization, QuantumError> {
    if !(r > 0.0 && r < 1.0 && s > 0.0 && s < 1.0) {
        return Err(QuantumError::Domain(format!("(r, s) = ({r}, {s}) outside the open unit square")));
    }
    let alpha = 2.0 * (r * s).sqrt().asin();
    let beta = 2.0 * ((1.0 - r) / (1.0 - r * s)).sqrt().acos();
    realization_from_angles(alpha, beta, 0.0, 0.0)
}

/// `p(ab|xy) = ⟨ψ|Π^A_{x,a} ⊗ Π^B_{y,b}|ψ⟩`.
pub fn born_behavior(re: &QuantumRealization) -> Behavior {
    let psi = &re.state;
    let mut p = [[0.0; 4]; 4];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let pa = &re.proj_a[x][a];
                    let pb = &re.proj_b[y][b];
                    let mut acc = c(0.0);
                    for i in 0..4 {
                        for j in 0..4 {
                            let m = pa[i / 2][j / 2] * pb[i % 2][j % 2];
                            acc += psi[i].conj() * m * psi[j];
                        }
                    }
                    p[2 * x + y][2 * a + b] = acc.re;
                }
            }
        }
    }
    Behavior::from_derived(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distill::hardy_family;
    use crate::nsbox::catalog::h_q_max;
    use crate::nsbox::quantum_hardy_max;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    fn mat_mul(a: &Projector, b: &Projector) -> Projector {
        let mut out = [[c(0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    #[test]
    fn projector_invariants() {
        let re = realization_from_angles(1.1, 2.0, 1.0, 2.5).unwrap();
        let norm: f64 = re.state.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        for pair in re.proj_a.iter().chain(re.proj_b.iter()) {
            for (i, (r0, r1)) in pair[0].iter().zip(&pair[1]).enumerate() {
                for (j, (a, b)) in r0.iter().zip(r1).enumerate() {
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!((a + b - c(id)).norm() < 1e-12);
                }
            }
            for p in pair {
                let sq = mat_mul(p, p);
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((sq[i][j] - p[i][j]).norm() < 1e-12);
                        assert!((p[i][j] - p[j][i].conj()).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn right_angles() {
        let re = realization_from_angles(PI / 2.0, PI / 2.0, 0.0, 0.0).unwrap();
        let (r, s) = rs_of(&re);
        assert!((r - 0.75).abs() < 1e-15);
        assert!((s - 2.0 / 3.0).abs() < 1e-15);
        let back = realization_from_rs(0.75, 2.0 / 3.0).unwrap();
        assert!((back.alpha - PI / 2.0).abs() < 1e-12);
        assert!((back.beta - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn golden_realization_is_maximal() {
        let g = golden();
        let re = realization_from_rs(g, g).unwrap();
        let (r, s) = rs_of(&re);
        assert!((r - g).abs() < 1e-12 && (s - g).abs() < 1e-12);
        let b = born_behavior(&re);
        assert!((b.prob(0, 0, 0, 0) - quantum_hardy_max()).abs() < 1e-12);
        assert!(b.max_abs_diff(&h_q_max()) < 1e-10);
    }

    #[test]
    fn born_matches_family_and_ignores_phases() {
        let re = realization_from_angles(1.1, 2.0, 0.0, 0.0).unwrap();
        let (r, s) = rs_of(&re);
        let b = born_behavior(&re);
        assert!(b.max_abs_diff(&hardy_family(r, s).unwrap()) < 1e-10);
        let phased = born_behavior(&realization_from_angles(1.1, 2.0, 1.0, 2.5).unwrap());
        assert!(b.max_abs_diff(&phased) < 1e-10);
    }

    #[test]
    fn straight_angles_have_no_w_terms() {
        let re = realization_from_angles(PI, PI, 0.0, 0.0).unwrap();
        assert!(re.state[3].norm() > 1.0 - 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            realization_from_angles(0.0, 1.0, 0.0, 0.0),
            Err(QuantumError::DegenerateAngle(_))
        ));
        assert!(matches!(
            realization_from_angles(1.0, 4.0, 0.0, 0.0),
            Err(QuantumError::Domain(_))
        ));
        assert!(realization_from_rs(0.5, 1.0).is_err());
        assert!(realization_from_rs(0.0, 0.5).is_err());
    }

    #[test]
    fn near_unit_r_has_vanishing_success() {
        let b = born_behavior(&realization_from_rs(0.999999, 0.5).unwrap());
        assert!(b.prob(0, 0, 0, 0) < 1e-6);
    }
}
