//! Post-quantum detectors. Each returns a [`DetectionVerdict`]; a positive verdict
//! certifies that the box has no quantum realization, a negative one proves nothing.

use serde::Serialize;
use thiserror::Error;

use crate::nsbox::{apply_relabeling, canonicalize, hardy_test, quantum_hardy_max, Behavior, Relabeling, DEFAULT_HARDY_TOL};
use crate::wiring::{wire_n_closed, WiringError};

/// Margin above irrational thresholds before a verdict turns positive.
pub const CERT_MARGIN: f64 = 1e-9;
/// Margin for the information-causality criterion.
pub const IC_MARGIN: f64 = 1e-12;

pub const HARDY_BOUND: &str = "hardy_bound";
pub const NTCC: &str = "ntcc";
pub const IC: &str = "ic";
pub const QUANTUM_BOUNDARY: &str = "quantum_boundary";

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("max_copies must be at least 1")]
    NoCopies,
    #[error(transparent)]
    Wiring(#[from] WiringError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionVerdict {
    pub detector: &'static str,
    pub quantity: f64,
    pub threshold: f64,
    pub positive: bool,
    /// Smallest copy count that certified the box (distillation detector only).
    pub witness: Option<u64>,
    pub caveat: Option<&'static str>,
}

/// `4√(2/3)`.
pub fn ntcc_threshold() -> f64 {
    4.0 * (2.0f64 / 3.0).sqrt()
}

/// Distill-then-test against the quantum Hardy bound `(5√5 − 11)/2`.
///
/// Every relabeling frame in which `b` is a Hardy box is tried, and the `n`-copy
/// OR-AND child for `n = 1..=max_copies` counts only while it is itself a Hardy
/// box in that frame, so any success above the bound is a genuine post-quantum
/// certificate. The quantity is the largest such success (0 when `b` is not Hardy
/// in any frame).
pub fn hardy_bound_detector(b: &Behavior, max_copies: u64) -> Result<DetectionVerdict, DetectError> {
    if max_copies < 1 {
        return Err(DetectError::NoCopies);
    }
    let threshold = quantum_hardy_max();
    let mut best = 0.0f64;
    let mut witness: Option<u64> = None;
    for r in Relabeling::all() {
        let framed = apply_relabeling(b, &r);
        if !hardy_test(&framed, DEFAULT_HARDY_TOL).is_hardy {
            continue;
        }
        for n in 1..=max_copies {
            let cert = hardy_test(&wire_n_closed(&framed, n)?, DEFAULT_HARDY_TOL);
            if !cert.is_hardy {
                continue;
            }
            best = best.max(cert.success);
            if cert.success > threshold + CERT_MARGIN && witness.is_none_or(|w| n < w) {
                witness = Some(n);
            }
        }
    }
    Ok(DetectionVerdict {
        detector: HARDY_BOUND,
        quantity: best,
        threshold,
        positive: witness.is_some(),
        witness,
        caveat: None,
    })
}

/// CHSH of the canonical form against `4√(2/3)`.
pub fn ntcc_check(b: &Behavior) -> DetectionVerdict {
    let quantity = canonicalize(b).chsh_max;
    let threshold = ntcc_threshold();
    DetectionVerdict {
        detector: NTCC,
        quantity,
        threshold,
        positive: quantity > threshold + CERT_MARGIN,
        witness: None,
        caveat: Some("threshold derived for isotropic boxes; used as a screen"),
    }
}

/// Information-causality criterion `E₁² + E₂² > 1` with
/// `P₁ = ½[p(a⊕b=0|00) + p(a⊕b=1|10)]`, `P₂ = ½[p(a⊕b=1|01) + p(a⊕b=1|11)]`
/// and `Eᵢ = 2Pᵢ − 1`, evaluated in the frame `b` is given in.
pub fn ic_check(b: &Behavior) -> DetectionVerdict {
    let same = |x: usize, y: usize| b.prob(0, 0, x, y) + b.prob(1, 1, x, y);
    let diff = |x: usize, y: usize| 1.0 - same(x, y);
    let p1 = 0.5 * (same(0, 0) + diff(1, 0));
    let p2 = 0.5 * (diff(0, 1) + diff(1, 1));
    let (e1, e2) = (2.0 * p1 - 1.0, 2.0 * p2 - 1.0);
    let quantity = e1 * e1 + e2 * e2;
    DetectionVerdict {
        detector: IC,
        quantity,
        threshold: 1.0,
        positive: quantity > 1.0 + IC_MARGIN,
        witness: None,
        caveat: None,
    }
}

/// Arcsine criterion on correlators: `max_k |Σ_{xy} asin⟨xy⟩ − 2 asin⟨k⟩| > π`
/// certifies that the correlators lie outside the quantum correlator set.
pub fn quantum_boundary_check(b: &Behavior) -> DetectionVerdict {
    let asin = [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(x, y)| b.correlator(x, y).clamp(-1.0, 1.0).asin());
    let total: f64 = asin.iter().sum();
    let quantity = asin
        .iter()
        .map(|a| (total - 2.0 * a).abs())
        .fold(0.0, f64::max);
    let threshold = std::f64::consts::PI;
    DetectionVerdict {
        detector: QUANTUM_BOUNDARY,
        quantity,
        threshold,
        positive: quantity > threshold + CERT_MARGIN,
        witness: None,
        caveat: Some("correlator-only criterion; never certifies quantum membership"),
    }
}

/// All detectors in the order hardy_bound, ntcc, ic, quantum_boundary.
pub fn detect_all(b: &Behavior, max_copies: u64) -> Result<Vec<DetectionVerdict>, DetectError> {
    Ok(vec![
        hardy_bound_detector(b, max_copies)?,
        ntcc_check(b),
        ic_check(b),
        quantum_boundary_check(b),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsbox::catalog::{b_q_max, h_ns, h_ns_prime, h_q_max};
    use crate::nsbox::{p_l, p_nl};

    #[test]
    fn h_ns_is_certified_by_distillation_only() {
        let v = detect_all(&h_ns(), 8).unwrap();
        let names: Vec<_> = v.iter().map(|d| d.detector).collect();
        assert_eq!(names, [HARDY_BOUND, NTCC, IC, QUANTUM_BOUNDARY]);
        assert!(v[0].positive);
        assert!(v[0].witness.unwrap() <= 8);
        assert!((v[0].quantity - 0.157977).abs() < 1e-6);
        assert!((v[1].quantity - 2.2).abs() < 1e-9 && !v[1].positive);
        assert!((v[2].quantity - 0.9578).abs() < 1e-4 && !v[2].positive);
    }

    #[test]
    fn h_ns_prime_needs_a_party_swap() {
        let v = hardy_bound_detector(&h_ns_prime(), 2).unwrap();
        assert!(v.positive);
        assert_eq!(v.witness, Some(2));
        assert!((v.quantity - 0.0925).abs() < 1e-4);
        assert!(!ntcc_check(&h_ns_prime()).positive);
        assert!(!ic_check(&h_ns_prime()).positive);
    }

    #[test]
    fn quantum_boxes_are_negative() {
        assert!(!hardy_bound_detector(&h_q_max(), 50).unwrap().positive);
        let v = quantum_boundary_check(&b_q_max());
        assert!((v.quantity - std::f64::consts::PI).abs() < 1e-12);
        assert!(!v.positive);
        assert!((ntcc_check(&b_q_max()).quantity - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pr_box_is_flagged_by_correlator_tests() {
        let pr = p_nl();
        assert_eq!(ntcc_check(&pr).quantity, 4.0);
        assert!(ntcc_check(&pr).positive);
        assert_eq!(ic_check(&pr).quantity, 2.0);
        assert!((quantum_boundary_check(&pr).quantity - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn local_box_is_negative_everywhere() {
        for v in detect_all(&p_l(1), 5).unwrap() {
            assert!(!v.positive, "{}", v.detector);
        }
    }

    #[test]
    fn correlator_proxy_outcomes_for_named_boxes() {
        let v = quantum_boundary_check(&h_ns());
        assert!(v.positive);
        assert!((v.quantity - 3.2241).abs() < 1e-4);
        let v = quantum_boundary_check(&h_ns_prime());
        assert!(!v.positive);
        assert!((v.quantity - 2.8225).abs() < 1e-4);
    }

    #[test]
    fn zero_copies_is_an_error() {
        assert!(hardy_bound_detector(&h_ns(), 0).is_err());
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(ntcc_check(&h_ns())).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        for k in ["detector", "quantity", "threshold", "positive", "witness", "caveat"] {
            assert!(keys.iter().any(|x| x == k));
        }
    }
}
