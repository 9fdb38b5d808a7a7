use super::behavior::Behavior;

/// Default tolerance for the three Hardy zero constraints.
pub const DEFAULT_HARDY_TOL: f64 = 1e-9;

/// Hardy test in the frame `A₀,B₀ ↔ x=0,y=0` and `A₁,B₁ ↔ x=1,y=1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyCertificate {
    /// `p(00|00)`.
    pub success: f64,
    /// `p(00|01)`, `p(00|10)`, `p(11|11)`.
    pub zero_residuals: [f64; 3],
    pub is_hardy: bool,
}

pub fn hardy_test(b: &Behavior, tol: f64) -> HardyCertificate {
    let success = b.prob(0, 0, 0, 0);
    let zero_residuals = [b.prob(0, 0, 0, 1), b.prob(0, 0, 1, 0), b.prob(1, 1, 1, 1)];
    let is_hardy = success > tol && zero_residuals.iter().all(|r| *r <= tol);
    HardyCertificate {
        success,
        zero_residuals,
        is_hardy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsbox::vertex::{p_l, p_nl};

    #[test]
    fn deterministic_box_is_not_hardy() {
        let cert = hardy_test(&p_l(1), DEFAULT_HARDY_TOL);
        assert_eq!(cert.success, 0.0);
        assert!(!cert.is_hardy);
    }

    #[test]
    fn pr_box_reaches_no_signaling_maximum() {
        let cert = hardy_test(&p_nl(), DEFAULT_HARDY_TOL);
        assert_eq!(cert.success, 0.5);
        assert!(cert.is_hardy);
    }

    #[test]
    fn tolerance_is_respected() {
        let b = crate::nsbox::mix(&[1e-6, 1.0 - 1e-6], &[p_nl(), p_l(1)]).unwrap();
        assert!(hardy_test(&b, 1e-9).is_hardy);
        assert!(!hardy_test(&b, 1e-6).is_hardy);
    }
}
