use std::fmt;

use super::NsError;

/// Tolerance used for structural validation (ranges, normalization, no-signaling).
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// Raw 4×4 probability table. Rows are setting pairs `xy` in order 00,01,10,11;
/// columns are outcome pairs `ab` in the same order.
pub type Table = [[f64; 4]; 4];

#[inline]
pub(crate) fn row_index(x: usize, y: usize) -> usize {
    debug_assert!(x < 2 && y < 2);
    2 * x + y
}

#[inline]
pub(crate) fn col_index(a: usize, b: usize) -> usize {
    debug_assert!(a < 2 && b < 2);
    2 * a + b
}

/// Which party a no-signaling violation was observed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::A => f.write_str("A"),
            Party::B => f.write_str("B"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Entry outside `[0, 1]` (or not finite).
    OutOfRange { row: usize, col: usize, value: f64 },
    /// Row does not sum to one; `deficit = 1 - sum`.
    Normalization { row: usize, deficit: f64 },
    /// Marginal of `party` at local input `input` and outcome `outcome` depends on the
    /// remote input by `magnitude`.
    NoSignaling {
        party: Party,
        input: usize,
        outcome: usize,
        magnitude: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange { row, col, value } => {
                write!(f, "OutOfRange(row={row}, col={col}, value={value})")
            }
            Violation::Normalization { row, deficit } => {
                write!(f, "NormalizationViolation(row={row}, deficit={deficit})")
            }
            Violation::NoSignaling {
                party,
                input,
                outcome,
                magnitude,
            } => write!(
                f,
                "NoSignalingViolation(party={party}, input={input}, outcome={outcome}, magnitude={magnitude})"
            ),
        }
    }
}

/// Result of [`validate`]: one entry per violated invariant, carrying the worst offender.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_normalization(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::Normalization { .. }))
    }

    pub fn has_no_signaling(&self, party: Party) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::NoSignaling { party: p, .. } if *p == party))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks range, normalization and no-signaling of a raw table.
pub fn validate(p: &Table) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut worst_range: Option<(usize, usize, f64, f64)> = None;
    for (row, r) in p.iter().enumerate() {
        for (col, &v) in r.iter().enumerate() {
            let excess = if !v.is_finite() {
                f64::INFINITY
            } else if v < 0.0 {
                -v
            } else if v > 1.0 {
                v - 1.0
            } else {
                0.0
            };
            if excess > STRUCTURAL_TOL && worst_range.is_none_or(|w| excess > w.3) {
                worst_range = Some((row, col, v, excess));
            }
        }
    }
    if let Some((row, col, value, _)) = worst_range {
        report
            .violations
            .push(Violation::OutOfRange { row, col, value });
    }

    let mut worst_norm: Option<(usize, f64)> = None;
    for (row, r) in p.iter().enumerate() {
        let deficit = 1.0 - r.iter().sum::<f64>();
        if deficit.abs() > STRUCTURAL_TOL && worst_norm.is_none_or(|w| deficit.abs() > w.1.abs()) {
            worst_norm = Some((row, deficit));
        }
    }
    if let Some((row, deficit)) = worst_norm {
        report
            .violations
            .push(Violation::Normalization { row, deficit });
    }

    for party in [Party::A, Party::B] {
        let mut worst: Option<(usize, usize, f64)> = None;
        for input in 0..2 {
            for outcome in 0..2 {
                let marginal = |remote: usize| -> f64 {
                    (0..2)
                        .map(|other| match party {
                            Party::A => p[row_index(input, remote)][col_index(outcome, other)],
                            Party::B => p[row_index(remote, input)][col_index(other, outcome)],
                        })
                        .sum()
                };
                let magnitude = (marginal(0) - marginal(1)).abs();
                if magnitude > STRUCTURAL_TOL && worst.is_none_or(|w| magnitude > w.2) {
                    worst = Some((input, outcome, magnitude));
                }
            }
        }
        if let Some((input, outcome, magnitude)) = worst {
            report.violations.push(Violation::NoSignaling {
                party,
                input,
                outcome,
                magnitude,
            });
        }
    }

    report
}

/// A validated 2-2-2 no-signaling behavior `p(ab|xy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Behavior {
    p: Table,
}

impl Behavior {
    pub fn new(p: Table) -> Result<Self, NsError> {
        let report = validate(&p);
        if report.is_empty() {
            Ok(Self { p })
        } else {
            Err(NsError::Invalid(report))
        }
    }

    /// Builds a behavior from a table that is valid by construction (wiring output,
    /// Born-rule tables). Violations beyond the structural tolerance are bugs and
    /// panic; within tolerance, entries are clamped into `[0, 1]`.
    pub(crate) fn from_derived(mut p: Table) -> Self {
        let report = validate(&p);
        assert!(
            report.is_empty(),
            "derived table violates behavior invariants: {report}"
        );
        for v in p.iter_mut().flatten() {
            *v = v.clamp(0.0, 1.0);
        }
        Self { p }
    }

    /// Uniformly random box: every outcome pair has probability ¼.
    pub fn uniform() -> Self {
        Self { p: [[0.25; 4]; 4] }
    }

    pub fn table(&self) -> &Table {
        &self.p
    }

    /// `p(ab|xy)`.
    pub fn prob(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[row_index(x, y)][col_index(a, b)]
    }

    pub fn row(&self, x: usize, y: usize) -> &[f64; 4] {
        &self.p[row_index(x, y)]
    }

    /// Correlator `⟨xy⟩ = Σ (-1)^(a⊕b) p(ab|xy)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let r = self.row(x, y);
        r[0] - r[1] - r[2] + r[3]
    }

    /// CHSH value `⟨00⟩ − ⟨01⟩ − ⟨10⟩ − ⟨11⟩`.
    pub fn chsh(&self) -> f64 {
        self.correlator(0, 0) - self.correlator(0, 1) - self.correlator(1, 0) - self.correlator(1, 1)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Behavior) -> f64 {
        self.p
            .iter()
            .flatten()
            .zip(other.p.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn correlator(b: &Behavior, x: usize, y: usize) -> f64 {
    b.correlator(x, y)
}

pub fn chsh(b: &Behavior) -> f64 {
    b.chsh()
}

/// Tolerance on the weight sum accepted by [`mix`].
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Convex combination `Σ wᵢ boxesᵢ`.
pub fn mix(weights: &[f64], boxes: &[Behavior]) -> Result<Behavior, NsError> {
    if weights.len() != boxes.len() {
        return Err(NsError::Weight(format!(
            "{} weights for {} boxes",
            weights.len(),
            boxes.len()
        )));
    }
    if weights.is_empty() {
        return Err(NsError::Weight("empty mixture".into()));
    }
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !w.is_finite() || **w < 0.0)
    {
        return Err(NsError::Weight(format!("weight {i} is {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(NsError::Weight(format!("weights sum to {total}")));
    }
    let mut p = [[0.0; 4]; 4];
    for (w, b) in weights.iter().zip(boxes) {
        for (dst, src) in p.iter_mut().flatten().zip(b.p.iter().flatten()) {
            *dst += w * src;
        }
    }
    Behavior::new(p)
}
