use std::fmt;

use super::behavior::{col_index, row_index, Behavior, Table};

/// One of the 24 vertices of the 2-2-2 no-signaling polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexId {
    /// PR box `p(ab|xy) = ½ δ(a⊕b, xy ⊕ αx ⊕ βy ⊕ γ)`.
    Pr { alpha: u8, beta: u8, gamma: u8 },
    /// Deterministic box `a = α₁x ⊕ α₂`, `b = β₁y ⊕ β₂`.
    Local { a1: u8, a2: u8, b1: u8, b2: u8 },
}

impl VertexId {
    pub const fn pr(alpha: u8, beta: u8, gamma: u8) -> Self {
        VertexId::Pr { alpha, beta, gamma }
    }

    pub const fn local(a1: u8, a2: u8, b1: u8, b2: u8) -> Self {
        VertexId::Local { a1, a2, b1, b2 }
    }

    /// All 8 PR ids followed by all 16 local ids, each in binary order of its bits.
    pub fn all() -> Vec<VertexId> {
        let mut ids = Vec::with_capacity(24);
        for code in 0u8..8 {
            ids.push(Self::pr(code >> 2 & 1, code >> 1 & 1, code & 1));
        }
        for code in 0u8..16 {
            ids.push(Self::local(code >> 3 & 1, code >> 2 & 1, code >> 1 & 1, code & 1));
        }
        ids
    }

    pub fn is_pr(&self) -> bool {
        matches!(self, VertexId::Pr { .. })
    }

    /// Catalog name, e.g. `PR_110` or `L_0001`.
    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn parse(name: &str) -> Option<Self> {
        let bits = |s: &str, n: usize| -> Option<Vec<u8>> {
            (s.len() == n)
                .then(|| s.bytes().map(|c| c.wrapping_sub(b'0')).collect::<Vec<_>>())
                .filter(|v| v.iter().all(|&b| b < 2))
        };
        if let Some(rest) = name.strip_prefix("PR_") {
            let b = bits(rest, 3)?;
            Some(Self::pr(b[0], b[1], b[2]))
        } else if let Some(rest) = name.strip_prefix("L_") {
            let b = bits(rest, 4)?;
            Some(Self::local(b[0], b[1], b[2], b[3]))
        } else {
            None
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VertexId::Pr { alpha, beta, gamma } => write!(f, "PR_{alpha}{beta}{gamma}"),
            VertexId::Local { a1, a2, b1, b2 } => write!(f, "L_{a1}{a2}{b1}{b2}"),
        }
    }
}

/// Exact table of a vertex; entries are 0, ½ or 1.
pub fn vertex(id: VertexId) -> Behavior {
    let mut p: Table = [[0.0; 4]; 4];
    for x in 0..2usize {
        for y in 0..2usize {
            match id {
                VertexId::Pr { alpha, beta, gamma } => {
                    let parity = (x & y) ^ (alpha as usize & x) ^ (beta as usize & y) ^ gamma as usize;
                    for a in 0..2 {
                        p[row_index(x, y)][col_index(a, a ^ parity)] = 0.5;
                    }
                }
                VertexId::Local { a1, a2, b1, b2 } => {
                    let a = (a1 as usize & x) ^ a2 as usize;
                    let b = (b1 as usize & y) ^ b2 as usize;
                    p[row_index(x, y)][col_index(a, b)] = 1.0;
                }
            }
        }
    }
    Behavior::from_derived(p)
}

/// The nine vertices spanning the simplex of the CHSH symmetry used throughout:
/// the PR box `P_NL = PR(1,1,0)` followed by `P_L1 … P_L8`.
pub const SIMPLEX_BASIS: [VertexId; 9] = [
    VertexId::pr(1, 1, 0),
    VertexId::local(0, 0, 0, 1),
    VertexId::local(0, 1, 0, 0),
    VertexId::local(0, 1, 1, 1),
    VertexId::local(1, 1, 0, 1),
    VertexId::local(1, 1, 1, 1),
    VertexId::local(1, 0, 0, 0),
    VertexId::local(0, 0, 1, 0),
    VertexId::local(1, 0, 1, 0),
];

/// `P_NL`.
pub fn p_nl() -> Behavior {
    vertex(SIMPLEX_BASIS[0])
}

/// `P_Lk` for `k` in `1..=8`.
pub fn p_l(k: usize) -> Behavior {
    assert!((1..=8).contains(&k), "P_L index {k} out of range");
    vertex(SIMPLEX_BASIS[k])
}
