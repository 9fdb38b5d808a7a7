use std::fmt;

use super::behavior::{col_index, row_index, Behavior, Table};

/// A local reversible relabeling of inputs, outputs and parties.
///
/// Acting on `p` it produces
/// `q(a,b|x,y) = s(a ⊕ oA[x], b ⊕ oB[y] | x ⊕ iA, y ⊕ iB)` where `s` is `p` with the
/// parties exchanged when `swap_parties` is set. The 128 combinations of flags are
/// exactly the local relabeling group of the 2-2-2 scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Relabeling {
    pub swap_parties: bool,
    pub flip_input_a: bool,
    pub flip_input_b: bool,
    /// Output flip for Alice, indexed by her (relabeled) input.
    pub flip_output_a: [bool; 2],
    /// Output flip for Bob, indexed by his (relabeled) input.
    pub flip_output_b: [bool; 2],
}

impl Relabeling {
    pub const GROUP_ORDER: u8 = 128;

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn party_swap() -> Self {
        Self {
            swap_parties: true,
            ..Self::default()
        }
    }

    /// 7-bit encoding, most significant first:
    /// swap, iA, iB, oA[0], oA[1], oB[0], oB[1].
    pub fn code(&self) -> u8 {
        let bits = [
            self.swap_parties,
            self.flip_input_a,
            self.flip_input_b,
            self.flip_output_a[0],
            self.flip_output_a[1],
            self.flip_output_b[0],
            self.flip_output_b[1],
        ];
        bits.iter().fold(0u8, |acc, &b| acc << 1 | b as u8)
    }

    pub fn from_code(code: u8) -> Self {
        assert!(code < Self::GROUP_ORDER, "relabeling code {code} out of range");
        let bit = |i: u8| code >> (6 - i) & 1 == 1;
        Self {
            swap_parties: bit(0),
            flip_input_a: bit(1),
            flip_input_b: bit(2),
            flip_output_a: [bit(3), bit(4)],
            flip_output_b: [bit(5), bit(6)],
        }
    }

    /// All group elements in increasing code order.
    pub fn all() -> impl Iterator<Item = Relabeling> {
        (0..Self::GROUP_ORDER).map(Self::from_code)
    }

    /// For each target cell `4·row + col`, the source cell it is read from.
    fn cell_map(&self) -> [usize; 16] {
        let mut map = [0usize; 16];
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let sa = a ^ self.flip_output_a[x] as usize;
                        let sb = b ^ self.flip_output_b[y] as usize;
                        let sx = x ^ self.flip_input_a as usize;
                        let sy = y ^ self.flip_input_b as usize;
                        let (sx, sy, sa, sb) = if self.swap_parties {
                            (sy, sx, sb, sa)
                        } else {
                            (sx, sy, sa, sb)
                        };
                        map[4 * row_index(x, y) + col_index(a, b)] =
                            4 * row_index(sx, sy) + col_index(sa, sb);
                    }
                }
            }
        }
        map
    }

    pub fn inverse(&self) -> Relabeling {
        let forward = self.cell_map();
        Self::all()
            .find(|candidate| {
                let back = candidate.cell_map();
                (0..16).all(|t| forward[back[t]] == t)
            })
            .expect("relabeling group is closed under inversion")
    }
}

impl fmt::Display for Relabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:07b}", self.code())
    }
}

pub fn apply_relabeling(b: &Behavior, r: &Relabeling) -> Behavior {
    let map = r.cell_map();
    let src = b.table();
    let mut p: Table = [[0.0; 4]; 4];
    for (t, &s) in map.iter().enumerate() {
        p[t / 4][t % 4] = src[s / 4][s % 4];
    }
    Behavior::from_derived(p)
}

/// Outcome of [`canonicalize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canonical {
    pub behavior: Behavior,
    pub relabeling: Relabeling,
    pub chsh_max: f64,
}

/// Values closer than this are treated as ties in [`canonicalize`].
const TIE_TOL: f64 = 1e-12;

/// Relabels `b` into the frame that maximizes the CHSH functional. Ties go to the
/// smallest relabeling code.
pub fn canonicalize(b: &Behavior) -> Canonical {
    let mut best: Option<Canonical> = None;
    for r in Relabeling::all() {
        let candidate = apply_relabeling(b, &r);
        let value = candidate.chsh();
        if best.is_none_or(|c| value > c.chsh_max + TIE_TOL) {
            best = Some(Canonical {
                behavior: candidate,
                relabeling: r,
                chsh_max: value,
            });
        }
    }
    best.expect("relabeling group is non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsbox::vertex::{p_l, p_nl, vertex, VertexId};

    fn generic() -> Behavior {
        crate::nsbox::mix(
            &[0.3, 0.2, 0.1, 0.15, 0.25],
            &[p_nl(), p_l(1), p_l(3), p_l(6), vertex(VertexId::local(1, 0, 0, 1))],
        )
        .unwrap()
    }

    #[test]
    fn codes_round_trip() {
        for code in 0..128 {
            assert_eq!(Relabeling::from_code(code).code(), code);
        }
    }

    #[test]
    fn identity_leaves_box_unchanged() {
        let b = generic();
        assert_eq!(apply_relabeling(&b, &Relabeling::identity()), b);
    }

    #[test]
    fn double_output_flip_is_involution() {
        let r = Relabeling {
            flip_output_a: [true, true],
            flip_output_b: [true, true],
            ..Default::default()
        };
        let b = generic();
        assert_eq!(apply_relabeling(&apply_relabeling(&b, &r), &r), b);
    }

    #[test]
    fn inverse_undoes_every_element() {
        let b = generic();
        for r in Relabeling::all() {
            let back = apply_relabeling(&apply_relabeling(&b, &r), &r.inverse());
            assert!(back.max_abs_diff(&b) == 0.0, "relabeling {r}");
        }
    }

    #[test]
    fn group_elements_act_distinctly() {
        let b = generic();
        let mut images: Vec<Vec<u64>> = Relabeling::all()
            .map(|r| apply_relabeling(&b, &r).table().iter().flatten().map(|v| v.to_bits()).collect())
            .collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 128);
    }

    #[test]
    fn some_relabeling_maps_pr000_to_pnl() {
        let target = p_nl();
        let source = vertex(VertexId::pr(0, 0, 0));
        let hits: Vec<_> = Relabeling::all()
            .filter(|r| apply_relabeling(&source, r) == target)
            .collect();
        assert!(!hits.is_empty());
    }

    #[test]
    fn canonical_values() {
        assert_eq!(canonicalize(&vertex(VertexId::pr(0, 0, 0))).chsh_max, 4.0);
        assert_eq!(canonicalize(&p_l(1)).chsh_max, 2.0);
        let u = canonicalize(&Behavior::uniform());
        assert_eq!(u.chsh_max, 0.0);
        assert_eq!(u.relabeling.code(), 0);
        let nl = canonicalize(&p_nl());
        assert_eq!(nl.relabeling, Relabeling::identity());
    }
}
