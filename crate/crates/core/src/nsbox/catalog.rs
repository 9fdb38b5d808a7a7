//! Named boxes used throughout the analyses.

use super::behavior::{mix, Behavior, Table};
use super::decompose::basis_boxes;
use super::vertex::{vertex, VertexId, SIMPLEX_BASIS};
use super::NsError;

/// Maximal quantum Hardy success `(5√5 − 11)/2`.
pub fn quantum_hardy_max() -> f64 {
    (5.0 * 5f64.sqrt() - 11.0) / 2.0
}

/// Simplex weights of the maximal quantum Hardy box.
pub fn h_q_max_weights() -> [f64; 9] {
    let r5 = 5f64.sqrt();
    let side = (7.0 - 3.0 * r5) / 2.0;
    [5.0 * r5 - 11.0, side, side, side, side, r5 - 2.0, 0.0, 0.0, 0.0]
}

/// Simplex weights of the Tsirelson-saturating box.
pub fn b_q_max_weights() -> [f64; 9] {
    let r2 = 2f64.sqrt();
    let side = 0.25 * (1.0 - 1.0 / r2);
    let mut w = [side; 9];
    w[0] = r2 - 1.0;
    w
}

/// Simplex weights of the post-quantum Hardy box `H_NS`.
pub fn h_ns_weights() -> [f64; 9] {
    [0.1, 0.85, 0.01, 0.01, 0.02, 0.01, 0.0, 0.0, 0.0]
}

const H_NS_PRIME: Table = [
    [0.0773, 0.0256, 0.5599, 0.3372],
    [0.0, 0.1029, 0.7804, 0.1167],
    [0.0, 0.3374, 0.6372, 0.0254],
    [0.1178, 0.2196, 0.6626, 0.0],
];

fn from_weights(w: [f64; 9]) -> Behavior {
    mix(&w, &basis_boxes()).expect("catalog weights form a convex combination")
}

pub fn h_q_max() -> Behavior {
    from_weights(h_q_max_weights())
}

pub fn b_q_max() -> Behavior {
    from_weights(b_q_max_weights())
}

pub fn h_ns() -> Behavior {
    from_weights(h_ns_weights())
}

pub fn h_ns_prime() -> Behavior {
    Behavior::new(H_NS_PRIME).expect("H_NS_prime table is no-signaling")
}

/// Names accepted by [`named_box`], besides the `PR_xyz` / `L_abcd` vertex names.
pub const NAMED: [&str; 13] = [
    "H_Q_max",
    "B_Q_max",
    "H_NS",
    "H_NS_prime",
    "P_NL",
    "P_L1",
    "P_L2",
    "P_L3",
    "P_L4",
    "P_L5",
    "P_L6",
    "P_L7",
    "P_L8",
];

pub fn named_box(name: &str) -> Result<Behavior, NsError> {
    match name {
        "H_Q_max" => Ok(h_q_max()),
        "B_Q_max" => Ok(b_q_max()),
        "H_NS" => Ok(h_ns()),
        "H_NS_prime" => Ok(h_ns_prime()),
        "P_NL" => Ok(vertex(SIMPLEX_BASIS[0])),
        _ => {
            if let Some(k) = name
                .strip_prefix("P_L")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|k| (1..=8).contains(k))
            {
                return Ok(vertex(SIMPLEX_BASIS[k]));
            }
            VertexId::parse(name)
                .map(vertex)
                .ok_or_else(|| NsError::UnknownName(name.to_string()))
        }
    }
}

/// Every catalog name: the named boxes and all 24 vertex ids.
pub fn catalog_names() -> Vec<String> {
    NAMED
        .iter()
        .map(|s| s.to_string())
        .chain(VertexId::all().iter().map(VertexId::name))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_ns_table_matches_reference() {
        let expected = [
            [0.05, 0.85, 0.01, 0.09],
            [0.0, 0.90, 0.08, 0.02],
            [0.0, 0.93, 0.06, 0.01],
            [0.01, 0.92, 0.07, 0.0],
        ];
        let b = h_ns();
        for (row, exp) in b.table().iter().zip(expected) {
            for (v, e) in row.iter().zip(exp) {
                assert!((v - e).abs() < 1e-15);
            }
        }
        assert!((b.chsh() - 2.2).abs() < 1e-12);
    }

    #[test]
    fn b_q_max_saturates_tsirelson() {
        assert!((b_q_max().chsh() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn h_ns_prime_entry() {
        assert_eq!(h_ns_prime().prob(0, 0, 0, 0), 0.0773);
    }

    #[test]
    fn every_name_resolves() {
        for name in catalog_names() {
            assert!(named_box(&name).is_ok(), "{name}");
        }
        assert_eq!(catalog_names().len(), 13 + 24);
        assert!(matches!(named_box("P_L9"), Err(NsError::UnknownName(_))));
        assert!(matches!(named_box("nope"), Err(NsError::UnknownName(_))));
    }

    #[test]
    fn aliases_agree_with_vertex_ids() {
        assert_eq!(named_box("P_L5").unwrap(), named_box("L_1111").unwrap());
        assert_eq!(named_box("P_NL").unwrap(), named_box("PR_110").unwrap());
    }
}
