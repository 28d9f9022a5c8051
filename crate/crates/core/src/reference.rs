//! Hand-derived reference data for the two-state rate-2/3 systematic
//! encoder example, shared by unit tests and the acceptance suite. Hidden
//! from the public API surface.
//!
//! Every entry was verified by direct enumeration of the eight received
//! tuples from the source metric state: for each tuple, run one Viterbi
//! step by hand, record the survivor tie set into each destination encoder
//! state, and accumulate probability-weighted tie fractions (times the
//! branch input weight for the weighted matrix).
#![doc(hidden)]

use crate::metricgraph::MetricGraph;
use crate::scalar::{rat, Poly};

/// Positions of the discovery-order metric states in metric-value order.
pub fn rank_by_value(graph: &MetricGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..graph.m()).collect();
    order.sort_by_key(|&i| graph.states[i][1]);
    let mut pos = vec![0; graph.m()];
    for (rank, &i) in order.iter().enumerate() {
        pos[i] = rank;
    }
    pos
}

/// Reference metric-state transition matrix of the two-state rate-2/3
/// systematic encoder, rows/columns ordered by metric value {-2,-1,0,1,2}.
pub fn r23_phi() -> Vec<Vec<Poly>> {
    // helper: polynomial from terms (coeff, p-degree, q-degree)
    let t = Poly::from_pq_terms;
    let zero = Poly::zero;
    vec![
        // -2 row
        vec![
            t(&[(1, 0, 3), (1, 2, 1)]),
            zero(),
            t(&[(1, 3, 0), (3, 1, 2)]),
            zero(),
            t(&[(2, 2, 1)]),
        ],
        // -1 row
        vec![
            t(&[(1, 0, 3), (1, 2, 1)]),
            zero(),
            t(&[(1, 3, 0), (3, 1, 2)]),
            zero(),
            t(&[(2, 2, 1)]),
        ],
        // 0 row
        vec![
            zero(),
            t(&[(1, 2, 0), (1, 0, 2)]),
            zero(),
            t(&[(2, 1, 1)]),
            zero(),
        ],
        // +1 row
        vec![
            t(&[(1, 3, 0), (1, 1, 2)]),
            zero(),
            t(&[(1, 0, 3), (3, 2, 1)]),
            zero(),
            t(&[(2, 1, 2)]),
        ],
        // +2 row
        vec![
            t(&[(1, 3, 0), (1, 1, 2)]),
            zero(),
            t(&[(1, 0, 3), (3, 2, 1)]),
            zero(),
            t(&[(2, 1, 2)]),
        ],
    ]
}

/// Reference 5x5 blocks [A00, A01, A10, A11, B00, B01, B10, B11] for the
/// two-state rate-2/3 systematic encoder, rows/cols ordered by metric value
/// {-2,-1,0,1,2}. Terms are (coefficient numerator over 2, p-degree,
/// q-degree) — every entry in these blocks has denominator 1 or 2, so the
/// tables store doubled integer coefficients.
pub fn r23_blocks() -> [Vec<Vec<Poly>>; 8] {
    // halves: coefficients are (c, i, j) meaning (c/2) p^i q^j
    fn t(terms: &[(i64, u32, u32)]) -> Poly {
        let doubled = Poly::from_pq_terms(terms);
        doubled.scale(&rat(1, 2))
    }
    let z = Poly::zero;
    let a00 = vec![
        vec![t(&[(2, 0, 3), (2, 2, 1)]), z(), t(&[(2, 3, 0), (6, 1, 2)]), z(), t(&[(4, 2, 1)])],
        vec![t(&[(2, 0, 3), (2, 2, 1)]), z(), t(&[(1, 3, 0), (5, 1, 2)]), z(), t(&[(2, 2, 1)])],
        vec![z(), t(&[(2, 0, 3), (2, 2, 1)]), z(), t(&[(4, 1, 2)]), z()],
        vec![z(), z(), t(&[(1, 0, 3), (1, 2, 1)]), z(), t(&[(2, 1, 2)])],
        vec![z(), z(), z(), z(), z()],
    ];
    let a01 = vec![
        vec![t(&[(2, 2, 1), (2, 0, 3)]), z(), t(&[(2, 3, 0), (6, 1, 2)]), z(), t(&[(4, 2, 1)])],
        vec![t(&[(1, 0, 3), (1, 2, 1)]), z(), t(&[(2, 3, 0), (4, 1, 2)]), z(), t(&[(4, 2, 1)])],
        vec![z(), t(&[(2, 3, 0), (2, 1, 2)]), z(), t(&[(4, 2, 1)]), z()],
        vec![t(&[(1, 3, 0), (1, 1, 2)]), z(), t(&[(2, 2, 1)]), z(), z()],
        vec![z(), z(), z(), z(), z()],
    ];
    let a10 = vec![
        vec![z(), z(), z(), z(), z()],
        vec![z(), z(), t(&[(1, 3, 0), (1, 1, 2)]), z(), t(&[(2, 2, 1)])],
        vec![z(), t(&[(2, 3, 0), (2, 1, 2)]), z(), t(&[(4, 2, 1)]), z()],
        vec![t(&[(2, 3, 0), (2, 1, 2)]), z(), t(&[(1, 0, 3), (5, 2, 1)]), z(), t(&[(2, 1, 2)])],
        vec![t(&[(2, 3, 0), (2, 1, 2)]), z(), t(&[(6, 2, 1), (2, 0, 3)]), z(), t(&[(4, 1, 2)])],
    ];
    let a11 = vec![
        vec![z(), z(), z(), z(), z()],
        vec![t(&[(1, 2, 1), (1, 0, 3)]), z(), t(&[(2, 1, 2)]), z(), z()],
        vec![z(), t(&[(2, 2, 1), (2, 0, 3)]), z(), t(&[(4, 1, 2)]), z()],
        vec![t(&[(1, 1, 2), (1, 3, 0)]), z(), t(&[(4, 2, 1), (2, 0, 3)]), z(), t(&[(4, 1, 2)])],
        vec![t(&[(2, 3, 0), (2, 1, 2)]), z(), t(&[(6, 2, 1), (2, 0, 3)]), z(), t(&[(4, 1, 2)])],
    ];
    let b00 = vec![
        vec![t(&[(4, 2, 1)]), z(), t(&[(4, 3, 0), (4, 1, 2)]), z(), t(&[(4, 2, 1)])],
        vec![t(&[(4, 2, 1)]), z(), t(&[(2, 3, 0), (4, 1, 2)]), z(), t(&[(2, 2, 1)])],
        vec![z(), t(&[(4, 2, 1)]), z(), t(&[(4, 1, 2)]), z()],
        vec![z(), z(), t(&[(2, 2, 1)]), z(), t(&[(2, 1, 2)])],
        vec![z(), z(), z(), z(), z()],
    ];
    let b10 = vec![
        vec![z(), z(), z(), z(), z()],
        vec![z(), z(), t(&[(2, 3, 0)]), z(), t(&[(2, 2, 1)])],
        vec![z(), t(&[(4, 3, 0)]), z(), t(&[(4, 2, 1)]), z()],
        vec![t(&[(4, 3, 0)]), z(), t(&[(6, 2, 1)]), z(), t(&[(2, 1, 2)])],
        vec![t(&[(4, 3, 0)]), z(), t(&[(8, 2, 1)]), z(), t(&[(4, 1, 2)])],
    ];
    let b01 = a01.clone(); // branches into encoder state 1 carry input weight 1
    let b11 = a11.clone();
    [a00, a01, a10, a11, b00, b01, b10, b11]
}
