//! The information-weight transfer system: sparse matrices A and B of
//! dimension M|Σ| built from the metric graph's survivor decisions.
//!
//! A propagates average information weights along decided branches
//! (tuple probability times tie fraction); B adds the per-branch
//! information-weight increments (the same terms weighted by β, the number
//! of information 1s on the branch). Flat index layout is σ-major:
//! `σ * M + metric_state_index`.

use crate::channel::StepChannel;
use crate::linalg::SparseMat;
use crate::metricgraph::MetricGraph;
use crate::scalar::{rat, Ring};
use rayon::prelude::*;

/// Assembled A/B pair plus the dimensioning facts everything downstream
/// needs (M metric states, |Σ| encoder states, b information bits/step).
#[derive(Clone, Debug)]
pub struct WeightSystem<E> {
    pub a: SparseMat<E>,
    pub b_mat: SparseMat<E>,
    pub m: usize,
    pub sigma: usize,
    pub inputs_per_step: usize,
}

impl<E> WeightSystem<E> {
    pub fn dim(&self) -> usize {
        self.m * self.sigma
    }
}

/// Builds A and B from the metric graph in the given backend.
///
/// For every expanded trellis section (metric j -> k under tuple r with
/// probability P) and every destination encoder state σ' whose survivor tie
/// set is {(σ_i, β_i)} of size κ: A gains P/κ at ((σ_i, j), (σ', k)) and B
/// gains β_i·P/κ there. Tie fractions are exact rationals in all backends.
pub fn assemble<R>(
    ring: &R,
    graph: &MetricGraph,
    channel: &impl StepChannel,
    inputs_per_step: usize,
) -> WeightSystem<R::Elem>
where
    R: Ring + Sync,
    R::Elem: Send + Sync,
{
    let m = graph.m();
    let sigma = graph.num_encoder_states;
    let dim = m * sigma;
    let probs: Vec<R::Elem> = (0..graph.num_received)
        .map(|r| channel.received_prob(ring, r))
        .collect();
    // P/κ for κ = 1..2^b, precomputed per received tuple.
    let max_kappa = 1usize << inputs_per_step;
    let frac: Vec<Vec<R::Elem>> = probs
        .iter()
        .map(|p| {
            (1..=max_kappa)
                .map(|k| ring.mul(p, &ring.from_rational(&rat(1, k as i64))))
                .collect()
        })
        .collect();

    let pairs: Vec<(Vec<(u32, u32, R::Elem)>, Vec<(u32, u32, R::Elem)>)> = graph
        .records
        .par_iter()
        .map(|rec| {
            let mut ta = Vec::new();
            let mut tb = Vec::new();
            let (j, k) = (rec.from as usize, rec.to as usize);
            for (dest, tie) in rec.decisions.iter().enumerate() {
                let kappa = tie.len();
                let share = &frac[rec.received as usize][kappa - 1];
                let col = (dest * m + k) as u32;
                for &(src, beta) in tie {
                    let row = (src as usize * m + j) as u32;
                    ta.push((row, col, share.clone()));
                    if beta > 0 {
                        let inc = ring.mul(share, &ring.from_u64(beta as u64));
                        tb.push((row, col, inc));
                    }
                }
            }
            (ta, tb)
        })
        .collect();

    let mut ta = Vec::new();
    let mut tb = Vec::new();
    for (a, b) in pairs {
        ta.extend(a);
        tb.extend(b);
    }
    WeightSystem {
        a: SparseMat::from_triplets(ring, dim, dim, ta),
        b_mat: SparseMat::from_triplets(ring, dim, dim, tb),
        m,
        sigma,
        inputs_per_step,
    }
}

/// Result of verifying that the source-block sums of A reproduce the
/// metric-chain transition matrix for every destination block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCheck {
    pub pass: bool,
    /// Worst numeric residual observed (0 for exact backends that pass).
    pub max_residual: f64,
    /// (destination block, metric row, metric col) of failures.
    pub failures: Vec<(usize, usize, usize)>,
}

/// Checks Σ_i A_{ij} = Φ for every destination encoder-state block j.
/// This identity is what makes the repeated stationary vector a left
/// eigenvector of A at eigenvalue 1.
pub fn column_block_check<R: Ring>(
    ring: &R,
    ws: &WeightSystem<R::Elem>,
    phi: &SparseMat<R::Elem>,
    tol: f64,
) -> BlockCheck {
    let m = ws.m;
    let mut pass = true;
    let mut max_residual = 0.0f64;
    let mut failures = Vec::new();
    for dest in 0..ws.sigma {
        // Accumulate the block-column sum over all source blocks.
        let mut acc: std::collections::HashMap<(usize, usize), R::Elem> =
            std::collections::HashMap::new();
        for src in 0..ws.sigma {
            for jm in 0..m {
                for (col, v) in ws.a.row(src * m + jm) {
                    if col / m == dest {
                        let key = (jm, col % m);
                        let cur = acc.remove(&key).unwrap_or_else(|| ring.zero());
                        acc.insert(key, ring.add(&cur, v));
                    }
                }
            }
        }
        let phi_dense = phi.to_dense(ring);
        for jm in 0..m {
            for km in 0..m {
                let sum = acc.remove(&(jm, km)).unwrap_or_else(|| ring.zero());
                let diff = ring.sub(&sum, &phi_dense[jm][km]);
                if !ring.is_zero_tol(&diff, tol) {
                    pass = false;
                    failures.push((dest, jm, km));
                }
                if let Some(x) = ring.as_f64(&diff) {
                    max_residual = max_residual.max(x.abs());
                }
            }
        }
    }
    BlockCheck {
        pass,
        max_residual,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Bsc;
    use crate::encoder::{parse_generator, realize, trellis, Form};
    use crate::metricgraph::{closure, phi_matrix, stationary, ClosureCaps, MetricGraph};
    use crate::reference::{r23_blocks, rank_by_value};
    use crate::scalar::{F64Ring, RatFn, RatFnRing};

    fn graph_for(gen: &str, form: Form) -> (MetricGraph, usize, usize) {
        let g = parse_generator(gen).unwrap();
        let fsm = realize(&g, form).unwrap();
        let tr = trellis(&fsm);
        let ch = Bsc::new(tr.c);
        let caps = ClosureCaps::default_for(tr.c, ch.metric_range());
        (closure(&tr, &ch, caps).unwrap(), tr.c, tr.b)
    }

    #[test]
    fn r23_assembled_blocks_match_reference() {
        let (graph, c, b) = graph_for("[[1,0,1+D],[0,1,1+D]]", Form::Observer);
        let ring = RatFnRing;
        let ch = Bsc::new(c);
        let ws = assemble(&ring, &graph, &ch, b);
        assert_eq!(ws.dim(), 10);
        let dense = ws.a.to_dense(&ring);
        let dense_b = ws.b_mat.to_dense(&ring);
        let pos = rank_by_value(&graph);
        let m = graph.m();
        let blocks = r23_blocks();
        for src in 0..2 {
            for dst in 0..2 {
                let a_ref = &blocks[src * 2 + dst];
                let b_ref = &blocks[4 + src * 2 + dst];
                for jm in 0..m {
                    for km in 0..m {
                        let got_a = &dense[src * m + jm][dst * m + km];
                        let got_b = &dense_b[src * m + jm][dst * m + km];
                        let want_a = RatFn::from_poly(a_ref[pos[jm]][pos[km]].clone());
                        let want_b = RatFn::from_poly(b_ref[pos[jm]][pos[km]].clone());
                        assert_eq!(*got_a, want_a, "A[{src}{dst}] ({},{})", pos[jm], pos[km]);
                        assert_eq!(*got_b, want_b, "B[{src}{dst}] ({},{})", pos[jm], pos[km]);
                    }
                }
            }
        }
    }

    #[test]
    fn m1_b_matrix_has_zero_first_block_column() {
        // Rate-1/2 memory-1: every branch into encoder state 1 has input 1,
        // every branch into state 0 has input 0, so B = [[0, A01], [0, A11]].
        let (graph, c, b) = graph_for("1,3", Form::Controller);
        let ring = RatFnRing;
        let ch = Bsc::new(c);
        let ws = assemble(&ring, &graph, &ch, b);
        let m = graph.m();
        let a = ws.a.to_dense(&ring);
        let bm = ws.b_mat.to_dense(&ring);
        for row in 0..ws.dim() {
            for col in 0..ws.dim() {
                if col < m {
                    assert!(bm[row][col].is_zero(), "B nonzero at ({row},{col})");
                } else {
                    assert_eq!(bm[row][col], a[row][col], "B != A at ({row},{col})");
                }
            }
        }
    }

    #[test]
    fn block_column_sums_reproduce_phi_exactly() {
        for (gen, form) in [("1,3", Form::Controller), ("[[1,0,1+D],[0,1,1+D]]", Form::Observer)]
        {
            let (graph, c, b) = graph_for(gen, form);
            let ring = RatFnRing;
            let ch = Bsc::new(c);
            let ws = assemble(&ring, &graph, &ch, b);
            let phi = phi_matrix(&graph, &ring, &ch);
            let report = column_block_check(&ring, &ws, &phi, 0.0);
            assert!(report.pass, "{gen}: failures {:?}", report.failures);
        }
    }

    #[test]
    fn block_column_sums_numeric_m3() {
        let (graph, c, b) = graph_for("[[1+D^2+D^3,1+D+D^2+D^3]]".trim(), Form::Controller);
        assert_eq!(graph.m(), 435);
        let ring = F64Ring::new(0.017);
        let ch = Bsc::new(c);
        let ws = assemble(&ring, &graph, &ch, b);
        let phi = phi_matrix(&graph, &ring, &ch);
        let report = column_block_check(&ring, &ws, &phi, 1e-12);
        assert!(report.pass, "max residual {}", report.max_residual);
    }

    #[test]
    fn repeated_stationary_vector_is_left_eigenvector() {
        let (graph, c, b) = graph_for("[[1,0,1+D],[0,1,1+D]]", Form::Observer);
        let ring = RatFnRing;
        let ch = Bsc::new(c);
        let ws = assemble(&ring, &graph, &ch, b);
        let phi = phi_matrix(&graph, &ring, &ch);
        let pinf = stationary(&ring, &graph, &phi).unwrap();
        let mut el = Vec::new();
        for _ in 0..ws.sigma {
            el.extend(pinf.iter().cloned());
        }
        let lhs = ws.a.vec_mul(&ring, &el);
        for (got, want) in lhs.iter().zip(&el) {
            assert_eq!(got, want);
        }
    }

    #[test]
    fn weight_increment_ratio_bounded_by_inputs_per_step() {
        for (gen, form, b) in [
            ("1,3", Form::Controller, 1),
            ("[[1,0,1+D],[0,1,1+D]]", Form::Observer, 2),
        ] {
            let (graph, c, _) = graph_for(gen, form);
            for &p in &[0.01f64, 0.11, 0.27, 0.42] {
                let ring = F64Ring::new(p);
                let ch = Bsc::new(c);
                let ws = assemble(&ring, &graph, &ch, b);
                let a = ws.a.to_dense(&ring);
                let bm = ws.b_mat.to_dense(&ring);
                for r in 0..ws.dim() {
                    for col in 0..ws.dim() {
                        if a[r][col].abs() > 0.0 {
                            let ratio = bm[r][col] / a[r][col];
                            assert!(
                                (-1e-12..=b as f64 + 1e-12).contains(&ratio),
                                "{gen} p={p} ratio {ratio}"
                            );
                        } else {
                            assert_eq!(bm[r][col], 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_single_state_encoder_block_check() {
        // Memory-0 encoder: one encoder state, one metric state; the check
        // degenerates to A = Φ.
        let (graph, c, b) = graph_for("1,1", Form::Controller);
        assert_eq!(graph.m(), 1);
        let ring = RatFnRing;
        let ch = Bsc::new(c);
        let ws = assemble(&ring, &graph, &ch, b);
        let phi = phi_matrix(&graph, &ring, &ch);
        let report = column_block_check(&ring, &ws, &phi, 0.0);
        assert!(report.pass);
    }
}
