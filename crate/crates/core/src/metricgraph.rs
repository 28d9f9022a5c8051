//! Closure of the normalized cumulative Viterbi metric states.
//!
//! One decoding step maps a metric state (survivor metrics normalized so
//! encoder state 0 has metric 0) and a received tuple to a successor metric
//! state plus, per destination encoder state, the set of surviving branches
//! that tied for the maximum. Iterating from the all-zero metric state over
//! all received tuples yields a finite directed graph whose states form an
//! M-state Markov chain under the channel's tuple probabilities.

use crate::channel::StepChannel;
use crate::encoder::Trellis;
use crate::linalg::{nullspace_sum_one, power_iteration_left, tarjan_scc, LinalgError, SparseMat};
use crate::scalar::{Ring, ScalarError};
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("metric-state cap of {cap} exceeded; frontier holds {frontier} unexpanded states")]
    CapExceeded { cap: usize, frontier: usize },
    #[error("normalized metric component {value} exceeds bound {bound}; closure aborted")]
    MetricOverflow { bound: i64, value: i64 },
    #[error("reducible metric chain: {num_classes} recurrent classes of sizes {sizes:?}")]
    Reducible {
        num_classes: usize,
        sizes: Vec<usize>,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Branches that tied for the maximum into one destination encoder state:
/// (source encoder state, information weight of the branch).
pub type TieSet = Vec<(u32, u8)>;

/// One expanded trellis section: metric state `from`, received tuple index,
/// successor metric state `to`, and the survivor tie sets per destination
/// encoder state.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub from: u32,
    pub received: u32,
    pub to: u32,
    pub decisions: Vec<TieSet>,
}

/// The closed metric-state graph.
#[derive(Clone, Debug)]
pub struct MetricGraph {
    /// Metric vectors indexed by discovery order; entry 0 is always 0.
    pub states: Vec<Vec<i64>>,
    pub records: Vec<StepRecord>,
    pub num_encoder_states: usize,
    pub num_received: usize,
}

impl MetricGraph {
    pub fn m(&self) -> usize {
        self.states.len()
    }

    /// Structural support adjacency of the metric chain (edge j -> k iff
    /// some received tuple maps state j to state k).
    pub fn support_adj(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.m()];
        for rec in &self.records {
            let (f, t) = (rec.from as usize, rec.to as usize);
            if !adj[f].contains(&t) {
                adj[f].push(t);
            }
        }
        adj
    }
}

/// Expansion limits for the closure.
#[derive(Clone, Copy, Debug)]
pub struct ClosureCaps {
    pub max_states: usize,
    pub max_phi_abs: i64,
}

impl ClosureCaps {
    /// Default caps: 5 million states; metric components bounded by
    /// 64 · c · (single-branch metric spread).
    pub fn default_for(c: usize, metric_range: (i64, i64)) -> Self {
        let spread = (metric_range.1 - metric_range.0).max(1);
        ClosureCaps {
            max_states: 5_000_000,
            max_phi_abs: 64 * c as i64 * spread,
        }
    }

    pub fn with_max_states(self, max_states: usize) -> Self {
        ClosureCaps { max_states, ..self }
    }
}

/// One Viterbi step: add-compare-select from metric state `phi` under
/// received tuple `r`, returning the normalized successor and the tie sets.
pub fn viterbi_step(
    phi: &[i64],
    r: usize,
    trellis: &Trellis,
    channel: &impl StepChannel,
) -> (Vec<i64>, Vec<TieSet>) {
    let n = trellis.num_states;
    let mut mu = vec![i64::MIN; n];
    let mut decisions: Vec<TieSet> = vec![Vec::new(); n];
    for (to, branches) in trellis.incoming.iter().enumerate() {
        for b in branches {
            let score = phi[b.from as usize] + channel.metric(b.output, r);
            if score > mu[to] {
                mu[to] = score;
                decisions[to].clear();
                decisions[to].push((b.from, b.beta));
            } else if score == mu[to] {
                decisions[to].push((b.from, b.beta));
            }
        }
    }
    let base = mu[0];
    let next: Vec<i64> = mu.iter().map(|&m| m - base).collect();
    (next, decisions)
}

/// Breadth-first closure from the all-zero metric state over all received
/// tuples. State indices follow discovery order (frontier in index order,
/// received tuples in ascending order), so runs are reproducible.
pub fn closure(
    trellis: &Trellis,
    channel: &impl StepChannel,
    caps: ClosureCaps,
) -> Result<MetricGraph, GraphError> {
    let zero = vec![0i64; trellis.num_states];
    let mut index: HashMap<Vec<i64>, u32> = HashMap::new();
    index.insert(zero.clone(), 0);
    let mut states = vec![zero];
    let mut records = Vec::new();
    let num_received = channel.num_received();

    let mut frontier: Vec<u32> = vec![0];
    while !frontier.is_empty() {
        // Expand the whole level in parallel; the per-state result order is
        // fixed by (frontier order, tuple order), so indexing stays
        // deterministic regardless of thread scheduling.
        let expansions: Vec<Vec<(usize, Vec<i64>, Vec<TieSet>)>> = frontier
            .par_iter()
            .map(|&si| {
                let phi = &states[si as usize];
                (0..num_received)
                    .map(|r| {
                        let (next, decisions) = viterbi_step(phi, r, trellis, channel);
                        (r, next, decisions)
                    })
                    .collect()
            })
            .collect();

        let mut next_frontier = Vec::new();
        for (&from, exp) in frontier.iter().zip(expansions) {
            for (r, next, decisions) in exp {
                if let Some(&v) = next.iter().max_by_key(|v| v.abs()) {
                    if v.abs() > caps.max_phi_abs {
                        return Err(GraphError::MetricOverflow {
                            bound: caps.max_phi_abs,
                            value: v,
                        });
                    }
                }
                let to = match index.get(&next) {
                    Some(&i) => i,
                    None => {
                        let i = states.len() as u32;
                        if states.len() >= caps.max_states {
                            return Err(GraphError::CapExceeded {
                                cap: caps.max_states,
                                frontier: next_frontier.len() + 1,
                            });
                        }
                        index.insert(next.clone(), i);
                        states.push(next.clone());
                        next_frontier.push(i);
                        i
                    }
                };
                records.push(StepRecord {
                    from,
                    received: r as u32,
                    to,
                    decisions,
                });
            }
        }
        frontier = next_frontier;
    }

    Ok(MetricGraph {
        states,
        records,
        num_encoder_states: trellis.num_states,
        num_received,
    })
}

/// M x M transition matrix of the metric chain in the given backend.
pub fn phi_matrix<R: Ring>(
    graph: &MetricGraph,
    ring: &R,
    channel: &impl StepChannel,
) -> SparseMat<R::Elem> {
    let probs: Vec<R::Elem> = (0..graph.num_received)
        .map(|r| channel.received_prob(ring, r))
        .collect();
    let trips: Vec<(u32, u32, R::Elem)> = graph
        .records
        .iter()
        .map(|rec| (rec.from, rec.to, probs[rec.received as usize].clone()))
        .collect();
    SparseMat::from_triplets(ring, graph.m(), graph.m(), trips)
}

/// Recurrent class of the metric chain (indices sorted ascending).
///
/// Errors if more than one class is recurrent: the stationary distribution
/// would not be unique.
pub fn recurrent_class(graph: &MetricGraph) -> Result<Vec<usize>, GraphError> {
    let adj = graph.support_adj();
    let comps = tarjan_scc(graph.m(), &adj);
    let mut comp_of = vec![usize::MAX; graph.m()];
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let mut recurrent: Vec<usize> = (0..comps.len()).collect();
    recurrent.retain(|&ci| {
        comps[ci]
            .iter()
            .all(|&v| adj[v].iter().all(|&w| comp_of[w] == ci))
    });
    if recurrent.len() != 1 {
        return Err(GraphError::Reducible {
            num_classes: recurrent.len(),
            sizes: recurrent.iter().map(|&ci| comps[ci].len()).collect(),
        });
    }
    let mut class = comps[recurrent[0]].clone();
    class.sort_unstable();
    Ok(class)
}

/// Stationary distribution of the metric chain: solves pΦ = p, Σp = 1 on
/// the single recurrent class; transient states get probability zero.
///
/// Exact backends use elimination (period-proof); the numeric backend uses
/// damped power iteration so million-state chains stay tractable.
pub fn stationary<R: Ring>(
    ring: &R,
    graph: &MetricGraph,
    phi: &SparseMat<R::Elem>,
) -> Result<Vec<R::Elem>, GraphError> {
    let class = recurrent_class(graph)?;
    let restricted = phi.submatrix(&class);
    let k = class.len();

    let numeric = ring.as_f64(&ring.one()).is_some();
    let solved: Vec<R::Elem> = if numeric {
        // Numeric backend: damped power iteration on the left. Elimination
        // is reserved for exact backends, where zero pivots are decidable.
        let f64ring = crate::scalar::F64Ring::new(0.0);
        let trips: Vec<(u32, u32, f64)> = (0..k)
            .flat_map(|r| {
                restricted
                    .row(r)
                    .map(|(c, v)| (r as u32, c as u32, ring.as_f64(v).unwrap()))
                    .collect::<Vec<_>>()
            })
            .collect();
        let m = SparseMat::from_triplets(&f64ring, k, k, trips);
        let x = power_iteration_left(&m, 1e-13, 200_000)?;
        x.into_iter()
            .map(|v| ring.from_f64(v).unwrap())
            .collect()
    } else {
        // (Phi^T - I) x = 0 by elimination over the backend ring.
        let dense = restricted.to_dense(ring);
        let mut mt = vec![vec![ring.zero(); k]; k];
        for (r, row) in dense.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                mt[c][r] = v.clone();
            }
        }
        for (i, row) in mt.iter_mut().enumerate() {
            row[i] = ring.sub(&row[i], &ring.one());
        }
        nullspace_sum_one(ring, &mt)?
    };

    // Normalize to total probability one and embed transient zeros.
    let mut total = ring.zero();
    for v in &solved {
        total = ring.add(&total, v);
    }
    let mut out = vec![ring.zero(); graph.m()];
    for (i, v) in class.iter().zip(solved) {
        out[*i] = ring.div(&v, &total)?;
    }
    Ok(out)
}

/// JSON dump of the graph: states, edges with probabilities in the given
/// backend's serialization.
pub fn graph_json<R: Ring>(
    graph: &MetricGraph,
    ring: &R,
    channel: &impl StepChannel,
) -> serde_json::Value
where
    R::Elem: serde::Serialize,
{
    let probs: Vec<R::Elem> = (0..graph.num_received)
        .map(|r| channel.received_prob(ring, r))
        .collect();
    let edges: Vec<serde_json::Value> = graph
        .records
        .iter()
        .map(|rec| {
            serde_json::json!({
                "from": rec.from,
                "to": rec.to,
                "received": rec.received,
                "prob": probs[rec.received as usize],
                "ties": rec.decisions.iter()
                    .map(|d| d.iter().map(|&(s, b)| serde_json::json!([s, b])).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::json!({
        "m": graph.m(),
        "encoder_states": graph.num_encoder_states,
        "states": graph.states,
        "edges": edges,
    })
}

/// DOT rendering of the metric chain (aggregated edges, tuple counts as
/// labels). Intended for small graphs; callers should gate on `m() <= 64`.
pub fn graph_dot(graph: &MetricGraph) -> String {
    use std::fmt::Write;
    let mut counts: HashMap<(u32, u32), usize> = HashMap::new();
    for rec in &graph.records {
        *counts.entry((rec.from, rec.to)).or_default() += 1;
    }
    let mut edges: Vec<_> = counts.into_iter().collect();
    edges.sort();
    let mut out = String::from("digraph metric_chain {\n  rankdir=LR;\n");
    for (i, phi) in graph.states.iter().enumerate() {
        let label: Vec<String> = phi.iter().map(|v| v.to_string()).collect();
        writeln!(out, "  s{} [label=\"({})\"];", i, label.join(",")).unwrap();
    }
    for ((f, t), n) in edges {
        writeln!(out, "  s{f} -> s{t} [label=\"{n}\"];").unwrap();
    }
    out.push_str("}\n");
    out
}
