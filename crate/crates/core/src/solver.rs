//! Solving for the asymptotic bit error probability: right eigenvector of A
//! at eigenvalue 1, the final contraction P_b = e_L B e_R / b, and an
//! independent fixed-point iteration used as a cross-check.

use crate::channel::StepChannel;
use crate::linalg::{nullspace_sum_one, power_iteration_right, LinalgError, SparseMat};
use crate::metricgraph::{phi_matrix, stationary, GraphError, MetricGraph};
use crate::scalar::{Rat, Ring, ScalarError, Series, SeriesRing};
use crate::weightsys::{assemble, WeightSystem};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("left/right eigenvector normalization product is zero")]
    DegenerateNormalization,
    #[error("series precision still insufficient at guard order {0}")]
    GuardExhausted(usize),
}

impl SolveError {
    /// True when raising the series guard order may fix the failure.
    fn is_precision(&self) -> bool {
        matches!(
            self,
            SolveError::Linalg(LinalgError::PrecisionExhausted)
                | SolveError::Scalar(ScalarError::PrecisionExhausted)
                | SolveError::Graph(GraphError::Linalg(LinalgError::PrecisionExhausted))
        )
    }
}

/// Everything the pipeline produces for one channel/backend combination.
#[derive(Clone, Debug, Serialize)]
pub struct BerSolution<E> {
    /// Stationary distribution of the metric chain (length M).
    pub stationary: Vec<E>,
    /// Right eigenvector of A at eigenvalue 1, normalized to e_L·e_R = 1.
    pub e_right: Vec<E>,
    /// Exact/series/numeric bit error probability.
    pub pb: E,
}

/// Right eigenvector of A at eigenvalue 1, normalized so that `e_l · x = 1`.
///
/// All-zero rows force zero eigenvector entries; removing such an index also
/// removes its column, which can zero further rows, so the trim cascades
/// until the remaining core is irreducible. The core is then solved exactly
/// (nullspace of A−I) or numerically (damped power iteration).
pub fn right_eigenvector<R: Ring>(
    ring: &R,
    a: &SparseMat<R::Elem>,
    e_l: &[R::Elem],
) -> Result<Vec<R::Elem>, SolveError> {
    let n = a.rows;
    assert_eq!(e_l.len(), n);
    // Cascading zero-row trim via a worklist over nonzero-entry counts.
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for r in 0..n {
        for (c, v) in a.row(r) {
            if !ring.is_zero(v) {
                count[r] += 1;
                col_rows[c].push(r as u32);
            }
        }
    }
    let mut active = vec![true; n];
    let mut work: Vec<usize> = (0..n).filter(|&r| count[r] == 0).collect();
    while let Some(i) = work.pop() {
        if !active[i] {
            continue;
        }
        active[i] = false;
        for &r in &col_rows[i] {
            let r = r as usize;
            if active[r] {
                count[r] -= 1;
                if count[r] == 0 {
                    work.push(r);
                }
            }
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
    let core = a.submatrix(&keep);

    let is_numeric = ring.as_f64(&ring.zero()).is_some();
    let x_core: Vec<R::Elem> = if is_numeric {
        let trips: Vec<(u32, u32, f64)> = (0..core.rows)
            .flat_map(|r| {
                core.row(r)
                    .map(|(c, v)| (r as u32, c as u32, ring.as_f64(v).unwrap()))
                    .collect::<Vec<_>>()
            })
            .collect();
        let f64ring = crate::scalar::F64Ring::new(0.0);
        let fm = SparseMat::from_triplets(&f64ring, core.rows, core.cols, trips);
        power_iteration_right(&fm, 1e-13, 200_000)?
            .into_iter()
            .map(|v| ring.from_f64(v).unwrap())
            .collect()
    } else {
        // Nullspace of (A_core − I), sum-normalized (rescaled below).
        let mut dense = core.to_dense(ring);
        let one = ring.one();
        for (i, row) in dense.iter_mut().enumerate() {
            row[i] = ring.sub(&row[i], &one);
        }
        nullspace_sum_one(ring, &dense)?
    };

    let mut x = vec![ring.zero(); n];
    for (slot, val) in keep.iter().zip(x_core) {
        x[*slot] = val;
    }
    let mut scale = ring.zero();
    for (l, xi) in e_l.iter().zip(&x) {
        scale = ring.add(&scale, &ring.mul(l, xi));
    }
    if ring.is_zero(&scale) {
        return Err(SolveError::DegenerateNormalization);
    }
    for xi in x.iter_mut() {
        *xi = ring.div(xi, &scale)?;
    }
    Ok(x)
}

/// Full pipeline on an already-computed metric graph: stationary
/// distribution, A/B assembly, right eigenvector, and P_b = e_L B e_R / b.
pub fn solve<R: Ring>(
    ring: &R,
    graph: &MetricGraph,
    channel: &impl StepChannel,
    inputs_per_step: usize,
) -> Result<BerSolution<R::Elem>, SolveError>
where
    R::Elem: Send + Sync,
{
    let phi = phi_matrix(graph, ring, channel);
    let pinf = stationary(ring, graph, &phi)?;
    let ws = assemble(ring, graph, channel, inputs_per_step);
    let mut e_l = Vec::with_capacity(ws.dim());
    for _ in 0..ws.sigma {
        e_l.extend(pinf.iter().cloned());
    }
    let e_r = right_eigenvector(ring, &ws.a, &e_l)?;
    let pb = contract(ring, &ws, &e_l, &e_r)?;
    Ok(BerSolution {
        stationary: pinf,
        e_right: e_r,
        pb,
    })
}

/// `e_L B e_R / b`.
fn contract<R: Ring>(
    ring: &R,
    ws: &WeightSystem<R::Elem>,
    e_l: &[R::Elem],
    e_r: &[R::Elem],
) -> Result<R::Elem, SolveError> {
    let lb = ws.b_mat.vec_mul(ring, e_l);
    let mut acc = ring.zero();
    for (l, r) in lb.iter().zip(e_r) {
        acc = ring.add(&acc, &ring.mul(l, r));
    }
    Ok(ring.div(&acc, &ring.from_u64(ws.inputs_per_step as u64))?)
}

/// Truncated power series for P_b to the requested order in `p`.
///
/// Series elimination loses trusted coefficients whenever a pivot has
/// positive valuation, so the solve runs at `order + guard` and retries
/// with a doubled guard until the result is trusted through `order`.
pub fn pb_series(
    graph: &MetricGraph,
    channel: &impl StepChannel,
    inputs_per_step: usize,
    order: usize,
) -> Result<Series, SolveError> {
    let mut guard = 4usize;
    loop {
        let ring = SeriesRing::new(order + guard);
        match solve(&ring, graph, channel, inputs_per_step) {
            Ok(sol) if sol.pb.prec() > order => return Ok(sol.pb.refit(order)),
            Ok(_) => {}
            Err(e) if e.is_precision() => {}
            Err(e) => return Err(e),
        }
        if guard >= 64 {
            return Err(SolveError::GuardExhausted(guard));
        }
        guard *= 2;
    }
}

/// Leading coefficients of P_b as exact rationals (index k = coefficient of
/// p^k).
pub fn pb_series_coeffs(
    graph: &MetricGraph,
    channel: &impl StepChannel,
    inputs_per_step: usize,
    order: usize,
) -> Result<Vec<Rat>, SolveError> {
    let s = pb_series(graph, channel, inputs_per_step, order)?;
    Ok((0..=order).map(|k| s.coeff(k)).collect())
}

/// Independent numeric cross-check that avoids the eigenvector solve:
/// iterate the defining recursion w ← w A + e_L B and watch the per-step
/// increment of the total weight in encoder-state block 0. The increment
/// converges to b·P_b; a Cesàro average over the tail absorbs the periodic
/// oscillation of the underlying chain.
pub fn pb_iterative_check(
    graph: &MetricGraph,
    channel: &impl StepChannel,
    inputs_per_step: usize,
    p: f64,
    steps: usize,
) -> Result<f64, SolveError> {
    let ring = crate::scalar::F64Ring::new(p);
    let phi = phi_matrix(graph, &ring, channel);
    let pinf = stationary(&ring, graph, &phi)?;
    let ws = assemble(&ring, graph, channel, inputs_per_step);
    let mut e_l = Vec::with_capacity(ws.dim());
    for _ in 0..ws.sigma {
        e_l.extend(pinf.iter().cloned());
    }
    let drive = ws.b_mat.vec_mul(&ring, &e_l);
    let m = ws.m;
    let mut w = vec![0.0f64; ws.dim()];
    let mut prev_block0 = 0.0f64;
    let mut tail_sum = 0.0f64;
    let mut tail_n = 0usize;
    let tail_start = steps / 2;
    for t in 0..steps {
        let mut next = ws.a.vec_mul(&ring, &w);
        for (n, d) in next.iter_mut().zip(&drive) {
            *n += d;
        }
        w = next;
        let block0: f64 = w[..m].iter().sum();
        if t >= tail_start {
            tail_sum += block0 - prev_block0;
            tail_n += 1;
        }
        prev_block0 = block0;
    }
    Ok(tail_sum / tail_n as f64 / inputs_per_step as f64)
}
