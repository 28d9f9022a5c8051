//! Sparse matrices over a scalar ring, dense Gaussian elimination with
//! backend-aware pivoting, strongly connected components, and the damped
//! power iteration used by the numeric backend.

use crate::scalar::Ring;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("singular linear system")]
    Singular,
    #[error("non-unique stationary eigenvector (nullspace dimension {0})")]
    NonUniqueEigenvector(usize),
    #[error("series precision exhausted during elimination")]
    PrecisionExhausted,
    #[error("power iteration did not converge after {0} iterations (residual {1:.3e})")]
    NoConvergence(usize, f64),
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
pub struct SparseMat<E> {
    pub rows: usize,
    pub cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub vals: Vec<E>,
}

impl<E: Clone> SparseMat<E> {
    /// Builds from unordered triplets, merging duplicates with ring addition.
    pub fn from_triplets<R>(
        ring: &R,
        rows: usize,
        cols: usize,
        mut trips: Vec<(u32, u32, E)>,
    ) -> Self
    where
        R: Ring<Elem = E>,
    {
        trips.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::new();
        let mut vals: Vec<E> = Vec::new();
        let mut i = 0;
        while i < trips.len() {
            let (r, c, mut v) = trips[i].clone();
            let mut j = i + 1;
            while j < trips.len() && trips[j].0 == r && trips[j].1 == c {
                v = ring.add(&v, &trips[j].2);
                j += 1;
            }
            if !ring.is_zero(&v) {
                row_ptr[r as usize + 1] += 1;
                col_idx.push(c);
                vals.push(v);
            }
            i = j;
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseMat {
            rows,
            cols,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, &E)> {
        self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]]
            .iter()
            .map(|&c| c as usize)
            .zip(&self.vals[self.row_ptr[r]..self.row_ptr[r + 1]])
    }

    /// `y = A x` (column vector on the right).
    pub fn mul_vec<R: Ring<Elem = E>>(&self, ring: &R, x: &[E]) -> Vec<E> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = ring.zero();
                for (c, v) in self.row(r) {
                    acc = ring.add(&acc, &ring.mul(v, &x[c]));
                }
                acc
            })
            .collect()
    }

    /// `y = x A` (row vector on the left).
    pub fn vec_mul<R: Ring<Elem = E>>(&self, ring: &R, x: &[E]) -> Vec<E> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![ring.zero(); self.cols];
        for r in 0..self.rows {
            if ring.is_zero(&x[r]) {
                continue;
            }
            for (c, v) in self.row(r) {
                y[c] = ring.add(&y[c], &ring.mul(&x[r], v));
            }
        }
        y
    }

    pub fn to_dense<R: Ring<Elem = E>>(&self, ring: &R) -> Vec<Vec<E>> {
        let mut out = vec![vec![ring.zero(); self.cols]; self.rows];
        for r in 0..self.rows {
            for (c, v) in self.row(r) {
                out[r][c] = v.clone();
            }
        }
        out
    }

    /// Restriction to the given index set (same set on rows and columns).
    pub fn submatrix(&self, keep: &[usize]) -> SparseMat<E> {
        let mut pos = vec![u32::MAX; self.cols];
        for (new, &old) in keep.iter().enumerate() {
            pos[old] = new as u32;
        }
        let mut row_ptr = vec![0usize; keep.len() + 1];
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        for (new_r, &old_r) in keep.iter().enumerate() {
            for (c, v) in self.row(old_r) {
                if pos[c] != u32::MAX {
                    col_idx.push(pos[c]);
                    vals.push(v.clone());
                }
            }
            row_ptr[new_r + 1] = col_idx.len();
        }
        SparseMat {
            rows: keep.len(),
            cols: keep.len(),
            row_ptr,
            col_idx,
            vals,
        }
    }
}

/// Solves `M x = rhs` by Gaussian elimination with backend-aware pivoting.
pub fn solve_dense<R: Ring>(
    ring: &R,
    mut m: Vec<Vec<R::Elem>>,
    mut rhs: Vec<R::Elem>,
) -> Result<Vec<R::Elem>, LinalgError> {
    let n = m.len();
    assert_eq!(rhs.len(), n);
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let pivot = (col..n)
            .filter_map(|r| ring.pivot_score(&m[perm[r]][col]).map(|s| (r, s)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(r, _)| r)
            .ok_or(LinalgError::Singular)?;
        perm.swap(col, pivot);
        let prow = perm[col];
        for r in (col + 1)..n {
            let row = perm[r];
            if ring.is_zero(&m[row][col]) {
                continue;
            }
            let factor = ring
                .div(&m[row][col], &m[prow][col])
                .map_err(|_| LinalgError::PrecisionExhausted)?;
            for c in col..n {
                let delta = ring.mul(&factor, &m[prow][c]);
                m[row][c] = ring.sub(&m[row][c], &delta);
            }
            let delta = ring.mul(&factor, &rhs[prow]);
            rhs[row] = ring.sub(&rhs[row], &delta);
        }
    }
    let mut x = vec![ring.zero(); n];
    for col in (0..n).rev() {
        let prow = perm[col];
        let mut acc = rhs[prow].clone();
        for c in (col + 1)..n {
            let delta = ring.mul(&m[prow][c], &x[c]);
            acc = ring.sub(&acc, &delta);
        }
        x[col] = ring
            .div(&acc, &m[prow][col])
            .map_err(|_| LinalgError::PrecisionExhausted)?;
    }
    Ok(x)
}

/// Computes the one-dimensional nullspace of `M` (square).
///
/// Row-reduces with backend-aware pivoting; exactly one free column must
/// remain, otherwise the eigenvector is not unique and an error is returned.
pub fn nullspace_dim1<R: Ring>(
    ring: &R,
    mut m: Vec<Vec<R::Elem>>,
) -> Result<Vec<R::Elem>, LinalgError> {
    let n = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    for col in 0..n {
        let pivot = (0..n)
            .filter(|&r| !used[r])
            .filter_map(|r| ring.pivot_score(&m[r][col]).map(|s| (r, s)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(r, _)| r);
        let prow = match pivot {
            Some(r) => r,
            None => continue, // free column
        };
        used[prow] = true;
        pivot_of_col[col] = Some(prow);
        for r in 0..n {
            if r == prow || ring.is_zero(&m[r][col]) {
                continue;
            }
            let factor = ring
                .div(&m[r][col], &m[prow][col])
                .map_err(|_| LinalgError::PrecisionExhausted)?;
            for c in col..n {
                let delta = ring.mul(&factor, &m[prow][c]);
                m[r][c] = ring.sub(&m[r][c], &delta);
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|&c| pivot_of_col[c].is_none()).collect();
    if free.len() != 1 {
        return Err(LinalgError::NonUniqueEigenvector(free.len()));
    }
    let fc = free[0];
    let mut x = vec![ring.zero(); n];
    x[fc] = ring.one();
    for col in 0..n {
        if let Some(prow) = pivot_of_col[col] {
            // m[prow][col] * x[col] + m[prow][fc] * 1 = 0
            let val = ring
                .div(&m[prow][fc], &m[prow][col])
                .map_err(|_| LinalgError::PrecisionExhausted)?;
            x[col] = ring.neg(&val);
        }
    }
    Ok(x)
}

/// Nullspace vector of `M` normalized so its components sum to one.
///
/// Replaces one (redundant) row of `M` with all-ones and solves the resulting
/// square system. Unlike extracting a nullspace basis directly, the solution
/// of the patched system is the sum-normalized vector itself; for the series
/// backend this matters because the sum-one eigenvectors arising here are
/// regular at p = 0, while a "free component = 1" scaling can hide a pole
/// that truncated division cannot represent. The eigen equation is verified
/// on the original matrix afterwards, which also rejects nullspaces of
/// dimension other than one.
pub fn nullspace_sum_one<R: Ring>(
    ring: &R,
    m: &[Vec<R::Elem>],
) -> Result<Vec<R::Elem>, LinalgError> {
    let n = m.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    for k in 0..n {
        let mut sys = m.to_vec();
        sys[k] = vec![ring.one(); n];
        let mut rhs = vec![ring.zero(); n];
        rhs[k] = ring.one();
        match solve_dense(ring, sys, rhs) {
            Ok(x) => {
                for row in m {
                    let mut acc = ring.zero();
                    for (c, v) in row.iter().enumerate() {
                        if !ring.is_zero(v) {
                            acc = ring.add(&acc, &ring.mul(v, &x[c]));
                        }
                    }
                    if !ring.is_zero(&acc) {
                        // The patched system had a solution that does not lie
                        // in the nullspace: the nullspace is trivial.
                        return Err(LinalgError::NonUniqueEigenvector(0));
                    }
                }
                return Ok(x);
            }
            Err(LinalgError::Singular) => continue,
            Err(e) => return Err(e),
        }
    }
    // Every patched system singular: nullspace dimension at least two.
    Err(LinalgError::NonUniqueEigenvector(2))
}

/// Tarjan's strongly connected components on an adjacency-list graph.
/// Components are returned in reverse topological order.
pub fn tarjan_scc(n: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<usize>,
        lowlink: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next_index: usize,
        comps: Vec<Vec<usize>>,
    }
    const UNSET: usize = usize::MAX;
    let mut st = State {
        adj,
        index: vec![UNSET; n],
        lowlink: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next_index: 0,
        comps: Vec::new(),
    };
    // Iterative DFS; the closure state spaces can hold millions of nodes.
    for root in 0..n {
        if st.index[root] != UNSET {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        while !call.is_empty() {
            let (v, ei) = *call.last().unwrap();
            if ei == 0 {
                st.index[v] = st.next_index;
                st.lowlink[v] = st.next_index;
                st.next_index += 1;
                st.stack.push(v);
                st.on_stack[v] = true;
            }
            if ei < st.adj[v].len() {
                call.last_mut().unwrap().1 += 1;
                let w = st.adj[v][ei];
                if st.index[w] == UNSET {
                    call.push((w, 0));
                } else if st.on_stack[w] {
                    st.lowlink[v] = st.lowlink[v].min(st.index[w]);
                }
            } else {
                if st.lowlink[v] == st.index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = st.stack.pop().unwrap();
                        st.on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    st.comps.push(comp);
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    st.lowlink[parent] = st.lowlink[parent].min(st.lowlink[v]);
                }
            }
        }
    }
    st.comps
}

/// Damped power iteration `x <- (A x + x) / 2` for the eigenvalue-1 right
/// eigenvector of a nonnegative matrix with spectral radius one. Damping
/// removes oscillation when the underlying chain is periodic.
pub fn power_iteration_right(
    a: &SparseMat<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, LinalgError> {
    power_iteration(a, tol, max_iter, false)
}

/// Damped power iteration on the left: `x <- (x A + x) / 2`.
pub fn power_iteration_left(
    a: &SparseMat<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, LinalgError> {
    power_iteration(a, tol, max_iter, true)
}

fn power_iteration(
    a: &SparseMat<f64>,
    tol: f64,
    max_iter: usize,
    left: bool,
) -> Result<Vec<f64>, LinalgError> {
    let ring = crate::scalar::F64Ring::new(0.0);
    let n = if left { a.rows } else { a.cols };
    let mut x = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let ax = if left {
            a.vec_mul(&ring, &x)
        } else {
            a.mul_vec(&ring, &x)
        };
        residual = 0.0;
        let mut norm = 0.0f64;
        for (xi, axi) in x.iter().zip(&ax) {
            residual = residual.max((axi - xi).abs());
            norm = norm.max(xi.abs());
        }
        if norm == 0.0 {
            return Err(LinalgError::Singular);
        }
        if residual <= tol * norm {
            return Ok(x);
        }
        let scale = 1.0 / norm;
        for (xi, axi) in x.iter_mut().zip(&ax) {
            *xi = 0.5 * (*xi + axi) * scale;
        }
    }
    Err(LinalgError::NoConvergence(max_iter, residual))
}
