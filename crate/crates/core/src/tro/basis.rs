//! Truncated left regular representation on the grid `[-n, n]²`.

use num_complex::Complex64;

use crate::element::Element;
use crate::error::{Error, Result};

/// Row-major numbering of the basis vectors `a_pq`, `p, q ∈ [-n, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndexer {
    n: i64,
}

impl BasisIndexer {
    pub fn new(n: i64) -> Result<Self> {
        if !(0..=4096).contains(&n) {
            return Err(Error::Domain(format!("grid half-width must be in [0, 4096], got {n}")));
        }
        Ok(BasisIndexer { n })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn side(&self) -> usize {
        (2 * self.n + 1) as usize
    }

    pub fn dim(&self) -> usize {
        self.side() * self.side()
    }

    pub fn on_grid(&self, e: Element) -> bool {
        e.i.abs() <= self.n && e.j.abs() <= self.n
    }

    pub fn index(&self, e: Element) -> Option<usize> {
        self.on_grid(e)
            .then(|| ((e.i + self.n) as usize) * self.side() + (e.j + self.n) as usize)
    }

    pub fn label(&self, idx: usize) -> Element {
        let s = self.side();
        Element::new((idx / s) as i64 - self.n, (idx % s) as i64 - self.n)
    }
}

/// Image of the basis vector `y` under `π(x)` on all of `ℓ²(E)`:
/// `a_pq ↦ a_{i+p-j, q}` when `p >= j`, else zero.
pub fn act(x: Element, y: Element) -> Option<Element> {
    (y.i >= x.j).then(|| Element::new(x.i + y.i - x.j, y.j))
}

/// A 0/1 matrix with at most one nonzero per column, stored as
/// `(target, source)` index pairs sorted by source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseOperator {
    pub indexer: BasisIndexer,
    pub entries: Vec<(usize, usize)>,
}

impl SparseOperator {
    /// The target of column `source`, if that column is nonzero.
    pub fn image(&self, source: usize) -> Option<usize> {
        self.entries
            .binary_search_by_key(&source, |&(_, s)| s)
            .ok()
            .map(|k| self.entries[k].0)
    }

    /// The transpose, which is also the adjoint for a real 0/1 pattern.
    pub fn transpose(&self) -> SparseOperator {
        let mut entries: Vec<(usize, usize)> = self.entries.iter().map(|&(t, s)| (s, t)).collect();
        entries.sort_by_key(|&(_, s)| s);
        SparseOperator { indexer: self.indexer, entries }
    }

    /// `self · other` as a composition of partial maps.
    pub fn compose(&self, other: &SparseOperator) -> SparseOperator {
        let entries = other
            .entries
            .iter()
            .filter_map(|&(mid, s)| self.image(mid).map(|t| (t, s)))
            .collect();
        SparseOperator { indexer: self.indexer, entries }
    }

    pub fn to_matrix(&self) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(self.indexer.dim());
        for &(t, s) in &self.entries {
            m.cols[s].push((t, Complex64::new(1.0, 0.0)));
        }
        m
    }
}

/// Truncated `π(x)` without any restriction on `x`.
pub(crate) fn truncated_rep(x: Element, indexer: BasisIndexer) -> SparseOperator {
    let entries = (0..indexer.dim())
        .filter_map(|s| {
            let img = act(x, indexer.label(s))?;
            indexer.index(img).map(|t| (t, s))
        })
        .collect();
    SparseOperator { indexer, entries }
}

/// `π(x)` compressed to the grid of half-width `n`: images leaving the grid
/// are dropped.
pub fn rep_matrix(x: Element, n: i64) -> Result<SparseOperator> {
    let indexer = BasisIndexer::new(n)?;
    if !indexer.on_grid(x) {
        return Err(Error::Range(format!("{x} lies outside the grid [-{n}, {n}]²")));
    }
    Ok(truncated_rep(x, indexer))
}

/// Complex sparse matrix stored by columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub dim: usize,
    pub cols: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix { dim, cols: vec![Vec::new(); dim] }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// Adds `coeff · op`, merging entries that share a position.
    pub fn add_scaled(&mut self, coeff: Complex64, op: &SparseOperator) {
        for &(t, s) in &op.entries {
            let col = &mut self.cols[s];
            match col.iter_mut().find(|(r, _)| *r == t) {
                Some((_, v)) => *v += coeff,
                None => col.push((t, coeff)),
            }
        }
    }

    /// `out = A x`.
    pub fn mul_vec(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (c, col) in self.cols.iter().enumerate() {
            let xc = x[c];
            if xc.re == 0.0 && xc.im == 0.0 {
                continue;
            }
            for &(r, v) in col {
                out[r] += v * xc;
            }
        }
    }

    /// `out = A* y`.
    pub fn adjoint_mul_vec(&self, y: &[Complex64], out: &mut [Complex64]) {
        for (c, col) in self.cols.iter().enumerate() {
            out[c] = col.iter().map(|&(r, v)| v.conj() * y[r]).sum();
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut d = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                d[(r, c)] += v;
            }
        }
        d
    }
}
