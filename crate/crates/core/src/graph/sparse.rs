use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Symmetric adjacency in compressed sparse row form.
///
/// Column indices within a row are strictly increasing, every stored entry
/// `(i, j)` has a mirror `(j, i)` with the same weight, and the diagonal is
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseAdjacency {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    weights: Vec<f64>,
}

impl SparseAdjacency {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            indptr: vec![0; n + 1],
            indices: Vec::new(),
            weights: Vec::new(),
        }
    }

    /// Builds an adjacency from undirected weighted pairs.
    ///
    /// Each pair is mirrored. Self-loops and zero weights are dropped; when a
    /// pair repeats, the last weight wins.
    pub fn from_undirected<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, w) in pairs {
            if i >= n || j >= n {
                return Err(Error::Index(format!("pair ({i}, {j}) with n = {n}")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::Domain(format!("edge ({i}, {j}) has weight {w}")));
            }
            if i == j {
                continue;
            }
            rows[i].push((j, w));
            rows[j].push((i, w));
        }
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut weights = Vec::new();
        indptr.push(0);
        for mut row in rows {
            // stable sort keeps insertion order among duplicates, so the last one wins
            row.sort_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let mut last = k;
                while last + 1 < row.len() && row[last + 1].0 == row[k].0 {
                    last += 1;
                }
                let (j, w) = row[last];
                if w != 0.0 {
                    indices.push(j);
                    weights.push(w);
                }
                k = last + 1;
            }
            indptr.push(indices.len());
        }
        Ok(Self {
            n,
            indptr,
            indices,
            weights,
        })
    }

    /// Reads the strict upper triangle of a dense symmetric matrix.
    pub fn from_dense(a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::shape("adjacency", "square", format!("{}x{}", a.nrows(), a.ncols())));
        }
        let n = a.nrows();
        let mut pairs = Vec::new();
        for j in 0..n {
            for i in 0..j {
                let w = a[(i, j)];
                if w != 0.0 {
                    pairs.push((i, j, w));
                }
            }
        }
        Self::from_undirected(n, pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored (directed) entries, i.e. twice the undirected edge count.
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.indices.len() / 2
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.weights[span].iter().copied())
    }

    pub fn degree(&self, i: usize) -> usize {
        self.indptr[i + 1] - self.indptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.indptr[i]..self.indptr[i + 1];
        match self.indices[span.clone()].binary_search(&j) {
            Ok(pos) => self.weights[span.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.get(i, j) != 0.0
    }

    /// Undirected edges `(i, j, w)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.row(i)
                .filter(move |&(j, _)| j > i)
                .map(move |(j, w)| (i, j, w))
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, w) in self.row(i) {
                a[(i, j)] = w;
            }
        }
        a
    }

    /// Induced subgraph on `keep` (in the given order).
    pub fn subgraph(&self, keep: &[usize]) -> Self {
        let mut remap = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let pairs = self
            .edges()
            .filter(|&(i, j, _)| remap[i] != usize::MAX && remap[j] != usize::MAX)
            .map(|(i, j, w)| (remap[i], remap[j], w))
            .collect::<Vec<_>>();
        Self::from_undirected(keep.len(), pairs).expect("remapped indices are in range")
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, w)| self.get(j, i) == w))
    }
}
