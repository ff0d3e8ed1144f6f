use serde::{Deserialize, Serialize};

/// Sparse vector with sorted, unique indices.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    pub dim: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            entries: Vec::new(),
        }
    }

    /// Drops exact zeros from a dense slice.
    pub fn from_dense(values: &[f64]) -> Self {
        SparseVector {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, &v)| (i, v))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&(_, v)| v == 0.0)
    }
}

/// Row-major compressed sparse matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsrMatrix {
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(n_cols: usize) -> Self {
        CsrMatrix {
            n_cols,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut m = CsrMatrix::new(n_cols);
        for r in rows {
            assert_eq!(r.len(), n_cols, "ragged dense rows");
            m.push_dense(r);
        }
        m
    }

    pub fn from_sparse_rows(n_cols: usize, rows: &[SparseVector]) -> Self {
        let mut m = CsrMatrix::new(n_cols);
        for r in rows {
            m.push_sparse(r);
        }
        m
    }

    pub fn push_dense(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.n_cols);
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                self.indices.push(j as u32);
                self.values.push(v);
            }
        }
        self.indptr.push(self.indices.len());
    }

    pub fn push_sparse(&mut self, row: &SparseVector) {
        assert_eq!(row.dim, self.n_cols, "row width mismatch");
        for &(j, v) in &row.entries {
            if v != 0.0 {
                self.indices.push(j as u32);
                self.values.push(v);
            }
        }
        self.indptr.push(self.indices.len());
    }

    pub fn n_rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn row_dot(&self, i: usize, w: &[f64]) -> f64 {
        let (idx, vals) = self.row(i);
        idx.iter().zip(vals).map(|(&j, v)| v * w[j as usize]).sum()
    }

    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        let (idx, vals) = self.row(i);
        for (&j, &v) in idx.iter().zip(vals) {
            out[j as usize] = v;
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> CsrMatrix {
        let mut m = CsrMatrix::new(self.n_cols);
        for &i in rows {
            let (idx, vals) = self.row(i);
            m.indices.extend_from_slice(idx);
            m.values.extend_from_slice(vals);
            m.indptr.push(m.indices.len());
        }
        m
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Column-major dense copy, used by tree training.
    pub fn to_columns(&self) -> Vec<Vec<f64>> {
        let n = self.n_rows();
        let mut cols = vec![vec![0.0; n]; self.n_cols];
        for i in 0..n {
            let (idx, vals) = self.row(i);
            for (&j, &v) in idx.iter().zip(vals) {
                cols[j as usize][i] = v;
            }
        }
        cols
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_round_trip_and_select() {
        let rows = vec![
            vec![0.0, 1.5, 0.0],
            vec![2.0, 0.0, -1.0],
            vec![0.0, 0.0, 0.0],
        ];
        let m = CsrMatrix::from_dense(&rows);
        assert_eq!(m.n_rows(), 3);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(&m.dense_row(i), r);
        }
        let s = m.select_rows(&[2, 1]);
        assert_eq!(s.dense_row(1), rows[1]);
        assert_eq!(s.row_dot(1, &[1.0, 1.0, 1.0]), 1.0);
        assert_eq!(m.to_columns()[2], vec![0.0, -1.0, 0.0]);
    }

    #[test]
    fn sparse_vector_helpers() {
        let v = SparseVector::from_dense(&[0.0, 3.0, 4.0]);
        assert_eq!(v.entries, vec![(1, 3.0), (2, 4.0)]);
        assert_eq!(v.norm(), 5.0);
        assert_eq!(v.to_dense(), vec![0.0, 3.0, 4.0]);
    }
}
