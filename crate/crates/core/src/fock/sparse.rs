use nalgebra::DMatrix;

use crate::oscillator::C64;

/// Row-compressed Hermitian matrix; both triangles are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    pub dim: usize,
    pub rows: Vec<Vec<(usize, C64)>>,
}

impl SparseHermitian {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            dim: values.len(),
            rows: values.iter().enumerate().map(|(i, &v)| vec![(i, C64::new(v, 0.0))]).collect(),
        }
    }

    /// Adds `z` at (i, j) and its conjugate at (j, i); on the diagonal `z` must be real.
    pub fn add_pair(&mut self, i: usize, j: usize, z: C64) {
        if i == j {
            self.rows[i].push((i, C64::new(z.re, 0.0)));
        } else {
            self.rows[i].push((j, z));
            self.rows[j].push((i, z.conj()));
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, z)| z * x[j]).sum())
            .collect()
    }

    /// ⟨x|A|y⟩.
    pub fn sandwich(&self, x: &[C64], y: &[C64]) -> C64 {
        let ay = self.matvec(y);
        x.iter().zip(&ay).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            rows: self.rows.iter().map(|r| r.iter().map(|&(j, z)| (j, z * s)).collect()).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (r, o) in out.rows.iter_mut().zip(&other.rows) {
            r.extend_from_slice(o);
        }
        out
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|(_, z)| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, z) in row {
                m[(i, j)] += z;
            }
        }
        m
    }

    pub fn diagonal_values(&self) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().filter(|(j, _)| *j == i).map(|(_, z)| z.re).sum())
            .collect()
    }

    /// The matrix with its diagonal removed.
    pub fn off_diagonal(&self) -> Self {
        Self {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().filter(|(j, _)| *j != i).copied().collect())
                .collect(),
        }
    }
}
