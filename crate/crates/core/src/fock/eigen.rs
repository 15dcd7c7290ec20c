use nalgebra::{DMatrix, SymmetricEigen};

use super::sparse::SparseHermitian;
use crate::error::{Error, Result};
use crate::oscillator::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub vector: Vec<C64>,
    /// ‖Hψ − Eψ‖ / ‖H‖-bound.
    pub residual: f64,
    pub iterations: usize,
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn normalize(x: &mut [C64]) {
    let n = norm(x);
    x.iter_mut().for_each(|z| *z /= n);
}

fn residual(h: &SparseHermitian, e: f64, v: &[C64], scale: f64) -> f64 {
    let hv = h.matvec(v);
    let r: Vec<C64> = hv.iter().zip(v).map(|(a, b)| a - b * e).collect();
    norm(&r) / scale
}

fn start_vector(h: &SparseHermitian) -> Vec<C64> {
    let diag = h.diagonal_values();
    let lowest = (0..h.dim).fold(0, |b, i| if diag[i] < diag[b] { i } else { b });
    let golden = 0.618_033_988_749_894_9;
    let mut v: Vec<C64> = (0..h.dim)
        .map(|i| C64::new(1e-3 * ((i as f64 + 1.0) * golden).sin(), 0.0))
        .collect();
    v[lowest] += 1.0;
    normalize(&mut v);
    v
}

/// Lowest eigenpair by Lanczos with full reorthogonalization and restarts
/// from the current Ritz vector.
pub fn exact_ground_state(h: &SparseHermitian, tol: f64) -> Result<GroundState> {
    let n = h.dim;
    let scale = h.norm_bound().max(f64::MIN_POSITIVE);
    let krylov = n.min(160);
    let mut v0 = start_vector(h);
    let mut total = 0;
    let mut best = (f64::INFINITY, v0.clone(), f64::INFINITY);
    for _restart in 0..50 {
        let mut basis: Vec<Vec<C64>> = vec![v0.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..krylov {
            total += 1;
            let mut w = h.matvec(&basis[j]);
            alpha.push(dot(&basis[j], &w).re);
            for _pass in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= y * c);
                }
            }
            let bnorm = norm(&w);
            if j + 1 == krylov || bnorm <= 1e-14 * scale {
                break;
            }
            beta.push(bnorm);
            w.iter_mut().for_each(|z| *z /= bnorm);
            basis.push(w);
        }
        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let imin = eig.eigenvalues.imin();
        let energy = eig.eigenvalues[imin];
        let mut v = vec![C64::new(0.0, 0.0); n];
        for (i, b) in basis.iter().take(m).enumerate() {
            let c = eig.eigenvectors[(i, imin)];
            v.iter_mut().zip(b).for_each(|(x, y)| *x += y * c);
        }
        normalize(&mut v);
        let res = residual(h, energy, &v, scale);
        if res < best.2 {
            best = (energy, v.clone(), res);
        }
        if res <= tol {
            return Ok(GroundState { energy, vector: v, residual: res, iterations: total });
        }
        v0 = v;
    }
    Err(Error::EigenNotConverged { residual: best.2, iterations: total })
}

/// Lowest eigenpair by dense Hermitian diagonalization.
pub fn dense_ground_state(h: &SparseHermitian) -> GroundState {
    let eig = SymmetricEigen::new(h.to_dense());
    let imin = eig.eigenvalues.imin();
    let vector: Vec<C64> = eig.eigenvectors.column(imin).iter().copied().collect();
    let scale = h.norm_bound().max(f64::MIN_POSITIVE);
    let energy = eig.eigenvalues[imin];
    GroundState {
        residual: residual(h, energy, &vector, scale),
        energy,
        vector,
        iterations: 0,
    }
}

/// All eigenvalues in ascending order.
pub fn dense_spectrum(h: &SparseHermitian) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(h.to_dense()).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}
