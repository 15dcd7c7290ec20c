use super::sparse::SparseHermitian;
use crate::error::{Error, Result};
use crate::oscillator::C64;

/// Rayleigh–Schrödinger ground state split by order in W, with the standard
/// normalization (⟨Ψ|Ψ⟩ = 1 + O(W³)).
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedState {
    pub orders: [Vec<C64>; 3],
}

/// `h0` holds the unperturbed energies; `ground` indexes the reference state.
/// States within `gap_tol` of the reference energy are reported as degenerate.
pub fn perturbative_ground_state(
    h0: &[f64],
    w: &SparseHermitian,
    ground: usize,
    gap_tol: f64,
    label: impl Fn(usize) -> String,
) -> Result<PerturbedState> {
    let n = h0.len();
    let eg = h0[ground];
    for (i, &e) in h0.iter().enumerate() {
        if i != ground && (eg - e).abs() <= gap_tol {
            return Err(Error::DegenerateDenominator {
                reference: label(ground),
                other: label(i),
                gap: eg - e,
            });
        }
    }
    let inv = |i: usize| if i == ground { C64::new(0.0, 0.0) } else { C64::new(1.0 / (eg - h0[i]), 0.0) };
    let mut psi0 = vec![C64::new(0.0, 0.0); n];
    psi0[ground] = C64::new(1.0, 0.0);
    let w0 = w.matvec(&psi0);
    let e1 = w0[ground];
    let psi1: Vec<C64> = (0..n).map(|i| w0[i] * inv(i)).collect();
    let w1 = w.matvec(&psi1);
    let mut psi2: Vec<C64> = (0..n).map(|i| (w1[i] - e1 * psi1[i]) * inv(i)).collect();
    psi2[ground] = C64::new(-0.5 * psi1.iter().map(|z| z.norm_sqr()).sum::<f64>(), 0.0);
    Ok(PerturbedState { orders: [psi0, psi1, psi2] })
}

impl PerturbedState {
    /// ⟨V⟩ by order, for V = v0 + v1 with v1 of first order in the coupling.
    pub fn expectation(&self, v0: &SparseHermitian, v1: &SparseHermitian) -> [f64; 3] {
        let [p0, p1, p2] = &self.orders;
        [
            v0.sandwich(p0, p0).re,
            2.0 * v0.sandwich(p0, p1).re + v1.sandwich(p0, p0).re,
            v0.sandwich(p1, p1).re + 2.0 * v0.sandwich(p0, p2).re + 2.0 * v1.sandwich(p0, p1).re,
        ]
    }
}
