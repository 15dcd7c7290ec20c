//! Matrix elements of the isotropic 3D harmonic oscillator between Fock
//! levels: plane waves e^{iq·r}, position, momentum, and the products
//! x_j·e^{iq·r}, p_j·e^{iq·r} needed to assemble the vacuum coupling.
//!
//! Ladder convention: x = σ(a + a†)/√2, p = iħ(a† − a)/(σ√2), a|n⟩ = √n|n−1⟩.

pub mod oracle;

use nalgebra::Complex;
use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::system::{OscillatorSystem, Vec3};

pub type C64 = Complex<f64>;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OscLevel {
    pub n: [usize; 3],
}

impl OscLevel {
    pub const GROUND: OscLevel = OscLevel { n: [0, 0, 0] };

    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Self { n: [nx, ny, nz] }
    }

    /// Energy index N = nx + ny + nz.
    pub fn shell(&self) -> usize {
        self.n.iter().sum()
    }

    pub fn single(axis: usize) -> Self {
        let mut n = [0; 3];
        n[axis] = 1;
        Self { n }
    }
}

impl std::fmt::Display for OscLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.n[0], self.n[1], self.n[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscParams {
    pub sigma: f64,
    pub omega0: f64,
    pub mu: f64,
    pub hbar: f64,
}

impl OscParams {
    pub fn new(mu: f64, omega0: f64, hbar: f64) -> Result<Self> {
        ensure_positive("mu", mu)?;
        ensure_positive("omega0", omega0)?;
        ensure_positive("hbar", hbar)?;
        Ok(Self {
            sigma: (hbar / (mu * omega0)).sqrt(),
            omega0,
            mu,
            hbar,
        })
    }

    pub fn from_system(sys: &OscillatorSystem) -> Self {
        Self {
            sigma: sys.sigma(),
            omega0: sys.omega0,
            mu: sys.reduced_mass(),
            hbar: sys.constants.hbar,
        }
    }

    /// Level energy ħω₀(N + 3/2).
    pub fn energy(&self, level: &OscLevel) -> f64 {
        self.hbar * self.omega0 * (level.shell() as f64 + 1.5)
    }

    fn momentum_unit(&self) -> f64 {
        self.hbar / self.sigma
    }
}

/// Generalized Laguerre polynomial L_n^{(a)}(y).
pub fn laguerre(n: usize, a: usize, y: f64) -> f64 {
    let a = a as f64;
    let (mut l0, mut l1) = (1.0, 1.0 + a - y);
    if n == 0 {
        return l0;
    }
    for k in 1..n {
        let k = k as f64;
        let l2 = ((2.0 * k + 1.0 + a - y) * l1 - (k + a) * l0) / (k + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// ⟨m| e^{iκx} |n⟩ in one dimension, with `ks` = κσ.
pub fn plane_wave_1d(ks: f64, m: usize, n: usize) -> C64 {
    let (lo, hi) = if m <= n { (m, n) } else { (n, m) };
    let d = hi - lo;
    let b = ks / std::f64::consts::SQRT_2;
    let y = b * b;
    // β^d √(lo!/hi!) with β = i·b, accumulated term by term
    let mut mag = 1.0;
    for j in 1..=d {
        mag *= b / ((lo + j) as f64).sqrt();
    }
    let phase = match d % 4 {
        0 => C64::new(1.0, 0.0),
        1 => I,
        2 => C64::new(-1.0, 0.0),
        _ => -I,
    };
    phase * (mag * (-0.5 * y).exp() * laguerre(lo, d, y))
}

/// ⟨m| x |n⟩ in units of σ.
pub fn position_1d(m: usize, n: usize) -> f64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    if m + 1 == n {
        s * (n as f64).sqrt()
    } else if m == n + 1 {
        s * (m as f64).sqrt()
    } else {
        0.0
    }
}

/// ⟨m| p |n⟩ in units of ħ/σ.
pub fn momentum_1d(m: usize, n: usize) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    if m == n + 1 {
        I * (s * (m as f64).sqrt())
    } else if m + 1 == n {
        -I * (s * (n as f64).sqrt())
    } else {
        C64::new(0.0, 0.0)
    }
}

/// ⟨m| x e^{iκx} |n⟩ in units of σ (x is tridiagonal, so the sum is exact).
fn x_plane_wave_1d(ks: f64, m: usize, n: usize) -> C64 {
    let mut acc = plane_wave_1d(ks, m + 1, n) * position_1d(m, m + 1);
    if m > 0 {
        acc += plane_wave_1d(ks, m - 1, n) * position_1d(m, m - 1);
    }
    acc
}

/// ⟨m| p e^{iκx} |n⟩ in units of ħ/σ.
fn p_plane_wave_1d(ks: f64, m: usize, n: usize) -> C64 {
    let mut acc = momentum_1d(m, m + 1) * plane_wave_1d(ks, m + 1, n);
    if m > 0 {
        acc += momentum_1d(m, m - 1) * plane_wave_1d(ks, m - 1, n);
    }
    acc
}

/// ⟨l| e^{ik·r} |0⟩.
pub fn plane_wave_element(params: &OscParams, k: &Vec3, l: &OscLevel) -> C64 {
    plane_wave_between(params, k, l, &OscLevel::GROUND)
}

/// ⟨l| e^{iq·r} |s⟩.
pub fn plane_wave_between(params: &OscParams, q: &Vec3, l: &OscLevel, s: &OscLevel) -> C64 {
    (0..3)
        .map(|a| plane_wave_1d(q[a] * params.sigma, l.n[a], s.n[a]))
        .product()
}

fn overlap_1d(m: usize, n: usize) -> f64 {
    if m == n {
        1.0
    } else {
        0.0
    }
}

/// ⟨l| r_axis |s⟩ in metres.
pub fn position_element(params: &OscParams, l: &OscLevel, s: &OscLevel, axis: usize) -> f64 {
    let mut v = params.sigma * position_1d(l.n[axis], s.n[axis]);
    for a in (0..3).filter(|&a| a != axis) {
        v *= overlap_1d(l.n[a], s.n[a]);
    }
    v
}

/// ⟨l| p_axis |s⟩ in kg·m/s.
pub fn momentum_element(params: &OscParams, l: &OscLevel, s: &OscLevel, axis: usize) -> C64 {
    let mut v = momentum_1d(l.n[axis], s.n[axis]) * params.momentum_unit();
    for a in (0..3).filter(|&a| a != axis) {
        v *= overlap_1d(l.n[a], s.n[a]);
    }
    v
}

/// ⟨l|e^{iq·r}|s⟩ together with ⟨l|r_j e^{iq·r}|s⟩ and ⟨l|p_j e^{iq·r}|s⟩ (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveOps {
    pub plain: C64,
    pub r: [C64; 3],
    pub p: [C64; 3],
}

pub fn plane_wave_ops(params: &OscParams, q: &Vec3, l: &OscLevel, s: &OscLevel) -> PlaneWaveOps {
    let mut d = [C64::new(0.0, 0.0); 3];
    let mut xd = d;
    let mut pd = d;
    for a in 0..3 {
        let ks = q[a] * params.sigma;
        d[a] = plane_wave_1d(ks, l.n[a], s.n[a]);
        xd[a] = x_plane_wave_1d(ks, l.n[a], s.n[a]) * params.sigma;
        pd[a] = p_plane_wave_1d(ks, l.n[a], s.n[a]) * params.momentum_unit();
    }
    let mut r = [C64::new(0.0, 0.0); 3];
    let mut p = r;
    for j in 0..3 {
        let others: C64 = (0..3).filter(|&a| a != j).map(|a| d[a]).product();
        r[j] = xd[j] * others;
        p[j] = pd[j] * others;
    }
    PlaneWaveOps {
        plain: d[0] * d[1] * d[2],
        r,
        p,
    }
}

/// Poisson tail bound e^{−y}·y^N/N! with y = k²σ²/2.
pub fn truncation_tail(k_sigma: f64, n_max: usize) -> f64 {
    let y = 0.5 * k_sigma * k_sigma;
    let mut log_t = -y;
    for j in 1..=n_max {
        log_t += y.max(f64::MIN_POSITIVE).ln() - (j as f64).ln();
    }
    if y == 0.0 && n_max > 0 {
        0.0
    } else {
        log_t.exp()
    }
}

/// Smallest shell cut N_max with `truncation_tail` below `bound` (and past the Poisson mode).
pub fn truncation_for(k_sigma: f64, bound: f64) -> usize {
    let y = 0.5 * k_sigma * k_sigma;
    let mut n = y.ceil() as usize;
    while truncation_tail(k_sigma, n) >= bound {
        n += 1;
    }
    n
}

/// Default truncation, tail below 1e-12.
pub fn default_truncation(k_sigma: f64) -> usize {
    truncation_for(k_sigma, 1e-12)
}

pub fn check_truncation(k_sigma: f64, n_max: usize, bound: f64) -> Result<()> {
    let tail = truncation_tail(k_sigma, n_max);
    if tail > bound {
        Err(Error::TruncationTail { n_max, tail, bound })
    } else {
        Ok(())
    }
}

/// All levels with shell N ≤ `n_max`, ordered by shell then lexicographically.
pub fn levels_up_to(n_max: usize) -> Vec<OscLevel> {
    let mut out = Vec::new();
    for shell in 0..=n_max {
        for nx in (0..=shell).rev() {
            for ny in (0..=shell - nx).rev() {
                out.push(OscLevel::new(nx, ny, shell - nx - ny));
            }
        }
    }
    out
}

/// All levels with every axis index ≤ `per_axis`.
pub fn levels_per_axis(per_axis: usize) -> Vec<OscLevel> {
    let mut out = Vec::new();
    for nx in 0..=per_axis {
        for ny in 0..=per_axis {
            for nz in 0..=per_axis {
                out.push(OscLevel::new(nx, ny, nz));
            }
        }
    }
    out.sort_by_key(|l| (l.shell(), std::cmp::Reverse(l.n)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_params() -> OscParams {
        OscParams::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn params_invariant() {
        let s = OscillatorSystem::hydrogen_like(10.0).unwrap();
        let p = OscParams::from_system(&s);
        assert!(((p.sigma * p.sigma * p.mu * p.omega0 - p.hbar) / p.hbar).abs() < 1e-12);
    }

    #[test]
    fn plane_wave_examples() {
        let p = unit_params();
        let g = OscLevel::GROUND;
        assert!((plane_wave_element(&p, &Vec3::zeros(), &g) - 1.0).norm() < 1e-15);
        assert!(plane_wave_element(&p, &Vec3::zeros(), &OscLevel::new(0, 2, 1)).norm() < 1e-15);
        let v = plane_wave_element(&p, &Vec3::new(1.0, 0.0, 0.0), &OscLevel::new(1, 0, 0));
        let expected = I * ((-0.25f64).exp() / 2f64.sqrt());
        assert!((v - expected).norm() < 1e-15);
        assert!((v.im - 0.5507).abs() < 1e-4);
    }

    #[test]
    fn position_and_momentum_examples() {
        let s = OscillatorSystem::hydrogen_like(10.0).unwrap();
        let p = OscParams::from_system(&s);
        let g = OscLevel::GROUND;
        let x1 = OscLevel::new(1, 0, 0);
        let v = position_element(&p, &g, &x1, 0);
        assert!((v - p.sigma / 2f64.sqrt()).abs() < 1e-15 * p.sigma);
        assert_eq!(position_element(&p, &x1, &x1, 0), 0.0);
        assert_eq!(position_element(&p, &g, &OscLevel::new(2, 0, 0), 0), 0.0);
        let m = momentum_element(&p, &g, &x1, 0);
        let expected = -I * (p.hbar / (p.sigma * 2f64.sqrt()));
        assert!((m - expected).norm() < 1e-12 * expected.norm());
        assert_eq!(momentum_element(&p, &x1, &x1, 0), C64::new(0.0, 0.0));
        for (a, b) in [(g, x1), (OscLevel::new(2, 1, 0), OscLevel::new(1, 1, 0))] {
            for ax in 0..3 {
                let u = momentum_element(&p, &a, &b, ax);
                let w = momentum_element(&p, &b, &a, ax);
                assert!((u - w.conj()).norm() <= 1e-15 * u.norm().max(1e-40));
            }
        }
    }

    #[test]
    fn completeness_partial_sums() {
        let p = unit_params();
        for ks in [0.5, 1.0, 2.0] {
            let n_max = truncation_for(ks, 1e-9);
            let k = Vec3::new(ks, 0.0, 0.0) * (0.6f64).sqrt() + Vec3::new(0.0, ks, 0.0) * (0.4f64).sqrt();
            let mut prev = 0.0;
            let mut total = 0.0;
            for shell in 0..=n_max {
                for l in levels_up_to(shell).into_iter().filter(|l| l.shell() == shell) {
                    total += plane_wave_element(&p, &k, &l).norm_sqr();
                }
                assert!(total >= prev);
                prev = total;
            }
            assert!((total - 1.0).abs() < 1e-8, "k sigma {ks}: {total}");
        }
    }

    #[test]
    fn truncation_rule() {
        for ks in [0.0, 0.3, 1.0, 3.0, 6.0] {
            let n = default_truncation(ks);
            assert!(truncation_tail(ks, n) < 1e-12);
            assert!(check_truncation(ks, n, 1e-12).is_ok());
        }
        assert!(matches!(check_truncation(3.0, 1, 1e-12), Err(Error::TruncationTail { .. })));
    }

    #[test]
    fn level_enumeration() {
        let l = levels_up_to(3);
        assert_eq!(l.len(), 20);
        assert_eq!(l[0], OscLevel::GROUND);
        assert_eq!(levels_per_axis(4).len(), 125);
    }

    #[test]
    fn ops_match_tridiagonal_products() {
        // ⟨l|x e^{iqx}|s⟩ = Σ_j ⟨l|x|j⟩⟨j|e^{iqx}|s⟩ with the explicit sum over j
        let p = unit_params();
        let q = Vec3::new(0.7, -0.4, 1.1);
        let l = OscLevel::new(2, 1, 0);
        let s = OscLevel::new(1, 1, 3);
        let ops = plane_wave_ops(&p, &q, &l, &s);
        for ax in 0..3 {
            let mut want = C64::new(0.0, 0.0);
            let mut want_p = C64::new(0.0, 0.0);
            for j in levels_up_to(10) {
                want += plane_wave_between(&p, &q, &j, &s) * position_element(&p, &l, &j, ax);
                want_p += momentum_element(&p, &l, &j, ax) * plane_wave_between(&p, &q, &j, &s);
            }
            assert!((ops.r[ax] - want).norm() < 1e-14);
            assert!((ops.p[ax] - want_p).norm() < 1e-14);
        }
        assert!((ops.plain - plane_wave_between(&p, &q, &l, &s)).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn factorization_and_conjugation(kx in -3.0..3.0f64, ky in -3.0..3.0f64, kz in -3.0..3.0f64,
                                         nx in 0usize..4, ny in 0usize..4, nz in 0usize..4) {
            let p = unit_params();
            let k = Vec3::new(kx, ky, kz);
            let l = OscLevel::new(nx, ny, nz);
            let full = plane_wave_element(&p, &k, &l);
            let prod: C64 = (0..3).map(|a| {
                let mut kk = Vec3::zeros();
                kk[a] = k[a];
                let mut la = OscLevel::GROUND;
                la.n[a] = l.n[a];
                plane_wave_element(&p, &kk, &la)
            }).product();
            prop_assert!((full - prod).norm() < 1e-14);
            prop_assert!((plane_wave_element(&p, &(-k), &l) - full.conj()).norm() < 1e-14);
        }

        #[test]
        fn plane_wave_unitarity_columns(ks in 0.0..2.0f64, n in 0usize..5) {
            // Σ_m |⟨m|D|n⟩|² = 1
            let total: f64 = (0..80).map(|m| plane_wave_1d(ks, m, n).norm_sqr()).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
