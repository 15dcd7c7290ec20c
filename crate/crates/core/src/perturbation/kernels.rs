//! Per-mode kernels in the frame x' = ε, y' = k̂×ε, z' = k̂, where plane-wave
//! elements from the ground state touch only the z' axis.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::oscillator::{plane_wave_1d, C64};
use crate::system::Vec3;

/// ⟨0|e^{iqz}|n⟩, ⟨0|z e^{iqz}|n⟩ and ⟨1|e^{iqz}|n⟩ for n = 0..len along one axis.
#[derive(Debug, Clone)]
pub(crate) struct AxisArrays {
    pub ground: Vec<C64>,
    pub z_ground: Vec<C64>,
    pub first: Vec<C64>,
}

impl AxisArrays {
    pub fn new(q_sigma: f64, sigma: f64, len: usize) -> Self {
        let ground: Vec<C64> = (0..len).map(|n| plane_wave_1d(q_sigma, 0, n)).collect();
        let first: Vec<C64> = (0..len).map(|n| plane_wave_1d(q_sigma, 1, n)).collect();
        let z_ground = first.iter().map(|v| v * (sigma * FRAC_1_SQRT_2)).collect();
        Self {
            ground,
            z_ground,
            first,
        }
    }
}

/// Absorption vertex of one particle, c + a·r + b·p, with frame components.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Vertex {
    pub c: f64,
    pub a: [f64; 3],
    pub b: [f64; 3],
    /// Phase q_i·r₀ from the displaced origin.
    pub phase: f64,
}

/// Vectors needed to build both vertices for one (k̂, ε).
#[derive(Debug, Clone, Copy)]
pub(crate) struct ModeInputs {
    pub m1: f64,
    pub m2: f64,
    pub e_charge: f64,
    pub b0: Vec3,
    pub r0: Vec3,
    pub p0: Vec3,
    pub q0: Vec3,
}

impl ModeInputs {
    /// Vertices of particles 1 and 2; `q` holds the signed wavevectors along k̂.
    pub fn vertices(&self, khat: &Vec3, eps: &Vec3, q: [f64; 2]) -> [Vertex; 2] {
        let m = self.m1 + self.m2;
        let e = self.e_charge;
        let bxr0 = self.b0.cross(&self.r0);
        let exb = eps.cross(&self.b0);
        let frame = [*eps, khat.cross(eps), *khat];
        let comps = |v: &Vec3| [frame[0].dot(v), frame[1].dot(v), frame[2].dot(v)];
        let w1 = bxr0 * (e / self.m1) - self.q0 / m + self.p0 / self.m1;
        let w2 = -bxr0 * (e / self.m2) + self.q0 / m + self.p0 / self.m2;
        let kr0 = khat.dot(&self.r0);
        let make = |w: Vec3, a: Vec3, mass: f64, qi: f64| Vertex {
            c: eps.dot(&w),
            a: comps(&a),
            b: comps(&(-eps / mass)),
            phase: qi * kr0,
        };
        [
            make(w1, exb * (e / self.m1), self.m1, q[0]),
            make(w2, -exb * (e / self.m2), self.m2, q[1]),
        ]
    }
}

/// ⟨1|p|0⟩ in units of ħ/σ.
const P10: C64 = C64::new(0.0, FRAC_1_SQRT_2);

/// ⟨0| Ωᵢ |l⟩ for l = (0,0,n), (1,0,n), (0,1,n), n < len.
pub(crate) fn ground_row(v: &Vertex, arr: &AxisArrays, sigma: f64, hbar: f64) -> [Vec<C64>; 3] {
    let ph = C64::from_polar(1.0, v.phase);
    let pu = hbar / sigma;
    let side = |j: usize| ph * (v.a[j] * sigma * FRAC_1_SQRT_2 + P10.conj() * (v.b[j] * pu));
    let (sx, sy) = (side(0), side(1));
    let mut rows = [Vec::new(), Vec::new(), Vec::new()];
    for n in 0..arr.ground.len() {
        rows[0].push(ph * (arr.ground[n] * v.c + arr.z_ground[n] * v.a[2]));
        rows[1].push(sx * arr.ground[n]);
        rows[2].push(sy * arr.ground[n]);
    }
    rows
}

/// ⟨1_{x'}|Ωᵢ|s⟩ and ⟨1_{z'}|Ωᵢ|s⟩ for s = (0,0,n), (1,0,n); requires a = 0.
pub(crate) fn excited_rows(v: &Vertex, arr: &AxisArrays, sigma: f64, hbar: f64) -> [[Vec<C64>; 2]; 2] {
    debug_assert!(v.a.iter().all(|x| *x == 0.0));
    let ph = C64::from_polar(1.0, v.phase);
    let px = P10 * (v.b[0] * hbar / sigma);
    let len = arr.ground.len();
    let mut x_rows = [Vec::with_capacity(len), Vec::with_capacity(len)];
    let mut z_rows = [Vec::with_capacity(len), Vec::with_capacity(len)];
    for n in 0..len {
        x_rows[0].push(ph * px * arr.ground[n]);
        x_rows[1].push(ph * arr.ground[n] * v.c);
        z_rows[0].push(ph * arr.first[n] * v.c);
        z_rows[1].push(ph * px.conj() * arr.first[n]);
    }
    [x_rows, z_rows]
}

/// Energy denominators −(E₀ − E): shell·ħω₀ + photon and recoil energy.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Denominator {
    pub hbar_omega0: f64,
    pub photon: f64,
}

impl Denominator {
    pub fn at(&self, shell: usize) -> f64 {
        shell as f64 * self.hbar_omega0 + self.photon
    }
}
