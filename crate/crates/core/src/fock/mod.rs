//! Brute-force check of the one-photon-loop momentum: oscillator levels times
//! a few photon modes, diagonalized exactly inside one pseudo-momentum block.

mod compare;
mod eigen;
mod perturbative;
mod sparse;

pub use compare::{compare_engines, EngineComparison};
pub use eigen::{dense_ground_state, dense_spectrum, exact_ground_state, GroundState};
pub use perturbative::{perturbative_ground_state, PerturbedState};
pub use sparse::SparseHermitian;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oscillator::{levels_per_axis, plane_wave_between, position_element, OscLevel, OscParams, C64};
use crate::perturbation::{omega_element, DiscreteMode, OmegaContext};
use crate::system::{displacement_r0, FieldConfig, OscillatorSystem, Vec3};
use crate::vacuum::{polarization_basis, ModeAmplitude};

pub type VectorOperator = [SparseHermitian; 3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedModel {
    /// Per-axis level cut: every nᵢ ≤ osc_nmax.
    pub osc_nmax: usize,
    pub modes: Vec<DiscreteMode>,
    pub max_photons_per_mode: usize,
    /// Pseudo-momentum eigenvalue of the block (zero-point offset excluded).
    pub q0: Vec3,
    /// Multiplies the vacuum charge in W and in e·ΔA.
    pub coupling_scale: f64,
    pub dim_limit: usize,
}

impl DiscretizedModel {
    pub fn new(osc_nmax: usize, modes: Vec<DiscreteMode>, max_photons_per_mode: usize, q0: Vec3) -> Self {
        Self {
            osc_nmax,
            modes,
            max_photons_per_mode,
            q0,
            coupling_scale: 1.0,
            dim_limit: 10_000,
        }
    }

    /// Two modes at kσ = 1 and 0.8 with the quantization volume chosen so that
    /// the row-sum bound on ‖W‖ equals `coupling` times the smallest photon energy.
    pub fn toy(sys: &OscillatorSystem, fields: &FieldConfig, q0: Vec3, coupling: f64) -> Result<Self> {
        let sigma = sys.sigma();
        let k1 = Vec3::new(0.0, 0.0, 1.0 / sigma);
        let dir = Vec3::new(1.1f64.sin() * 0.4f64.cos(), 1.1f64.sin() * 0.4f64.sin(), 1.1f64.cos());
        let k2 = dir * (0.8 / sigma);
        let unit = ModeAmplitude::new(1.0)?;
        let consts = &sys.constants;
        let mut modes = vec![
            DiscreteMode { k: k1, polarization: Vec3::x(), amplitude: unit.squared(consts, k1.norm()).sqrt() },
            DiscreteMode {
                k: k2,
                polarization: polarization_basis(&dir)[0],
                amplitude: unit.squared(consts, k2.norm()).sqrt(),
            },
        ];
        let mut model = Self::new(4, modes.clone(), 1, q0);
        let g = model.coupling_strength(sys, fields)?;
        // 𝒜 ∝ V^{-1/2}
        let shrink = coupling / g;
        for m in &mut modes {
            m.amplitude *= shrink;
        }
        model.modes = modes;
        Ok(model)
    }

    pub fn with_coupling_scale(mut self, s: f64) -> Self {
        self.coupling_scale = s;
        self
    }

    pub fn levels(&self) -> Vec<OscLevel> {
        levels_per_axis(self.osc_nmax)
    }

    /// Photon occupations in odometer order, starting from the vacuum.
    pub fn photon_configs(&self) -> Vec<Vec<usize>> {
        let n = self.modes.len();
        let mut out = vec![vec![0; n]];
        loop {
            let mut next = out.last().unwrap().clone();
            let mut i = 0;
            while i < n && next[i] == self.max_photons_per_mode {
                next[i] = 0;
                i += 1;
            }
            if i == n {
                return out;
            }
            next[i] += 1;
            out.push(next);
        }
    }

    /// Centre-of-mass pseudo-momentum Q₀ − Σħk·n_k of a photon configuration.
    pub fn recoil_momentum(&self, sys: &OscillatorSystem, config: &[usize]) -> Vec3 {
        let hbar = sys.constants.hbar;
        self.modes
            .iter()
            .zip(config)
            .fold(self.q0, |q, (m, &n)| q - m.k * (hbar * n as f64))
    }

    pub fn dimension(&self) -> usize {
        (self.osc_nmax + 1).pow(3) * (self.max_photons_per_mode + 1).pow(self.modes.len() as u32)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dimension();
        if dim > self.dim_limit {
            return Err(Error::DimensionOverflow { dim, limit: self.dim_limit });
        }
        for m in &self.modes {
            if (m.polarization.norm() - 1.0).abs() > 1e-12 || m.polarization.dot(&m.k).abs() > 1e-12 * m.k.norm() {
                return Err(Error::InvalidParameter {
                    name: "modes",
                    reason: "each polarization must be a unit vector transverse to its k".into(),
                });
            }
        }
        Ok(())
    }

    /// Σħk/2 carried by the zero-point term of the field momentum.
    pub fn zero_point_momentum(&self, sys: &OscillatorSystem) -> Vec3 {
        self.modes.iter().fold(Vec3::zeros(), |a, m| a + m.k * (0.5 * sys.constants.hbar))
    }

    /// ‖W‖ row-sum bound over the smallest photon energy ħck.
    pub fn coupling_strength(&self, sys: &OscillatorSystem, fields: &FieldConfig) -> Result<f64> {
        let k = &sys.constants;
        let kmin = self.modes.iter().map(|m| m.k.norm()).fold(f64::INFINITY, f64::min);
        Ok(coupling_matrix(sys, fields, self)?.norm_bound() / (k.hbar * k.c * kmin))
    }
}

struct Transition {
    from: usize,
    to: usize,
    mode: usize,
    factor: f64,
}

fn transitions(model: &DiscretizedModel) -> Vec<Transition> {
    let configs = model.photon_configs();
    let mut out = Vec::new();
    for (i, c) in configs.iter().enumerate() {
        for a in 0..model.modes.len() {
            if c[a] < model.max_photons_per_mode {
                let mut up = c.clone();
                up[a] += 1;
                let j = configs.iter().position(|x| *x == up).unwrap();
                out.push(Transition { from: i, to: j, mode: a, factor: ((c[a] + 1) as f64).sqrt() });
            }
        }
    }
    out
}

/// H₀ + H_F on the product basis (J), index = config·n_levels + level.
pub fn unperturbed_energies(sys: &OscillatorSystem, model: &DiscretizedModel) -> Vec<f64> {
    let k = &sys.constants;
    let m = sys.total_mass();
    let levels = model.levels();
    let mut out = Vec::with_capacity(model.dimension());
    for c in model.photon_configs() {
        let q = model.recoil_momentum(sys, &c);
        let field: f64 = model
            .modes
            .iter()
            .zip(&c)
            .map(|(md, &n)| k.hbar * k.c * md.k.norm() * (n as f64 + 0.5))
            .sum();
        for l in &levels {
            out.push(sys.hbar_omega0() * (l.shell() as f64 + 1.5) + q.norm_squared() / (2.0 * m) + field);
        }
    }
    out
}

/// Fills the emission block `to ← from` with `element(l, s)` and its adjoint.
fn one_photon_blocks(
    model: &DiscretizedModel,
    mut element: impl FnMut(&Transition) -> Result<Vec<Vec<C64>>>,
) -> Result<SparseHermitian> {
    let n = model.levels().len();
    let mut out = SparseHermitian::zeros(model.dimension());
    for t in transitions(model) {
        let block = element(&t)?;
        for (l, row) in block.iter().enumerate() {
            for (s, z) in row.iter().enumerate() {
                if *z != C64::new(0.0, 0.0) {
                    out.add_pair(t.to * n + l, t.from * n + s, *z);
                }
            }
        }
    }
    Ok(out)
}

fn mode_context(
    sys: &OscillatorSystem,
    fields: &FieldConfig,
    model: &DiscretizedModel,
    t: &Transition,
) -> Result<OmegaContext> {
    let md = &model.modes[t.mode];
    let q = model.recoil_momentum(sys, &model.photon_configs()[t.from]);
    Ok(OmegaContext::new(*sys, *fields, model.q0, md.k, md.polarization)?.with_recoil(q))
}

/// W restricted to one-photon transitions: ⟨l, n+1|W|s, n⟩ = s·e𝒜√(n+1)·Ω*_{s,l}.
pub fn coupling_matrix(sys: &OscillatorSystem, fields: &FieldConfig, model: &DiscretizedModel) -> Result<SparseHermitian> {
    model.validate()?;
    let levels = model.levels();
    one_photon_blocks(model, |t| {
        let ctx = mode_context(sys, fields, model, t)?;
        let g = model.coupling_scale * sys.e_charge * model.modes[t.mode].amplitude * t.factor;
        Ok(levels
            .par_iter()
            .map(|l| levels.iter().map(|s| omega_element(&ctx, s, l).conj() * g).collect())
            .collect())
    })
}

pub fn build_hamiltonian(sys: &OscillatorSystem, fields: &FieldConfig, model: &DiscretizedModel) -> Result<SparseHermitian> {
    let w = coupling_matrix(sys, fields, model)?;
    Ok(SparseHermitian::diagonal(&unperturbed_energies(sys, model)).plus(&w))
}

/// The pieces of the pseudo-momentum in the product basis (kg·m/s).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumOperators {
    /// Conjugate centre-of-mass momentum P.
    pub p: VectorOperator,
    /// e·B₀×r, with r the full relative coordinate.
    pub dipole: VectorOperator,
    /// e·ΔA (first order in the coupling).
    pub delta_a: VectorOperator,
    /// Σħk·n_k without the zero-point term.
    pub field: VectorOperator,
}

fn combine(terms: &[(&VectorOperator, f64)]) -> VectorOperator {
    std::array::from_fn(|j| {
        terms
            .iter()
            .fold(SparseHermitian::zeros(terms[0].0[j].dim), |acc, (op, s)| acc.plus(&op[j].scaled(*s)))
    })
}

impl MomentumOperators {
    /// K = P + (e/2)B₀×r + Σħk·n_k.
    pub fn canonical(&self) -> VectorOperator {
        combine(&[(&self.p, 1.0), (&self.dipole, 0.5), (&self.field, 1.0)])
    }

    /// P_kin = P − (e/2)B₀×r − e·ΔA.
    pub fn kinetic(&self) -> VectorOperator {
        combine(&[(&self.p, 1.0), (&self.dipole, -0.5), (&self.delta_a, -1.0)])
    }

    /// K = P_kin + e·B₀×r + e·ΔA + Σħk·n_k.
    pub fn kinetic_form(&self) -> VectorOperator {
        combine(&[(&self.kinetic(), 1.0), (&self.dipole, 1.0), (&self.delta_a, 1.0), (&self.field, 1.0)])
    }

    /// e·B₀×r + Σħk·n_k, the part of K − P_kin of zeroth order in the coupling.
    pub fn vacuum_zeroth(&self) -> VectorOperator {
        combine(&[(&self.dipole, 1.0), (&self.field, 1.0)])
    }
}

/// Builds P, e·B₀×r, e·ΔA and Σħk·n_k for the model.
pub fn pseudo_momentum_operator(
    sys: &OscillatorSystem,
    fields: &FieldConfig,
    model: &DiscretizedModel,
) -> Result<MomentumOperators> {
    model.validate()?;
    let params = OscParams::from_system(sys);
    let levels = model.levels();
    let n = levels.len();
    let dim = model.dimension();
    let configs = model.photon_configs();
    let r0 = displacement_r0(sys, fields, &model.q0);
    let e = sys.e_charge;
    let hbar = sys.constants.hbar;

    // r_j in one photon sector
    let position: [Vec<(usize, usize, f64)>; 3] = std::array::from_fn(|j| {
        let mut v = Vec::new();
        for (a, l) in levels.iter().enumerate() {
            for (b, s) in levels.iter().enumerate() {
                let x = position_element(&params, l, s, j) + if a == b { r0[j] } else { 0.0 };
                if x != 0.0 {
                    v.push((a, b, x));
                }
            }
        }
        v
    });
    let mut dipole: VectorOperator = std::array::from_fn(|_| SparseHermitian::zeros(dim));
    let mut p: VectorOperator = std::array::from_fn(|_| SparseHermitian::zeros(dim));
    let mut field: VectorOperator = std::array::from_fn(|_| SparseHermitian::zeros(dim));
    let b = fields.b0;
    for (ci, c) in configs.iter().enumerate() {
        let q = model.recoil_momentum(sys, c);
        let f = model.modes.iter().zip(c).fold(Vec3::zeros(), |acc, (m, &k)| acc + m.k * (hbar * k as f64));
        for j in 0..3 {
            // (B×r)_j = B_{j+1} r_{j+2} − B_{j+2} r_{j+1}
            let (u, w) = ((j + 1) % 3, (j + 2) % 3);
            for &(a, bb, x) in &position[w] {
                if a <= bb {
                    dipole[j].add_pair(ci * n + a, ci * n + bb, C64::new(e * b[u] * x, 0.0));
                }
            }
            for &(a, bb, x) in &position[u] {
                if a <= bb {
                    dipole[j].add_pair(ci * n + a, ci * n + bb, C64::new(-e * b[w] * x, 0.0));
                }
            }
            for a in 0..n {
                p[j].add_pair(ci * n + a, ci * n + a, C64::new(q[j], 0.0));
                field[j].add_pair(ci * n + a, ci * n + a, C64::new(f[j], 0.0));
            }
        }
    }
    let p = combine(&[(&p, 1.0), (&dipole, -0.5)]);

    let delta_a: Vec<SparseHermitian> = (0..3)
        .map(|j| {
            one_photon_blocks(model, |t| {
                let ctx = mode_context(sys, fields, model, t)?;
                let (q1, q2) = ctx.phase_vectors();
                let md = &model.modes[t.mode];
                let g = model.coupling_scale * e * md.amplitude * t.factor * md.polarization[j];
                let ph1 = C64::from_polar(1.0, q1.dot(&r0));
                let ph2 = C64::from_polar(1.0, q2.dot(&r0));
                Ok(levels
                    .iter()
                    .map(|l| {
                        levels
                            .iter()
                            .map(|s| {
                                let d = ph1 * plane_wave_between(&params, &q1, s, l)
                                    - ph2 * plane_wave_between(&params, &q2, s, l);
                                d.conj() * g
                            })
                            .collect()
                    })
                    .collect())
            })
        })
        .collect::<Result<_>>()?;
    let delta_a: VectorOperator = delta_a.try_into().unwrap();
    Ok(MomentumOperators { p, dipole, delta_a, field })
}

/// Human-readable basis label "(nx,ny,nz)|n_1 n_2 …".
pub fn basis_label(model: &DiscretizedModel, index: usize) -> String {
    let levels = model.levels();
    let n = levels.len();
    let c = &model.photon_configs()[index / n];
    let occ: Vec<String> = c.iter().map(|x| x.to_string()).collect();
    format!("{}|{}", levels[index % n], occ.join(" "))
}

#[cfg(test)]
mod tests;
