use serde::Serialize;

use super::{omega_element, OmegaContext};
use crate::error::Result;
use crate::oscillator::{plane_wave_between, position_element, OscLevel, OscParams, C64};
use crate::system::{FieldConfig, OscillatorSystem, Vec3};

/// One photon mode with its amplitude 𝒜ₖ (V·s/m) in a finite quantization volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteMode {
    pub k: Vec3,
    pub polarization: Vec3,
    pub amplitude: f64,
}

/// One-photon-loop momentum from a finite set of modes, split by operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteMomentum {
    /// ⟨e·ΔA⟩
    pub delta_a: Vec3,
    /// ⟨e·B₀×r⟩ beyond the unperturbed value
    pub dipole: Vec3,
    /// ⟨Σ ħk·n_k⟩
    pub transverse: Vec3,
}

impl DiscreteMomentum {
    pub fn total(&self) -> Vec3 {
        self.delta_a + self.dipole + self.transverse
    }
}

/// Second-order vacuum momentum of the ground state when only `modes` exist
/// and the oscillator is restricted to `levels` (which must contain the ground
/// level). Denominators carry the exact recoil (Q₀ − ħk)²/2M − Q₀²/2M.
pub fn discrete_mode_momentum(
    sys: &OscillatorSystem,
    fields: &FieldConfig,
    q0: &Vec3,
    modes: &[DiscreteMode],
    levels: &[OscLevel],
) -> Result<DiscreteMomentum> {
    let params = OscParams::from_system(sys);
    let k = &sys.constants;
    let hw = sys.hbar_omega0();
    let m = sys.total_mass();
    let e = sys.e_charge;
    let g = OscLevel::GROUND;
    let pos = |l: &OscLevel, s: &OscLevel| {
        Vec3::new(
            position_element(&params, l, s, 0),
            position_element(&params, l, s, 1),
            position_element(&params, l, s, 2),
        )
    };
    let cvec = |v: Vec3, z: C64| [z * v.x, z * v.y, z * v.z];

    let mut out = DiscreteMomentum {
        delta_a: Vec3::zeros(),
        dipole: Vec3::zeros(),
        transverse: Vec3::zeros(),
    };
    let mut second = vec![C64::new(0.0, 0.0); levels.len()];
    for mode in modes {
        let ctx = OmegaContext::new(*sys, *fields, *q0, mode.k, mode.polarization)?;
        let (q1, q2) = ctx.phase_vectors();
        let r0 = ctx.r0();
        let ea = e * mode.amplitude;
        let recoil = ((q0 - mode.k * k.hbar).norm_squared() - q0.norm_squared()) / (2.0 * m);
        let photon = k.hbar * k.c * mode.k.norm() + recoil;
        // first-order amplitudes in the one-photon sector
        let c: Vec<C64> = levels
            .iter()
            .map(|l| -omega_element(&ctx, &g, l).conj() * ea / (l.shell() as f64 * hw + photon))
            .collect();
        let mut da = C64::new(0.0, 0.0);
        for (l, cl) in levels.iter().zip(&c) {
            let d = C64::from_polar(1.0, q1.dot(&r0)) * plane_wave_between(&params, &q1, &g, l)
                - C64::from_polar(1.0, q2.dot(&r0)) * plane_wave_between(&params, &q2, &g, l);
            da += d * cl;
        }
        out.delta_a += mode.polarization * (2.0 * ea * da.re);
        let weight: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        out.transverse += mode.k * (k.hbar * weight);

        let mut line4 = [C64::new(0.0, 0.0); 3];
        for (l, cl) in levels.iter().zip(&c) {
            for (s, cs) in levels.iter().zip(&c) {
                let r = cvec(pos(l, s), cl.conj() * cs);
                for j in 0..3 {
                    line4[j] += r[j];
                }
            }
        }
        out.dipole += fields.b0.cross(&Vec3::new(line4[0].re, line4[1].re, line4[2].re)) * e;

        for (j, lj) in levels.iter().enumerate() {
            if pos(&g, lj) == Vec3::zeros() {
                continue;
            }
            let mut acc = C64::new(0.0, 0.0);
            for (s, cs) in levels.iter().zip(&c) {
                acc += omega_element(&ctx, lj, s) * cs;
            }
            second[j] -= acc * ea / (lj.shell() as f64 * hw);
        }
    }
    let mut line3 = Vec3::zeros();
    for (lj, aj) in levels.iter().zip(&second) {
        let r = cvec(pos(&g, lj), *aj);
        line3 += Vec3::new(r[0].re, r[1].re, r[2].re) * 2.0;
    }
    out.dipole += fields.b0.cross(&line3) * e;
    Ok(out)
}
