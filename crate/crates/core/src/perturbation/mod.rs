//! Vacuum-dressed pseudo-momentum: the Ω coupling between oscillator levels,
//! closed-form Casimir momenta, and the numeric mode-sum pipeline.

mod discrete;
mod kernels;
mod numeric;

pub use discrete::{discrete_mode_momentum, DiscreteMode, DiscreteMomentum};
pub use numeric::{
    dipole_qed_correction, transverse_momentum_term, vacuum_momentum_numeric, NumericOptions,
};

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oscillator::{plane_wave_ops, OscLevel, OscParams, C64};
use crate::system::{
    displacement_r0, momentum_shift_p0, static_polarizability, FieldConfig, OscillatorSystem, Vec3,
};
use crate::units::fine_structure;

/// Ingredients of one photon mode (k, ε) acting on the oscillator at pseudo-momentum Q₀.
#[derive(Debug, Clone, Copy)]
pub struct OmegaContext {
    pub sys: OscillatorSystem,
    pub fields: FieldConfig,
    pub q0: Vec3,
    pub k: Vec3,
    pub polarization: Vec3,
    r0: Vec3,
    p0: Vec3,
}

impl OmegaContext {
    pub fn new(
        sys: OscillatorSystem,
        fields: FieldConfig,
        q0: Vec3,
        k: Vec3,
        polarization: Vec3,
    ) -> Result<Self> {
        if ((polarization.norm() - 1.0).abs()) > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "polarization",
                reason: format!("must be a unit vector, |ε| = {}", polarization.norm()),
            });
        }
        if polarization.dot(&k).abs() > 1e-12 * k.norm().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidParameter {
                name: "polarization",
                reason: "must be transverse to k".into(),
            });
        }
        Ok(Self {
            r0: displacement_r0(&sys, &fields, &q0),
            p0: momentum_shift_p0(&sys, &fields),
            sys,
            fields,
            q0,
            k,
            polarization,
        })
    }

    /// Same mode and displacement, acting in the sector with centre-of-mass pseudo-momentum `q`.
    pub fn with_recoil(mut self, q: Vec3) -> Self {
        self.q0 = q;
        self
    }

    pub fn r0(&self) -> Vec3 {
        self.r0
    }

    pub fn p0(&self) -> Vec3 {
        self.p0
    }

    /// Relative-coordinate wavevectors (m₂/M)k and −(m₁/M)k seen by particles 1 and 2.
    pub fn phase_vectors(&self) -> (Vec3, Vec3) {
        let m = self.sys.total_mass();
        (self.k * (self.sys.m2 / m), -self.k * (self.sys.m1 / m))
    }
}

/// ⟨φ_l| Ω |φ_s⟩ in m/s: the one-photon absorption vertex divided by e·𝒜ₖ.
pub fn omega_element(ctx: &OmegaContext, l: &OscLevel, s: &OscLevel) -> C64 {
    let params = OscParams::from_system(&ctx.sys);
    let (q1, q2) = ctx.phase_vectors();
    let eps = ctx.polarization;
    let sys = &ctx.sys;
    let m = sys.total_mass();
    let exb = eps.cross(&ctx.fields.b0);
    let recoil = eps.dot(&ctx.q0) / m;

    let term = |q: &Vec3, mass: f64, sign: f64| -> C64 {
        let ops = plane_wave_ops(&params, q, l, s);
        let phase = C64::from_polar(1.0, q.dot(&ctx.r0));
        let mut r_dot = ops.plain * exb.dot(&ctx.r0);
        let mut p_dot = -ops.plain * eps.dot(&ctx.p0);
        for j in 0..3 {
            r_dot += ops.r[j] * exb[j];
            p_dot += ops.p[j] * eps[j];
        }
        let magnetic = r_dot * (sign * sys.e_charge / mass);
        phase * (magnetic - ops.plain * (sign * recoil) - p_dot / mass)
    };
    term(&q1, sys.m1, 1.0) + term(&q2, sys.m2, -1.0)
}

/// K₁ = −α(0)(E₀×B₀)(4α/3π)((m₁−m₂)/M)·ln(m₁/m₂).
pub fn casimir_k1(sys: &OscillatorSystem, fields: &FieldConfig) -> Vec3 {
    let a = fine_structure(&sys.constants);
    let ratio = 4.0 * a / (3.0 * PI) * (sys.m1 - sys.m2) / sys.total_mass() * (sys.m1 / sys.m2).ln();
    -fields.e_cross_b() * (static_polarizability(sys) * ratio)
}

/// −14/(15√π) + (2/(3√π))(Δm/M)² + (8/(3√π))μ/M.
pub fn k2_bracket(m1: f64, m2: f64) -> f64 {
    let sp = PI.sqrt();
    let m = m1 + m2;
    let dm = (m1 - m2) / m;
    let mu_over_m = m1 * m2 / (m * m);
    -14.0 / (15.0 * sp) + 2.0 / (3.0 * sp) * dm * dm + 8.0 / (3.0 * sp) * mu_over_m
}

/// K₂ = α(0)(E₀×B₀)·α·√(ħω₀/μc²)·bracket.
pub fn casimir_k2(sys: &OscillatorSystem, fields: &FieldConfig) -> Vec3 {
    let k = &sys.constants;
    let a = fine_structure(k);
    let root = (sys.hbar_omega0() / (sys.reduced_mass() * k.c * k.c)).sqrt();
    fields.e_cross_b() * (static_polarizability(sys) * a * root * k2_bracket(sys.m1, sys.m2))
}

/// Relative size ħω₀/Mc² of the neglected Doppler terms.
pub fn doppler_bound(sys: &OscillatorSystem) -> f64 {
    let c = sys.constants.c;
    sys.hbar_omega0() / (sys.total_mass() * c * c)
}

/// Decomposition of the vacuum correction to the pseudo-momentum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentumBreakdown {
    /// −α(0)E₀×B₀, the field-induced part of the classical pseudo-momentum.
    pub classical: Vec3,
    /// Zero-field evaluation at the same velocity; carries the divergent v·δM.
    pub mass_like: Vec3,
    /// Finite remainder of `mass_like` after removing v·δM.
    pub mass_like_finite: Vec3,
    /// Induced-dipole corrections from the e·B₀×r part of the observable.
    pub dipole_qed: Vec3,
    /// E₀×B₀ projection of the field-on minus field-off evaluation, before renormalization.
    pub exb_raw: Vec3,
    /// α(0)(E₀×B₀)·δμ/μ, the divergent part absorbed into μ*.
    pub counterterm: Vec3,
    /// `exb_raw` − `counterterm`.
    pub exb_renormalized: Vec3,
    /// Numeric p₀-driven same-particle piece (the K₁ mechanism).
    pub k1_numeric: Vec3,
    /// Numeric cross-particle E₀×B₀ piece with oscillating overlaps.
    pub oscillating_numeric: Vec3,
    /// Closed-form K₁.
    pub casimir_k1: Vec3,
    /// Closed-form K₂.
    pub casimir_k2: Vec3,
    pub doppler_bound: f64,
}

#[cfg(test)]
mod tests;
