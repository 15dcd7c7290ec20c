//! Physical constants (CODATA 2018, SI) and the few unit conversions the
//! momentum formulas need.
//!
//! Everything downstream works in SI. Gaussian-style numbers only appear in
//! [`audit_momentum_conventions`].

use std::f64::consts::PI;

use serde::Serialize;

/// Label stamped on every emitted record.
pub const CONSTANTS_VERSION: &str = "CODATA 2018";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s)
    pub hbar: f64,
    /// Speed of light (m/s)
    pub c: f64,
    /// Elementary charge (C)
    pub e_charge: f64,
    /// Vacuum permittivity (F/m)
    pub eps0: f64,
    /// Electron mass (kg)
    pub m_electron: f64,
    /// Proton mass (kg)
    pub m_proton: f64,
    /// One electronvolt (J)
    pub ev: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    c: 299_792_458.0,
    e_charge: 1.602_176_634e-19,
    eps0: 8.854_187_812_8e-12,
    m_electron: 9.109_383_701_5e-31,
    m_proton: 1.672_621_923_69e-27,
    ev: 1.602_176_634e-19,
};

impl Default for PhysicalConstants {
    fn default() -> Self {
        CODATA_2018
    }
}

impl PhysicalConstants {
    pub fn is_valid(&self) -> bool {
        [
            self.hbar,
            self.c,
            self.e_charge,
            self.eps0,
            self.m_electron,
            self.m_proton,
            self.ev,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0)
    }

    /// Compton-type wavenumber m·c/ħ of a particle of mass `m`.
    pub fn compton_wavenumber(&self, m: f64) -> f64 {
        m * self.c / self.hbar
    }
}

/// α = e²/(4π ε₀ ħ c).
pub fn fine_structure(k: &PhysicalConstants) -> f64 {
    k.e_charge * k.e_charge / (4.0 * PI * k.eps0 * k.hbar * k.c)
}

pub fn energy_to_angular_frequency(k: &PhysicalConstants, energy_j: f64) -> f64 {
    energy_j / k.hbar
}

pub fn ev_to_joule(k: &PhysicalConstants, ev: f64) -> f64 {
    ev * k.ev
}

/// SI polarizability (C²·s²/kg) to polarizability volume (m³).
pub fn polarizability_si_to_volume(k: &PhysicalConstants, alpha_si: f64) -> f64 {
    alpha_si / (4.0 * PI * k.eps0)
}

pub fn polarizability_volume_to_si(k: &PhysicalConstants, alpha_vol: f64) -> f64 {
    alpha_vol * 4.0 * PI * k.eps0
}

/// Magneto-electric momentum |α E₀ B₀| under two readings of the polarizability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumConventions {
    /// α_SI·E₀·B₀ with α_SI = e²/(μω₀²) (kg·m/s).
    pub p_si: f64,
    /// α_vol·E₀·B₀/c: the Gaussian form p = αEB/c with the volume α_vol and SI field magnitudes.
    pub p_volume: f64,
    /// α_vol = α_SI/(4π ε₀) (m³).
    pub alpha_volume: f64,
    pub note: &'static str,
}

pub const CONVENTION_NOTE: &str = "p_si is the dimensionally consistent SI value (proper CGS gives the same number). \
p_volume inserts the polarizability volume into the Gaussian form alpha*E*B/c with SI field magnitudes; \
it is not dimensionally consistent and is reported only because it lands near the quoted hydrogen velocity of ~5 um/s. \
Neither is asserted to be the convention behind that quote.";

/// Reports the magneto-electric momentum under both readings of a polarizability
/// "with the dimension of a volume". Field arguments are magnitudes (V/m, T).
pub fn audit_momentum_conventions(
    k: &PhysicalConstants,
    alpha_si: f64,
    e0: f64,
    b0: f64,
) -> MomentumConventions {
    let alpha_volume = polarizability_si_to_volume(k, alpha_si);
    MomentumConventions {
        p_si: alpha_si * e0 * b0,
        p_volume: alpha_volume * e0 * b0 / k.c,
        alpha_volume,
        note: CONVENTION_NOTE,
    }
}
