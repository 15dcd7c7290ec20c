//! The two-body oscillator, the static fields it sits in, and the closed-form
//! quantities that follow from them (polarizability, frame shifts, classical
//! pseudo-momentum).

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::units::{ev_to_joule, PhysicalConstants, CODATA_2018};

pub type Vec3 = Vector3<f64>;

/// Charge +e on particle 1, −e on particle 2, bound by ½μω₀²r².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorSystem {
    pub m1: f64,
    pub m2: f64,
    pub e_charge: f64,
    pub omega0: f64,
    #[serde(skip)]
    pub constants: PhysicalConstants,
}

impl OscillatorSystem {
    pub fn new(m1: f64, m2: f64, e_charge: f64, omega0: f64) -> Result<Self> {
        Self::with_constants(m1, m2, e_charge, omega0, CODATA_2018)
    }

    pub fn with_constants(
        m1: f64,
        m2: f64,
        e_charge: f64,
        omega0: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        ensure_positive("m1", m1)?;
        ensure_positive("m2", m2)?;
        ensure_positive("e_charge", e_charge)?;
        ensure_positive("omega0", omega0)?;
        if !constants.is_valid() {
            return Err(Error::InvalidParameter {
                name: "constants",
                reason: "all constants must be finite and positive".into(),
            });
        }
        Ok(Self {
            m1,
            m2,
            e_charge,
            omega0,
            constants,
        })
    }

    /// Proton + electron with the given trap quantum ħω₀ (eV).
    pub fn hydrogen_like(hbar_omega0_ev: f64) -> Result<Self> {
        let k = CODATA_2018;
        Self::new(
            k.m_proton,
            k.m_electron,
            k.e_charge,
            ev_to_joule(&k, hbar_omega0_ev) / k.hbar,
        )
    }

    pub fn total_mass(&self) -> f64 {
        self.m1 + self.m2
    }

    pub fn reduced_mass(&self) -> f64 {
        self.m1 * self.m2 / (self.m1 + self.m2)
    }

    /// Ground-state width σ = √(ħ/μω₀).
    pub fn sigma(&self) -> f64 {
        (self.constants.hbar / (self.reduced_mass() * self.omega0)).sqrt()
    }

    pub fn hbar_omega0(&self) -> f64 {
        self.constants.hbar * self.omega0
    }

    /// The same system with particles 1 and 2 exchanged (charges stay on their labels).
    pub fn swapped(&self) -> Self {
        Self {
            m1: self.m2,
            m2: self.m1,
            ..*self
        }
    }
}

/// Homogeneous static fields; they need not be perpendicular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldConfig {
    pub e0: Vec3,
    pub b0: Vec3,
}

impl FieldConfig {
    pub fn new(e0: Vec3, b0: Vec3) -> Result<Self> {
        if e0.iter().chain(b0.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "fields",
                reason: "field components must be finite".into(),
            });
        }
        Ok(Self { e0, b0 })
    }

    pub fn zero() -> Self {
        Self {
            e0: Vec3::zeros(),
            b0: Vec3::zeros(),
        }
    }

    pub fn e_cross_b(&self) -> Vec3 {
        self.e0.cross(&self.b0)
    }

    /// Unit vector along E₀×B₀, or `None` when the fields are parallel or absent.
    pub fn exb_direction(&self) -> Option<Vec3> {
        let v = self.e_cross_b();
        let n = v.norm();
        (n > 0.0).then(|| v / n)
    }
}

/// α(0) = e²/(μω₀²).
pub fn static_polarizability(sys: &OscillatorSystem) -> f64 {
    sys.e_charge * sys.e_charge / (sys.reduced_mass() * sys.omega0 * sys.omega0)
}

/// Q = M·v − α(0)·E₀×B₀.
pub fn classical_pseudo_momentum(sys: &OscillatorSystem, fields: &FieldConfig, v: &Vec3) -> Vec3 {
    v * sys.total_mass() - fields.e_cross_b() * static_polarizability(sys)
}

/// Kinetic velocity belonging to a pseudo-momentum label Q₀ at the given fields.
pub fn velocity_from_pseudo_momentum(sys: &OscillatorSystem, fields: &FieldConfig, q0: &Vec3) -> Vec3 {
    (q0 + fields.e_cross_b() * static_polarizability(sys)) / sys.total_mass()
}

/// r₀ = e⁻¹·α(0)·(E₀ + Q₀×B₀/M).
pub fn displacement_r0(sys: &OscillatorSystem, fields: &FieldConfig, q0: &Vec3) -> Vec3 {
    let a = static_polarizability(sys) / sys.e_charge;
    (fields.e0 + q0.cross(&fields.b0) / sys.total_mass()) * a
}

/// p₀ = (m₂ − m₁)/(2M)·α(0)·E₀×B₀.
pub fn momentum_shift_p0(sys: &OscillatorSystem, fields: &FieldConfig) -> Vec3 {
    let pref = (sys.m2 - sys.m1) / (2.0 * sys.total_mass()) * static_polarizability(sys);
    fields.e_cross_b() * pref
}

/// Size of the B₀-induced anisotropy, e·|B₀|·a²/ħ. `a = None` uses σ.
pub fn anisotropy_parameter(sys: &OscillatorSystem, fields: &FieldConfig, a: Option<f64>) -> Result<f64> {
    let a = a.unwrap_or_else(|| sys.sigma());
    ensure_positive("a", a)?;
    Ok(sys.e_charge * fields.b0.norm() * a * a / sys.constants.hbar)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    pub total_mass: f64,
    pub reduced_mass: f64,
    pub alpha0: f64,
    pub r0: Vec3,
    pub p0: Vec3,
    pub q0: Vec3,
}

pub fn derived_quantities(sys: &OscillatorSystem, fields: &FieldConfig, v: &Vec3) -> DerivedQuantities {
    let q0 = classical_pseudo_momentum(sys, fields, v);
    DerivedQuantities {
        total_mass: sys.total_mass(),
        reduced_mass: sys.reduced_mass(),
        alpha0: static_polarizability(sys),
        r0: displacement_r0(sys, fields, &q0),
        p0: momentum_shift_p0(sys, fields),
        q0,
    }
}
