//! Photon-mode sums as integrals: mode amplitude, sphere rules with explicit
//! transverse polarizations, and the radial self-energy integrals with both
//! closed-form and quadrature evaluation.
//!
//! A mode sum Σ_{kε} 2e²𝒜ₖ² ε(ε·u) F(k) becomes C·u·∫k dk F(k) with
//! C = (4α/3π)ħ²; the quantization volume cancels against the mode density
//! before anything is evaluated.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::{adaptive, gauss_legendre, semi_infinite, QuadOptions, QuadResult};
use crate::system::Vec3;
use crate::units::{fine_structure, PhysicalConstants};

/// UV wavenumber cutoff Λ and IR lower limit δ (both 1/m). Λ may be infinite
/// for integrands that converge on their own.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff {
    pub lambda: f64,
    pub ir_epsilon: f64,
}

impl Cutoff {
    pub fn new(lambda: f64) -> Result<Self> {
        Self::with_ir(lambda, 0.0)
    }

    pub fn with_ir(lambda: f64, ir_epsilon: f64) -> Result<Self> {
        if lambda.is_nan() || ir_epsilon.is_nan() || ir_epsilon < 0.0 || ir_epsilon >= lambda {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                reason: format!("need 0 <= ir_epsilon < lambda, got ({ir_epsilon}, {lambda})"),
            });
        }
        Ok(Self { lambda, ir_epsilon })
    }

    pub fn infinite() -> Self {
        Self {
            lambda: f64::INFINITY,
            ir_epsilon: 0.0,
        }
    }

    /// Λ = m·c/ħ, where the nonrelativistic treatment of a particle of mass `m` ends.
    pub fn physical(k: &PhysicalConstants, m: f64) -> Result<Self> {
        Self::new(k.compton_wavenumber(m))
    }

    /// Λ = multiple·m_e·c/ħ.
    pub fn electron_units(k: &PhysicalConstants, multiple: f64) -> Result<Self> {
        Self::new(multiple * k.compton_wavenumber(k.m_electron))
    }
}

/// 𝒜ₖ² = ħ/(2ε₀Vkc) for a finite quantization volume V.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeAmplitude {
    pub volume: f64,
}

impl ModeAmplitude {
    pub fn new(volume: f64) -> Result<Self> {
        ensure_positive("volume", volume)?;
        Ok(Self { volume })
    }

    pub fn squared(&self, consts: &PhysicalConstants, k: f64) -> f64 {
        consts.hbar / (2.0 * consts.eps0 * self.volume * k * consts.c)
    }
}

/// Two unit polarization vectors orthogonal to `khat` and to each other.
pub fn polarization_basis(khat: &Vec3) -> [Vec3; 2] {
    let helper = if khat.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = khat.cross(&helper).normalize();
    let e2 = khat.cross(&e1);
    [e1, e2]
}

/// Product rule on the unit sphere: Gauss–Legendre in cos θ times a uniform φ grid.
/// With an even φ count the node set is closed under k̂ → −k̂.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (x, w) = gauss_legendre(n_theta);
        let mut directions = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        let dphi = 2.0 * PI / n_phi as f64;
        for (ct, wt) in x.iter().zip(&w) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = (j as f64 + 0.5) * dphi;
                directions.push(Vec3::new(st * phi.cos(), st * phi.sin(), *ct));
                weights.push(wt * dphi);
            }
        }
        let mut rule = Self {
            directions,
            weights,
        };
        for i in 0..rule.directions.len() {
            let j = rule.antipode(i, n_phi);
            if i < j {
                rule.directions[j] = -rule.directions[i];
                rule.weights[j] = rule.weights[i];
            }
        }
        rule
    }

    /// Index of the antipode of node `i`.
    pub fn antipode(&self, i: usize, n_phi: usize) -> usize {
        let n_theta = self.directions.len() / n_phi;
        let (t, p) = (i / n_phi, i % n_phi);
        (n_theta - 1 - t) * n_phi + (p + n_phi / 2) % n_phi
    }
}

impl Default for SphereRule {
    fn default() -> Self {
        Self::new(8, 16)
    }
}

/// ∫dΩ Σ_ε ε_a ε_b, evaluated on the sphere rule with explicit polarization vectors.
pub fn angular_polarization_tensor(rule: &SphereRule) -> Matrix3<f64> {
    let mut t = Matrix3::zeros();
    for (d, w) in rule.directions.iter().zip(&rule.weights) {
        for e in polarization_basis(d) {
            t += e * e.transpose() * *w;
        }
    }
    t
}

/// ∫dΩ Σ_ε (ε·u)(ε·v) = (8π/3)·u·v.
pub fn angular_polarization_reduction(u: &Vec3, v: &Vec3) -> f64 {
    (angular_polarization_tensor(&SphereRule::default()) * v).dot(u)
}

/// Coefficient C with Σ_{kε} 2e²𝒜ₖ² ε(ε·u) F(k) = C·u·∫k dk F(k), built from the
/// mode density V/(2π)³, V·𝒜ₖ²·k = ħ/(2ε₀c) and the numeric angular tensor.
pub fn mode_sum_prefactor(consts: &PhysicalConstants) -> f64 {
    let angular = angular_polarization_tensor(&SphereRule::default()).trace() / 3.0;
    let amp_times_vk = consts.hbar / (2.0 * consts.eps0 * consts.c);
    2.0 * consts.e_charge * consts.e_charge * amp_times_vk * angular / (2.0 * PI).powi(3)
}

/// b = 2mc/ħ, the wavenumber where recoil energy equals photon energy.
pub fn recoil_wavenumber(consts: &PhysicalConstants, m: f64) -> f64 {
    2.0 * m * consts.c / consts.hbar
}

fn log_ratio(x: f64, b: f64) -> f64 {
    // ln(1 + x/b), exact at x = 0 and finite for x = ∞ only through the caller
    (x / b).ln_1p()
}

/// I(Λ) = ∫_δ^Λ k dk / (ħ²k²/2m + ħck) = (2m/ħ²)·[ln(1 + ħΛ/2mc) − ln(1 + ħδ/2mc)].
pub fn mass_integral(consts: &PhysicalConstants, m: f64, cutoff: &Cutoff) -> Result<f64> {
    ensure_positive("m", m)?;
    finite_cutoff(cutoff)?;
    let b = recoil_wavenumber(consts, m);
    let pref = 2.0 * m / (consts.hbar * consts.hbar);
    Ok(pref * (log_ratio(cutoff.lambda, b) - log_ratio(cutoff.ir_epsilon, b)))
}

fn finite_cutoff(cutoff: &Cutoff) -> Result<()> {
    if cutoff.lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "cutoff",
            reason: "the mass integral diverges; a finite lambda is required".into(),
        })
    }
}

/// Integrand of [`mass_integral`] at wavenumber k.
pub fn mass_integrand(consts: &PhysicalConstants, m: f64, k: f64) -> f64 {
    let h = consts.hbar;
    k / (h * h * k * k / (2.0 * m) + h * consts.c * k)
}

/// [`mass_integral`] by adaptive quadrature.
pub fn mass_integral_quadrature(
    consts: &PhysicalConstants,
    m: f64,
    cutoff: &Cutoff,
    rel_tol: f64,
) -> Result<QuadResult> {
    ensure_positive("m", m)?;
    finite_cutoff(cutoff)?;
    let mut opts = QuadOptions::relative(rel_tol);
    opts.max_subdivisions = 20_000;
    adaptive(
        |k| if k > 0.0 { mass_integrand(consts, m, k) } else { 1.0 / (consts.hbar * consts.c) },
        cutoff.ir_epsilon,
        cutoff.lambda,
        opts,
    )
}

/// δm = (4α/3π)·ħ²·I(Λ) = (8α/3π)·m·ln(1 + ħΛ/2mc).
pub fn delta_mass(consts: &PhysicalConstants, m: f64, cutoff: &Cutoff, alpha: f64) -> Result<f64> {
    let i = mass_integral(consts, m, cutoff)?;
    Ok(4.0 * alpha / (3.0 * PI) * consts.hbar * consts.hbar * i)
}

/// δm with the fine-structure constant taken from `consts`.
pub fn delta_mass_default(consts: &PhysicalConstants, m: f64, cutoff: &Cutoff) -> Result<f64> {
    delta_mass(consts, m, cutoff, fine_structure(consts))
}

/// ∫_δ^Λ [k/(k²/2 + ckm₂/ħ) − k/(k²/2 + ckm₁/ħ)] dk
/// = 2[ln((Λ+b₂)/(δ+b₂)) − ln((Λ+b₁)/(δ+b₁))], bᵢ = 2mᵢc/ħ. Infinite Λ gives 2·ln(m₁/m₂).
pub fn k1_integral(consts: &PhysicalConstants, m1: f64, m2: f64, cutoff: &Cutoff) -> Result<f64> {
    ensure_positive("m1", m1)?;
    ensure_positive("m2", m2)?;
    let b1 = recoil_wavenumber(consts, m1);
    let b2 = recoil_wavenumber(consts, m2);
    let part = |b: f64| -> f64 {
        if cutoff.lambda.is_finite() {
            2.0 * (log_ratio(cutoff.lambda, b) - log_ratio(cutoff.ir_epsilon, b))
        } else {
            // ln((Λ+b)/b) → ln Λ − ln b; the ln Λ pieces cancel in the difference
            2.0 * (-(b.ln()) - log_ratio(cutoff.ir_epsilon, b))
        }
    };
    Ok(part(b2) - part(b1))
}

/// Integrand of [`k1_integral`], written as one fraction so the UV tail does not cancel.
pub fn k1_integrand(consts: &PhysicalConstants, m1: f64, m2: f64, k: f64) -> f64 {
    let b1 = recoil_wavenumber(consts, m1);
    let b2 = recoil_wavenumber(consts, m2);
    2.0 * (b1 - b2) / ((k + b1) * (k + b2))
}

/// [`k1_integral`] by adaptive quadrature; an infinite Λ uses the mapped interval.
pub fn k1_integral_quadrature(
    consts: &PhysicalConstants,
    m1: f64,
    m2: f64,
    cutoff: &Cutoff,
    rel_tol: f64,
) -> Result<QuadResult> {
    ensure_positive("m1", m1)?;
    ensure_positive("m2", m2)?;
    let mut opts = QuadOptions::relative(rel_tol);
    opts.abs_tol = 1e-300;
    opts.max_subdivisions = 20_000;
    let scale = recoil_wavenumber(consts, m1.min(m2));
    // integrate in k/scale to keep the mapped variable well conditioned
    let f = |x: f64| k1_integrand(consts, m1, m2, x * scale) * scale;
    let lo = cutoff.ir_epsilon / scale;
    if cutoff.lambda.is_finite() {
        adaptive(f, lo, cutoff.lambda / scale, opts)
    } else {
        semi_infinite(f, lo, opts)
    }
}
