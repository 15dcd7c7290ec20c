use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::kernels::{excited_rows, ground_row, AxisArrays, Denominator, ModeInputs};
use super::{casimir_k1, casimir_k2, doppler_bound, MomentumBreakdown};
use crate::error::{Error, Result};
use crate::oscillator::{truncation_for, truncation_tail, C64};
use crate::quadrature::gauss_legendre_on;
use crate::renormalization::counterterm_assembly;
use crate::system::{
    momentum_shift_p0, static_polarizability, velocity_from_pseudo_momentum,
    FieldConfig, OscillatorSystem, Vec3,
};
use crate::units::{PhysicalConstants, CODATA_2018};
use crate::vacuum::{
    delta_mass_default, k1_integral_quadrature, mass_integral_quadrature, mode_sum_prefactor,
    polarization_basis, Cutoff, SphereRule,
};

/// Controls for the numeric mode-sum evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericOptions {
    pub cutoff: Cutoff,
    /// Floor for the per-axis level truncation; the tail bound may raise it.
    pub n_max: usize,
    pub truncation_bound: f64,
    /// Hard ceiling on per-axis levels.
    pub max_levels: usize,
    pub rel_tol: f64,
    /// Keep the Q₀·ħk/M recoil shift in every denominator.
    pub doppler: bool,
    pub sphere_theta: usize,
    pub sphere_phi: usize,
    /// Radial Gauss–Legendre panels per decade of k.
    pub radial_panels: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            cutoff: Cutoff::electron_units(&CODATA_2018, 1e3).expect("positive cutoff"),
            n_max: 8,
            truncation_bound: 1e-12,
            max_levels: 4000,
            rel_tol: 1e-10,
            doppler: false,
            sphere_theta: 8,
            sphere_phi: 16,
            radial_panels: 8,
        }
    }
}

impl NumericOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 4 {
            return Err(Error::InvalidParameter {
                name: "n_max",
                reason: format!("must be at least 4, got {}", self.n_max),
            });
        }
        if !(self.rel_tol > 0.0 && self.truncation_bound > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: "tolerances must be positive".into(),
            });
        }
        if !self.sphere_phi.is_multiple_of(2) || self.sphere_theta == 0 || self.radial_panels == 0 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: "need an even azimuthal count and non-empty grids".into(),
            });
        }
        if !self.cutoff.lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "cutoff",
                reason: "the numeric pipeline needs a finite lambda".into(),
            });
        }
        Ok(())
    }
}

struct Setup {
    consts: PhysicalConstants,
    sigma: f64,
    hbar_omega0: f64,
    masses: [f64; 2],
    inputs: ModeInputs,
    rule: SphereRule,
    opts: NumericOptions,
}

impl Setup {
    fn new(sys: &OscillatorSystem, inputs: ModeInputs, opts: &NumericOptions) -> Result<Self> {
        opts.validate()?;
        Ok(Self {
            consts: sys.constants,
            sigma: sys.sigma(),
            hbar_omega0: sys.hbar_omega0(),
            masses: [sys.m1, sys.m2],
            inputs,
            rule: SphereRule::new(opts.sphere_theta, opts.sphere_phi),
            opts: *opts,
        })
    }

    fn from_fields(
        sys: &OscillatorSystem,
        fields: &FieldConfig,
        q0: &Vec3,
        opts: &NumericOptions,
    ) -> Result<Self> {
        // r₀ = α(0)(E₀ + v×B₀)/e, the part of the displacement linear in the fields
        let v = velocity_from_pseudo_momentum(sys, fields, q0);
        let inputs = ModeInputs {
            m1: sys.m1,
            m2: sys.m2,
            e_charge: sys.e_charge,
            b0: fields.b0,
            r0: (fields.e0 + v.cross(&fields.b0)) * (static_polarizability(sys) / sys.e_charge),
            p0: momentum_shift_p0(sys, fields),
            q0: *q0,
        };
        Self::new(sys, inputs, opts)
    }

    fn total_mass(&self) -> f64 {
        self.masses[0] + self.masses[1]
    }

    /// Signed relative-coordinate wavenumbers (m₂/M)k and −(m₁/M)k.
    fn q(&self, k: f64) -> [f64; 2] {
        let m = self.total_mass();
        [k * self.masses[1] / m, -k * self.masses[0] / m]
    }

    /// Largest k at which cross-particle overlaps e^{−(q₁²+q₂²)σ²/4} still exceed e^{−40}.
    fn cross_limit(&self) -> f64 {
        let m = self.total_mass();
        let w = (self.masses[0].powi(2) + self.masses[1].powi(2)) / (m * m);
        (160.0 / w).sqrt() / self.sigma
    }

    /// Radial panels for the explicit level sums: [IR, min(cross limit, Λ)],
    /// graded from a knee well below ω₀/c.
    fn cross_edges(&self) -> Vec<f64> {
        let upper = self.cross_limit().min(self.opts.cutoff.lambda);
        let lower = self.opts.cutoff.ir_epsilon.min(upper);
        let knee = 1e-2 * self.hbar_omega0 / (self.consts.hbar * self.consts.c);
        graded_edges(lower, upper, knee, self.opts.radial_panels)
    }

    fn arrays(&self, k: f64) -> Result<[AxisArrays; 2]> {
        let q = self.q(k);
        let ks = q[0].abs().max(q[1].abs()) * self.sigma;
        let need = truncation_for(ks, self.opts.truncation_bound).max(self.opts.n_max) + 2;
        if need > self.opts.max_levels {
            return Err(Error::TruncationTail {
                n_max: self.opts.max_levels,
                tail: truncation_tail(ks, self.opts.max_levels),
                bound: self.opts.truncation_bound,
            });
        }
        Ok([
            AxisArrays::new(q[0] * self.sigma, self.sigma, need),
            AxisArrays::new(q[1] * self.sigma, self.sigma, need),
        ])
    }

    fn denominator(&self, k: f64, khat: &Vec3) -> Denominator {
        let hbar = self.consts.hbar;
        let mut photon = hbar * self.consts.c * k + (hbar * k).powi(2) / (2.0 * self.total_mass());
        if self.opts.doppler {
            photon -= hbar * k * self.inputs.q0.dot(khat) / self.total_mass();
        }
        Denominator {
            hbar_omega0: self.hbar_omega0,
            photon,
        }
    }

    /// e²ħ/(ε₀c(2π)³): turns Σ_{kε} 2e²𝒜ₖ²(…) into ∫k dk dΩ Σ_ε(…).
    fn mode_density(&self) -> f64 {
        let k = &self.consts;
        k.e_charge * k.e_charge * k.hbar / (k.eps0 * k.c * (2.0 * PI).powi(3))
    }

    /// Σ over sphere nodes and both polarizations of `f(k̂, ε)`, accumulated in
    /// antipodal pairs so that odd integrands cancel exactly.
    fn angular_sum<F>(&self, f: F) -> Vec3
    where
        F: Fn(&Vec3, &Vec3) -> Vec3,
    {
        let node = |i: usize| -> Vec3 {
            let d = &self.rule.directions[i];
            polarization_basis(d).iter().map(|e| f(d, e)).sum::<Vec3>() * self.rule.weights[i]
        };
        let mut acc = Vec3::zeros();
        for i in 0..self.rule.directions.len() {
            let j = self.rule.antipode(i, self.opts.sphere_phi);
            if i < j {
                acc += node(i) + node(j);
            } else if i == j {
                acc += node(i);
            }
        }
        acc
    }
}

/// Panel edges on [a, b]: one panel up to `knee`, then geometric panels with
/// `per_decade` panels per factor of ten.
fn graded_edges(a: f64, b: f64, knee: f64, per_decade: usize) -> Vec<f64> {
    let mut edges = vec![a];
    let mut x = knee.max(a);
    if x > a && x < b {
        edges.push(x);
    } else {
        x = a.max(b * 1e-12);
        if x > a {
            edges.push(x);
        }
    }
    let ratio = 10f64.powf(1.0 / per_decade as f64);
    while x * ratio < b {
        x *= ratio;
        edges.push(x);
    }
    edges.push(b);
    edges
}

/// ∫ f(k) dk over the panels given by `edges` for a vector integrand, by
/// composite Gauss–Legendre; a lower order on the same panels bounds the error.
/// Panels are bisected up to four times until the bound is met.
fn radial_vec<F>(f: F, edges: &[f64], rel_tol: f64) -> Result<Vec3>
where
    F: Fn(f64) -> Result<Vec3> + Sync,
{
    let mut edges = edges.to_vec();
    let mut last = (0.0, 0.0);
    for _ in 0..5 {
        match radial_pass(&f, &edges, rel_tol)? {
            Ok(v) => return Ok(v),
            Err(est) => last = est,
        }
        edges = edges
            .windows(2)
            .flat_map(|w| [w[0], 0.5 * (w[0] + w[1])])
            .chain(edges.last().copied())
            .collect();
    }
    Err(Error::QuadratureDiverged {
        estimate: last.0,
        error: last.1,
        subdivisions: edges.len() - 1,
    })
}

/// One fixed-panel pass: the value, or (estimate, error) when the bound fails.
fn radial_pass<F>(f: &F, edges: &[f64], rel_tol: f64) -> Result<std::result::Result<Vec3, (f64, f64)>>
where
    F: Fn(f64) -> Result<Vec3> + Sync,
{
    let rule = |order: usize| -> Vec<(f64, f64)> {
        edges
            .windows(2)
            .flat_map(|w| {
                let (x, wt) = gauss_legendre_on(order, w[0], w[1]);
                x.into_iter().zip(wt)
            })
            .collect()
    };
    let eval = |nodes: Vec<(f64, f64)>| -> Result<(Vec3, f64)> {
        let parts: Vec<Result<Vec3>> = nodes.par_iter().map(|(x, w)| f(*x).map(|v| v * *w)).collect();
        let mut acc = Vec3::zeros();
        let mut mag = 0.0;
        for p in parts {
            let p = p?;
            mag += p.norm();
            acc += p;
        }
        Ok((acc, mag))
    };
    let (fine, mag) = eval(rule(20))?;
    let (coarse, _) = eval(rule(14))?;
    let err = (fine - coarse).norm();
    let allowed = (rel_tol.max(1e-8) * fine.norm()).max(1e-13 * mag);
    if err > allowed && err > 0.0 {
        return Ok(Err((fine.norm(), err)));
    }
    Ok(Ok(fine))
}

/// The e·ΔA (second-line) contribution split by origin.
#[derive(Debug, Clone, Copy, Default)]
struct SecondLine {
    /// Same-particle terms driven by Q₀ and B₀×r₀; carry the UV divergence.
    mass: Vec3,
    /// Same-particle terms driven by p₀; UV finite.
    p0: Vec3,
    /// Cross-particle terms with oscillating overlaps.
    cross: Vec3,
}

impl SecondLine {
    fn total(&self) -> Vec3 {
        self.mass + self.p0 + self.cross
    }
}

fn same_particle(setup: &Setup) -> Result<(Vec3, Vec3)> {
    let inp = &setup.inputs;
    let k = &setup.consts;
    let [m1, m2] = setup.masses;
    let m = setup.total_mass();
    let bxr0 = inp.b0.cross(&inp.r0) * inp.e_charge;
    let u1 = -bxr0 / m1 + inp.q0 / m;
    let u2 = -bxr0 / m2 + inp.q0 / m;
    let cutoff = setup.opts.cutoff;
    let tol = setup.opts.rel_tol;
    if !setup.opts.doppler {
        let pref = mode_sum_prefactor(k);
        let i1 = mass_integral_quadrature(k, m1, &cutoff, tol)?.value;
        let i2 = mass_integral_quadrature(k, m2, &cutoff, tol)?.value;
        let j = k1_integral_quadrature(k, m1, m2, &Cutoff::infinite(), tol)?.value;
        return Ok((
            (u1 * i1 + u2 * i2) * pref,
            inp.p0 * (pref * j / (k.hbar * k.hbar)),
        ));
    }
    let hb = k.hbar;
    let energy = |kk: f64, mass: f64, khat: &Vec3| {
        hb * hb * kk * kk / (2.0 * mass) + hb * kk * (k.c - inp.q0.dot(khat) / m)
    };
    let mass_integrand = |kk: f64| -> Vec3 {
        setup.angular_sum(|d, e| {
            e * (e.dot(&u1) / energy(kk, m1, d) + e.dot(&u2) / energy(kk, m2, d))
        }) * kk
    };
    let p0_integrand = |kk: f64| -> Vec3 {
        setup.angular_sum(|d, e| {
            let num = (m1 - m2) * hb * kk * (k.c - inp.q0.dot(d) / m);
            e * (e.dot(&inp.p0) * num / (m1 * m2 * energy(kk, m1, d) * energy(kk, m2, d)))
        }) * kk
    };
    let scale = 2.0 * m1.min(m2) * k.c / hb;
    let dens = setup.mode_density();
    let per = setup.opts.radial_panels;
    let tol = tol.max(1e-9);
    let mass_edges = graded_edges(cutoff.ir_epsilon, cutoff.lambda, 1e-9 * scale, per);
    let mass = radial_vec(|kk| Ok(mass_integrand(kk)), &mass_edges, tol)?;
    // the p₀ integrand falls off as k⁻²; 10¹⁶·scale leaves a tail below 1e-16
    let p0_edges = graded_edges(cutoff.ir_epsilon, 1e16 * scale, 1e-9 * scale, per);
    let p0 = radial_vec(|kk| Ok(p0_integrand(kk)), &p0_edges, tol)?;
    Ok((mass * dens, p0 * dens))
}

/// Cross-particle part of Σ_l ⟨0|D|l⟩⟨l|Ω†|0⟩ / (E₀ − E_l), integrated over angles, at one k.
fn cross_integrand(setup: &Setup, k: f64) -> Result<Vec3> {
    let arr = setup.arrays(k)?;
    let q = setup.q(k);
    let len = arr[0].ground.len();
    let v = setup.angular_sum(|khat, eps| {
        let vx = setup.inputs.vertices(khat, eps, q);
        let den = setup.denominator(k, khat);
        let ph = [
            C64::from_polar(1.0, vx[0].phase),
            C64::from_polar(1.0, vx[1].phase),
        ];
        let om = |i: usize, n: usize| ph[i] * (arr[i].ground[n] * vx[i].c + arr[i].z_ground[n] * vx[i].a[2]);
        let mut x = C64::new(0.0, 0.0);
        for n in 0..len {
            let t = ph[0] * arr[0].ground[n] * om(1, n).conj() - ph[1] * arr[1].ground[n] * om(0, n).conj();
            x -= t / den.at(n);
        }
        eps * x.re
    });
    Ok(v * k)
}

fn second_line(setup: &Setup) -> Result<SecondLine> {
    let (mass, p0) = same_particle(setup)?;
    let cross = radial_vec(|k| cross_integrand(setup, k), &setup.cross_edges(), setup.opts.rel_tol)?
        * setup.mode_density();
    Ok(SecondLine { mass, p0, cross })
}

/// Lines three and four of the expansion (the e·B₀×r part of the observable)
/// integrated over angles at one k, in units that multiply B₀×(e·density).
fn dipole_integrand(setup: &Setup, k: f64) -> Result<Vec3> {
    let arr = setup.arrays(k)?;
    let q = setup.q(k);
    let len = arr[0].ground.len();
    let (sigma, hbar) = (setup.sigma, setup.consts.hbar);
    let r10 = sigma * std::f64::consts::FRAC_1_SQRT_2;
    let v = setup.angular_sum(|khat, eps| {
        let vx = setup.inputs.vertices(khat, eps, q);
        let den = setup.denominator(k, khat);
        let g: Vec<[Vec<C64>; 3]> = (0..2).map(|i| ground_row(&vx[i], &arr[i], sigma, hbar)).collect();
        let ex: Vec<[[Vec<C64>; 2]; 2]> = (0..2).map(|i| excited_rows(&vx[i], &arr[i], sigma, hbar)).collect();
        // F_l = ⟨0|Ω|l⟩/d_l for l = (0,0,n) and (1,0,n)
        let f0: Vec<C64> = (0..len).map(|n| (g[0][0][n] + g[1][0][n]) / den.at(n)).collect();
        let f1: Vec<C64> = (0..len).map(|n| (g[0][1][n] + g[1][1][n]) / den.at(n + 1)).collect();
        let mut line3 = [C64::new(0.0, 0.0); 2];
        for (axis, acc) in line3.iter_mut().enumerate() {
            for n in 0..len {
                let to_ground = ex[0][axis][0][n] + ex[1][axis][0][n];
                let to_first = ex[0][axis][1][n] + ex[1][axis][1][n];
                *acc += to_ground * f0[n].conj() + to_first * f1[n].conj();
            }
            *acc *= r10 / setup.hbar_omega0;
        }
        let mut along_k = 0.0;
        let mut along_eps = 0.0;
        for n in 0..len {
            along_eps += 2.0 * (f0[n].conj() * f1[n]).re * r10;
            if n + 1 < len {
                let zr = r10 * ((n + 1) as f64).sqrt();
                along_k += 2.0 * ((f0[n].conj() * f0[n + 1]).re + (f1[n].conj() * f1[n + 1]).re) * zr;
            }
        }
        eps * (line3[0].re + 0.5 * along_eps) + khat * (line3[1].re + 0.5 * along_k)
    });
    Ok(v * k)
}

/// Second-order ⟨Σħk a†a⟩ at one k, integrated over angles; `cross` toggles the
/// cross-particle explicit sums (only needed where overlaps are not negligible).
fn transverse_integrand(setup: &Setup, k: f64, cross: bool) -> Result<Vec3> {
    let arr = if cross { Some(setup.arrays(k)?) } else { None };
    let q = setup.q(k);
    let (sigma, hbar) = (setup.sigma, setup.consts.hbar);
    let c = setup.consts.c;
    let v = setup.angular_sum(|khat, eps| {
        let vx = setup.inputs.vertices(khat, eps, q);
        let mut total = 0.0;
        for (i, vi) in vx.iter().enumerate() {
            let e_i = hbar * hbar * k * k / (2.0 * setup.masses[i]) + hbar * c * k;
            let shell1: f64 = (0..3)
                .map(|j| 0.5 * (vi.a[j] * vi.a[j] * sigma * sigma + vi.b[j] * vi.b[j] * hbar * hbar / (sigma * sigma)))
                .sum();
            total += vi.c * vi.c / (e_i * e_i) + shell1 / (setup.hbar_omega0 + e_i).powi(2);
        }
        if let Some(arr) = &arr {
            let den = setup.denominator(k, khat);
            let g1 = ground_row(&vx[0], &arr[0], sigma, hbar);
            let g2 = ground_row(&vx[1], &arr[1], sigma, hbar);
            for n in 0..arr[0].ground.len() {
                for (row, shell) in [(0, n), (1, n + 1), (2, n + 1)] {
                    let d = den.at(shell);
                    total += 2.0 * (g1[row][n] * g2[row][n].conj()).re / (d * d);
                }
            }
        }
        khat * (hbar * k * total)
    });
    Ok(v * k)
}

/// Numeric evaluation of the e·ΔA contribution with the field-switching breakdown.
pub fn vacuum_momentum_numeric(
    sys: &OscillatorSystem,
    fields: &FieldConfig,
    q0: &Vec3,
    opts: &NumericOptions,
) -> Result<MomentumBreakdown> {
    let m = sys.total_mass();
    let v = velocity_from_pseudo_momentum(sys, fields, q0);
    let on = second_line(&Setup::from_fields(sys, fields, q0, opts)?)?;
    let off = second_line(&Setup::from_fields(sys, &FieldConfig::zero(), &(v * m), opts)?)?;

    let k = &sys.constants;
    let dm1 = delta_mass_default(k, sys.m1, &opts.cutoff)?;
    let dm2 = delta_mass_default(k, sys.m2, &opts.cutoff)?;
    let d_mu_over_mu = -sys.reduced_mass() * counterterm_assembly(dm1, dm2, sys);
    let alpha0 = static_polarizability(sys);
    let exb = fields.e_cross_b();

    let zero = Vec3::zeros();
    let (exb_raw, counterterm, k1, k2) = match fields.exb_direction() {
        Some(u) => {
            let proj = |x: Vec3| u * x.dot(&u);
            (
                proj(on.total() - off.total()),
                u * (alpha0 * exb.norm() * d_mu_over_mu),
                proj(on.p0 - off.p0),
                proj(on.cross - off.cross),
            )
        }
        None => (zero, zero, zero, zero),
    };
    let mass_like = off.total();
    Ok(MomentumBreakdown {
        classical: -exb * alpha0,
        mass_like,
        mass_like_finite: mass_like - v * (dm1 + dm2),
        dipole_qed: dipole_qed_correction(sys, fields, q0, opts)?,
        exb_raw,
        counterterm,
        exb_renormalized: exb_raw - counterterm,
        k1_numeric: k1,
        oscillating_numeric: k2,
        casimir_k1: casimir_k1(sys, fields),
        casimir_k2: casimir_k2(sys, fields),
        doppler_bound: doppler_bound(sys),
    })
}

/// Induced-dipole corrections (the two e·B₀×r lines), to first order in the
/// fields: B₀ appears only in the outer prefactor and r₀ = α(0)E₀/e inside Ω.
pub fn dipole_qed_correction(
    sys: &OscillatorSystem,
    fields: &FieldConfig,
    q0: &Vec3,
    opts: &NumericOptions,
) -> Result<Vec3> {
    opts.validate()?;
    if fields.b0 == Vec3::zeros() {
        return Ok(Vec3::zeros());
    }
    let v = velocity_from_pseudo_momentum(sys, fields, q0);
    let inputs = ModeInputs {
        m1: sys.m1,
        m2: sys.m2,
        e_charge: sys.e_charge,
        b0: Vec3::zeros(),
        r0: fields.e0 * (static_polarizability(sys) / sys.e_charge),
        p0: Vec3::zeros(),
        q0: v * sys.total_mass(),
    };
    let mut o = *opts;
    o.doppler = false;
    let setup = Setup::new(sys, inputs, &o)?;
    let inner = radial_vec(|k| dipole_integrand(&setup, k), &setup.cross_edges(), o.rel_tol)?;
    Ok(fields.b0.cross(&inner) * (sys.e_charge * setup.mode_density()))
}

/// Photon-momentum expectation Σħk⟨a†a⟩ at second order (normal ordered).
pub fn transverse_momentum_term(
    sys: &OscillatorSystem,
    fields: &FieldConfig,
    q0: &Vec3,
    opts: &NumericOptions,
) -> Result<Vec3> {
    let mut o = *opts;
    o.doppler = false;
    let setup = Setup::from_fields(sys, fields, q0, &o)?;
    let lambda = o.cutoff.lambda;
    let split = setup.cross_limit().min(lambda);
    let mut total = radial_vec(|k| transverse_integrand(&setup, k, true), &setup.cross_edges(), o.rel_tol)?;
    if lambda > split {
        // k = split·e^t on the UV tail
        let span = (lambda / split).ln();
        let panels = ((span / 10f64.ln()) * o.radial_panels as f64).ceil().max(1.0) as usize;
        let edges: Vec<f64> = (0..=panels).map(|j| span * j as f64 / panels as f64).collect();
        total += radial_vec(
            |t| {
                let k = split * t.exp();
                transverse_integrand(&setup, k, false).map(|v| v * k)
            },
            &edges,
            o.rel_tol,
        )?;
    }
    Ok(total * (0.5 * setup.mode_density()))
}
