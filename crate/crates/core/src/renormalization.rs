//! Mass renormalization: δm₁, δm₂ → δM, δ(1/μ), the observed reduced mass
//! and the cutoff scan of the E₀×B₀ momentum.

use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::perturbation::{vacuum_momentum_numeric, NumericOptions};
use crate::system::{classical_pseudo_momentum, FieldConfig, OscillatorSystem, Vec3};
use crate::vacuum::{delta_mass_default, Cutoff};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenormalizationReport {
    pub delta_m1: f64,
    pub delta_m2: f64,
    #[serde(rename = "delta_M")]
    pub delta_m_total: f64,
    pub delta_inv_mu: f64,
    pub mu_star: f64,
    pub lambda: f64,
    /// d ln|K_ren| / d ln Λ fitted over a scan; zero for a single cutoff.
    pub residual_slope: f64,
}

/// δ(1/μ) = −μ⁻¹·(δm₁/m₁ + δm₂/m₂ − δM/M) = −μ⁻²·δμ.
pub fn counterterm_assembly(delta_m1: f64, delta_m2: f64, sys: &OscillatorSystem) -> f64 {
    let m = sys.total_mass();
    let rel = delta_m1 / sys.m1 + delta_m2 / sys.m2 - (delta_m1 + delta_m2) / m;
    -rel / sys.reduced_mass()
}

fn delta_masses(sys: &OscillatorSystem, lambda: f64) -> Result<(f64, f64)> {
    if lambda == 0.0 {
        return Ok((0.0, 0.0));
    }
    let cutoff = Cutoff::new(lambda)?;
    let k = &sys.constants;
    Ok((
        delta_mass_default(k, sys.m1, &cutoff)?,
        delta_mass_default(k, sys.m2, &cutoff)?,
    ))
}

/// Mass shifts and μ* at cutoff Λ (1/m), with 1/μ* = 1/μ + δ(1/μ).
pub fn renormalization_report(sys: &OscillatorSystem, lambda: f64) -> Result<RenormalizationReport> {
    let (dm1, dm2) = delta_masses(sys, lambda)?;
    let d_inv = counterterm_assembly(dm1, dm2, sys);
    Ok(RenormalizationReport {
        delta_m1: dm1,
        delta_m2: dm2,
        delta_m_total: dm1 + dm2,
        delta_inv_mu: d_inv,
        mu_star: 1.0 / (1.0 / sys.reduced_mass() + d_inv),
        lambda,
        residual_slope: 0.0,
    })
}

/// e²/(μ*ω₀²); Λ = 0 gives the bare α(0).
pub fn renormalized_polarizability(sys: &OscillatorSystem, lambda: f64) -> Result<f64> {
    if lambda != 0.0 {
        ensure_positive("lambda", lambda)?;
    }
    let r = renormalization_report(sys, lambda)?;
    let e = sys.e_charge;
    Ok(e * e / (r.mu_star * sys.omega0 * sys.omega0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub lambda: f64,
    /// E₀×B₀ projections (kg·m/s).
    pub raw: f64,
    pub counterterm: f64,
    pub renormalized: f64,
    pub report: RenormalizationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffScan {
    pub points: Vec<ScanPoint>,
    /// d raw / d ln Λ and d counterterm / d ln Λ (kg·m/s).
    pub raw_slope: f64,
    pub counterterm_slope: f64,
    pub residual_slope: f64,
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Raw, counterterm and renormalized E₀×B₀ momentum at each cutoff (1/m)
/// for a system at rest in the given fields.
pub fn cutoff_independence_scan(
    sys: &OscillatorSystem,
    fields: &FieldConfig,
    lambdas: &[f64],
    opts: &NumericOptions,
) -> Result<CutoffScan> {
    if lambdas.len() < 3 {
        return Err(Error::TooFewCutoffs { needed: 3, got: lambdas.len() });
    }
    for &l in lambdas {
        ensure_positive("lambda", l)?;
    }
    let (lo, hi) = lambdas
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &l| (a.min(l), b.max(l)));
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter {
            name: "lambdas",
            reason: format!("cutoffs must span at least two decades, got {lo:e}..{hi:e}"),
        });
    }
    let u = fields.exb_direction().ok_or_else(|| Error::InvalidParameter {
        name: "fields",
        reason: "the scan needs E0 x B0 != 0".into(),
    })?;
    let q0 = classical_pseudo_momentum(sys, fields, &Vec3::zeros());
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let mut o = *opts;
        o.cutoff = Cutoff::new(lambda)?;
        let b = vacuum_momentum_numeric(sys, fields, &q0, &o)?;
        points.push(ScanPoint {
            lambda,
            raw: b.exb_raw.dot(&u),
            counterterm: b.counterterm.dot(&u),
            renormalized: b.exb_renormalized.dot(&u),
            report: renormalization_report(sys, lambda)?,
        });
    }
    let x: Vec<f64> = points.iter().map(|p| p.lambda.ln()).collect();
    let col = |f: fn(&ScanPoint) -> f64| points.iter().map(f).collect::<Vec<_>>();
    let raw_slope = fit_slope(&x, &col(|p| p.raw));
    let counterterm_slope = fit_slope(&x, &col(|p| p.counterterm));
    let residual_slope = fit_slope(&x, &col(|p| p.renormalized.abs().ln()));
    for p in &mut points {
        p.report.residual_slope = residual_slope;
    }
    Ok(CutoffScan { points, raw_slope, counterterm_slope, residual_slope })
}
