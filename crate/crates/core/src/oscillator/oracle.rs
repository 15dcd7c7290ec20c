//! Independent check of the closed-form matrix elements: explicit Hermite
//! functions integrated by adaptive quadrature, one axis at a time.

use super::{OscLevel, OscParams, C64};
use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::{adaptive, QuadOptions};
use crate::system::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    Identity,
    PlaneWave(Vec3),
    Position(usize),
    Momentum(usize),
}

/// Normalized Hermite functions ψ_0..=ψ_n at ξ = x/σ (dimensionless).
pub fn hermite_functions(n: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 2);
    out.push(std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp());
    if n >= 1 {
        out.push(std::f64::consts::SQRT_2 * xi * out[0]);
    }
    for j in 1..n {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * xi * out[j] - (jf / (jf + 1.0)).sqrt() * out[j - 1];
        out.push(next);
    }
    out
}

enum AxisOp {
    Overlap,
    Phase(f64),
    X,
    D,
}

fn axis_integral(m: usize, n: usize, op: AxisOp, tol: f64) -> Result<(C64, f64)> {
    let top = m.max(n) + 1;
    let half = (2.0 * top as f64 + 1.0).sqrt() + 12.0;
    let opts = QuadOptions {
        abs_tol: tol,
        rel_tol: 0.0,
        max_subdivisions: 4000,
    };
    let integrand = |xi: f64, part: usize| -> f64 {
        let h = hermite_functions(top, xi);
        let bra = h[m];
        let (re, im) = match op {
            AxisOp::Overlap => (bra * h[n], 0.0),
            AxisOp::Phase(ks) => {
                let v = bra * h[n];
                (v * (ks * xi).cos(), v * (ks * xi).sin())
            }
            AxisOp::X => (bra * xi * h[n], 0.0),
            AxisOp::D => {
                // ψ_n' = √(n/2) ψ_{n-1} − √((n+1)/2) ψ_{n+1}
                let nf = n as f64;
                let lower = if n > 0 { (nf / 2.0).sqrt() * h[n - 1] } else { 0.0 };
                (bra * (lower - ((nf + 1.0) / 2.0).sqrt() * h[n + 1]), 0.0)
            }
        };
        if part == 0 {
            re
        } else {
            im
        }
    };
    let wrap = |r: Result<crate::quadrature::QuadResult>| {
        r.map_err(|e| match e {
            Error::QuadratureDiverged { estimate, error, .. } => {
                Error::OracleNotConverged { estimate, error, tol }
            }
            other => other,
        })
    };
    let re = wrap(adaptive(|x| integrand(x, 0), -half, half, opts))?;
    let im = wrap(adaptive(|x| integrand(x, 1), -half, half, opts))?;
    Ok((C64::new(re.value, im.value), re.error + im.error))
}

/// Evaluates ⟨l| op |s⟩ by quadrature over Hermite functions; absolute accuracy `tol`
/// on the dimensionless value (before multiplying by σ or ħ/σ).
pub fn numeric_element_oracle(
    params: &OscParams,
    kind: OperatorKind,
    l: &OscLevel,
    s: &OscLevel,
    tol: f64,
) -> Result<C64> {
    ensure_positive("tol", tol)?;
    if l.shell() > 12 || s.shell() > 12 {
        return Err(Error::InvalidParameter {
            name: "level",
            reason: "oracle supports shells N <= 12".into(),
        });
    }
    let per_axis_tol = tol / 16.0;
    let mut value = C64::new(1.0, 0.0);
    let mut err = 0.0;
    for a in 0..3 {
        let op = match kind {
            OperatorKind::Identity => AxisOp::Overlap,
            OperatorKind::PlaneWave(k) => AxisOp::Phase(k[a] * params.sigma),
            OperatorKind::Position(ax) if ax == a => AxisOp::X,
            OperatorKind::Momentum(ax) if ax == a => AxisOp::D,
            _ => AxisOp::Overlap,
        };
        let (v, e) = axis_integral(l.n[a], s.n[a], op, per_axis_tol)?;
        err += e * (1.0 + value.norm());
        value *= v;
    }
    if err > tol {
        return Err(Error::OracleNotConverged {
            estimate: value.re,
            error: err,
            tol,
        });
    }
    let scale = match kind {
        OperatorKind::Position(_) => C64::new(params.sigma, 0.0),
        // p = −iħ d/dx
        OperatorKind::Momentum(_) => C64::new(0.0, -params.hbar / params.sigma),
        _ => C64::new(1.0, 0.0),
    };
    Ok(value * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::{momentum_element, plane_wave_element, position_element};
    use proptest::prelude::*;

    fn p() -> OscParams {
        OscParams::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn normalization() {
        let g = OscLevel::GROUND;
        let v = numeric_element_oracle(&p(), OperatorKind::Identity, &g, &g, 1e-12).unwrap();
        assert!((v - 1.0).norm() < 1e-12);
    }

    #[test]
    fn plane_wave_cases_agree() {
        let pp = p();
        let cases = [
            (Vec3::zeros(), OscLevel::GROUND),
            (Vec3::zeros(), OscLevel::new(1, 0, 1)),
            (Vec3::new(1.0, 0.0, 0.0), OscLevel::new(1, 0, 0)),
        ];
        for (k, l) in cases {
            let num = numeric_element_oracle(&pp, OperatorKind::PlaneWave(k), &l, &OscLevel::GROUND, 1e-12).unwrap();
            assert!((num - plane_wave_element(&pp, &k, &l)).norm() < 1e-10, "{l}: {num}");
        }
    }

    #[test]
    fn ladder_elements_agree() {
        let pp = OscParams::new(2.0, 0.5, 1.3).unwrap();
        let g = OscLevel::GROUND;
        let x1 = OscLevel::new(1, 0, 0);
        let x = numeric_element_oracle(&pp, OperatorKind::Position(0), &g, &x1, 1e-12).unwrap();
        assert!((x.re - position_element(&pp, &g, &x1, 0)).abs() < 1e-10 * pp.sigma);
        let m = numeric_element_oracle(&pp, OperatorKind::Momentum(0), &g, &x1, 1e-12).unwrap();
        assert!((m - momentum_element(&pp, &g, &x1, 0)).norm() < 1e-10 * pp.hbar / pp.sigma);
        let l = OscLevel::new(3, 2, 1);
        let s = OscLevel::new(2, 2, 1);
        let m = numeric_element_oracle(&pp, OperatorKind::Momentum(0), &l, &s, 1e-12).unwrap();
        assert!((m - momentum_element(&pp, &l, &s, 0)).norm() < 1e-10 * pp.hbar / pp.sigma);
    }

    #[test]
    fn rejects_high_shells() {
        let l = OscLevel::new(13, 0, 0);
        assert!(numeric_element_oracle(&p(), OperatorKind::Identity, &l, &l, 1e-8).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn random_plane_waves(ks in 0.0..3.0f64, theta in 0.0..3.0f64, phi in 0.0..6.2f64,
                              nx in 0usize..3, ny in 0usize..2, nz in 0usize..2) {
            let k = Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()) * ks;
            let l = OscLevel::new(nx, ny, nz);
            let num = numeric_element_oracle(&p(), OperatorKind::PlaneWave(k), &l, &OscLevel::GROUND, 1e-11).unwrap();
            prop_assert!((num - plane_wave_element(&p(), &k, &l)).norm() < 1e-9);
        }
    }
}
