use serde::Serialize;

use super::{
    basis_label, build_hamiltonian, coupling_matrix, exact_ground_state, perturbative_ground_state,
    pseudo_momentum_operator, unperturbed_energies, DiscretizedModel, VectorOperator,
};
use crate::error::Result;
use crate::oscillator::C64;
use crate::perturbation::discrete_mode_momentum;
use crate::system::{FieldConfig, OscillatorSystem, Vec3};

/// Exact and perturbative vacuum momentum ⟨e·ΔA + e·B₀×r + Σħk·n_k⟩ − (its
/// unperturbed value) over a sweep of the coupling scale s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngineComparison {
    pub scales: Vec<f64>,
    pub exact: Vec<Vec3>,
    pub perturbative: Vec<Vec3>,
    /// Discrete-mode engine evaluation at each scale.
    pub engine: Vec<Vec3>,
    pub differences: Vec<f64>,
    /// Log-log slope of |exact − perturbative| against s.
    pub exponent: f64,
    /// max over s of |perturbative − engine| / |engine|.
    pub engine_mismatch: f64,
    /// max over s of |⟨K⟩_exact − Q₀| / max(|Q₀|, |Σħk/2|) (canonical form, zero point removed).
    pub k_deviation: f64,
}

fn expect(op: &VectorOperator, x: &[C64]) -> Vec3 {
    Vec3::new(op[0].sandwich(x, x).re, op[1].sandwich(x, x).re, op[2].sandwich(x, x).re)
}

pub fn compare_engines(
    sys: &OscillatorSystem,
    fields: &FieldConfig,
    model: &DiscretizedModel,
    scales: &[f64],
) -> Result<EngineComparison> {
    let mut out = EngineComparison {
        scales: scales.to_vec(),
        exact: Vec::new(),
        perturbative: Vec::new(),
        engine: Vec::new(),
        differences: Vec::new(),
        exponent: f64::NAN,
        engine_mismatch: 0.0,
        k_deviation: 0.0,
    };
    let h0 = unperturbed_energies(sys, model);
    let gap = 1e-9 * sys.hbar_omega0();
    for &s in scales {
        let m = model.clone().with_coupling_scale(s * model.coupling_scale);
        let ops = pseudo_momentum_operator(sys, fields, &m)?;
        let zeroth = ops.vacuum_zeroth();
        let h = build_hamiltonian(sys, fields, &m)?;
        let ground = exact_ground_state(&h, 1e-12)?;
        let mut psi0 = vec![C64::new(0.0, 0.0); h.dim];
        psi0[0] = C64::new(1.0, 0.0);
        let base = expect(&zeroth, &psi0);
        let exact = expect(&zeroth, &ground.vector) + expect(&ops.delta_a, &ground.vector) - base;

        let w = coupling_matrix(sys, fields, &m)?;
        let pert = perturbative_ground_state(&h0, &w, 0, gap, |i| basis_label(&m, i))?;
        let mut p = [0.0; 3];
        for j in 0..3 {
            let o = pert.expectation(&zeroth[j], &ops.delta_a[j]);
            p[j] = o[1] + o[2];
        }
        let pert = Vec3::from(p);

        let mut modes = m.modes.clone();
        modes.iter_mut().for_each(|md| md.amplitude *= m.coupling_scale);
        let engine = discrete_mode_momentum(sys, fields, &m.q0, &modes, &m.levels())?.total();

        let k = expect(&ops.canonical(), &ground.vector);
        let q = m.q0.norm().max(m.zero_point_momentum(sys).norm());
        out.k_deviation = out.k_deviation.max((k - m.q0).norm() / q);
        out.engine_mismatch = out.engine_mismatch.max((pert - engine).norm() / engine.norm());
        out.differences.push((exact - pert).norm());
        out.exact.push(exact);
        out.perturbative.push(pert);
        out.engine.push(engine);
    }
    if scales.len() >= 2 {
        let x: Vec<f64> = scales.iter().map(|s| s.ln()).collect();
        let y: Vec<f64> = out.differences.iter().map(|d| d.ln()).collect();
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        out.exponent = sxy / sxx;
    }
    Ok(out)
}
