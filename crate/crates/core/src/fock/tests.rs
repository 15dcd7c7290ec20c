use super::*;
use crate::system::classical_pseudo_momentum;
use nalgebra::DMatrix;

fn hydrogen() -> (OscillatorSystem, FieldConfig) {
    let sys = OscillatorSystem::hydrogen_like(10.0).unwrap();
    let f = FieldConfig::new(Vec3::new(1e5, 0.0, 0.0), Vec3::new(0.0, 0.0, 17.0)).unwrap();
    (sys, f)
}

fn toy(coupling: f64) -> (OscillatorSystem, FieldConfig, DiscretizedModel) {
    let (sys, f) = hydrogen();
    let q0 = classical_pseudo_momentum(&sys, &f, &Vec3::new(2e3, -1e3, 0.0));
    let model = DiscretizedModel::toy(&sys, &f, q0, coupling).unwrap();
    (sys, f, model)
}

fn one_mode(sys: &OscillatorSystem, osc_nmax: usize, q0: Vec3) -> DiscretizedModel {
    let k = Vec3::new(0.3, -0.2, 0.9).normalize() * (1.2 / sys.sigma());
    let eps = polarization_basis(&k.normalize())[1];
    let amp = 0.01 * ModeAmplitude::new(1e-27).unwrap().squared(&sys.constants, k.norm()).sqrt();
    DiscretizedModel::new(osc_nmax, vec![DiscreteMode { k, polarization: eps, amplitude: amp }], 1, q0)
}

fn dense(op: &SparseHermitian) -> DMatrix<C64> {
    op.to_dense()
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn zero_modes_give_the_oscillator_spectrum() {
    let (sys, f) = hydrogen();
    let q0 = classical_pseudo_momentum(&sys, &f, &Vec3::new(1e3, 0.0, 0.0));
    let model = DiscretizedModel::new(2, vec![], 1, q0);
    let h = build_hamiltonian(&sys, &f, &model).unwrap();
    let spec = dense_spectrum(&h);
    let hw = sys.hbar_omega0();
    let recoil = q0.norm_squared() / (2.0 * sys.total_mass());
    let mut expected: Vec<f64> = model.levels().iter().map(|l| hw * (l.shell() as f64 + 1.5) + recoil).collect();
    expected.sort_by(f64::total_cmp);
    for (a, b) in spec.iter().zip(&expected) {
        assert!((a - b).abs() <= 1e-12 * b);
    }
}

#[test]
fn zero_coupling_is_diagonal() {
    let (sys, f, model) = toy(0.1);
    let h = build_hamiltonian(&sys, &f, &model.clone().with_coupling_scale(0.0)).unwrap();
    assert!(h.off_diagonal().rows.iter().all(|r| r.is_empty()));
    let g = exact_ground_state(&h, 1e-12).unwrap();
    let k = &sys.constants;
    let zero_point: f64 = model.modes.iter().map(|m| 0.5 * k.hbar * k.c * m.k.norm()).sum();
    let expected = 1.5 * sys.hbar_omega0() + zero_point + model.q0.norm_squared() / (2.0 * sys.total_mass());
    assert!((g.energy / expected - 1.0).abs() < 1e-13);
}

#[test]
fn hamiltonian_matches_hand_built_matrix() {
    let (sys, f) = hydrogen();
    let q0 = classical_pseudo_momentum(&sys, &f, &Vec3::new(0.0, 5e3, 0.0));
    let model = one_mode(&sys, 2, q0);
    let h = build_hamiltonian(&sys, &f, &model).unwrap();

    let levels = levels_per_axis(2);
    let n = levels.len();
    let md = model.modes[0];
    let kc = &sys.constants;
    let ctx = OmegaContext::new(sys, f, q0, md.k, md.polarization).unwrap();
    let mut hand = DMatrix::<C64>::zeros(2 * n, 2 * n);
    let zp = 0.5 * kc.hbar * kc.c * md.k.norm();
    for (i, l) in levels.iter().enumerate() {
        let osc = sys.hbar_omega0() * (l.shell() as f64 + 1.5);
        hand[(i, i)] = C64::new(osc + q0.norm_squared() / (2.0 * sys.total_mass()) + zp, 0.0);
        let q1 = q0 - md.k * kc.hbar;
        hand[(n + i, n + i)] = C64::new(
            osc + q1.norm_squared() / (2.0 * sys.total_mass()) + 3.0 * zp,
            0.0,
        );
        for (j, s) in levels.iter().enumerate() {
            // emission from ⟨s| in the vacuum sector to |l⟩ with one photon
            let w = omega_element(&ctx, s, l).conj() * (sys.e_charge * md.amplitude);
            hand[(n + i, j)] = w;
            hand[(j, n + i)] = w.conj();
        }
    }
    assert!(max_abs(&(dense(&h) - &hand)) <= 1e-14 * max_abs(&hand));
    let a = dense_spectrum(&h);
    let mut b: Vec<f64> = nalgebra::SymmetricEigen::new(hand).eigenvalues.iter().copied().collect();
    b.sort_by(f64::total_cmp);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-12 * y.abs());
    }
}

#[test]
fn hamiltonian_and_momentum_are_hermitian() {
    let (sys, f, model) = toy(0.1);
    let h = dense(&build_hamiltonian(&sys, &f, &model).unwrap());
    assert_eq!(h.adjoint(), h);
    let ops = pseudo_momentum_operator(&sys, &f, &model).unwrap();
    for op in ops.canonical().iter().chain(ops.delta_a.iter()).chain(ops.dipole.iter()) {
        let d = dense(op);
        assert_eq!(d.adjoint(), d);
    }
}

#[test]
fn eigensolver_examples() {
    let d = SparseHermitian::diagonal(&[3.0, -1.5, 2.0, 7.0]);
    let g = exact_ground_state(&d, 1e-12).unwrap();
    assert!((g.energy + 1.5).abs() < 1e-14);
    assert!((g.vector[1].norm() - 1.0).abs() < 1e-12);

    let (gap, c) = (1.3, 0.4);
    let mut m = SparseHermitian::diagonal(&[0.0, gap]);
    m.add_pair(0, 1, C64::new(c, 0.0));
    let g = exact_ground_state(&m, 1e-12).unwrap();
    let closed = (gap - (gap * gap + 4.0 * c * c).sqrt()) / 2.0;
    assert!((g.energy - closed).abs() < 1e-14);
}

#[test]
fn lanczos_agrees_with_dense_diagonalization() {
    let (sys, f, model) = toy(0.1);
    let h = build_hamiltonian(&sys, &f, &model).unwrap();
    let a = exact_ground_state(&h, 1e-12).unwrap();
    let b = dense_ground_state(&h);
    assert!(a.residual <= 1e-10);
    assert!((a.energy - b.energy).abs() <= 1e-12 * h.norm_bound());
    let overlap: C64 = a.vector.iter().zip(&b.vector).map(|(x, y)| x.conj() * y).sum();
    assert!((overlap.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn dimension_limit_is_enforced() {
    let (sys, f, mut model) = toy(0.1);
    model.max_photons_per_mode = 30;
    assert!(matches!(build_hamiltonian(&sys, &f, &model), Err(Error::DimensionOverflow { .. })));
    let mut bad = model.clone();
    bad.max_photons_per_mode = 1;
    bad.modes[0].polarization = bad.modes[0].k.normalize();
    assert!(build_hamiltonian(&sys, &f, &bad).is_err());
}

#[test]
fn momentum_forms_agree() {
    let (sys, f, model) = toy(0.1);
    let ops = pseudo_momentum_operator(&sys, &f, &model).unwrap();
    let (a, b) = (ops.canonical(), ops.kinetic_form());
    let scale = model.zero_point_momentum(&sys).norm();
    for j in 0..3 {
        assert!(max_abs(&(dense(&a[j]) - dense(&b[j]))) <= 1e-12 * scale);
    }
}

#[test]
fn pseudo_momentum_is_the_block_label() {
    let (sys, f, model) = toy(0.1);
    let ops = pseudo_momentum_operator(&sys, &f, &model).unwrap();
    let h = build_hamiltonian(&sys, &f, &model).unwrap();
    let g = exact_ground_state(&h, 1e-12).unwrap();
    let scale = model.zero_point_momentum(&sys).norm();
    let k = ops.canonical();
    let mut commutator = 0.0f64;
    for (j, kj) in k.iter().enumerate() {
        let kpsi = kj.matvec(&g.vector);
        let a = h.matvec(&kpsi);
        let b = kj.matvec(&h.matvec(&g.vector));
        let c: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        commutator = commutator.max(c / (h.norm_bound() * scale));
        let e = kj.sandwich(&g.vector, &g.vector).re;
        assert!((e - model.q0[j]).abs() <= 1e-12 * scale);
    }
    assert!(commutator <= 1e-12);

    let zero = DiscretizedModel::new(2, vec![], 1, model.q0);
    let ops = pseudo_momentum_operator(&sys, &f, &zero).unwrap();
    let mut psi = vec![C64::new(0.0, 0.0); zero.dimension()];
    psi[0] = C64::new(1.0, 0.0);
    let k = ops.canonical();
    for (kj, q) in k.iter().zip(zero.q0.iter()) {
        assert!((kj.sandwich(&psi, &psi).re - q).abs() <= 1e-15 * zero.q0.norm());
    }
}

#[test]
fn one_photon_state_carries_its_momentum() {
    let (sys, f, model) = toy(0.1);
    let ops = pseudo_momentum_operator(&sys, &f, &model).unwrap();
    let n = model.levels().len();
    let mut psi = vec![C64::new(0.0, 0.0); model.dimension()];
    psi[n] = C64::new(1.0, 0.0);
    let hbar = sys.constants.hbar;
    let k = model.modes[0].k;
    for j in 0..3 {
        let field = ops.field[j].sandwich(&psi, &psi).re;
        assert!((field - hbar * k[j]).abs() <= 1e-15 * hbar * k.norm());
        let with_zero_point = field + 0.5 * hbar * k[j];
        assert!((with_zero_point - 1.5 * hbar * k[j]).abs() <= 1e-15 * hbar * k.norm());
    }
}

#[test]
fn perturbation_without_coupling_is_unperturbed() {
    let (sys, _, model) = toy(0.1);
    let h0 = unperturbed_energies(&sys, &model);
    let w = SparseHermitian::zeros(h0.len());
    let p = perturbative_ground_state(&h0, &w, 0, 0.0, |i| i.to_string()).unwrap();
    assert_eq!(p.orders[0][0], C64::new(1.0, 0.0));
    assert!(p.orders[1].iter().chain(&p.orders[2]).all(|z| z.norm() == 0.0));
}

#[test]
fn perturbation_matches_two_level_series() {
    let gap = 2.0;
    let err = |c: f64| {
        let mut w = SparseHermitian::zeros(2);
        w.add_pair(0, 1, C64::new(c, 0.0));
        let p = perturbative_ground_state(&[0.0, gap], &w, 0, 0.0, |i| i.to_string()).unwrap();
        let mut h = SparseHermitian::diagonal(&[0.0, gap]);
        h.add_pair(0, 1, C64::new(c, 0.0));
        let g = dense_ground_state(&h);
        let phase = g.vector[0] / g.vector[0].norm();
        let approx: Vec<C64> = (0..2).map(|i| p.orders[0][i] + p.orders[1][i] + p.orders[2][i]).collect();
        approx.iter().zip(&g.vector).map(|(a, b)| (a - b / phase).norm()).fold(0.0, f64::max)
    };
    let (a, b) = (err(0.02), err(0.01));
    let slope = (a / b).log2();
    assert!(slope > 2.9, "{slope}");
}

#[test]
fn degenerate_reference_is_reported() {
    let w = SparseHermitian::zeros(3);
    let e = perturbative_ground_state(&[1.0, 2.0, 1.0], &w, 0, 1e-12, |i| format!("s{i}")).unwrap_err();
    assert_eq!(
        e,
        Error::DegenerateDenominator { reference: "s0".into(), other: "s2".into(), gap: 0.0 }
    );
}

#[test]
fn engines_agree_on_the_toy_model() {
    let (sys, f, model) = toy(0.1);
    let c = compare_engines(&sys, &f, &model, &[1.0, 0.5, 0.25, 0.125]).unwrap();
    assert!(c.exponent >= 2.7, "{}", c.exponent);
    assert!(c.engine_mismatch <= 1e-8, "{}", c.engine_mismatch);
    assert!(c.k_deviation <= 1e-12);
    assert!(c.differences.windows(2).all(|d| d[1] < d[0]));
}

#[test]
fn mixed_field_momentum_is_odd_in_b() {
    let (sys, f) = hydrogen();
    let model = DiscretizedModel::toy(&sys, &f, Vec3::zeros(), 0.1).unwrap();
    let run = |e: Vec3, b: Vec3| {
        let fields = FieldConfig::new(e, b).unwrap();
        let mut m = model.clone();
        m.q0 = classical_pseudo_momentum(&sys, &fields, &Vec3::zeros());
        let c = compare_engines(&sys, &fields, &m, &[1.0]).unwrap();
        (c.perturbative[0], c.engine[0])
    };
    let z = Vec3::zeros();
    let mixed = |b: Vec3| {
        let (a, b_, c, d) = (run(f.e0, b), run(f.e0, z), run(z, b), run(z, z));
        (a.0 - b_.0 - c.0 + d.0, a.1 - b_.1 - c.1 + d.1)
    };
    let u = f.exb_direction().unwrap();
    let (pp, ep) = mixed(f.b0);
    let (pm, em) = mixed(-f.b0);
    for (plus, minus) in [(pp, pm), (ep, em)] {
        let (a, b) = (plus.dot(&u), minus.dot(&u));
        assert!(a != 0.0);
        assert!((a + b).abs() <= 1e-3 * a.abs(), "{a} {b}");
    }
    assert!((pp.dot(&u) / ep.dot(&u) - 1.0).abs() < 1e-3);
}
