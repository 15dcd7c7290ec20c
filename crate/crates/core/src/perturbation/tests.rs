use super::*;
use crate::oscillator::oracle::hermite_functions;
use crate::quadrature::{adaptive, QuadOptions};
use crate::system::classical_pseudo_momentum;
use crate::vacuum::Cutoff;
use crate::units::{energy_to_angular_frequency, ev_to_joule, CODATA_2018};
use proptest::prelude::*;

fn hydrogen() -> (OscillatorSystem, FieldConfig) {
    let sys = OscillatorSystem::hydrogen_like(10.0).unwrap();
    let f = FieldConfig::new(Vec3::new(1e5, 0.0, 0.0), Vec3::new(0.0, 0.0, 17.0)).unwrap();
    (sys, f)
}

fn pair(m1: f64, m2: f64) -> OscillatorSystem {
    let k = CODATA_2018;
    let w = energy_to_angular_frequency(&k, ev_to_joule(&k, 10.0));
    OscillatorSystem::new(m1, m2, k.e_charge, w).unwrap()
}

fn alpha() -> f64 {
    fine_structure(&CODATA_2018)
}

/// ∫ψ_m(ξ) f(ξ) ψ_n(ξ) dξ by adaptive quadrature.
fn q1d(f: impl Fn(f64) -> C64, m: usize, n: usize) -> C64 {
    let top = m.max(n);
    let g = |xi: f64| {
        let h = hermite_functions(top, xi);
        f(xi) * (h[m] * h[n])
    };
    let opts = QuadOptions::absolute(1e-15);
    let re = adaptive(|x| g(x).re, -14.0, 14.0, opts).unwrap().value;
    let im = adaptive(|x| g(x).im, -14.0, 14.0, opts).unwrap().value;
    C64::new(re, im)
}

/// Ω_{l,0} for k ∥ ẑ and ε = x̂, assembled from one-dimensional quadratures.
fn omega_by_quadrature(ctx: &OmegaContext, l: &OscLevel) -> C64 {
    let sys = &ctx.sys;
    let sigma = sys.sigma();
    let hbar = sys.constants.hbar;
    let m = sys.total_mass();
    let (q1, q2) = ctx.phase_vectors();
    let eps = ctx.polarization;
    let exb = eps.cross(&ctx.fields.b0);
    let [lx, ly, lz] = l.n;
    let d = |a: usize| if a == 0 { 1.0 } else { 0.0 };
    let pos = |a: usize| q1d(|x| C64::new(x, 0.0), a, 0) * sigma;
    let mom = |a: usize| q1d(|x| C64::new(-x, 0.0), a, 0) * C64::new(0.0, -hbar / sigma);
    let mut total = C64::new(0.0, 0.0);
    for (q, mass, sign) in [(q1, sys.m1, 1.0), (q2, sys.m2, -1.0)] {
        let kz = q.z * sigma;
        let ez = q1d(|x| C64::from_polar(1.0, kz * x), lz, 0);
        let plain = ez * d(lx) * d(ly);
        let r = [
            pos(lx) * d(ly) * ez,
            pos(ly) * d(lx) * ez,
            q1d(|x| C64::from_polar(x, kz * x), lz, 0) * (sigma * d(lx) * d(ly)),
        ];
        let px = mom(lx) * d(ly) * ez;
        let mut magnetic = plain * exb.dot(&ctx.r0());
        for j in 0..3 {
            magnetic += r[j] * exb[j];
        }
        let inner = magnetic * (sign * sys.e_charge / mass) - plain * (sign * eps.dot(&ctx.q0) / m)
            - (px * eps.x - plain * eps.dot(&ctx.p0())) / mass;
        total += C64::from_polar(1.0, q.dot(&ctx.r0())) * inner;
    }
    total
}

#[test]
fn omega_matches_quadrature_oracle() {
    let (sys, _) = hydrogen();
    let f = FieldConfig::new(Vec3::new(1e9, 4e8, -2e8), Vec3::new(3e3, -5e3, 17e3)).unwrap();
    let q0 = classical_pseudo_momentum(&sys, &f, &Vec3::new(2e3, -1e3, 5e2));
    let k = Vec3::new(0.0, 0.0, 1.0 / sys.sigma());
    let ctx = OmegaContext::new(sys, f, q0, k, Vec3::x()).unwrap();
    let levels = [
        OscLevel::new(1, 0, 0),
        OscLevel::new(0, 1, 0),
        OscLevel::new(0, 0, 1),
        OscLevel::new(0, 0, 2),
        OscLevel::GROUND,
    ];
    for l in &levels {
        let direct = omega_element(&ctx, l, &OscLevel::GROUND);
        let oracle = omega_by_quadrature(&ctx, l);
        assert!((direct - oracle).norm() <= 1e-8 * direct.norm(), "{l}: {direct} vs {oracle}");
    }
}

#[test]
fn omega_selection_rules() {
    let sys = pair(CODATA_2018.m_proton, CODATA_2018.m_electron);
    let zero = FieldConfig::zero();
    let k = Vec3::new(0.0, 0.0, 0.7 / sys.sigma());
    let ctx = OmegaContext::new(sys, zero, Vec3::zeros(), k, Vec3::x()).unwrap();
    assert_eq!(omega_element(&ctx, &OscLevel::GROUND, &OscLevel::GROUND), C64::new(0.0, 0.0));
    assert_eq!(omega_element(&ctx, &OscLevel::new(0, 0, 1), &OscLevel::GROUND), C64::new(0.0, 0.0));
    assert!(omega_element(&ctx, &OscLevel::new(1, 0, 0), &OscLevel::GROUND).norm() > 0.0);
}

#[test]
fn omega_at_zero_wavevector() {
    let sys = pair(3.0 * CODATA_2018.m_electron, CODATA_2018.m_electron);
    let f = FieldConfig::new(Vec3::new(2e8, 1e8, 0.0), Vec3::zeros()).unwrap();
    let q0 = Vec3::new(1e-27, 2e-27, 0.0);
    let eps = Vec3::new(0.6, 0.0, 0.8);
    let ctx = OmegaContext::new(sys, f, q0, Vec3::zeros(), eps).unwrap();
    let params = OscParams::from_system(&sys);
    let mu = sys.reduced_mass();
    for l in crate::oscillator::levels_up_to(2) {
        let expected: C64 = (0..3)
            .map(|j| crate::oscillator::momentum_element(&params, &l, &OscLevel::GROUND, j) * eps[j])
            .sum::<C64>()
            * (-1.0 / mu);
        let got = omega_element(&ctx, &l, &OscLevel::GROUND);
        assert!((got - expected).norm() <= 1e-12 * expected.norm().max(1e-30), "{l}");
    }
}

#[test]
fn context_validation() {
    let (sys, f) = hydrogen();
    let k = Vec3::new(0.0, 0.0, 1e9);
    assert!(OmegaContext::new(sys, f, Vec3::zeros(), k, Vec3::new(2.0, 0.0, 0.0)).is_err());
    assert!(OmegaContext::new(sys, f, Vec3::zeros(), k, Vec3::z()).is_err());
    assert!(OmegaContext::new(sys, f, Vec3::zeros(), k, Vec3::y()).is_ok());
}

#[test]
fn a_squared_term_does_not_couple_matter() {
    // e^{iq·r}e^{−iq·r} = 1: the same-mode A² vertex only returns the ground state
    let sys = pair(CODATA_2018.m_proton, CODATA_2018.m_electron);
    let params = OscParams::from_system(&sys);
    let q = Vec3::new(0.3, -0.2, 0.5) / sys.sigma();
    let levels = crate::oscillator::levels_up_to(14);
    for l in crate::oscillator::levels_up_to(2) {
        let s: C64 = levels
            .iter()
            .map(|m| {
                crate::oscillator::plane_wave_between(&params, &q, &l, m)
                    * crate::oscillator::plane_wave_between(&params, &-q, m, &OscLevel::GROUND)
            })
            .sum();
        let expected = if l == OscLevel::GROUND { 1.0 } else { 0.0 };
        assert!((s - expected).norm() < 1e-10, "{l} {s}");
    }
}


#[test]
fn k1_examples() {
    let k = CODATA_2018;
    let (sys, f) = hydrogen();
    assert_eq!(casimir_k1(&pair(k.m_electron, k.m_electron), &f), Vec3::zeros());
    let classical = static_polarizability(&sys) * f.e_cross_b().norm();
    let ratio = casimir_k1(&sys, &f).norm() / classical;
    let independent = 0.424_413_181_578_387_6 * alpha() * ((k.m_proton - k.m_electron) / (k.m_proton + k.m_electron))
        * (k.m_proton / k.m_electron).ln();
    assert!((ratio - independent).abs() < 1e-12 * independent);
    assert!((ratio - 0.0233).abs() < 0.0005, "{ratio}");
    // same direction as the classical −α(0)E×B
    assert!(casimir_k1(&sys, &f).dot(&-f.e_cross_b()) > 0.0);

    let e = std::f64::consts::E;
    let s = pair(e * k.m_electron, k.m_electron);
    let mag = casimir_k1(&s, &f).norm() / (static_polarizability(&s) * f.e_cross_b().norm());
    let expected = 4.0 * alpha() / (3.0 * PI) * (e - 1.0) / (e + 1.0);
    assert!((mag - expected).abs() < 1e-14);
}

#[test]
fn k2_examples() {
    let k = CODATA_2018;
    let target = -4.0 / (15.0 * PI.sqrt());
    assert!((k2_bracket(1.0, 1.0) - target).abs() < 1e-12 * target.abs());
    assert!((k2_bracket(1.0, 1.0) + 0.1504).abs() < 1e-4);
    assert!((k2_bracket(1e12, 1.0) - target).abs() < 1e-10);
    let (sys, f) = hydrogen();
    let classical = static_polarizability(&sys) * f.e_cross_b().norm();
    let ratio = casimir_k2(&sys, &f).norm() / classical;
    let plug_in = alpha() * (10.0 / 0.51099895e6 * (1.0 + k.m_electron / k.m_proton)).sqrt() * k2_bracket(k.m_proton, k.m_electron).abs();
    assert!((ratio - plug_in).abs() < 1e-6 * plug_in, "{ratio} {plug_in}");
    assert!((ratio - 4.9e-6).abs() < 0.1e-6, "{ratio}");
}

#[test]
fn doppler_examples() {
    let k = CODATA_2018;
    let (sys, _) = hydrogen();
    assert!((doppler_bound(&sys) - 1.06e-8).abs() < 0.01e-8);
    let heavy = OscillatorSystem::new(2.0 * sys.m1, 2.0 * sys.m2, sys.e_charge, sys.omega0).unwrap();
    assert!((doppler_bound(&heavy) / doppler_bound(&sys) - 0.5).abs() < 1e-14);
    let slow = OscillatorSystem::new(sys.m1, sys.m2, k.e_charge, 1e-30).unwrap();
    assert!(doppler_bound(&slow) < 1e-40);
}

fn rotation(axis: Vec3, angle: f64) -> nalgebra::Rotation3<f64> {
    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_forms_follow_the_fields(
        e in prop::array::uniform3(-1e6..1e6f64),
        b in prop::array::uniform3(-30.0..30.0f64),
        ratio in 1.0..3000.0f64,
        ax in prop::array::uniform3(-1.0..1.0f64),
        angle in 0.0..6.0f64,
    ) {
        let me = CODATA_2018.m_electron;
        let sys = pair(ratio * me, me);
        let (e, b) = (Vec3::from(e), Vec3::from(b));
        let f = FieldConfig::new(e, b).unwrap();
        let k1 = casimir_k1(&sys, &f);
        let k2 = casimir_k2(&sys, &f);
        let scale = k1.norm().max(1e-300);
        prop_assert!((casimir_k1(&sys, &FieldConfig::new(-e, b).unwrap()) + k1).norm() <= 1e-15 * scale);
        prop_assert!((casimir_k1(&sys, &FieldConfig::new(e, -b).unwrap()) + k1).norm() <= 1e-15 * scale);
        prop_assert!((casimir_k2(&sys, &FieldConfig::new(-e, b).unwrap()) + k2).norm() <= 1e-15 * k2.norm().max(1e-300));
        prop_assert!((casimir_k1(&sys.swapped(), &f) - k1).norm() <= 1e-14 * scale);
        if let Some(u) = f.exb_direction() {
            prop_assert!((k1.normalize().cross(&u)).norm() < 1e-10 || k1.norm() == 0.0);
            prop_assert!((k2.normalize().cross(&u)).norm() < 1e-10);
        }
        let r = rotation(Vec3::from(ax) + Vec3::new(0.0, 0.0, 1e-3), angle);
        let rf = FieldConfig::new(r * e, r * b).unwrap();
        prop_assert!((casimir_k1(&sys, &rf) - r * k1).norm() <= 1e-13 * scale);
        prop_assert!((casimir_k2(&sys, &rf) - r * k2).norm() <= 1e-13 * k2.norm().max(1e-300));
    }
}

fn numeric(sys: &OscillatorSystem, f: &FieldConfig, q0: &Vec3, o: &NumericOptions) -> MomentumBreakdown {
    vacuum_momentum_numeric(sys, f, q0, o).unwrap()
}

fn rel(a: &Vec3, b: &Vec3) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn numeric_vanishes_without_fields_or_motion() {
    let (sys, _) = hydrogen();
    let z = Vec3::zeros();
    let b = numeric(&sys, &FieldConfig::zero(), &z, &NumericOptions::default());
    for v in [b.mass_like, b.dipole_qed, b.exb_raw, b.exb_renormalized, b.k1_numeric] {
        assert!(v.norm() == 0.0, "{v:?}");
    }
}

#[test]
fn mass_like_term_follows_the_motion() {
    let (sys, _) = hydrogen();
    let c = CODATA_2018.c;
    let v = Vec3::new(1.0, 2.0, 0.5);
    let q = classical_pseudo_momentum(&sys, &FieldConfig::zero(), &v);
    let b = numeric(&sys, &FieldConfig::zero(), &q, &NumericOptions::default());
    assert!(b.mass_like.cross(&v).norm() <= 1e-12 * b.mass_like.norm() * v.norm());
    let reference = 1.5 * sys.hbar_omega0() / (c * c) * v.norm();
    let ratio = b.mass_like_finite.norm() / reference;
    assert!((0.5..=2.0).contains(&ratio), "{ratio}");
    assert!(b.exb_renormalized.norm() == 0.0);
}

#[test]
fn renormalized_term_matches_closed_form() {
    let (sys, f) = hydrogen();
    let q0 = classical_pseudo_momentum(&sys, &f, &Vec3::zeros());
    let b = numeric(&sys, &f, &q0, &NumericOptions::default());
    let k1 = casimir_k1(&sys, &f);
    assert!(rel(&b.exb_renormalized, &k1) < 0.02);
    assert!(rel(&b.k1_numeric, &k1) < 1e-6);
    assert!(b.oscillating_numeric.norm() < b.casimir_k2.norm());
    assert!(b.dipole_qed.norm() <= 1e-2 * k1.norm());
}

#[test]
fn numeric_converges_in_truncation_tolerance_and_cutoff() {
    let (sys, f) = hydrogen();
    let q0 = classical_pseudo_momentum(&sys, &f, &Vec3::new(2e4, 0.0, 0.0));
    let o = NumericOptions::default();
    let base = numeric(&sys, &f, &q0, &o);
    let mut wider = o;
    wider.n_max += 2;
    assert!(rel(&numeric(&sys, &f, &q0, &wider).exb_renormalized, &base.exb_renormalized) < 5e-3);
    let mut tighter = o;
    tighter.rel_tol /= 10.0;
    assert!(rel(&numeric(&sys, &f, &q0, &tighter).exb_renormalized, &base.exb_renormalized) < 5e-3);
    let mut far = o;
    far.cutoff = Cutoff::new(10.0 * o.cutoff.lambda).unwrap();
    let moved = numeric(&sys, &f, &q0, &far);
    assert!(rel(&moved.exb_renormalized, &base.exb_renormalized) < 1e-2);
    assert!(rel(&moved.exb_raw, &base.exb_raw) > 1e-2);
}

#[test]
fn doppler_flag_has_small_effect() {
    let (sys, f) = hydrogen();
    let q0 = classical_pseudo_momentum(&sys, &f, &Vec3::new(3e5, 1e5, 0.0));
    let o = NumericOptions::default();
    let mut d = o;
    d.doppler = true;
    let a = numeric(&sys, &f, &q0, &o);
    let b = numeric(&sys, &f, &q0, &d);
    assert!(rel(&b.exb_renormalized, &a.exb_renormalized) < 1e-5);
    assert!(rel(&b.mass_like, &a.mass_like) < 1e-5);
}

#[test]
fn dipole_term_vanishes_in_limits() {
    let (sys, f) = hydrogen();
    let o = NumericOptions::default();
    let e_only = FieldConfig::new(f.e0, Vec3::zeros()).unwrap();
    let q = classical_pseudo_momentum(&sys, &e_only, &Vec3::new(1e3, 0.0, 0.0));
    assert!(dipole_qed_correction(&sys, &e_only, &q, &o).unwrap().norm() == 0.0);
    let b_only = FieldConfig::new(Vec3::zeros(), f.b0).unwrap();
    assert!(dipole_qed_correction(&sys, &b_only, &Vec3::zeros(), &o).unwrap().norm() == 0.0);
}

#[test]
fn transverse_term_vanishes() {
    let (sys, f) = hydrogen();
    let o = NumericOptions::default();
    let q = classical_pseudo_momentum(&sys, &FieldConfig::zero(), &Vec3::new(5.0, -1.0, 2.0));
    assert!(transverse_momentum_term(&sys, &FieldConfig::zero(), &q, &o).unwrap().norm() == 0.0);
    let cl = classical_pseudo_momentum(&sys, &f, &Vec3::zeros());
    let t = transverse_momentum_term(&sys, &f, &cl, &o).unwrap();
    assert!(t.norm() <= 1e-12 * cl.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]
    #[test]
    fn transverse_term_vanishes_for_random_fields(
        ex in -1e6f64..1e6, ey in -1e6f64..1e6, bz in 1.0f64..50.0, bx in -10.0f64..10.0,
        vx in -1e4f64..1e4,
    ) {
        let sys = OscillatorSystem::hydrogen_like(10.0).unwrap();
        let f = FieldConfig::new(Vec3::new(ex, ey, 0.0), Vec3::new(bx, 0.0, bz)).unwrap();
        let q = classical_pseudo_momentum(&sys, &f, &Vec3::new(vx, 0.0, 0.0));
        let cl = classical_pseudo_momentum(&sys, &f, &Vec3::zeros());
        let t = transverse_momentum_term(&sys, &f, &q, &NumericOptions::default()).unwrap();
        prop_assert!(t.norm() <= 1e-12 * cl.norm().max(q.norm()));
    }
}
