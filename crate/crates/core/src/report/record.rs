use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Mode, RunConfig, SweepParam, SweepSpec};
use super::output::{fmt_f64, Table};
use crate::error::{Error, Result};
use crate::fock::{compare_engines, DiscretizedModel, EngineComparison};
use crate::perturbation::{casimir_k1, casimir_k2, doppler_bound, vacuum_momentum_numeric, MomentumBreakdown};
use crate::renormalization::{cutoff_independence_scan, renormalization_report, CutoffScan, RenormalizationReport};
use crate::system::{
    anisotropy_parameter, derived_quantities, static_polarizability, DerivedQuantities,
    FieldConfig, OscillatorSystem, Vec3,
};
use crate::units::{audit_momentum_conventions, CONSTANTS_VERSION};

pub const ANISOTROPY_WARNING: f64 = 1e-3;
pub const DOPPLER_WARNING: f64 = 1e-6;

const VELOCITY_NOTE: &str = "A hydrogen velocity of about 5 um/s has been quoted for these parameters. \
The dimensionally consistent SI value is about 0.12 um/s; inserting the polarizability volume into the \
Gaussian form gives about 4 um/s. Neither reading reproduces the quoted figure.";

const K2_NOTE: &str = "A K2/classical ratio of 0.01% has been quoted for hydrogen. The closed form gives about \
4.9e-6 (0.0005%), roughly 20 times smaller; the computed value is reported.";

const OSCILLATING_NOTE: &str = "oscillating_numeric is the numerically integrated non-logarithmic E0xB0 term; \
at leading order in hbar*omega0/(mu*c^2) it cancels, so it sits far below the closed-form casimir_k2.";

/// A dimensionless ratio with a formatted percentage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ratio {
    pub fraction: f64,
    pub percent: String,
}

impl Ratio {
    fn new(fraction: f64) -> Option<Self> {
        let pct = 100.0 * fraction;
        let percent = if pct == 0.0 || pct.abs() >= 1e-2 { format!("{pct:.4}%") } else { format!("{pct:.4e}%") };
        fraction.is_finite().then_some(Self { fraction, percent })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm {
    pub classical: Vec3,
    pub casimir_k1: Vec3,
    pub casimir_k2: Vec3,
    pub k1_over_classical: Option<Ratio>,
    pub k2_over_classical: Option<Ratio>,
    pub doppler_bound: f64,
    /// e|B₀|σ²/ħ with σ the oscillator length.
    pub anisotropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conventions {
    /// |α(0)E₀B₀| (kg·m/s) and that over M (m/s).
    pub p_si: f64,
    pub v_si: f64,
    /// Polarizability-volume reading α_vol·E₀B₀/c and that over M.
    pub p_volume: f64,
    pub v_volume: f64,
    pub alpha_volume_m3: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub config: RunConfig,
    pub config_hash: String,
    pub constants_version: String,
    pub derived: DerivedQuantities,
    pub closed_form: ClosedForm,
    pub conventions: Conventions,
    pub numeric: Option<MomentumBreakdown>,
    pub renormalization: RenormalizationReport,
    pub scan: Option<CutoffScan>,
    pub oracle: Option<EngineComparison>,
    /// Each momentum above divided by M (m/s).
    pub velocities: BTreeMap<String, Vec3>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

fn projected_ratio(x: &Vec3, reference: &Vec3, u: Option<Vec3>) -> Option<Ratio> {
    u.and_then(|u| Ratio::new(x.dot(&u) / reference.dot(&u)))
}

pub fn closed_form(sys: &OscillatorSystem, fields: &FieldConfig) -> Result<ClosedForm> {
    let classical = -fields.e_cross_b() * static_polarizability(sys);
    let k1 = casimir_k1(sys, fields);
    let k2 = casimir_k2(sys, fields);
    let u = fields.exb_direction();
    Ok(ClosedForm {
        classical,
        casimir_k1: k1,
        casimir_k2: k2,
        k1_over_classical: projected_ratio(&k1, &classical, u),
        k2_over_classical: projected_ratio(&k2, &classical, u),
        doppler_bound: doppler_bound(sys),
        anisotropy: anisotropy_parameter(sys, fields, None)?,
    })
}

fn warnings(c: &ClosedForm) -> Vec<String> {
    let mut w = Vec::new();
    if c.anisotropy > ANISOTROPY_WARNING {
        w.push(format!("anisotropy {} exceeds {ANISOTROPY_WARNING:e}", fmt_f64(c.anisotropy)));
    }
    if c.doppler_bound > DOPPLER_WARNING {
        w.push(format!("doppler bound {} exceeds {DOPPLER_WARNING:e}", fmt_f64(c.doppler_bound)));
    }
    w
}

/// Evaluates one config according to its mode (sweep configs evaluate the base point).
pub fn evaluate(config: &RunConfig) -> Result<ResultRecord> {
    config.validate()?;
    let sys = config.system()?;
    let fields = config.fields()?;
    let v = config.v_mps;
    let m = sys.total_mass();
    let derived = derived_quantities(&sys, &fields, &v);
    let cf = closed_form(&sys, &fields)?;
    let audit = audit_momentum_conventions(&sys.constants, derived.alpha0, fields.e0.norm(), fields.b0.norm());
    let conventions = Conventions {
        p_si: audit.p_si,
        v_si: audit.p_si / m,
        p_volume: audit.p_volume,
        v_volume: audit.p_volume / m,
        alpha_volume_m3: audit.alpha_volume,
        note: audit.note.to_string(),
    };
    let opts = config.numeric_options()?;
    let numeric = match config.mode {
        Mode::Numeric => Some(vacuum_momentum_numeric(&sys, &fields, &derived.q0, &opts)?),
        _ => None,
    };
    let scan = match config.mode {
        Mode::Scan => {
            let lambdas: Vec<f64> = config
                .scan_cutoffs_me
                .iter()
                .map(|x| x * sys.constants.compton_wavenumber(sys.constants.m_electron))
                .collect();
            Some(cutoff_independence_scan(&sys, &fields, &lambdas, &opts)?)
        }
        _ => None,
    };
    let oracle = match config.mode {
        Mode::Oracle => {
            let model = DiscretizedModel::toy(&sys, &fields, derived.q0, config.oracle_coupling)?;
            Some(compare_engines(&sys, &fields, &model, &[1.0, 0.5, 0.25, 0.125])?)
        }
        _ => None,
    };

    let mut velocities = BTreeMap::new();
    let mut put = |k: &str, p: Vec3| {
        velocities.insert(k.to_string(), p / m);
    };
    put("q0", derived.q0);
    put("classical", cf.classical);
    put("casimir_k1", cf.casimir_k1);
    put("casimir_k2", cf.casimir_k2);
    if let Some(n) = &numeric {
        put("mass_like", n.mass_like);
        put("mass_like_finite", n.mass_like_finite);
        put("dipole_qed", n.dipole_qed);
        put("exb_raw", n.exb_raw);
        put("counterterm", n.counterterm);
        put("exb_renormalized", n.exb_renormalized);
        put("k1_numeric", n.k1_numeric);
        put("oscillating_numeric", n.oscillating_numeric);
    }

    let mut notes = Vec::new();
    if config.name == "hydrogen" {
        notes.push(VELOCITY_NOTE.to_string());
        notes.push(K2_NOTE.to_string());
    }
    if numeric.is_some() {
        notes.push(OSCILLATING_NOTE.to_string());
    }
    Ok(ResultRecord {
        config_hash: config.hash(),
        constants_version: CONSTANTS_VERSION.to_string(),
        derived,
        warnings: warnings(&cf),
        closed_form: cf,
        conventions,
        numeric,
        renormalization: renormalization_report(&sys, opts.cutoff.lambda)?,
        scan,
        oracle,
        velocities,
        notes,
        config: config.clone(),
    })
}

/// Config with the swept parameter set to `value`.
pub fn sweep_point(base: &RunConfig, param: SweepParam, value: f64) -> Result<RunConfig> {
    let mut c = base.clone();
    let rescale = |v: Vec3, name: &str| -> Result<Vec3> {
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::Config(format!("cannot sweep |{name}| when the base {name} is zero")));
        }
        Ok(v * (value / n))
    };
    match param {
        SweepParam::B0 => c.b0_t = rescale(c.b0_t, "B0")?,
        SweepParam::E0 => c.e0_vpm = rescale(c.e0_vpm, "E0")?,
        SweepParam::Omega0 => c.hbar_omega0_ev = value,
        SweepParam::MassRatio => c.m1_kg = value * c.m2_kg,
    }
    c.sweep = None;
    c.mode = if base.mode == Mode::Numeric { Mode::Numeric } else { Mode::ClosedForm };
    Ok(c)
}

pub fn sweep_values(spec: &SweepSpec) -> Vec<f64> {
    let n = spec.steps - 1;
    (0..spec.steps)
        .map(|i| if i == n { spec.max } else { spec.min + (spec.max - spec.min) * i as f64 / n as f64 })
        .collect()
}

/// One record per sweep point, evaluated concurrently and returned in order.
pub fn run_sweep(base: &RunConfig, spec: &SweepSpec) -> Result<Vec<ResultRecord>> {
    if spec.steps < 2 || spec.min.is_nan() || spec.max.is_nan() || spec.min >= spec.max {
        return Err(Error::Config("sweep range needs min < max and steps >= 2".into()));
    }
    sweep_values(spec)
        .par_iter()
        .map(|&x| evaluate(&sweep_point(base, spec.param, x)?))
        .collect()
}

fn exb(v: &Vec3, fields: &FieldConfig) -> f64 {
    fields.exb_direction().map_or(0.0, |u| v.dot(&u))
}

pub fn sweep_table(spec: &SweepSpec, records: &[ResultRecord]) -> Table {
    let numeric = records.iter().any(|r| r.numeric.is_some());
    let param_doc = format!("swept parameter {} ({})", spec.param.name(), spec.param.unit());
    let mut cols: Vec<(&str, &str)> = vec![
        ("param", param_doc.as_str()),
        ("classical_exb", "classical pseudo-momentum -alpha(0) E0xB0 projected on E0xB0 (kg m/s)"),
        ("k1_exb", "logarithmic Casimir momentum K1 projected on E0xB0 (kg m/s)"),
        ("k2_exb", "non-logarithmic Casimir momentum K2 projected on E0xB0 (kg m/s)"),
        ("k1_over_classical", "K1/classical along E0xB0 (dimensionless)"),
        ("k2_over_classical", "K2/classical along E0xB0 (dimensionless)"),
        ("v_classical", "classical_exb / M (m/s)"),
        ("anisotropy", "e|B0| sigma^2 / hbar (dimensionless)"),
        ("doppler_bound", "hbar omega0 / (M c^2) (dimensionless)"),
    ];
    if numeric {
        cols.push(("renormalized_exb", "numeric renormalized E0xB0 momentum (kg m/s)"));
    }
    cols.push(("warnings", "validity-regime warnings separated by ';' (empty when none)"));
    let mut t = Table::new(&cols);
    let values = sweep_values(spec);
    for (x, r) in values.iter().zip(records) {
        let f = r.config.fields().expect("validated");
        let cf = &r.closed_form;
        let ratio = |o: &Option<Ratio>| o.as_ref().map_or("nan".to_string(), |r| fmt_f64(r.fraction));
        let mut row = vec![
            fmt_f64(*x),
            fmt_f64(exb(&cf.classical, &f)),
            fmt_f64(exb(&cf.casimir_k1, &f)),
            fmt_f64(exb(&cf.casimir_k2, &f)),
            ratio(&cf.k1_over_classical),
            ratio(&cf.k2_over_classical),
            fmt_f64(exb(&cf.classical, &f) / r.derived.total_mass),
            fmt_f64(cf.anisotropy),
            fmt_f64(cf.doppler_bound),
        ];
        if numeric {
            row.push(r.numeric.as_ref().map_or("nan".into(), |n| fmt_f64(exb(&n.exb_renormalized, &f))));
        }
        row.push(r.warnings.join("; "));
        t.push(row);
    }
    t
}

pub fn scan_table(scan: &CutoffScan) -> Table {
    let mut t = Table::new(&[
        ("lambda", "UV cutoff (1/m)"),
        ("raw", "unrenormalized E0xB0 momentum (kg m/s)"),
        ("counterterm", "mass counterterm alpha(0)|E0xB0| (dm1/m1 + dm2/m2 - dM/M) (kg m/s)"),
        ("renormalized", "raw - counterterm (kg m/s)"),
        ("slope", "fitted d ln|renormalized| / d ln lambda over the scan (dimensionless)"),
    ]);
    for p in &scan.points {
        t.push(vec![
            fmt_f64(p.lambda),
            fmt_f64(p.raw),
            fmt_f64(p.counterterm),
            fmt_f64(p.renormalized),
            fmt_f64(scan.residual_slope),
        ]);
    }
    t
}

/// The scalar quantities of a record as `quantity,value,unit` rows.
pub fn record_table(r: &ResultRecord) -> Table {
    let mut t = Table::new(&[
        ("quantity", "name of the reported quantity; vectors appear as name_x, name_y, name_z"),
        ("value", "decimal value, 17 significant digits"),
        ("unit", "SI unit of the value"),
    ]);
    let mut row = |name: String, x: f64, unit: &str| t.push(vec![name, fmt_f64(x), unit.to_string()]);
    let vec = |row: &mut dyn FnMut(String, f64, &str), name: &str, v: &Vec3, unit: &str| {
        for (i, a) in ["x", "y", "z"].iter().enumerate() {
            row(format!("{name}_{a}"), v[i], unit);
        }
    };
    let cf = &r.closed_form;
    vec(&mut row, "q0", &r.derived.q0, "kg m/s");
    vec(&mut row, "classical", &cf.classical, "kg m/s");
    vec(&mut row, "casimir_k1", &cf.casimir_k1, "kg m/s");
    vec(&mut row, "casimir_k2", &cf.casimir_k2, "kg m/s");
    if let Some(x) = &cf.k1_over_classical {
        row("k1_over_classical".into(), x.fraction, "1");
    }
    if let Some(x) = &cf.k2_over_classical {
        row("k2_over_classical".into(), x.fraction, "1");
    }
    row("alpha0".into(), r.derived.alpha0, "C^2 s^2/kg");
    row("doppler_bound".into(), cf.doppler_bound, "1");
    row("anisotropy".into(), cf.anisotropy, "1");
    row("p_si".into(), r.conventions.p_si, "kg m/s");
    row("v_si".into(), r.conventions.v_si, "m/s");
    row("p_volume".into(), r.conventions.p_volume, "kg m/s");
    row("v_volume".into(), r.conventions.v_volume, "m/s");
    row("delta_m1".into(), r.renormalization.delta_m1, "kg");
    row("delta_m2".into(), r.renormalization.delta_m2, "kg");
    row("delta_inv_mu".into(), r.renormalization.delta_inv_mu, "1/kg");
    row("mu_star".into(), r.renormalization.mu_star, "kg");
    if let Some(n) = &r.numeric {
        for (name, v) in [
            ("mass_like", n.mass_like),
            ("mass_like_finite", n.mass_like_finite),
            ("dipole_qed", n.dipole_qed),
            ("exb_raw", n.exb_raw),
            ("counterterm", n.counterterm),
            ("exb_renormalized", n.exb_renormalized),
            ("k1_numeric", n.k1_numeric),
            ("oscillating_numeric", n.oscillating_numeric),
        ] {
            vec(&mut row, name, &v, "kg m/s");
        }
    }
    if let Some(o) = &r.oracle {
        row("oracle_exponent".into(), o.exponent, "1");
        row("oracle_engine_mismatch".into(), o.engine_mismatch, "1");
        row("oracle_k_deviation".into(), o.k_deviation, "1");
    }
    for (name, v) in &r.velocities {
        vec(&mut row, &format!("v_{name}"), v, "m/s");
    }
    t
}

/// A few human-readable lines summarizing a record.
pub fn summary(r: &ResultRecord) -> String {
    let cf = &r.closed_form;
    let f = r.config.fields().expect("validated");
    let mut s = format!(
        "{} [{}] config {}\n",
        r.config.name,
        r.config.mode.name(),
        &r.config_hash[..12]
    );
    let line = |s: &mut String, k: &str, v: String| s.push_str(&format!("  {k:<28} {v}\n"));
    line(&mut s, "classical (E0xB0, kg m/s)", format!("{:.6e}", exb(&cf.classical, &f)));
    line(&mut s, "K1 (E0xB0, kg m/s)", format!("{:.6e}", exb(&cf.casimir_k1, &f)));
    line(&mut s, "K2 (E0xB0, kg m/s)", format!("{:.6e}", exb(&cf.casimir_k2, &f)));
    if let Some(x) = &cf.k1_over_classical {
        line(&mut s, "K1/classical", format!("{:.6e} ({})", x.fraction, x.percent));
    }
    if let Some(x) = &cf.k2_over_classical {
        line(&mut s, "K2/classical", format!("{:.6e} ({})", x.fraction, x.percent));
    }
    line(&mut s, "v_cl SI reading (m/s)", format!("{:.6e}", r.conventions.v_si));
    line(&mut s, "v_cl volume reading (m/s)", format!("{:.6e}", r.conventions.v_volume));
    if let Some(n) = &r.numeric {
        line(&mut s, "renormalized (E0xB0, kg m/s)", format!("{:.6e}", exb(&n.exb_renormalized, &f)));
        line(&mut s, "dipole QED (E0xB0, kg m/s)", format!("{:.6e}", exb(&n.dipole_qed, &f)));
    }
    if let Some(sc) = &r.scan {
        line(&mut s, "residual slope", format!("{:.3e}", sc.residual_slope));
    }
    if let Some(o) = &r.oracle {
        line(&mut s, "oracle exponent", format!("{:.3}", o.exponent));
        line(&mut s, "oracle engine mismatch", format!("{:.3e}", o.engine_mismatch));
    }
    for w in &r.warnings {
        s.push_str(&format!("  warning: {w}\n"));
    }
    for n in &r.notes {
        s.push_str(&format!("  note: {n}\n"));
    }
    s
}
