use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::perturbation::NumericOptions;
use crate::system::{FieldConfig, OscillatorSystem, Vec3};
use crate::units::{energy_to_angular_frequency, ev_to_joule, CODATA_2018};
use crate::vacuum::Cutoff;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ClosedForm,
    Numeric,
    Oracle,
    Scan,
    Sweep,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "closed-form" => Mode::ClosedForm,
            "numeric" => Mode::Numeric,
            "oracle" => Mode::Oracle,
            "scan" => Mode::Scan,
            "sweep" => Mode::Sweep,
            _ => return Err(Error::Config(format!("unknown mode `{s}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::ClosedForm => "closed-form",
            Mode::Numeric => "numeric",
            Mode::Oracle => "oracle",
            Mode::Scan => "scan",
            Mode::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    B0,
    E0,
    Omega0,
    MassRatio,
}

impl SweepParam {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "B0" => SweepParam::B0,
            "E0" => SweepParam::E0,
            "omega0" => SweepParam::Omega0,
            "mass_ratio" => SweepParam::MassRatio,
            _ => return Err(Error::Config(format!("unknown sweep parameter `{s}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::B0 => "B0",
            SweepParam::E0 => "E0",
            SweepParam::Omega0 => "omega0",
            SweepParam::MassRatio => "mass_ratio",
        }
    }

    /// Unit of the swept value.
    pub fn unit(self) -> &'static str {
        match self {
            SweepParam::B0 => "T",
            SweepParam::E0 => "V/m",
            SweepParam::Omega0 => "eV (hbar*omega0)",
            SweepParam::MassRatio => "m1/m2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

/// Everything a run needs. Serialized with the same key names as the config file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub name: String,
    pub m1_kg: f64,
    pub m2_kg: f64,
    #[serde(rename = "charge_C")]
    pub charge_c: f64,
    #[serde(rename = "hbar_omega0_eV")]
    pub hbar_omega0_ev: f64,
    #[serde(rename = "E0_Vpm")]
    pub e0_vpm: Vec3,
    #[serde(rename = "B0_T")]
    pub b0_t: Vec3,
    pub v_mps: Vec3,
    /// Λ in units of m_e·c/ħ.
    pub cutoff_me: f64,
    pub n_max: usize,
    pub truncation_bound: f64,
    pub rel_tol: f64,
    pub doppler: bool,
    pub sphere_theta: usize,
    pub sphere_phi: usize,
    pub radial_panels: usize,
    pub mode: Mode,
    pub scan_cutoffs_me: Vec<f64>,
    pub sweep: Option<SweepSpec>,
    pub oracle_coupling: f64,
}

const KEYS: &[&str] = &[
    "preset",
    "name",
    "m1_kg",
    "m2_kg",
    "charge_C",
    "hbar_omega0_eV",
    "E0_Vpm",
    "B0_T",
    "v_mps",
    "cutoff_me",
    "n_max",
    "truncation_bound",
    "rel_tol",
    "doppler",
    "sphere_theta",
    "sphere_phi",
    "radial_panels",
    "mode",
    "scan_cutoffs_me",
    "sweep_param",
    "sweep_min",
    "sweep_max",
    "sweep_steps",
    "oracle_coupling",
];

pub const PRESETS: &[&str] = &["hydrogen", "equal-mass", "positronium-like"];

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let k = CODATA_2018;
        let (m1, m2) = match name {
            "hydrogen" => (k.m_proton, k.m_electron),
            "equal-mass" => (k.m_proton, k.m_proton),
            "positronium-like" => (k.m_electron, k.m_electron),
            _ => return Err(Error::UnknownPreset(name.to_string())),
        };
        let d = NumericOptions::default();
        Ok(Self {
            name: name.to_string(),
            m1_kg: m1,
            m2_kg: m2,
            charge_c: k.e_charge,
            hbar_omega0_ev: 10.0,
            e0_vpm: Vec3::new(1e5, 0.0, 0.0),
            b0_t: Vec3::new(0.0, 0.0, 17.0),
            v_mps: Vec3::zeros(),
            cutoff_me: 1e3,
            n_max: d.n_max,
            truncation_bound: d.truncation_bound,
            rel_tol: d.rel_tol,
            doppler: d.doppler,
            sphere_theta: d.sphere_theta,
            sphere_phi: d.sphere_phi,
            radial_panels: d.radial_panels,
            mode: Mode::ClosedForm,
            scan_cutoffs_me: vec![1e2, 1e3, 1e4],
            sweep: None,
            oracle_coupling: 0.1,
        })
    }

    /// Parses flat `key = value` text. Blank lines and `#` comments are ignored;
    /// unset keys take the hydrogen preset (or the one named by `preset`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key `{key}`", i + 1)));
            }
            if pairs.iter().any(|(k, _): &(&str, &str)| *k == key) {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", i + 1)));
            }
            pairs.push((key, value));
        }
        let base = pairs.iter().find(|(k, _)| *k == "preset").map_or("hydrogen", |(_, v)| v);
        let mut c = Self::preset(base)?;
        if !pairs.iter().any(|(k, _)| *k == "preset") {
            c.name = "custom".into();
        }
        let (mut sp, mut smin, mut smax, mut ssteps) = (None, None, None, None);
        for (key, v) in pairs {
            match key {
                "preset" => {}
                "name" => c.name = v.to_string(),
                "m1_kg" => c.m1_kg = num(key, v)?,
                "m2_kg" => c.m2_kg = num(key, v)?,
                "charge_C" => c.charge_c = num(key, v)?,
                "hbar_omega0_eV" => c.hbar_omega0_ev = num(key, v)?,
                "E0_Vpm" => c.e0_vpm = vec3(key, v)?,
                "B0_T" => c.b0_t = vec3(key, v)?,
                "v_mps" => c.v_mps = vec3(key, v)?,
                "cutoff_me" => c.cutoff_me = num(key, v)?,
                "n_max" => c.n_max = int(key, v)?,
                "truncation_bound" => c.truncation_bound = num(key, v)?,
                "rel_tol" => c.rel_tol = num(key, v)?,
                "doppler" => c.doppler = boolean(key, v)?,
                "sphere_theta" => c.sphere_theta = int(key, v)?,
                "sphere_phi" => c.sphere_phi = int(key, v)?,
                "radial_panels" => c.radial_panels = int(key, v)?,
                "mode" => c.mode = Mode::parse(v)?,
                "scan_cutoffs_me" => c.scan_cutoffs_me = list(key, v)?,
                "sweep_param" => sp = Some(SweepParam::parse(v)?),
                "sweep_min" => smin = Some(num(key, v)?),
                "sweep_max" => smax = Some(num(key, v)?),
                "sweep_steps" => ssteps = Some(int(key, v)?),
                "oracle_coupling" => c.oracle_coupling = num(key, v)?,
                _ => unreachable!(),
            }
        }
        match (sp, smin, smax, ssteps) {
            (None, None, None, None) => {}
            (Some(param), Some(min), Some(max), Some(steps)) => {
                c.sweep = Some(SweepSpec { param, min, max, steps });
            }
            _ => {
                return Err(Error::Config(
                    "sweep_param, sweep_min, sweep_max and sweep_steps must be given together".into(),
                ))
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.system()?;
        self.fields()?;
        self.numeric_options()?.validate()?;
        if self.mode == Mode::Sweep && self.sweep.is_none() {
            return Err(Error::Config("mode = sweep needs sweep_param, sweep_min, sweep_max, sweep_steps".into()));
        }
        if let Some(s) = &self.sweep {
            if s.steps < 2 || !s.min.is_finite() || !s.max.is_finite() || s.min >= s.max {
                return Err(Error::Config(format!(
                    "sweep range needs min < max and steps >= 2, got {}..{} in {} steps",
                    s.min, s.max, s.steps
                )));
            }
        }
        if !(self.oracle_coupling > 0.0 && self.oracle_coupling < 1.0) {
            return Err(Error::Config("oracle_coupling must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn system(&self) -> Result<OscillatorSystem> {
        let k = CODATA_2018;
        if !(self.hbar_omega0_ev.is_finite() && self.hbar_omega0_ev > 0.0) {
            return Err(Error::Config("hbar_omega0_eV must be finite and > 0".into()));
        }
        let w = energy_to_angular_frequency(&k, ev_to_joule(&k, self.hbar_omega0_ev));
        OscillatorSystem::new(self.m1_kg, self.m2_kg, self.charge_c, w)
    }

    pub fn fields(&self) -> Result<FieldConfig> {
        FieldConfig::new(self.e0_vpm, self.b0_t)
    }

    pub fn cutoff(&self) -> Result<Cutoff> {
        Cutoff::electron_units(&CODATA_2018, self.cutoff_me)
    }

    pub fn numeric_options(&self) -> Result<NumericOptions> {
        Ok(NumericOptions {
            cutoff: self.cutoff()?,
            n_max: self.n_max,
            truncation_bound: self.truncation_bound,
            max_levels: NumericOptions::default().max_levels,
            rel_tol: self.rel_tol,
            doppler: self.doppler,
            sphere_theta: self.sphere_theta,
            sphere_phi: self.sphere_phi,
            radial_panels: self.radial_panels,
        })
    }

    /// The config as `key = value` lines in a fixed order with 17-digit numbers.
    pub fn canonical_text(&self) -> String {
        let f = super::output::fmt_f64;
        let v = |x: &Vec3| format!("{},{},{}", f(x.x), f(x.y), f(x.z));
        let mut s = String::new();
        let mut put = |k: &str, val: String| writeln!(s, "{k} = {val}").unwrap();
        put("name", self.name.clone());
        put("m1_kg", f(self.m1_kg));
        put("m2_kg", f(self.m2_kg));
        put("charge_C", f(self.charge_c));
        put("hbar_omega0_eV", f(self.hbar_omega0_ev));
        put("E0_Vpm", v(&self.e0_vpm));
        put("B0_T", v(&self.b0_t));
        put("v_mps", v(&self.v_mps));
        put("cutoff_me", f(self.cutoff_me));
        put("n_max", self.n_max.to_string());
        put("truncation_bound", f(self.truncation_bound));
        put("rel_tol", f(self.rel_tol));
        put("doppler", self.doppler.to_string());
        put("sphere_theta", self.sphere_theta.to_string());
        put("sphere_phi", self.sphere_phi.to_string());
        put("radial_panels", self.radial_panels.to_string());
        put("mode", self.mode.name().to_string());
        put("scan_cutoffs_me", self.scan_cutoffs_me.iter().map(|x| f(*x)).collect::<Vec<_>>().join(","));
        if let Some(sw) = &self.sweep {
            put("sweep_param", sw.param.name().to_string());
            put("sweep_min", f(sw.min));
            put("sweep_max", f(sw.max));
            put("sweep_steps", sw.steps.to_string());
        }
        put("oracle_coupling", f(self.oracle_coupling));
        s
    }

    /// SHA-256 of [`canonical_text`](Self::canonical_text), hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_text().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn num(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config(format!("`{key}`: `{v}` is not a finite number")))
}

fn int(key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::Config(format!("`{key}`: `{v}` is not a non-negative integer")))
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    v.parse().map_err(|_| Error::Config(format!("`{key}`: expected true or false, got `{v}`")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|x| num(key, x.trim())).collect()
}

fn vec3(key: &str, v: &str) -> Result<Vec3> {
    let x = list(key, v)?;
    if x.len() != 3 {
        return Err(Error::Config(format!("`{key}`: expected three comma-separated components")));
    }
    Ok(Vec3::new(x[0], x[1], x[2]))
}
