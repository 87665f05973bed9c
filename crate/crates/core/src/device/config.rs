//! Device parameters and their flat dotted-key file format.
//!
//! A config file is TOML whose keys are flattened to dotted paths, so
//! `D1.f_c = -11.8e3` and `[D1]\nf_c = -11.8e3` are the same entry. Keys
//! under `mcm.` describe an experiment and keys under `meta.` are free-form
//! annotations; both are ignored by [`DeviceConfig`].

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::QubitLabel;

pub const DEFAULT_DEVICE_TOML: &str = include_str!("../../config/default_device.toml");
pub const FIG2_PRESET_TOML: &str = include_str!("../../config/fig2_preset.toml");

/// Per-data-qubit frequencies (Hz), control-level phase coefficients and coherence times (s).
#[derive(Clone, Debug, PartialEq)]
pub struct DataQubitParams {
    pub f_c: f64,
    pub f_vref: f64,
    pub f_vread_even: f64,
    /// Separately calibrated odd-branch read-level shift, if known.
    pub f_vread_odd: Option<f64>,
    pub g_vctrl_a: f64,
    pub g_vctrl_b: f64,
    pub t2_star: f64,
    pub t2_hahn: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensorParams {
    pub sigma0: f64,
    pub delta: f64,
    pub tau_latch: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExchangeParams {
    pub j0: f64,
    pub v0: f64,
    pub vslope: f64,
    pub dj_charge: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateErrorParams {
    pub cz_overrotation: f64,
    pub sq_depol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DephasingModel {
    /// Deterministic contrast multiplier (exact mode and test oracle).
    Analytic,
    /// Per-shot Gaussian phase whose average reproduces the analytic contrast.
    QuasiStatic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviceConfig {
    pub d1: DataQubitParams,
    pub d2: DataQubitParams,
    pub alpha_star: f64,
    pub alpha_hahn: f64,
    pub sensor: SensorParams,
    pub exchange: ExchangeParams,
    pub gate_error: GateErrorParams,
    pub feedforward_latency: f64,
    pub dephasing: DephasingModel,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            d1: DataQubitParams {
                f_c: -11.8e3,
                f_vref: 5.9e3,
                f_vread_even: 9.4e3,
                f_vread_odd: Some(-2.9e3),
                g_vctrl_a: 0.0,
                g_vctrl_b: 0.0,
                t2_star: 20e-6,
                t2_hahn: 76.4e-6,
            },
            d2: DataQubitParams {
                f_c: -4.9e3,
                f_vref: -5.4e3,
                f_vread_even: -5.3e3,
                f_vread_odd: Some(-10.0e3),
                g_vctrl_a: 0.0,
                g_vctrl_b: 0.0,
                t2_star: 20e-6,
                t2_hahn: 79.4e-6,
            },
            alpha_star: 2.0,
            alpha_hahn: 2.0,
            sensor: SensorParams {
                sigma0: 1.051e-3,
                delta: 1.0,
                tau_latch: 0.0,
            },
            exchange: ExchangeParams {
                j0: 1.0e6,
                v0: 0.0,
                vslope: 0.02,
                dj_charge: 1.5,
            },
            gate_error: GateErrorParams {
                cz_overrotation: 0.0,
                sq_depol: 0.0,
            },
            feedforward_latency: 300e-9,
            dephasing: DephasingModel::Analytic,
        }
    }
}

/// Flattened `dotted.key → value` view of a TOML document.
pub type FlatTable = BTreeMap<String, toml::Value>;

pub fn flatten_toml(text: &str) -> Result<FlatTable> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let mut out = FlatTable::new();
    flatten_into("", &table, &mut out);
    Ok(out)
}

fn flatten_into(prefix: &str, table: &toml::Table, out: &mut FlatTable) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten_into(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

pub fn get_f64(table: &FlatTable, key: &str) -> Result<Option<f64>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Float(x)) => Ok(Some(*x)),
        Some(toml::Value::Integer(i)) => Ok(Some(*i as f64)),
        Some(other) => Err(Error::Config(format!("{key}: expected a number, found {other}"))),
    }
}

pub fn get_bool(table: &FlatTable, key: &str) -> Result<Option<bool>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::Boolean(b)) => Ok(Some(*b)),
        Some(other) => Err(Error::Config(format!("{key}: expected a boolean, found {other}"))),
    }
}

pub fn get_str<'a>(table: &'a FlatTable, key: &str) -> Result<Option<&'a str>> {
    match table.get(key) {
        None => Ok(None),
        Some(toml::Value::String(s)) => Ok(Some(s.as_str())),
        Some(other) => Err(Error::Config(format!("{key}: expected a string, found {other}"))),
    }
}

const QUBIT_KEYS: [&str; 8] = [
    "f_c",
    "f_vref",
    "f_vread_even",
    "f_vread_odd",
    "g_vctrl_a",
    "g_vctrl_b",
    "t2_star",
    "t2_hahn",
];

const GLOBAL_KEYS: [&str; 14] = [
    "envelope.alpha_star",
    "envelope.alpha_hahn",
    "sensor.sigma0",
    "sensor.delta",
    "sensor.tau_latch",
    "exchange.j0",
    "exchange.v0",
    "exchange.vslope",
    "exchange.dj_charge",
    "gate_error.cz_overrotation",
    "gate_error.sq_depol",
    "feedforward.latency",
    "dephasing.model",
    "meta.description",
];

impl DeviceConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_table(&flatten_toml(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn fig2_preset() -> Self {
        Self::from_toml_str(FIG2_PRESET_TOML).expect("shipped preset parses")
    }

    /// Overlay the entries of `table` on the defaults, rejecting unknown keys.
    pub fn from_table(table: &FlatTable) -> Result<Self> {
        for key in table.keys() {
            let known = key.starts_with("mcm.")
                || key.starts_with("meta.")
                || GLOBAL_KEYS.contains(&key.as_str())
                || key
                    .split_once('.')
                    .is_some_and(|(q, k)| (q == "D1" || q == "D2") && QUBIT_KEYS.contains(&k));
            if !known {
                return Err(Error::Config(format!("unknown configuration key `{key}`")));
            }
        }
        let mut cfg = Self::default();
        for (name, params) in [("D1", &mut cfg.d1), ("D2", &mut cfg.d2)] {
            let set = |field: &mut f64, k: &str| -> Result<()> {
                if let Some(v) = get_f64(table, &format!("{name}.{k}"))? {
                    *field = v;
                }
                Ok(())
            };
            set(&mut params.f_c, "f_c")?;
            set(&mut params.f_vref, "f_vref")?;
            set(&mut params.f_vread_even, "f_vread_even")?;
            set(&mut params.g_vctrl_a, "g_vctrl_a")?;
            set(&mut params.g_vctrl_b, "g_vctrl_b")?;
            set(&mut params.t2_star, "t2_star")?;
            set(&mut params.t2_hahn, "t2_hahn")?;
            if let Some(v) = get_f64(table, &format!("{name}.f_vread_odd"))? {
                params.f_vread_odd = Some(v);
            }
        }
        let set = |field: &mut f64, k: &str| -> Result<()> {
            if let Some(v) = get_f64(table, k)? {
                *field = v;
            }
            Ok(())
        };
        set(&mut cfg.alpha_star, "envelope.alpha_star")?;
        set(&mut cfg.alpha_hahn, "envelope.alpha_hahn")?;
        set(&mut cfg.sensor.sigma0, "sensor.sigma0")?;
        set(&mut cfg.sensor.delta, "sensor.delta")?;
        set(&mut cfg.sensor.tau_latch, "sensor.tau_latch")?;
        set(&mut cfg.exchange.j0, "exchange.j0")?;
        set(&mut cfg.exchange.v0, "exchange.v0")?;
        set(&mut cfg.exchange.vslope, "exchange.vslope")?;
        set(&mut cfg.exchange.dj_charge, "exchange.dj_charge")?;
        set(&mut cfg.gate_error.cz_overrotation, "gate_error.cz_overrotation")?;
        set(&mut cfg.gate_error.sq_depol, "gate_error.sq_depol")?;
        set(&mut cfg.feedforward_latency, "feedforward.latency")?;
        if let Some(model) = get_str(table, "dephasing.model")? {
            cfg.dephasing = match model {
                "analytic" => DephasingModel::Analytic,
                "quasi_static" => DephasingModel::QuasiStatic,
                other => return Err(Error::Config(format!("unknown dephasing.model `{other}`"))),
            };
        }
        get_str(table, "meta.description")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        for (name, p) in [("D1", &self.d1), ("D2", &self.d2)] {
            let freqs = [p.f_c, p.f_vref, p.f_vread_even, p.g_vctrl_a, p.g_vctrl_b];
            if freqs.iter().chain(p.f_vread_odd.iter()).any(|f| !f.is_finite()) {
                return bad(format!("{name}: frequencies and g coefficients must be finite"));
            }
            if !(p.t2_star > 0.0 && p.t2_hahn > 0.0) {
                return bad(format!("{name}: coherence times must be > 0"));
            }
        }
        for (k, a) in [("alpha_star", self.alpha_star), ("alpha_hahn", self.alpha_hahn)] {
            if !(1.0..=3.0).contains(&a) {
                return bad(format!("envelope.{k} = {a} outside [1, 3]"));
            }
        }
        if !(self.sensor.sigma0 >= 0.0 && self.sensor.sigma0.is_finite()) {
            return bad("sensor.sigma0 must be finite and ≥ 0".into());
        }
        if !(self.sensor.delta > 0.0 && self.sensor.delta.is_finite()) {
            return bad("sensor.delta must be finite and > 0".into());
        }
        if self.sensor.tau_latch < 0.0 {
            return bad("sensor.tau_latch must be ≥ 0".into());
        }
        let ex = &self.exchange;
        if !(ex.j0 > 0.0 && ex.dj_charge > 0.0 && ex.vslope != 0.0 && ex.v0.is_finite() && ex.vslope.is_finite()) {
            return bad("exchange: need j0 > 0, dj_charge > 0, finite nonzero vslope".into());
        }
        if !self.gate_error.cz_overrotation.is_finite() || !(0.0..=1.0).contains(&self.gate_error.sq_depol) {
            return bad("gate_error: cz_overrotation finite, sq_depol in [0, 1]".into());
        }
        if !(self.feedforward_latency >= 0.0 && self.feedforward_latency.is_finite()) {
            return bad("feedforward.latency must be finite and ≥ 0".into());
        }
        Ok(())
    }

    pub fn qubit(&self, q: QubitLabel) -> Result<&DataQubitParams> {
        match q {
            QubitLabel::D1 => Ok(&self.d1),
            QubitLabel::D2 => Ok(&self.d2),
            other => Err(Error::InvalidArgument(format!("{other} is not a data qubit"))),
        }
    }

    pub fn qubit_mut(&mut self, q: QubitLabel) -> Result<&mut DataQubitParams> {
        match q {
            QubitLabel::D1 => Ok(&mut self.d1),
            QubitLabel::D2 => Ok(&mut self.d2),
            other => Err(Error::InvalidArgument(format!("{other} is not a data qubit"))),
        }
    }

    /// Same Stark and charge shifts, but no decoherence, readout noise or gate error.
    pub fn noiseless(&self) -> Self {
        let mut cfg = self.clone();
        for p in [&mut cfg.d1, &mut cfg.d2] {
            p.t2_star = f64::INFINITY;
            p.t2_hahn = f64::INFINITY;
        }
        cfg.sensor.sigma0 = 0.0;
        cfg.gate_error = GateErrorParams {
            cz_overrotation: 0.0,
            sq_depol: 0.0,
        };
        cfg.dephasing = DephasingModel::Analytic;
        cfg
    }

    /// A device with no measurement backaction and no noise: the target for every instrument.
    pub fn ideal() -> Self {
        let mut cfg = Self::default().noiseless();
        for p in [&mut cfg.d1, &mut cfg.d2] {
            p.f_c = 0.0;
            p.f_vref = 0.0;
            p.f_vread_even = 0.0;
            p.f_vread_odd = None;
            p.g_vctrl_a = 0.0;
            p.g_vctrl_b = 0.0;
        }
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_default_file_matches_builtin() {
        assert_eq!(DeviceConfig::from_toml_str(DEFAULT_DEVICE_TOML).unwrap(), DeviceConfig::default());
    }

    #[test]
    fn preset_overrides_only_calibration_knobs() {
        let p = DeviceConfig::fig2_preset();
        let d = DeviceConfig::default();
        assert_eq!(p.d2, d.d2);
        assert_eq!(p.sensor, d.sensor);
        assert_ne!(p.d1.g_vctrl_a, 0.0);
        assert_ne!(p.d1.f_c, d.d1.f_c);
    }

    #[test]
    fn dotted_and_nested_keys_agree() {
        let a = DeviceConfig::from_toml_str("D1.f_c = -1000.0\nsensor.delta = 2").unwrap();
        let b = DeviceConfig::from_toml_str("[D1]\nf_c = -1000.0\n[sensor]\ndelta = 2.0").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.d1.f_c, -1000.0);
        assert_eq!(a.sensor.delta, 2.0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(DeviceConfig::from_toml_str("D3.f_c = 1.0"), Err(Error::Config(_))));
        assert!(matches!(DeviceConfig::from_toml_str("D1.t2_hahn = -1.0"), Err(Error::Config(_))));
        assert!(matches!(DeviceConfig::from_toml_str("envelope.alpha_hahn = 4.0"), Err(Error::Config(_))));
        assert!(matches!(DeviceConfig::from_toml_str("exchange.dj_charge = 0.0"), Err(Error::Config(_))));
        assert!(matches!(DeviceConfig::from_toml_str("D1.f_c = \"fast\""), Err(Error::Config(_))));
        assert!(matches!(DeviceConfig::from_toml_str("not toml ="), Err(Error::Config(_))));
    }

    #[test]
    fn experiment_keys_pass_through() {
        let cfg = DeviceConfig::from_toml_str("[mcm]\nbasis = \"X\"\nt_m_us = 20.0").unwrap();
        assert_eq!(cfg, DeviceConfig::default());
    }

    #[test]
    fn infinite_coherence_is_allowed() {
        let cfg = DeviceConfig::from_toml_str("D1.t2_hahn = inf").unwrap();
        assert!(cfg.d1.t2_hahn.is_infinite());
    }
}
