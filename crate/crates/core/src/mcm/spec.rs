use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::device::{get_bool, get_f64, get_str, FlatTable};
use crate::error::{Error, Result};
use crate::sim::QubitLabel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "Z" => Ok(Basis::Z),
            "X" => Ok(Basis::X),
            other => Err(Error::Config(format!("unknown basis `{other}`"))),
        }
    }
}

/// Placement of the reference and read windows around the refocusing pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReadoutMode {
    /// Reference window, π, read window.
    PhaseAccumulation,
    /// Same windows, plus classified-outcome phase correction.
    PhaseAccumulationFpgaCorrected,
    /// Half of each window on either side of π, mirrored.
    PhaseEchoed,
}

impl ReadoutMode {
    pub const ALL: [ReadoutMode; 3] = [
        ReadoutMode::PhaseAccumulation,
        ReadoutMode::PhaseAccumulationFpgaCorrected,
        ReadoutMode::PhaseEchoed,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ReadoutMode::PhaseAccumulation => "phase_accumulation",
            ReadoutMode::PhaseAccumulationFpgaCorrected => "fpga_corrected",
            ReadoutMode::PhaseEchoed => "phase_echoed",
        }
    }
}

impl FromStr for ReadoutMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "phase_accumulation" => Ok(ReadoutMode::PhaseAccumulation),
            "fpga_corrected" => Ok(ReadoutMode::PhaseAccumulationFpgaCorrected),
            "phase_echoed" => Ok(ReadoutMode::PhaseEchoed),
            other => Err(Error::Config(format!("unknown readout mode `{other}`"))),
        }
    }
}

impl fmt::Display for ReadoutMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Phases in radians, applied as virtual Z rotations on the target data qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FeedforwardPolicy {
    None,
    FpgaPhase { phi_m0: f64, phi_m1: f64 },
    InLayerCds { phi_r: f64 },
}

impl FeedforwardPolicy {
    pub fn needs_classification(&self) -> bool {
        matches!(self, FeedforwardPolicy::FpgaPhase { .. })
    }

    /// Virtual Z applied when the (classified) outcome is `k`.
    pub fn phase_for(&self, k: u8) -> f64 {
        match *self {
            FeedforwardPolicy::None => 0.0,
            FeedforwardPolicy::FpgaPhase { phi_m0, phi_m1 } => {
                if k == 0 {
                    phi_m0
                } else {
                    phi_m1
                }
            }
            FeedforwardPolicy::InLayerCds { phi_r } => phi_r,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct McmSpec {
    pub basis: Basis,
    /// Read time in seconds; the reference window lasts as long.
    pub t_m: f64,
    pub mode: ReadoutMode,
    pub policy: FeedforwardPolicy,
    pub sensor_on: bool,
    pub decoupled_qubits: BTreeSet<QubitLabel>,
    /// Data qubit that is entangled with A1 and receives feedforward.
    pub target: QubitLabel,
    /// Apply the basis CNOT from `target` onto A1 before the parity readout.
    pub entangle: bool,
}

impl McmSpec {
    /// Measurement of D1 in `basis`, with D1 and D2 decoupled and no feedforward.
    pub fn new(basis: Basis, t_m: f64, mode: ReadoutMode) -> Self {
        Self {
            basis,
            t_m,
            mode,
            policy: FeedforwardPolicy::None,
            sensor_on: true,
            decoupled_qubits: [QubitLabel::D1, QubitLabel::D2].into_iter().collect(),
            target: QubitLabel::D1,
            entangle: true,
        }
    }

    pub fn with_policy(mut self, policy: FeedforwardPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_sensor(mut self, on: bool) -> Self {
        self.sensor_on = on;
        self
    }

    pub fn with_entangle(mut self, entangle: bool) -> Self {
        self.entangle = entangle;
        self
    }

    pub fn total_time(&self) -> f64 {
        2.0 * self.t_m
    }

    pub fn is_decoupled(&self, q: QubitLabel) -> bool {
        self.decoupled_qubits.contains(&q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_m > 0.0 && self.t_m.is_finite()) {
            return Err(Error::SpecMismatch(format!("t_m must be > 0, got {}", self.t_m)));
        }
        if !self.target.is_data() {
            return Err(Error::SpecMismatch(format!("target {} is not a data qubit", self.target)));
        }
        if let Some(q) = self.decoupled_qubits.iter().find(|q| !q.is_data()) {
            return Err(Error::SpecMismatch(format!("cannot decouple ancilla {q}")));
        }
        match (self.mode, &self.policy) {
            (ReadoutMode::PhaseAccumulation, _) => {}
            (_, FeedforwardPolicy::InLayerCds { .. }) => {
                return Err(Error::SpecMismatch("in-layer feedforward requires phase-accumulation mode".into()))
            }
            (ReadoutMode::PhaseAccumulationFpgaCorrected, FeedforwardPolicy::FpgaPhase { .. }) => {}
            (ReadoutMode::PhaseAccumulationFpgaCorrected, _) => {
                return Err(Error::SpecMismatch("FPGA-corrected mode needs an FPGA phase policy".into()))
            }
            (ReadoutMode::PhaseEchoed, _) => {}
        }
        if self.policy.needs_classification() && !self.sensor_on {
            return Err(Error::SpecMismatch("FPGA feedforward needs the sensor on".into()));
        }
        Ok(())
    }

    /// Read an `mcm.*` block: basis, mode, t_m_us, policy, phi_m0_pi, phi_m1_pi, phi_r_pi, sensor_on.
    pub fn from_table(table: &FlatTable) -> Result<Self> {
        let key = |k: &str| format!("mcm.{k}");
        for k in table.keys().filter(|k| k.starts_with("mcm.")) {
            let known = [
                "basis", "mode", "t_m_us", "policy", "phi_m0_pi", "phi_m1_pi", "phi_r_pi", "sensor_on",
            ];
            if !known.iter().any(|n| *k == key(n)) {
                return Err(Error::Config(format!("unknown experiment key `{k}`")));
            }
        }
        let basis: Basis = get_str(table, &key("basis"))?.unwrap_or("Z").parse()?;
        let mode: ReadoutMode = get_str(table, &key("mode"))?.unwrap_or("phase_accumulation").parse()?;
        let t_m = get_f64(table, &key("t_m_us"))?
            .ok_or_else(|| Error::Config("mcm.t_m_us is required".into()))?
            * 1e-6;
        let pi_units = |k: &str| -> Result<f64> { Ok(get_f64(table, &key(k))?.unwrap_or(0.0) * PI) };
        let policy = match get_str(table, &key("policy"))?.unwrap_or("none") {
            "none" => FeedforwardPolicy::None,
            "fpga" => FeedforwardPolicy::FpgaPhase {
                phi_m0: pi_units("phi_m0_pi")?,
                phi_m1: pi_units("phi_m1_pi")?,
            },
            "inlayer" => FeedforwardPolicy::InLayerCds {
                phi_r: pi_units("phi_r_pi")?,
            },
            other => return Err(Error::Config(format!("unknown policy `{other}`"))),
        };
        let sensor_on = get_bool(table, &key("sensor_on"))?.unwrap_or(true);
        let spec = McmSpec::new(basis, t_m, mode).with_policy(policy).with_sensor(sensor_on);
        spec.validate()?;
        Ok(spec)
    }
}
