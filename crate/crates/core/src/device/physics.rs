use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use statrs::function::erf::erfc;

use super::config::DeviceConfig;
use crate::error::{Error, Result};
use crate::sim::QubitLabel;

/// Outcome of a ZZ parity measurement on a dot pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    /// 0 for even, 1 for odd.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> Self {
        if k == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Electron occupancies (N_A2, N_A1, N_D1, N_D2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChargeConfig {
    pub occupancies: [u8; 4],
}

impl ChargeConfig {
    /// Idle configuration during an ancilla MCM.
    pub const IDLE: ChargeConfig = ChargeConfig { occupancies: [3, 5, 5, 3] };
    /// Ancilla pair after an odd-parity PSB transition.
    pub const ANCILLA_MERGED: ChargeConfig = ChargeConfig { occupancies: [4, 4, 5, 3] };
    /// Data pair after an odd-parity PSB transition.
    pub const DATA_MERGED: ChargeConfig = ChargeConfig { occupancies: [3, 5, 4, 4] };

    pub fn after_ancilla_psb(parity: Parity) -> Self {
        match parity {
            Parity::Even => Self::IDLE,
            Parity::Odd => Self::ANCILLA_MERGED,
        }
    }

    pub fn total(&self) -> u32 {
        self.occupancies.iter().map(|&n| n as u32).sum()
    }

    pub fn ancilla_pair_merged(&self) -> bool {
        self.occupancies[0] == 4 && self.occupancies[1] == 4
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VoltageLevel {
    Ctrl,
    RefAncilla,
    ReadAncilla,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnvelopeMode {
    Ramsey,
    Hahn,
}

/// Gaussian upper tail Q(z) = P(N(0,1) > z).
pub fn gaussian_q(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// θ_c = 2π f_c t_m.
pub fn charge_phase(q: QubitLabel, t_m: f64, cfg: &DeviceConfig) -> Result<f64> {
    Ok(2.0 * PI * cfg.qubit(q)?.f_c * t_m)
}

/// Residual control-level phase a·t + b·t².
pub fn control_phase(q: QubitLabel, t: f64, cfg: &DeviceConfig) -> Result<f64> {
    let p = cfg.qubit(q)?;
    Ok(p.g_vctrl_a * t + p.g_vctrl_b * t * t)
}

/// Larmor shift at an ancilla voltage level. The odd read-level value is the
/// separately calibrated one when present, else even + f_c.
pub fn stark_frequency(q: QubitLabel, level: VoltageLevel, parity: Parity, cfg: &DeviceConfig) -> Result<f64> {
    let p = cfg.qubit(q)?;
    match (level, parity) {
        (VoltageLevel::Ctrl, _) => Err(Error::InvalidArgument(
            "the control level has no constant Stark frequency".into(),
        )),
        (VoltageLevel::RefAncilla, _) => Ok(p.f_vref),
        (VoltageLevel::ReadAncilla, Parity::Even) => Ok(p.f_vread_even),
        (VoltageLevel::ReadAncilla, Parity::Odd) => Ok(p.f_vread_odd.unwrap_or(p.f_vread_even + p.f_c)),
    }
}

pub fn stark_phase(
    q: QubitLabel,
    level: VoltageLevel,
    duration: f64,
    parity: Parity,
    cfg: &DeviceConfig,
) -> Result<f64> {
    if duration < 0.0 {
        return Err(Error::InvalidArgument(format!("negative duration {duration}")));
    }
    match level {
        VoltageLevel::Ctrl => control_phase(q, duration, cfg),
        _ => Ok(2.0 * PI * stark_frequency(q, level, parity, cfg)? * duration),
    }
}

/// exp(−(t/T2)^α).
pub fn dephasing_envelope(q: QubitLabel, t: f64, mode: EnvelopeMode, cfg: &DeviceConfig) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    let p = cfg.qubit(q)?;
    let (t2, alpha) = match mode {
        EnvelopeMode::Ramsey => (p.t2_star, cfg.alpha_star),
        EnvelopeMode::Hahn => (p.t2_hahn, cfg.alpha_hahn),
    };
    Ok((-(t / t2).powf(alpha)).exp())
}

/// Probability that the midpoint threshold misassigns the parity after integrating for `t_m`.
pub fn readout_error_prob(t_m: f64, cfg: &DeviceConfig) -> Result<f64> {
    if t_m <= 0.0 {
        return Err(Error::InvalidArgument(format!("read time must be > 0, got {t_m}")));
    }
    if cfg.sensor.sigma0 == 0.0 {
        return Ok(0.0);
    }
    Ok(gaussian_q(cfg.sensor.delta * t_m.sqrt() / (2.0 * cfg.sensor.sigma0)))
}

pub fn charge_fidelity(t_m: f64, cfg: &DeviceConfig) -> Result<f64> {
    Ok(1.0 - readout_error_prob(t_m, cfg)?)
}

pub fn signal_mean(parity: Parity, sensor_on: bool, cfg: &DeviceConfig) -> f64 {
    match (sensor_on, parity) {
        (true, Parity::Odd) => cfg.sensor.delta,
        _ => 0.0,
    }
}

pub fn signal_width(t_m: f64, cfg: &DeviceConfig) -> f64 {
    cfg.sensor.sigma0 / t_m.sqrt()
}

pub fn sample_sensor_signal<R: Rng + ?Sized>(
    parity: Parity,
    t_m: f64,
    sensor_on: bool,
    cfg: &DeviceConfig,
    rng: &mut R,
) -> Result<f64> {
    if t_m <= 0.0 {
        return Err(Error::InvalidArgument(format!("read time must be > 0, got {t_m}")));
    }
    let normal = Normal::new(signal_mean(parity, sensor_on, cfg), signal_width(t_m, cfg))
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(normal.sample(rng))
}

/// Midpoint threshold: 1 (odd) above δ/2.
pub fn classify_signal(signal: f64, cfg: &DeviceConfig) -> u8 {
    u8::from(signal > cfg.sensor.delta / 2.0)
}

/// P(classified = 1 | true parity), the closed form of `classify_signal ∘ sample_sensor_signal`.
pub fn classification_probability(parity: Parity, t_m: f64, sensor_on: bool, cfg: &DeviceConfig) -> f64 {
    let mu = signal_mean(parity, sensor_on, cfg);
    let threshold = cfg.sensor.delta / 2.0;
    let width = signal_width(t_m, cfg);
    if width == 0.0 {
        return if mu > threshold { 1.0 } else { 0.0 };
    }
    gaussian_q((threshold - mu) / width)
}

/// J = J0 exp((V − V0)/Vslope), scaled by dJ when the ancilla pair is merged.
pub fn exchange_rate(v_j3: f64, charge: ChargeConfig, cfg: &DeviceConfig) -> f64 {
    let ex = &cfg.exchange;
    let j = ex.j0 * ((v_j3 - ex.v0) / ex.vslope).exp();
    if charge.ancilla_pair_merged() {
        j * ex.dj_charge
    } else {
        j
    }
}

/// Conditional two-qubit phase 2πJt of the data-pair exchange gate.
pub fn exchange_conditional_phase(v_j3: f64, total_time: f64, parity: Parity, cfg: &DeviceConfig) -> f64 {
    2.0 * PI * exchange_rate(v_j3, ChargeConfig::after_ancilla_psb(parity), cfg) * total_time
}
