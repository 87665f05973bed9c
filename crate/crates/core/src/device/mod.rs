//! Parametric device physics: Stark shifts, charge backaction, coherence
//! envelopes, the sensor-signal readout model and exchange modulation.

mod config;
mod physics;

pub use config::{
    flatten_toml, get_bool, get_f64, get_str, DataQubitParams, DephasingModel, DeviceConfig, ExchangeParams,
    FlatTable, GateErrorParams, SensorParams, DEFAULT_DEVICE_TOML, FIG2_PRESET_TOML,
};
pub use physics::{
    charge_fidelity, charge_phase, classification_probability, classify_signal, control_phase, dephasing_envelope,
    exchange_conditional_phase, exchange_rate, gaussian_q, readout_error_prob, sample_sensor_signal, signal_mean,
    signal_width, stark_frequency, stark_phase, ChargeConfig, EnvelopeMode, Parity, VoltageLevel,
};
