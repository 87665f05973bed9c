//! Instrument tomography of the MCM scenarios.
//!
//! Every fiducial circuit is run through the MCM engine directly (preparation
//! on data and A1, MCM, Pauli-basis readout of both), then reconstructed by
//! linear inversion with CP projection and compared against an ideal target.

use std::f64::consts::PI;
use std::str::FromStr;

use super::common::RunOptions;
use super::rng::stream;
use super::table::{Report, Table};
use crate::device::DeviceConfig;
use crate::error::{Error, Result};
use crate::mcm::{
    calibrate_phi0, calibrate_phi_pi, instrument_of_spec, solve_inlayer_read_time, Basis, FeedforwardPolicy, McmRun,
    McmSpec, ReadoutMode,
};
use crate::sim::gates::Cardinal;
use crate::sim::{ops, PauliString, QubitLabel};
use crate::tomo::{
    instrument_fidelity, reconstruct_instrument, summed_error_generator, CountRow, FiducialData, FiducialSet,
    QuantumInstrument,
};

pub const EXPERIMENT: &str = "tomography";
/// Read time of the tomographic experiments, where the D1 Hahn coherence meets the charge fidelity.
pub const READ_TIME: f64 = 10e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    ZFpga,
    ZEcho,
    XFpga,
    XEcho,
    FfFpga,
    FfInLayer,
}

impl Scenario {
    pub const ALL: [Scenario; 6] =
        [Self::ZFpga, Self::ZEcho, Self::XFpga, Self::XEcho, Self::FfFpga, Self::FfInLayer];

    pub fn label(self) -> &'static str {
        match self {
            Self::ZFpga => "z-fpga",
            Self::ZEcho => "z-echo",
            Self::XFpga => "x-fpga",
            Self::XEcho => "x-echo",
            Self::FfFpga => "ff-fpga",
            Self::FfInLayer => "ff-inlayer",
        }
    }

    pub fn basis(self) -> Basis {
        match self {
            Self::ZFpga | Self::ZEcho => Basis::Z,
            _ => Basis::X,
        }
    }

    /// Read time used when none is forced: θ_c = π for the in-layer scenario.
    pub fn default_read_time(self, cfg: &DeviceConfig) -> Result<f64> {
        match self {
            Self::FfInLayer => solve_inlayer_read_time(QubitLabel::D1, PI, cfg),
            _ => Ok(READ_TIME),
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.label() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown tomography scenario `{s}`")))
    }
}

fn fpga(phases: (f64, f64)) -> FeedforwardPolicy {
    FeedforwardPolicy::FpgaPhase {
        phi_m0: phases.0,
        phi_m1: phases.1,
    }
}

/// The scenario's MCM, calibrated on `cfg` at read time `t_m`.
pub fn scenario_spec(scenario: Scenario, t_m: f64, cfg: &DeviceConfig) -> Result<McmSpec> {
    let basis = scenario.basis();
    let corrected = McmSpec::new(basis, t_m, ReadoutMode::PhaseAccumulationFpgaCorrected).with_policy(fpga((0.0, 0.0)));
    Ok(match scenario {
        Scenario::ZFpga | Scenario::XFpga => {
            let phases = calibrate_phi0(&corrected, cfg)?;
            corrected.with_policy(fpga(phases))
        }
        Scenario::ZEcho | Scenario::XEcho => McmSpec::new(basis, t_m, ReadoutMode::PhaseEchoed),
        Scenario::FfFpga => {
            let phases = calibrate_phi_pi(&corrected, cfg)?;
            corrected.with_policy(fpga(phases))
        }
        Scenario::FfInLayer => {
            let probe = McmSpec::new(basis, t_m, ReadoutMode::PhaseAccumulation);
            let (phi_r, _) = calibrate_phi0(&probe, cfg)?;
            // The sensor stays on only to record the outcome; nothing is fed forward from it.
            probe.with_policy(FeedforwardPolicy::InLayerCds { phi_r })
        }
    })
}

/// Ideal instrument the scenario should implement: projective MCM, plus Z(π) on outcome 1 for feedforward.
pub fn scenario_target(scenario: Scenario, t_m: f64) -> Result<QuantumInstrument> {
    let basis = scenario.basis();
    let spec = match scenario {
        Scenario::ZEcho | Scenario::XEcho => McmSpec::new(basis, t_m, ReadoutMode::PhaseEchoed),
        Scenario::ZFpga | Scenario::XFpga => {
            McmSpec::new(basis, t_m, ReadoutMode::PhaseAccumulationFpgaCorrected).with_policy(fpga((0.0, 0.0)))
        }
        Scenario::FfFpga | Scenario::FfInLayer => {
            McmSpec::new(basis, t_m, ReadoutMode::PhaseAccumulationFpgaCorrected).with_policy(fpga((0.0, PI)))
        }
    };
    instrument_of_spec(&spec, &DeviceConfig::ideal())
}

/// Outcome probabilities of every fiducial circuit, computed by running the MCM engine.
pub fn circuit_probabilities(spec: &McmSpec, cfg: &DeviceConfig, fids: &FiducialSet) -> Result<FiducialData> {
    let qubits = [QubitLabel::A2, QubitLabel::A1, spec.target];
    let effects = fids.effects();
    let mut rows = Vec::with_capacity(fids.preparations.len() * effects.len() * 2);
    for prep in &fids.preparations {
        // Fiducials are ordered (data, A1); the register is (A2, A1, data).
        let input = Cardinal::One.density().kronecker(&prep.1.density()).kronecker(&prep.0.density());
        let run = McmRun::prepare(&input, &qubits, spec, cfg)?;
        let outputs = [0u8, 1].map(|k| ops::partial_trace(&run.labelled_operator(k), &[2, 1], 3));
        for effect in &effects {
            let e = effect.density();
            for k in 0..2u8 {
                let p = (&e * &outputs[k as usize]).trace().re;
                rows.push((*prep, *effect, k, p));
            }
        }
    }
    Ok(FiducialData { rows })
}

/// Rows of a PTM-pair table: outcome, output Pauli, one column per input Pauli.
fn instrument_table(name: &str, inst: &QuantumInstrument) -> Table {
    let paulis: Vec<String> = PauliString::all(2).iter().map(|p| p.to_string()).collect();
    let mut columns = vec!["outcome", "pauli_out"];
    columns.extend(paulis.iter().map(String::as_str));
    let mut table = Table::new(name, &columns);
    for k in 0..2usize {
        let m = inst.map(k).matrix();
        for (i, p) in paulis.iter().enumerate() {
            let mut row = vec![k.into(), p.as_str().into()];
            row.extend((0..16).map(|j| m[(i, j)].into()));
            table.push(row);
        }
    }
    table
}

#[derive(Clone, Debug)]
pub struct TomographyResult {
    pub scenario: Scenario,
    pub spec: McmSpec,
    pub estimate: QuantumInstrument,
    pub oracle: QuantumInstrument,
    pub target: QuantumInstrument,
    pub counts: Option<Vec<CountRow>>,
}

impl TomographyResult {
    pub fn fidelity(&self) -> Result<f64> {
        instrument_fidelity(&self.estimate, &self.target)
    }
}

/// Simulate and reconstruct one scenario at read time `t_m`.
pub fn tomography_at(scenario: Scenario, t_m: f64, cfg: &DeviceConfig, run: &RunOptions) -> Result<TomographyResult> {
    let spec = scenario_spec(scenario, t_m, cfg)?;
    let fids = FiducialSet::standard();
    let probs = circuit_probabilities(&spec, cfg, &fids)?;
    let (data, counts) = match run.shots {
        None => (probs, None),
        Some(shots) => {
            let mut rng = stream(run.seed, &format!("{EXPERIMENT}-{}", scenario.label()), 0);
            let counts = probs.sample(shots, &mut rng)?;
            (FiducialData::from_counts(&counts)?, Some(counts))
        }
    };
    Ok(TomographyResult {
        scenario,
        estimate: reconstruct_instrument(&data, &fids)?,
        oracle: instrument_of_spec(&spec, cfg)?,
        target: scenario_target(scenario, t_m)?,
        spec,
        counts,
    })
}

pub fn run_tomography(scenario: Scenario, cfg: &DeviceConfig, run: &RunOptions) -> Result<Report> {
    let t_m = scenario.default_read_time(cfg)?;
    let result = tomography_at(scenario, t_m, cfg, run)?;
    let decomposition = summed_error_generator(&result.estimate, &result.target)?;

    let mut report = Report::new(EXPERIMENT);
    report.tables.push(instrument_table("tomography_estimate", &result.estimate));
    report.tables.push(instrument_table("tomography_target", &result.target));
    let mut generator = Table::new("tomography_generator", &["kind", "pauli", "coefficient"]);
    for (kind, map) in [("H", &decomposition.h), ("S", &decomposition.s)] {
        for (p, x) in map {
            generator.push(vec![kind.into(), p.as_str().into(), (*x).into()]);
        }
    }
    report.tables.push(generator);
    if let Some(counts) = &result.counts {
        let mut table = Table::new("tomography_counts", &["prep_fiducial", "meas_fiducial", "outcome", "count"]);
        for c in counts {
            table.push(vec![c.prep_fiducial.as_str().into(), c.meas_fiducial.as_str().into(), c.outcome.into(), c.count.into()]);
        }
        report.tables.push(table);
    }
    let m = &mut report.metrics;
    m.insert("t_m_us".into(), t_m * 1e6);
    m.insert("fidelity".into(), result.fidelity()?);
    m.insert("pure_readout_error".into(), decomposition.pure_readout_error());
    m.insert("dephasing_coefficient".into(), decomposition.dephasing_coefficient());
    m.insert("generator_residual".into(), decomposition.residual_norm);
    m.insert("oracle_max_abs_diff".into(), result.estimate.max_abs_diff(&result.oracle));
    Ok(report)
}
