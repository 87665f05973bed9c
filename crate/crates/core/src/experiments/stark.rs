//! Stark-shift round trip: a Hahn echo whose second half idles at an ancilla
//! voltage level, so the level's Larmor shift survives the echo. The phase is
//! read from a cosine fit and its slope against the idle time gives f.

use std::f64::consts::PI;

use rand_distr::{Binomial, Distribution};

use super::common::{equator, linear_grid, par_indexed, phase_grid, sweep_p0, RunOptions};
use super::rng::stream;
use super::stats::{fit_cosine, linear_fit};
use super::table::{Report, Table};
use crate::device::{dephasing_envelope, stark_frequency, stark_phase, DeviceConfig, EnvelopeMode, Parity, VoltageLevel};
use crate::error::{Error, Result};
use crate::sim::gates;
use crate::sim::{ops, QuantumChannel, QubitLabel};

pub const EXPERIMENT: &str = "stark";
const PHI_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarkCase {
    pub qubit: QubitLabel,
    pub level: VoltageLevel,
    pub parity: Parity,
}

impl StarkCase {
    pub fn label(&self) -> String {
        let level = match self.level {
            VoltageLevel::RefAncilla => "vref",
            VoltageLevel::ReadAncilla => "vread",
            VoltageLevel::Ctrl => "vctrl",
        };
        format!("{}_{}_{}", self.qubit.name(), level, self.parity.label())
    }
}

/// The six characterised shifts: reference level, and read level for both parities.
pub fn default_cases() -> Vec<StarkCase> {
    let mut cases = Vec::new();
    for (level, parity) in [
        (VoltageLevel::RefAncilla, Parity::Even),
        (VoltageLevel::ReadAncilla, Parity::Even),
        (VoltageLevel::ReadAncilla, Parity::Odd),
    ] {
        for qubit in [QubitLabel::D1, QubitLabel::D2] {
            cases.push(StarkCase { qubit, level, parity });
        }
    }
    cases
}

pub fn default_grid_us() -> Vec<f64> {
    linear_grid(2.0, 40.0, 2.0)
}

/// P(|0⟩) fringe after equator, π, idle at the level for `t`, and the Hahn envelope of 2t.
fn fringe(case: &StarkCase, t: f64, cfg: &DeviceConfig) -> Result<Vec<f64>> {
    let theta = stark_phase(case.qubit, case.level, t, case.parity, cfg)?;
    let env = dephasing_envelope(case.qubit, 2.0 * t, EnvelopeMode::Hahn, cfg)?;
    let flip = gates::rx(PI);
    let mut rho = &flip * equator() * flip.adjoint();
    let rz = gates::rz(theta);
    rho = &rz * rho * rz.adjoint();
    rho = ops::apply_kraus(&rho, QuantumChannel::dephasing(env).kraus(), &[0], 1);
    Ok(phase_grid(PHI_POINTS).iter().map(|&phi| sweep_p0(&rho, phi)).collect())
}

fn unwrap(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut offset = 0.0_f64;
    for (i, &p) in phases.iter().enumerate() {
        if i > 0 {
            let d: f64 = p + offset - out[i - 1];
            offset -= 2.0 * PI * (d / (2.0 * PI)).round();
        }
        out.push(p + offset);
    }
    out
}

pub fn run_stark(cfg: &DeviceConfig, cases: &[StarkCase], grid_us: &[f64], run: &RunOptions) -> Result<Report> {
    if grid_us.len() < 2 {
        return Err(Error::FitDegenerate("need at least two idle times for a slope".into()));
    }
    let phis = phase_grid(PHI_POINTS);
    let reference_case = |c: &StarkCase| -> Result<Vec<f64>> { fringe(c, 0.0, cfg) };
    let mut phases_table = Table::new("stark_phases", &["case", "t_m_us", "phase_rad", "visibility"]);
    let mut freq_table = Table::new("stark_frequencies", &["case", "configured_khz", "fitted_khz", "intercept_rad"]);
    let mut report = Report::new(EXPERIMENT);
    for (ci, case) in cases.iter().enumerate() {
        let reference = super::stats::fit_cosine(&phis, &reference_case(case)?)?.phase;
        let fits = par_indexed(grid_us.len() as u64, |i| {
            let t = grid_us[i as usize] * 1e-6;
            let mut p0 = fringe(case, t, cfg)?;
            if let Some(shots) = run.shots {
                for (j, p) in p0.iter_mut().enumerate() {
                    let index = ((ci * grid_us.len() + i as usize) * phis.len() + j) as u64;
                    let mut rng = stream(run.seed, EXPERIMENT, index);
                    let k = Binomial::new(shots, p.clamp(0.0, 1.0))
                        .map_err(|e| Error::InvalidArgument(e.to_string()))?
                        .sample(&mut rng);
                    *p = k as f64 / shots as f64;
                }
            }
            fit_cosine(&phis, &p0)
        })?;
        let raw: Vec<f64> = fits.iter().map(|f| f.phase - reference).collect();
        let phases = unwrap(&raw);
        for ((t, ph), fit) in grid_us.iter().zip(&phases).zip(&fits) {
            phases_table.push(vec![case.label().into(), (*t).into(), (*ph).into(), fit.visibility().into()]);
        }
        let ts: Vec<f64> = grid_us.iter().map(|t| t * 1e-6).collect();
        let (slope, intercept) = linear_fit(&ts, &phases)?;
        let f = slope / (2.0 * PI);
        let configured = stark_frequency(case.qubit, case.level, case.parity, cfg)?;
        freq_table.push(vec![case.label().into(), (configured / 1e3).into(), (f / 1e3).into(), intercept.into()]);
        report.metrics.insert(format!("f_{}_khz", case.label()), f / 1e3);
    }
    report.tables.push(phases_table);
    report.tables.push(freq_table);
    Ok(report)
}
