//! Feedforward on a data qubit measured in the X basis.
//!
//! D1 starts at Z(φ)√X|1⟩, an X-basis MCM runs, and D1 is finally read in the
//! X basis. Variants differ only in how the MCM is configured.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::Rng;

use super::common::{equator, linear_grid, par_indexed, RunOptions};
use super::rng::stream;
use super::stats::ks_two_sample;
use super::table::{Report, Table};
use crate::device::{
    dephasing_envelope, sample_sensor_signal, signal_width, DeviceConfig, EnvelopeMode,
    Parity,
};
use crate::error::{Error, Result};
use crate::mcm::{
    calibrate_phi0, calibrate_phi_pi, solve_inlayer_read_time, Basis, FeedforwardPolicy, McmRun, McmSpec, ReadoutMode,
};
use crate::sim::gates::{self, Cardinal};
use crate::sim::linalg::CMatrix;
use crate::sim::{ops, DensityState, QubitLabel};

pub const EXPERIMENT: &str = "fig2";
pub const READ_TIME: f64 = 20e-6;
/// Draws behind the signal/parity independence metrics.
pub const SENSOR_SAMPLES: u64 = 100_000;
const HIST_BINS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fig2Variant {
    /// No MCM.
    B,
    /// FPGA feedforward with φ0: outcome-independent phase.
    C,
    /// Echoed windows, no feedforward.
    D,
    /// FPGA feedforward with φπ: conditional Z(π).
    E,
    /// In-layer compensation at the read time where θ_c = π, sensor off.
    F,
}

impl Fig2Variant {
    pub const ALL: [Fig2Variant; 5] = [Self::B, Self::C, Self::D, Self::E, Self::F];

    pub fn label(self) -> &'static str {
        match self {
            Self::B => "b",
            Self::C => "c",
            Self::D => "d",
            Self::E => "e",
            Self::F => "f",
        }
    }
}

impl FromStr for Fig2Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.label() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown fig2 variant `{s}` (expected b, c, d, e or f)")))
    }
}

/// The MCM of a variant, calibrated on `cfg`. `None` for variant b.
pub fn variant_spec(variant: Fig2Variant, cfg: &DeviceConfig) -> Result<Option<McmSpec>> {
    let base = |mode| McmSpec::new(Basis::X, READ_TIME, mode).with_sensor(true);
    let fpga = |phases: (f64, f64)| FeedforwardPolicy::FpgaPhase {
        phi_m0: phases.0,
        phi_m1: phases.1,
    };
    let spec = match variant {
        Fig2Variant::B => return Ok(None),
        Fig2Variant::C => {
            let s = base(ReadoutMode::PhaseAccumulationFpgaCorrected);
            let phases = calibrate_phi0(&s.clone().with_policy(fpga((0.0, 0.0))), cfg)?;
            s.with_policy(fpga(phases))
        }
        Fig2Variant::D => base(ReadoutMode::PhaseEchoed),
        Fig2Variant::E => {
            let s = base(ReadoutMode::PhaseAccumulationFpgaCorrected);
            let phases = calibrate_phi_pi(&s.clone().with_policy(fpga((0.0, 0.0))), cfg)?;
            s.with_policy(fpga(phases))
        }
        Fig2Variant::F => {
            // θ_c = π at this read time; φ_r cancels the even-branch phase there.
            let t_m = solve_inlayer_read_time(QubitLabel::D1, PI, cfg)?;
            let probe = McmSpec::new(Basis::X, t_m, ReadoutMode::PhaseAccumulation);
            let (phi_r, _) = calibrate_phi0(&probe, cfg)?;
            let s = McmSpec::new(Basis::X, t_m, ReadoutMode::PhaseAccumulation)
                .with_policy(FeedforwardPolicy::InLayerCds { phi_r })
                .with_sensor(false);
            s
        }
    };
    Ok(Some(spec))
}

fn input_state(phi: f64) -> Result<DensityState> {
    let rz = gates::rz(phi);
    let d1 = &rz * equator() * rz.adjoint();
    DensityState::product(&[
        (QubitLabel::A2, Cardinal::One.density()),
        (QubitLabel::A1, Cardinal::One.density()),
        (QubitLabel::D1, d1),
    ])
}

fn p_minus(op: &CMatrix) -> f64 {
    let d1 = ops::partial_trace(op, &[2], 3);
    let tr = d1[(0, 0)].re + d1[(1, 1)].re;
    (Cardinal::Minus.density() * &d1).trace().re / tr
}

/// Hahn visibility the traces of variants c–f are normalized to.
pub fn normalization(spec: &McmSpec, cfg: &DeviceConfig) -> Result<f64> {
    dephasing_envelope(QubitLabel::D1, spec.total_time(), EnvelopeMode::Hahn, cfg)
}

/// Exact P(|−⟩) and P(label 1) of D1 for one input phase.
pub fn exact_point(spec: Option<&McmSpec>, phi: f64, cfg: &DeviceConfig) -> Result<(f64, f64)> {
    let input = input_state(phi)?;
    match spec {
        None => Ok((p_minus(input.matrix()), f64::NAN)),
        Some(spec) => {
            let run = McmRun::prepare(input.matrix(), input.qubits(), spec, cfg)?;
            let one = run.labelled_operator(1);
            Ok((p_minus(&run.average_operator()), one.trace().re))
        }
    }
}

pub fn run_fig2(variant: Fig2Variant, cfg: &DeviceConfig, run: &RunOptions) -> Result<Report> {
    let spec = variant_spec(variant, cfg)?;
    let phis_pi = linear_grid(0.0, 2.0, 1.0 / 16.0);
    let experiment = format!("{EXPERIMENT}-{}", variant.label());
    let norm = match &spec {
        Some(s) => normalization(s, cfg)?,
        None => 1.0,
    };

    // (p_minus, p_outcome1, signals split by true parity)
    let points = par_indexed(phis_pi.len() as u64, |i| {
        let phi = phis_pi[i as usize] * PI;
        match (run.shots, &spec) {
            (None, _) => {
                let (pm, p1) = exact_point(spec.as_ref(), phi, cfg)?;
                Ok((pm, p1, [Vec::new(), Vec::new()]))
            }
            (Some(shots), None) => {
                let (pm, _) = exact_point(None, phi, cfg)?;
                let mut minus = 0u64;
                for s in 0..shots {
                    let mut rng = stream(run.seed, &experiment, i * shots + s);
                    minus += u64::from(rng.random::<f64>() < pm);
                }
                Ok((minus as f64 / shots as f64, f64::NAN, [Vec::new(), Vec::new()]))
            }
            (Some(shots), Some(spec)) => {
                let input = input_state(phi)?;
                let mcm = McmRun::prepare(input.matrix(), input.qubits(), spec, cfg)?;
                let (mut minus, mut ones) = (0u64, 0u64);
                let mut signals = [Vec::new(), Vec::new()];
                for s in 0..shots {
                    let mut rng = stream(run.seed, &experiment, i * shots + s);
                    let shot = mcm.sample(&mut rng)?;
                    let pm = (Cardinal::Minus.density() * shot.final_data_state.matrix()).trace().re;
                    minus += u64::from(rng.random::<f64>() < pm);
                    ones += u64::from(shot.label);
                    signals[shot.outcome_true.index()].push(shot.sensor_signal);
                }
                Ok((minus as f64 / shots as f64, ones as f64 / shots as f64, signals))
            }
        }
    })?;

    let mut traces = Table::new("fig2_traces", &["phi_pi", "p_minus", "p_minus_norm", "p_outcome1"]);
    for (phi, (pm, p1, _)) in phis_pi.iter().zip(&points) {
        let normed = if spec.is_some() { 0.5 + (pm - 0.5) / norm } else { *pm };
        traces.push(vec![(*phi).into(), (*pm).into(), normed.into(), (*p1).into()]);
    }
    let mut report = Report::new(EXPERIMENT);
    report.metrics.insert("normalization".into(), norm);

    let mut hist = Table::new("fig2_sensor_histogram", &["bin_center", "count_even", "count_odd"]);
    if let Some(spec) = &spec {
        report.metrics.insert("t_m_us".into(), spec.t_m * 1e6);
        if let FeedforwardPolicy::FpgaPhase { phi_m0, phi_m1 } = spec.policy {
            report.metrics.insert("phi_m0_pi".into(), phi_m0 / PI);
            report.metrics.insert("phi_m1_pi".into(), phi_m1 / PI);
        }
        if let FeedforwardPolicy::InLayerCds { phi_r } = spec.policy {
            report.metrics.insert("phi_r_pi".into(), phi_r / PI);
        }
        let (even, odd) = sensor_samples(spec, cfg, run.seed, SENSOR_SAMPLES)?;
        let (lo, hi) = histogram_range(spec, cfg);
        let width = (hi - lo) / HIST_BINS as f64;
        let centers: Vec<f64> = (0..HIST_BINS).map(|b| lo + (b as f64 + 0.5) * width).collect();
        let counts: [Vec<f64>; 2] = match run.shots {
            Some(_) => {
                let mut all = [Vec::new(), Vec::new()];
                for (_, _, s) in &points {
                    all[0].extend_from_slice(&s[0]);
                    all[1].extend_from_slice(&s[1]);
                }
                [bin(&all[0], lo, width), bin(&all[1], lo, width)]
            }
            None => expected_histogram(spec, cfg, &phis_pi, &centers, width)?,
        };
        for (b, x) in centers.iter().enumerate() {
            hist.push(vec![(*x).into(), counts[0][b].into(), counts[1][b].into()]);
        }
        let ks = ks_two_sample(&even, &odd);
        report.metrics.insert("signal_parity_correlation".into(), signal_parity_correlation(&even, &odd));
        report.metrics.insert("ks_statistic".into(), ks.statistic);
        report.metrics.insert("ks_p_value".into(), ks.p_value);
    }
    report.tables.push(traces);
    report.tables.push(hist);
    Ok(report)
}

/// Sensor signals of `n` independent MCMs on an equal-parity input, split by true parity.
pub fn sensor_samples(spec: &McmSpec, cfg: &DeviceConfig, seed: u64, n: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rng = stream(seed, "fig2-sensor", 0);
    let (mut even, mut odd) = (Vec::new(), Vec::new());
    for _ in 0..n {
        let parity = if rng.random::<bool>() { Parity::Odd } else { Parity::Even };
        let s = sample_sensor_signal(parity, spec.t_m, spec.sensor_on, cfg, &mut rng)?;
        match parity {
            Parity::Even => even.push(s),
            Parity::Odd => odd.push(s),
        }
    }
    Ok((even, odd))
}

/// Pearson correlation between signal and parity index.
pub fn signal_parity_correlation(even: &[f64], odd: &[f64]) -> f64 {
    let n = (even.len() + odd.len()) as f64;
    let xs = even.iter().map(|&s| (s, 0.0)).chain(odd.iter().map(|&s| (s, 1.0)));
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in xs {
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let cov = sxy / n - sx * sy / n / n;
    let vx = sxx / n - (sx / n).powi(2);
    let vy = syy / n - (sy / n).powi(2);
    if vx <= 0.0 || vy <= 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

fn histogram_range(spec: &McmSpec, cfg: &DeviceConfig) -> (f64, f64) {
    let w = signal_width(spec.t_m, cfg);
    let top = if spec.sensor_on { cfg.sensor.delta } else { 0.0 };
    (-5.0 * w, top + 5.0 * w)
}

fn bin(xs: &[f64], lo: f64, width: f64) -> Vec<f64> {
    let mut counts = vec![0.0; HIST_BINS];
    for &x in xs {
        let b = ((x - lo) / width).floor();
        if b >= 0.0 && (b as usize) < HIST_BINS {
            counts[b as usize] += 1.0;
        }
    }
    counts
}

/// Expected counts for `RunOptions::DEFAULT_SHOTS` shots per phase point.
fn expected_histogram(
    spec: &McmSpec,
    cfg: &DeviceConfig,
    phis_pi: &[f64],
    centers: &[f64],
    width: f64,
) -> Result<[Vec<f64>; 2]> {
    let mut weights = [0.0; 2];
    for &phi in phis_pi {
        let input = input_state(phi * PI)?;
        let run = McmRun::prepare(input.matrix(), input.qubits(), spec, cfg)?;
        let p = run.parity_probabilities();
        weights[0] += p[0] * RunOptions::DEFAULT_SHOTS as f64;
        weights[1] += p[1] * RunOptions::DEFAULT_SHOTS as f64;
    }
    let w = signal_width(spec.t_m, cfg);
    let cdf = |x: f64, mu: f64| 1.0 - crate::device::gaussian_q((x - mu) / w);
    let counts = |parity: Parity| -> Vec<f64> {
        let mu = crate::device::signal_mean(parity, spec.sensor_on, cfg);
        centers
            .iter()
            .map(|&c| weights[parity.index()] * (cdf(c + width / 2.0, mu) - cdf(c - width / 2.0, mu)))
            .collect()
    };
    Ok([counts(Parity::Even), counts(Parity::Odd)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preset() -> DeviceConfig {
        DeviceConfig::fig2_preset()
    }

    fn trace(report: &Report, col: &str) -> Vec<f64> {
        report.table("fig2_traces").unwrap().numbers(col).unwrap()
    }

    fn ptp(xs: &[f64]) -> f64 {
        let max = xs.iter().cloned().fold(f64::MIN, f64::max);
        let min = xs.iter().cloned().fold(f64::MAX, f64::min);
        max - min
    }

    #[test]
    fn variant_b_is_the_bare_equator_state() {
        let cfg = preset().noiseless();
        let r = run_fig2(Fig2Variant::B, &cfg, &RunOptions::exact()).unwrap();
        for (phi, p) in linear_grid(0.0, 2.0, 1.0 / 16.0).iter().zip(trace(&r, "p_minus")) {
            // Z(φ)|+i⟩ has ⟨X⟩ = −sin φ.
            assert!((p - (1.0 + (phi * PI).sin()) / 2.0).abs() < 1e-12, "{phi}: {p}");
        }
    }

    #[test]
    fn in_layer_variant_is_flat_at_the_hahn_contrast() {
        let cfg = preset();
        let r = run_fig2(Fig2Variant::F, &cfg, &RunOptions::exact()).unwrap();
        let p = trace(&r, "p_minus");
        let c = r.metric("normalization").unwrap();
        assert!(ptp(&p) < 1e-8);
        for x in &p {
            assert!((x - (1.0 + c) / 2.0).abs() < 1e-8, "{x} vs {}", (1.0 + c) / 2.0);
        }
        assert!(r.metric("ks_p_value").unwrap() > 0.01);
        assert!(r.metric("signal_parity_correlation").unwrap().abs() < 0.01);
    }

    #[test]
    fn conditional_flip_flattens_the_trace() {
        let r = run_fig2(Fig2Variant::E, &preset(), &RunOptions::exact()).unwrap();
        assert!(ptp(&trace(&r, "p_minus")) < 1e-8);
        // Without classification errors the flat level is the Hahn contrast.
        let mut cfg = preset();
        cfg.sensor.sigma0 = 1e-12;
        let r = run_fig2(Fig2Variant::E, &cfg, &RunOptions::exact()).unwrap();
        let c = r.metric("normalization").unwrap();
        for x in trace(&r, "p_minus") {
            assert!((x - (1.0 + c) / 2.0).abs() < 1e-8, "{x}");
        }
        for x in trace(&r, "p_minus_norm") {
            assert!((x - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn outcome_independent_feedforward_keeps_the_fringe() {
        let mut cfg = preset();
        cfg.sensor.sigma0 = 1e-12;
        let r = run_fig2(Fig2Variant::C, &cfg, &RunOptions::exact()).unwrap();
        assert!((ptp(&trace(&r, "p_minus_norm")) - 1.0).abs() < 1e-6);
        // The echo keeps only the control-level residual, which tilts the
        // projected |±⟩ and shrinks the fringe by its cosine.
        let r = run_fig2(Fig2Variant::D, &cfg, &RunOptions::exact()).unwrap();
        let g = crate::device::control_phase(QubitLabel::D1, READ_TIME, &cfg).unwrap();
        assert!((ptp(&trace(&r, "p_minus_norm")) - g.cos().abs()).abs() < 1e-6);
    }

    #[test]
    fn sensor_on_signals_separate_by_parity() {
        let spec = variant_spec(Fig2Variant::E, &preset()).unwrap().unwrap();
        let (even, odd) = sensor_samples(&spec, &preset(), 3, 20_000).unwrap();
        assert!(ks_two_sample(&even, &odd).p_value < 1e-6);
        assert!(signal_parity_correlation(&even, &odd) > 0.5);
    }

    #[test]
    fn shot_mode_is_reproducible() {
        let run = RunOptions::sampled(11, 200);
        let a = run_fig2(Fig2Variant::E, &preset(), &run).unwrap();
        let b = run_fig2(Fig2Variant::E, &preset(), &run).unwrap();
        assert_eq!(a, b);
        assert!(ptp(&trace(&a, "p_minus")) < 0.25);
        let hist = a.table("fig2_sensor_histogram").unwrap();
        let total: f64 = hist.numbers("count_even").unwrap().iter().sum::<f64>()
            + hist.numbers("count_odd").unwrap().iter().sum::<f64>();
        assert!(total > 0.99 * 200.0 * 33.0);
    }

    #[test]
    fn unknown_variant_is_a_config_error() {
        assert!("g".parse::<Fig2Variant>().unwrap_err().is_config());
    }
}
