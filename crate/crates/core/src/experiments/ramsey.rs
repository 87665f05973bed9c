//! Ramsey-style characterisation of MCM backaction on an idle data qubit.
//!
//! A1 is put on the equator so odd and even outcomes are equally likely, the
//! data qubit starts on the equator, and its remaining coherence after the
//! MCM windows is read from a Z(φ)·√X fringe.

use std::f64::consts::PI;

use super::common::{equator, par_indexed, phase_grid, sweep_p0, RunOptions};
use super::rng::stream;
use super::stats::fit_cosine_unchecked;
use super::table::{Report, Table};
use crate::device::{charge_phase, dephasing_envelope, DeviceConfig, EnvelopeMode};
use crate::error::Result;
use crate::mcm::{calibrate_phi0, Basis, FeedforwardPolicy, McmRun, McmSpec, ReadoutMode};
use crate::sim::gates::Cardinal;
use crate::sim::linalg::{c, CMatrix};
use crate::sim::{ops, DensityState, QubitLabel};

pub const EXPERIMENT: &str = "ramsey-mcm";

#[derive(Clone, Debug, PartialEq)]
pub struct RamseyOptions {
    pub t_m_us: Vec<f64>,
    pub modes: Vec<ReadoutMode>,
    pub qubits: Vec<QubitLabel>,
    pub phi_points: usize,
}

impl Default for RamseyOptions {
    fn default() -> Self {
        Self {
            t_m_us: super::common::linear_grid(1.0, 80.0, 1.0),
            modes: ReadoutMode::ALL.to_vec(),
            qubits: vec![QubitLabel::D1, QubitLabel::D2],
            phi_points: 16,
        }
    }
}

/// Spec for one sweep point; the corrected mode is calibrated on the same device.
pub fn ramsey_spec(q: QubitLabel, mode: ReadoutMode, t_m: f64, cfg: &DeviceConfig) -> Result<McmSpec> {
    let mut spec = McmSpec::new(Basis::Z, t_m, mode).with_entangle(false);
    spec.target = q;
    if mode == ReadoutMode::PhaseAccumulationFpgaCorrected {
        let probe = spec.clone().with_policy(FeedforwardPolicy::FpgaPhase { phi_m0: 0.0, phi_m1: 0.0 });
        let (phi_m0, phi_m1) = calibrate_phi0(&probe, cfg)?;
        spec = spec.with_policy(FeedforwardPolicy::FpgaPhase { phi_m0, phi_m1 });
    }
    Ok(spec)
}

fn ramsey_input(q: QubitLabel) -> Result<DensityState> {
    DensityState::product(&[(QubitLabel::A2, Cardinal::One.density()), (QubitLabel::A1, equator()), (q, equator())])
}

fn prepare(q: QubitLabel, mode: ReadoutMode, t_m: f64, cfg: &DeviceConfig) -> Result<McmRun> {
    let spec = ramsey_spec(q, mode, t_m, cfg)?;
    let input = ramsey_input(q)?;
    McmRun::prepare(input.matrix(), input.qubits(), &spec, cfg)
}

/// Data-qubit (position 2) reduction of a register operator.
fn reduce(m: &CMatrix) -> CMatrix {
    ops::partial_trace(m, &[2], 3)
}

/// Outcome-averaged fringe visibility in exact mode.
pub fn exact_visibility(q: QubitLabel, mode: ReadoutMode, t_m: f64, cfg: &DeviceConfig, phi_points: usize) -> Result<f64> {
    let rho = reduce(&prepare(q, mode, t_m, cfg)?.average_operator());
    let phis = phase_grid(phi_points);
    let p0: Vec<f64> = phis.iter().map(|&p| sweep_p0(&rho, p)).collect();
    Ok(fit_cosine_unchecked(&phis, &p0)?.visibility())
}

pub fn run_ramsey_mcm(cfg: &DeviceConfig, opts: &RamseyOptions, run: &RunOptions) -> Result<Report> {
    let phis = phase_grid(opts.phi_points);
    let mut points = Vec::new();
    for &q in &opts.qubits {
        for &mode in &opts.modes {
            for &t_us in &opts.t_m_us {
                points.push((q, mode, t_us));
            }
        }
    }
    let n_phi = phis.len() as u64;
    // Per point: averaged fringe and, per outcome, (probability, fringe).
    let results = par_indexed(points.len() as u64, |idx| {
        let (q, mode, t_us) = points[idx as usize];
        let mcm = prepare(q, mode, t_us * 1e-6, cfg)?;
        match run.shots {
            None => {
                let avg = reduce(&mcm.average_operator());
                let fringe: Vec<f64> = phis.iter().map(|&p| sweep_p0(&avg, p)).collect();
                let per = (0..2u8)
                    .map(|k| {
                        let m = reduce(&mcm.labelled_operator(k));
                        let p = m[(0, 0)].re + m[(1, 1)].re;
                        let f = if p > 1e-15 { phis.iter().map(|&x| sweep_p0(&m, x)).collect() } else { vec![] };
                        (p, f)
                    })
                    .collect::<Vec<_>>();
                Ok((fringe, per))
            }
            Some(shots) => {
                let mut fringe = vec![0.0; phis.len()];
                let mut per_sum = [vec![0.0; phis.len()], vec![0.0; phis.len()]];
                let mut per_n = [vec![0u64; phis.len()], vec![0u64; phis.len()]];
                for (i, &phi) in phis.iter().enumerate() {
                    for s in 0..shots {
                        let mut rng = stream(run.seed, EXPERIMENT, (idx * n_phi + i as u64) * shots + s);
                        let shot = mcm.sample(&mut rng)?;
                        let p = sweep_p0(shot.final_data_state.matrix(), phi);
                        fringe[i] += p / shots as f64;
                        per_sum[shot.label as usize][i] += p;
                        per_n[shot.label as usize][i] += 1;
                    }
                }
                let per = (0..2)
                    .map(|k| {
                        let n: u64 = per_n[k].iter().sum();
                        let p = n as f64 / (shots * n_phi) as f64;
                        let f = if per_n[k].iter().all(|&n| n > 0) {
                            per_sum[k].iter().zip(&per_n[k]).map(|(s, &n)| s / n as f64).collect()
                        } else {
                            vec![]
                        };
                        (p, f)
                    })
                    .collect();
                Ok((fringe, per))
            }
        }
    })?;

    let mut vis = Table::new(
        "ramsey_visibility",
        &["qubit", "mode", "t_m_us", "visibility", "phase_rad", "rms_residual", "envelope_hahn", "theta_c_pi"],
    );
    let mut outcomes =
        Table::new("ramsey_outcomes", &["qubit", "mode", "t_m_us", "outcome", "probability", "visibility", "phase_rad"]);
    let mut report = Report::new(EXPERIMENT);
    for ((q, mode, t_us), (fringe, per)) in points.iter().zip(&results) {
        let t = t_us * 1e-6;
        let fit = fit_cosine_unchecked(&phis, fringe)?;
        let env = dephasing_envelope(*q, 2.0 * t, EnvelopeMode::Hahn, cfg)?;
        let theta_c = charge_phase(*q, t, cfg)?;
        vis.push(vec![
            q.name().into(),
            mode.label().into(),
            (*t_us).into(),
            fit.visibility().into(),
            fit.phase.into(),
            fit.rms_residual.into(),
            env.into(),
            (theta_c / PI).into(),
        ]);
        for (k, (p, f)) in per.iter().enumerate() {
            let (v, ph) = if f.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                let fit = fit_cosine_unchecked(&phis, f)?;
                (fit.visibility(), fit.phase)
            };
            outcomes.push(vec![
                q.name().into(),
                mode.label().into(),
                (*t_us).into(),
                k.into(),
                (*p).into(),
                v.into(),
                ph.into(),
            ]);
        }
    }

    // First visibility minimum of the phase-accumulation curve, refined on the exact model.
    for &q in &opts.qubits {
        if !opts.modes.contains(&ReadoutMode::PhaseAccumulation) || opts.t_m_us.len() < 3 {
            continue;
        }
        let mode_rows = vis.filter("mode", ReadoutMode::PhaseAccumulation.label())?.filter("qubit", q.name())?;
        let ts = mode_rows.numbers("t_m_us")?;
        let vs = mode_rows.numbers("visibility")?;
        if let Some(i) = (1..vs.len() - 1).find(|&i| vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1]) {
            let f = |t_us: f64| {
                exact_visibility(q, ReadoutMode::PhaseAccumulation, t_us * 1e-6, cfg, opts.phi_points).unwrap_or(f64::NAN)
            };
            let t_min = golden_min(f, ts[i - 1], ts[i + 1]);
            report.metrics.insert(format!("visibility_minimum_t_m_us_{}", q.name()), t_min);
        }
    }
    report.tables.push(vis);
    report.tables.push(outcomes);
    Ok(report)
}

/// Golden-section minimum of a unimodal function on [a, b].
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Closed-form visibility of the outcome-averaged fringe without feedforward.
pub fn predicted_accumulation_visibility(q: QubitLabel, t_m: f64, p_odd: f64, cfg: &DeviceConfig) -> Result<f64> {
    let env = dephasing_envelope(q, 2.0 * t_m, EnvelopeMode::Hahn, cfg)?;
    let theta_c = charge_phase(q, t_m, cfg)?;
    Ok(env * (c(1.0 - p_odd, 0.0) + c(0.0, theta_c).exp() * p_odd).norm())
}
