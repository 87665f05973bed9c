//! Exchange fingerprint of the ancilla charge state: conditional phase of the
//! data-pair decoupled CZ versus barrier voltage, for both ancilla parities.

use std::f64::consts::PI;

use rand_distr::{Binomial, Distribution};

use super::common::{linear_grid, RunOptions};
use super::rng::stream;
use super::table::{Report, Table};
use crate::device::{exchange_conditional_phase, DeviceConfig, Parity};
use crate::error::{Error, Result};
use crate::mcm::exchange_cds_dcz;
use crate::sim::gates::{self, Cardinal};
use crate::sim::{DensityState, QubitLabel};

pub const EXPERIMENT: &str = "exchange-fingerprint";

pub fn default_voltages() -> Vec<f64> {
    linear_grid(-0.1, 0.1, 0.001)
}

pub fn default_times_us() -> Vec<f64> {
    vec![1.0, 2.0, 5.0, 10.0]
}

/// Odd minus even conditional phase.
fn phase_difference(v: f64, t: f64, cfg: &DeviceConfig) -> f64 {
    exchange_conditional_phase(v, t, Parity::Odd, cfg) - exchange_conditional_phase(v, t, Parity::Even, cfg)
}

/// Smallest grid-bracketed V_J3 with a π phase difference, refined by bisection.
pub fn solve_pi_difference(voltages: &[f64], t: f64, cfg: &DeviceConfig) -> Result<f64> {
    let g = |v: f64| phase_difference(v, t, cfg).abs() - PI;
    for w in voltages.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        if g(a) == 0.0 {
            return Ok(a);
        }
        if g(a).signum() != g(b).signum() {
            let ga = g(a);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if g(m).signum() == ga.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
    }
    Err(Error::NoSolution(format!("no pi phase difference at {:.3} us in the voltage grid", t * 1e6)))
}

/// P(D1 = |+⟩) after the dCZ on |++⟩ with the ancilla pair left in `parity`.
fn p_plus(v: f64, t: f64, parity: Parity, cfg: &DeviceConfig) -> Result<f64> {
    let plus = Cardinal::Plus.density();
    let input = DensityState::product(&[(QubitLabel::D1, plus.clone()), (QubitLabel::D2, plus)])?;
    let out = exchange_cds_dcz(&input, v, t, parity, cfg)?;
    let x = out.expectation(&gates::pauli_x(), &[QubitLabel::D1])?;
    Ok((1.0 + x) / 2.0)
}

pub fn run_exchange_fingerprint(
    cfg: &DeviceConfig,
    voltages: &[f64],
    times_us: &[f64],
    run: &RunOptions,
) -> Result<Report> {
    let mut map = Table::new(
        "exchange_map",
        &["total_time_us", "v_j3", "phase_even_rad", "phase_odd_rad", "p_plus_even", "p_plus_odd"],
    );
    let mut solutions = Table::new("exchange_solutions", &["total_time_us", "v_j3_pi", "found"]);
    let mut report = Report::new(EXPERIMENT);
    let mut index = 0u64;
    for &t_us in times_us {
        let t = t_us * 1e-6;
        for &v in voltages {
            let mut p = [p_plus(v, t, Parity::Even, cfg)?, p_plus(v, t, Parity::Odd, cfg)?];
            if let Some(shots) = run.shots {
                for x in p.iter_mut() {
                    let mut rng = stream(run.seed, EXPERIMENT, index);
                    index += 1;
                    let k = Binomial::new(shots, x.clamp(0.0, 1.0))
                        .map_err(|e| Error::InvalidArgument(e.to_string()))?
                        .sample(&mut rng);
                    *x = k as f64 / shots as f64;
                }
            }
            map.push(vec![
                t_us.into(),
                v.into(),
                exchange_conditional_phase(v, t, Parity::Even, cfg).into(),
                exchange_conditional_phase(v, t, Parity::Odd, cfg).into(),
                p[0].into(),
                p[1].into(),
            ]);
        }
        match solve_pi_difference(voltages, t, cfg) {
            Ok(v) => {
                solutions.push(vec![t_us.into(), v.into(), "true".into()]);
                report.metrics.insert(format!("v_j3_pi_{t_us}us"), v);
            }
            Err(Error::NoSolution(_)) => solutions.push(vec![t_us.into(), f64::NAN.into(), "false".into()]),
            Err(e) => return Err(e),
        }
    }
    report.tables.push(map);
    report.tables.push(solutions);
    Ok(report)
}
