//! Readout fidelity against data-qubit coherence as the MCM gets longer.
//!
//! The total time is reference plus read window, so the charge readout sees
//! half of it. All curves are closed-form, so exact and shot mode agree.

use super::common::linear_grid;
use super::table::{Report, Table};
use crate::device::{charge_fidelity, dephasing_envelope, DeviceConfig, EnvelopeMode};
use crate::error::{Error, Result};
use crate::sim::QubitLabel;

pub const EXPERIMENT: &str = "tradeoff";

pub fn default_grid_us() -> Vec<f64> {
    linear_grid(0.5, 100.0, 0.5)
}

/// Total time (s) at which the D1 Hahn coherence falls to the charge fidelity.
pub fn crossing_time(cfg: &DeviceConfig, lo: f64, hi: f64) -> Result<f64> {
    let gap = |t: f64| -> Result<f64> {
        Ok(dephasing_envelope(QubitLabel::D1, t, EnvelopeMode::Hahn, cfg)? - charge_fidelity(t / 2.0, cfg)?)
    };
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (gap(a)?, gap(b)?);
    if ga.signum() == gb.signum() {
        return Err(Error::NoSolution(format!(
            "coherence and fidelity do not cross between {:.3} and {:.3} us",
            lo * 1e6,
            hi * 1e6
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if gap(m)?.signum() == ga.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

pub fn run_tradeoff(cfg: &DeviceConfig, grid_us: &[f64]) -> Result<Report> {
    let mut table = Table::new(
        "tradeoff",
        &["total_time_us", "charge_fidelity", "ramsey_D1", "hahn_D1", "ramsey_D2", "hahn_D2"],
    );
    for &t_us in grid_us {
        let t = t_us * 1e-6;
        let mut row = vec![t_us.into(), charge_fidelity(t / 2.0, cfg)?.into()];
        for q in [QubitLabel::D1, QubitLabel::D2] {
            row.push(dephasing_envelope(q, t, EnvelopeMode::Ramsey, cfg)?.into());
            row.push(dephasing_envelope(q, t, EnvelopeMode::Hahn, cfg)?.into());
        }
        table.push(row);
    }
    let mut report = Report::new(EXPERIMENT);
    let (lo, hi) = match (grid_us.first(), grid_us.last()) {
        (Some(&lo), Some(&hi)) => (lo * 1e-6, hi * 1e-6),
        _ => return Err(Error::InvalidArgument("empty total-time grid".into())),
    };
    let crossing = crossing_time(cfg, lo, hi)?;
    report.metrics.insert("crossing_total_time_us".into(), crossing * 1e6);
    report.metrics.insert("crossing_value".into(), charge_fidelity(crossing / 2.0, cfg)?);
    report.tables.push(table);
    Ok(report)
}
