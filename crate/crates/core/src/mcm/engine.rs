//! Branch-resolved propagation of an MCM sequence.
//!
//! Order of operations on the register: basis CNOT (target → A1), PSB parity
//! projection of (A1, A2), signed Stark phases plus feedforward as one Z per
//! data qubit, refocusing π on decoupled qubits, dephasing. The projection
//! commutes with every data-only operation, so projecting first is exact.
//!
//! Feedforward phases live in the frame of the data qubit before refocusing:
//! a virtual Z(φ) tracked after an X(π) acts as Z(−φ) on the physical state.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::cnot::build_cnot;
use super::spec::{FeedforwardPolicy, McmSpec, ReadoutMode};
use crate::device::{
    classification_probability, classify_signal, control_phase, dephasing_envelope, sample_sensor_signal,
    DephasingModel, DeviceConfig, EnvelopeMode, Parity, VoltageLevel,
};
use crate::error::{Error, Result};
use crate::sim::linalg::{self, c, CMatrix};
use crate::sim::{gates, ops, DensityState, QuantumChannel, QubitLabel};

/// Unnormalized post-measurement operator for one (parity, classification) pair.
#[derive(Clone, Debug)]
pub struct McmBranch {
    pub parity: Parity,
    pub classified: Option<u8>,
    /// Outcome recorded by the instrument: the classification when the sensor is on, else the parity.
    pub label: u8,
    pub probability: f64,
    pub matrix: CMatrix,
}

#[derive(Clone, Debug)]
pub struct ShotRecord {
    pub outcome_true: Parity,
    pub sensor_signal: f64,
    /// Present only when an FPGA policy consumed a classification.
    pub outcome_classified: Option<u8>,
    pub label: u8,
    pub final_state: DensityState,
    pub final_data_state: DensityState,
    pub timestamp_budget: f64,
}

struct Outcome {
    parity: Parity,
    classified: Option<u8>,
    weight: f64,
    /// Includes the parity probability, excludes `weight` and dephasing.
    coherent: CMatrix,
}

/// An MCM propagated up to (but excluding) dephasing, cached per branch.
pub struct McmRun {
    qubits: Vec<QubitLabel>,
    spec: McmSpec,
    cfg: DeviceConfig,
    parity_prob: [f64; 2],
    outcomes: Vec<Outcome>,
    contrasts: Vec<(usize, f64)>,
}

/// Windows as (level, duration, before refocusing).
fn window_segments(mode: ReadoutMode, t_m: f64) -> Vec<(VoltageLevel, f64, bool)> {
    use VoltageLevel::*;
    match mode {
        ReadoutMode::PhaseAccumulation | ReadoutMode::PhaseAccumulationFpgaCorrected => {
            vec![(RefAncilla, t_m, true), (ReadAncilla, t_m, false)]
        }
        ReadoutMode::PhaseEchoed => {
            let h = t_m / 2.0;
            vec![(RefAncilla, h, true), (ReadAncilla, h, true), (ReadAncilla, h, false), (RefAncilla, h, false)]
        }
    }
}

/// Stark phase of one data qubit over the windows, in the pre-refocusing frame.
/// The ancilla pair sits in (4,4) only during read windows of the odd branch.
fn window_phase(q: QubitLabel, parity: Parity, spec: &McmSpec, cfg: &DeviceConfig) -> Result<f64> {
    let p = cfg.qubit(q)?;
    let decoupled = spec.is_decoupled(q);
    let mut phase = control_phase(q, spec.t_m, cfg)?;
    for (level, duration, before) in window_segments(spec.mode, spec.t_m) {
        let f = match level {
            VoltageLevel::RefAncilla => p.f_vref,
            VoltageLevel::ReadAncilla if parity == Parity::Odd => p.f_vread_even + p.f_c,
            _ => p.f_vread_even,
        };
        let sign = if before && decoupled { -1.0 } else { 1.0 };
        phase += sign * 2.0 * PI * f * duration;
    }
    Ok(phase)
}

fn parity_projector(parity: Parity, pos: [usize; 2], n: usize) -> CMatrix {
    let diag = match parity {
        Parity::Even => [1.0, 0.0, 0.0, 1.0],
        Parity::Odd => [0.0, 1.0, 1.0, 0.0],
    };
    let p = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(4, diag.iter().map(|&d| c(d, 0.0))));
    ops::embed(&p, &pos, n)
}

fn require(qubits: &[QubitLabel], q: QubitLabel) -> Result<usize> {
    qubits.iter().position(|&x| x == q).ok_or(Error::QubitNotInRegister(q))
}

impl McmRun {
    /// Linear in `op`, so it also propagates non-state operators (used for instrument tomography).
    pub fn prepare(op: &CMatrix, qubits: &[QubitLabel], spec: &McmSpec, cfg: &DeviceConfig) -> Result<Self> {
        spec.validate()?;
        let n = qubits.len();
        if op.nrows() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: op.nrows(),
            });
        }
        let a1 = require(qubits, QubitLabel::A1)?;
        let a2 = require(qubits, QubitLabel::A2)?;
        let target = require(qubits, spec.target)?;
        let depol = QuantumChannel::depolarizing(cfg.gate_error.sq_depol);
        let noisy_gates = cfg.gate_error.sq_depol > 0.0;

        let mut m = op.clone();
        if spec.entangle {
            for step in build_cnot(spec.basis, cfg.gate_error.cz_overrotation) {
                let pos: Vec<usize> = step.targets.iter().map(|&t| if t == 0 { target } else { a1 }).collect();
                m = ops::conjugate(&m, &step.unitary, &pos, n);
                if noisy_gates && step.is_single_qubit() {
                    m = ops::apply_kraus(&m, depol.kraus(), &pos, n);
                }
            }
        }

        let data: Vec<(usize, QubitLabel)> =
            qubits.iter().enumerate().filter(|(_, q)| q.is_data()).map(|(i, &q)| (i, q)).collect();
        let classes: Vec<Option<u8>> = if spec.sensor_on { vec![Some(0), Some(1)] } else { vec![None] };

        let mut parity_prob = [0.0; 2];
        let mut outcomes = Vec::new();
        for parity in Parity::BOTH {
            let proj = parity_projector(parity, [a2, a1], n);
            let projected = &proj * &m * &proj;
            parity_prob[parity.index()] = linalg::trace(&projected).re;
            let base: Vec<f64> =
                data.iter().map(|&(_, q)| window_phase(q, parity, spec, cfg)).collect::<Result<_>>()?;
            for &class in &classes {
                let weight = match class {
                    Some(k) => {
                        let p1 = classification_probability(parity, spec.t_m, spec.sensor_on, cfg);
                        if k == 1 {
                            p1
                        } else {
                            1.0 - p1
                        }
                    }
                    None => 1.0,
                };
                let ff = match (spec.policy, class) {
                    (FeedforwardPolicy::FpgaPhase { .. }, Some(k)) => spec.policy.phase_for(k),
                    (FeedforwardPolicy::InLayerCds { phi_r }, _) => phi_r,
                    _ => 0.0,
                };
                let mut out = projected.clone();
                for (&(pos, q), &phase) in data.iter().zip(&base) {
                    let total = if pos == target { phase + ff } else { phase };
                    out = ops::conjugate(&out, &gates::rz(total), &[pos], n);
                    if spec.is_decoupled(q) {
                        out = ops::conjugate(&out, &gates::rx(PI), &[pos], n);
                        if noisy_gates {
                            out = ops::apply_kraus(&out, depol.kraus(), &[pos], n);
                        }
                    }
                }
                outcomes.push(Outcome {
                    parity,
                    classified: class,
                    weight,
                    coherent: out,
                });
            }
        }

        let contrasts = data
            .iter()
            .map(|&(pos, q)| {
                let mode = if spec.is_decoupled(q) { EnvelopeMode::Hahn } else { EnvelopeMode::Ramsey };
                Ok((pos, dephasing_envelope(q, spec.total_time(), mode, cfg)?))
            })
            .collect::<Result<_>>()?;

        Ok(Self {
            qubits: qubits.to_vec(),
            spec: spec.clone(),
            cfg: cfg.clone(),
            parity_prob,
            outcomes,
            contrasts,
        })
    }

    pub fn parity_probabilities(&self) -> [f64; 2] {
        self.parity_prob
    }

    fn dephase(&self, m: &CMatrix) -> CMatrix {
        let n = self.qubits.len();
        self.contrasts.iter().fold(m.clone(), |acc, &(pos, contrast)| {
            if contrast >= 1.0 {
                acc
            } else {
                ops::apply_kraus(&acc, QuantumChannel::dephasing(contrast).kraus(), &[pos], n)
            }
        })
    }

    fn label(&self, o: &Outcome) -> u8 {
        o.classified.unwrap_or(o.parity.index() as u8)
    }

    /// Exact branches with analytic dephasing.
    pub fn branches(&self) -> Vec<McmBranch> {
        self.outcomes
            .iter()
            .map(|o| McmBranch {
                parity: o.parity,
                classified: o.classified,
                label: self.label(o),
                probability: o.weight * self.parity_prob[o.parity.index()],
                matrix: self.dephase(&o.coherent) * c(o.weight, 0.0),
            })
            .collect()
    }

    /// Sum of branch operators whose recorded label is `label`.
    pub fn labelled_operator(&self, label: u8) -> CMatrix {
        let dim = 1 << self.qubits.len();
        self.branches()
            .into_iter()
            .filter(|b| b.label == label)
            .fold(CMatrix::zeros(dim, dim), |acc, b| acc + b.matrix)
    }

    /// Outcome-averaged output operator.
    pub fn average_operator(&self) -> CMatrix {
        self.labelled_operator(0) + self.labelled_operator(1)
    }

    /// Draw one shot: parity (Born rule), sensor signal, classification, then dephasing noise.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ShotRecord> {
        let spec = &self.spec;
        let u: f64 = rng.random();
        let parity = if u < self.parity_prob[0] { Parity::Even } else { Parity::Odd };
        let p = self.parity_prob[parity.index()];
        if p <= 0.0 {
            return Err(Error::ZeroProbabilityBranch(p));
        }
        let signal = sample_sensor_signal(parity, spec.t_m, spec.sensor_on, &self.cfg, rng)?;
        let class = spec.sensor_on.then(|| classify_signal(signal, &self.cfg));
        let outcome = self
            .outcomes
            .iter()
            .find(|o| o.parity == parity && o.classified == class)
            .expect("every (parity, class) pair is cached");
        let n = self.qubits.len();
        let matrix = match self.cfg.dephasing {
            DephasingModel::Analytic => self.dephase(&outcome.coherent),
            DephasingModel::QuasiStatic => {
                let mut m = outcome.coherent.clone();
                for &(pos, contrast) in &self.contrasts {
                    if contrast <= 0.0 {
                        m = ops::apply_kraus(&m, QuantumChannel::dephasing(0.0).kraus(), &[pos], n);
                    } else if contrast < 1.0 {
                        let sigma = (-2.0 * contrast.ln()).sqrt();
                        let delta = Normal::new(0.0, sigma)
                            .map_err(|e| Error::InvalidArgument(e.to_string()))?
                            .sample(rng);
                        m = ops::conjugate(&m, &gates::rz(delta), &[pos], n);
                    }
                }
                m
            }
        };
        let final_state = DensityState::from_branch(self.qubits.clone(), matrix)?;
        let data: Vec<QubitLabel> = self.qubits.iter().copied().filter(|q| q.is_data()).collect();
        let final_data_state = final_state.partial_trace(&data)?;
        let classified_used = spec.sensor_on && spec.policy.needs_classification();
        Ok(ShotRecord {
            outcome_true: parity,
            sensor_signal: signal,
            outcome_classified: if classified_used { class } else { None },
            label: class.unwrap_or(parity.index() as u8),
            final_state,
            final_data_state,
            timestamp_budget: spec.total_time() + if classified_used { self.cfg.feedforward_latency } else { 0.0 },
        })
    }
}

fn check_reference_ancilla(state: &DensityState) -> Result<()> {
    let pop = state.expectation(&gates::Cardinal::One.density(), &[QubitLabel::A2])?;
    if pop < 1.0 - 1e-9 {
        return Err(Error::InvalidState(format!("A2 must be prepared in |1>, population {pop:.6}")));
    }
    Ok(())
}

/// Propagate a register state through one MCM and sample a shot.
pub fn execute_mcm<R: Rng + ?Sized>(
    state: &DensityState,
    spec: &McmSpec,
    cfg: &DeviceConfig,
    rng: &mut R,
) -> Result<ShotRecord> {
    check_reference_ancilla(state)?;
    McmRun::prepare(state.matrix(), state.qubits(), spec, cfg)?.sample(rng)
}

/// Exact-probability counterpart of [`execute_mcm`].
pub fn mcm_branches(state: &DensityState, spec: &McmSpec, cfg: &DeviceConfig) -> Result<Vec<McmBranch>> {
    check_reference_ancilla(state)?;
    Ok(McmRun::prepare(state.matrix(), state.qubits(), spec, cfg)?.branches())
}

/// P(even), P(odd) of the ZZ parity of a pair.
pub fn parity_probabilities(state: &DensityState, pair: (QubitLabel, QubitLabel)) -> Result<[f64; 2]> {
    let pos = [state.position(pair.0)?, state.position(pair.1)?];
    let n = state.n_qubits();
    let mut out = [0.0; 2];
    for parity in Parity::BOTH {
        let proj = parity_projector(parity, pos, n);
        out[parity.index()] = linalg::trace(&(&proj * state.matrix())).re;
    }
    Ok(out)
}

/// Projective PSB parity measurement with Born-rule sampling.
pub fn psb_parity_measure<R: Rng + ?Sized>(
    state: &DensityState,
    pair: (QubitLabel, QubitLabel),
    rng: &mut R,
) -> Result<(Parity, DensityState)> {
    let probs = parity_probabilities(state, pair)?;
    let u: f64 = rng.random();
    let parity = if u < probs[0] { Parity::Even } else { Parity::Odd };
    let pos = [state.position(pair.0)?, state.position(pair.1)?];
    let proj = parity_projector(parity, pos, state.n_qubits());
    let post = DensityState::from_branch(state.qubits().to_vec(), &proj * state.matrix() * &proj)?;
    Ok((parity, post))
}

/// With the reference ancilla in |1⟩, even parity means A1 = 1 and odd means A1 = 0.
pub fn infer_single_qubit(outcome_zz: u8) -> u8 {
    1 - (outcome_zz & 1)
}
