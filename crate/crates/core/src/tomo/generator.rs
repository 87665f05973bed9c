//! Hamiltonian and stochastic error generators of an estimated instrument.
//!
//! An instrument is not invertible as a channel (the measurement destroys
//! ancilla coherence), so the generator is fitted rather than taken from a
//! matrix logarithm. In outcome-summed scope the estimate is embedded as
//! ρ ↦ Σ_k Tr_A Q_k(ρ) ⊗ |k⟩⟨k| (record on the ancilla line) and modelled as
//! D ∘ exp(L) ∘ T, where T is the summed target and D reads the record from the
//! ancilla in the target's pointer basis. The ancilla enters an MCM freshly
//! initialized, so the summed fit runs on inputs with the ancilla in |1⟩;
//! errors that act only on a coherent ancilla input have no operational
//! meaning there. Only a representative subset of generators is identifiable;
//! the rest are reported as zero.
//!
//! Conventions: H_P(ρ) = −i[P, ρ] (coefficient in radians, exp gives e^{−ihP}),
//! S_P(ρ) = PρP − ρ (exp gives flip probability (1 − e^{−2s})/2).

use std::collections::BTreeMap;

use super::instrument::QuantumInstrument;
use crate::error::{Error, Result};
use crate::sim::linalg::{self, c, CMatrix, RMatrix};
use crate::sim::{ops, PauliString, PauliTransferMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Hamiltonian,
    Stochastic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GeneratorScope {
    #[default]
    OutcomeSummed,
    PerOutcome,
}

/// Coefficients keyed by two-qubit Pauli label (data first), 15 entries each.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorGeneratorDecomposition {
    pub h: BTreeMap<String, f64>,
    pub s: BTreeMap<String, f64>,
    pub residual_norm: f64,
}

impl ErrorGeneratorDecomposition {
    fn zero() -> Self {
        let labels = || PauliString::all(2).into_iter().filter(|p| !p.is_identity()).map(|p| (p.to_string(), 0.0));
        Self {
            h: labels().collect(),
            s: labels().collect(),
            residual_norm: 0.0,
        }
    }

    pub fn h(&self, label: &str) -> f64 {
        self.h.get(label).copied().unwrap_or(0.0)
    }

    pub fn s(&self, label: &str) -> f64 {
        self.s.get(label).copied().unwrap_or(0.0)
    }

    /// Probability that the record is flipped, from s_IX.
    pub fn pure_readout_error(&self) -> f64 {
        flip_probability(self.s("IX"))
    }

    /// Stochastic Z rate on the data qubit.
    pub fn dephasing_coefficient(&self) -> f64 {
        self.s("ZI")
    }

    pub fn max_abs(&self) -> f64 {
        self.h.values().chain(self.s.values()).fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn flip_probability(s: f64) -> f64 {
    (1.0 - (-2.0 * s).exp()) / 2.0
}

/// Rate whose exponentiated stochastic generator has dephasing contrast `contrast`.
pub fn rate_of_contrast(contrast: f64) -> f64 {
    -0.5 * contrast.ln()
}

#[derive(Clone, Debug)]
pub struct ElementaryGenerator {
    pub kind: GeneratorKind,
    pub pauli: PauliString,
    pub ptm: RMatrix,
}

impl ElementaryGenerator {
    pub fn new(kind: GeneratorKind, pauli: PauliString) -> Self {
        let p = pauli.matrix();
        let map = match kind {
            GeneratorKind::Hamiltonian => {
                PauliTransferMap::from_map(2, |rho| (&p * rho - rho * &p) * c(0.0, -1.0))
            }
            GeneratorKind::Stochastic => PauliTransferMap::from_map(2, |rho| &p * rho * &p - rho),
        };
        Self {
            kind,
            pauli,
            ptm: map.into_matrix(),
        }
    }

    pub fn parse(kind: GeneratorKind, label: &str) -> Result<Self> {
        let p = PauliString::parse(label).ok_or_else(|| Error::InvalidArgument(format!("Pauli label `{label}`")))?;
        Ok(Self::new(kind, p))
    }
}

/// All 30 generators in fitting priority: S_ZI, S_IX, every H, then the other S.
pub fn generator_basis() -> Vec<ElementaryGenerator> {
    let paulis: Vec<PauliString> = PauliString::all(2).into_iter().filter(|p| !p.is_identity()).collect();
    let first = ["ZI", "IX"];
    let mut out: Vec<ElementaryGenerator> = first
        .iter()
        .map(|l| ElementaryGenerator::new(GeneratorKind::Stochastic, PauliString::parse(l).unwrap()))
        .collect();
    out.extend(paulis.iter().map(|p| ElementaryGenerator::new(GeneratorKind::Hamiltonian, p.clone())));
    out.extend(
        paulis
            .iter()
            .filter(|p| !first.contains(&p.to_string().as_str()))
            .map(|p| ElementaryGenerator::new(GeneratorKind::Stochastic, p.clone())),
    );
    out
}

fn flatten(m: &RMatrix) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_column_slice(m.as_slice())
}

/// Greedily keep generators whose first-order effect post·G·pre is new.
fn representative(basis: &[ElementaryGenerator], pre: &RMatrix, post: &RMatrix) -> Vec<usize> {
    let mut kept = Vec::new();
    let mut ortho: Vec<nalgebra::DVector<f64>> = Vec::new();
    for (j, g) in basis.iter().enumerate() {
        let mut v = flatten(&(post * &g.ptm * pre));
        let norm = v.norm();
        if norm < 1e-12 {
            continue;
        }
        for u in &ortho {
            let proj = u.dot(&v);
            v -= u * proj;
        }
        if v.norm() > 1e-8 * norm {
            ortho.push(&v / v.norm());
            kept.push(j);
        }
    }
    kept
}

fn generator_sum(basis: &[ElementaryGenerator], idx: &[usize], coef: &[f64]) -> RMatrix {
    idx.iter().zip(coef).fold(RMatrix::zeros(16, 16), |acc, (&j, &x)| acc + &basis[j].ptm * x)
}

/// Levenberg–Marquardt fit of observed ≈ post · exp(Σ c_j G_j) · pre over the representative generators.
fn fit(observed: &RMatrix, pre: &RMatrix, post: &RMatrix) -> Result<ErrorGeneratorDecomposition> {
    let basis = generator_basis();
    let idx = representative(&basis, pre, post);
    let residual = |coef: &[f64]| flatten(&(post * linalg::expm(&generator_sum(&basis, &idx, coef)) * pre - observed));
    let m = idx.len();
    let mut coef = vec![0.0; m];
    let mut r = residual(&coef);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-6;
    for _ in 0..200 {
        if cost < 1e-30 {
            break;
        }
        let h = 1e-6;
        let mut jac = RMatrix::zeros(r.len(), m);
        for j in 0..m {
            let mut plus = coef.clone();
            let mut minus = coef.clone();
            plus[j] += h;
            minus[j] -= h;
            jac.set_column(j, &((residual(&plus) - residual(&minus)) / (2.0 * h)));
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;
        let mut improved = false;
        for _ in 0..20 {
            let mut a = jtj.clone();
            for i in 0..m {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let Some(step) = a.clone().cholesky().map(|ch| ch.solve(&(-&jtr))) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = coef.iter().zip(step.iter()).map(|(x, d)| x + d).collect();
            let r_trial = residual(&trial);
            let c_trial = r_trial.norm_squared();
            if c_trial < cost {
                let small = step.norm() < 1e-14 * (1.0 + coef.iter().map(|x| x * x).sum::<f64>().sqrt());
                coef = trial;
                r = r_trial;
                cost = c_trial;
                lambda = (lambda / 10.0).max(1e-12);
                improved = !small;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if coef.iter().any(|x| !x.is_finite()) {
        return Err(Error::FitDegenerate("error-generator fit diverged".into()));
    }
    let mut out = ErrorGeneratorDecomposition::zero();
    for (&j, &x) in idx.iter().zip(&coef) {
        let g = &basis[j];
        let table = match g.kind {
            GeneratorKind::Hamiltonian => &mut out.h,
            GeneratorKind::Stochastic => &mut out.s,
        };
        table.insert(g.pauli.to_string(), x);
    }
    out.residual_norm = cost.sqrt();
    Ok(out)
}

/// Ancilla basis state |a(k)⟩ that the target leaves for outcome k.
fn pointer_states(target: &QuantumInstrument) -> Result<[usize; 2]> {
    let mixed = linalg::identity(4) * c(0.25, 0.0);
    let mut out = [0usize; 2];
    for (k, slot) in out.iter_mut().enumerate() {
        let anc = ops::partial_trace(&target.map(k).apply(&mixed), &[1], 2);
        let total = anc[(0, 0)].re + anc[(1, 1)].re;
        let p0 = anc[(0, 0)].re / total;
        if (p0 - 0.5).abs() < 0.5 - 1e-6 {
            return Err(Error::FitDegenerate(format!("target outcome {k} leaves no definite ancilla pointer")));
        }
        *slot = usize::from(p0 < 0.5);
    }
    if out[0] == out[1] {
        return Err(Error::FitDegenerate("target outcomes share a pointer state".into()));
    }
    Ok(out)
}

/// ρ ↦ Tr_A(ρ) ⊗ |1⟩⟨1|: the ancilla input as the MCM actually receives it.
fn ancilla_initialization() -> RMatrix {
    let one = crate::sim::gates::Cardinal::One.density();
    PauliTransferMap::from_map(2, |rho| ops::partial_trace(rho, &[0], 2).kronecker(&one)).into_matrix()
}

/// ρ ↦ Σ_k Tr_A Q_k(ρ) ⊗ |k⟩⟨k|.
fn record_embedding(inst: &QuantumInstrument) -> RMatrix {
    PauliTransferMap::from_map(2, |rho| {
        let mut out = CMatrix::zeros(4, 4);
        for k in 0..2 {
            let data = ops::partial_trace(&inst.map(k).apply(rho), &[0], 2);
            let mut record = CMatrix::zeros(2, 2);
            record[(k, k)] = c(1.0, 0.0);
            out += data.kronecker(&record);
        }
        out
    })
    .into_matrix()
}

/// Dephase the ancilla in the pointer basis and relabel pointer a(k) as record k.
fn decode(pointer: [usize; 2]) -> RMatrix {
    PauliTransferMap::from_map(2, |rho| {
        let mut out = CMatrix::zeros(4, 4);
        for (k, &a) in pointer.iter().enumerate() {
            for d in 0..2 {
                for e in 0..2 {
                    out[(2 * d + k, 2 * e + k)] += rho[(2 * d + a, 2 * e + a)];
                }
            }
        }
        out
    })
    .into_matrix()
}

/// Generator of the error process separating `est` from `target`.
pub fn error_generator(
    est: &QuantumInstrument,
    target: &QuantumInstrument,
    scope: GeneratorScope,
) -> Result<Vec<ErrorGeneratorDecomposition>> {
    match scope {
        GeneratorScope::OutcomeSummed => {
            let pointer = pointer_states(target)?;
            let init = ancilla_initialization();
            let observed = record_embedding(est) * &init;
            Ok(vec![fit(&observed, &(target.total().matrix() * &init), &decode(pointer))?])
        }
        GeneratorScope::PerOutcome => (0..2)
            .map(|k| fit(est.map(k).matrix(), target.map(k).matrix(), &RMatrix::identity(16, 16)))
            .collect(),
    }
}

/// Outcome-summed decomposition.
pub fn summed_error_generator(est: &QuantumInstrument, target: &QuantumInstrument) -> Result<ErrorGeneratorDecomposition> {
    Ok(error_generator(est, target, GeneratorScope::OutcomeSummed)?.remove(0))
}

pub fn pure_readout_error(est: &QuantumInstrument, target: &QuantumInstrument) -> Result<f64> {
    Ok(summed_error_generator(est, target)?.pure_readout_error())
}

pub fn dephasing_coefficient(est: &QuantumInstrument, target: &QuantumInstrument) -> Result<f64> {
    Ok(summed_error_generator(est, target)?.dephasing_coefficient())
}

/// For invertible channels: principal log of est · target⁻¹, projected onto all 30 generators.
pub fn channel_error_generator(est: &PauliTransferMap, target: &PauliTransferMap) -> Result<ErrorGeneratorDecomposition> {
    let t = target.matrix();
    let rank = linalg::real_rank(t, 1e-10);
    if rank < t.nrows() {
        return Err(Error::RankDeficient { rank, needed: t.nrows() });
    }
    let inv = t.clone().try_inverse().ok_or(Error::RankDeficient { rank, needed: t.nrows() })?;
    let l = linalg::logm(&(est.matrix() * inv))?;
    let basis = generator_basis();
    let design = RMatrix::from_fn(256, basis.len(), |i, j| basis[j].ptm.as_slice()[i]);
    let coef = linalg::real_pinv(&design) * flatten(&l);
    let fitted = &design * &coef;
    let mut out = ErrorGeneratorDecomposition::zero();
    for (g, &x) in basis.iter().zip(coef.iter()) {
        let table = match g.kind {
            GeneratorKind::Hamiltonian => &mut out.h,
            GeneratorKind::Stochastic => &mut out.s,
        };
        table.insert(g.pauli.to_string(), x);
    }
    out.residual_norm = (fitted - flatten(&l)).norm();
    Ok(out)
}

/// The instrument whose record is read from the ancilla (pointer basis of `target`)
/// after `channel` acts on the summed target output; the ancilla is left in the pointer.
pub fn decoded_instrument(target: &QuantumInstrument, channel: &RMatrix) -> Result<QuantumInstrument> {
    let pointer = pointer_states(target)?;
    let summed = PauliTransferMap::new(2, channel * target.total().matrix())?;
    let maps: Vec<PauliTransferMap> = pointer
        .iter()
        .map(|&a| {
            let proj = {
                let mut p = CMatrix::zeros(2, 2);
                p[(a, a)] = c(1.0, 0.0);
                linalg::identity(2).kronecker(&p)
            };
            let proj_ptm = PauliTransferMap::from_map(2, |rho| &proj * rho * &proj);
            proj_ptm.compose(&summed)
        })
        .collect::<Result<_>>()?;
    QuantumInstrument::new(maps[0].clone(), maps[1].clone())
}
