use std::collections::HashMap;

use super::fiducials::{Fiducial, FiducialData, FiducialSet};
use super::instrument::{cp_project, QuantumInstrument};
use crate::error::{Error, Result};
use crate::sim::linalg::{self, RMatrix};
use crate::sim::{normalized_basis, to_pauli_vector, PauliTransferMap};

fn pauli_columns(fids: &[Fiducial]) -> RMatrix {
    let basis = normalized_basis(2);
    let mut m = RMatrix::zeros(basis.len(), fids.len());
    for (j, f) in fids.iter().enumerate() {
        m.set_column(j, &to_pauli_vector(&f.density(), &basis));
    }
    m
}

/// Per-outcome linear inversion Q_k = pinv(Eᵀ) P_k pinv(R). The result need not be physical.
pub fn linear_inversion(data: &FiducialData, fiducials: &FiducialSet) -> Result<QuantumInstrument> {
    let preps = &fiducials.preparations;
    let effects = fiducials.effects();
    let r = pauli_columns(preps);
    let e = pauli_columns(&effects);
    for m in [&r, &e] {
        let rank = linalg::real_rank(m, 1e-10);
        if rank < 16 {
            return Err(Error::RankDeficient { rank, needed: 16 });
        }
    }
    let index: HashMap<(Fiducial, Fiducial, u8), f64> =
        data.rows.iter().map(|&(p, m, k, v)| ((p, m, k), v)).collect();
    let r_pinv = linalg::real_pinv(&r);
    let et_pinv = linalg::real_pinv(&e.transpose());
    let mut maps = Vec::with_capacity(2);
    for k in 0..2u8 {
        let mut p = RMatrix::zeros(effects.len(), preps.len());
        for (i, eff) in effects.iter().enumerate() {
            for (j, prep) in preps.iter().enumerate() {
                p[(i, j)] = *index.get(&(*prep, *eff, k)).ok_or_else(|| {
                    Error::InvalidArgument(format!("no data for {} / {} outcome {k}", prep.label(), eff.label()))
                })?;
            }
        }
        maps.push(PauliTransferMap::new(2, &et_pinv * p * &r_pinv)?);
    }
    QuantumInstrument::unchecked(maps[0].clone(), maps[1].clone())
}

/// Linear inversion followed by CP and trace-preservation projection.
pub fn reconstruct_instrument(data: &FiducialData, fiducials: &FiducialSet) -> Result<QuantumInstrument> {
    let projected = cp_project(&linear_inversion(data, fiducials)?)?;
    projected.validate()?;
    Ok(projected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomo::instrument::tests::ideal_z;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_probabilities_recover_instrument() {
        let fids = FiducialSet::standard();
        let z = ideal_z();
        let est = reconstruct_instrument(&FiducialData::exact(&z, &fids), &fids).unwrap();
        assert!(est.max_abs_diff(&z) < 1e-10);
    }

    #[test]
    fn too_few_preparations_is_rank_deficient() {
        let mut fids = FiducialSet::standard();
        fids.preparations.truncate(6);
        let data = FiducialData::exact(&ideal_z(), &fids);
        assert!(matches!(linear_inversion(&data, &fids), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn sampled_error_shrinks_like_inverse_sqrt_shots() {
        let fids = FiducialSet::standard();
        let z = ideal_z();
        let exact = FiducialData::exact(&z, &fids);
        let rms = |shots: u64| {
            let mut total = 0.0;
            let reps = 4;
            for seed in 0..reps {
                let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
                let counts = exact.sample(shots, &mut rng).unwrap();
                let est = linear_inversion(&FiducialData::from_counts(&counts).unwrap(), &fids).unwrap();
                for k in 0..2 {
                    total += (est.map(k).matrix() - z.map(k).matrix()).norm_squared();
                }
            }
            (total / reps as f64).sqrt()
        };
        let ratio = rms(2_500) / rms(10_000);
        // √4 = 2 expected; sampling noise on the estimate itself is a few percent.
        assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
    }
}
