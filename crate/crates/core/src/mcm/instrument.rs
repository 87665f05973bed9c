use super::engine::McmRun;
use super::spec::McmSpec;
use crate::device::DeviceConfig;
use crate::error::Result;
use crate::sim::gates::Cardinal;
use crate::sim::{ops, PauliTransferMap, QubitLabel};
use crate::tomo::QuantumInstrument;

/// Exact outcome maps on (target data qubit, A1), with A2 prepared in |1⟩.
/// Outcomes are the recorded labels, so classification errors are included.
pub fn instrument_of_spec(spec: &McmSpec, cfg: &DeviceConfig) -> Result<QuantumInstrument> {
    spec.validate()?;
    let qubits = [QubitLabel::A2, QubitLabel::A1, spec.target];
    let reference = Cardinal::One.density();
    // Register order (A2, A1, data); the instrument acts on (data, A1).
    let swap_in = |rho: &crate::sim::CMatrix| ops::conjugate(rho, &crate::sim::gates::swap(), &[0, 1], 2);
    let maps = (0..2u8)
        .map(|k| {
            let failure = std::cell::RefCell::new(None);
            let map = PauliTransferMap::from_map(2, |rho| {
                let full = reference.kronecker(&swap_in(rho));
                match McmRun::prepare(&full, &qubits, spec, cfg) {
                    Ok(run) => ops::partial_trace(&run.labelled_operator(k), &[2, 1], 3),
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        crate::sim::CMatrix::zeros(4, 4)
                    }
                }
            });
            match failure.into_inner() {
                Some(e) => Err(e),
                None => Ok(map),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    QuantumInstrument::new(maps[0].clone(), maps[1].clone())
}
