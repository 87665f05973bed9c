//! Tomographic fiducials and count tables.
//!
//! Preparations are the 36 products of single-qubit cardinal states; each
//! measurement setting is a Pauli axis per qubit read in its eigenbasis, so a
//! circuit is (preparation, setting) and its results are (axis signs, outcome).

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::instrument::QuantumInstrument;
use crate::error::{Error, Result};
use crate::sim::linalg::{self, CMatrix};
use crate::sim::gates::Cardinal;

/// Eigenstate of a Pauli axis, labelled "+z" (|0⟩), "-z", "+x", "-x", "+y", "-y".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AxisState {
    pub axis: char,
    pub positive: bool,
}

impl AxisState {
    pub const ALL: [AxisState; 6] = [
        AxisState { axis: 'z', positive: true },
        AxisState { axis: 'z', positive: false },
        AxisState { axis: 'x', positive: true },
        AxisState { axis: 'x', positive: false },
        AxisState { axis: 'y', positive: true },
        AxisState { axis: 'y', positive: false },
    ];

    pub fn cardinal(self) -> Cardinal {
        match (self.axis, self.positive) {
            ('z', true) => Cardinal::Zero,
            ('z', false) => Cardinal::One,
            ('x', true) => Cardinal::Plus,
            ('x', false) => Cardinal::Minus,
            ('y', true) => Cardinal::PlusI,
            _ => Cardinal::MinusI,
        }
    }

    pub fn density(self) -> CMatrix {
        self.cardinal().density()
    }

    pub fn label(self) -> String {
        format!("{}{}", if self.positive { '+' } else { '-' }, self.axis)
    }

    pub fn parse(s: &str) -> Option<Self> {
        let mut chars = s.trim().chars();
        let positive = match chars.next()? {
            '+' => true,
            '-' => false,
            _ => return None,
        };
        let axis = chars.next()?;
        if chars.next().is_some() || !"xyz".contains(axis) {
            return None;
        }
        Some(Self { axis, positive })
    }
}

/// A two-qubit product fiducial on (data, ancilla), e.g. "+x,-z".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fiducial(pub AxisState, pub AxisState);

impl Fiducial {
    pub fn density(&self) -> CMatrix {
        self.0.density().kronecker(&self.1.density())
    }

    pub fn label(&self) -> String {
        format!("{},{}", self.0.label(), self.1.label())
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad fiducial label `{s}`"));
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        Ok(Self(AxisState::parse(a).ok_or_else(bad)?, AxisState::parse(b).ok_or_else(bad)?))
    }
}

/// Measurement setting: Pauli axis per qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Setting(pub char, pub char);

impl Setting {
    pub fn all() -> Vec<Setting> {
        let axes = ['x', 'y', 'z'];
        axes.iter().flat_map(|&a| axes.iter().map(move |&b| Setting(a, b))).collect()
    }

    /// The four effects of this setting, as fiducials.
    pub fn effects(&self) -> [Fiducial; 4] {
        let s = |axis, positive| AxisState { axis, positive };
        [
            Fiducial(s(self.0, true), s(self.1, true)),
            Fiducial(s(self.0, true), s(self.1, false)),
            Fiducial(s(self.0, false), s(self.1, true)),
            Fiducial(s(self.0, false), s(self.1, false)),
        ]
    }

    pub fn of_effect(e: &Fiducial) -> Setting {
        Setting(e.0.axis, e.1.axis)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiducialSet {
    pub preparations: Vec<Fiducial>,
    pub settings: Vec<Setting>,
}

impl FiducialSet {
    /// 36 cardinal preparations and 9 Pauli settings: informationally complete on both sides.
    pub fn standard() -> Self {
        let preparations = AxisState::ALL
            .iter()
            .flat_map(|&a| AxisState::ALL.iter().map(move |&b| Fiducial(a, b)))
            .collect();
        Self {
            preparations,
            settings: Setting::all(),
        }
    }

    pub fn effects(&self) -> Vec<Fiducial> {
        self.settings.iter().flat_map(|s| s.effects()).collect()
    }
}

/// One row of a count table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub prep_fiducial: String,
    pub meas_fiducial: String,
    pub outcome: u8,
    pub count: i64,
}

/// Exact outcome probabilities (or expected frequencies) per (prep, effect, outcome).
#[derive(Clone, Debug, PartialEq)]
pub struct FiducialData {
    pub rows: Vec<(Fiducial, Fiducial, u8, f64)>,
}

impl FiducialData {
    pub fn exact(inst: &QuantumInstrument, fiducials: &FiducialSet) -> Self {
        let mut rows = Vec::new();
        for prep in &fiducials.preparations {
            let rho = prep.density();
            let outputs = [inst.map(0).apply(&rho), inst.map(1).apply(&rho)];
            for effect in fiducials.effects() {
                let e = effect.density();
                for k in 0..2u8 {
                    let p = linalg::trace(&(&e * &outputs[k as usize])).re;
                    rows.push((*prep, effect, k, p));
                }
            }
        }
        Self { rows }
    }

    /// Multinomial counts with `shots` repetitions of every (preparation, setting) circuit.
    pub fn sample<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> Result<Vec<CountRow>> {
        let mut out = Vec::with_capacity(self.rows.len());
        for circuit in self.rows.chunks(8) {
            // Sequential binomials realise one multinomial draw.
            let mut remaining = shots;
            let mut mass = 1.0f64;
            for (i, (prep, effect, k, p)) in circuit.iter().enumerate() {
                let p = p.max(0.0);
                let n = if i + 1 == circuit.len() || mass <= 0.0 {
                    remaining
                } else {
                    let q = (p / mass).clamp(0.0, 1.0);
                    Binomial::new(remaining, q).map_err(|e| Error::InvalidArgument(e.to_string()))?.sample(rng)
                };
                remaining -= n;
                mass -= p;
                out.push(CountRow {
                    prep_fiducial: prep.label(),
                    meas_fiducial: effect.label(),
                    outcome: *k,
                    count: n as i64,
                });
            }
        }
        Ok(out)
    }

    /// Frequencies from a count table, normalized per (preparation, setting) circuit.
    pub fn from_counts(rows: &[CountRow]) -> Result<Self> {
        use std::collections::HashMap;
        let mut parsed = Vec::with_capacity(rows.len());
        let mut totals: HashMap<(Fiducial, Setting), i64> = HashMap::new();
        for row in rows {
            let circuit = format!("{} / {}", row.prep_fiducial, row.meas_fiducial);
            if row.count < 0 {
                return Err(Error::NegativeCounts {
                    circuit,
                    count: row.count,
                });
            }
            if row.outcome > 1 {
                return Err(Error::InvalidArgument(format!("outcome {} in {circuit}", row.outcome)));
            }
            let prep = Fiducial::parse(&row.prep_fiducial)?;
            let effect = Fiducial::parse(&row.meas_fiducial)?;
            *totals.entry((prep, Setting::of_effect(&effect))).or_default() += row.count;
            parsed.push((prep, effect, row.outcome, row.count));
        }
        let rows = parsed
            .into_iter()
            .map(|(prep, effect, k, n)| {
                let total = totals[&(prep, Setting::of_effect(&effect))];
                let f = if total > 0 { n as f64 / total as f64 } else { 0.0 };
                (prep, effect, k, f)
            })
            .collect();
        Ok(Self { rows })
    }
}

pub fn write_counts_csv<W: Write>(rows: &[CountRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_counts_csv<R: Read>(input: R) -> Result<Vec<CountRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomo::instrument::tests::ideal_z;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn labels_round_trip() {
        for prep in FiducialSet::standard().preparations {
            assert_eq!(Fiducial::parse(&prep.label()).unwrap(), prep);
        }
        assert_eq!(AxisState::parse("+z").unwrap().cardinal(), Cardinal::Zero);
        assert!(Fiducial::parse("+q,-z").is_err());
        assert!(Fiducial::parse("+x").is_err());
    }

    #[test]
    fn probabilities_sum_to_one_per_circuit() {
        let data = FiducialData::exact(&ideal_z(), &FiducialSet::standard());
        assert_eq!(data.rows.len(), 36 * 9 * 8);
        for circuit in data.rows.chunks(8) {
            let total: f64 = circuit.iter().map(|r| r.3).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn counts_csv_round_trip_and_validation() {
        let data = FiducialData::exact(&ideal_z(), &FiducialSet::standard());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let counts = data.sample(1000, &mut rng).unwrap();
        for circuit in counts.chunks(8) {
            assert_eq!(circuit.iter().map(|r| r.count).sum::<i64>(), 1000);
        }
        let mut buf = Vec::new();
        write_counts_csv(&counts, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("prep_fiducial,meas_fiducial,outcome,count\n"));
        assert_eq!(read_counts_csv(&buf[..]).unwrap(), counts);

        let mut bad = counts.clone();
        bad[3].count = -1;
        assert!(matches!(FiducialData::from_counts(&bad), Err(Error::NegativeCounts { .. })));
    }
}
