use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Qubits of the four-dot array, in register (tensor-product) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum QubitLabel {
    A2,
    A1,
    D1,
    D2,
}

impl QubitLabel {
    pub const REGISTER: [QubitLabel; 4] = [QubitLabel::A2, QubitLabel::A1, QubitLabel::D1, QubitLabel::D2];

    pub fn register_index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            QubitLabel::A2 => "A2",
            QubitLabel::A1 => "A1",
            QubitLabel::D1 => "D1",
            QubitLabel::D2 => "D2",
        }
    }

    pub fn is_data(self) -> bool {
        matches!(self, QubitLabel::D1 | QubitLabel::D2)
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QubitLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A2" => Ok(QubitLabel::A2),
            "A1" => Ok(QubitLabel::A1),
            "D1" => Ok(QubitLabel::D1),
            "D2" => Ok(QubitLabel::D2),
            other => Err(Error::Config(format!("unknown qubit label `{other}`"))),
        }
    }
}

/// Sort labels into register order and reject duplicates.
pub fn canonical_order(labels: &[QubitLabel]) -> Result<Vec<QubitLabel>, Error> {
    let mut out = labels.to_vec();
    out.sort();
    let before = out.len();
    out.dedup();
    if out.len() != before {
        return Err(Error::InvalidArgument("duplicate qubit label".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn register_order_is_fixed() {
        let order: Vec<_> = QubitLabel::REGISTER.iter().map(|q| q.register_index()).collect();
        assert_eq!(order, vec![0, 1, 2, 3]);
        assert_eq!(
            canonical_order(&[QubitLabel::D2, QubitLabel::A1, QubitLabel::D1]).unwrap(),
            vec![QubitLabel::A1, QubitLabel::D1, QubitLabel::D2]
        );
    }

    #[test]
    fn parses_labels() {
        assert_eq!("d1".parse::<QubitLabel>().unwrap(), QubitLabel::D1);
        assert!("Q7".parse::<QubitLabel>().is_err());
    }
}
