use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Split of a `m*n` dimensional space into factors `m` (A) and `n` (B).
/// B is the minor index of every tensor product in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    pub m: usize,
    pub n: usize,
}

impl Bipartition {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidPartition(format!(
                "both factors must be at least 2, got {m}x{n}"
            )));
        }
        Ok(Bipartition { m, n })
    }

    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    pub fn min_factor(&self) -> usize {
        self.m.min(self.n)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dim,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

/// Split into `N >= 2` factors, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiPartition {
    pub dims: Vec<usize>,
}

impl MultiPartition {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidPartition(
                "a multipartition needs at least two factors".into(),
            ));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidPartition(format!(
                "every factor must be at least 2, got {dims:?}"
            )));
        }
        Ok(MultiPartition { dims })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of factors if every factor is a qubit.
    pub fn qubit_count(&self) -> Option<usize> {
        self.dims.iter().all(|&d| d == 2).then_some(self.dims.len())
    }
}

impl fmt::Display for MultiPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.qubit_count() {
            return write!(f, "2^{n}");
        }
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Either kind of partition, as accepted on the command line.
///
/// `"MxN"` parses as a bipartition, `"2^N"` and `"AxBxC..."` as multipartitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Partition {
    Bi(Bipartition),
    Multi(MultiPartition),
}

impl Partition {
    pub fn dim(&self) -> usize {
        match self {
            Partition::Bi(b) => b.dim(),
            Partition::Multi(m) => m.dim(),
        }
    }

    pub fn as_bipartition(&self) -> Option<Bipartition> {
        match self {
            Partition::Bi(b) => Some(*b),
            Partition::Multi(_) => None,
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Partition::Bi(b) => b.fmt(f),
            Partition::Multi(m) => m.fmt(f),
        }
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidPartition(format!("cannot parse partition {s:?}"));
        if let Some((base, exp)) = s.split_once('^') {
            let base: usize = base.trim().parse().map_err(|_| bad())?;
            let exp: usize = exp.trim().parse().map_err(|_| bad())?;
            if base != 2 {
                return Err(Error::InvalidPartition(format!(
                    "only qubit powers 2^N are supported, got {s:?}"
                )));
            }
            if exp > 30 {
                return Err(bad());
            }
            return Ok(Partition::Multi(MultiPartition::qubits(exp)?));
        }
        let dims = s
            .split(['x', 'X', '|'])
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        match dims.as_slice() {
            [m, n] => Ok(Partition::Bi(Bipartition::new(*m, *n)?)),
            _ => Ok(Partition::Multi(MultiPartition::new(dims)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(
            "2x4".parse::<Partition>().unwrap(),
            Partition::Bi(Bipartition { m: 2, n: 4 })
        );
        assert_eq!(
            "2^3".parse::<Partition>().unwrap(),
            Partition::Multi(MultiPartition {
                dims: vec![2, 2, 2]
            })
        );
        assert_eq!("2|3|2".parse::<Partition>().unwrap().dim(), 12);
        assert!("1x4".parse::<Partition>().is_err());
        assert!("3^2".parse::<Partition>().is_err());
        assert!("axb".parse::<Partition>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["2x4", "3x3", "2^5"] {
            assert_eq!(s.parse::<Partition>().unwrap().to_string(), s);
        }
    }
}
