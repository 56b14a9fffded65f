//! Bit sequences: observed generator output and oracle patterns.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// A finite sequence of bits, most significant (earliest) first.
///
/// Parses from strings like `"10"`; used for the attacker's observed output
/// and for the amplification oracle's good pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSeq(Vec<u8>);

impl BitSeq {
    /// Wraps a vector of 0/1 values.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parameter("bit values must be 0 or 1".into()));
        }
        Ok(BitSeq(bits))
    }

    /// The all-ones pattern of length `len` (the amplification good pattern).
    pub fn ones(len: usize) -> Self {
        BitSeq(vec![1; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }
}

impl FromStr for BitSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parameter("bit string must be nonempty".into()));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parameter(format!(
                    "bit string must match [01]+, found {other:?}"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitSeq)
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let bits: BitSeq = "10".parse().unwrap();
        assert_eq!(bits.as_slice(), &[1, 0]);
        assert_eq!(bits.to_string(), "10");
        assert_eq!(bits.len(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!("".parse::<BitSeq>().is_err());
        assert!("12".parse::<BitSeq>().is_err());
        assert!("1 0".parse::<BitSeq>().is_err());
        assert!(BitSeq::new(vec![0, 2]).is_err());
    }

    #[test]
    fn ones_pattern() {
        assert_eq!(BitSeq::ones(3).to_string(), "111");
    }
}
