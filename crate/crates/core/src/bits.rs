//! Fixed-length bit strings printed most-significant (first) bit leftmost.

use std::fmt;
use std::ops::{BitXor, Index};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QheError, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// Low `len` bits of `value`, first position = most significant.
    pub fn from_index(value: usize, len: usize) -> Self {
        BitString(
            (0..len)
                .map(|k| (value >> (len - 1 - k)) & 1 == 1)
                .collect(),
        )
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        BitString((0..len).map(|_| rng.gen::<bool>()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> bool {
        self.0[k]
    }

    pub fn set(&mut self, k: usize, value: bool) {
        self.0[k] = value;
    }

    pub fn flip(&mut self, k: usize) {
        self.0[k] = !self.0[k];
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|b| !b)
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString(self.0[start..end].to_vec())
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BitString(v)
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// Bitwise XOR; lengths must agree.
    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(QheError::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(BitString(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }
}

impl Index<usize> for BitString {
    type Output = bool;
    fn index(&self, k: usize) -> &bool {
        &self.0[k]
    }
}

impl BitXor for &BitString {
    type Output = BitString;

    /// Panics on length mismatch; use [`BitString::xor`] for a checked form.
    fn bitxor(self, rhs: &BitString) -> BitString {
        self.xor(rhs)
            .expect("xor of bit strings with different lengths")
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitString(iter.into_iter().collect())
    }
}

impl From<Vec<bool>> for BitString {
    fn from(v: Vec<bool>) -> Self {
        BitString(v)
    }
}

impl FromStr for BitString {
    type Err = QheError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(QheError::InvalidBits(s.to_string())),
            })
            .collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for literals in tests and fixtures: `bits("0110")`.
///
/// Panics on characters other than `0`/`1`.
pub fn bits(s: &str) -> BitString {
    s.parse().expect("bit literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let b = bits("1010");
        assert_eq!(b.len(), 4);
        assert_eq!(b.to_string(), "1010");
        assert_eq!(b.to_index(), 10);
        assert_eq!(BitString::from_index(10, 4), b);
        assert!("10a".parse::<BitString>().is_err());
    }

    #[test]
    fn xor_checks_length() {
        assert_eq!(bits("11").xor(&bits("01")).unwrap(), bits("10"));
        assert!(bits("11").xor(&bits("1")).is_err());
    }
}
