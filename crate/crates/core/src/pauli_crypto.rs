//! Quantum one-time pad and the classical pad used to ship key material.
//!
//! A [`PauliKey`] `(x, z)` encrypts wire `k` with `Z^z(k) X^x(k)`. Wires that
//! are not meant to be hidden simply carry zero key bits.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{QheError, Result};
use crate::statevector::{GateKind, StateVector};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliKey {
    x: BitString,
    z: BitString,
}

impl PauliKey {
    pub fn new(x: BitString, z: BitString) -> Result<Self> {
        if x.len() != z.len() {
            return Err(QheError::LengthMismatch {
                expected: x.len(),
                actual: z.len(),
            });
        }
        Ok(PauliKey { x, z })
    }

    pub fn zeros(n: usize) -> Self {
        PauliKey {
            x: BitString::zeros(n),
            z: BitString::zeros(n),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let x = BitString::random(n, rng);
        let z = BitString::random(n, rng);
        PauliKey { x, z }
    }

    /// Splits `x ‖ z` in half.
    pub fn from_concat(bits: &BitString) -> Result<Self> {
        if !bits.len().is_multiple_of(2) {
            return Err(QheError::InvalidKey(bits.to_string()));
        }
        let n = bits.len() / 2;
        Ok(PauliKey {
            x: bits.slice(0, n),
            z: bits.slice(n, 2 * n),
        })
    }

    pub fn to_concat(&self) -> BitString {
        self.x.concat(&self.z)
    }

    /// Number of wires covered.
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &BitString {
        &self.x
    }

    pub fn z(&self) -> &BitString {
        &self.z
    }

    /// x bit of 1-based `wire`.
    pub fn x_bit(&self, wire: usize) -> bool {
        self.x[wire - 1]
    }

    pub fn z_bit(&self, wire: usize) -> bool {
        self.z[wire - 1]
    }

    pub fn set_x(&mut self, wire: usize, value: bool) {
        self.x.set(wire - 1, value);
    }

    pub fn set_z(&mut self, wire: usize, value: bool) {
        self.z.set(wire - 1, value);
    }

    /// Keeps only the listed 1-based wires, in order.
    pub fn restrict(&self, wires: &[usize]) -> PauliKey {
        PauliKey {
            x: wires.iter().map(|&w| self.x_bit(w)).collect(),
            z: wires.iter().map(|&w| self.z_bit(w)).collect(),
        }
    }

    /// Places this key on `wires` of an `n`-wire register, zero elsewhere.
    pub fn embed(&self, wires: &[usize], n: usize) -> Result<PauliKey> {
        if wires.len() != self.len() {
            return Err(QheError::LengthMismatch {
                expected: self.len(),
                actual: wires.len(),
            });
        }
        let mut out = PauliKey::zeros(n);
        for (k, &w) in wires.iter().enumerate() {
            if w == 0 || w > n {
                return Err(QheError::WireOutOfRange {
                    wire: w,
                    num_wires: n,
                });
            }
            out.set_x(w, self.x[k]);
            out.set_z(w, self.z[k]);
        }
        Ok(out)
    }

    pub fn xor(&self, other: &PauliKey) -> Result<PauliKey> {
        Ok(PauliKey {
            x: self.x.xor(&other.x)?,
            z: self.z.xor(&other.z)?,
        })
    }
}

impl fmt::Display for PauliKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={} z={}", self.x, self.z)
    }
}

impl FromStr for PauliKey {
    type Err = QheError;

    /// Accepts `"x=100 z=110"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || QheError::InvalidKey(s.to_string());
        let mut parts = s.split_whitespace();
        let x = parts
            .next()
            .and_then(|p| p.strip_prefix("x="))
            .ok_or_else(bad)?;
        let z = parts
            .next()
            .and_then(|p| p.strip_prefix("z="))
            .ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        PauliKey::new(x.parse()?, z.parse()?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalPad(pub BitString);

/// Uniform key for `n` wires, deterministic per seed.
pub fn gen_key(n: usize, seed: u64) -> Result<PauliKey> {
    if n == 0 {
        return Err(QheError::EmptyRegister);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(PauliKey::random(n, &mut rng))
}

fn check_wires(key: &PauliKey, wires: &[usize]) -> Result<()> {
    if key.len() != wires.len() {
        return Err(QheError::LengthMismatch {
            expected: key.len(),
            actual: wires.len(),
        });
    }
    for (k, w) in wires.iter().enumerate() {
        if wires[..k].contains(w) {
            return Err(QheError::DuplicateWire(*w));
        }
    }
    Ok(())
}

/// Applies `Z^z(k) X^x(k)` to the k-th listed wire.
pub fn qotp_encrypt(state: &StateVector, key: &PauliKey, wires: &[usize]) -> Result<StateVector> {
    check_wires(key, wires)?;
    let mut out = state.clone();
    for (k, &w) in wires.iter().enumerate() {
        if key.x[k] {
            out.apply_1q(GateKind::X, w)?;
        }
        if key.z[k] {
            out.apply_1q(GateKind::Z, w)?;
        }
    }
    Ok(out)
}

/// Applies the adjoint `X^x(k) Z^z(k)` to the k-th listed wire.
pub fn qotp_decrypt(state: &StateVector, key: &PauliKey, wires: &[usize]) -> Result<StateVector> {
    check_wires(key, wires)?;
    let mut out = state.clone();
    for (k, &w) in wires.iter().enumerate() {
        if key.z[k] {
            out.apply_1q(GateKind::Z, w)?;
        }
        if key.x[k] {
            out.apply_1q(GateKind::X, w)?;
        }
    }
    Ok(out)
}

/// Decrypts every wire of `state` with a full-width key.
pub fn qotp_decrypt_all(state: &StateVector, key: &PauliKey) -> Result<StateVector> {
    let wires: Vec<usize> = (1..=state.num_wires()).collect();
    qotp_decrypt(state, key, &wires)
}

pub fn otp_xor(data: &BitString, pad: &ClassicalPad) -> Result<BitString> {
    data.xor(&pad.0)
}

/// Recovers a measured plaintext from its cipher outcome and the x-half key.
pub fn classical_decrypt(measured: &BitString, dk: &BitString) -> Result<BitString> {
    measured.xor(dk)
}
