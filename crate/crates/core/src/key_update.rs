//! Classical decryption-key tracking.
//!
//! For a cipher state `(⊗ Z^z(k) X^x(k)) V|ψ>` every gate `G` of the universal
//! set maps the key `(x, z)` to a new key that decrypts `G V|ψ>`:
//!
//! | gate            | rule                                                     |
//! |-----------------|----------------------------------------------------------|
//! | I, X, Y, Z      | unchanged                                                |
//! | H on i          | swap `x(i)`, `z(i)`                                      |
//! | S, S† on i      | `z(i) ^= x(i)`                                           |
//! | CNOT i -> l     | `z(i) ^= z(l)`, `x(l) ^= x(i)`                           |
//! | T, T† gadget    | `x(i) ^= c`, `z(i) = x(i)·(c^y^1) ^ z(i) ^ d ^ y`        |
//!
//! A measurement in the computational basis finalizes the classical pad as
//! the current `x`. Without T gadgets the whole map is linear over GF(2) on
//! `x ‖ z`, see [`clifford_key_matrix`].

use std::fmt;

use crate::bits::BitString;
use crate::circuits::{Circuit, CircuitOp, HomomorphicCircuit};
use crate::error::{QheError, Result};
use crate::gf2::BitMatrix;
use crate::pauli_crypto::PauliKey;
use crate::statevector::GateKind;

/// Secret and reported bits of one T gadget.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct TParams {
    pub y: bool,
    pub d: bool,
    pub c: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyRound {
    pub key: PauliKey,
    pub round: u64,
}

impl KeyRound {
    pub fn new(ek: PauliKey) -> Self {
        KeyRound { key: ek, round: 0 }
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire == 0 || wire > self.key.len() {
            return Err(QheError::WireOutOfRange {
                wire,
                num_wires: self.key.len(),
            });
        }
        Ok(())
    }

    pub fn update_clifford(&mut self, gate: GateKind, wires: &[usize]) -> Result<()> {
        if !gate.is_clifford() {
            return Err(QheError::Protocol(format!(
                "{gate} needs a gadget; use update_t"
            )));
        }
        if wires.len() != gate.arity() {
            return Err(QheError::Arity {
                gate: gate.name(),
                expected: gate.arity(),
                actual: wires.len(),
            });
        }
        for &w in wires {
            self.check_wire(w)?;
        }
        let k = &mut self.key;
        match gate {
            GateKind::I | GateKind::X | GateKind::Y | GateKind::Z => {}
            GateKind::H => {
                let i = wires[0];
                let (x, z) = (k.x_bit(i), k.z_bit(i));
                k.set_x(i, z);
                k.set_z(i, x);
            }
            // S† = S·Z and Z leaves the key alone, so both share one rule.
            GateKind::S | GateKind::Sdg => {
                let i = wires[0];
                k.set_z(i, k.x_bit(i) ^ k.z_bit(i));
            }
            GateKind::CNOT => {
                let (i, l) = (wires[0], wires[1]);
                if i == l {
                    return Err(QheError::SameControlTarget(i));
                }
                k.set_z(i, k.z_bit(i) ^ k.z_bit(l));
                k.set_x(l, k.x_bit(i) ^ k.x_bit(l));
            }
            GateKind::T | GateKind::Tdg => unreachable!(),
        }
        self.round += 1;
        Ok(())
    }

    /// Refresh after a T or T† gadget on `wire`.
    pub fn update_t(&mut self, wire: usize, p: TParams) -> Result<()> {
        self.check_wire(wire)?;
        let (x, z) = (self.key.x_bit(wire), self.key.z_bit(wire));
        self.key.set_x(wire, x ^ p.c);
        self.key.set_z(wire, (x & !(p.c ^ p.y)) ^ z ^ p.d ^ p.y);
        self.round += 1;
        Ok(())
    }

    /// Updates for one plain op (gate or CNOT).
    pub fn update_op(&mut self, op: &CircuitOp) -> Result<()> {
        match *op {
            CircuitOp::Gate { kind, wire } => self.update_clifford(kind, &[wire]),
            CircuitOp::CNot { control, target } => {
                self.update_clifford(GateKind::CNOT, &[control, target])
            }
            CircuitOp::GadgetSlot { .. } => {
                Err(QheError::Protocol("gadget slot needs TParams".into()))
            }
        }
    }

    /// Pad for a computational-basis measurement of all wires.
    pub fn finalize_measurement(&self) -> BitString {
        self.key.x().clone()
    }

    /// Pad for measuring just `wires`, in the listed order.
    pub fn finalize_measurement_on(&self, wires: &[usize]) -> Result<BitString> {
        wires
            .iter()
            .map(|&w| self.check_wire(w).map(|_| self.key.x_bit(w)))
            .collect()
    }
}

impl fmt::Display for KeyRound {
    /// One key-trace line: `r=<k> x=<bits> z=<bits>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={} {}", self.round, self.key)
    }
}

pub fn format_key_trace(rounds: &[KeyRound]) -> String {
    rounds.iter().map(|r| format!("{r}\n")).collect()
}

/// Folds every key update of `circuit` starting from `ek`.
pub fn dk_transform(
    circuit: &HomomorphicCircuit,
    ek: &PauliKey,
    params: &[TParams],
) -> Result<PauliKey> {
    Ok(dk_trace(circuit, ek, params)?
        .pop()
        .expect("trace holds the initial key")
        .key)
}

/// Key after every round, starting with round 0.
pub fn dk_trace(
    circuit: &HomomorphicCircuit,
    ek: &PauliKey,
    params: &[TParams],
) -> Result<Vec<KeyRound>> {
    if params.len() != circuit.gadget_count() {
        return Err(QheError::LengthMismatch {
            expected: circuit.gadget_count(),
            actual: params.len(),
        });
    }
    if ek.len() != circuit.num_wires() {
        return Err(QheError::LengthMismatch {
            expected: circuit.num_wires(),
            actual: ek.len(),
        });
    }
    let mut kr = KeyRound::new(ek.clone());
    let mut trace = vec![kr.clone()];
    let mut params = params.iter();
    for op in circuit.ops() {
        match *op {
            CircuitOp::GadgetSlot { wire, .. } => {
                kr.update_t(wire, *params.next().expect("length checked"))?
            }
            ref plain => kr.update_op(plain)?,
        }
        trace.push(kr.clone());
    }
    Ok(trace)
}

/// GF(2) matrix acting on `x ‖ z` for a T-free circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordKeyMap {
    matrix: BitMatrix,
}

impl CliffordKeyMap {
    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    /// Number of wires the map covers.
    pub fn num_wires(&self) -> usize {
        self.matrix.num_cols() / 2
    }
}

/// Builds the key map by replaying each rule as row operations on the identity.
pub fn clifford_key_matrix(circuit: &Circuit) -> Result<CliffordKeyMap> {
    circuit.ensure_clifford()?;
    let n = circuit.num_wires();
    let xr = |w: usize| w - 1;
    let zr = |w: usize| n + w - 1;
    let mut m = BitMatrix::identity(2 * n);
    for op in circuit.ops() {
        match *op {
            CircuitOp::Gate { kind, wire } => match kind {
                GateKind::H => m.swap_rows(xr(wire), zr(wire)),
                GateKind::S | GateKind::Sdg => m.add_row(xr(wire), zr(wire)),
                _ => {}
            },
            CircuitOp::CNot { control, target } => {
                m.add_row(zr(target), zr(control));
                m.add_row(xr(control), xr(target));
            }
            CircuitOp::GadgetSlot { .. } => unreachable!("plain circuit"),
        }
    }
    Ok(CliffordKeyMap { matrix: m })
}

pub fn apply_key_map(map: &CliffordKeyMap, ek: &PauliKey) -> Result<PauliKey> {
    PauliKey::from_concat(&map.matrix.mul_vec(&ek.to_concat())?)
}
