//! Homomorphic execution with one owner for both the cipher state and the key.
//!
//! The protocol runners split these roles across parties; this runner keeps
//! them together so the per-prefix decryption invariant can be observed.

use crate::circuits::{
    compile_homomorphic, simulate_plain, Circuit, CircuitOp, HomomorphicCircuit,
};
use crate::error::{QheError, Result};
use crate::gadgets::{compute_w, prepare_aux, run_gadget, AuxSpec, GadgetRecord};
use crate::key_update::KeyRound;
use crate::pauli_crypto::{qotp_decrypt_all, qotp_encrypt, PauliKey};
use crate::statevector::{MeasurementPolicy, StateVector};

pub struct HomomorphicRun<'a> {
    circuit: &'a HomomorphicCircuit,
    state: StateVector,
    key: KeyRound,
    aux: Vec<AuxSpec>,
    policy: MeasurementPolicy,
    pos: usize,
    records: Vec<GadgetRecord>,
}

impl<'a> HomomorphicRun<'a> {
    /// `cipher` must already be encrypted under `ek` (full-width key).
    pub fn new(
        circuit: &'a HomomorphicCircuit,
        cipher: StateVector,
        ek: PauliKey,
        aux: Vec<AuxSpec>,
        policy: MeasurementPolicy,
    ) -> Result<Self> {
        if cipher.num_wires() != circuit.num_wires() {
            return Err(QheError::DimensionMismatch(
                circuit.num_wires(),
                cipher.num_wires(),
            ));
        }
        if ek.len() != circuit.num_wires() {
            return Err(QheError::LengthMismatch {
                expected: circuit.num_wires(),
                actual: ek.len(),
            });
        }
        if aux.len() != circuit.gadget_count() {
            return Err(QheError::LengthMismatch {
                expected: circuit.gadget_count(),
                actual: aux.len(),
            });
        }
        Ok(HomomorphicRun {
            circuit,
            state: cipher,
            key: KeyRound::new(ek),
            aux,
            policy,
            pos: 0,
            records: Vec::new(),
        })
    }

    /// Executes the next op; returns `false` once the circuit is exhausted.
    pub fn step(&mut self) -> Result<bool> {
        let Some(op) = self.circuit.ops().get(self.pos) else {
            return Ok(false);
        };
        match *op {
            CircuitOp::GadgetSlot { wire, dagger } => {
                let spec = self.aux[self.records.len()];
                let w = compute_w(self.key.key.x_bit(wire), spec.y);
                let aux = prepare_aux(spec, dagger);
                let (c, next) = run_gadget(&self.state, wire, &aux, w, dagger, &mut self.policy)?;
                let record = GadgetRecord {
                    wire,
                    dagger,
                    y: spec.y,
                    d: spec.d,
                    w,
                    c,
                };
                self.key.update_t(wire, record.params())?;
                self.records.push(record);
                self.state = next;
            }
            ref plain => {
                plain.apply(&mut self.state)?;
                self.key.update_op(plain)?;
            }
        }
        self.pos += 1;
        Ok(true)
    }

    pub fn run_to_end(&mut self) -> Result<()> {
        while self.step()? {}
        Ok(())
    }

    /// Number of ops executed so far.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn key(&self) -> &KeyRound {
        &self.key
    }

    pub fn records(&self) -> &[GadgetRecord] {
        &self.records
    }

    /// Current state decrypted with the current key.
    pub fn decrypted(&self) -> Result<StateVector> {
        qotp_decrypt_all(&self.state, &self.key.key)
    }
}

/// Runs `circuit` homomorphically and compares, after every op, the decrypted
/// state against plain simulation of the same prefix. Returns the worst
/// fidelity seen.
pub fn stepwise_min_fidelity(
    circuit: &Circuit,
    plain_input: &StateVector,
    ek: &PauliKey,
    aux: Vec<AuxSpec>,
    policy: MeasurementPolicy,
) -> Result<f64> {
    let hc = compile_homomorphic(circuit);
    let wires: Vec<usize> = (1..=circuit.num_wires()).collect();
    let cipher = qotp_encrypt(plain_input, ek, &wires)?;
    let mut run = HomomorphicRun::new(&hc, cipher, ek.clone(), aux, policy)?;
    let mut plain = plain_input.clone();
    let mut worst = run.decrypted()?.fidelity(&plain)?;
    while run.step()? {
        circuit.ops()[run.position() - 1].apply(&mut plain)?;
        worst = worst.min(run.decrypted()?.fidelity(&plain)?);
    }
    // the incremental plain state must agree with a fresh full simulation
    let full = simulate_plain(circuit, plain_input)?;
    worst = worst.min(run.decrypted()?.fidelity(&full)?);
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;
    use crate::circuits::build_grover;
    use crate::statevector::GateKind;

    #[test]
    fn grover_zero_keys_match_plain() {
        let g = build_grover(2, &bits("10")).unwrap();
        let mut input = StateVector::new_uniform(2)
            .unwrap()
            .tensor(&StateVector::new_basis_state(1, &[true]).unwrap());
        input.apply_1q(GateKind::H, 3).unwrap();
        let f = stepwise_min_fidelity(
            &g,
            &input,
            &PauliKey::zeros(3),
            vec![AuxSpec::default(); 7],
            MeasurementPolicy::sampled(4),
        )
        .unwrap();
        assert!(f >= 1.0 - 1e-9);
    }

    #[test]
    fn rejects_wrong_aux_count() {
        let g = compile_homomorphic(&build_grover(2, &bits("10")).unwrap());
        let s = StateVector::new_uniform(3).unwrap();
        assert!(HomomorphicRun::new(
            &g,
            s,
            PauliKey::zeros(3),
            vec![],
            MeasurementPolicy::sampled(0)
        )
        .is_err());
    }
}
