//! Idealized BB84 over the four states `|+>`, `|->`, `|+y>`, `|-y>`.
//!
//! `|+>` and `|+y>` encode 0, `|->` and `|-y>` encode 1. The channel is
//! noiseless and nobody listens in, so the sifted strings always agree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::transcript::{Party, Payload, Transcript};
use crate::bits::BitString;
use crate::error::{QheError, Result};
use crate::gadgets::{prepare_aux, AuxSpec};
use crate::statevector::{GateKind, MeasurementPolicy, StateVector};

/// Basis `false` is X (`|±>`), `true` is Y (`|±y>`).
pub fn encode(bit: bool, basis: bool) -> StateVector {
    prepare_aux(AuxSpec { y: basis, d: bit }, false)
}

/// Measures a single qubit in the X or Y basis.
pub fn measure_in_basis(
    state: &StateVector,
    basis: bool,
    policy: &mut MeasurementPolicy,
) -> Result<bool> {
    let mut s = state.clone();
    if basis {
        s.apply_1q(GateKind::Sdg, 1)?;
    }
    s.apply_1q(GateKind::H, 1)?;
    s.measure_wire(1, policy)
}

#[derive(Clone, Debug)]
pub struct Bb84Outcome {
    pub sender_bits: BitString,
    pub receiver_bits: BitString,
    /// Qubits sent in total.
    pub raw_rounds: usize,
    /// Matching-basis rounds before truncation to the requested length.
    pub sifted_total: usize,
    pub transcript: Transcript,
}

impl Bb84Outcome {
    /// The agreed string (sender and receiver copies are identical).
    pub fn bits(&self) -> &BitString {
        &self.receiver_bits
    }
}

struct Session {
    sender: Party,
    receiver: Party,
    step: u32,
    rng: ChaCha8Rng,
    policy: MeasurementPolicy,
    sender_bits: BitString,
    receiver_bits: BitString,
    raw_rounds: usize,
    transcript: Transcript,
}

impl Session {
    fn new(sender: Party, receiver: Party, step: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let policy = MeasurementPolicy::sampled(rng.gen());
        Session {
            sender,
            receiver,
            step,
            rng,
            policy,
            sender_bits: BitString::default(),
            receiver_bits: BitString::default(),
            raw_rounds: 0,
            transcript: Transcript::new(),
        }
    }

    fn batch(&mut self, size: usize) -> Result<()> {
        let bits: Vec<bool> = (0..size).map(|_| self.rng.gen()).collect();
        let send_bases: Vec<bool> = (0..size).map(|_| self.rng.gen()).collect();
        let recv_bases: Vec<bool> = (0..size).map(|_| self.rng.gen()).collect();
        self.transcript.push(
            self.step,
            self.sender,
            self.receiver,
            Payload::Bb84Qubits(size),
        );
        let mut readings = Vec::with_capacity(size);
        for k in 0..size {
            let qubit = encode(bits[k], send_bases[k]);
            readings.push(measure_in_basis(&qubit, recv_bases[k], &mut self.policy)?);
        }
        self.transcript.push(
            self.step,
            self.receiver,
            self.sender,
            Payload::BasisAnnouncement(recv_bases.iter().copied().collect()),
        );
        let mask: BitString = (0..size).map(|k| send_bases[k] == recv_bases[k]).collect();
        self.transcript.push(
            self.step,
            self.sender,
            self.receiver,
            Payload::SiftMask(mask.clone()),
        );
        for k in (0..size).filter(|&k| mask[k]) {
            self.sender_bits.push(bits[k]);
            self.receiver_bits.push(readings[k]);
        }
        self.raw_rounds += size;
        Ok(())
    }

    fn finish(self, keep: Option<usize>) -> Result<Bb84Outcome> {
        let sifted_total = self.sender_bits.len();
        let keep = keep.unwrap_or(sifted_total);
        let sender_bits = self.sender_bits.slice(0, keep);
        let receiver_bits = self.receiver_bits.slice(0, keep);
        if sender_bits != receiver_bits {
            return Err(QheError::Protocol(
                "sifted BB84 strings disagree on a noiseless channel".into(),
            ));
        }
        Ok(Bb84Outcome {
            sender_bits,
            receiver_bits,
            raw_rounds: self.raw_rounds,
            sifted_total,
            transcript: self.transcript,
        })
    }
}

/// Runs batches until `num_bits` sifted bits are agreed.
pub fn bb84_between(
    sender: Party,
    receiver: Party,
    step: u32,
    num_bits: usize,
    seed: u64,
) -> Result<Bb84Outcome> {
    if num_bits == 0 {
        return Err(QheError::EmptyRegister);
    }
    let mut session = Session::new(sender, receiver, step, seed);
    while session.sender_bits.len() < num_bits {
        let missing = num_bits - session.sender_bits.len();
        session.batch(2 * missing + 4)?;
    }
    session.finish(Some(num_bits))
}

/// Key-center flavour: Carol sends, Alice measures.
pub fn bb84_exchange(num_bits: usize, seed: u64) -> Result<Bb84Outcome> {
    bb84_between(Party::Carol, Party::Alice, 2, num_bits, seed)
}

/// Exactly `raw_rounds` qubits in one batch, keeping every sifted bit.
pub fn bb84_rounds(raw_rounds: usize, seed: u64) -> Result<Bb84Outcome> {
    let mut session = Session::new(Party::Carol, Party::Alice, 2, seed);
    session.batch(raw_rounds)?;
    session.finish(None)
}
