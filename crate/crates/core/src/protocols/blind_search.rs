//! Blind Grover search with a trusted key center.
//!
//! Alice owns the data and the search target, Carol owns the evolving key
//! and the gadget secrets, Bob owns the cipher state. Only Bob touches
//! quantum data after encryption, and Bob only ever sees cipher states,
//! auxiliary qubits and `w` bits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bb84::bb84_exchange;
use super::transcript::{Party, Payload, Transcript};
use crate::bits::BitString;
use crate::circuits::{build_grover, compile_homomorphic, CircuitOp, HomomorphicCircuit};
use crate::error::{QheError, Result};
use crate::gadgets::{compute_w, prepare_aux, run_gadget, AuxSpec, GadgetRecord};
use crate::key_update::KeyRound;
use crate::pauli_crypto::{classical_decrypt, otp_xor, qotp_encrypt, ClassicalPad, PauliKey};
use crate::statevector::{GateKind, MeasurementPolicy, StateVector};

#[derive(Clone, Debug)]
pub struct Protocol1Config {
    /// Search register size; only 2 is supported.
    pub m: usize,
    pub target: BitString,
    pub seed: u64,
    /// Forced gadget outcomes, one per gadget.
    pub scripted_c: Option<BitString>,
    /// Replaces the BB84-derived encryption key. Either covers the data wires
    /// only, or every wire with zero bits on the oracle wire.
    pub forced_ek: Option<PauliKey>,
    /// Replaces Carol's random `(y, d)` strings.
    pub forced_yd: Option<(BitString, BitString)>,
}

impl Protocol1Config {
    pub fn new(target: BitString, seed: u64) -> Self {
        Protocol1Config {
            m: target.len(),
            target,
            seed,
            scripted_c: None,
            forced_ek: None,
            forced_yd: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Protocol1Result {
    /// Key over every wire; the oracle wire's bits are zero.
    pub ek: PauliKey,
    pub sk: BitString,
    pub y: BitString,
    pub d: BitString,
    pub c: BitString,
    pub encrypted_result: BitString,
    pub dk: BitString,
    pub decrypted: BitString,
    pub verified: bool,
    pub gadgets: Vec<GadgetRecord>,
    /// Carol's key after every round.
    pub key_trace: Vec<KeyRound>,
    pub transcript: Transcript,
}

struct Alice {
    target: BitString,
    data_wires: Vec<usize>,
    num_wires: usize,
    ek: PauliKey,
    sk: ClassicalPad,
}

impl Alice {
    fn encrypted_input(&self) -> Result<StateVector> {
        let mut oracle = StateVector::new_basis_state(1, &[true])?;
        oracle.apply_1q(GateKind::H, 1)?;
        let plain = StateVector::new_uniform(self.data_wires.len())?.tensor(&oracle);
        let wires: Vec<usize> = (1..=self.num_wires).collect();
        qotp_encrypt(&plain, &self.ek, &wires)
    }

    fn finish(&self, encrypted: &BitString, enc_dk: &BitString) -> Result<(BitString, BitString)> {
        let dk = otp_xor(enc_dk, &self.sk)?;
        let decrypted = classical_decrypt(encrypted, &dk)?;
        Ok((dk, decrypted))
    }
}

struct Carol {
    key: KeyRound,
    sk: ClassicalPad,
    rng: ChaCha8Rng,
    forced_yd: Option<(BitString, BitString)>,
    pending: Option<(usize, bool, AuxSpec, bool)>,
    records: Vec<GadgetRecord>,
    trace: Vec<KeyRound>,
}

impl Carol {
    fn next_spec(&mut self) -> AuxSpec {
        let k = self.records.len();
        match &self.forced_yd {
            Some((y, d)) => AuxSpec { y: y[k], d: d[k] },
            None => AuxSpec {
                y: self.rng.gen(),
                d: self.rng.gen(),
            },
        }
    }

    fn gadget_request(&mut self, wire: usize, dagger: bool) -> (StateVector, bool) {
        let spec = self.next_spec();
        let w = compute_w(self.key.key.x_bit(wire), spec.y);
        self.pending = Some((wire, dagger, spec, w));
        (prepare_aux(spec, dagger), w)
    }

    fn absorb_c(&mut self, c: bool) -> Result<()> {
        let (wire, dagger, spec, w) = self
            .pending
            .take()
            .ok_or_else(|| QheError::Protocol("c bit without a pending gadget".into()))?;
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
        self.trace.push(self.key.clone());
        Ok(())
    }

    fn update(&mut self, op: &CircuitOp) -> Result<()> {
        self.key.update_op(op)?;
        self.trace.push(self.key.clone());
        Ok(())
    }

    fn encrypted_dk(&self, measured: &[usize]) -> Result<BitString> {
        otp_xor(&self.key.finalize_measurement_on(measured)?, &self.sk)
    }
}

struct Bob {
    state: StateVector,
    gadget_policy: MeasurementPolicy,
    final_policy: MeasurementPolicy,
}

impl Bob {
    fn apply(&mut self, op: &CircuitOp) -> Result<()> {
        op.apply(&mut self.state)
    }

    fn gadget(&mut self, wire: usize, dagger: bool, aux: &StateVector, w: bool) -> Result<bool> {
        let (c, next) = run_gadget(&self.state, wire, aux, w, dagger, &mut self.gadget_policy)?;
        self.state = next;
        Ok(c)
    }

    fn measure(&mut self, wires: &[usize]) -> Result<BitString> {
        self.state.measure_register(wires, &mut self.final_policy)
    }
}

fn normalize_forced_ek(ek: &PauliKey, m: usize) -> Result<PauliKey> {
    if ek.len() == m {
        let data: Vec<usize> = (1..=m).collect();
        return ek.embed(&data, m + 1);
    }
    if ek.len() == m + 1 && !ek.x_bit(m + 1) && !ek.z_bit(m + 1) {
        return Ok(ek.clone());
    }
    Err(QheError::InvalidKey(format!(
        "{ek}: expected {m} data-wire bits per half, or {} with a zero oracle bit",
        m + 1
    )))
}

/// Runs the six protocol steps end to end.
pub fn run_protocol1(cfg: &Protocol1Config) -> Result<Protocol1Result> {
    let m = cfg.m;
    if cfg.target.len() != m {
        return Err(QheError::LengthMismatch {
            expected: m,
            actual: cfg.target.len(),
        });
    }
    let grover = build_grover(m, &cfg.target)?;
    let hgrv: HomomorphicCircuit = compile_homomorphic(&grover);
    let gadgets = hgrv.gadget_count();
    let num_wires = hgrv.num_wires();
    let data_wires: Vec<usize> = (1..=m).collect();
    let n = data_wires.len();

    if let Some(c) = &cfg.scripted_c {
        if c.len() != gadgets {
            return Err(QheError::LengthMismatch {
                expected: gadgets,
                actual: c.len(),
            });
        }
    }
    if let Some((y, d)) = &cfg.forced_yd {
        for s in [y, d] {
            if s.len() != gadgets {
                return Err(QheError::LengthMismatch {
                    expected: gadgets,
                    actual: s.len(),
                });
            }
        }
    }
    let forced_ek = cfg
        .forced_ek
        .as_ref()
        .map(|k| normalize_forced_ek(k, m))
        .transpose()?;

    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bb84_seed: u64 = master.gen();
    let carol_seed: u64 = master.gen();
    let bob_seed: u64 = master.gen();
    let mut transcript = Transcript::new();

    // 1. input length
    transcript.push(1, Party::Alice, Party::Carol, Payload::InputLength(n));

    // 2. 3n shared bits: ek = first 2n, sk = last n
    let shared = bb84_exchange(3 * n, bb84_seed)?;
    transcript.extend(shared.transcript.clone());
    let derive = |bits: &BitString| -> Result<(PauliKey, ClassicalPad)> {
        let ek = PauliKey::from_concat(&bits.slice(0, 2 * n))?.embed(&data_wires, num_wires)?;
        let ek = forced_ek.clone().unwrap_or(ek);
        Ok((ek, ClassicalPad(bits.slice(2 * n, 3 * n))))
    };
    let (alice_ek, alice_sk) = derive(&shared.receiver_bits)?;
    let (carol_ek, carol_sk) = derive(&shared.sender_bits)?;

    let alice = Alice {
        target: cfg.target.clone(),
        data_wires: data_wires.clone(),
        num_wires,
        ek: alice_ek,
        sk: alice_sk,
    };
    let mut carol = Carol {
        key: KeyRound::new(carol_ek),
        sk: carol_sk,
        rng: ChaCha8Rng::seed_from_u64(carol_seed),
        forced_yd: cfg.forced_yd.clone(),
        pending: None,
        records: Vec::new(),
        trace: Vec::new(),
    };
    carol.trace.push(carol.key.clone());

    // 3. encrypted superposed input
    let cipher = alice.encrypted_input()?;
    transcript.push(
        3,
        Party::Alice,
        Party::Bob,
        Payload::EncState(cipher.clone()),
    );
    let mut bob = Bob {
        state: cipher,
        gadget_policy: match &cfg.scripted_c {
            Some(c) => MeasurementPolicy::scripted(c.iter()),
            None => MeasurementPolicy::sampled(bob_seed),
        },
        final_policy: MeasurementPolicy::sampled(bob_seed.wrapping_add(1)),
    };

    // 4. homomorphic search with synchronous key update
    for op in hgrv.ops() {
        match *op {
            CircuitOp::GadgetSlot { wire, dagger } => {
                let (aux, w) = carol.gadget_request(wire, dagger);
                transcript.push(4, Party::Carol, Party::Bob, Payload::AuxQubit(aux.clone()));
                transcript.push(4, Party::Carol, Party::Bob, Payload::WBit(w));
                let c = bob.gadget(wire, dagger, &aux, w)?;
                transcript.push(4, Party::Bob, Party::Carol, Payload::CBit(c));
                carol.absorb_c(c)?;
            }
            ref plain => {
                bob.apply(plain)?;
                carol.update(plain)?;
            }
        }
    }

    // 5. measurement and padded decryption key
    let encrypted_result = bob.measure(&data_wires)?;
    transcript.push(
        5,
        Party::Bob,
        Party::Alice,
        Payload::EncResult(encrypted_result.clone()),
    );
    let enc_dk = carol.encrypted_dk(&data_wires)?;
    transcript.push(
        5,
        Party::Carol,
        Party::Alice,
        Payload::EncDk(enc_dk.clone()),
    );

    // 6. decrypt and check
    let (dk, decrypted) = alice.finish(&encrypted_result, &enc_dk)?;
    let verified = decrypted == alice.target;

    let records = carol.records;
    Ok(Protocol1Result {
        ek: alice.ek,
        sk: alice.sk.0,
        y: records.iter().map(|r| r.y).collect(),
        d: records.iter().map(|r| r.d).collect(),
        c: records.iter().map(|r| r.c).collect(),
        encrypted_result,
        dk,
        decrypted,
        verified,
        gadgets: records,
        key_trace: carol.trace,
        transcript,
    })
}
