//! Compact evaluation of Clifford circuits with a delegated key search.
//!
//! Bob runs the circuit on the cipher state and, in parallel, the key map on a
//! uniform superposition of every possible encryption key. Dave amplifies the
//! branch whose key register equals Alice's `ek` and hands back the matching
//! decryption key.
//!
//! Wire layout of `κ'`: the first `2n` wires hold `j = x ‖ z` of a candidate
//! key for the `n` encrypted wires, the remaining `2W` wires hold the full
//! decryption key `x ‖ z` over all `W` circuit wires. Unencrypted index wires
//! come first in the circuit, encrypted data wires last.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bb84::bb84_between;
use super::transcript::{Party, Payload, Transcript};
use crate::bits::BitString;
use crate::circuits::{simulate_plain, Circuit};
use crate::error::{QheError, Result};
use crate::key_update::clifford_key_matrix;
use crate::pauli_crypto::{otp_xor, qotp_decrypt_all, qotp_encrypt, ClassicalPad, PauliKey};
use crate::statevector::{GateKind, MeasurementPolicy, StateVector};

pub const MAX_KEY_WIRES: usize = 3;
/// Upper bound on `2n + 2W`.
pub const MAX_KAPPA_WIRES: usize = 20;
pub const MAX_ATTEMPTS: usize = 16;

fn check_sizes(num_wires: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(QheError::EmptyRegister);
    }
    if n > MAX_KEY_WIRES {
        return Err(QheError::TooLarge(format!(
            "n={n} encrypted wires, at most {MAX_KEY_WIRES} supported"
        )));
    }
    if n > num_wires {
        return Err(QheError::TooLarge(format!(
            "n={n} encrypted wires on a {num_wires}-wire circuit"
        )));
    }
    let total = 2 * n + 2 * num_wires;
    if total > MAX_KAPPA_WIRES {
        return Err(QheError::TooLarge(format!(
            "key register needs {total} wires, limit {MAX_KAPPA_WIRES}"
        )));
    }
    Ok(())
}

/// Encrypted wires of a `num_wires` circuit: the last `n`.
pub fn encrypted_wires(num_wires: usize, n: usize) -> Vec<usize> {
    (num_wires - n + 1..=num_wires).collect()
}

/// Column of the `x ‖ z` key vector fed by bit `k` of `j`.
fn key_column(k: usize, num_wires: usize, n: usize) -> usize {
    let offset = num_wires - n;
    if k < n {
        offset + k
    } else {
        num_wires + offset + (k - n)
    }
}

/// `|κ'> = 2^-n Σ_j |j, DecKey(j)>`, built as Hadamards on the key register
/// followed by a CNOT network read off the key-map matrix.
pub fn build_kappa_prime(circuit: &Circuit, n: usize) -> Result<StateVector> {
    circuit.ensure_clifford()?;
    let w = circuit.num_wires();
    check_sizes(w, n)?;
    let map = clifford_key_matrix(circuit)?;
    let m = map.matrix();
    let mut kappa = StateVector::new_basis_state(2 * n + 2 * w, &vec![false; 2 * n + 2 * w])?;
    for wire in 1..=2 * n {
        kappa.apply_1q(GateKind::H, wire)?;
    }
    for r in 0..2 * w {
        for k in 0..2 * n {
            if m.get(r, key_column(k, w, n)) {
                kappa.apply_cnot(k + 1, 2 * n + r + 1)?;
            }
        }
    }
    Ok(kappa)
}

/// `⌊π/4 · 2^n⌋` for a search space of `2^{2n}` keys.
pub fn grover_iterations(n: usize) -> usize {
    (FRAC_PI_4 * (1u64 << n) as f64).floor() as usize
}

fn prefix_of(index: usize, total: usize, prefix_len: usize) -> usize {
    index >> (total - prefix_len)
}

/// Applies `iterations` rounds of "flip the sign of every branch whose key
/// register equals `ek`, then reflect about `start`".
pub fn amplify_key_pair(
    start: &StateVector,
    ek: &BitString,
    iterations: usize,
) -> Result<StateVector> {
    let total = start.num_wires();
    if ek.len() > total {
        return Err(QheError::LengthMismatch {
            expected: total,
            actual: ek.len(),
        });
    }
    let marked = ek.to_index();
    let mut psi = start.clone();
    for _ in 0..iterations {
        for (idx, a) in psi.amplitudes_mut().iter_mut().enumerate() {
            if prefix_of(idx, total, ek.len()) == marked {
                *a = -*a;
            }
        }
        let overlap: Complex64 = start.inner(&psi)?;
        for (a, s) in psi.amplitudes_mut().iter_mut().zip(start.amplitudes()) {
            *a = 2.0 * overlap * s - *a;
        }
    }
    Ok(psi)
}

/// Probability that measuring the key register of `psi` yields `ek`.
pub fn key_register_probability(psi: &StateVector, ek: &BitString) -> f64 {
    let total = psi.num_wires();
    let marked = ek.to_index();
    psi.amplitudes()
        .iter()
        .enumerate()
        .filter(|(idx, _)| prefix_of(*idx, total, ek.len()) == marked)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DaveOutcome {
    pub ek: BitString,
    /// Decryption key over every circuit wire.
    pub dk: PauliKey,
    pub attempts: usize,
    /// Single-shot success probability before measurement.
    pub success_probability: f64,
}

/// Grover search for the branch of `kappa_prime` whose key register equals
/// `ek`, retried on a fresh copy of `κ'` when the measurement misses.
pub fn dave_key_search(kappa_prime: &StateVector, ek: &PauliKey, seed: u64) -> Result<DaveOutcome> {
    let n = ek.len();
    let total = kappa_prime.num_wires();
    if n == 0 || total <= 2 * n || !(total - 2 * n).is_multiple_of(2) {
        return Err(QheError::DimensionMismatch(2 * n, total));
    }
    let num_wires = (total - 2 * n) / 2;
    let target = ek.to_concat();
    let amplified = amplify_key_pair(kappa_prime, &target, grover_iterations(n))?;
    let success_probability = key_register_probability(&amplified, &target);
    let all: Vec<usize> = (1..=total).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let mut psi = if attempt == 1 {
            amplified.clone()
        } else {
            amplify_key_pair(kappa_prime, &target, grover_iterations(n))?
        };
        let mut policy = MeasurementPolicy::sampled(rng.gen());
        let outcome = psi.measure_register(&all, &mut policy)?;
        let found = outcome.slice(0, 2 * n);
        if found == target {
            let dk = PauliKey::from_concat(&outcome.slice(2 * n, 2 * n + 2 * num_wires))?;
            return Ok(DaveOutcome {
                ek: found,
                dk,
                attempts: attempt,
                success_probability,
            });
        }
    }
    Err(QheError::SearchExhausted(MAX_ATTEMPTS))
}

#[derive(Clone, Debug)]
pub struct Protocol2Result {
    /// Alice's decrypted output state.
    pub output: StateVector,
    /// Key on the encrypted wires.
    pub ek: PauliKey,
    pub dk: PauliKey,
    pub attempts: usize,
    pub success_probability: f64,
    pub transcript: Transcript,
}

impl Protocol2Result {
    pub fn fidelity_against(&self, circuit: &Circuit, plain_input: &StateVector) -> Result<f64> {
        self.output.fidelity(&simulate_plain(circuit, plain_input)?)
    }
}

struct Alice {
    ek: PauliKey,
    wires: Vec<usize>,
}

struct Bob {
    cipher: StateVector,
}

struct Dave {
    seed: u64,
}

/// Runs the eight protocol steps. The last `n` wires of `plain_input` are
/// encrypted; any leading wires are unencrypted index wires.
pub fn run_protocol2(
    circuit: &Circuit,
    plain_input: &StateVector,
    n: usize,
    seed: u64,
) -> Result<Protocol2Result> {
    circuit.ensure_clifford()?;
    let w = circuit.num_wires();
    if plain_input.num_wires() != w {
        return Err(QheError::DimensionMismatch(w, plain_input.num_wires()));
    }
    check_sizes(w, n)?;

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let key_seed: u64 = master.gen();
    let dave_seed: u64 = master.gen();
    let bb84_seed: u64 = master.gen();
    let mut transcript = Transcript::new();

    // 1-2. Alice picks ek and ships the cipher state
    let mut key_rng = ChaCha8Rng::seed_from_u64(key_seed);
    let alice = Alice {
        ek: PauliKey::random(n, &mut key_rng),
        wires: encrypted_wires(w, n),
    };
    let full_ek = alice.ek.embed(&alice.wires, w)?;
    let cipher = qotp_encrypt(plain_input, &full_ek, &(1..=w).collect::<Vec<_>>())?;
    transcript.push(2, Party::Alice, Party::Bob, Payload::InputLength(n));
    transcript.push(
        2,
        Party::Alice,
        Party::Bob,
        Payload::EncState(cipher.clone()),
    );

    // 3-4. Bob evaluates and builds κ'
    let mut bob = Bob { cipher };
    for op in circuit.ops() {
        op.apply(&mut bob.cipher)?;
    }
    let kappa = build_kappa_prime(circuit, n)?;
    transcript.push(
        4,
        Party::Bob,
        Party::Alice,
        Payload::EncState(bob.cipher.clone()),
    );
    transcript.push(
        4,
        Party::Bob,
        Party::Alice,
        Payload::KappaPrime(kappa.clone()),
    );

    // 5-6. Alice hands κ' and ek to a key searcher
    let dave = Dave { seed: dave_seed };
    transcript.push(
        6,
        Party::Alice,
        Party::Dave,
        Payload::KappaPrime(kappa.clone()),
    );
    transcript.push(
        6,
        Party::Alice,
        Party::Dave,
        Payload::SearchKey(alice.ek.to_concat()),
    );

    // 7. Dave searches and returns the pair under a BB84 pad
    let found = dave_key_search(&kappa, &alice.ek, dave.seed)?;
    let pad_len = 2 * n + 2 * w;
    let shared = bb84_between(Party::Dave, Party::Alice, 7, pad_len, bb84_seed)?;
    transcript.extend(shared.transcript.clone());
    let dave_pad = shared.sender_bits.clone();
    let sealed = found.ek.concat(&found.dk.to_concat()).xor(&dave_pad)?;
    transcript.push(
        7,
        Party::Dave,
        Party::Alice,
        Payload::KeyPair {
            ek: sealed.slice(0, 2 * n),
            dk: sealed.slice(2 * n, pad_len),
        },
    );

    // 8. Alice unseals the pair and decrypts
    let opened = otp_xor(&sealed, &ClassicalPad(shared.receiver_bits.clone()))?;
    if opened.slice(0, 2 * n) != alice.ek.to_concat() {
        return Err(QheError::Protocol(
            "key searcher returned a different ek".into(),
        ));
    }
    let dk = PauliKey::from_concat(&opened.slice(2 * n, pad_len))?;
    let output = qotp_decrypt_all(&bob.cipher, &dk)?;

    Ok(Protocol2Result {
        output,
        ek: alice.ek,
        dk,
        attempts: found.attempts,
        success_probability: found.success_probability,
        transcript,
    })
}
