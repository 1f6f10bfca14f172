//! Invariant suites shared by the CLI `selftest` command.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::BitString;
use crate::circuits::{toffoli, Circuit, CircuitOp};
use crate::error::Result;
use crate::evaluation::stepwise_min_fidelity;
use crate::gadgets::{compute_w, prepare_aux, run_gadget, AuxSpec};
use crate::key_update::{apply_key_map, clifford_key_matrix, KeyRound, TParams};
use crate::pauli_crypto::{qotp_decrypt, qotp_encrypt, PauliKey};
use crate::statevector::{GateKind, MeasurementPolicy, StateVector, STATE_TOL};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    /// Worst observed deviation or fidelity gap.
    pub worst: f64,
    pub detail: String,
}

impl SuiteReport {
    fn finish(
        name: &'static str,
        checks: usize,
        failures: usize,
        worst: f64,
        detail: String,
    ) -> Self {
        SuiteReport {
            name,
            passed: failures == 0,
            checks,
            failures,
            worst,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {}/{} checks ok, worst={:.3e}{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.checks - self.failures,
            self.checks,
            self.worst,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!(" ({})", self.detail)
            }
        )
    }
}

/// Random normalized state.
pub fn random_state<R: Rng + ?Sized>(num_wires: usize, rng: &mut R) -> StateVector {
    let amps: Vec<Complex64> = (0..1usize << num_wires)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).expect("normalized")
}

const ONE_QUBIT: [GateKind; 9] = [
    GateKind::I,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::H,
    GateKind::S,
    GateKind::Sdg,
    GateKind::T,
    GateKind::Tdg,
];

/// Random circuit over the full gate set with at most `max_t` T/T† gates.
pub fn random_circuit<R: Rng + ?Sized>(
    num_wires: usize,
    num_gates: usize,
    max_t: usize,
    rng: &mut R,
) -> Circuit {
    let mut c = Circuit::new(num_wires).expect("at least one wire");
    let mut t_left = max_t;
    while c.len() < num_gates {
        if num_wires > 1 && rng.gen_bool(0.3) {
            let control = rng.gen_range(1..=num_wires);
            let mut target = rng.gen_range(1..num_wires);
            if target >= control {
                target += 1;
            }
            c.push(CircuitOp::CNot { control, target })
                .expect("valid wires");
            continue;
        }
        let kind = ONE_QUBIT[rng.gen_range(0..ONE_QUBIT.len())];
        if matches!(kind, GateKind::T | GateKind::Tdg) {
            if t_left == 0 {
                continue;
            }
            t_left -= 1;
        }
        let wire = rng.gen_range(1..=num_wires);
        c.push(CircuitOp::Gate { kind, wire }).expect("valid wire");
    }
    c
}

pub fn random_clifford_circuit<R: Rng + ?Sized>(
    num_wires: usize,
    num_gates: usize,
    rng: &mut R,
) -> Circuit {
    random_circuit(num_wires, num_gates, 0, rng)
}

fn density(s: &StateVector) -> Vec<Vec<Complex64>> {
    let a = s.amplitudes();
    a.iter()
        .map(|r| a.iter().map(|c| r * c.conj()).collect())
        .collect()
}

/// Key-averaged cipher density matrix against `I / 2^n` for n = 1, 2.
pub fn qotp_mixing(seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checks, mut failures, mut worst) = (0, 0, 0.0f64);
    for n in 1..=2usize {
        let wires: Vec<usize> = (1..=n).collect();
        let dim = 1usize << n;
        for _ in 0..4 {
            let psi = random_state(n, &mut rng);
            let mut avg = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
            let keys = 1usize << (2 * n);
            for k in 0..keys {
                let key = PauliKey::from_concat(&BitString::from_index(k, 2 * n))?;
                let rho = density(&qotp_encrypt(&psi, &key, &wires)?);
                for (ar, rr) in avg.iter_mut().zip(&rho) {
                    for (a, r) in ar.iter_mut().zip(rr) {
                        *a += r / keys as f64;
                    }
                }
            }
            let mut dev = 0.0f64;
            for (i, row) in avg.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let want = if i == j { 1.0 / dim as f64 } else { 0.0 };
                    dev = dev.max((v - want).norm());
                }
            }
            checks += 1;
            worst = worst.max(dev);
            if dev > 1e-10 {
                failures += 1;
            }
        }
    }
    Ok(SuiteReport::finish(
        "qotp-mixing",
        checks,
        failures,
        worst,
        String::new(),
    ))
}

/// Homomorphic execution decrypts to plain execution after every op.
pub fn stepwise_oracle(circuits: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut failures, mut worst) = (0, 0.0f64);
    for _ in 0..circuits {
        let n = rng.gen_range(1..=3);
        let len = rng.gen_range(1..=40);
        let circuit = random_circuit(n, len, 8, &mut rng);
        let input = random_state(n, &mut rng);
        let ek = PauliKey::random(n, &mut rng);
        let aux: Vec<AuxSpec> = (0..circuit.t_count())
            .map(|_| AuxSpec {
                y: rng.gen(),
                d: rng.gen(),
            })
            .collect();
        let f = stepwise_min_fidelity(
            &circuit,
            &input,
            &ek,
            aux,
            MeasurementPolicy::sampled(rng.gen()),
        )?;
        worst = worst.max(1.0 - f);
        if f < 1.0 - STATE_TOL {
            failures += 1;
        }
    }
    Ok(SuiteReport::finish(
        "stepwise-oracle",
        circuits,
        failures,
        worst,
        String::new(),
    ))
}

/// Linearity of the Clifford key map and agreement with the rule fold.
pub fn gf2_linearity(circuits: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checks, mut failures) = (0, 0);
    for _ in 0..circuits {
        let n = rng.gen_range(1..=3);
        let len = rng.gen_range(0..=20);
        let circuit = random_clifford_circuit(n, len, &mut rng);
        let map = clifford_key_matrix(&circuit)?;
        checks += 1;
        if !map.matrix().is_invertible() {
            failures += 1;
        }
        for _ in 0..8 {
            let a = PauliKey::random(n, &mut rng);
            let b = PauliKey::random(n, &mut rng);
            let lhs = apply_key_map(&map, &a.xor(&b)?)?;
            let rhs = apply_key_map(&map, &a)?.xor(&apply_key_map(&map, &b)?)?;
            let mut fold = KeyRound::new(a.clone());
            for op in circuit.ops() {
                fold.update_op(op)?;
            }
            checks += 1;
            if lhs != rhs || apply_key_map(&map, &a)? != fold.key {
                failures += 1;
            }
        }
    }
    Ok(SuiteReport::finish(
        "gf2-linearity",
        checks,
        failures,
        0.0,
        String::new(),
    ))
}

/// Every `(x, z, y, d)`, both outcomes, T and T†, on random 1-qubit states.
pub fn gadget_correctness(states: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checks, mut failures, mut worst) = (0, 0, 0.0f64);
    for _ in 0..states {
        let psi = random_state(1, &mut rng);
        for dagger in [false, true] {
            let mut want = psi.clone();
            want.apply_1q(if dagger { GateKind::Tdg } else { GateKind::T }, 1)?;
            for combo in 0..16usize {
                let [x, z, y, d] = [8, 4, 2, 1].map(|m| combo & m != 0);
                let ek = PauliKey::new(
                    BitString::from_bools(vec![x]),
                    BitString::from_bools(vec![z]),
                )?;
                let cipher = qotp_encrypt(&psi, &ek, &[1])?;
                let aux = prepare_aux(AuxSpec { y, d }, dagger);
                for c in [false, true] {
                    let (_, out) = run_gadget(
                        &cipher,
                        1,
                        &aux,
                        compute_w(x, y),
                        dagger,
                        &mut MeasurementPolicy::scripted([c]),
                    )?;
                    let mut kr = KeyRound::new(ek.clone());
                    kr.update_t(1, TParams { y, d, c })?;
                    let f = qotp_decrypt(&out, &kr.key, &[1])?.fidelity(&want)?;
                    checks += 1;
                    worst = worst.max(1.0 - f);
                    if f < 1.0 - STATE_TOL {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok(SuiteReport::finish(
        "gadget-correctness",
        checks,
        failures,
        worst,
        String::new(),
    ))
}

/// Columns of the decomposed Toffoli's unitary, indexed by input basis state.
pub fn circuit_unitary(circuit: &Circuit) -> Result<Vec<Vec<Complex64>>> {
    let n = circuit.num_wires();
    (0..1usize << n)
        .map(|k| {
            let basis = BitString::from_index(k, n);
            let mut s = StateVector::new_basis_state(n, basis.as_slice())?;
            for op in circuit.ops() {
                op.apply(&mut s)?;
            }
            Ok(s.amplitudes().to_vec())
        })
        .collect()
}

/// Decomposed Toffoli against the ideal permutation, up to global phase.
pub fn toffoli_equivalence() -> Result<SuiteReport> {
    let circuit = toffoli();
    let cols = circuit_unitary(&circuit)?;
    let ideal = |row: usize, col: usize| -> f64 {
        let mapped = if col >= 6 { col ^ 1 } else { col };
        if row == mapped {
            1.0
        } else {
            0.0
        }
    };
    let phase = cols[0][0];
    let phase = phase / phase.norm();
    let mut worst = 0.0f64;
    for (col, amps) in cols.iter().enumerate() {
        for (row, a) in amps.iter().enumerate() {
            worst = worst.max((a - phase * ideal(row, col)).norm());
        }
    }
    let t = circuit.t_count();
    let failures = usize::from(worst > 1e-10) + usize::from(t != 7);
    Ok(SuiteReport::finish(
        "toffoli-equivalence",
        2,
        failures,
        worst,
        format!("t_count={t}"),
    ))
}

pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        qotp_mixing(seed)?,
        stepwise_oracle(100, seed)?,
        gf2_linearity(50, seed)?,
        gadget_correctness(20, seed)?,
        toffoli_equivalence()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for r in run_all(1).unwrap() {
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn random_circuit_respects_t_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let c = random_circuit(3, 40, 8, &mut rng);
            assert_eq!(c.len(), 40);
            assert!(c.t_count() <= 8);
            assert!(random_clifford_circuit(2, 10, &mut rng).is_clifford());
        }
    }

    #[test]
    fn report_line() {
        let r = SuiteReport::finish("x", 3, 1, 0.5, "note".into());
        assert!(!r.passed);
        assert_eq!(r.line(), "FAIL x: 2/3 checks ok, worst=5.000e-1 (note)");
    }
}
