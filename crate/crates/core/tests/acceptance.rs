//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! The reference values come from an independent dense simulator, an
//! independent key-rule fold and a bitmask GF(2) elimination defined below;
//! the library is only used as the system under test.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qhe_core::bits::{bits, BitString};
use qhe_core::circuits::{compile_homomorphic, toffoli, Circuit, CircuitOp};
use qhe_core::evaluation::HomomorphicRun;
use qhe_core::gadgets::{compute_w, prepare_aux, run_gadget, AuxSpec};
use qhe_core::key_update::{apply_key_map, clifford_key_matrix, KeyRound, TParams};
use qhe_core::pauli_crypto::{qotp_encrypt, PauliKey};
use qhe_core::protocols::clifford_eval::{amplify_key_pair, key_register_probability};
use qhe_core::protocols::{
    build_kappa_prime, dave_key_search, grover_iterations, run_protocol1, run_protocol2, Party,
    Payload, Protocol1Config,
};
use qhe_core::selftest::{random_circuit, random_clifford_circuit};
use qhe_core::statevector::{GateKind, MeasurementPolicy, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn gate_matrix(kind: GateKind) -> [[C; 2]; 2] {
    let h = FRAC_1_SQRT_2;
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    match kind {
        GateKind::I => [[l, o], [o, l]],
        GateKind::X => [[o, l], [l, o]],
        GateKind::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
        GateKind::Z => [[l, o], [o, -l]],
        GateKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        GateKind::S => [[l, o], [o, c(0.0, 1.0)]],
        GateKind::Sdg => [[l, o], [o, c(0.0, -1.0)]],
        GateKind::T => [[l, o], [o, c(h, h)]],
        GateKind::Tdg => [[l, o], [o, c(h, -h)]],
        GateKind::CNOT => unreachable!("two-qubit"),
    }
}

/// Reference simulator: wire 1 is the most significant index bit.
#[derive(Clone)]
struct Ref {
    n: usize,
    amps: Vec<C>,
}

impl Ref {
    fn from(s: &StateVector) -> Self {
        Ref {
            n: s.num_wires(),
            amps: s.amplitudes().to_vec(),
        }
    }

    fn basis(n: usize, k: usize) -> Self {
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[k] = c(1.0, 0.0);
        Ref { n, amps }
    }

    fn mask(&self, wire: usize) -> usize {
        1 << (self.n - wire)
    }

    fn one(&mut self, kind: GateKind, wire: usize) {
        let m = gate_matrix(kind);
        let b = self.mask(wire);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | b] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn cnot(&mut self, control: usize, target: usize) {
        let (cb, tb) = (self.mask(control), self.mask(target));
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    fn op(&mut self, op: &CircuitOp) {
        match *op {
            CircuitOp::Gate { kind, wire } => self.one(kind, wire),
            CircuitOp::CNot { control, target } => self.cnot(control, target),
            CircuitOp::GadgetSlot { .. } => unreachable!("plain circuits only"),
        }
    }

    fn run(&mut self, circuit: &Circuit) {
        for op in circuit.ops() {
            self.op(op);
        }
    }

    /// Undoes `Z^z X^x` on every wire.
    fn decrypt(&mut self, x: &BitString, z: &BitString) {
        for w in 1..=self.n {
            if z[w - 1] {
                self.one(GateKind::Z, w);
            }
            if x[w - 1] {
                self.one(GateKind::X, w);
            }
        }
    }

    fn fidelity(&self, other: &[C]) -> f64 {
        self.amps
            .iter()
            .zip(other)
            .map(|(a, b)| a.conj() * b)
            .sum::<C>()
            .norm_sqr()
    }
}

fn ref_random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps: Vec<C> = (0..1 << n)
        .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.iter().map(|a| a / norm).collect()).unwrap()
}

/// Key rules written out independently as (x, z) bit vectors, 0-based wires.
fn fold_key(circuit: &Circuit, mut x: Vec<bool>, mut z: Vec<bool>) -> (Vec<bool>, Vec<bool>) {
    for op in circuit.ops() {
        match *op {
            CircuitOp::Gate { kind, wire } => {
                let i = wire - 1;
                match kind {
                    GateKind::H => std::mem::swap(&mut x[i], &mut z[i]),
                    GateKind::S | GateKind::Sdg => z[i] ^= x[i],
                    _ => {}
                }
            }
            CircuitOp::CNot { control, target } => {
                let (i, l) = (control - 1, target - 1);
                z[i] ^= z[l];
                x[l] ^= x[i];
            }
            CircuitOp::GadgetSlot { .. } => unreachable!(),
        }
    }
    (x, z)
}

fn gf2_rank(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in (0..64).rev() {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r] >> bit & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn table2() -> Outcome {
    let rows = [
        ("100", "110", "1010110", "0111001", "1110111", "01", "11"),
        ("100", "010", "1110011", "1011010", "1000010", "00", "10"),
        ("100", "100", "0100001", "0000101", "0000101", "01", "11"),
        ("010", "110", "0000011", "0111110", "1001101", "11", "01"),
        ("110", "110", "0101100", "0001010", "1011101", "10", "00"),
    ];
    let mut bad = Vec::new();
    for (k, (x, z, y, d, cc, enc, dk)) in rows.iter().enumerate() {
        let cfg = Protocol1Config {
            scripted_c: Some(bits(cc)),
            forced_ek: Some(PauliKey::new(bits(x), bits(z)).unwrap()),
            forced_yd: Some((bits(y), bits(d))),
            ..Protocol1Config::new(bits("10"), k as u64)
        };
        let r = run_protocol1(&cfg).unwrap();
        let got = (
            r.encrypted_result.to_string(),
            r.dk.to_string(),
            r.decrypted.to_string(),
        );
        if got != (enc.to_string(), dk.to_string(), "10".to_string()) {
            bad.push(format!("row {}: got {:?}", k + 1, got));
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            "5/5 rows bit-exact".into()
        } else {
            bad.join("; ")
        },
    )
}

fn random_search(blind_failures: &mut usize) -> Outcome {
    let mut bad = 0;
    for t in ["10", "00", "01", "11"] {
        for seed in 0..200u64 {
            let r = run_protocol1(&Protocol1Config::new(bits(t), 1000 + seed)).unwrap();
            let recomputed = &r.encrypted_result ^ &r.dk;
            if !(r.verified && r.decrypted == bits(t) && recomputed == r.decrypted) {
                bad += 1;
            }
            if r.transcript.received_by(Party::Bob).any(|m| {
                !matches!(
                    m.payload,
                    Payload::EncState(_) | Payload::AuxQubit(_) | Payload::WBit(_)
                )
            }) {
                *blind_failures += 1;
            }
        }
    }
    outcome(
        bad == 0,
        format!("{} / 800 runs decrypted to target", 800 - bad),
    )
}

fn stepwise() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let len = rng.gen_range(1..=40);
        let circuit = random_circuit(n, len, 8, &mut rng);
        let input = ref_random_state(n, &mut rng);
        let ek = PauliKey::random(n, &mut rng);
        let aux: Vec<AuxSpec> = (0..circuit.t_count())
            .map(|_| AuxSpec {
                y: rng.gen(),
                d: rng.gen(),
            })
            .collect();
        let hc = compile_homomorphic(&circuit);
        let wires: Vec<usize> = (1..=n).collect();
        let cipher = qotp_encrypt(&input, &ek, &wires).unwrap();
        let mut run =
            HomomorphicRun::new(&hc, cipher, ek, aux, MeasurementPolicy::sampled(rng.gen()))
                .unwrap();
        let mut plain = Ref::from(&input);
        while run.step().unwrap() {
            plain.op(&circuit.ops()[run.position() - 1]);
            let mut dec = Ref::from(run.state());
            dec.decrypt(run.key().key.x(), run.key().key.z());
            worst = worst.max(1.0 - plain.fidelity(&dec.amps));
        }
    }
    outcome(
        worst <= 1e-9,
        format!("worst 1-F = {worst:.2e} over 100 circuits"),
    )
}

fn gadgets() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut runs = 0;
    for _ in 0..20 {
        let psi = ref_random_state(1, &mut rng);
        for dagger in [false, true] {
            let mut want = Ref::from(&psi);
            want.one(if dagger { GateKind::Tdg } else { GateKind::T }, 1);
            for combo in 0..16 {
                let [x, z, y, d] = [8, 4, 2, 1].map(|m| combo & m != 0);
                let ek = PauliKey::new(
                    BitString::from_bools(vec![x]),
                    BitString::from_bools(vec![z]),
                )
                .unwrap();
                let cipher = qotp_encrypt(&psi, &ek, &[1]).unwrap();
                let aux = prepare_aux(AuxSpec { y, d }, dagger);
                for cbit in [false, true] {
                    let (got_c, out) = run_gadget(
                        &cipher,
                        1,
                        &aux,
                        compute_w(x, y),
                        dagger,
                        &mut MeasurementPolicy::scripted([cbit]),
                    )
                    .unwrap();
                    assert_eq!(got_c, cbit);
                    let mut kr = KeyRound::new(ek.clone());
                    kr.update_t(1, TParams { y, d, c: cbit }).unwrap();
                    let mut dec = Ref::from(&out);
                    dec.decrypt(kr.key.x(), kr.key.z());
                    worst = worst.max(1.0 - want.fidelity(&dec.amps));
                    runs += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1e-9,
        format!("{runs} gadget runs, worst 1-F = {worst:.2e}"),
    )
}

fn toffoli_check() -> Outcome {
    let circuit = toffoli();
    let mut worst = 0.0f64;
    let mut phase = None;
    for col in 0..8 {
        let mut s = Ref::basis(3, col);
        s.run(&circuit);
        let mapped = if col >= 6 { col ^ 1 } else { col };
        let ph = *phase.get_or_insert(s.amps[mapped]);
        for (row, a) in s.amps.iter().enumerate() {
            let want = if row == mapped { ph } else { c(0.0, 0.0) };
            worst = worst.max((a - want).norm());
        }
    }
    let ph: C = phase.unwrap();
    let t = circuit.t_count();
    let ok = worst <= 1e-10 && t == 7 && (ph.norm() - 1.0).abs() <= 1e-10;
    outcome(ok, format!("max deviation {worst:.2e}, T count {t}"))
}

fn qotp_mixing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for n in 1..=2usize {
        let dim = 1 << n;
        let wires: Vec<usize> = (1..=n).collect();
        let mut fixed = vec![StateVector::new_basis_state(n, &vec![false; n]).unwrap()];
        fixed.push(StateVector::new_uniform(n).unwrap());
        fixed.push(ref_random_state(n, &mut rng));
        for psi in fixed {
            let mut rho = vec![c(0.0, 0.0); dim * dim];
            let keys = 1 << (2 * n);
            for k in 0..keys {
                let key = PauliKey::from_concat(&BitString::from_index(k, 2 * n)).unwrap();
                let e = qotp_encrypt(&psi, &key, &wires).unwrap();
                let a = e.amplitudes();
                for i in 0..dim {
                    for j in 0..dim {
                        rho[i * dim + j] += a[i] * a[j].conj() / keys as f64;
                    }
                }
            }
            for i in 0..dim {
                for j in 0..dim {
                    let want = if i == j { 1.0 / dim as f64 } else { 0.0 };
                    worst = worst.max((rho[i * dim + j] - want).norm());
                }
            }
        }
    }
    outcome(worst <= 1e-10, format!("max entry deviation {worst:.2e}"))
}

fn key_matrix() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut mismatches = 0;
    let mut singular = 0;
    let mut checked = 0;
    for round in 0..30 {
        let n = 1 + round % 3;
        let len = rng.gen_range(0..=25);
        let circuit = random_clifford_circuit(n, len, &mut rng);
        let map = clifford_key_matrix(&circuit).unwrap();
        let m = map.matrix();
        let rows: Vec<u64> = (0..2 * n)
            .map(|r| (0..2 * n).fold(0u64, |acc, col| acc << 1 | m.get(r, col) as u64))
            .collect();
        if gf2_rank(&rows) != 2 * n {
            singular += 1;
        }
        let keys: Vec<usize> = if n <= 2 {
            (0..1 << (2 * n)).collect()
        } else {
            (0..100).map(|_| rng.gen_range(0..1 << (2 * n))).collect()
        };
        for k in keys {
            let v = BitString::from_index(k, 2 * n);
            let (x, z) = (v.slice(0, n), v.slice(n, 2 * n));
            let (fx, fz) = fold_key(&circuit, x.as_slice().to_vec(), z.as_slice().to_vec());
            let got = apply_key_map(&map, &PauliKey::new(x, z).unwrap()).unwrap();
            checked += 1;
            if got.x().as_slice() != fx.as_slice() || got.z().as_slice() != fz.as_slice() {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0 && singular == 0,
        format!("{checked} keys, {mismatches} mismatches, {singular} singular matrices"),
    )
}

fn protocol2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0f64;
    for k in 0..50u64 {
        let w = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=w);
        let len = rng.gen_range(1..=20);
        let circuit = random_clifford_circuit(w, len, &mut rng);
        let input = ref_random_state(w, &mut rng);
        let r = run_protocol2(&circuit, &input, n, k).unwrap();
        let mut want = Ref::from(&input);
        want.run(&circuit);
        worst = worst.max(1.0 - want.fidelity(r.output.amplitudes()));
    }

    let expected = (7.0 * 0.25f64.asin()).sin().powi(2);
    let circuit = random_clifford_circuit(2, 12, &mut rng);
    let kappa = build_kappa_prime(&circuit, 2).unwrap();
    let ek = PauliKey::new(bits("01"), bits("11")).unwrap();
    let target = ek.to_concat();
    let amplified = amplify_key_pair(&kappa, &target, grover_iterations(2)).unwrap();
    let p = key_register_probability(&amplified, &target);
    let reported = dave_key_search(&kappa, &ek, 3).unwrap().success_probability;

    let shots = 1000;
    let mut policy = MeasurementPolicy::sampled(23);
    let wires: Vec<usize> = (1..=amplified.num_wires()).collect();
    let hits = (0..shots)
        .filter(|_| {
            let mut s = amplified.clone();
            s.measure_register(&wires, &mut policy).unwrap().slice(0, 4) == target
        })
        .count();
    let rate = hits as f64 / shots as f64;
    let sigma = (expected * (1.0 - expected) / shots as f64).sqrt();
    let ok = worst <= 1e-9
        && (p - expected).abs() <= 1e-9
        && (reported - expected).abs() <= 1e-9
        && (rate - expected).abs() <= 3.0 * sigma;
    outcome(
        ok,
        format!(
            "worst 1-F = {worst:.2e}; p = {p:.12} vs {expected:.12}; sampled {rate:.3} (3σ = {:.3})",
            3.0 * sigma
        ),
    )
}

fn main() -> ExitCode {
    let mut blind_failures = 0;
    let mut all_ok = true;
    let mut report = |name: &str, budget: Duration, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        let ok = o.ok && took <= budget;
        all_ok &= ok;
        println!(
            "{} {name}: {} [{:.2}s / {:.0}s]",
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs_f64()
        );
    };
    report("table2-replay", Duration::from_secs(1), &mut table2);
    report("blind-search-outcome", Duration::from_secs(10), &mut || {
        random_search(&mut blind_failures)
    });
    report(
        "stepwise-decryption-oracle",
        Duration::from_secs(30),
        &mut stepwise,
    );
    report("gadget-correctness", Duration::from_secs(5), &mut gadgets);
    report(
        "toffoli-decomposition",
        Duration::from_secs(5),
        &mut toffoli_check,
    );
    report("qotp-mixing", Duration::from_secs(5), &mut qotp_mixing);
    report(
        "clifford-key-matrix",
        Duration::from_secs(5),
        &mut key_matrix,
    );
    report(
        "protocol2-end-to-end",
        Duration::from_secs(60),
        &mut protocol2,
    );
    report("blindness-bookkeeping", Duration::from_secs(1), &mut || {
        outcome(
            blind_failures == 0,
            format!("{blind_failures} of 800 transcripts leaked a non-blind payload to Bob"),
        )
    });
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
