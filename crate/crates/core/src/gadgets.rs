//! The interactive T / T† gadget.
//!
//! The key holder prepares an auxiliary qubit `Z^d S^y |+>` (with `S†` in
//! place of `S` for a T† gadget) and sends it along with `w = x ^ y`, where
//! `x` is the current x-key bit of the target wire. The evaluator applies T,
//! entangles the auxiliary qubit with the data, applies the `S^w` correction
//! to the auxiliary qubit, measures the data wire and reports the bit `c`.
//! The auxiliary qubit then stands in for the data wire, encrypted under the
//! key given by [`KeyRound::update_t`](crate::key_update::KeyRound::update_t).

use std::fmt;

use serde::Serialize;

use crate::error::{QheError, Result};
use crate::key_update::TParams;
use crate::statevector::{GateKind, MeasurementPolicy, StateVector};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct AuxSpec {
    pub y: bool,
    pub d: bool,
}

/// Per-gadget log entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GadgetRecord {
    pub wire: usize,
    pub dagger: bool,
    pub y: bool,
    pub d: bool,
    pub w: bool,
    pub c: bool,
}

impl GadgetRecord {
    pub fn params(&self) -> TParams {
        TParams {
            y: self.y,
            d: self.d,
            c: self.c,
        }
    }

    /// Transcript line for the `k`-th gadget (1-based).
    pub fn line(&self, k: usize) -> String {
        format!("gadget {k}: {self}")
    }
}

impl fmt::Display for GadgetRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "wire={} dagger={} y={} d={} w={} c={}",
            self.wire, self.dagger as u8, self.y as u8, self.d as u8, self.w as u8, self.c as u8
        )
    }
}

/// `Z^d S^y H|0>`, or `Z^d (S†)^y H|0>` for a T† gadget. Always one of
/// `|+>`, `|->`, `|+y>`, `|-y>`.
pub fn prepare_aux(spec: AuxSpec, dagger: bool) -> StateVector {
    let mut s = StateVector::new_uniform(1).expect("one wire");
    if spec.y {
        let phase = if dagger { GateKind::Sdg } else { GateKind::S };
        s.apply_1q(phase, 1).expect("wire 1");
    }
    if spec.d {
        s.apply_1q(GateKind::Z, 1).expect("wire 1");
    }
    s
}

pub fn compute_w(x_bit: bool, y: bool) -> bool {
    x_bit ^ y
}

/// Runs one gadget on `wire`; the returned state has the same wire count.
pub fn run_gadget(
    state: &StateVector,
    wire: usize,
    aux: &StateVector,
    w: bool,
    dagger: bool,
    policy: &mut MeasurementPolicy,
) -> Result<(bool, StateVector)> {
    if aux.num_wires() != 1 {
        return Err(QheError::DimensionMismatch(1, aux.num_wires()));
    }
    let n = state.num_wires();
    if wire == 0 || wire > n {
        return Err(QheError::WireOutOfRange { wire, num_wires: n });
    }
    let aux_wire = n + 1;
    let (t, s) = if dagger {
        (GateKind::Tdg, GateKind::Sdg)
    } else {
        (GateKind::T, GateKind::S)
    };
    let mut joint = state.tensor(aux);
    joint.apply_1q(t, wire)?;
    joint.apply_cnot(aux_wire, wire)?;
    if w {
        joint.apply_1q(s, aux_wire)?;
    }
    let c = joint.measure_wire(wire, policy)?;
    let reduced = joint.remove_wire(wire, c)?;
    Ok((c, reduced.move_wire(n, wire)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::key_update::KeyRound;
    use crate::pauli_crypto::{qotp_decrypt, qotp_encrypt, PauliKey};
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ket(a0: Complex64, a1: Complex64) -> StateVector {
        StateVector::from_amplitudes(vec![a0, a1]).unwrap()
    }

    #[test]
    fn aux_states() {
        let h = FRAC_1_SQRT_2;
        let r = |v: f64| Complex64::new(v, 0.0);
        let plus = ket(r(h), r(h));
        let minus = ket(r(h), r(-h));
        let plus_y = ket(r(h), Complex64::new(0.0, h));
        let minus_y = ket(r(h), Complex64::new(0.0, -h));
        let cases = [
            (false, false, false, &plus),
            (false, true, false, &minus),
            (true, false, false, &plus_y),
            (true, true, false, &minus_y),
            (true, false, true, &minus_y),
            (true, true, true, &plus_y),
        ];
        for (y, d, dagger, want) in cases {
            let got = prepare_aux(AuxSpec { y, d }, dagger);
            assert!(
                got.fidelity(want).unwrap() > 1.0 - 1e-12,
                "y={y} d={d} dagger={dagger}"
            );
        }
    }

    #[test]
    fn w_bit() {
        assert!(!compute_w(false, false));
        assert!(compute_w(true, false));
        assert!(!compute_w(true, true));
    }

    #[test]
    fn trivial_on_zero_state() {
        let zero = StateVector::new_basis_state(1, &[false]).unwrap();
        let aux = prepare_aux(AuxSpec::default(), false);
        for c in [false, true] {
            let (got_c, out) = run_gadget(
                &zero,
                1,
                &aux,
                false,
                false,
                &mut MeasurementPolicy::scripted([c]),
            )
            .unwrap();
            assert_eq!(got_c, c);
            let mut kr = KeyRound::new(PauliKey::zeros(1));
            kr.update_t(
                1,
                TParams {
                    y: false,
                    d: false,
                    c,
                },
            )
            .unwrap();
            let plain = qotp_decrypt(&out, &kr.key, &[1]).unwrap();
            assert!(plain.fidelity(&zero).unwrap() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn t_on_plus_with_zero_keys() {
        let plus = StateVector::new_uniform(1).unwrap();
        let aux = prepare_aux(AuxSpec::default(), false);
        let (c, out) = run_gadget(
            &plus,
            1,
            &aux,
            false,
            false,
            &mut MeasurementPolicy::scripted([false]),
        )
        .unwrap();
        assert!(!c);
        let mut kr = KeyRound::new(PauliKey::zeros(1));
        kr.update_t(1, TParams::default()).unwrap();
        let mut want = plus.clone();
        want.apply_1q(GateKind::T, 1).unwrap();
        let got = qotp_decrypt(&out, &kr.key, &[1]).unwrap();
        assert!(got.fidelity(&want).unwrap() >= 1.0 - 1e-9);
    }

    /// Exhaustive key relation on a fixed non-symmetric plaintext, T and T†,
    /// data wire in the middle of a 3-wire register.
    #[test]
    fn key_relation_holds_in_a_register() {
        let mut psi = StateVector::new_basis_state(3, &[false, false, true]).unwrap();
        psi.apply_1q(GateKind::H, 1).unwrap();
        psi.apply_1q(GateKind::H, 2).unwrap();
        psi.apply_1q(GateKind::T, 2).unwrap();
        psi.apply_cnot(2, 3).unwrap();
        psi.apply_cnot(1, 2).unwrap();
        let wires = [1, 2, 3];
        for dagger in [false, true] {
            let mut want = psi.clone();
            want.apply_1q(if dagger { GateKind::Tdg } else { GateKind::T }, 2)
                .unwrap();
            for bits in 0..16 {
                let (x, z, y, d) = (bits & 8 != 0, bits & 4 != 0, bits & 2 != 0, bits & 1 != 0);
                let mut ek = PauliKey::new(
                    BitString::from_index(0b101, 3),
                    BitString::from_index(0b011, 3),
                )
                .unwrap();
                ek.set_x(2, x);
                ek.set_z(2, z);
                let cipher = qotp_encrypt(&psi, &ek, &wires).unwrap();
                let aux = prepare_aux(AuxSpec { y, d }, dagger);
                let w = compute_w(x, y);
                for c in [false, true] {
                    let (got_c, out) = run_gadget(
                        &cipher,
                        2,
                        &aux,
                        w,
                        dagger,
                        &mut MeasurementPolicy::scripted([c]),
                    )
                    .unwrap();
                    assert_eq!(got_c, c);
                    assert_eq!(out.num_wires(), 3);
                    let mut kr = KeyRound::new(ek.clone());
                    kr.update_t(2, TParams { y, d, c }).unwrap();
                    let plain = qotp_decrypt(&out, &kr.key, &wires).unwrap();
                    assert!(
                        plain.fidelity(&want).unwrap() >= 1.0 - 1e-9,
                        "dagger={dagger} x={x} z={z} y={y} d={d} c={c}"
                    );
                }
            }
        }
    }

    #[test]
    fn c_is_unbiased() {
        let mut psi = StateVector::new_basis_state(1, &[false]).unwrap();
        psi.apply_1q(GateKind::H, 1).unwrap();
        psi.apply_1q(GateKind::T, 1).unwrap();
        psi.apply_1q(GateKind::H, 1).unwrap();
        let mut policy = MeasurementPolicy::sampled(99);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let shots = 10_000;
        let ones = (0..shots)
            .filter(|_| {
                use rand::Rng;
                let aux = prepare_aux(
                    AuxSpec {
                        y: rng.gen(),
                        d: rng.gen(),
                    },
                    false,
                );
                run_gadget(&psi, 1, &aux, rng.gen(), false, &mut policy)
                    .unwrap()
                    .0
            })
            .count();
        let sigma = (0.25 / shots as f64).sqrt();
        assert!((ones as f64 / shots as f64 - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = StateVector::new_uniform(2).unwrap();
        let aux = prepare_aux(AuxSpec::default(), false);
        let mut p = MeasurementPolicy::sampled(0);
        assert!(run_gadget(&s, 3, &aux, false, false, &mut p).is_err());
        assert!(run_gadget(&s, 1, &s, false, false, &mut p).is_err());
    }

    #[test]
    fn record_line() {
        let r = GadgetRecord {
            wire: 3,
            dagger: true,
            y: true,
            d: false,
            w: true,
            c: false,
        };
        assert_eq!(r.line(1), "gadget 1: wire=3 dagger=1 y=1 d=0 w=1 c=0");
    }
}
