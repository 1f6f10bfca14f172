//! Dense statevector simulation.
//!
//! Wires are numbered from 1. Wire 1 is the most significant bit of the
//! amplitude index, so `|b1 b2 ... bn>` lives at index `b1*2^(n-1) + ... + bn`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::error::{QheError, Result};

/// State-level comparison tolerance.
pub const STATE_TOL: f64 = 1e-9;

/// Weight below which a measurement branch is treated as empty when sampling.
const NULL_BRANCH: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    CNOT,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::CNOT,
    ];

    /// Lowercase mnemonic used by the circuit text format.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "i",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::CNOT => "cnot",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.iter().copied().find(|g| g.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::CNOT => 2,
            _ => 1,
        }
    }

    pub fn is_clifford(self) -> bool {
        !matches!(self, GateKind::T | GateKind::Tdg)
    }

    pub fn adjoint(self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            g => g,
        }
    }

    /// The 2x2 unitary, or `None` for CNOT.
    pub fn matrix(self) -> Option<Matrix2> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let t = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let m = match self {
            GateKind::I => [[ONE, ZERO], [ZERO, ONE]],
            GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Y => [[ZERO, -I], [I, ZERO]],
            GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
            GateKind::H => [[h, h], [h, -h]],
            GateKind::S => [[ONE, ZERO], [ZERO, I]],
            GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
            GateKind::T => [[ONE, ZERO], [ZERO, t]],
            GateKind::Tdg => [[ONE, ZERO], [ZERO, t.conj()]],
            GateKind::CNOT => return None,
        };
        Some(m)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a measurement picks its outcome.
#[derive(Clone, Debug)]
pub enum MeasurementPolicy {
    /// Born-rule sampling from a seeded generator.
    Sampled(ChaCha8Rng),
    /// Outcomes forced from a list, consumed in order.
    Scripted { bits: Vec<bool>, next: usize },
    /// Every branch is followed; only [`StateVector::measure_wire_branches`]
    /// accepts this policy.
    Exhaustive,
}

impl MeasurementPolicy {
    pub fn sampled(seed: u64) -> Self {
        MeasurementPolicy::Sampled(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn scripted<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        MeasurementPolicy::Scripted {
            bits: bits.into_iter().collect(),
            next: 0,
        }
    }

    /// Scripted bits not yet consumed.
    pub fn remaining(&self) -> Option<usize> {
        match self {
            MeasurementPolicy::Scripted { bits, next } => Some(bits.len() - next),
            _ => None,
        }
    }

    fn choose(&mut self, wire: usize, p1: f64) -> Result<bool> {
        match self {
            MeasurementPolicy::Sampled(rng) => {
                if p1 < NULL_BRANCH {
                    Ok(false)
                } else if 1.0 - p1 < NULL_BRANCH {
                    Ok(true)
                } else {
                    Ok(rng.gen::<f64>() < p1)
                }
            }
            MeasurementPolicy::Scripted { bits, next } => {
                let bit = *bits.get(*next).ok_or(QheError::ScriptExhausted)?;
                let probability = if bit { p1 } else { 1.0 - p1 };
                if probability <= STATE_TOL {
                    return Err(QheError::ImpossibleOutcome {
                        wire,
                        bit: bit as u8,
                        probability,
                    });
                }
                *next += 1;
                Ok(bit)
            }
            MeasurementPolicy::Exhaustive => Err(QheError::ExhaustiveNeedsBranching),
        }
    }
}

/// One outcome of an exhaustive measurement.
#[derive(Clone, Debug)]
pub struct Branch {
    pub bit: bool,
    pub probability: f64,
    pub state: StateVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_wires: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new_basis_state(num_wires: usize, bits: &[bool]) -> Result<Self> {
        if num_wires == 0 {
            return Err(QheError::EmptyRegister);
        }
        if bits.len() != num_wires {
            return Err(QheError::LengthMismatch {
                expected: num_wires,
                actual: bits.len(),
            });
        }
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut amplitudes = vec![ZERO; 1 << num_wires];
        amplitudes[index] = ONE;
        Ok(StateVector {
            num_wires,
            amplitudes,
        })
    }

    pub fn new_uniform(num_wires: usize) -> Result<Self> {
        if num_wires == 0 {
            return Err(QheError::EmptyRegister);
        }
        let dim = 1usize << num_wires;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(StateVector {
            num_wires,
            amplitudes: vec![a; dim],
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two and the norm 1.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(QheError::LengthMismatch {
                expected: dim.next_power_of_two().max(2),
                actual: dim,
            });
        }
        let state = StateVector {
            num_wires: dim.trailing_zeros() as usize,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(QheError::Protocol(format!(
                "amplitudes are not normalized (norm^2 = {norm})"
            )));
        }
        Ok(state)
    }

    pub fn num_wires(&self) -> usize {
        self.num_wires
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire == 0 || wire > self.num_wires {
            return Err(QheError::WireOutOfRange {
                wire,
                num_wires: self.num_wires,
            });
        }
        Ok(())
    }

    fn check_distinct(&self, wires: &[usize]) -> Result<()> {
        for (k, &w) in wires.iter().enumerate() {
            self.check_wire(w)?;
            if wires[..k].contains(&w) {
                return Err(QheError::DuplicateWire(w));
            }
        }
        Ok(())
    }

    /// Bit mask of `wire` inside an amplitude index.
    fn mask(&self, wire: usize) -> usize {
        1 << (self.num_wires - wire)
    }

    pub fn apply_1q(&mut self, gate: GateKind, wire: usize) -> Result<()> {
        let m = gate.matrix().ok_or(QheError::NotSingleQubit(gate.name()))?;
        self.apply_matrix(&m, wire)
    }

    pub fn apply_matrix(&mut self, m: &Matrix2, wire: usize) -> Result<()> {
        self.check_wire(wire)?;
        let mask = self.mask(wire);
        for i0 in (0..self.dim()).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
            self.amplitudes[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_wire(control)?;
        self.check_wire(target)?;
        if control == target {
            return Err(QheError::SameControlTarget(control));
        }
        let (cm, tm) = (self.mask(control), self.mask(target));
        for i in (0..self.dim()).filter(|i| i & cm != 0 && i & tm == 0) {
            self.amplitudes.swap(i, i | tm);
        }
        Ok(())
    }

    /// Probability that `wire` reads 1.
    pub fn prob_one(&self, wire: usize) -> Result<f64> {
        self.check_wire(wire)?;
        let mask = self.mask(wire);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn collapse(&mut self, wire: usize, bit: bool) {
        let mask = self.mask(wire);
        let mut norm = 0.0;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if (i & mask != 0) != bit {
                *a = ZERO;
            } else {
                norm += a.norm_sqr();
            }
        }
        let scale = norm.sqrt().recip();
        for a in &mut self.amplitudes {
            *a *= scale;
        }
    }

    /// Computational-basis measurement of one wire; collapses in place.
    pub fn measure_wire(&mut self, wire: usize, policy: &mut MeasurementPolicy) -> Result<bool> {
        let p1 = self.prob_one(wire)?;
        let bit = policy.choose(wire, p1)?;
        self.collapse(wire, bit);
        Ok(bit)
    }

    /// Both post-measurement branches of `wire`, skipping empty ones.
    pub fn measure_wire_branches(&self, wire: usize) -> Result<Vec<Branch>> {
        let p1 = self.prob_one(wire)?;
        let mut out = Vec::with_capacity(2);
        for (bit, probability) in [(false, 1.0 - p1), (true, p1)] {
            if probability > STATE_TOL {
                let mut state = self.clone();
                state.collapse(wire, bit);
                out.push(Branch {
                    bit,
                    probability,
                    state,
                });
            }
        }
        Ok(out)
    }

    /// Measures `wires` one after another in the listed order.
    pub fn measure_register(
        &mut self,
        wires: &[usize],
        policy: &mut MeasurementPolicy,
    ) -> Result<BitString> {
        self.check_distinct(wires)?;
        wires
            .iter()
            .map(|&w| self.measure_wire(w, policy))
            .collect()
    }

    /// Drops a wire that is known to hold `known_value`; later wires shift down.
    pub fn remove_wire(&self, wire: usize, known_value: bool) -> Result<StateVector> {
        self.check_wire(wire)?;
        if self.num_wires == 1 {
            return Err(QheError::EmptyRegister);
        }
        let mask = self.mask(wire);
        let stray: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & mask != 0) != known_value)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if stray > STATE_TOL {
            return Err(QheError::NotClassical {
                wire,
                value: known_value as u8,
                weight: stray,
            });
        }
        let low = mask - 1;
        let mut amplitudes = vec![ZERO; self.dim() / 2];
        for (j, slot) in amplitudes.iter_mut().enumerate() {
            let high = (j & !low) << 1;
            let i = high | (j & low) | if known_value { mask } else { 0 };
            *slot = self.amplitudes[i];
        }
        let mut out = StateVector {
            num_wires: self.num_wires - 1,
            amplitudes,
        };
        out.renormalize();
        Ok(out)
    }

    /// Moves `from` to position `to`, shifting the wires in between.
    pub fn move_wire(&self, from: usize, to: usize) -> Result<StateVector> {
        self.check_wire(from)?;
        self.check_wire(to)?;
        let n = self.num_wires;
        let mut order: Vec<usize> = (1..=n).filter(|&w| w != from).collect();
        order.insert(to - 1, from);
        // order[k] = old wire now sitting at new position k + 1
        let mut amplitudes = vec![ZERO; self.dim()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let j = order.iter().enumerate().fold(0usize, |acc, (k, &old)| {
                let bit = (i >> (n - old)) & 1;
                acc | (bit << (n - 1 - k))
            });
            amplitudes[j] = *a;
        }
        Ok(StateVector {
            num_wires: n,
            amplitudes,
        })
    }

    /// `self ⊗ other`; `other` occupies the trailing wires.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        StateVector {
            num_wires: self.num_wires + other.num_wires,
            amplitudes,
        }
    }

    /// Outcome probabilities of measuring `wires` (in that order); zero-weight
    /// outcomes are omitted.
    pub fn outcome_distribution(&self, wires: &[usize]) -> Result<BTreeMap<BitString, f64>> {
        self.check_distinct(wires)?;
        let mut acc: BTreeMap<BitString, f64> = BTreeMap::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let key: BitString = wires.iter().map(|&w| i & self.mask(w) != 0).collect();
            *acc.entry(key).or_insert(0.0) += p;
        }
        acc.retain(|_, p| *p > NULL_BRANCH);
        Ok(acc)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_wires != other.num_wires {
            return Err(QheError::DimensionMismatch(self.num_wires, other.num_wires));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn equal_up_to_global_phase(&self, other: &StateVector, tol: f64) -> Result<bool> {
        Ok(self.inner(other)?.norm() >= 1.0 - tol)
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    fn renormalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.scale(Complex64::new(n.recip(), 0.0));
        }
    }
}
