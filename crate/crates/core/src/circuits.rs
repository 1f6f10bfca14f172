//! Circuit IR, text format, fixed constructions, and the homomorphic compiler.
//!
//! Text format, one op per line with 1-based wires:
//!
//! ```text
//! # comment
//! h 1
//! cnot 1 2
//! tdg 2
//! ```

use std::fmt;

use crate::bits::BitString;
use crate::error::{QheError, Result};
use crate::statevector::{GateKind, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CircuitOp {
    Gate {
        kind: GateKind,
        wire: usize,
    },
    CNot {
        control: usize,
        target: usize,
    },
    /// Placeholder for an interactive T (or T† when `dagger`) gadget.
    GadgetSlot {
        wire: usize,
        dagger: bool,
    },
}

impl CircuitOp {
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            CircuitOp::Gate { wire, .. } | CircuitOp::GadgetSlot { wire, .. } => vec![wire],
            CircuitOp::CNot { control, target } => vec![control, target],
        }
    }

    pub fn is_t_like(&self) -> bool {
        matches!(
            self,
            CircuitOp::Gate {
                kind: GateKind::T | GateKind::Tdg,
                ..
            } | CircuitOp::GadgetSlot { .. }
        )
    }

    fn validate(&self, num_wires: usize) -> Result<()> {
        for w in self.wires() {
            if w == 0 || w > num_wires {
                return Err(QheError::WireOutOfRange { wire: w, num_wires });
            }
        }
        match *self {
            CircuitOp::CNot { control, target } if control == target => {
                Err(QheError::SameControlTarget(control))
            }
            CircuitOp::Gate {
                kind: GateKind::CNOT,
                ..
            } => Err(QheError::NotSingleQubit("cnot")),
            _ => Ok(()),
        }
    }

    /// Applies a plain (non-gadget) op to a state.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        match *self {
            CircuitOp::Gate { kind, wire } => state.apply_1q(kind, wire),
            CircuitOp::CNot { control, target } => state.apply_cnot(control, target),
            CircuitOp::GadgetSlot { .. } => Err(QheError::Protocol(
                "gadget slots need the interactive runner".into(),
            )),
        }
    }
}

impl fmt::Display for CircuitOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CircuitOp::Gate { kind, wire } => write!(f, "{kind} {wire}"),
            CircuitOp::CNot { control, target } => write!(f, "cnot {control} {target}"),
            CircuitOp::GadgetSlot { wire, dagger } => {
                write!(
                    f,
                    "{} {wire}",
                    if dagger { "tdg-gadget" } else { "t-gadget" }
                )
            }
        }
    }
}

fn gate(kind: GateKind, wire: usize) -> CircuitOp {
    CircuitOp::Gate { kind, wire }
}

fn cnot(control: usize, target: usize) -> CircuitOp {
    CircuitOp::CNot { control, target }
}

/// A plain circuit over the universal gate set; never holds gadget slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    num_wires: usize,
    ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(num_wires: usize) -> Result<Self> {
        if num_wires == 0 {
            return Err(QheError::EmptyRegister);
        }
        Ok(Circuit {
            num_wires,
            ops: Vec::new(),
        })
    }

    pub fn from_ops(num_wires: usize, ops: Vec<CircuitOp>) -> Result<Self> {
        let mut c = Circuit::new(num_wires)?;
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, op: CircuitOp) -> Result<()> {
        if let CircuitOp::GadgetSlot { .. } = op {
            return Err(QheError::Protocol(
                "plain circuits cannot hold gadget slots".into(),
            ));
        }
        op.validate(self.num_wires)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn gate(mut self, kind: GateKind, wire: usize) -> Result<Self> {
        self.push(gate(kind, wire))?;
        Ok(self)
    }

    pub fn cnot(mut self, control: usize, target: usize) -> Result<Self> {
        self.push(cnot(control, target))?;
        Ok(self)
    }

    pub fn num_wires(&self) -> usize {
        self.num_wires
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn t_count(&self) -> usize {
        self.ops.iter().filter(|op| op.is_t_like()).count()
    }

    /// Index of the first T/T† gate, if any.
    pub fn first_non_clifford(&self) -> Option<usize> {
        self.ops.iter().position(|op| op.is_t_like())
    }

    pub fn is_clifford(&self) -> bool {
        self.first_non_clifford().is_none()
    }

    pub fn ensure_clifford(&self) -> Result<()> {
        match self.first_non_clifford() {
            None => Ok(()),
            Some(index) => {
                let (gate, wire) = match self.ops[index] {
                    CircuitOp::Gate { kind, wire } => (kind.name(), wire),
                    _ => unreachable!("plain circuits hold no gadget slots"),
                };
                Err(QheError::NonClifford { gate, wire, index })
            }
        }
    }

    /// Prefix of the first `len` ops.
    pub fn prefix(&self, len: usize) -> Circuit {
        Circuit {
            num_wires: self.num_wires,
            ops: self.ops[..len].to_vec(),
        }
    }

    /// Canonical text form: one op per line, single spaces, no comments.
    pub fn to_text(&self) -> String {
        self.ops.iter().map(|op| format!("{op}\n")).collect()
    }
}

/// A parsed circuit plus the source line of each op.
#[derive(Clone, Debug)]
pub struct ParsedCircuit {
    pub circuit: Circuit,
    pub lines: Vec<usize>,
}

impl ParsedCircuit {
    /// Clifford check that reports the offending source line.
    pub fn ensure_clifford(&self) -> Result<()> {
        match self.circuit.first_non_clifford() {
            None => Ok(()),
            Some(i) => Err(QheError::Parse {
                line: self.lines[i],
                message: format!(
                    "non-Clifford gate `{}` is not allowed here",
                    self.circuit.ops()[i]
                ),
            }),
        }
    }
}

/// Parses the text format; the wire count is the largest wire mentioned.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    Ok(parse_circuit_annotated(text, None)?.circuit)
}

/// Parses with an optional declared wire count (wires beyond it are errors).
pub fn parse_circuit_annotated(text: &str, num_wires: Option<usize>) -> Result<ParsedCircuit> {
    let mut ops = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| QheError::Parse { line, message };
        let mut tokens = content.split_whitespace();
        let mnemonic = tokens.next().unwrap_or_default().to_ascii_lowercase();
        let kind = GateKind::from_name(&mnemonic)
            .ok_or_else(|| err(format!("unknown mnemonic `{mnemonic}`")))?;
        let args = tokens
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| err(format!("bad wire index `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if args.len() != kind.arity() {
            return Err(err(format!(
                "`{mnemonic}` takes {} wire(s), got {}",
                kind.arity(),
                args.len()
            )));
        }
        for &w in &args {
            if w == 0 || num_wires.is_some_and(|n| w > n) {
                return Err(err(format!("wire {w} out of range")));
            }
        }
        let op = if kind == GateKind::CNOT {
            if args[0] == args[1] {
                return Err(err(format!("control equals target ({})", args[0])));
            }
            cnot(args[0], args[1])
        } else {
            gate(kind, args[0])
        };
        ops.push(op);
        lines.push(line);
    }
    let inferred = ops.iter().flat_map(|op| op.wires()).max().unwrap_or(1);
    let circuit = Circuit::from_ops(num_wires.unwrap_or(inferred), ops)?;
    Ok(ParsedCircuit { circuit, lines })
}

/// Toffoli on `(c1, c2) -> target` over {H, S, T, T†, CNOT} with seven T-type gates.
pub fn toffoli_ops(c1: usize, c2: usize, target: usize) -> Vec<CircuitOp> {
    use GateKind::*;
    vec![
        gate(H, target),
        cnot(c2, target),
        gate(Tdg, target),
        cnot(c1, target),
        gate(T, target),
        cnot(c2, target),
        gate(Tdg, target),
        cnot(c1, target),
        gate(T, target),
        gate(Tdg, c2),
        cnot(c1, c2),
        gate(Tdg, c2),
        cnot(c1, c2),
        gate(T, c1),
        gate(S, c2),
        gate(H, target),
    ]
}

/// Three-wire Toffoli, controls on wires 1 and 2.
pub fn toffoli() -> Circuit {
    Circuit::from_ops(3, toffoli_ops(1, 2, 3)).expect("fixed construction")
}

fn check_search_target(m: usize, target: &BitString) -> Result<()> {
    if m != 2 {
        return Err(QheError::UnsupportedSearchSize(m));
    }
    if target.len() != m {
        return Err(QheError::LengthMismatch {
            expected: m,
            actual: target.len(),
        });
    }
    Ok(())
}

fn oracle_ops(target: &BitString) -> Vec<CircuitOp> {
    let flips: Vec<CircuitOp> = (0..target.len())
        .filter(|&k| !target[k])
        .map(|k| gate(GateKind::X, k + 1))
        .collect();
    let mut ops = flips.clone();
    ops.extend(toffoli_ops(1, 2, 3));
    ops.extend(flips);
    ops
}

/// Phase oracle marking `target` on data wires 1..=m; wire m+1 is the oracle qubit.
pub fn build_oracle(m: usize, target: &BitString) -> Result<Circuit> {
    check_search_target(m, target)?;
    Circuit::from_ops(m + 1, oracle_ops(target))
}

/// One Grover iteration (oracle then diffusion) for a 2-qubit search space.
///
/// No input preparation: the data register must already be in uniform
/// superposition and the oracle wire in `|->`.
pub fn build_grover(m: usize, target: &BitString) -> Result<Circuit> {
    use GateKind::*;
    check_search_target(m, target)?;
    let mut ops = oracle_ops(target);
    ops.extend([
        gate(H, 1),
        gate(H, 2),
        gate(X, 1),
        gate(X, 2),
        gate(H, 2),
        cnot(1, 2),
        gate(H, 2),
        gate(X, 1),
        gate(X, 2),
        gate(H, 1),
        gate(H, 2),
    ]);
    Circuit::from_ops(m + 1, ops)
}

/// A circuit whose T/T† gates have become gadget slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomomorphicCircuit {
    num_wires: usize,
    ops: Vec<CircuitOp>,
    gadget_count: usize,
}

impl HomomorphicCircuit {
    pub fn num_wires(&self) -> usize {
        self.num_wires
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn gadget_count(&self) -> usize {
        self.gadget_count
    }
}

pub fn compile_homomorphic(c: &Circuit) -> HomomorphicCircuit {
    let ops: Vec<CircuitOp> = c
        .ops()
        .iter()
        .map(|op| match *op {
            CircuitOp::Gate {
                kind: GateKind::T,
                wire,
            } => CircuitOp::GadgetSlot {
                wire,
                dagger: false,
            },
            CircuitOp::Gate {
                kind: GateKind::Tdg,
                wire,
            } => CircuitOp::GadgetSlot { wire, dagger: true },
            other => other,
        })
        .collect();
    let gadget_count = ops
        .iter()
        .filter(|op| matches!(op, CircuitOp::GadgetSlot { .. }))
        .count();
    HomomorphicCircuit {
        num_wires: c.num_wires(),
        ops,
        gadget_count,
    }
}

pub fn simulate_plain(c: &Circuit, input: &StateVector) -> Result<StateVector> {
    if c.num_wires() != input.num_wires() {
        return Err(QheError::DimensionMismatch(
            c.num_wires(),
            input.num_wires(),
        ));
    }
    let mut state = input.clone();
    for op in c.ops() {
        op.apply(&mut state)?;
    }
    Ok(state)
}
