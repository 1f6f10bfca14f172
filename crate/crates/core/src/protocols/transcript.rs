use std::fmt;

use serde_json::{json, Value};

use crate::bits::BitString;
use crate::statevector::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
    Carol,
    Dave,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "Alice",
            Party::Bob => "Bob",
            Party::Carol => "Carol",
            Party::Dave => "Dave",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    InputLength(usize),
    /// A batch of BB84 qubits; only the count is logged.
    Bb84Qubits(usize),
    /// Receiver's measurement bases (0 = X basis, 1 = Y basis).
    BasisAnnouncement(BitString),
    /// Sender's reply: which rounds had matching bases.
    SiftMask(BitString),
    EncState(StateVector),
    AuxQubit(StateVector),
    WBit(bool),
    CBit(bool),
    EncResult(BitString),
    /// Decryption key under the classical pad.
    EncDk(BitString),
    KappaPrime(StateVector),
    /// Encryption key a key searcher must look for.
    SearchKey(BitString),
    /// Key pair under a BB84-derived pad.
    KeyPair {
        ek: BitString,
        dk: BitString,
    },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::InputLength(_) => "InputLength",
            Payload::Bb84Qubits(_) => "Bb84Qubits",
            Payload::BasisAnnouncement(_) => "BasisAnnouncement",
            Payload::SiftMask(_) => "SiftMask",
            Payload::EncState(_) => "EncState",
            Payload::AuxQubit(_) => "AuxQubit",
            Payload::WBit(_) => "WBit",
            Payload::CBit(_) => "CBit",
            Payload::EncResult(_) => "EncResult",
            Payload::EncDk(_) => "EncDk",
            Payload::KappaPrime(_) => "KappaPrime",
            Payload::SearchKey(_) => "SearchKey",
            Payload::KeyPair { .. } => "KeyPair",
        }
    }

    fn state(&self) -> Option<&StateVector> {
        match self {
            Payload::EncState(s) | Payload::AuxQubit(s) | Payload::KappaPrime(s) => Some(s),
            _ => None,
        }
    }

    pub fn summary(&self) -> String {
        if let Some(s) = self.state() {
            return format!("wires={} digest={:016x}", s.num_wires(), state_digest(s));
        }
        match self {
            Payload::InputLength(n) => format!("n={n}"),
            Payload::Bb84Qubits(k) => format!("count={k}"),
            Payload::BasisAnnouncement(b)
            | Payload::SiftMask(b)
            | Payload::EncResult(b)
            | Payload::EncDk(b)
            | Payload::SearchKey(b) => b.to_string(),
            Payload::WBit(b) | Payload::CBit(b) => (*b as u8).to_string(),
            Payload::KeyPair { ek, dk } => format!("ek={ek} dk={dk}"),
            _ => unreachable!("state payloads handled above"),
        }
    }
}

/// FNV-1a over the raw bits of every amplitude.
fn state_digest(s: &StateVector) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for a in s.amplitudes() {
        for part in [a.re, a.im] {
            for byte in part.to_bits().to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
    }
    h
}

fn amplitude_hex(s: &StateVector) -> Vec<String> {
    s.amplitudes()
        .iter()
        .map(|a| format!("{:016x}:{:016x}", a.re.to_bits(), a.im.to_bits()))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Message {
    /// Protocol step that produced the message.
    pub step: u32,
    pub sender: Party,
    pub receiver: Party,
    pub payload: Payload,
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step={} {}→{} {} {}",
            self.step,
            self.sender,
            self.receiver,
            self.payload.kind(),
            self.payload.summary()
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Transcript {
    messages: Vec<Message>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: u32, sender: Party, receiver: Party, payload: Payload) {
        self.messages.push(Message {
            step,
            sender,
            receiver,
            payload,
        });
    }

    pub fn extend(&mut self, other: Transcript) {
        self.messages.extend(other.messages);
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn received_by(&self, party: Party) -> impl Iterator<Item = &Message> {
        self.messages.iter().filter(move |m| m.receiver == party)
    }

    /// Line-oriented form, one message per line.
    pub fn to_text(&self) -> String {
        self.messages.iter().map(|m| format!("{m}\n")).collect()
    }

    /// JSON export; with `amplitudes` every quantum payload carries its
    /// amplitudes as `re:im` pairs of IEEE-754 bit patterns in hex.
    pub fn to_json(&self, amplitudes: bool) -> Value {
        let messages: Vec<Value> = self
            .messages
            .iter()
            .map(|m| {
                let mut v = json!({
                    "step": m.step,
                    "sender": m.sender.to_string(),
                    "receiver": m.receiver.to_string(),
                    "kind": m.payload.kind(),
                    "summary": m.payload.summary(),
                });
                if amplitudes {
                    if let Some(s) = m.payload.state() {
                        v["amplitudes"] = json!(amplitude_hex(s));
                    }
                }
                v
            })
            .collect();
        json!({ "messages": messages })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::bits;

    #[test]
    fn line_format() {
        let mut t = Transcript::new();
        t.push(1, Party::Alice, Party::Carol, Payload::InputLength(2));
        t.push(4, Party::Bob, Party::Carol, Payload::CBit(true));
        t.push(5, Party::Carol, Party::Alice, Payload::EncDk(bits("01")));
        assert_eq!(
            t.to_text(),
            "step=1 Alice→Carol InputLength n=2\nstep=4 Bob→Carol CBit 1\nstep=5 Carol→Alice EncDk 01\n"
        );
    }

    #[test]
    fn json_amplitudes_behind_flag() {
        let mut t = Transcript::new();
        t.push(
            3,
            Party::Alice,
            Party::Bob,
            Payload::EncState(StateVector::new_basis_state(1, &[true]).unwrap()),
        );
        let plain = t.to_json(false);
        assert!(plain["messages"][0].get("amplitudes").is_none());
        let full = t.to_json(true);
        let amps = full["messages"][0]["amplitudes"].as_array().unwrap();
        assert_eq!(amps.len(), 2);
        assert_eq!(amps[1], "3ff0000000000000:0000000000000000");
    }
}
