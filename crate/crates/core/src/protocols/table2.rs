//! The five recorded runs of the two-qubit blind search, as fixtures.

use std::fmt;

use serde::Serialize;

use super::blind_search::{run_protocol1, Protocol1Config, Protocol1Result};
use crate::bits::{bits, BitString};
use crate::error::Result;
use crate::pauli_crypto::PauliKey;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table2Row {
    pub index: usize,
    /// x half of ek over all three wires.
    pub ek_x: BitString,
    pub ek_z: BitString,
    pub y: BitString,
    pub d: BitString,
    pub c: BitString,
    pub encrypted_result: BitString,
    pub dk: BitString,
    pub decrypted: BitString,
}

pub const TARGET: &str = "10";

#[rustfmt::skip]
const RAW: [[&str; 8]; 5] = [
    ["100", "110", "1010110", "0111001", "1110111", "01", "11", "10"],
    ["100", "010", "1110011", "1011010", "1000010", "00", "10", "10"],
    ["100", "100", "0100001", "0000101", "0000101", "01", "11", "10"],
    ["010", "110", "0000011", "0111110", "1001101", "11", "01", "10"],
    ["110", "110", "0101100", "0001010", "1011101", "10", "00", "10"],
];

pub fn rows() -> Vec<Table2Row> {
    RAW.iter()
        .enumerate()
        .map(|(i, r)| Table2Row {
            index: i + 1,
            ek_x: bits(r[0]),
            ek_z: bits(r[1]),
            y: bits(r[2]),
            d: bits(r[3]),
            c: bits(r[4]),
            encrypted_result: bits(r[5]),
            dk: bits(r[6]),
            decrypted: bits(r[7]),
        })
        .collect()
}

impl Table2Row {
    pub fn config(&self, seed: u64) -> Result<Protocol1Config> {
        Ok(Protocol1Config {
            scripted_c: Some(self.c.clone()),
            forced_ek: Some(PauliKey::new(self.ek_x.clone(), self.ek_z.clone())?),
            forced_yd: Some((self.y.clone(), self.d.clone())),
            ..Protocol1Config::new(bits(TARGET), seed)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDiff {
    pub field: &'static str,
    pub expected: BitString,
    pub actual: BitString,
}

impl fmt::Display for FieldDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: expected {} got {}",
            self.field, self.expected, self.actual
        )
    }
}

#[derive(Clone, Debug)]
pub struct RowCheck {
    pub row: Table2Row,
    pub result: Protocol1Result,
    pub diffs: Vec<FieldDiff>,
}

impl RowCheck {
    pub fn passed(&self) -> bool {
        self.diffs.is_empty()
    }
}

impl fmt::Display for RowCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.result;
        write!(
            f,
            "row {}: {} enc={} dk={} dec={}",
            self.row.index,
            if self.passed() { "PASS" } else { "FAIL" },
            r.encrypted_result,
            r.dk,
            r.decrypted
        )?;
        for d in &self.diffs {
            write!(f, " [{d}]")?;
        }
        Ok(())
    }
}

/// Replays `row` and compares the three outcome columns.
pub fn check_row(row: &Table2Row) -> Result<RowCheck> {
    let result = run_protocol1(&row.config(0)?)?;
    let mut diffs = Vec::new();
    for (field, expected, actual) in [
        (
            "encrypted_result",
            &row.encrypted_result,
            &result.encrypted_result,
        ),
        ("dk", &row.dk, &result.dk),
        ("decrypted", &row.decrypted, &result.decrypted),
    ] {
        if expected != actual {
            diffs.push(FieldDiff {
                field,
                expected: expected.clone(),
                actual: actual.clone(),
            });
        }
    }
    Ok(RowCheck {
        row: row.clone(),
        result,
        diffs,
    })
}

pub fn check_all() -> Result<Vec<RowCheck>> {
    rows().iter().map(check_row).collect()
}
