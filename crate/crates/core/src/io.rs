//! JSON files for sequences and families.
//!
//! Sequence: `{"length", "domain", "alphabet_order", "values": [[re, im], ...]}`.
//! Family: `{"L", "K", "M", "omega", "sets": [[sequence, ...], ...],
//! "alphabet_order", "provenance"}`. Reals are written with 17 significant
//! digits so that a file round-trips to the same bits.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{invalid, Result, ScsError};
use crate::sequence::{ComplexSeq, Domain, Provenance, ScsFamily, SpectralConstraint};

#[derive(Clone, Copy, Debug)]
struct Real(f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw =
            RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Real)
    }
}

#[derive(Serialize, Deserialize)]
struct SeqFile {
    length: usize,
    domain: Domain,
    alphabet_order: Option<u32>,
    values: Vec<[Real; 2]>,
}

impl SeqFile {
    fn from_seq(seq: &ComplexSeq, alphabet_order: Option<u32>) -> Self {
        Self {
            length: seq.len(),
            domain: seq.domain(),
            alphabet_order,
            values: seq
                .values()
                .iter()
                .map(|v| [Real(v.re), Real(v.im)])
                .collect(),
        }
    }

    fn into_seq(self) -> Result<ComplexSeq> {
        if self.values.len() != self.length {
            return invalid(format!(
                "declared length {} but {} values",
                self.length,
                self.values.len()
            ));
        }
        let values = self
            .values
            .into_iter()
            .map(|[re, im]| Complex64::new(re.0, im.0))
            .collect();
        ComplexSeq::new(self.domain, values)
    }
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct FamilyFile {
    L: usize,
    K: usize,
    M: usize,
    omega: Vec<usize>,
    sets: Vec<Vec<SeqFile>>,
    alphabet_order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

pub fn sequence_to_json(seq: &ComplexSeq, alphabet_order: Option<u32>) -> Result<String> {
    Ok(serde_json::to_string(&SeqFile::from_seq(
        seq,
        alphabet_order,
    ))?)
}

/// The sequence and its declared alphabet order.
pub fn sequence_from_json(text: &str) -> Result<(ComplexSeq, Option<u32>)> {
    let file: SeqFile = serde_json::from_str(text)?;
    let order = file.alphabet_order;
    Ok((file.into_seq()?, order))
}

pub fn family_to_json(family: &ScsFamily) -> Result<String> {
    let order = family.alphabet_order();
    let file = FamilyFile {
        L: family.length(),
        K: family.num_sets(),
        M: family.set_size(),
        omega: family.constraint().forbidden_vec(),
        sets: family
            .sets()
            .iter()
            .map(|set| set.iter().map(|s| SeqFile::from_seq(s, order)).collect())
            .collect(),
        alphabet_order: order,
        provenance: family.provenance().cloned(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn family_from_json(text: &str) -> Result<ScsFamily> {
    let file: FamilyFile = serde_json::from_str(text)?;
    if file.sets.len() != file.K {
        return invalid(format!(
            "declared K = {} but {} sets",
            file.K,
            file.sets.len()
        ));
    }
    if let Some(set) = file.sets.iter().find(|s| s.len() != file.M) {
        return invalid(format!(
            "declared M = {} but a set holds {}",
            file.M,
            set.len()
        ));
    }
    let constraint = SpectralConstraint::new(file.L, file.omega)?;
    let sets = file
        .sets
        .into_iter()
        .map(|set| {
            set.into_iter()
                .map(SeqFile::into_seq)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let family = ScsFamily::new(sets, constraint, file.alphabet_order)?;
    Ok(match file.provenance {
        Some(p) => family.with_provenance(p),
        None => family,
    })
}

pub fn read_family(path: &Path) -> Result<ScsFamily> {
    family_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_family(path: &Path, family: &ScsFamily) -> Result<()> {
    let mut text = family_to_json(family)?;
    text.push('\n');
    std::fs::write(path, text).map_err(ScsError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_round_trip_is_bit_exact() {
        let seq = ComplexSeq::time(vec![
            Complex64::new(0.1, -1.0 / 3.0),
            Complex64::new(std::f64::consts::PI, 1e-300),
            Complex64::new(-0.0, 5e-324),
        ])
        .unwrap();
        let text = sequence_to_json(&seq, Some(4)).unwrap();
        assert!(text.contains("\"domain\":\"time\""));
        let (back, order) = sequence_from_json(&text).unwrap();
        assert_eq!(order, Some(4));
        for (a, b) in seq.values().iter().zip(back.values()) {
            assert_eq!(a.re.to_bits() & !(1 << 63), b.re.to_bits() & !(1 << 63));
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let text = r#"{"length":2,"domain":"time","alphabet_order":null,"values":[[1,0]]}"#;
        assert!(sequence_from_json(text).is_err());
    }

    #[test]
    fn family_header_checked() {
        let text = r#"{"L":1,"K":2,"M":1,"omega":[],"sets":[[{"length":1,"domain":"time","alphabet_order":null,"values":[[1,0]]}]],"alphabet_order":null}"#;
        assert!(family_from_json(text).is_err());
        let ok = text.replace("\"K\":2", "\"K\":1");
        let fam = family_from_json(&ok).unwrap();
        assert_eq!(fam.length(), 1);
        assert!(fam.provenance().is_none());
    }
}
