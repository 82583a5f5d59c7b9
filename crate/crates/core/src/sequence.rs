//! Sequences, spectral constraints and families.
//!
//! Every family member is stored in the time domain. Frequency duals are
//! computed on demand through [`crate::spectral::dft`].

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, ScsError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Time,
    Frequency,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Time => "time",
            Domain::Frequency => "frequency",
        }
    }
}

/// A length-L vector of complex amplitudes tagged with its domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSeq {
    domain: Domain,
    values: Vec<Complex64>,
}

impl ComplexSeq {
    pub fn new(domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("sequence length must be at least 1");
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return invalid("sequence contains a non-finite value");
        }
        Ok(Self { domain, values })
    }

    pub fn time(values: Vec<Complex64>) -> Result<Self> {
        Self::new(Domain::Time, values)
    }

    pub fn frequency(values: Vec<Complex64>) -> Result<Self> {
        Self::new(Domain::Frequency, values)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub(crate) fn expect_domain(&self, expected: Domain) -> Result<()> {
        if self.domain == expected {
            Ok(())
        } else {
            Err(ScsError::WrongDomain {
                expected: expected.as_str(),
            })
        }
    }

    /// Copy with one entry replaced; used to inject faults in verification tests.
    pub fn with_value(&self, index: usize, value: Complex64) -> Result<Self> {
        if index >= self.len() {
            return invalid(format!(
                "index {index} out of range for length {}",
                self.len()
            ));
        }
        let mut values = self.values.clone();
        values[index] = value;
        Self::new(self.domain, values)
    }
}

/// Σ_t |c_t|².
pub fn energy(seq: &ComplexSeq) -> f64 {
    seq.values.iter().map(|v| v.norm_sqr()).sum()
}

/// The set Ω of forbidden carriers out of L.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralConstraint {
    length: usize,
    forbidden: BTreeSet<usize>,
}

impl SpectralConstraint {
    pub fn new(length: usize, forbidden: impl IntoIterator<Item = usize>) -> Result<Self> {
        let forbidden: BTreeSet<usize> = forbidden.into_iter().collect();
        if length == 0 {
            return invalid("constraint length must be at least 1");
        }
        if let Some(&bad) = forbidden.iter().find(|&&f| f >= length) {
            return invalid(format!("forbidden carrier {bad} outside Z_{length}"));
        }
        if forbidden.len() >= length {
            return invalid(format!(
                "|Ω| = {} leaves no admissible carrier out of {length}",
                forbidden.len()
            ));
        }
        Ok(Self { length, forbidden })
    }

    pub fn unconstrained(length: usize) -> Result<Self> {
        Self::new(length, std::iter::empty())
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// n = |Ω|.
    pub fn n(&self) -> usize {
        self.forbidden.len()
    }

    pub fn is_forbidden(&self, carrier: usize) -> bool {
        self.forbidden.contains(&carrier)
    }

    /// Forbidden carriers in ascending order.
    pub fn forbidden(&self) -> impl Iterator<Item = usize> + '_ {
        self.forbidden.iter().copied()
    }

    pub fn forbidden_vec(&self) -> Vec<usize> {
        self.forbidden.iter().copied().collect()
    }

    /// Carrier-marking vector: d_t = 0 exactly on Ω.
    pub fn marking_vector(&self) -> Vec<u8> {
        (0..self.length)
            .map(|t| u8::from(!self.forbidden.contains(&t)))
            .collect()
    }

    /// Expected |ĉ_f|² on admissible carriers, L/(L−n).
    pub fn admissible_power(&self) -> f64 {
        self.length as f64 / (self.length - self.n()) as f64
    }
}

/// Parameters a construction was run with, embedded in family files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub insert: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s0: Option<usize>,
    pub cfr_fingerprint: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orthogonal_matrix: Option<String>,
}

/// K sets of M time-domain sequences sharing one length and one Ω.
#[derive(Clone, Debug, PartialEq)]
pub struct ScsFamily {
    sets: Vec<Vec<ComplexSeq>>,
    constraint: SpectralConstraint,
    alphabet_order: Option<u32>,
    provenance: Option<Provenance>,
}

impl ScsFamily {
    /// Checks the structural invariants only. The uniform-power condition is
    /// verified separately so that non-compliant files can still be loaded
    /// and reported on.
    pub fn new(
        sets: Vec<Vec<ComplexSeq>>,
        constraint: SpectralConstraint,
        alphabet_order: Option<u32>,
    ) -> Result<Self> {
        if sets.is_empty() || sets.iter().any(|s| s.is_empty()) {
            return Err(ScsError::EmptyFamily);
        }
        let m = sets[0].len();
        if let Some(bad) = sets.iter().find(|s| s.len() != m) {
            return invalid(format!(
                "all sets must hold the same number of sequences ({m} vs {})",
                bad.len()
            ));
        }
        for seq in sets.iter().flatten() {
            seq.expect_domain(Domain::Time)?;
            if seq.len() != constraint.length() {
                return Err(ScsError::LengthMismatch {
                    left: seq.len(),
                    right: constraint.length(),
                });
            }
        }
        if alphabet_order == Some(0) {
            return invalid("alphabet order must be positive");
        }
        Ok(Self {
            sets,
            constraint,
            alphabet_order,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn sets(&self) -> &[Vec<ComplexSeq>] {
        &self.sets
    }

    pub fn constraint(&self) -> &SpectralConstraint {
        &self.constraint
    }

    pub fn alphabet_order(&self) -> Option<u32> {
        self.alphabet_order
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// L
    pub fn length(&self) -> usize {
        self.constraint.length()
    }

    /// K
    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    /// M
    pub fn set_size(&self) -> usize {
        self.sets[0].len()
    }

    pub fn total_sequences(&self) -> usize {
        self.num_sets() * self.set_size()
    }

    /// All members in (set, index) order.
    pub fn members(&self) -> impl Iterator<Item = &ComplexSeq> {
        self.sets.iter().flatten()
    }

    /// Replace one member; the replacement must keep the family's shape.
    pub fn with_member(&self, set: usize, index: usize, seq: ComplexSeq) -> Result<Self> {
        if set >= self.num_sets() || index >= self.set_size() {
            return invalid(format!("no member ({set}, {index})"));
        }
        let mut sets = self.sets.clone();
        sets[set][index] = seq;
        let mut out = Self::new(sets, self.constraint.clone(), self.alphabet_order)?;
        out.provenance = self.provenance.clone();
        Ok(out)
    }
}

/// θ(τ) for τ = 0..L−1.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationProfile {
    values: Vec<Complex64>,
}

impl CorrelationProfile {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, tau: usize) -> Complex64 {
        self.values[tau % self.values.len()]
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// max |θ(τ)| over τ in `range`, clipped to the profile length.
    pub fn max_magnitude(&self, range: std::ops::Range<usize>) -> f64 {
        let end = range.end.min(self.values.len());
        self.values[range.start.min(end)..end]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Correlation figures of merit for one set over a shift window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    pub theta_a: f64,
    pub theta_c: f64,
    pub theta_max: f64,
    pub window: usize,
    pub zcz_width: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(len: usize) -> ComplexSeq {
        ComplexSeq::time(vec![Complex64::new(1.0, 0.0); len]).unwrap()
    }

    #[test]
    fn energy_of_all_ones() {
        assert_eq!(energy(&ones(8)), 8.0);
    }

    #[test]
    fn empty_sequence_rejected() {
        assert!(ComplexSeq::time(vec![]).is_err());
    }

    #[test]
    fn constraint_needs_an_admissible_carrier() {
        assert!(SpectralConstraint::new(3, [0, 1, 2]).is_err());
        assert!(SpectralConstraint::new(3, [3]).is_err());
        let c = SpectralConstraint::new(4, [2, 0]).unwrap();
        assert_eq!(c.marking_vector(), vec![0, 1, 0, 1]);
        assert_eq!(c.forbidden_vec(), vec![0, 2]);
        assert_eq!(c.admissible_power(), 2.0);
    }

    #[test]
    fn family_rejects_mixed_lengths_and_domains() {
        let c = SpectralConstraint::unconstrained(4).unwrap();
        assert!(ScsFamily::new(vec![vec![ones(4)], vec![ones(5)]], c.clone(), None).is_err());
        let f = ComplexSeq::frequency(vec![Complex64::new(1.0, 0.0); 4]).unwrap();
        assert!(matches!(
            ScsFamily::new(vec![vec![f]], c.clone(), None),
            Err(ScsError::WrongDomain { .. })
        ));
        assert!(matches!(
            ScsFamily::new(vec![], c.clone(), None),
            Err(ScsError::EmptyFamily)
        ));
        let fam = ScsFamily::new(vec![vec![ones(4), ones(4)]], c, Some(2)).unwrap();
        assert_eq!((fam.num_sets(), fam.set_size(), fam.length()), (1, 2, 4));
    }
}
