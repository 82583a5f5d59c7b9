//! SCS families from circular Florentine rectangles.
//!
//! The time-domain construction writes sequences directly. The other three
//! go through a common frequency-domain framework. Each CFR row gives an
//! N×P base matrix with zero columns at an insert set I ⊂ Z_P, and the rows
//! of that matrix are concatenated into a length-NP spectrum.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cfr::{inverse_rows, is_prime, Cfr, InverseRows};
use crate::error::{invalid, Result, ScsError};
use crate::sequence::{ComplexSeq, Provenance, ScsFamily, SpectralConstraint};
use crate::spectral::{idft, root_of_unity, worst_modulus_error};
use crate::tol;

fn require_odd(cfr: &Cfr) -> Result<()> {
    if cfr.order().is_multiple_of(2) {
        return invalid(format!(
            "CFR order N = {} is even; circular Florentine rectangles with more than one row need odd N",
            cfr.order()
        ));
    }
    Ok(())
}

/// r singleton sets, c^m_i = ω_{N+1}^{π_m(i mod N)·i}, L = N(N+1).
pub fn construction1(cfr: &Cfr) -> Result<ScsFamily> {
    require_odd(cfr)?;
    let n = cfr.order();
    let q = n + 1;
    let l = n * q;
    let sets = cfr
        .rows()
        .iter()
        .map(|row| {
            let values = (0..l)
                .map(|i| root_of_unity(((row[i % n] * i) % q) as i64, q))
                .collect();
            ComplexSeq::time(values).map(|s| vec![s])
        })
        .collect::<Result<Vec<_>>>()?;
    let omega = SpectralConstraint::new(l, (0..n).map(|a| 1 + a * q))?;
    Ok(
        ScsFamily::new(sets, omega, Some(q as u32))?.with_provenance(Provenance {
            construction: "c1".into(),
            n,
            cfr_fingerprint: cfr.fingerprint(),
            ..Provenance::default()
        }),
    )
}

/// Order N, insert set I and the derived P = N + |I|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameworkParams {
    n: usize,
    period: usize,
    insert: BTreeSet<usize>,
    admissible: Vec<usize>,
}

impl FrameworkParams {
    pub fn new(n: usize, insert: impl IntoIterator<Item = usize>) -> Result<Self> {
        let insert: BTreeSet<usize> = insert.into_iter().collect();
        if n == 0 {
            return invalid("N must be positive");
        }
        if insert.is_empty() {
            return invalid("the insert set must hold at least one column");
        }
        let period = n + insert.len();
        if let Some(&bad) = insert.iter().find(|&&s| s >= period) {
            return invalid(format!(
                "insert column {bad} outside Z_P with P = N + |I| = {period}"
            ));
        }
        let admissible = (0..period).filter(|k| !insert.contains(k)).collect();
        Ok(Self {
            n,
            period,
            insert,
            admissible,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// T = |I|
    pub fn t(&self) -> usize {
        self.insert.len()
    }

    /// P = N + T
    pub fn period(&self) -> usize {
        self.period
    }

    /// L = N·P
    pub fn length(&self) -> usize {
        self.n * self.period
    }

    pub fn insert_set(&self) -> impl Iterator<Item = usize> + '_ {
        self.insert.iter().copied()
    }

    /// l_0 < … < l_{N−1}, the columns outside I.
    pub fn admissible_columns(&self) -> &[usize] {
        &self.admissible
    }

    /// Ω = {s + aP : s ∈ I, a ∈ Z_N}
    pub fn constraint(&self) -> Result<SpectralConstraint> {
        let p = self.period;
        SpectralConstraint::new(
            self.length(),
            (0..self.n).flat_map(|a| self.insert.iter().map(move |s| s + a * p)),
        )
    }
}

/// An N×P base matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl BaseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return invalid(format!(
                "a {rows}×{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            ));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * self.cols + k]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Columns whose entries are all exactly zero.
    pub fn zero_columns(&self) -> Vec<usize> {
        (0..self.cols)
            .filter(|&k| (0..self.rows).all(|j| self.get(j, k) == Complex64::new(0.0, 0.0)))
            .collect()
    }
}

/// An N×N matrix with unimodular entries and H·H* = N·I, i.e. √N times a
/// unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix {
    rows: Vec<Vec<Complex64>>,
    descriptor: String,
}

impl OrthogonalMatrix {
    /// h_{c,t} = e^{−2πi·ct/N}
    pub fn dft(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("matrix order must be positive");
        }
        let rows = (0..n)
            .map(|c| {
                (0..n)
                    .map(|t| root_of_unity(-((c * t % n) as i64), n))
                    .collect()
            })
            .collect();
        Ok(Self {
            rows,
            descriptor: "dft".into(),
        })
    }

    /// Accepts any square matrix whose entries share one magnitude and whose
    /// rows are mutually orthogonal (Gram deviation at most 1e−9 relative).
    /// The matrix is rescaled to unimodular entries, so a normalized DFT
    /// matrix and its unnormalized form give the same result.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return invalid("orthogonal matrix must be square and non-empty");
        }
        let scale = rows[0][0].norm();
        if !(scale.is_finite() && scale > 0.0) {
            return Err(ScsError::NotOrthogonal {
                deviation: f64::INFINITY,
            });
        }
        let rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|v| v / scale).collect())
            .collect();
        let mut deviation: f64 = 0.0;
        for r in &rows {
            for v in r {
                deviation = deviation.max((v.norm() - 1.0).abs());
            }
        }
        for (a, ra) in rows.iter().enumerate() {
            for (b, rb) in rows.iter().enumerate() {
                let dot: Complex64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
                let target = if a == b { n as f64 } else { 0.0 };
                deviation = deviation.max((dot - target).norm() / n as f64);
            }
        }
        if deviation > 1e-9 {
            return Err(ScsError::NotOrthogonal { deviation });
        }
        let mut hasher = Sha256::new();
        for v in rows.iter().flatten() {
            hasher.update(v.re.to_le_bytes());
            hasher.update(v.im.to_le_bytes());
        }
        let descriptor = format!("custom:{}", hex::encode(&hasher.finalize()[..8]));
        Ok(Self { rows, descriptor })
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, c: usize) -> &[Complex64] {
        &self.rows[c]
    }

    /// "dft" or "custom:<hash>".
    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }
}

/// How base-matrix entries are decorated beyond √(P/N)·ω_N^{j·g_{i,t}}.
#[derive(Clone, Copy, Debug)]
pub enum BaseVariant<'a> {
    /// Phase twist ω_{NP}^{l_t·g_{i,t}} (single or multiple inserted columns).
    Twisted,
    /// Column t scaled by h_{c,t}; one matrix per row c of H.
    Hadamard(&'a OrthogonalMatrix),
}

fn base_matrix(
    g: &[usize],
    params: &FrameworkParams,
    h_row: Option<&[Complex64]>,
) -> Result<BaseMatrix> {
    let (n, p) = (params.n(), params.period());
    let amp = (p as f64 / n as f64).sqrt();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * p];
    for (t, &l_t) in params.admissible_columns().iter().enumerate() {
        let decoration = match h_row {
            None => root_of_unity(((l_t * g[t]) % (n * p)) as i64, n * p),
            Some(h) => h[t],
        };
        for j in 0..n {
            entries[j * p + l_t] = amp * root_of_unity(((j * g[t]) % n) as i64, n) * decoration;
        }
    }
    BaseMatrix::new(n, p, entries)
}

/// Base matrices for every CFR row, in row order; with [`BaseVariant::Hadamard`]
/// the N matrices of row i are listed by c before those of row i+1.
pub fn build_base_matrices(
    inv: &InverseRows,
    params: &FrameworkParams,
    variant: BaseVariant<'_>,
) -> Result<Vec<BaseMatrix>> {
    if inv.order() != params.n() {
        return invalid(format!(
            "CFR order {} does not match framework order {}",
            inv.order(),
            params.n()
        ));
    }
    match variant {
        BaseVariant::Twisted => inv
            .rows()
            .par_iter()
            .map(|g| base_matrix(g, params, None))
            .collect(),
        BaseVariant::Hadamard(h) => {
            if h.order() != params.n() {
                return invalid(format!(
                    "orthogonal matrix order {} does not match N = {}",
                    h.order(),
                    params.n()
                ));
            }
            inv.rows()
                .par_iter()
                .flat_map_iter(|g| {
                    (0..h.order()).map(move |c| base_matrix(g, params, Some(h.row(c))))
                })
                .collect()
        }
    }
}

/// û_{Pr+s} = b_{r,s}: the rows of the base matrix laid end to end.
pub fn interleave(base: &BaseMatrix) -> Result<ComplexSeq> {
    ComplexSeq::frequency(base.entries.clone())
}

/// Frequency-domain family produced by the framework.
#[derive(Clone, Debug)]
pub struct FrequencyFamily {
    pub sets: Vec<Vec<ComplexSeq>>,
    pub constraint: SpectralConstraint,
    pub alphabet_order: Option<u32>,
    pub provenance: Provenance,
    /// Whether every time-domain member must be unimodular.
    pub expect_unimodular: bool,
}

/// Inverse-transform every member. When the family claims unimodularity,
/// the worst |u_t| is checked against 1 within the default zero tolerance.
pub fn to_time_domain(freq: FrequencyFamily) -> Result<ScsFamily> {
    let sets: Vec<Vec<ComplexSeq>> = freq
        .sets
        .par_iter()
        .map(|set| set.iter().map(idft).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    if freq.expect_unimodular {
        for (index, seq) in sets.iter().flatten().enumerate() {
            let (position, err) = worst_modulus_error(seq);
            if err > tol::ZERO {
                return Err(ScsError::NotUnimodular {
                    index,
                    position,
                    magnitude: seq.values()[position].norm(),
                });
            }
        }
    }
    Ok(
        ScsFamily::new(sets, freq.constraint, freq.alphabet_order)?
            .with_provenance(freq.provenance),
    )
}

fn twisted_family(
    cfr: &Cfr,
    params: FrameworkParams,
    name: &str,
    s0: Option<usize>,
) -> Result<ScsFamily> {
    require_odd(cfr)?;
    let bases = build_base_matrices(&inverse_rows(cfr), &params, BaseVariant::Twisted)?;
    let sets = bases
        .iter()
        .map(|b| interleave(b).map(|s| vec![s]))
        .collect::<Result<Vec<_>>>()?;
    to_time_domain(FrequencyFamily {
        sets,
        constraint: params.constraint()?,
        alphabet_order: Some(params.period() as u32),
        provenance: Provenance {
            construction: name.into(),
            n: params.n(),
            t: Some(params.t()),
            insert: Some(params.insert_set().collect()),
            s0,
            cfr_fingerprint: cfr.fingerprint(),
            orthogonal_matrix: None,
        },
        expect_unimodular: true,
    })
}

/// One inserted zero column at s0 ∈ Z_{N+1}; unimodular sequences over the
/// P-th roots of unity, θ_max = N+1.
pub fn construction2(cfr: &Cfr, s0: usize) -> Result<ScsFamily> {
    if s0 > cfr.order() {
        return invalid(format!("s0 = {s0} outside Z_{}", cfr.order() + 1));
    }
    twisted_family(
        cfr,
        FrameworkParams::new(cfr.order(), [s0])?,
        "c2",
        Some(s0),
    )
}

/// Arbitrary insert set I; θ_c = P, θ_a = P√(N−λ) when Z_P∖I is a
/// (P, N, λ) cyclic difference set.
pub fn construction3(cfr: &Cfr, insert: &[usize]) -> Result<ScsFamily> {
    twisted_family(
        cfr,
        FrameworkParams::new(cfr.order(), insert.iter().copied())?,
        "c3",
        None,
    )
}

/// K sets of N sequences, one per row of H; each set is a ZCZ set of width
/// N and sequences from different sets correlate with magnitude P at every
/// shift. `h` defaults to the order-N DFT matrix and `k` to every CFR row.
pub fn construction4(
    cfr: &Cfr,
    h: Option<&OrthogonalMatrix>,
    insert: &[usize],
    k: Option<usize>,
) -> Result<ScsFamily> {
    require_odd(cfr)?;
    let n = cfr.order();
    let k = k.unwrap_or(cfr.num_rows());
    if k == 0 || k > cfr.num_rows() {
        return invalid(format!("K = {k} must lie in 1..={}", cfr.num_rows()));
    }
    let default_h;
    let h = match h {
        Some(h) => h,
        None => {
            default_h = OrthogonalMatrix::dft(n)?;
            &default_h
        }
    };
    let params = FrameworkParams::new(n, insert.iter().copied())?;
    let cfr = cfr.truncated(k)?;
    let bases = build_base_matrices(&inverse_rows(&cfr), &params, BaseVariant::Hadamard(h))?;
    let sets = bases
        .chunks(n)
        .map(|chunk| chunk.iter().map(interleave).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let is_dft = h.descriptor() == "dft";
    to_time_domain(FrequencyFamily {
        sets,
        constraint: params.constraint()?,
        alphabet_order: is_dft.then_some((n * params.period()) as u32),
        provenance: Provenance {
            construction: "c4".into(),
            n,
            t: Some(params.t()),
            insert: Some(params.insert_set().collect()),
            s0: (params.t() == 1).then(|| params.insert_set().next().unwrap_or(0)),
            cfr_fingerprint: cfr.fingerprint(),
            orthogonal_matrix: Some(h.descriptor().to_string()),
        },
        expect_unimodular: is_dft,
    })
}

/// D ⊂ Z_v with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicDifferenceSet {
    pub modulus: usize,
    pub elements: Vec<usize>,
    pub k: usize,
    pub lambda: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferenceSetCheck {
    pub is_ds: bool,
    pub k: usize,
    /// The common value of d_D(ε) when it is constant.
    pub lambda: Option<usize>,
    /// d_D(ε) = |(ε + D) ∩ D| for ε = 1..v−1.
    pub counts: Vec<usize>,
}

pub fn verify_difference_set(d: &[usize], v: usize) -> Result<DifferenceSetCheck> {
    let set: BTreeSet<usize> = d.iter().copied().collect();
    if set.is_empty() || v == 0 {
        return invalid("difference set and modulus must be non-empty");
    }
    if let Some(&bad) = set.iter().find(|&&x| x >= v) {
        return invalid(format!("element {bad} outside Z_{v}"));
    }
    let counts: Vec<usize> = (1..v)
        .map(|e| {
            set.iter()
                .filter(|&&x| set.contains(&((x + e) % v)))
                .count()
        })
        .collect();
    let lambda = match counts.first() {
        Some(&first) if counts.iter().all(|&c| c == first) => Some(first),
        None => Some(0),
        _ => None,
    };
    Ok(DifferenceSetCheck {
        is_ds: lambda.is_some(),
        k: set.len(),
        lambda,
        counts,
    })
}

/// Quadratic residues modulo a prime p ≡ 3 (mod 4): a (p, (p−1)/2, (p−3)/4)
/// difference set.
pub fn qr_difference_set(p: usize) -> Result<CyclicDifferenceSet> {
    if !is_prime(p) || p % 4 != 3 {
        return invalid(format!("{p} is not a prime congruent to 3 mod 4"));
    }
    let elements: BTreeSet<usize> = (1..p).map(|x| x * x % p).collect();
    Ok(CyclicDifferenceSet {
        modulus: p,
        k: elements.len(),
        lambda: (p - 3) / 4,
        elements: elements.into_iter().collect(),
    })
}

/// I = Z_P ∖ D, the insert set whose complement is the difference set D.
pub fn insert_set_from_difference_set(ds: &CyclicDifferenceSet) -> Vec<usize> {
    (0..ds.modulus)
        .filter(|x| ds.elements.binary_search(x).is_err())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfr::cfr_from_prime;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn interleave_concatenates_rows() {
        let (x, y, u, v) = (c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, 2.0));
        let z = c(0.0, 0.0);
        let b = BaseMatrix::new(2, 3, vec![x, z, y, u, z, v]).unwrap();
        assert_eq!(b.zero_columns(), vec![1]);
        assert_eq!(interleave(&b).unwrap().values(), &[x, z, y, u, z, v]);
    }

    #[test]
    fn framework_params() {
        let p = FrameworkParams::new(5, [0, 2, 6, 7, 8, 10]).unwrap();
        assert_eq!((p.period(), p.length(), p.t()), (11, 55, 6));
        assert_eq!(p.admissible_columns(), &[1, 3, 4, 5, 9]);
        assert_eq!(p.constraint().unwrap().n(), 30);
        assert!(FrameworkParams::new(5, [6]).is_err());
        assert!(FrameworkParams::new(5, []).is_err());
    }

    #[test]
    fn base_matrix_shape() {
        let cfr = cfr_from_prime(3).unwrap();
        let params = FrameworkParams::new(3, [0]).unwrap();
        let bases =
            build_base_matrices(&inverse_rows(&cfr), &params, BaseVariant::Twisted).unwrap();
        assert_eq!(bases.len(), 2);
        for b in &bases {
            assert_eq!(b.zero_columns(), vec![0]);
            for k in 1..4 {
                for j in 0..3 {
                    assert!((b.get(j, k).norm() - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn even_order_rejected() {
        let cfr = Cfr::new(vec![vec![0, 1, 2, 3]]).unwrap();
        assert!(construction1(&cfr).is_err());
        assert!(construction2(&cfr, 0).is_err());
        assert!(construction3(&cfr, &[1]).is_err());
        assert!(construction4(&cfr, None, &[1], None).is_err());
    }

    #[test]
    fn s0_range() {
        let cfr = cfr_from_prime(3).unwrap();
        assert!(construction2(&cfr, 4).is_err());
        assert!(construction2(&cfr, 3).is_ok());
    }

    #[test]
    fn orthogonal_matrix_checks() {
        let h = OrthogonalMatrix::dft(5).unwrap();
        let scaled: Vec<Vec<Complex64>> = (0..5)
            .map(|r| h.row(r).iter().map(|v| v / 5f64.sqrt()).collect())
            .collect();
        let again = OrthogonalMatrix::from_rows(scaled).unwrap();
        for r in 0..5 {
            for (a, b) in again.row(r).iter().zip(h.row(r)) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        let bad = vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.5, 0.0)],
        ];
        assert!(matches!(
            OrthogonalMatrix::from_rows(bad),
            Err(ScsError::NotOrthogonal { .. })
        ));
        let hadamard = vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(-1.0, 0.0)],
        ];
        assert!(OrthogonalMatrix::from_rows(hadamard)
            .unwrap()
            .descriptor()
            .starts_with("custom:"));
    }

    #[test]
    fn difference_sets() {
        let r = verify_difference_set(&[1, 3, 4, 5, 9], 11).unwrap();
        assert_eq!((r.is_ds, r.k, r.lambda), (true, 5, Some(2)));
        let r = verify_difference_set(&[1, 2, 4], 7).unwrap();
        assert_eq!((r.is_ds, r.k, r.lambda), (true, 3, Some(1)));
        let r = verify_difference_set(&[0, 1], 5).unwrap();
        assert!(!r.is_ds);
        assert_eq!(&r.counts[..2], &[1, 0]);
        assert_eq!(qr_difference_set(11).unwrap().elements, vec![1, 3, 4, 5, 9]);
        assert_eq!(qr_difference_set(7).unwrap().elements, vec![1, 2, 4]);
        assert!(qr_difference_set(5).is_err());
        assert_eq!(
            insert_set_from_difference_set(&qr_difference_set(11).unwrap()),
            vec![0, 2, 6, 7, 8, 10]
        );
    }
}
