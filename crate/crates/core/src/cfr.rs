//! Circular Florentine rectangles.
//!
//! An r×N array whose rows are permutations of Z_N such that, for every
//! nonzero cyclic step m, no ordered symbol pair (π(x), π(x+m)) occurs twice
//! across the whole array. The maximum row count F̃(N) is N−1 for prime N and
//! 1 for even N.

use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result, ScsError};

/// First way in which a candidate matrix fails the CFR axioms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CfrViolation {
    /// Row `row` repeats `symbol` (first at `first`, again at `second`).
    NotPermutation {
        row: usize,
        symbol: usize,
        first: usize,
        second: usize,
    },
    /// (π_i(x), π_i(x+m)) = (π_j(y), π_j(y+m)) with (i, x) ≠ (j, y).
    RepeatedPair {
        rows: (usize, usize),
        positions: (usize, usize),
        step: usize,
    },
}

impl fmt::Display for CfrViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CfrViolation::NotPermutation {
                row,
                symbol,
                first,
                second,
            } => write!(
                f,
                "row {row} repeats symbol {symbol} at positions {first} and {second}"
            ),
            CfrViolation::RepeatedPair {
                rows,
                positions,
                step,
            } => write!(
                f,
                "rows {} and {} share a pair at positions {} and {} for step {step}",
                rows.0, rows.1, positions.0, positions.1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CfrVerdict {
    Ok,
    Violation(CfrViolation),
}

impl CfrVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, CfrVerdict::Ok)
    }
}

fn check_shape(rows: &[Vec<usize>]) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Err(ScsError::MalformedCfr("no rows".into()));
    };
    let n = first.len();
    if n < 2 {
        return Err(ScsError::MalformedCfr(format!("order {n} is below 2")));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(ScsError::MalformedCfr(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        if let Some(&v) = row.iter().find(|&&v| v >= n) {
            return Err(ScsError::MalformedCfr(format!(
                "row {i} holds {v}, outside Z_{n}"
            )));
        }
    }
    Ok(n)
}

/// Checks both axioms in O(rN²) using a table keyed by (step, a, b).
///
/// Ragged or out-of-range input is an error; a well-formed matrix that is not
/// a CFR yields [`CfrVerdict::Violation`] carrying one concrete witness.
pub fn verify_cfr(rows: &[Vec<usize>]) -> Result<CfrVerdict> {
    let n = check_shape(rows)?;

    for (i, row) in rows.iter().enumerate() {
        let mut seen = vec![usize::MAX; n];
        for (x, &v) in row.iter().enumerate() {
            if seen[v] != usize::MAX {
                return Ok(CfrVerdict::Violation(CfrViolation::NotPermutation {
                    row: i,
                    symbol: v,
                    first: seen[v],
                    second: x,
                }));
            }
            seen[v] = x;
        }
    }

    // owner[(m, a, b)] = (row, position) that first produced the pair
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; n * n * n];
    for m in 1..n {
        for (i, row) in rows.iter().enumerate() {
            for x in 0..n {
                let key = (m * n + row[x]) * n + row[(x + m) % n];
                match owner[key] {
                    Some((j, y)) => {
                        return Ok(CfrVerdict::Violation(CfrViolation::RepeatedPair {
                            rows: (j, i),
                            positions: (y, x),
                            step: m,
                        }))
                    }
                    None => owner[key] = Some((i, x)),
                }
            }
        }
    }
    Ok(CfrVerdict::Ok)
}

/// A verified circular Florentine rectangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfr {
    order: usize,
    rows: Vec<Vec<usize>>,
}

impl Cfr {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        match verify_cfr(&rows)? {
            CfrVerdict::Ok => Ok(Self {
                order: rows[0].len(),
                rows,
            }),
            CfrVerdict::Violation(v) => Err(ScsError::MalformedCfr(v.to_string())),
        }
    }

    /// N
    pub fn order(&self) -> usize {
        self.order
    }

    /// r
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    /// Keep only the first `k` rows (any subset of rows is still a CFR).
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.num_rows() {
            return invalid(format!("cannot keep {k} of {} rows", self.num_rows()));
        }
        Ok(Self {
            order: self.order,
            rows: self.rows[..k].to_vec(),
        })
    }

    /// "N r" followed by one line per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.order, self.rows.len());
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// Parses and verifies the text format.
    pub fn from_text(text: &str) -> Result<Self> {
        Self::new(parse_cfr_text(text)?)
    }

    /// First 16 hex digits of SHA-256 over the canonical text form.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        hex::encode(&digest[..8])
    }
}

/// Reads the text format without checking the CFR axioms.
pub fn parse_cfr_text(text: &str) -> Result<Vec<Vec<usize>>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| ScsError::MalformedCfr("empty input".into()))?;
    let dims = parse_numbers(header)?;
    let [n, r] = dims[..] else {
        return Err(ScsError::MalformedCfr(format!(
            "header must be \"N r\", got {header:?}"
        )));
    };
    let rows = lines.map(parse_numbers).collect::<Result<Vec<_>>>()?;
    if rows.len() != r {
        return Err(ScsError::MalformedCfr(format!(
            "header announces {r} rows, found {}",
            rows.len()
        )));
    }
    if let Some(row) = rows.iter().find(|row| row.len() != n) {
        return Err(ScsError::MalformedCfr(format!(
            "header announces {n} columns, found a row of {}",
            row.len()
        )));
    }
    Ok(rows)
}

fn parse_numbers(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| ScsError::MalformedCfr(format!("not a nonnegative integer: {tok:?}")))
        })
        .collect()
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The multiplication table of Z_p without its all-zero row: row k−1 is
/// x ↦ kx mod p for k = 1..p−1.
pub fn cfr_from_prime(p: usize) -> Result<Cfr> {
    if p.is_multiple_of(2) || !is_prime(p) {
        return invalid(format!("{p} is not an odd prime"));
    }
    let rows = (1..p)
        .map(|k| (0..p).map(|x| k * x % p).collect())
        .collect();
    Ok(Cfr { order: p, rows })
}

/// |{t : π_i(t) = π_j(t + shift mod N)}|, which is exactly 1 for distinct
/// rows of a CFR.
pub fn shift_coincidences(cfr: &Cfr, i: usize, j: usize, shift: usize) -> Result<usize> {
    let n = cfr.order();
    if i >= cfr.num_rows() || j >= cfr.num_rows() {
        return invalid(format!("row index out of range ({i}, {j})"));
    }
    if i == j {
        return invalid("rows must be distinct");
    }
    let (a, b) = (cfr.row(i), cfr.row(j));
    Ok((0..n).filter(|&t| a[t] == b[(t + shift) % n]).count())
}

/// Row-wise inverses g_{i,j} = π_i⁻¹(j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseRows {
    order: usize,
    rows: Vec<Vec<usize>>,
}

impl InverseRows {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    /// π_i⁻¹ − π_j⁻¹ (mod N), pointwise.
    pub fn difference(&self, i: usize, j: usize) -> Vec<usize> {
        let n = self.order;
        self.rows[i]
            .iter()
            .zip(&self.rows[j])
            .map(|(&a, &b)| (a + n - b) % n)
            .collect()
    }

    pub fn difference_is_permutation(&self, i: usize, j: usize) -> bool {
        let mut seen = vec![false; self.order];
        self.difference(i, j)
            .into_iter()
            .all(|d| !std::mem::replace(&mut seen[d], true))
    }
}

pub fn inverse_rows(cfr: &Cfr) -> InverseRows {
    let n = cfr.order();
    let rows = cfr
        .rows()
        .iter()
        .map(|row| {
            let mut inv = vec![0; n];
            for (x, &v) in row.iter().enumerate() {
                inv[v] = x;
            }
            inv
        })
        .collect();
    InverseRows { order: n, rows }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Cfr),
    /// The whole (symmetry-reduced) space was explored; no such CFR exists.
    Exhausted,
    /// Node budget ran out before a decision.
    BudgetHit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub nodes: u64,
}

/// Largest order [`search_cfr`] accepts (one machine word per symbol set).
pub const MAX_SEARCH_ORDER: usize = 64;

/// Depth-first search for an r×N CFR.
///
/// Row 0 is fixed to the identity and every row starts with 0 (symbol
/// relabeling and cyclic row shifts preserve the axioms). Rows 1.. are kept in
/// increasing order of their second entry. Candidates are tried in ascending
/// order, so the first solution is the lexicographically smallest canonical
/// one. Each successful placement counts as one node.
pub fn search_cfr(n: usize, rows: usize, node_budget: u64) -> Result<SearchReport> {
    if !(2..=MAX_SEARCH_ORDER).contains(&n) {
        return invalid(format!(
            "search order must lie in 2..={MAX_SEARCH_ORDER}, got {n}"
        ));
    }
    if rows == 0 {
        return invalid("row count must be at least 1");
    }
    let mut search = Search {
        table: PairTable {
            n,
            forward: vec![0; n * n],
            reverse: vec![0; n * n],
        },
        target: rows,
        budget: node_budget,
        nodes: 0,
        rows: Vec::with_capacity(rows),
        current: Vec::with_capacity(n),
        in_row: 0,
        domains: vec![0; n],
        saved: vec![0; rows * n * n],
    };
    let mut identity = Vec::with_capacity(n);
    for v in 0..n {
        search.table.set(&identity, v);
        identity.push(v);
    }
    search.rows.push(identity);
    let outcome = match search.run_row(1) {
        Step::Found => SearchOutcome::Found(Cfr {
            order: n,
            rows: search.rows,
        }),
        Step::Exhausted => SearchOutcome::Exhausted,
        Step::Budget => SearchOutcome::BudgetHit,
    };
    Ok(SearchReport {
        outcome,
        nodes: search.nodes,
    })
}

enum Step {
    Found,
    Exhausted,
    Budget,
}

/// Used ordered pairs per cyclic step, as bitmasks.
///
/// `forward[s·N + a]` holds every b with (s, a, b) used and
/// `reverse[s·N + b]` every a with (s, a, b) used.
struct PairTable {
    n: usize,
    forward: Vec<u64>,
    reverse: Vec<u64>,
}

impl PairTable {
    fn toggle(&mut self, prefix: &[usize], v: usize) {
        let n = self.n;
        let x = prefix.len();
        for (y, &a) in prefix.iter().enumerate() {
            let d = x - y;
            let e = n - d;
            // (d, a, v) and (N − d, v, a)
            self.forward[d * n + a] ^= 1 << v;
            self.reverse[d * n + v] ^= 1 << a;
            self.forward[e * n + v] ^= 1 << a;
            self.reverse[e * n + a] ^= 1 << v;
        }
    }

    fn set(&mut self, prefix: &[usize], v: usize) {
        self.toggle(prefix, v);
    }

    fn clear(&mut self, prefix: &[usize], v: usize) {
        self.toggle(prefix, v);
    }
}

struct Search {
    table: PairTable,
    target: usize,
    budget: u64,
    nodes: u64,
    rows: Vec<Vec<usize>>,
    current: Vec<usize>,
    in_row: u64,
    /// Symbols still allowed at each position of the row being built.
    domains: Vec<u64>,
    /// Domains saved before each placement, N words per (row, position).
    saved: Vec<u64>,
}

impl Search {
    fn full(&self) -> u64 {
        let n = self.table.n;
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    /// Removes from every open position z > x what `v` at x rules out.
    /// Returns false when some position or some unplaced symbol is left
    /// without options.
    fn propagate(&mut self, x: usize, v: usize) -> bool {
        let n = self.table.n;
        let mut union = 0;
        for z in x + 1..n {
            let d = z - x;
            let banned =
                (1 << v) | self.table.forward[d * n + v] | self.table.reverse[(n - d) * n + v];
            self.domains[z] &= !banned;
            if self.domains[z] == 0 {
                return false;
            }
            union |= self.domains[z];
        }
        let unplaced = self.full() & !self.in_row;
        union & unplaced == unplaced
    }

    fn run_row(&mut self, i: usize) -> Step {
        if i == self.target {
            return Step::Found;
        }
        let n = self.table.n;
        self.current = vec![0];
        self.in_row = 1;
        self.domains = vec![self.full(); n];
        if !self.propagate(0, 0) {
            return Step::Exhausted;
        }
        let floor = if i >= 2 { self.rows[i - 1][1] + 1 } else { 1 };
        self.domains[1] &= !((1u64 << floor) - 1);
        self.run_position(i)
    }

    fn run_position(&mut self, i: usize) -> Step {
        let n = self.table.n;
        let x = self.current.len();
        if x == n {
            let row = std::mem::take(&mut self.current);
            let in_row = self.in_row;
            let domains = std::mem::take(&mut self.domains);
            self.rows.push(row);
            let step = self.run_row(i + 1);
            if matches!(step, Step::Found) {
                return step;
            }
            self.current = self.rows.pop().expect("row pushed above");
            self.in_row = in_row;
            self.domains = domains;
            return step;
        }
        let mut pool = self.domains[x];
        while pool != 0 {
            let v = pool.trailing_zeros() as usize;
            pool &= pool - 1;
            if self.nodes >= self.budget {
                return Step::Budget;
            }
            self.nodes += 1;
            let slot = (i * n + x) * n;
            self.saved[slot..slot + n].copy_from_slice(&self.domains);
            self.table.set(&self.current, v);
            self.current.push(v);
            self.in_row |= 1 << v;

            let step = if self.propagate(x, v) {
                self.run_position(i)
            } else {
                Step::Exhausted
            };
            if matches!(step, Step::Found) {
                return step;
            }

            self.in_row &= !(1 << v);
            self.current.pop();
            self.table.clear(&self.current, v);
            self.domains.copy_from_slice(&self.saved[slot..slot + n]);
            if matches!(step, Step::Budget) {
                return step;
            }
        }
        Step::Exhausted
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// O(r²N³) pair check straight from the axiom statement.
    fn brute_force_is_cfr(rows: &[Vec<usize>]) -> bool {
        let n = rows[0].len();
        let perms = rows.iter().all(|r| {
            let mut s = r.clone();
            s.sort_unstable();
            s == (0..n).collect::<Vec<_>>()
        });
        if !perms {
            return false;
        }
        for m in 1..n {
            for i in 0..rows.len() {
                for j in 0..rows.len() {
                    for x in 0..n {
                        for y in 0..n {
                            if (i, x) == (j, y) {
                                continue;
                            }
                            if rows[i][x] == rows[j][y]
                                && rows[i][(x + m) % n] == rows[j][(y + m) % n]
                            {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn prime_tables() {
        let c3 = cfr_from_prime(3).unwrap();
        assert_eq!(c3.rows(), &[vec![0, 1, 2], vec![0, 2, 1]]);
        let c5 = cfr_from_prime(5).unwrap();
        assert_eq!(
            c5.rows(),
            &[
                vec![0, 1, 2, 3, 4],
                vec![0, 2, 4, 1, 3],
                vec![0, 3, 1, 4, 2],
                vec![0, 4, 3, 2, 1]
            ]
        );
        for p in [3, 5, 7, 11] {
            let c = cfr_from_prime(p).unwrap();
            assert_eq!(c.num_rows(), p - 1);
            assert!(brute_force_is_cfr(c.rows()));
            assert!(verify_cfr(c.rows()).unwrap().is_ok());
        }
        assert!(cfr_from_prime(2).is_err());
        assert!(cfr_from_prime(9).is_err());
        assert!(cfr_from_prime(4).is_err());
    }

    #[test]
    fn duplicate_rows_violate() {
        let v = verify_cfr(&[vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        match v {
            CfrVerdict::Violation(CfrViolation::RepeatedPair { rows, .. }) => {
                assert_ne!(rows.0, rows.1)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_permutation_reported() {
        let v = verify_cfr(&[vec![0, 0, 2]]).unwrap();
        assert!(matches!(
            v,
            CfrVerdict::Violation(CfrViolation::NotPermutation {
                row: 0,
                symbol: 0,
                ..
            })
        ));
    }

    #[test]
    fn malformed_input_rejected() {
        assert!(verify_cfr(&[vec![0, 1, 2], vec![0, 1]]).is_err());
        assert!(verify_cfr(&[vec![0, 1, 3]]).is_err());
        assert!(verify_cfr(&[]).is_err());
        assert!(parse_cfr_text("3 2\n0 1 2\n").is_err());
        assert!(parse_cfr_text("3 1\n0 1 x\n").is_err());
        assert!(parse_cfr_text("").is_err());
    }

    #[test]
    fn verify_agrees_with_brute_force_on_small_matrices() {
        // every pair of permutations of Z_5 starting with 0
        let perms = permutations_from_zero(5);
        for a in &perms {
            for b in &perms {
                let rows = vec![a.clone(), b.clone()];
                assert_eq!(
                    verify_cfr(&rows).unwrap().is_ok(),
                    brute_force_is_cfr(&rows),
                    "{rows:?}"
                );
            }
        }
    }

    fn permutations_from_zero(n: usize) -> Vec<Vec<usize>> {
        fn rec(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for v in 0..n {
                if !cur.contains(&v) {
                    cur.push(v);
                    rec(n, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(n, &mut vec![0], &mut out);
        out
    }

    #[test]
    fn lemma4_counts_on_z3() {
        let c = cfr_from_prime(3).unwrap();
        for shift in 0..3 {
            assert_eq!(shift_coincidences(&c, 0, 1, shift).unwrap(), 1);
            assert_eq!(shift_coincidences(&c, 1, 0, shift).unwrap(), 1);
        }
        assert!(shift_coincidences(&c, 1, 1, 0).is_err());
    }

    #[test]
    fn inverse_of_doubling_mod5() {
        let c = cfr_from_prime(5).unwrap();
        let inv = inverse_rows(&c);
        assert_eq!(inv.row(0), &[0, 1, 2, 3, 4]);
        assert_eq!(inv.row(1), &[0, 3, 1, 4, 2]);
        for (row, irow) in c.rows().iter().zip(inv.rows()) {
            for j in 0..5 {
                assert_eq!(row[irow[j]], j);
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(inv.difference_is_permutation(i, j));
                }
            }
        }
    }

    #[test]
    fn text_round_trip_and_fingerprint() {
        let c = cfr_from_prime(5).unwrap();
        let text = c.to_text();
        assert!(text.starts_with("5 4\n0 1 2 3 4\n"));
        let back = Cfr::from_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.fingerprint(), c.fingerprint());
        assert_eq!(c.fingerprint().len(), 16);
        assert_ne!(c.fingerprint(), cfr_from_prime(7).unwrap().fingerprint());
    }

    #[test]
    fn search_small_cases() {
        let r = search_cfr(9, 2, 1_000_000).unwrap();
        let SearchOutcome::Found(c) = r.outcome else {
            panic!("expected a 2x9 CFR, got {:?}", r.outcome)
        };
        assert_eq!(c.num_rows(), 2);
        assert!(brute_force_is_cfr(c.rows()));
        assert_eq!(c.row(0), &(0..9).collect::<Vec<_>>()[..]);
        assert!(c.rows().iter().all(|row| row[0] == 0));

        assert_eq!(
            search_cfr(3, 3, 1_000_000).unwrap().outcome,
            SearchOutcome::Exhausted
        );
        assert_eq!(
            search_cfr(4, 2, 1_000_000).unwrap().outcome,
            SearchOutcome::Exhausted
        );
        assert_eq!(
            search_cfr(9, 2, 3).unwrap().outcome,
            SearchOutcome::BudgetHit
        );
    }

    #[test]
    fn search_is_deterministic() {
        let a = search_cfr(7, 4, 100_000).unwrap();
        let b = search_cfr(7, 4, 100_000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn truncation_keeps_validity() {
        let c = cfr_from_prime(7).unwrap().truncated(3).unwrap();
        assert_eq!(c.num_rows(), 3);
        assert!(verify_cfr(c.rows()).unwrap().is_ok());
        assert!(cfr_from_prime(7).unwrap().truncated(7).is_err());
    }
}
