//! Periodic correlation lower bounds for spectrally constrained sequences
//! and certification of measured families against them.
//!
//! Notation: M sequences per set, length L, n forbidden carriers, window
//! L_CZ (written `window`), ZCZ width Z.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::sequence::ScsFamily;
use crate::spectral::{summarize, FamilySummary};
use crate::tol::Tolerances;

fn check_ln(l: usize, n: usize) -> Result<()> {
    if l == 0 {
        return invalid("L must be positive");
    }
    if n >= l {
        return invalid(format!("n = {n} must be smaller than L = {l}"));
    }
    Ok(())
}

/// |a − b| within `tol` relative to the larger magnitude (absolute near 0).
fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn at_least(measured: f64, bound: f64, tol: f64) -> bool {
    measured >= bound - tol * bound.abs().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TsaiCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// (L_CZ−1)θ_a² + (M−1)L_CZ·θ_c² + L² ≥ M·L²·L_CZ/(L−n).
pub fn tsai_check(
    theta_a: f64,
    theta_c: f64,
    l: usize,
    n: usize,
    m: usize,
    window: usize,
    tol: f64,
) -> Result<TsaiCheck> {
    check_ln(l, n)?;
    if window == 0 || m == 0 {
        return invalid("window and M must be positive");
    }
    let (lf, w, mf) = (l as f64, window as f64, m as f64);
    let lhs = (w - 1.0) * theta_a * theta_a + (mf - 1.0) * w * theta_c * theta_c + lf * lf;
    let rhs = mf * lf * lf * w / (lf - n as f64);
    Ok(TsaiCheck {
        lhs,
        rhs,
        satisfied: at_least(lhs, rhs, tol),
    })
}

/// The quantity left free in a design-space query on the Tsai relation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TsaiQuery {
    MinThetaA {
        theta_c: f64,
        m: usize,
        window: usize,
    },
    MinThetaC {
        theta_a: f64,
        m: usize,
        window: usize,
    },
    MaxSetSize {
        theta_a: f64,
        theta_c: f64,
        window: usize,
    },
    MaxWindow {
        theta_a: f64,
        theta_c: f64,
        m: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum TsaiLimit {
    /// The free correlation value must be at least this.
    AtLeast(f64),
    /// The free count can be at most this.
    AtMost(usize),
    /// No finite cap on the free count.
    Unbounded,
    /// The other three values already violate the relation for every choice
    /// of the free one (only possible when the free term has a zero weight).
    Infeasible,
}

/// Solve the Tsai relation for the one quantity not supplied.
pub fn tsai_solve(l: usize, n: usize, query: TsaiQuery) -> Result<TsaiLimit> {
    check_ln(l, n)?;
    let lf = l as f64;
    let l2 = lf * lf;
    let ratio = l2 / (lf - n as f64);
    Ok(match query {
        TsaiQuery::MinThetaA { theta_c, m, window } => {
            let (mf, w) = (m as f64, window as f64);
            let need = mf * ratio * w - l2 - (mf - 1.0) * w * theta_c * theta_c;
            if window <= 1 {
                if need <= 0.0 {
                    TsaiLimit::AtLeast(0.0)
                } else {
                    TsaiLimit::Infeasible
                }
            } else {
                TsaiLimit::AtLeast((need / (w - 1.0)).max(0.0).sqrt())
            }
        }
        TsaiQuery::MinThetaC { theta_a, m, window } => {
            let (mf, w) = (m as f64, window as f64);
            let need = mf * ratio * w - l2 - (w - 1.0) * theta_a * theta_a;
            if m <= 1 {
                if need <= 0.0 {
                    TsaiLimit::AtLeast(0.0)
                } else {
                    TsaiLimit::Infeasible
                }
            } else {
                TsaiLimit::AtLeast((need / ((mf - 1.0) * w)).max(0.0).sqrt())
            }
        }
        TsaiQuery::MaxSetSize {
            theta_a,
            theta_c,
            window,
        } => {
            // M·(L²Z/(L−n) − Zθ_c²) ≤ (Z−1)θ_a² − Zθ_c² + L²
            let w = window as f64;
            let per_m = ratio * w - w * theta_c * theta_c;
            let budget = (w - 1.0) * theta_a * theta_a - w * theta_c * theta_c + l2;
            if per_m <= 0.0 {
                TsaiLimit::Unbounded
            } else if budget < per_m {
                TsaiLimit::Infeasible
            } else {
                TsaiLimit::AtMost(floor_with_slack(budget / per_m))
            }
        }
        TsaiQuery::MaxWindow {
            theta_a,
            theta_c,
            m,
        } => {
            // Z·(M·L²/(L−n) − θ_a² − (M−1)θ_c²) ≤ L² − θ_a²
            let mf = m as f64;
            let per_z = mf * ratio - theta_a * theta_a - (mf - 1.0) * theta_c * theta_c;
            let budget = l2 - theta_a * theta_a;
            if per_z <= 0.0 {
                TsaiLimit::AtMost(l)
            } else if budget < per_z {
                TsaiLimit::Infeasible
            } else {
                TsaiLimit::AtMost(floor_with_slack(budget / per_z).min(l))
            }
        }
    })
}

/// floor(x), treating values a hair below an integer as that integer.
fn floor_with_slack(x: f64) -> usize {
    (x + 1e-9 * x.abs().max(1.0)).floor() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZczVerdict {
    Optimal,
    Feasible,
    Infeasible,
}

/// Compare L − n against M·Z.
pub fn zcz_tradeoff(l: usize, n: usize, m: usize, z: usize) -> Result<ZczVerdict> {
    check_ln(l, n)?;
    if m == 0 || z == 0 {
        return invalid("M and Z must be positive");
    }
    let capacity = l - n;
    Ok(match capacity.cmp(&(m * z)) {
        std::cmp::Ordering::Equal => ZczVerdict::Optimal,
        std::cmp::Ordering::Greater => ZczVerdict::Feasible,
        std::cmp::Ordering::Less => ZczVerdict::Infeasible,
    })
}

/// θ_opti = L·√(((M−1)L+n)/((L−n)(ML−1))).
pub fn liu_bound(m: usize, l: usize, n: usize) -> Result<f64> {
    check_ln(l, n)?;
    if m == 0 || m * l <= 1 {
        return invalid("need M·L > 1");
    }
    let (mf, lf, nf) = (m as f64, l as f64, n as f64);
    Ok(lf * (((mf - 1.0) * lf + nf) / ((lf - nf) * (mf * lf - 1.0))).sqrt())
}

/// (θ_a lower bound, θ_c lower bound) under uniform admissible power.
pub fn improved_bounds(l: usize, n: usize) -> Result<(f64, f64)> {
    check_ln(l, n)?;
    if l < 2 {
        return invalid("L must be at least 2");
    }
    let (lf, nf) = (l as f64, n as f64);
    Ok((
        lf * (nf / ((lf - nf) * (lf - 1.0))).sqrt(),
        lf / (lf - nf).sqrt(),
    ))
}

/// Cross-correlation floor between distinct sequences, inside one set or
/// across sets: L/√(L−n).
pub fn interset_bound(l: usize, n: usize) -> Result<f64> {
    check_ln(l, n)?;
    Ok(l as f64 / ((l - n) as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CombinedCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// lhs − rhs
    pub slack: f64,
    pub satisfied: bool,
}

/// θ_a²(L−1) + θ_c²(M−1)L ≥ L²(ML−L+n)/(L−n).
pub fn combined_inequality(
    theta_a: f64,
    theta_c: f64,
    l: usize,
    n: usize,
    m: usize,
    tol: f64,
) -> Result<CombinedCheck> {
    check_ln(l, n)?;
    if m == 0 {
        return invalid("M must be positive");
    }
    let (lf, nf, mf) = (l as f64, n as f64, m as f64);
    let lhs = theta_a * theta_a * (lf - 1.0) + theta_c * theta_c * (mf - 1.0) * lf;
    let rhs = lf * lf * (mf * lf - lf + nf) / (lf - nf);
    Ok(CombinedCheck {
        lhs,
        rhs,
        slack: lhs - rhs,
        satisfied: at_least(lhs, rhs, tol),
    })
}

/// η = θ_max / θ_opti.
pub fn optimality_factor(theta_max: f64, m: usize, l: usize, n: usize) -> Result<f64> {
    if !(theta_max.is_finite() && theta_max > 0.0) {
        return invalid(format!("measured θ_max must be positive, got {theta_max}"));
    }
    Ok(theta_max / liu_bound(m, l, n)?)
}

/// η for the time-domain CFR family with F rows of order N (L = N(N+1),
/// n = N, θ_max = N+1), in closed form.
pub fn cfr_family_eta(order: usize, rows: usize) -> Result<f64> {
    if order < 1 || rows < 1 {
        return invalid("N and F must be positive");
    }
    let (nf, ff) = (order as f64, rows as f64);
    let l = nf * (nf + 1.0);
    Ok(((ff * l - 1.0) / ((ff - 1.0) * l + nf)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub order: usize,
    pub length: usize,
    pub rows: usize,
    pub theta_max: f64,
    pub theta_opti: f64,
    pub eta: f64,
}

/// One row of the optimality table for an F×N CFR family.
pub fn table_row(order: usize, rows: usize) -> Result<TableRow> {
    let length = order * (order + 1);
    let theta_max = (order + 1) as f64;
    let theta_opti = liu_bound(rows, length, order)?;
    Ok(TableRow {
        order,
        length,
        rows,
        theta_max,
        theta_opti,
        eta: theta_max / theta_opti,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ladder {
    pub rows: Vec<TableRow>,
    /// η strictly decreases along the ladder.
    pub monotone: bool,
}

/// Table rows for prime orders p with F = p − 1 rows (the multiplication
/// table CFR). The ladder is evaluated in the order given.
pub fn prime_ladder(primes: &[usize]) -> Result<Ladder> {
    let rows = primes
        .iter()
        .map(|&p| {
            if !crate::cfr::is_prime(p) || p < 3 {
                invalid(format!("{p} is not an odd prime"))
            } else {
                table_row(p, p - 1)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|w| w[1].eta < w[0].eta);
    Ok(Ladder { rows, monotone })
}

/// Fixed-width rendering with columns N, length, F̃, θ_max, θ_opti, η.
pub fn render_table(rows: &[TableRow]) -> String {
    // the combining tilde takes no column, hence the wider field
    let mut out = format!(
        "{:>5} {:>8} {:>5} {:>8} {:>10} {:>8}\n",
        "N", "length", "F̃", "θ_max", "θ_opti", "η"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>5} {:>8} {:>4} {:>8.0} {:>10.4} {:>8.4}\n",
            r.order, r.length, r.rows, r.theta_max, r.theta_opti, r.eta
        ));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DifferenceSetTheta {
    /// P√(N−λ)
    pub theta_a: f64,
    /// P√(N(P−N)/(P−1))
    pub bound: f64,
    pub equal: bool,
}

/// Autocorrelation magnitude of the interleaved framework when the admissible
/// columns form a (P, N, λ) cyclic difference set.
pub fn difference_set_theta_a(p: usize, n: usize, lambda: usize) -> Result<DifferenceSetTheta> {
    if p < 2 || n == 0 || n > p {
        return invalid(format!("need 1 ≤ N ≤ P and P ≥ 2, got P = {p}, N = {n}"));
    }
    if n * (n - 1) != lambda * (p - 1) {
        return invalid(format!(
            "λ = {lambda} does not satisfy λ(P−1) = N(N−1) for P = {p}, N = {n}"
        ));
    }
    let pf = p as f64;
    let theta_a = pf * ((n - lambda) as f64).sqrt();
    let bound = framework_auto_bound(p, n)?;
    Ok(DifferenceSetTheta {
        theta_a,
        bound,
        equal: close(theta_a, bound, 1e-12),
    })
}

/// P√(N(P−N)/(P−1)), the autocorrelation floor of the framework.
pub fn framework_auto_bound(p: usize, n: usize) -> Result<f64> {
    if p < 2 || n > p {
        return invalid(format!("need N ≤ P and P ≥ 2, got P = {p}, N = {n}"));
    }
    let (pf, nf) = (p as f64, n as f64);
    Ok(pf * (nf * (pf - nf) / (pf - 1.0)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Optimal,
    AsymptoticallyOptimalCandidate,
    Suboptimal,
}

/// A measured value compared with one lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub bound: f64,
    pub measured: f64,
    pub satisfied: bool,
    pub verdict: Verdict,
}

impl BoundCheck {
    fn new(bound: f64, measured: f64, tol: f64) -> Self {
        Self {
            bound,
            measured,
            satisfied: at_least(measured, bound, tol),
            verdict: if close(measured, bound, tol) {
                Verdict::Optimal
            } else {
                Verdict::Suboptimal
            },
        }
    }
}

/// Values measured on a family, in the shape the report needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Measured {
    /// Largest out-of-phase autocorrelation over all members, full period.
    pub theta_a: f64,
    /// Largest cross-correlation between distinct members, full period;
    /// `None` for a single sequence.
    pub theta_c: Option<f64>,
    /// Largest cross-correlation between members of different sets.
    pub interset_theta_c: Option<f64>,
    pub theta_max: f64,
    /// Smallest ZCZ width over the sets.
    pub zcz_width: usize,
    /// Auto and cross maxima inside the ZCZ window.
    pub window_theta_a: f64,
    pub window_theta_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdicts {
    pub liu: Verdict,
    pub theta_a: BoundCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_c: Option<BoundCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interset: Option<BoundCheck>,
    pub tsai: Verdict,
    pub zcz: ZczVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    /// Total number of sequences the whole-family bounds are taken over.
    pub m: usize,
    /// Sequences per set; used for the Tsai relation and the ZCZ tradeoff.
    pub set_size: usize,
    pub l: usize,
    pub n: usize,
    pub window: usize,
    pub tolerance: f64,
    pub theta_opti: f64,
    pub theta_a_lb: f64,
    pub theta_c_lb: f64,
    pub interset_lb: f64,
    pub tsai_lhs: f64,
    pub tsai_rhs: f64,
    pub tsai_satisfied: bool,
    /// L − n
    pub zcz_capacity: usize,
    /// M·Z
    pub zcz_demand: usize,
    pub combined: CombinedCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<Measured>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<Verdicts>,
}

/// Bounds alone, with the Tsai relation and ZCZ tradeoff evaluated at
/// θ_a = θ_c = 0 over `window`, and the combined inequality at the
/// uniform-power floors.
pub fn bounds_report(
    m: usize,
    l: usize,
    n: usize,
    window: usize,
    tol: f64,
) -> Result<BoundsReport> {
    let theta_opti = liu_bound(m, l, n)?;
    let (theta_a_lb, theta_c_lb) = improved_bounds(l, n)?;
    if window == 0 || window > l {
        return invalid(format!("window must lie in 1..={l}"));
    }
    let tsai = tsai_check(0.0, 0.0, l, n, m, window, tol)?;
    Ok(BoundsReport {
        m,
        set_size: m,
        l,
        n,
        window,
        tolerance: tol,
        theta_opti,
        theta_a_lb,
        theta_c_lb,
        interset_lb: interset_bound(l, n)?,
        tsai_lhs: tsai.lhs,
        tsai_rhs: tsai.rhs,
        tsai_satisfied: tsai.satisfied,
        zcz_capacity: l - n,
        zcz_demand: m * window,
        combined: combined_inequality(theta_a_lb, theta_c_lb, l, n, m, tol)?,
        measured: None,
        eta: None,
        verdicts: None,
    })
}

/// Correlation figures of `family` needed by [`family_bounds_report`].
pub fn measure(family: &ScsFamily, tol: &Tolerances) -> Result<(FamilySummary, Measured)> {
    let l = family.length();
    let full = summarize(family, l, tol.zero)?;
    let z = full.sets.iter().map(|s| s.zcz_width).min().unwrap_or(1);
    let zone = if z == l {
        full.clone()
    } else {
        summarize(family, z, tol.zero)?
    };
    let auto = full.sets.iter().map(|s| s.theta_a).fold(0.0, f64::max);
    let intra = full.sets.iter().map(|s| s.theta_c).fold(0.0, f64::max);
    let multi_set = family.num_sets() > 1;
    let theta_c = match (family.set_size() > 1, multi_set) {
        (false, false) => None,
        (true, false) => Some(intra),
        (false, true) => Some(full.theta_c),
        (true, true) => Some(intra.max(full.theta_c)),
    };
    let measured = Measured {
        theta_a: auto,
        theta_c,
        interset_theta_c: multi_set.then_some(full.theta_c),
        theta_max: full.theta_max,
        zcz_width: z,
        window_theta_a: zone.sets.iter().map(|s| s.theta_a).fold(0.0, f64::max),
        window_theta_c: zone.sets.iter().map(|s| s.theta_c).fold(0.0, f64::max),
    };
    Ok((full, measured))
}

/// Full report for a family: whole-family bounds use M = K·(set size); the
/// Tsai relation and ZCZ tradeoff use the per-set size and the measured Z.
pub fn family_bounds_report(family: &ScsFamily, tol: &Tolerances) -> Result<BoundsReport> {
    let (_, measured) = measure(family, tol)?;
    report_from_measured(
        family.total_sequences(),
        family.set_size(),
        family.length(),
        family.constraint().n(),
        measured,
        tol.bound,
    )
}

/// Build a report from values measured elsewhere.
pub fn report_from_measured(
    total: usize,
    set_size: usize,
    l: usize,
    n: usize,
    measured: Measured,
    tol: f64,
) -> Result<BoundsReport> {
    let z = measured.zcz_width;
    let mut report = bounds_report(total, l, n, z.max(1), tol)?;
    report.set_size = set_size;
    report.zcz_demand = set_size * z;
    let tsai = tsai_check(
        measured.window_theta_a,
        measured.window_theta_c,
        l,
        n,
        set_size,
        z,
        tol,
    )?;
    report.tsai_lhs = tsai.lhs;
    report.tsai_rhs = tsai.rhs;
    report.tsai_satisfied = tsai.satisfied;
    report.combined = combined_inequality(
        measured.theta_a,
        measured.theta_c.unwrap_or(0.0),
        l,
        n,
        total,
        tol,
    )?;

    let eta = optimality_factor(measured.theta_max, total, l, n)?;
    let liu = if eta <= 1.0 + tol {
        Verdict::Optimal
    } else if close(measured.theta_max, report.interset_lb, tol) {
        Verdict::AsymptoticallyOptimalCandidate
    } else {
        Verdict::Suboptimal
    };
    let tsai_verdict = if close(tsai.lhs, tsai.rhs, tol) {
        Verdict::Optimal
    } else {
        Verdict::Suboptimal
    };
    report.verdicts = Some(Verdicts {
        liu,
        theta_a: BoundCheck::new(report.theta_a_lb, measured.theta_a, tol),
        theta_c: measured
            .theta_c
            .map(|c| BoundCheck::new(report.theta_c_lb, c, tol)),
        interset: measured
            .interset_theta_c
            .map(|c| BoundCheck::new(report.interset_lb, c, tol)),
        tsai: tsai_verdict,
        zcz: zcz_tradeoff(l, n, set_size, z.max(1))?,
    });
    report.eta = Some(eta);
    report.measured = Some(measured);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn liu_examples() {
        assert!((liu_bound(4, 240, 15).unwrap() - 14.0073).abs() < 5e-5);
        assert!((liu_bound(7, 3306, 57).unwrap() - 53.7758).abs() < 5e-5);
        assert_eq!(liu_bound(1, 10, 0).unwrap(), 0.0);
        assert!(liu_bound(1, 1, 0).is_err());
        assert!(liu_bound(2, 10, 10).is_err());
    }

    #[test]
    fn liu_without_constraint_is_the_classical_floor() {
        for (m, l) in [(2usize, 7usize), (4, 31), (9, 240)] {
            let (mf, lf) = (m as f64, l as f64);
            let classical = lf * ((mf - 1.0) / (mf * lf - 1.0)).sqrt();
            assert!(close(liu_bound(m, l, 0).unwrap(), classical, 1e-12));
        }
    }

    #[test]
    fn improved_examples() {
        let (a, c) = improved_bounds(240, 15).unwrap();
        assert!((c - 16.0).abs() < 1e-12);
        assert!((a - 240.0 * (15.0f64 / (225.0 * 239.0)).sqrt()).abs() < 1e-12);
        assert!((a - 4.00836).abs() < 5e-5);
        assert_eq!(improved_bounds(10, 0).unwrap().0, 0.0);
        assert!((interset_bound(55, 30).unwrap() - 11.0).abs() < 1e-12);
        assert!((interset_bound(49, 0).unwrap() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_power_floors_meet_combined_with_equality() {
        for (l, n, m) in [(240usize, 15usize, 4usize), (55, 30, 5), (100, 0, 3)] {
            let (a, c) = improved_bounds(l, n).unwrap();
            let r = combined_inequality(a, c, l, n, m, 1e-9).unwrap();
            assert!(r.slack.abs() <= 1e-9 * r.rhs);
        }
    }

    #[test]
    fn combined_at_equal_values_reproduces_liu() {
        let (l, n, m) = (240, 15, 4);
        let t = liu_bound(m, l, n).unwrap();
        let r = combined_inequality(t, t, l, n, m, 1e-9).unwrap();
        assert!(r.slack.abs() <= 1e-9 * r.rhs);
        assert!(
            combined_inequality(0.0, 0.0, 10, 0, 1, 1e-9)
                .unwrap()
                .satisfied
        );
    }

    #[test]
    fn tsai_examples() {
        let r = tsai_check(0.0, 0.0, 240, 15, 15, 15, 1e-9).unwrap();
        assert!(r.satisfied && close(r.lhs, r.rhs, 1e-12));
        let r = tsai_check(0.0, 0.0, 10, 2, 1, 1, 1e-9).unwrap();
        assert!(r.satisfied && r.lhs > r.rhs);
        assert!(
            !tsai_check(0.0, 0.0, 240, 15, 15, 16, 1e-9)
                .unwrap()
                .satisfied
        );
        assert!(tsai_check(0.0, 0.0, 10, 10, 1, 1, 1e-9).is_err());
    }

    #[test]
    fn tsai_design_space() {
        assert_eq!(
            tsai_solve(
                240,
                15,
                TsaiQuery::MaxSetSize {
                    theta_a: 0.0,
                    theta_c: 0.0,
                    window: 15
                }
            )
            .unwrap(),
            TsaiLimit::AtMost(15)
        );
        assert_eq!(
            tsai_solve(
                240,
                15,
                TsaiQuery::MaxWindow {
                    theta_a: 0.0,
                    theta_c: 0.0,
                    m: 15
                }
            )
            .unwrap(),
            TsaiLimit::AtMost(15)
        );
        // shrinking the window by one leaves room only for zero correlation
        match tsai_solve(
            240,
            15,
            TsaiQuery::MinThetaA {
                theta_c: 0.0,
                m: 15,
                window: 15,
            },
        )
        .unwrap()
        {
            TsaiLimit::AtLeast(v) => assert!(v < 1e-6),
            other => panic!("{other:?}"),
        }
        match tsai_solve(
            240,
            15,
            TsaiQuery::MinThetaC {
                theta_a: 0.0,
                m: 15,
                window: 16,
            },
        )
        .unwrap()
        {
            TsaiLimit::AtLeast(v) => {
                let r = tsai_check(0.0, v, 240, 15, 15, 16, 1e-9).unwrap();
                assert!(close(r.lhs, r.rhs, 1e-9));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            tsai_solve(
                240,
                15,
                TsaiQuery::MaxSetSize {
                    theta_a: 0.0,
                    theta_c: 20.0,
                    window: 15
                }
            )
            .unwrap(),
            TsaiLimit::Unbounded
        );
    }

    #[test]
    fn zcz_examples() {
        assert_eq!(zcz_tradeoff(240, 15, 15, 15).unwrap(), ZczVerdict::Optimal);
        assert_eq!(
            zcz_tradeoff(240, 15, 15, 16).unwrap(),
            ZczVerdict::Infeasible
        );
        assert_eq!(zcz_tradeoff(55, 30, 5, 5).unwrap(), ZczVerdict::Optimal);
        assert_eq!(zcz_tradeoff(55, 30, 4, 5).unwrap(), ZczVerdict::Feasible);
    }

    #[test]
    fn table_rows() {
        let r = table_row(15, 4).unwrap();
        assert!((r.theta_opti - 14.0073).abs() < 5e-5);
        assert!((r.eta - 1.1423).abs() < 5e-5);
        let r = table_row(49, 6).unwrap();
        assert!((r.theta_opti - 45.7363).abs() < 5e-5);
        assert!((r.eta - 1.0932).abs() < 5e-5);
        for (n, f) in [(15, 4), (21, 5), (49, 6), (57, 7)] {
            let row = table_row(n, f).unwrap();
            assert!(close(row.eta, cfr_family_eta(n, f).unwrap(), 1e-12));
        }
        let text = render_table(&[r]);
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("2450"));
    }

    #[test]
    fn ladder_trend() {
        let l = prime_ladder(&[5, 7, 11, 13, 31, 61]).unwrap();
        assert!(l.monotone);
        assert!(l.rows.last().unwrap().eta < 1.02);
        assert!(!prime_ladder(&[7, 5]).unwrap().monotone);
        assert!(prime_ladder(&[9]).is_err());
    }

    #[test]
    fn optimality_factor_is_one_at_the_bound() {
        let t = liu_bound(3, 50, 4).unwrap();
        assert!((optimality_factor(t, 3, 50, 4).unwrap() - 1.0).abs() < 1e-12);
        assert!(optimality_factor(0.0, 3, 50, 4).is_err());
    }

    #[test]
    fn difference_set_examples() {
        let r = difference_set_theta_a(11, 5, 2).unwrap();
        assert!((r.theta_a - 11.0 * 3f64.sqrt()).abs() < 1e-12 && r.equal);
        let r = difference_set_theta_a(8, 7, 6).unwrap();
        assert!((r.theta_a - 8.0).abs() < 1e-12 && r.equal);
        let r = difference_set_theta_a(7, 3, 1).unwrap();
        assert!((r.theta_a - 7.0 * 2f64.sqrt()).abs() < 1e-12 && r.equal);
        assert!(difference_set_theta_a(11, 4, 1).is_err());
    }

    #[test]
    fn raw_report_invariants() {
        let r = bounds_report(4, 240, 15, 240, 1e-6).unwrap();
        assert_eq!(r.interset_lb, r.theta_c_lb);
        assert!(r.verdicts.is_none() && r.eta.is_none());
        assert!(bounds_report(1, 10, 10, 1, 1e-6).is_err());
    }
}
