//! Unitary DFT, periodic correlation and spectrum checks.
//!
//! Conventions:
//! * ĉ_f = (1/√L) Σ_t c_t ω_L^{−ft} and c_t = (1/√L) Σ_f ĉ_f ω_L^{ft}, with
//!   ω_L = e^{2πi/L}. A single 1/√L factor in each direction keeps the
//!   transform unitary.
//! * θ_{C,D}(τ) = Σ_t c_t · conj(d_{(t+τ) mod L}), which also equals
//!   Σ_f ĉ_f conj(d̂_f) ω_L^{−fτ}. Some closed forms elsewhere use ω^{+fτ};
//!   that yields θ(L−τ) under this convention, so magnitude profiles are
//!   mirror images of each other.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Result, ScsError};
use crate::sequence::{
    ComplexSeq, CorrelationProfile, CorrelationSummary, Domain, ScsFamily, SpectralConstraint,
};
use crate::tol::Tolerances;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized in-place transform: forward uses e^{−2πi·ft/L}.
fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    fft.process(buf);
}

fn unitary(values: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    fft_in_place(&mut buf, inverse);
    let scale = 1.0 / (values.len() as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

/// Time → frequency.
pub fn dft(seq: &ComplexSeq) -> Result<ComplexSeq> {
    seq.expect_domain(Domain::Time)?;
    ComplexSeq::new(Domain::Frequency, unitary(seq.values(), false))
}

/// Frequency → time.
pub fn idft(seq: &ComplexSeq) -> Result<ComplexSeq> {
    seq.expect_domain(Domain::Frequency)?;
    ComplexSeq::new(Domain::Time, unitary(seq.values(), true))
}

/// e^{2πi·k/n}, reducing k first so large exponents stay accurate.
pub fn root_of_unity(k: i64, n: usize) -> Complex64 {
    let n_i = n as i64;
    let k = k.rem_euclid(n_i);
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// O(L²) direct evaluation of the unitary transform; the reference the fast
/// path is checked against.
pub fn dft_naive(values: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let l = values.len();
    let sign = if inverse { 1 } else { -1 };
    let scale = 1.0 / (l as f64).sqrt();
    (0..l)
        .map(|f| {
            values
                .iter()
                .enumerate()
                .map(|(t, &c)| c * root_of_unity(sign * ((f * t) % l) as i64, l))
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

fn check_pair(c: &ComplexSeq, d: &ComplexSeq) -> Result<()> {
    c.expect_domain(Domain::Time)?;
    d.expect_domain(Domain::Time)?;
    if c.len() != d.len() {
        return Err(ScsError::LengthMismatch {
            left: c.len(),
            right: d.len(),
        });
    }
    Ok(())
}

/// Direct O(L²) periodic cross-correlation.
pub fn pccf(c: &ComplexSeq, d: &ComplexSeq) -> Result<CorrelationProfile> {
    check_pair(c, d)?;
    let (c, d) = (c.values(), d.values());
    let l = c.len();
    let values = (0..l)
        .map(|tau| {
            c.iter()
                .enumerate()
                .map(|(t, &ct)| ct * d[(t + tau) % l].conj())
                .sum()
        })
        .collect();
    Ok(CorrelationProfile::new(values))
}

/// Unitary spectrum of a time sequence, reusable across many correlations.
pub fn spectrum(seq: &ComplexSeq) -> Result<Vec<Complex64>> {
    seq.expect_domain(Domain::Time)?;
    Ok(unitary(seq.values(), false))
}

/// θ(τ) = Σ_f ĉ_f conj(d̂_f) ω^{−fτ}, i.e. an unnormalized forward FFT of
/// the spectral product.
pub fn correlate_spectra(c_hat: &[Complex64], d_hat: &[Complex64]) -> CorrelationProfile {
    let mut buf: Vec<Complex64> = c_hat.iter().zip(d_hat).map(|(a, b)| a * b.conj()).collect();
    fft_in_place(&mut buf, false);
    CorrelationProfile::new(buf)
}

/// FFT-based periodic cross-correlation; any length L.
pub fn pccf_fast(c: &ComplexSeq, d: &ComplexSeq) -> Result<CorrelationProfile> {
    check_pair(c, d)?;
    Ok(correlate_spectra(&spectrum(c)?, &spectrum(d)?))
}

/// Largest Z such that every auto sidelobe vanishes for 0 < τ < Z and every
/// cross value for 0 ≤ τ < Z, judged from precomputed spectra.
fn zcz_from_spectra(spectra: &[Vec<Complex64>], tol: f64) -> usize {
    let l = spectra[0].len();
    let mut z = l;
    for (i, a) in spectra.iter().enumerate() {
        for (j, b) in spectra.iter().enumerate() {
            let profile = correlate_spectra(a, b);
            let start = usize::from(i == j);
            if let Some(tau) = (start..z).find(|&tau| profile.values()[tau].norm() > tol) {
                z = tau;
            }
        }
    }
    z
}

/// ZCZ width of a set (Z = L when every listed value vanishes).
pub fn zcz_width(set: &[ComplexSeq], tol: f64) -> Result<usize> {
    let Some(first) = set.first() else {
        return Err(ScsError::EmptyFamily);
    };
    for s in set {
        check_pair(first, s)?;
    }
    let spectra = set.iter().map(spectrum).collect::<Result<Vec<_>>>()?;
    Ok(zcz_from_spectra(&spectra, tol))
}

/// Correlation figures for a whole family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilySummary {
    pub window: usize,
    /// One entry per set; `theta_c` there is the intra-set cross value.
    pub sets: Vec<CorrelationSummary>,
    /// max over sets of the per-set θ_max.
    pub theta_a: f64,
    /// Inter-set cross-correlation over the window; 0 for a single set.
    pub theta_c: f64,
    pub theta_max: f64,
}

/// Per-set and family-level maxima over shifts 0 ≤ τ < `window`.
///
/// Auto sidelobes exclude τ = 0. With `window = L` each unordered pair is
/// correlated once, since |θ_{D,C}(τ)| = |θ_{C,D}(L−τ)|.
pub fn summarize(family: &ScsFamily, window: usize, zero_tol: f64) -> Result<FamilySummary> {
    let l = family.length();
    if window == 0 || window > l {
        return Err(ScsError::InvalidParameter(format!(
            "window must lie in 1..={l}, got {window}"
        )));
    }
    let spectra: Vec<Vec<Vec<Complex64>>> = family
        .sets()
        .iter()
        .map(|set| set.iter().map(spectrum).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let sets: Vec<CorrelationSummary> = spectra
        .par_iter()
        .map(|set| {
            let mut theta_a: f64 = 0.0;
            let mut theta_c: f64 = 0.0;
            for (i, a) in set.iter().enumerate() {
                for (j, b) in set.iter().enumerate() {
                    let p = correlate_spectra(a, b);
                    if i == j {
                        theta_a = theta_a.max(p.max_magnitude(1..window));
                    } else {
                        theta_c = theta_c.max(p.max_magnitude(0..window));
                    }
                }
            }
            CorrelationSummary {
                theta_a,
                theta_c,
                theta_max: theta_a.max(theta_c),
                window,
                zcz_width: zcz_from_spectra(set, zero_tol),
            }
        })
        .collect();

    let k = spectra.len();
    let ordered = window < l;
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|&(i, j)| if ordered { i != j } else { i < j })
        .collect();
    let theta_c = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut best: f64 = 0.0;
            for a in &spectra[i] {
                for b in &spectra[j] {
                    best = best.max(correlate_spectra(a, b).max_magnitude(0..window));
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    let theta_a = sets.iter().map(|s| s.theta_max).fold(0.0, f64::max);
    Ok(FamilySummary {
        window,
        sets,
        theta_a,
        theta_c,
        theta_max: theta_a.max(theta_c),
    })
}

/// Per-carrier power against the uniform-power condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub power: Vec<f64>,
    pub admissible_power: f64,
    pub max_leakage: f64,
    pub max_deviation: f64,
    pub pass: bool,
}

/// |ĉ_f|² must be 0 on Ω and L/(L−n) elsewhere, each within `tol`.
pub fn check_spectrum(
    seq: &ComplexSeq,
    constraint: &SpectralConstraint,
    tol: f64,
) -> Result<SpectrumReport> {
    if seq.len() != constraint.length() {
        return Err(ScsError::LengthMismatch {
            left: seq.len(),
            right: constraint.length(),
        });
    }
    let power: Vec<f64> = spectrum(seq)?.iter().map(|v| v.norm_sqr()).collect();
    let admissible_power = constraint.admissible_power();
    let mut max_leakage: f64 = 0.0;
    let mut max_deviation: f64 = 0.0;
    for (f, &p) in power.iter().enumerate() {
        if constraint.is_forbidden(f) {
            max_leakage = max_leakage.max(p);
        } else {
            max_deviation = max_deviation.max((p - admissible_power).abs());
        }
    }
    Ok(SpectrumReport {
        power,
        admissible_power,
        max_leakage,
        max_deviation,
        pass: max_leakage <= tol && max_deviation <= tol,
    })
}

/// ||c_t| − 1| ≤ tol for every t.
pub fn check_unimodular(seq: &ComplexSeq, tol: f64) -> bool {
    worst_modulus_error(seq).1 <= tol
}

/// (position, ||c_t| − 1|) of the entry furthest from the unit circle.
pub fn worst_modulus_error(seq: &ComplexSeq) -> (usize, f64) {
    seq.values()
        .iter()
        .map(|v| (v.norm() - 1.0).abs())
        .enumerate()
        .fold(
            (0, 0.0),
            |best, (t, e)| if e > best.1 { (t, e) } else { best },
        )
}

/// Distinct k with c_t = ω_order^k, or `None` if some entry is not an
/// `order`-th root of unity within `tol`.
pub fn phase_alphabet(seq: &ComplexSeq, order: usize, tol: f64) -> Option<Vec<usize>> {
    let mut seen = vec![false; order];
    for v in seq.values() {
        let k = (v.arg() / (2.0 * PI) * order as f64)
            .round()
            .rem_euclid(order as f64) as usize;
        if (v - root_of_unity(k as i64, order)).norm() > tol {
            return None;
        }
        seen[k] = true;
    }
    Some((0..order).filter(|&k| seen[k]).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SumOfSquares {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Σ_τ |θ_{c,d}(τ)|² against L³/(L−n); both inputs must meet the uniform
/// power condition first.
pub fn sum_of_squares_check(
    c: &ComplexSeq,
    d: &ComplexSeq,
    constraint: &SpectralConstraint,
    tol: &Tolerances,
) -> Result<SumOfSquares> {
    check_pair(c, d)?;
    for (name, s) in [("first", c), ("second", d)] {
        let report = check_spectrum(s, constraint, tol.zero)?;
        if !report.pass {
            return Err(ScsError::Precondition(format!(
                "{name} sequence violates uniform power (leakage {:e}, deviation {:e})",
                report.max_leakage, report.max_deviation
            )));
        }
    }
    let lhs: f64 = pccf_fast(c, d)?.values().iter().map(|v| v.norm_sqr()).sum();
    let l = constraint.length() as f64;
    let rhs = l.powi(3) / (l - constraint.n() as f64);
    Ok(SumOfSquares {
        lhs,
        rhs,
        pass: (lhs - rhs).abs() <= tol.relative * rhs,
    })
}

/// Shortest round-trip text, switching to exponent form for tiny or huge
/// magnitudes.
fn num(x: f64) -> String {
    if x != 0.0 && !(1e-4..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// `tau,re,im,mag`, one row per shift.
pub fn profile_csv(profile: &CorrelationProfile) -> String {
    let mut out = String::from("tau,re,im,mag\n");
    for (tau, v) in profile.values().iter().enumerate() {
        let _ = writeln!(out, "{tau},{},{},{}", num(v.re), num(v.im), num(v.norm()));
    }
    out
}

/// `f,power,forbidden`, one row per carrier.
pub fn spectrum_csv(report: &SpectrumReport, constraint: &SpectralConstraint) -> String {
    let mut out = String::from("f,power,forbidden\n");
    for (f, p) in report.power.iter().enumerate() {
        let _ = writeln!(
            out,
            "{f},{},{}",
            num(*p),
            u8::from(constraint.is_forbidden(f))
        );
    }
    out
}
