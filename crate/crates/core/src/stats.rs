//! Matching/mismatch statistics and the Bell-inequality gap.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hidden::analytic_mismatch_lhv_threshold;
use crate::quantum::{analytic_mismatch_qm, Angle};
use crate::scalar::Real;

/// Absolute slack used when comparing exact expectations.
pub const EXACT_TOLERANCE: f64 = 1e-12;

/// Number of standard deviations in every reported confidence half-width.
pub const CI_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("series is empty")]
    Empty,
    #[error("invalid outcome bit `{0}` (expected 0 or 1)")]
    InvalidBit(String),
    #[error("mismatch count {mismatches} exceeds trial count {n}")]
    CountOverflow { mismatches: u64, n: u64 },
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("angle {0}° outside the gap range [0°, 45°]")]
    AngleOutOfRange(f64),
    #[error("unknown model `{0}` (expected `qm` or `lhv_threshold`)")]
    UnknownModel(String),
}

/// Ordered detector record: `true` = photon detected, `false` = blocked.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct OutcomeSeries {
    bits: Vec<bool>,
}

impl OutcomeSeries {
    pub fn new(bits: Vec<bool>) -> Self {
        OutcomeSeries { bits }
    }

    /// Builds a series from `0`/`1` values, rejecting anything else.
    pub fn from_bits(bits: &[u8]) -> Result<Self, StatsError> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(StatsError::InvalidBit(other.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.bits.get(index).copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| b as u8).collect()
    }

    /// Bitwise complement.
    pub fn complement(&self) -> Self {
        Self::new(self.bits.iter().map(|b| !b).collect())
    }

    /// Copy of the series with the bits at `positions` inverted.
    pub fn with_flips(&self, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = self.bits.clone();
        for p in positions {
            bits[p] = !bits[p];
        }
        Self::new(bits)
    }

    /// Number of positions where the two series differ.
    pub fn hamming_distance(&self, other: &Self) -> Result<u64, StatsError> {
        if self.len() != other.len() {
            return Err(StatsError::LengthMismatch(self.len(), other.len()));
        }
        Ok(self
            .iter()
            .zip(other.iter())
            .filter(|(a, b)| a != b)
            .count() as u64)
    }
}

impl FromIterator<bool> for OutcomeSeries {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl fmt::Display for OutcomeSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Accepts `0,1,1,0`, `0 1 1 0` or `0110`.
impl FromStr for OutcomeSeries {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(StatsError::InvalidBit(other.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }
}

/// Mismatch counts between two detector series.
///
/// `e` is the mismatch fraction and `f = 1 - e` the matching fraction.
/// `n == 0` marks an exact expectation (no sampling error) rather than a
/// sample; see [`MismatchStats::expectation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MismatchStats<T> {
    n: u64,
    mismatches: u64,
    e: T,
    f: T,
    ci_half_width: T,
}

impl<T: Real> MismatchStats<T> {
    pub fn from_counts(n: u64, mismatches: u64) -> Result<Self, StatsError> {
        if n == 0 {
            return Err(StatsError::Empty);
        }
        if mismatches > n {
            return Err(StatsError::CountOverflow { mismatches, n });
        }
        let e = T::from_count(mismatches) / T::from_count(n);
        let ci_half_width = T::lit(CI_SIGMAS) * (e * (T::one() - e) / T::from_count(n)).sqrt();
        Ok(MismatchStats {
            n,
            mismatches,
            e,
            f: T::one() - e,
            ci_half_width,
        })
    }

    /// Stats for an exactly known mismatch probability (zero-width interval).
    pub fn expectation(e: T) -> Result<Self, StatsError> {
        if !(e >= T::zero() && e <= T::one()) {
            return Err(StatsError::ProbabilityOutOfRange(e.as_f64()));
        }
        Ok(MismatchStats {
            n: 0,
            mismatches: 0,
            e,
            f: T::one() - e,
            ci_half_width: T::zero(),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mismatches(&self) -> u64 {
        self.mismatches
    }

    /// Mismatch fraction E.
    pub fn e(&self) -> T {
        self.e
    }

    /// Matching fraction F.
    pub fn f(&self) -> T {
        self.f
    }

    /// Half-width of the 3σ normal-approximation interval around `e`.
    pub fn ci_half_width(&self) -> T {
        self.ci_half_width
    }

    pub fn is_expectation(&self) -> bool {
        self.n == 0
    }

    /// Whether `value` lies within the 3σ interval (plus exact slack).
    pub fn contains(&self, value: T) -> bool {
        (self.e - value).abs() <= self.ci_half_width + T::lit(EXACT_TOLERANCE)
    }
}

pub fn mismatch_fraction<T: Real>(
    a: &OutcomeSeries,
    b: &OutcomeSeries,
) -> Result<MismatchStats<T>, StatsError> {
    let mismatches = a.hamming_distance(b)?;
    if a.is_empty() {
        return Err(StatsError::Empty);
    }
    MismatchStats::from_counts(a.len() as u64, mismatches)
}

/// Which description of the photon pairs generated the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Shared polarization with collapse on first detection.
    #[default]
    Qm,
    /// Local deterministic 45° threshold on a hidden shared polarization.
    LhvThreshold,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Qm => "qm",
            Model::LhvThreshold => "lhv_threshold",
        }
    }

    /// Expected mismatch fraction for polarizers `theta_rel` apart.
    pub fn analytic_mismatch<T: Real>(self, theta_rel: Angle<T>) -> T {
        match self {
            Model::Qm => analytic_mismatch_qm(theta_rel),
            Model::LhvThreshold => analytic_mismatch_lhv_threshold(theta_rel),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "qm" => Ok(Model::Qm),
            "lhv_threshold" | "lhv-threshold" | "lhv" => Ok(Model::LhvThreshold),
            other => Err(StatsError::UnknownModel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BellVerdict {
    SatisfiesBell,
    ViolatesBell,
    Inconclusive,
}

impl BellVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            BellVerdict::SatisfiesBell => "satisfies_bell",
            BellVerdict::ViolatesBell => "violates_bell",
            BellVerdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for BellVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Test of `E(2θ) ≤ 2E(θ)` at one angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellGapReport<T> {
    pub theta: Angle<T>,
    pub e_theta: MismatchStats<T>,
    pub e_2theta: MismatchStats<T>,
    /// `E(2θ) - 2E(θ)`; positive values violate the inequality.
    pub gap: T,
    /// Combined 3σ half-width of `gap`.
    pub gap_ci: T,
    pub verdict: BellVerdict,
}

/// Compares `E(2θ)` against `2E(θ)`.
///
/// Verdict rule: `violates_bell` when the gap exceeds its combined 3σ
/// half-width, `satisfies_bell` when the gap is not positive, and
/// `inconclusive` when it is positive but within the interval.
pub fn bell_gap<T: Real>(
    theta: Angle<T>,
    e_theta: MismatchStats<T>,
    e_2theta: MismatchStats<T>,
) -> BellGapReport<T> {
    let two = T::lit(2.0);
    let gap = e_2theta.e() - two * e_theta.e();
    // the two estimates come from independent runs
    let gap_ci =
        (e_2theta.ci_half_width().powi(2) + (two * e_theta.ci_half_width()).powi(2)).sqrt();
    let tol = T::lit(EXACT_TOLERANCE);
    let verdict = if !gap.is_finite() || !gap_ci.is_finite() {
        BellVerdict::Inconclusive
    } else if gap > gap_ci + tol {
        BellVerdict::ViolatesBell
    } else if gap <= tol {
        BellVerdict::SatisfiesBell
    } else {
        BellVerdict::Inconclusive
    };
    BellGapReport {
        theta,
        e_theta,
        e_2theta,
        gap,
        gap_ci,
        verdict,
    }
}

/// Exact gap reports for `model` at each angle of `theta_grid` (degrees,
/// each in `[0, 45]`).
pub fn sweep_gap_analytic<T: Real>(
    model: Model,
    theta_grid: &[T],
) -> Result<Vec<BellGapReport<T>>, StatsError> {
    theta_grid
        .iter()
        .map(|&theta| {
            if !(theta >= T::zero() && theta <= T::lit(45.0)) {
                return Err(StatsError::AngleOutOfRange(theta.as_f64()));
            }
            let single =
                MismatchStats::expectation(model.analytic_mismatch(Angle::from_degrees(theta)))?;
            let double = MismatchStats::expectation(
                model.analytic_mismatch(Angle::from_degrees(T::lit(2.0) * theta)),
            )?;
            Ok(bell_gap(Angle::from_degrees(theta), single, double))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::collection::vec;
    use proptest::prelude::*;

    const BASE: [u8; 12] = [0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 1, 0];

    fn exact(e: f64) -> MismatchStats<f64> {
        MismatchStats::expectation(e).unwrap()
    }

    #[test]
    fn identical_series_match() {
        let a = OutcomeSeries::from_bits(&BASE).unwrap();
        let s: MismatchStats<f64> = mismatch_fraction(&a, &a).unwrap();
        assert_eq!(s.e(), 0.0);
        assert_eq!(s.f(), 1.0);
        assert_eq!(s.ci_half_width(), 0.0);
    }

    #[test]
    fn four_flips_in_twelve() {
        let c = OutcomeSeries::from_bits(&BASE).unwrap();
        let a = c.with_flips([0, 1, 2, 3]);
        assert_eq!(a.to_bits(), vec![1, 1, 0, 1, 1, 0, 1, 1, 0, 1, 1, 0]);
        let s: MismatchStats<f64> = mismatch_fraction(&c, &a).unwrap();
        assert_eq!(s.mismatches(), 4);
        assert_abs_diff_eq!(s.e(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn complement_is_total_mismatch() {
        let c = OutcomeSeries::from_bits(&BASE).unwrap();
        let s: MismatchStats<f64> = mismatch_fraction(&c, &c.complement()).unwrap();
        assert_eq!(s.e(), 1.0);
        assert_eq!(s.f(), 0.0);
    }

    #[test]
    fn error_paths() {
        let a = OutcomeSeries::from_bits(&[0, 1]).unwrap();
        let b = OutcomeSeries::from_bits(&[0]).unwrap();
        assert_eq!(
            mismatch_fraction::<f64>(&a, &b),
            Err(StatsError::LengthMismatch(2, 1))
        );
        let empty = OutcomeSeries::default();
        assert_eq!(
            mismatch_fraction::<f64>(&empty, &empty),
            Err(StatsError::Empty)
        );
        assert!(OutcomeSeries::from_bits(&[0, 2]).is_err());
        assert!("01x".parse::<OutcomeSeries>().is_err());
        assert!(MismatchStats::<f64>::from_counts(3, 4).is_err());
        assert!(MismatchStats::<f64>::expectation(1.5).is_err());
    }

    #[test]
    fn series_parse_and_display() {
        let s: OutcomeSeries = "0,0,1,0, 1".parse().unwrap();
        assert_eq!(s.to_bits(), vec![0, 0, 1, 0, 1]);
        assert_eq!(s.to_string(), "0,0,1,0,1");
        assert_eq!("0110".parse::<OutcomeSeries>().unwrap().len(), 4);
    }

    #[test]
    fn ci_formula() {
        let s = MismatchStats::<f64>::from_counts(100_000, 25_000).unwrap();
        assert_abs_diff_eq!(
            s.ci_half_width(),
            3.0 * (0.25f64 * 0.75 / 1e5).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn gap_examples() {
        let r = bell_gap(Angle::from_degrees(30.0), exact(0.25), exact(0.75));
        assert_abs_diff_eq!(r.gap, 0.25, epsilon = 1e-12);
        assert_eq!(r.verdict, BellVerdict::ViolatesBell);

        let r = bell_gap(Angle::from_degrees(45.0), exact(0.5), exact(1.0));
        assert_eq!(r.gap, 0.0);
        assert_eq!(r.verdict, BellVerdict::SatisfiesBell);

        let r = bell_gap(
            Angle::from_degrees(30.0),
            exact(1.0 / 3.0),
            exact(2.0 / 3.0),
        );
        assert_abs_diff_eq!(r.gap, 0.0, epsilon = 1e-15);
        assert_eq!(r.verdict, BellVerdict::SatisfiesBell);
    }

    #[test]
    fn gap_verdict_uses_combined_interval() {
        let single = MismatchStats::<f64>::from_counts(1000, 250).unwrap();
        let barely = MismatchStats::<f64>::from_counts(1000, 510).unwrap();
        let r = bell_gap(Angle::from_degrees(30.0), single, barely);
        assert!(r.gap > 0.0 && r.gap <= r.gap_ci);
        assert_eq!(r.verdict, BellVerdict::Inconclusive);

        let clear = MismatchStats::<f64>::from_counts(1000, 750).unwrap();
        assert_eq!(
            bell_gap(Angle::from_degrees(30.0), single, clear).verdict,
            BellVerdict::ViolatesBell
        );

        let below = MismatchStats::<f64>::from_counts(1000, 480).unwrap();
        assert_eq!(
            bell_gap(Angle::from_degrees(30.0), single, below).verdict,
            BellVerdict::SatisfiesBell
        );
    }

    #[test]
    fn analytic_sweep_examples() {
        let r = sweep_gap_analytic(Model::Qm, &[30.0, 0.0, 15.0, 45.0]).unwrap();
        assert_abs_diff_eq!(r[0].gap, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1].gap, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[2].gap, 0.11602540378443865, epsilon = 1e-12);
        assert_abs_diff_eq!(r[3].gap, 0.0, epsilon = 1e-12);
        assert_eq!(r[1].verdict, BellVerdict::SatisfiesBell);
        assert_eq!(r[3].verdict, BellVerdict::SatisfiesBell);
        assert!(sweep_gap_analytic(Model::Qm, &[46.0]).is_err());
        assert!(sweep_gap_analytic(Model::Qm, &[-1.0]).is_err());
    }

    #[test]
    fn analytic_gap_sign_on_half_degree_grid() {
        let grid: Vec<f64> = (0..=90).map(|i| i as f64 * 0.5).collect();
        let qm = sweep_gap_analytic(Model::Qm, &grid).unwrap();
        let lhv = sweep_gap_analytic(Model::LhvThreshold, &grid).unwrap();
        for ((theta, q), l) in grid.iter().zip(&qm).zip(&lhv) {
            // factored form of sin²2θ - 2sin²θ
            let t = theta.to_radians();
            let factored = 2.0 * t.sin().powi(2) * (2.0 * t.cos().powi(2) - 1.0);
            assert_abs_diff_eq!(q.gap, factored, epsilon = 1e-12);
            if *theta > 0.0 && *theta < 45.0 {
                assert!(q.gap > 0.0);
                assert_eq!(q.verdict, BellVerdict::ViolatesBell);
            } else {
                assert!(q.gap.abs() < 1e-12);
                assert_eq!(q.verdict, BellVerdict::SatisfiesBell);
            }
            assert_eq!(l.gap, 0.0);
            assert_eq!(l.verdict, BellVerdict::SatisfiesBell);
        }
    }

    #[test]
    fn single_precision_stats() {
        let s = MismatchStats::<f32>::from_counts(12, 4).unwrap();
        assert_eq!(s.e() + s.f(), 1.0);
    }

    fn series(len: usize) -> impl Strategy<Value = OutcomeSeries> {
        vec(any::<bool>(), len).prop_map(OutcomeSeries::new)
    }

    proptest! {
        #[test]
        fn e_plus_f_is_one(n in 1u64..10_000_000, frac in 0.0f64..=1.0) {
            let m = ((n as f64) * frac) as u64;
            let s = MismatchStats::<f64>::from_counts(n, m).unwrap();
            prop_assert_eq!(s.e() + s.f(), 1.0);
            prop_assert!((0.0..=1.0).contains(&s.e()));
            prop_assert_eq!(s.e(), m as f64 / n as f64);
        }

        #[test]
        fn mismatch_is_symmetric((a, b) in (1usize..200).prop_flat_map(|n| (series(n), series(n)))) {
            let ab: MismatchStats<f64> = mismatch_fraction(&a, &b).unwrap();
            let ba: MismatchStats<f64> = mismatch_fraction(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn mismatch_counts_obey_triangle_bound(
            (a, b, c) in (1usize..200).prop_flat_map(|n| (series(n), series(n), series(n)))
        ) {
            let ab = a.hamming_distance(&b).unwrap();
            let ac = a.hamming_distance(&c).unwrap();
            let cb = c.hamming_distance(&b).unwrap();
            prop_assert!(ab <= ac + cb);
        }
    }
}
