//! Local hidden-variable counter-models.
//!
//! Two pieces live here: a deterministic threshold model in which both
//! photons carry the same hidden polarization and each station answers on
//! its own, and the series-flip construction that bounds the mismatch of two
//! independently perturbed copies of one detector record.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::quantum::{relative_angle, uniform_angle, Angle, TrialOutcome};
use crate::scalar::Real;
use crate::stats::OutcomeSeries;

/// Largest series length accepted by [`enumerate_flip_mismatches`].
pub const MAX_ENUMERATION_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlipError {
    #[error("flip position {position} outside series of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("flip position {0} listed twice")]
    DuplicatePosition(usize),
    #[error("flip sets differ in size ({0} vs {1})")]
    UnequalFlipCounts(usize, usize),
    #[error("cannot flip {k} positions of a series of length {n}")]
    TooManyFlips { k: usize, n: usize },
    #[error("series length {n} exceeds the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// Hidden polarization carried by both photons of a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenPairState<T> {
    pub lambda: Angle<T>,
}

impl<T: Real> HiddenPairState<T> {
    pub fn new(lambda: Angle<T>) -> Self {
        HiddenPairState { lambda }
    }

    /// Pair with `lambda` uniform on `[0°, 180°)`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(uniform_angle(rng))
    }

    /// Local response of one station: detected iff the hidden polarization
    /// lies strictly within 45° of the polarizer axis.
    pub fn response(&self, axis: Angle<T>) -> bool {
        relative_angle(self.lambda, axis) < T::lit(45.0)
    }
}

pub fn sample_trial_lhv<T: Real>(
    pair: HiddenPairState<T>,
    axis_a: Angle<T>,
    axis_b: Angle<T>,
) -> TrialOutcome {
    TrialOutcome::new(pair.response(axis_a), pair.response(axis_b))
}

/// Straight-line mismatch `θ/90°` of the threshold model.
pub fn analytic_mismatch_lhv_threshold<T: Real>(theta_rel: Angle<T>) -> T {
    relative_angle(theta_rel, Angle::zero()) / T::lit(90.0)
}

/// A base series plus two equally sized sets of positions to invert.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipConstruction {
    base: OutcomeSeries,
    flips_a: BTreeSet<usize>,
    flips_b: BTreeSet<usize>,
}

impl FlipConstruction {
    pub fn new(
        base: OutcomeSeries,
        flips_a: &[usize],
        flips_b: &[usize],
    ) -> Result<Self, FlipError> {
        let n = base.len();
        let flips_a = position_set(flips_a, n)?;
        let flips_b = position_set(flips_b, n)?;
        if flips_a.len() != flips_b.len() {
            return Err(FlipError::UnequalFlipCounts(flips_a.len(), flips_b.len()));
        }
        Ok(FlipConstruction {
            base,
            flips_a,
            flips_b,
        })
    }

    pub fn base(&self) -> &OutcomeSeries {
        &self.base
    }

    pub fn flips_a(&self) -> &BTreeSet<usize> {
        &self.flips_a
    }

    pub fn flips_b(&self) -> &BTreeSet<usize> {
        &self.flips_b
    }

    /// Number of flipped positions per series.
    pub fn k(&self) -> usize {
        self.flips_a.len()
    }
}

fn position_set(positions: &[usize], len: usize) -> Result<BTreeSet<usize>, FlipError> {
    let mut set = BTreeSet::new();
    for &position in positions {
        if position >= len {
            return Err(FlipError::PositionOutOfRange { position, len });
        }
        if !set.insert(position) {
            return Err(FlipError::DuplicatePosition(position));
        }
    }
    Ok(set)
}

/// Returns `(a, b)`: the base series with `flips_a` resp. `flips_b` inverted.
pub fn build_flip_series(construction: &FlipConstruction) -> (OutcomeSeries, OutcomeSeries) {
    let a = construction
        .base
        .with_flips(construction.flips_a.iter().copied());
    let b = construction
        .base
        .with_flips(construction.flips_b.iter().copied());
    (a, b)
}

/// Uniformly random set of `k` distinct positions in `0..n`.
pub fn random_flip_positions<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
) -> Result<Vec<usize>, FlipError> {
    if k > n {
        return Err(FlipError::TooManyFlips { k, n });
    }
    Ok(index::sample(rng, n, k).into_vec())
}

/// Distribution of the mismatch count between two flipped copies of a base
/// series.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FlipDistribution {
    pub n: usize,
    pub k: usize,
    /// Number of `(flips_a, flips_b)` pairs examined.
    pub pairs: u64,
    /// Mismatch count between `a` and `b` → number of pairs.
    pub counts: BTreeMap<usize, u64>,
    /// Every mismatch count observed between the base and a flipped copy.
    pub base_mismatch_counts: BTreeSet<usize>,
}

impl FlipDistribution {
    pub fn new(n: usize, k: usize) -> Self {
        FlipDistribution {
            n,
            k,
            ..Default::default()
        }
    }

    pub fn record(&mut self, mismatches_ab: usize, mismatches_ca: usize, mismatches_cb: usize) {
        self.pairs += 1;
        *self.counts.entry(mismatches_ab).or_default() += 1;
        self.base_mismatch_counts.insert(mismatches_ca);
        self.base_mismatch_counts.insert(mismatches_cb);
    }

    pub fn merge(mut self, other: FlipDistribution) -> Self {
        self.pairs += other.pairs;
        for (m, c) in other.counts {
            *self.counts.entry(m).or_default() += c;
        }
        self.base_mismatch_counts.extend(other.base_mismatch_counts);
        self
    }

    fn fraction(&self, count: usize) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        count as f64 / self.n as f64
    }

    /// Distinct mismatch fractions `E(a, b)`, ascending.
    pub fn support(&self) -> Vec<f64> {
        self.counts.keys().map(|&m| self.fraction(m)).collect()
    }

    pub fn max_mismatches(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    pub fn min_mismatches(&self) -> Option<usize> {
        self.counts.keys().next().copied()
    }

    pub fn max_fraction(&self) -> Option<f64> {
        self.max_mismatches().map(|m| self.fraction(m))
    }

    pub fn min_fraction(&self) -> Option<f64> {
        self.min_mismatches().map(|m| self.fraction(m))
    }

    /// The bound `2k/n` on `E(a, b)`.
    pub fn bound(&self) -> f64 {
        (2 * self.k) as f64 / self.n as f64
    }

    /// Every recorded `E(a, b)` is at most `2k/n`.
    pub fn bound_holds(&self) -> bool {
        self.max_mismatches().is_none_or(|m| m <= 2 * self.k)
    }

    /// Every flipped copy sits exactly `k` positions from the base.
    pub fn base_mismatch_is_k(&self) -> bool {
        self.base_mismatch_counts.iter().all(|&m| m == self.k)
    }
}

/// Exhaustive distribution of `E(a, b)` over all ordered pairs of `k`-subsets
/// of flip positions, for `n ≤ 16`.
pub fn enumerate_flip_mismatches(
    base: &OutcomeSeries,
    k: usize,
) -> Result<FlipDistribution, FlipError> {
    let n = base.len();
    if n > MAX_ENUMERATION_LEN {
        return Err(FlipError::TooLarge {
            n,
            limit: MAX_ENUMERATION_LEN,
        });
    }
    if k > n {
        return Err(FlipError::TooManyFlips { k, n });
    }
    let base_mask = base
        .iter()
        .enumerate()
        .fold(0u32, |acc, (i, bit)| acc | ((bit as u32) << i));
    let subsets: Vec<u32> = (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .collect();

    let dist = subsets
        .par_iter()
        .map(|&flips_a| {
            let a = base_mask ^ flips_a;
            let mut local = FlipDistribution::new(n, k);
            for &flips_b in &subsets {
                let b = base_mask ^ flips_b;
                local.record(
                    (a ^ b).count_ones() as usize,
                    (base_mask ^ a).count_ones() as usize,
                    (base_mask ^ b).count_ones() as usize,
                );
            }
            local
        })
        .reduce(|| FlipDistribution::new(n, k), FlipDistribution::merge);
    Ok(dist)
}
