use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::rng::TrialStreams;
use super::HarnessError;
use crate::hidden::{
    build_flip_series, enumerate_flip_mismatches, random_flip_positions, FlipConstruction,
    FlipDistribution, FlipError,
};
use crate::stats::OutcomeSeries;

/// Default 12-digit base series for the flip demonstration.
pub const REFERENCE_SERIES: [u8; 12] = [0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 1, 0];

const BASE_STREAM: u64 = 0xba5e;
const SAMPLE_STREAM: u64 = 0xf1195;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesDemoMode {
    Sampled { samples: u64 },
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesDemoConfig {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub mode: SeriesDemoMode,
    /// Base series; defaults to [`REFERENCE_SERIES`] when `n == 12`, else a
    /// seeded random series.
    pub base: Option<OutcomeSeries>,
}

impl Default for SeriesDemoConfig {
    fn default() -> Self {
        SeriesDemoConfig {
            n: 12,
            k: 4,
            seed: super::config::DEFAULT_SEED,
            mode: SeriesDemoMode::Exhaustive,
            base: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesDemoReport {
    pub mode: SeriesDemoMode,
    pub base: String,
    pub distribution: FlipDistribution,
    pub bound: f64,
    pub bound_holds: bool,
    pub max_fraction: Option<f64>,
    pub min_fraction: Option<f64>,
}

fn base_series(config: &SeriesDemoConfig) -> Result<OutcomeSeries, HarnessError> {
    match &config.base {
        Some(base) if base.len() != config.n => Err(HarnessError::Config(format!(
            "base series has length {}, expected n = {}",
            base.len(),
            config.n
        ))),
        Some(base) => Ok(base.clone()),
        None if config.n == REFERENCE_SERIES.len() => {
            Ok(OutcomeSeries::from_bits(&REFERENCE_SERIES)?)
        }
        None => {
            let mut rng = TrialStreams::new(config.seed, BASE_STREAM).for_trial(0);
            Ok((0..config.n).map(|_| rng.random::<bool>()).collect())
        }
    }
}

/// Distribution of `E(a, b)` for two `k`-flip copies of a base series of
/// length `n`, either sampled or enumerated exhaustively.
pub fn run_series_demo(config: &SeriesDemoConfig) -> Result<SeriesDemoReport, HarnessError> {
    let (n, k) = (config.n, config.k);
    if k > n {
        return Err(FlipError::TooManyFlips { k, n }.into());
    }
    let base = base_series(config)?;
    let distribution = match config.mode {
        SeriesDemoMode::Exhaustive => enumerate_flip_mismatches(&base, k)?,
        SeriesDemoMode::Sampled { samples } => {
            let streams = TrialStreams::new(config.seed, SAMPLE_STREAM);
            (0..samples)
                .into_par_iter()
                .map(|i| -> Result<FlipDistribution, HarnessError> {
                    let mut rng = streams.for_trial(i);
                    let flips_a = random_flip_positions(&mut rng, n, k)?;
                    let flips_b = random_flip_positions(&mut rng, n, k)?;
                    let construction = FlipConstruction::new(base.clone(), &flips_a, &flips_b)?;
                    let (a, b) = build_flip_series(&construction);
                    let mut one = FlipDistribution::new(n, k);
                    one.record(
                        a.hamming_distance(&b)? as usize,
                        base.hamming_distance(&a)? as usize,
                        base.hamming_distance(&b)? as usize,
                    );
                    Ok(one)
                })
                .try_reduce(|| FlipDistribution::new(n, k), |x, y| Ok(x.merge(y)))?
        }
    };
    if !distribution.bound_holds() {
        return Err(HarnessError::Invariant(format!(
            "flip mismatch {:?} exceeds 2k = {}",
            distribution.max_mismatches(),
            2 * k
        )));
    }
    Ok(SeriesDemoReport {
        mode: config.mode,
        base: base.to_string(),
        bound: distribution.bound(),
        bound_holds: distribution.bound_holds(),
        max_fraction: distribution.max_fraction(),
        min_fraction: distribution.min_fraction(),
        distribution,
    })
}

impl fmt::Display for SeriesDemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.distribution;
        let mode = match self.mode {
            SeriesDemoMode::Exhaustive => "exhaustive".to_string(),
            SeriesDemoMode::Sampled { samples } => format!("sampled ({samples} draws)"),
        };
        writeln!(
            f,
            "series-flip demo: n = {}, k = {}, mode = {mode}",
            d.n, d.k
        )?;
        writeln!(f, "base series c     : {}", self.base)?;
        writeln!(f, "flip-set pairs    : {}", d.pairs)?;
        writeln!(f, "E(a,b) distribution:")?;
        for (&m, &count) in &d.counts {
            writeln!(
                f,
                "  {m:>2}/{:<2} = {:.6}  {count}",
                d.n,
                m as f64 / d.n.max(1) as f64
            )?;
        }
        let base_gaps: Vec<String> = d
            .base_mismatch_counts
            .iter()
            .map(|m| format!("{m}/{}", d.n))
            .collect();
        writeln!(f, "E(c,a), E(c,b)    : {}", base_gaps.join(", "))?;
        writeln!(
            f,
            "min / max E(a,b)  : {} / {}",
            self.min_fraction.map_or("-".into(), |x| format!("{x:.6}")),
            self.max_fraction.map_or("-".into(), |x| format!("{x:.6}"))
        )?;
        write!(
            f,
            "bound 2k/n = {:.6}: {}",
            self.bound,
            if self.bound_holds {
                "holds"
            } else {
                "VIOLATED"
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exhaustive_default() {
        let report = run_series_demo(&SeriesDemoConfig::default()).unwrap();
        assert_eq!(report.base, "0,0,1,0,1,0,1,1,0,1,1,0");
        assert_eq!(report.distribution.pairs, 245_025);
        assert_abs_diff_eq!(report.max_fraction.unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(report.min_fraction, Some(0.0));
        assert!(report.bound_holds);
    }

    #[test]
    fn sampled_within_exhaustive_support() {
        let exhaustive = run_series_demo(&SeriesDemoConfig::default()).unwrap();
        let sampled = run_series_demo(&SeriesDemoConfig {
            mode: SeriesDemoMode::Sampled { samples: 100_000 },
            ..Default::default()
        })
        .unwrap();
        assert_eq!(sampled.distribution.pairs, 100_000);
        assert!(sampled.max_fraction.unwrap() <= 2.0 / 3.0 + 1e-15);
        for m in sampled.distribution.counts.keys() {
            assert!(exhaustive.distribution.counts.contains_key(m));
        }
        assert!(sampled.distribution.base_mismatch_is_k());
    }

    #[test]
    fn sampled_is_deterministic_across_pools() {
        let cfg = SeriesDemoConfig {
            n: 20,
            k: 5,
            mode: SeriesDemoMode::Sampled { samples: 5_000 },
            ..Default::default()
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_series_demo(&cfg).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn zero_flips() {
        let report = run_series_demo(&SeriesDemoConfig {
            k: 0,
            mode: SeriesDemoMode::Sampled { samples: 100 },
            ..Default::default()
        })
        .unwrap();
        assert_eq!(
            report
                .distribution
                .counts
                .keys()
                .copied()
                .collect::<Vec<_>>(),
            vec![0]
        );
    }

    #[test]
    fn guards() {
        let too_long = SeriesDemoConfig {
            n: 17,
            ..Default::default()
        };
        assert!(matches!(
            run_series_demo(&too_long),
            Err(HarnessError::Flip(FlipError::TooLarge { .. }))
        ));
        let too_many = SeriesDemoConfig {
            k: 13,
            ..Default::default()
        };
        assert!(run_series_demo(&too_many).is_err());
        let wrong_base = SeriesDemoConfig {
            base: Some(OutcomeSeries::from_bits(&[0, 1]).unwrap()),
            ..Default::default()
        };
        assert!(run_series_demo(&wrong_base).is_err());
    }
}
