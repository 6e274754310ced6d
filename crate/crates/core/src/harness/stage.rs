use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Stage};
use super::rng::{stream_id, TrialStreams};
use super::HarnessError;
use crate::hidden::{sample_trial_lhv, HiddenPairState};
use crate::quantum::{sample_trial_qm, Angle, PairState};
use crate::stats::{mismatch_fraction, MismatchStats, Model, OutcomeSeries};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageResult {
    pub stage: Stage,
    pub model: Model,
    pub theta: f64,
    pub axis_a: Angle<f64>,
    pub axis_b: Angle<f64>,
    pub stats: MismatchStats<f64>,
    #[serde(skip)]
    pub series_a: OutcomeSeries,
    #[serde(skip)]
    pub series_b: OutcomeSeries,
}

/// Runs `config.trials` pairs through polarizers at `axis_a`/`axis_b` and
/// returns both detector records. Trials run on the current rayon pool.
pub fn simulate_series(
    config: &ExperimentConfig,
    axis_a: Angle<f64>,
    axis_b: Angle<f64>,
    stream: u64,
) -> Result<(OutcomeSeries, OutcomeSeries), HarnessError> {
    let streams = TrialStreams::new(config.seed, stream);
    let order = config.order();
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.for_trial(i);
            match config.model {
                Model::Qm => {
                    let mut pair = PairState::new(config.phi_policy.draw(&mut rng));
                    sample_trial_qm(&mut pair, axis_a, axis_b, order, &mut rng)
                }
                Model::LhvThreshold => Ok(sample_trial_lhv(
                    HiddenPairState::sample(&mut rng),
                    axis_a,
                    axis_b,
                )),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let series_a = outcomes.iter().map(|o| o.bit_a).collect();
    let series_b = outcomes.iter().map(|o| o.bit_b).collect();
    Ok((series_a, series_b))
}

pub fn run_stage(config: &ExperimentConfig, stage: Stage) -> Result<StageResult, HarnessError> {
    config.validate(90.0)?;
    let (axis_a, axis_b) = stage.axes(config.theta);
    let (series_a, series_b) =
        simulate_series(config, axis_a, axis_b, stream_id(stage, config.theta))?;
    let stats: MismatchStats<f64> = mismatch_fraction(&series_a, &series_b)?;
    if !(0.0..=1.0).contains(&stats.e()) || stats.e() + stats.f() != 1.0 {
        return Err(HarnessError::Invariant(format!(
            "mismatch fraction {} / match fraction {} inconsistent",
            stats.e(),
            stats.f()
        )));
    }
    Ok(StageResult {
        stage,
        model: config.model,
        theta: config.theta,
        axis_a,
        axis_b,
        stats,
        series_a,
        series_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::PhiPolicy;

    fn config(model: Model, theta: f64, trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            model,
            theta,
            trials,
            seed: 2024,
            ..Default::default()
        }
    }

    #[test]
    fn stage_one_never_mismatches() {
        for model in [Model::Qm, Model::LhvThreshold] {
            for theta in [0.0, 17.0, 30.0, 90.0] {
                let r = run_stage(&config(model, theta, 10_000), Stage::One).unwrap();
                assert_eq!(r.stats.e(), 0.0);
                assert_eq!(r.series_a, r.series_b);
            }
        }
        let fixed = ExperimentConfig {
            phi_policy: PhiPolicy::Fixed(Angle::from_degrees(37.0)),
            ..config(Model::Qm, 30.0, 10_000)
        };
        assert_eq!(run_stage(&fixed, Stage::One).unwrap().stats.e(), 0.0);
    }

    #[test]
    fn stage_four_at_thirty_degrees() {
        let qm = run_stage(&config(Model::Qm, 30.0, 100_000), Stage::Four).unwrap();
        assert!(qm.stats.contains(0.75), "qm e = {}", qm.stats.e());
        let lhv = run_stage(&config(Model::LhvThreshold, 30.0, 100_000), Stage::Four).unwrap();
        assert!(lhv.stats.contains(2.0 / 3.0), "lhv e = {}", lhv.stats.e());
    }

    #[test]
    fn stages_two_and_three_agree() {
        for model in [Model::Qm, Model::LhvThreshold] {
            let cfg = config(model, 25.0, 100_000);
            let two = run_stage(&cfg, Stage::Two).unwrap().stats;
            let three = run_stage(&cfg, Stage::Three).unwrap().stats;
            let combined = (two.ci_half_width().powi(2) + three.ci_half_width().powi(2)).sqrt();
            assert!((two.e() - three.e()).abs() <= combined);
        }
    }

    #[test]
    fn measurement_order_does_not_change_mismatch() {
        let a_first = config(Model::Qm, 40.0, 100_000);
        let b_first = ExperimentConfig {
            measure_a_first: false,
            ..a_first.clone()
        };
        let expected = (40.0f64).to_radians().sin().powi(2);
        assert!(run_stage(&a_first, Stage::Two)
            .unwrap()
            .stats
            .contains(expected));
        assert!(run_stage(&b_first, Stage::Two)
            .unwrap()
            .stats
            .contains(expected));
    }

    #[test]
    fn series_independent_of_thread_count() {
        let cfg = config(Model::Qm, 30.0, 20_000);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_stage(&cfg, Stage::Four).unwrap())
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one.series_a, four.series_a);
        assert_eq!(one.series_b, four.series_b);
        assert_eq!(one.stats, four.stats);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(run_stage(&config(Model::Qm, 30.0, 0), Stage::Two).is_err());
        assert!(run_stage(&config(Model::Qm, 120.0, 10), Stage::Two).is_err());
    }
}
