//! Monte Carlo Bell experiments with entangled photon pairs.
//!
//! The crate pairs a collapse-model simulation of polarization-entangled
//! photons with local hidden-variable counter-models, mismatch statistics
//! for the inequality `E(2θ) ≤ 2E(θ)`, and one-dimensional Lorentz
//! kinematics that show how the time order of the two detections depends
//! on the observer's frame.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the common double-precision case. The experiment
//! harness and CLI work in `f64`.

pub mod harness;
pub mod hidden;
pub mod quantum;
pub mod relativity;
pub mod scalar;
pub mod stats;

pub use hidden::{
    analytic_mismatch_lhv_threshold, build_flip_series, enumerate_flip_mismatches,
    sample_trial_lhv, FlipConstruction, FlipDistribution, FlipError, HiddenPairState,
};
pub use quantum::{
    analytic_mismatch_qm, joint_probabilities_qm, malus_pass_probability, relative_angle,
    sample_trial_qm, Angle, JointDistribution, MeasurementOrder, PairState, PhiPolicy,
    QuantumError, TrialOutcome,
};
pub use relativity::{
    classify_causal_relation, classify_interval, delta_t_prime, lorentz_transform,
    reversal_threshold_beta, CausalClassification, CausalRelation, FrameOrdering, InertialFrame,
    IntervalClass, RelativityError, ReversalThreshold, SignalLink, SpacetimeEvent, C_EXACT, C_SI,
};
pub use scalar::Real;
pub use stats::{
    bell_gap, mismatch_fraction, sweep_gap_analytic, BellGapReport, BellVerdict, MismatchStats,
    Model, OutcomeSeries, StatsError,
};

pub type Angle64 = Angle<f64>;
pub type Angle32 = Angle<f32>;
pub type PairState64 = PairState<f64>;
pub type HiddenPairState64 = HiddenPairState<f64>;
pub type PhiPolicy64 = PhiPolicy<f64>;
pub type JointDistribution64 = JointDistribution<f64>;
pub type MismatchStats64 = MismatchStats<f64>;
pub type BellGapReport64 = BellGapReport<f64>;
pub type SpacetimeEvent64 = SpacetimeEvent<f64>;
pub type InertialFrame64 = InertialFrame<f64>;
pub type SignalLink64 = SignalLink<f64>;
pub type ReversalThreshold64 = ReversalThreshold<f64>;
