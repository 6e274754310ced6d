use std::fmt;

use serde::Serialize;

use super::HarnessError;
use crate::relativity::{
    classify_causal_relation, classify_interval, delta_t_prime, lorentz_transform,
    ordering_in_frame, reversal_threshold_beta, BoostDirection, CausalClassification,
    InertialFrame, IntervalClass, ReversalThreshold, SignalLink, SpacetimeEvent, C_EXACT,
};

const NS: f64 = 1e-9;

/// A signal of speed `u_over_c` covering `delta_x`, viewed from `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalScenario {
    pub u_over_c: f64,
    pub delta_x: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativityScenario {
    pub c: f64,
    pub event1: SpacetimeEvent<f64>,
    pub event2: SpacetimeEvent<f64>,
    /// Velocity of the second observer, as a fraction of `c`.
    pub frame_beta: f64,
    /// Declared by the experimenter; cannot be inferred from coordinates.
    pub entangled: bool,
    pub signal: Option<SignalScenario>,
}

impl RelativityScenario {
    /// Detectors at +15 m and -15.3 m registering 50 ns and 51 ns after
    /// emission, observed from a frame moving at -0.6c; plus a 1.1c signal
    /// over one light-second seen from 0.98c.
    pub fn paper_default() -> Self {
        RelativityScenario {
            c: C_EXACT,
            event1: SpacetimeEvent {
                x: 15.0,
                t: 50.0 * NS,
                label: "event 1 (D_A registers)".into(),
            },
            event2: SpacetimeEvent {
                x: -15.3,
                t: 51.0 * NS,
                label: "event 2 (D_B registers)".into(),
            },
            frame_beta: -0.6,
            entangled: true,
            signal: Some(SignalScenario {
                u_over_c: 1.1,
                delta_x: C_EXACT,
                beta: 0.98,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalReport {
    pub u_over_c: f64,
    pub delta_x: f64,
    pub delta_t: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_t_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativityReport {
    pub c: f64,
    pub frame_beta: f64,
    pub gamma: f64,
    pub events: [SpacetimeEvent<f64>; 2],
    pub events_in_frame: [SpacetimeEvent<f64>; 2],
    pub interval: IntervalClass,
    /// `None` when both events sit at the same `x`.
    pub reversal_threshold: Option<ReversalThreshold<f64>>,
    pub rest_frame: CausalClassification,
    pub moving_frame: CausalClassification,
    /// Frames on the grid `beta ∈ {-0.99, -0.98, …, 0.99}` in which the
    /// two events swap order relative to the rest frame.
    pub reversing_frames_in_grid: usize,
    pub signal: Option<SignalReport>,
}

/// Coordinates in both frames, interval class, reversal threshold and
/// causal classification for a pair of events.
pub fn run_relativity_example(
    scenario: &RelativityScenario,
) -> Result<RelativityReport, HarnessError> {
    let c = scenario.c;
    if !(c > 0.0 && c.is_finite()) {
        return Err(HarnessError::Config(format!(
            "speed of light must be positive, got {c}"
        )));
    }
    let e1 = SpacetimeEvent::new(
        scenario.event1.x,
        scenario.event1.t,
        scenario.event1.label.clone(),
    )?;
    let e2 = SpacetimeEvent::new(
        scenario.event2.x,
        scenario.event2.t,
        scenario.event2.label.clone(),
    )?;
    let frame = InertialFrame::new(scenario.frame_beta)?;
    let rest = InertialFrame::rest();

    let reversal_threshold = match reversal_threshold_beta(&e1, &e2, c) {
        Ok(th) => Some(th),
        Err(crate::relativity::RelativityError::CoincidentPositions) => None,
        Err(e) => return Err(e.into()),
    };
    let rest_order = ordering_in_frame(&e1, &e2, &rest, c);
    let reversing_frames_in_grid = (-99..=99)
        .map(|i| InertialFrame::new(i as f64 / 100.0).expect("grid inside (-1, 1)"))
        .filter(|f| {
            let order = ordering_in_frame(&e1, &e2, f, c);
            order != rest_order
        })
        .count();

    let signal = match scenario.signal {
        Some(s) => {
            let link = SignalLink::from_distance(s.u_over_c, s.delta_x, c)?;
            let observer = InertialFrame::new(s.beta)?;
            Some(SignalReport {
                u_over_c: s.u_over_c,
                delta_x: s.delta_x,
                delta_t: link.delta_t,
                beta: s.beta,
                gamma: observer.gamma(),
                delta_t_prime: delta_t_prime(&link, &observer, c),
            })
        }
        None => None,
    };

    Ok(RelativityReport {
        c,
        frame_beta: frame.beta(),
        gamma: frame.gamma(),
        events_in_frame: [
            lorentz_transform(&e1, &frame, c),
            lorentz_transform(&e2, &frame, c),
        ],
        interval: classify_interval(&e1, &e2, c),
        reversal_threshold,
        rest_frame: classify_causal_relation(&e1, &e2, scenario.entangled, &rest, c),
        moving_frame: classify_causal_relation(&e1, &e2, scenario.entangled, &frame, c),
        reversing_frames_in_grid,
        signal,
        events: [e1, e2],
    })
}

impl fmt::Display for RelativityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "c = {} m/s", self.c)?;
        writeln!(f, "rest frame S:")?;
        for e in &self.events {
            writeln!(
                f,
                "  {:<26} x = {:>12.6} m   t = {:>12.6} ns",
                e.label,
                e.x,
                e.t / NS
            )?;
        }
        writeln!(
            f,
            "frame S' (beta = {}, gamma = {:.6}):",
            self.frame_beta, self.gamma
        )?;
        for e in &self.events_in_frame {
            writeln!(
                f,
                "  {:<26} x' = {:>11.6} m   t' = {:>11.6} ns",
                e.label,
                e.x,
                e.t / NS
            )?;
        }
        writeln!(f, "interval: {}", self.interval)?;
        match &self.reversal_threshold {
            Some(th) if th.is_reachable() => {
                let side = match th.direction {
                    BoostDirection::Positive => "beta >",
                    BoostDirection::Negative => "beta <",
                    BoostDirection::Either => "|beta| >",
                };
                writeln!(f, "order reverses for {side} {:.6}", th.signed_beta())?
            }
            Some(th) => writeln!(
                f,
                "order cannot reverse: threshold {:.6}c ≥ c",
                th.magnitude
            )?,
            None => writeln!(f, "events share x; no reversal threshold")?,
        }
        writeln!(
            f,
            "in S : {} ({})",
            self.rest_frame.relation, self.rest_frame.ordering
        )?;
        writeln!(
            f,
            "in S': {} ({})",
            self.moving_frame.relation, self.moving_frame.ordering
        )?;
        write!(
            f,
            "frames on beta grid [-0.99, 0.99] that reverse the order: {}",
            self.reversing_frames_in_grid
        )?;
        if let Some(s) = &self.signal {
            write!(
                f,
                "\nsignal at u = {}c over {} m: dt = {:.4} s; seen from v = {}c (gamma = {:.3}): dt' = {:.3} s",
                s.u_over_c, s.delta_x, s.delta_t, s.beta, s.gamma, s.delta_t_prime
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relativity::{CausalRelation, FrameOrdering};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn default_scenario() {
        let r = run_relativity_example(&RelativityScenario::paper_default()).unwrap();
        assert_relative_eq!(r.events_in_frame[0].t, 100.0 * NS, max_relative = 1e-9);
        assert_relative_eq!(r.events_in_frame[1].t, 25.5 * NS, max_relative = 1e-9);
        assert_eq!(r.interval, IntervalClass::Spacelike);
        assert_abs_diff_eq!(
            r.reversal_threshold.unwrap().magnitude,
            0.0099,
            epsilon = 1e-5
        );
        assert_eq!(r.rest_frame.relation, CausalRelation::SymmetricEntangled);
        assert_eq!(r.rest_frame.ordering, FrameOrdering::Event1First);
        assert_eq!(r.moving_frame.ordering, FrameOrdering::Event2First);
        // beta in {-0.99, …, -0.01} reverses the order
        assert_eq!(r.reversing_frames_in_grid, 99);
        let s = r.signal.as_ref().unwrap();
        assert_abs_diff_eq!(s.delta_t_prime, -0.356, epsilon = 1e-3);
        assert_abs_diff_eq!(s.gamma, 5.025, epsilon = 1e-3);
        let text = r.to_string();
        assert!(text.contains("100.000000 ns"));
        assert!(text.contains("25.500000 ns"));
    }

    #[test]
    fn timelike_custom_pair_never_reverses() {
        let scenario = RelativityScenario {
            event1: SpacetimeEvent::new(0.0, 0.0, "emit").unwrap(),
            event2: SpacetimeEvent::new(10.0, 100.0 * NS, "absorb").unwrap(),
            frame_beta: 0.9,
            entangled: false,
            signal: None,
            ..RelativityScenario::paper_default()
        };
        let r = run_relativity_example(&scenario).unwrap();
        assert_eq!(r.interval, IntervalClass::Timelike);
        assert_eq!(r.reversing_frames_in_grid, 0);
        assert!(!r.reversal_threshold.unwrap().is_reachable());
        assert_eq!(r.moving_frame.relation, CausalRelation::Event1CausesEvent2);
    }

    #[test]
    fn invalid_scenarios() {
        let mut s = RelativityScenario::paper_default();
        s.frame_beta = 1.2;
        assert!(run_relativity_example(&s).is_err());
        let mut s = RelativityScenario::paper_default();
        s.c = 0.0;
        assert!(run_relativity_example(&s).is_err());
        let mut s = RelativityScenario::paper_default();
        s.signal = Some(SignalScenario {
            u_over_c: 1.1,
            delta_x: 1.0,
            beta: -1.0,
        });
        assert!(run_relativity_example(&s).is_err());
    }
}
