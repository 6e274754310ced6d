//! One-dimensional Lorentz kinematics for pairs of detection events.
//!
//! Frames are boosts along `x`. A frame's `beta` is the velocity of the
//! primed frame measured in the unprimed one, as a fraction of `c`. Events
//! are `(x, t)` in meters and seconds.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;

/// Speed of light with the length unit chosen so that the value is exact.
pub const C_EXACT: f64 = 3.0e8;

/// SI speed of light in m/s.
pub const C_SI: f64 = 299_792_458.0;

/// Relative tolerance on `c²Δt² - Δx²` for calling an interval lightlike.
pub const LIGHTLIKE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelativityError {
    #[error("boost velocity beta = {0} is not inside (-1, 1)")]
    InvalidFrame(f64),
    #[error("event `{0}` has a non-finite coordinate")]
    NonFiniteCoordinate(String),
    #[error("events share the same x coordinate; the reversal threshold is undefined")]
    CoincidentPositions,
    #[error("signal link is inconsistent: delta_x = {delta_x} m, delta_t = {delta_t} s, u = {u_over_c} c")]
    InconsistentLink {
        u_over_c: f64,
        delta_x: f64,
        delta_t: f64,
    },
    #[error("speed of light must be positive and finite, got {0}")]
    InvalidSpeedOfLight(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacetimeEvent<T> {
    pub x: T,
    pub t: T,
    pub label: String,
}

impl<T: Real> SpacetimeEvent<T> {
    pub fn new(x: T, t: T, label: impl Into<String>) -> Result<Self, RelativityError> {
        let label = label.into();
        if !x.is_finite() || !t.is_finite() {
            return Err(RelativityError::NonFiniteCoordinate(label));
        }
        Ok(SpacetimeEvent { x, t, label })
    }
}

impl<T: Real> fmt::Display for SpacetimeEvent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (x = {} m, t = {} s)", self.label, self.x, self.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InertialFrame<T> {
    beta: T,
}

impl<T: Real> InertialFrame<T> {
    pub fn new(beta: T) -> Result<Self, RelativityError> {
        if beta.is_nan() || beta.abs() >= T::one() {
            return Err(RelativityError::InvalidFrame(beta.as_f64()));
        }
        Ok(InertialFrame { beta })
    }

    pub fn rest() -> Self {
        InertialFrame { beta: T::zero() }
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn gamma(&self) -> T {
        T::one() / (T::one() - self.beta * self.beta).sqrt()
    }

    /// Frame reached by boosting with `self` and then with `other`
    /// (relativistic velocity addition).
    pub fn then(&self, other: &Self) -> Result<Self, RelativityError> {
        Self::new((self.beta + other.beta) / (T::one() + self.beta * other.beta))
    }
}

fn check_c<T: Real>(c: T) -> Result<T, RelativityError> {
    if c > T::zero() && c.is_finite() {
        Ok(c)
    } else {
        Err(RelativityError::InvalidSpeedOfLight(c.as_f64()))
    }
}

/// Coordinates of `event` in `frame`: `t' = γ(t - vx/c²)`, `x' = γ(x - vt)`.
pub fn lorentz_transform<T: Real>(
    event: &SpacetimeEvent<T>,
    frame: &InertialFrame<T>,
    c: T,
) -> SpacetimeEvent<T> {
    let gamma = frame.gamma();
    let beta = frame.beta;
    SpacetimeEvent {
        x: gamma * (event.x - beta * c * event.t),
        t: gamma * (event.t - beta * event.x / c),
        label: event.label.clone(),
    }
}

/// A signal connecting two events at speed `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalLink<T> {
    /// Signal speed in units of `c`; infinite for an instantaneous link.
    pub u_over_c: T,
    pub delta_x: T,
    pub delta_t: T,
}

impl<T: Real> SignalLink<T> {
    /// Link covering `delta_x` at speed `u_over_c`; the travel time follows.
    pub fn from_distance(u_over_c: T, delta_x: T, c: T) -> Result<Self, RelativityError> {
        let c = check_c(c)?;
        let invalid = || RelativityError::InconsistentLink {
            u_over_c: u_over_c.as_f64(),
            delta_x: delta_x.as_f64(),
            delta_t: f64::NAN,
        };
        if u_over_c.is_nan() || u_over_c == T::zero() || !delta_x.is_finite() {
            return Err(invalid());
        }
        let delta_t = if u_over_c.is_infinite() {
            if delta_x == T::zero() {
                return Err(invalid());
            }
            T::zero()
        } else {
            delta_x / (u_over_c * c)
        };
        Ok(SignalLink {
            u_over_c,
            delta_x,
            delta_t,
        })
    }

    /// Link implied by two events; infinite speed when they are simultaneous.
    pub fn between(
        event1: &SpacetimeEvent<T>,
        event2: &SpacetimeEvent<T>,
        c: T,
    ) -> Result<Self, RelativityError> {
        let c = check_c(c)?;
        let delta_x = event2.x - event1.x;
        let delta_t = event2.t - event1.t;
        if delta_x == T::zero() && delta_t == T::zero() {
            return Err(RelativityError::InconsistentLink {
                u_over_c: f64::NAN,
                delta_x: 0.0,
                delta_t: 0.0,
            });
        }
        let u_over_c = if delta_t == T::zero() {
            T::infinity() * delta_x.signum()
        } else {
            delta_x / (c * delta_t)
        };
        Ok(SignalLink {
            u_over_c,
            delta_x,
            delta_t,
        })
    }
}

/// Time between the two ends of `link` as seen in `frame`:
/// `Δt' = γΔt(1 - uv/c²)`, or `-γvΔx/c²` for an instantaneous link.
pub fn delta_t_prime<T: Real>(link: &SignalLink<T>, frame: &InertialFrame<T>, c: T) -> T {
    let gamma = frame.gamma();
    if link.u_over_c.is_infinite() {
        -gamma * frame.beta * link.delta_x / c
    } else {
        gamma * link.delta_t * (T::one() - link.u_over_c * frame.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoostDirection {
    Positive,
    Negative,
    /// Simultaneous events: any nonzero boost orders them, the sign of the
    /// boost picks which one comes first.
    Either,
}

/// Smallest boost speed at which two events swap their time order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReversalThreshold<T> {
    /// `c|t₂ - t₁| / |x₁ - x₂|`.
    pub magnitude: T,
    /// Sign of the boosts that reverse the order.
    pub direction: BoostDirection,
}

impl<T: Real> ReversalThreshold<T> {
    /// The boundary as a signed velocity. With `Negative` direction this is
    /// `-magnitude`, so reversal reads `-v/c ≥ magnitude`.
    pub fn signed_beta(&self) -> T {
        match self.direction {
            BoostDirection::Negative => -self.magnitude,
            _ => self.magnitude,
        }
    }

    /// Whether some physical frame (`|beta| < 1`) reverses the order.
    pub fn is_reachable(&self) -> bool {
        self.magnitude < T::one()
    }

    /// Whether boosting into `frame` strictly reverses the order.
    pub fn reverses(&self, frame: &InertialFrame<T>) -> bool {
        let beta = frame.beta();
        let aligned = match self.direction {
            BoostDirection::Positive => beta > T::zero(),
            BoostDirection::Negative => beta < T::zero(),
            BoostDirection::Either => beta != T::zero(),
        };
        aligned && beta.abs() > self.magnitude
    }
}

pub fn reversal_threshold_beta<T: Real>(
    event1: &SpacetimeEvent<T>,
    event2: &SpacetimeEvent<T>,
    c: T,
) -> Result<ReversalThreshold<T>, RelativityError> {
    let c = check_c(c)?;
    let delta_x = event2.x - event1.x;
    let delta_t = event2.t - event1.t;
    if delta_x == T::zero() {
        return Err(RelativityError::CoincidentPositions);
    }
    let magnitude = (c * delta_t / delta_x).abs();
    let direction = if delta_t == T::zero() {
        BoostDirection::Either
    } else if (delta_t > T::zero()) == (delta_x > T::zero()) {
        BoostDirection::Positive
    } else {
        BoostDirection::Negative
    };
    Ok(ReversalThreshold {
        magnitude,
        direction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalClass {
    Timelike,
    Lightlike,
    Spacelike,
}

impl fmt::Display for IntervalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntervalClass::Timelike => "timelike",
            IntervalClass::Lightlike => "lightlike",
            IntervalClass::Spacelike => "spacelike",
        })
    }
}

/// `c²Δt² - Δx²` between two events.
pub fn interval_squared<T: Real>(
    event1: &SpacetimeEvent<T>,
    event2: &SpacetimeEvent<T>,
    c: T,
) -> T {
    let ct = c * (event2.t - event1.t);
    let dx = event2.x - event1.x;
    ct * ct - dx * dx
}

pub fn classify_interval<T: Real>(
    event1: &SpacetimeEvent<T>,
    event2: &SpacetimeEvent<T>,
    c: T,
) -> IntervalClass {
    let ct = c * (event2.t - event1.t);
    let dx = event2.x - event1.x;
    let s = ct * ct - dx * dx;
    let scale = ct * ct + dx * dx;
    if s.abs() <= T::lit(LIGHTLIKE_TOLERANCE) * scale {
        IntervalClass::Lightlike
    } else if s > T::zero() {
        IntervalClass::Timelike
    } else {
        IntervalClass::Spacelike
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalRelation {
    Event1CausesEvent2,
    Event2CausesEvent1,
    Unrelated,
    /// Correlated spacelike pair: whichever event comes first in a frame acts
    /// as the cause in that frame.
    SymmetricEntangled,
}

impl fmt::Display for CausalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CausalRelation::Event1CausesEvent2 => "event1_causes_event2",
            CausalRelation::Event2CausesEvent1 => "event2_causes_event1",
            CausalRelation::Unrelated => "unrelated",
            CausalRelation::SymmetricEntangled => "symmetric_entangled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameOrdering {
    Event1First,
    Event2First,
    Simultaneous,
}

impl fmt::Display for FrameOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameOrdering::Event1First => "event 1 first",
            FrameOrdering::Event2First => "event 2 first",
            FrameOrdering::Simultaneous => "simultaneous",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CausalClassification {
    pub interval: IntervalClass,
    pub relation: CausalRelation,
    /// Which event happens first in the frame that was asked about.
    pub ordering: FrameOrdering,
}

/// Time order of the two events seen from `frame`.
pub fn ordering_in_frame<T: Real>(
    event1: &SpacetimeEvent<T>,
    event2: &SpacetimeEvent<T>,
    frame: &InertialFrame<T>,
    c: T,
) -> FrameOrdering {
    let dt = event2.t - event1.t;
    let dx = event2.x - event1.x;
    let dt_prime = frame.gamma() * (dt - frame.beta * dx / c);
    if dt_prime > T::zero() {
        FrameOrdering::Event1First
    } else if dt_prime < T::zero() {
        FrameOrdering::Event2First
    } else {
        FrameOrdering::Simultaneous
    }
}

/// Four-way causal classification of two events.
///
/// Inside or on the light cone the earlier event causes the later one in
/// every frame. Outside it, the pair is unrelated unless the caller declares
/// it entangled, in which case the cause is whichever event comes first in
/// `frame`.
pub fn classify_causal_relation<T: Real>(
    event1: &SpacetimeEvent<T>,
    event2: &SpacetimeEvent<T>,
    entangled: bool,
    frame: &InertialFrame<T>,
    c: T,
) -> CausalClassification {
    let interval = classify_interval(event1, event2, c);
    let ordering = ordering_in_frame(event1, event2, frame, c);
    let relation = match interval {
        IntervalClass::Timelike | IntervalClass::Lightlike => {
            if event2.t > event1.t {
                CausalRelation::Event1CausesEvent2
            } else if event1.t > event2.t {
                CausalRelation::Event2CausesEvent1
            } else {
                // coincident events
                CausalRelation::Unrelated
            }
        }
        IntervalClass::Spacelike if entangled => CausalRelation::SymmetricEntangled,
        IntervalClass::Spacelike => CausalRelation::Unrelated,
    };
    CausalClassification {
        interval,
        relation,
        ordering,
    }
}
