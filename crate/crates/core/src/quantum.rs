//! Collapse model of the two-photon polarization experiment.
//!
//! Both photons leave the source with one shared linear polarization. The
//! first detection samples Malus's law against that polarization and
//! collapses the pair onto the measuring axis (photon passed) or onto the
//! perpendicular axis (photon blocked). The second detection then samples
//! Malus's law against the collapsed polarization.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantumError {
    #[error("photon pair has already collapsed; a pair can only be sampled once")]
    AlreadyCollapsed,
    #[error("invalid polarization policy `{0}` (expected `uniform` or `fixed:<degrees>`)")]
    InvalidPhiPolicy(String),
}

/// Orientation of a polarization axis in degrees.
///
/// Polarization is axial, so the stored value is the canonical
/// representative in `[0, 180)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize)]
#[serde(transparent)]
pub struct Angle<T> {
    degrees: T,
}

impl<T: Real> Angle<T> {
    pub fn from_degrees(degrees: T) -> Self {
        Angle {
            degrees: canonicalize(degrees),
        }
    }

    pub fn zero() -> Self {
        Angle { degrees: T::zero() }
    }

    pub fn degrees(self) -> T {
        self.degrees
    }

    pub fn radians(self) -> T {
        self.degrees.to_radians()
    }

    /// The axis rotated by 90°.
    pub fn perpendicular(self) -> Self {
        Self::from_degrees(self.degrees + T::lit(90.0))
    }

    /// Rotates the axis counterclockwise by `degrees`.
    pub fn rotated(self, degrees: T) -> Self {
        Self::from_degrees(self.degrees + degrees)
    }

    /// Smallest angle between the two axes, in `[0, 90]` degrees.
    pub fn relative_to(self, other: Self) -> T {
        relative_angle(self, other)
    }
}

impl<T: Real> fmt::Display for Angle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}°", self.degrees)
    }
}

/// Reduces an angle in degrees to `[0, 180)`.
pub fn canonicalize<T: Real>(degrees: T) -> T {
    let half_turn = T::lit(180.0);
    let mut r = degrees % half_turn;
    if r < T::zero() {
        r = r + half_turn;
    }
    // -tiny + 180 rounds up to 180
    if r >= half_turn {
        r = T::zero();
    }
    r
}

/// Smallest angle between two polarization axes, in `[0, 90]` degrees.
pub fn relative_angle<T: Real>(a: Angle<T>, b: Angle<T>) -> T {
    let diff = (a.degrees - b.degrees).abs();
    let right = T::lit(90.0);
    if diff > right {
        T::lit(180.0) - diff
    } else {
        diff
    }
}

// Half-angle forms keep the aligned and perpendicular cases exact.
fn cos_sq_deg<T: Real>(degrees: T) -> T {
    let half = T::lit(0.5);
    half + half * (T::lit(2.0) * degrees).to_radians().cos()
}

fn sin_sq_deg<T: Real>(degrees: T) -> T {
    let half = T::lit(0.5);
    half - half * (T::lit(2.0) * degrees).to_radians().cos()
}

/// Probability that a photon polarized along `photon_polarization` passes a
/// polarizer whose axis is `polarizer_axis` (Malus's law, `cos²θ`).
pub fn malus_pass_probability<T: Real>(
    photon_polarization: Angle<T>,
    polarizer_axis: Angle<T>,
) -> T {
    cos_sq_deg(relative_angle(photon_polarization, polarizer_axis))
}

/// Closed-form mismatch rate `sin²θ` for polarizers separated by `theta_rel`.
pub fn analytic_mismatch_qm<T: Real>(theta_rel: Angle<T>) -> T {
    sin_sq_deg(relative_angle(theta_rel, Angle::zero()))
}

/// Outcome of one photon-pair trial. `true` means the photon passed the
/// polarizer and was registered by the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialOutcome {
    pub bit_a: bool,
    pub bit_b: bool,
}

impl TrialOutcome {
    pub fn new(bit_a: bool, bit_b: bool) -> Self {
        TrialOutcome { bit_a, bit_b }
    }

    pub fn is_mismatch(self) -> bool {
        self.bit_a != self.bit_b
    }

    pub fn bits(self) -> (u8, u8) {
        (self.bit_a as u8, self.bit_b as u8)
    }
}

/// Which station registers its photon first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasurementOrder {
    #[default]
    AFirst,
    BFirst,
}

/// Polarization state of an emitted pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairState<T> {
    shared_polarization: Angle<T>,
    collapsed: Option<Angle<T>>,
}

impl<T: Real> PairState<T> {
    pub fn new(shared_polarization: Angle<T>) -> Self {
        PairState {
            shared_polarization,
            collapsed: None,
        }
    }

    pub fn shared_polarization(&self) -> Angle<T> {
        self.shared_polarization
    }

    /// Polarization after the first measurement, if one has happened.
    pub fn collapsed(&self) -> Option<Angle<T>> {
        self.collapsed
    }

    fn measure<R: Rng + ?Sized>(&mut self, axis: Angle<T>, rng: &mut R) -> bool {
        let polarization = self.collapsed.unwrap_or(self.shared_polarization);
        let p = malus_pass_probability(polarization, axis).as_f64();
        let passed = rng.random::<f64>() < p;
        self.collapsed = Some(if passed { axis } else { axis.perpendicular() });
        passed
    }
}

/// Samples one trial of the collapse model.
///
/// The first station measures against the shared polarization and collapses
/// the pair; the second measures against the collapsed polarization.
pub fn sample_trial_qm<T: Real, R: Rng + ?Sized>(
    pair: &mut PairState<T>,
    axis_a: Angle<T>,
    axis_b: Angle<T>,
    order: MeasurementOrder,
    rng: &mut R,
) -> Result<TrialOutcome, QuantumError> {
    if pair.collapsed.is_some() {
        return Err(QuantumError::AlreadyCollapsed);
    }
    let outcome = match order {
        MeasurementOrder::AFirst => {
            let bit_a = pair.measure(axis_a, rng);
            let bit_b = pair.measure(axis_b, rng);
            TrialOutcome { bit_a, bit_b }
        }
        MeasurementOrder::BFirst => {
            let bit_b = pair.measure(axis_b, rng);
            let bit_a = pair.measure(axis_a, rng);
            TrialOutcome { bit_a, bit_b }
        }
    };
    Ok(outcome)
}

/// Exact joint outcome distribution of [`sample_trial_qm`], indexed by
/// `(bit_a, bit_b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution<T> {
    pub p11: T,
    pub p10: T,
    pub p01: T,
    pub p00: T,
}

impl<T: Real> JointDistribution<T> {
    /// `(P(1,1), P(1,0), P(0,1), P(0,0))`.
    pub fn as_array(&self) -> [T; 4] {
        [self.p11, self.p10, self.p01, self.p00]
    }

    pub fn probability(&self, outcome: TrialOutcome) -> T {
        match (outcome.bit_a, outcome.bit_b) {
            (true, true) => self.p11,
            (true, false) => self.p10,
            (false, true) => self.p01,
            (false, false) => self.p00,
        }
    }

    pub fn mismatch(&self) -> T {
        self.p10 + self.p01
    }

    pub fn total(&self) -> T {
        self.p11 + self.p10 + self.p01 + self.p00
    }
}

pub fn joint_probabilities_qm<T: Real>(
    phi: Angle<T>,
    axis_a: Angle<T>,
    axis_b: Angle<T>,
    order: MeasurementOrder,
) -> JointDistribution<T> {
    let theta_rel = relative_angle(axis_a, axis_b);
    let same = cos_sq_deg(theta_rel);
    let flip = sin_sq_deg(theta_rel);
    match order {
        MeasurementOrder::AFirst => {
            let pass = malus_pass_probability(phi, axis_a);
            let block = T::one() - pass;
            JointDistribution {
                p11: pass * same,
                p10: pass * flip,
                p01: block * flip,
                p00: block * same,
            }
        }
        MeasurementOrder::BFirst => {
            let pass = malus_pass_probability(phi, axis_b);
            let block = T::one() - pass;
            JointDistribution {
                p11: pass * same,
                p10: block * flip,
                p01: pass * flip,
                p00: block * same,
            }
        }
    }
}

/// How the shared emission polarization is chosen for each pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PhiPolicy<T> {
    /// Fresh uniform draw in `[0°, 180°)` per pair.
    #[default]
    Uniform,
    Fixed(Angle<T>),
}

impl<T: Real> PhiPolicy<T> {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Angle<T> {
        match self {
            PhiPolicy::Uniform => uniform_angle(rng),
            PhiPolicy::Fixed(angle) => *angle,
        }
    }
}

impl<T: Real> fmt::Display for PhiPolicy<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiPolicy::Uniform => f.write_str("uniform"),
            PhiPolicy::Fixed(angle) => write!(f, "fixed:{}", angle.degrees()),
        }
    }
}

impl<T: Real> FromStr for PhiPolicy<T> {
    type Err = QuantumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "uniform" {
            return Ok(PhiPolicy::Uniform);
        }
        s.strip_prefix("fixed:")
            .and_then(|deg| deg.trim().parse::<f64>().ok())
            .filter(|deg| deg.is_finite())
            .map(|deg| PhiPolicy::Fixed(Angle::from_degrees(T::lit(deg))))
            .ok_or_else(|| QuantumError::InvalidPhiPolicy(s.to_string()))
    }
}

/// Uniform axis in `[0°, 180°)`.
pub fn uniform_angle<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Angle<T> {
    Angle::from_degrees(T::lit(rng.random::<f64>() * 180.0))
}
