//! Kraus back-action matrices, axis rotations, the step matrix `deltaR`, and
//! Born probabilities.
//!
//! The two-outcome detector acts in the eigenbasis of the measured axis as
//!
//! ```text
//! M^(0) = diag(1, cos g + i sin g cos theta_D)
//! M^(1) = [[0, 0], [0, i sin g sin theta_D e^{i phi_D}]]
//! ```
//!
//! and the Kraus operator for an arbitrary axis `n` is `R^-1(n) M^(r) R(n)`.
//! In the scaling limit `g = sqrt(4C/N)`, `theta_D = pi/2 + A/sqrt(CN)` the
//! per-step matrices reduce to the diagonal forms built by [`kraus_scaled`].

use crate::numerics::{c64, CMat2, Complex64};
use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Default detector azimuth `phi_D = -pi/2`, which makes the `r = 1`
/// back-action entry real.
pub const DEFAULT_PHI_D: f64 = -FRAC_PI_2;

/// Detector readout of a single two-outcome measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Readout {
    Zero = 0,
    One = 1,
}

impl Readout {
    pub fn bit(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for Readout {
    type Error = Error;
    fn try_from(r: u8) -> Result<Self> {
        match r {
            0 => Ok(Readout::Zero),
            1 => Ok(Readout::One),
            other => Err(Error::BadReadout(other)),
        }
    }
}

/// Traversal direction of the measurement axes along the parallel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `d = +1`.
    Clockwise,
    /// `d = -1`.
    Counterclockwise,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Clockwise => 1.0,
            Direction::Counterclockwise => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Clockwise => Direction::Counterclockwise,
            Direction::Counterclockwise => Direction::Clockwise,
        }
    }
}

impl TryFrom<i32> for Direction {
    type Error = Error;
    fn try_from(d: i32) -> Result<Self> {
        match d {
            1 => Ok(Direction::Clockwise),
            -1 => Ok(Direction::Counterclockwise),
            other => Err(Error::InvalidParams(format!("direction must be +1 or -1, got {other}"))),
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", if *self == Direction::Clockwise { 1 } else { -1 })
    }
}

/// Number of weak measurements in the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Steps {
    Finite(u64),
    Infinite,
}

impl Steps {
    pub fn is_infinite(self) -> bool {
        matches!(self, Steps::Infinite)
    }
}

/// Finite-strength detector parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    /// Coupling `g` accumulated over one measurement.
    pub g: f64,
    /// Detector polar angle `theta_D` in `[0, pi]`.
    pub theta_d: f64,
    /// Detector azimuth `phi_D`.
    pub phi_d: f64,
}

impl DetectorParams {
    /// Detector with the default azimuth `phi_D = -pi/2`.
    pub fn new(g: f64, theta_d: f64) -> Self {
        Self { g, theta_d, phi_d: DEFAULT_PHI_D }
    }

    pub fn with_phi(g: f64, theta_d: f64, phi_d: f64) -> Self {
        Self { g, theta_d, phi_d }
    }
}

/// A measurement axis `n = (sin t cos p, sin t sin p, cos t)` on the Bloch
/// sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementAxis {
    pub theta_s: f64,
    pub phi_s: f64,
}

impl MeasurementAxis {
    pub fn new(theta_s: f64, phi_s: f64) -> Self {
        Self { theta_s, phi_s }
    }

    /// Unit vector of the axis.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = (self.theta_s.sin(), self.theta_s.cos());
        [st * self.phi_s.cos(), st * self.phi_s.sin(), ct]
    }
}

/// Full specification of one measurement protocol run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Measurement strength `C >= 0`.
    pub c: f64,
    /// Asymmetry `A` (non-Hermitian part of the null-readout back-action).
    pub a: f64,
    /// Polar angle of the parallel, in `[0, pi]`.
    pub theta: f64,
    /// Traversal direction of the axis sequence.
    pub direction: Direction,
    /// Number of weak measurements.
    pub steps: Steps,
}

impl ProtocolParams {
    fn validate(c: f64, a: f64, theta: f64) -> Result<()> {
        if !(c.is_finite() && a.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if c < 0.0 {
            return Err(Error::InvalidParams(format!("C must be >= 0, got {c}")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParams(format!("theta must lie in [0, pi], got {theta}")));
        }
        Ok(())
    }

    /// Parameters for the scaling limit `N -> oo`.
    pub fn limit(c: f64, a: f64, theta: f64, direction: Direction) -> Result<Self> {
        Self::validate(c, a, theta)?;
        Ok(Self { c, a, theta, direction, steps: Steps::Infinite })
    }

    /// Parameters for a finite sequence of `n` weak measurements.
    pub fn finite(c: f64, a: f64, theta: f64, direction: Direction, n: u64) -> Result<Self> {
        Self::validate(c, a, theta)?;
        Ok(Self { c, a, theta, direction, steps: Steps::Finite(n) })
    }

    /// Signed direction `d = +-1`.
    pub fn d(&self) -> f64 {
        self.direction.sign()
    }

    /// The finite step count, or [`Error::InfiniteSteps`].
    pub fn finite_steps(&self) -> Result<u64> {
        match self.steps {
            Steps::Finite(n) => Ok(n),
            Steps::Infinite => Err(Error::InfiniteSteps),
        }
    }

    /// Same parameters with a different step count.
    pub fn with_steps(mut self, steps: Steps) -> Self {
        self.steps = steps;
        self
    }

    /// Initial state `cos(theta/2)|0> + sin(theta/2)|1>`, which lies on the
    /// measurement axis of azimuth zero.
    pub fn initial_state(&self) -> QubitState {
        QubitState::polar(self.theta)
    }
}

/// Unnormalized two-component state. The norm carries the accumulated
/// probability amplitude of the readout record, so no separate bookkeeping
/// is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub amp0: Complex64,
    pub amp1: Complex64,
}

impl QubitState {
    pub fn new(amp0: Complex64, amp1: Complex64) -> Self {
        Self { amp0, amp1 }
    }

    /// State on the parallel of polar angle `theta`, azimuth zero.
    pub fn polar(theta: f64) -> Self {
        Self::new(c64((theta / 2.0).cos(), 0.0), c64((theta / 2.0).sin(), 0.0))
    }

    pub fn norm_sq(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }

    /// A state is null after a projection annihilates it.
    pub fn is_null(&self) -> bool {
        self.norm_sq() < 1e-280
    }

    pub fn normalized(&self) -> Result<QubitState> {
        if self.is_null() {
            return Err(Error::NullState);
        }
        let n = self.norm();
        Ok(Self::new(self.amp0 / n, self.amp1 / n))
    }

    pub fn apply(&self, m: &CMat2) -> QubitState {
        let [a, b] = m.mul_vec([self.amp0, self.amp1]);
        Self::new(a, b)
    }

    /// Bloch coordinates of the normalized state, `None` for a null state.
    pub fn bloch(&self) -> Option<[f64; 3]> {
        let n = self.norm_sq();
        if self.is_null() {
            return None;
        }
        let cross = self.amp0.conj() * self.amp1;
        Some([2.0 * cross.re / n, 2.0 * cross.im / n, (self.amp0.norm_sqr() - self.amp1.norm_sqr()) / n])
    }
}

/// Finite-strength back-action matrix `M^(r)` in the axis eigenbasis.
pub fn kraus_finite(p: &DetectorParams, r: Readout) -> CMat2 {
    let (sg, cg) = (p.g.sin(), p.g.cos());
    let (std, ctd) = (p.theta_d.sin(), p.theta_d.cos());
    match r {
        Readout::Zero => CMat2::diag(c64(1.0, 0.0), c64(cg, sg * ctd)),
        Readout::One => {
            let phase = c64(0.0, 1.0) * c64(0.0, p.phi_d).exp();
            CMat2::new([
                [c64(0.0, 0.0), c64(0.0, 0.0)],
                [c64(0.0, 0.0), phase * sg * std],
            ])
        }
    }
}

/// Scaled per-step back-action matrix: `M^(0) = diag(1, exp(-2(C+iA)/N))`,
/// `M^(1) = diag(0, sqrt(4C/N))`, keeping only the leading order in `1/N`.
pub fn kraus_scaled(pp: &ProtocolParams, r: Readout) -> Result<CMat2> {
    let n = pp.finite_steps()? as f64;
    Ok(match r {
        Readout::Zero => CMat2::diag(
            c64(1.0, 0.0),
            (c64(-2.0 * pp.c, -2.0 * pp.a) / n).exp(),
        ),
        Readout::One => CMat2::diag(c64(0.0, 0.0), c64((4.0 * pp.c / n).sqrt(), 0.0)),
    })
}

/// Rotation `R(n)` carrying the axis eigenbasis onto the computational one:
/// `[[cos(t/2), sin(t/2) e^{-ip}], [sin(t/2), -cos(t/2) e^{-ip}]]`.
pub fn rotation(ax: &MeasurementAxis) -> CMat2 {
    let (ct, st) = ((ax.theta_s / 2.0).cos(), (ax.theta_s / 2.0).sin());
    let e = c64(0.0, -ax.phi_s).exp();
    CMat2::new([[c64(ct, 0.0), e * st], [c64(st, 0.0), -e * ct]])
}

/// Axis of measurement `k` on the parallel: `(theta, 2 pi k d / (N+1))`.
///
/// `k = 0` is the axis through the initial state and `k = N+1` closes the
/// full turn; the weak measurements use `k = 1..=N`.
pub fn axis_sequence(pp: &ProtocolParams, k: u64) -> Result<MeasurementAxis> {
    let n = pp.finite_steps()?;
    if k > n + 1 {
        return Err(Error::IndexOutOfRange { k, max: n + 1 });
    }
    let phi = TAU * k as f64 * pp.d() / (n as f64 + 1.0);
    Ok(MeasurementAxis::new(pp.theta, phi))
}

/// Step matrix `deltaR = R(n_k) R^-1(n_{k-1})` between consecutive axes.
pub fn delta_r(pp: &ProtocolParams) -> Result<CMat2> {
    let n = pp.finite_steps()? as f64;
    let eps = c64(0.0, -TAU * pp.d() / (n + 1.0)).exp();
    let (c2, s2) = {
        let (c, s) = ((pp.theta / 2.0).cos(), (pp.theta / 2.0).sin());
        (c * c, s * s)
    };
    let one = c64(1.0, 0.0);
    let off = (one - eps) * (0.5 * pp.theta.sin());
    Ok(CMat2::new([
        [one * c2 + eps * s2, off],
        [off, one * s2 + eps * c2],
    ]))
}

/// Born probability `<psi|M^dag M|psi> / <psi|psi>` of the readout whose
/// back-action is `kraus`.
pub fn born_probability(state: &QubitState, kraus: &CMat2) -> Result<f64> {
    if state.is_null() {
        return Err(Error::NullState);
    }
    let after = state.apply(kraus);
    Ok(after.norm_sq() / state.norm_sq())
}
