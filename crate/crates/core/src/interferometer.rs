//! Detector-screen intensities for the two interferometric setups and the
//! mirrored-arm conjugation identity.
//!
//! In the postselected setup the system is measured in one arm only; in the
//! averaged setup both arms carry detectors, the lower one with the adjoint
//! back-action conjugated by a spin flip, so the two arms accumulate
//! opposite phases and the interference term averages `e^{2i chi}`.

use crate::averaged::{averaged_finite_n, FiniteMethod};
use crate::measurement::{
    axis_sequence, delta_r, kraus_scaled, rotation, DetectorParams, ProtocolParams,
    QubitState, Readout,
};
use crate::numerics::{c64, CMat2};
use crate::postselected::amplitude_finite_n;
use crate::trajectories::ReadoutSequence;
use crate::{Error, Result};

/// Largest `N` accepted by the exact surviving-weight sum.
pub const EXACT_S_MAX_N: u64 = 10_000;

/// Intensities at the two interferometer exits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityPair {
    pub i1: f64,
    pub i2: f64,
    /// Input beam intensity (passthrough scale).
    pub i0: f64,
}

impl IntensityPair {
    /// Fraction of the input beam surviving to either exit.
    pub fn total_fraction(&self) -> f64 {
        (self.i1 + self.i2) / self.i0
    }
}

/// Total surviving weight `S = sum over sequences of |amplitude|^2` with the
/// final projective readout zero, evaluated by the doubled transfer chain
/// with one factor conjugated, in `O(N)`.
pub fn surviving_weight(pp: &ProtocolParams) -> Result<f64> {
    let n = pp.finite_steps()?;
    if n > EXACT_S_MAX_N {
        return Err(Error::TooLargeForExactS { n, max: EXACT_S_MAX_N });
    }
    let dr = delta_r(pp)?;
    let drc = dr.kron(&dr.conj());
    let m0 = kraus_scaled(pp, Readout::Zero)?;
    let m1 = kraus_scaled(pp, Readout::One)?;
    let step = (m0.kron(&m0.conj()) + m1.kron(&m1.conj())) * drc;
    let mut v = [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)];
    for _ in 0..n {
        v = step.mul_vec(v);
    }
    Ok(drc.mul_vec(v)[0].re)
}

/// Exit intensities of the single-arm (postselected-phase) setup:
/// `I_{1,2} = (I_0/2) (1/2 + S/2 +- Re <psi_0|M^(0)...M^(0)|psi_0>)`.
pub fn intensities_postselected(pp: &ProtocolParams, i0: f64) -> Result<IntensityPair> {
    assert!(i0 > 0.0, "input intensity must be positive");
    let s = surviving_weight(pp)?;
    let visibility = amplitude_finite_n(pp).amplitude.re;
    let base = 0.5 + 0.5 * s;
    Ok(IntensityPair {
        i1: 0.5 * i0 * (base + visibility).max(0.0),
        i2: 0.5 * i0 * (base - visibility).max(0.0),
        i0,
    })
}

/// Exit intensities of the two-arm (averaged-phase) setup:
/// `I_{1,2} = (I_0/2) (S +- Re sum (amplitude)^2)`.
pub fn intensities_averaged(pp: &ProtocolParams, i0: f64) -> Result<IntensityPair> {
    assert!(i0 > 0.0, "input intensity must be positive");
    let s = surviving_weight(pp)?;
    let interference = averaged_finite_n(pp, FiniteMethod::Transfer)?.amplitude.re;
    Ok(IntensityPair {
        i1: 0.5 * i0 * (s + interference),
        i2: 0.5 * i0 * (s - interference),
        i0,
    })
}

/// Lower-arm back-action matrices `Mtilde^(r) = M^(r) adjoint`:
/// `Mtilde^(0) = diag(1, cos g - i sin g cos theta_D)` and
/// `Mtilde^(1) = [[0,0],[0, -i sin g sin theta_D e^{-i phi_D}]]`.
pub fn kraus_mirrored(p: &DetectorParams, r: Readout) -> CMat2 {
    let (sg, cg) = (p.g.sin(), p.g.cos());
    let (std, ctd) = (p.theta_d.sin(), p.theta_d.cos());
    match r {
        Readout::Zero => CMat2::diag(c64(1.0, 0.0), c64(cg, -sg * ctd)),
        Readout::One => {
            let phase = c64(0.0, -1.0) * c64(0.0, -p.phi_d).exp();
            CMat2::new([
                [c64(0.0, 0.0), c64(0.0, 0.0)],
                [c64(0.0, 0.0), phase * sg * std],
            ])
        }
    }
}

fn pauli_x() -> CMat2 {
    CMat2::new([
        [c64(0.0, 0.0), c64(1.0, 0.0)],
        [c64(1.0, 0.0), c64(0.0, 0.0)],
    ])
}

/// Distance between the lower-arm amplitude
/// `<psi_0| sx(n_0) Mtilde_N ... Mtilde_1 sx(n_0) |psi_0>` (with
/// `sx(n_0) = R^-1(n_0) sx R(n_0)`, the flip applied on entry and exit) and
/// the conjugate of the upper-arm amplitude. Zero for every readout
/// sequence; the numerical distance stays at rounding level.
pub fn verify_arm_identity(pp: &ProtocolParams, seq: &ReadoutSequence) -> f64 {
    let n = pp.finite_steps().expect("verify_arm_identity needs finite N");
    assert_eq!(n as usize, seq.len(), "sequence length must equal the step count");
    let sx = pauli_x();
    let kraus = [
        kraus_scaled(pp, Readout::Zero).unwrap(),
        kraus_scaled(pp, Readout::One).unwrap(),
    ];
    let mirrored = [kraus[0].adjoint(), kraus[1].adjoint()];
    let psi0 = pp.initial_state();

    let mut upper = psi0;
    for k in 1..=seq.len() {
        let r = rotation(&axis_sequence(pp, k as u64).unwrap());
        let m = &kraus[seq.bit(k).bit() as usize];
        upper = upper.apply(&r).apply(m).apply(&r.adjoint());
    }
    let upper_amp = psi0.inner(&upper);

    let r0 = rotation(&axis_sequence(pp, 0).unwrap());
    let flip = |s: QubitState| s.apply(&r0).apply(&sx).apply(&r0.adjoint());
    let mut lower = flip(psi0);
    for k in 1..=seq.len() {
        let r = rotation(&axis_sequence(pp, k as u64).unwrap());
        let m = &mirrored[seq.bit(k).bit() as usize];
        lower = lower.apply(&r).apply(&sx).apply(m).apply(&sx).apply(&r.adjoint());
    }
    let lower_amp = psi0.inner(&flip(lower));

    (lower_amp - upper_amp.conj()).norm()
}
