//! Postselected amplitude `sqrt(P) e^{i chi}` for the all-zeros readout
//! sequence, its closed form in the scaling limit, and the winding number of
//! the continuous phase branch.
//!
//! With `Z = C + i A + i pi d cos(theta)` and
//! `tau = sqrt(Z^2 - pi^2 sin^2 theta)`, the limit amplitude is
//!
//! ```text
//! e^{i pi d (cos theta - 1) - Z} (cosh tau + Z sinh(tau)/tau)
//! ```
//!
//! The expression is even in `tau`, so the branch of the square root is
//! immaterial. The prefactor `e^{i pi d (cos theta - 1)}` is the
//! Pancharatnam phase of a quasicontinuous projective sweep of the same
//! parallel.

use crate::curve::{trace, PhaseCurve, TraceSettings};
use crate::measurement::{delta_r, kraus_scaled, Direction, ProtocolParams, Readout};
use crate::numerics::{c64, wrap_angle, Complex64};
use crate::Result;
use std::f64::consts::PI;

/// A complex amplitude with its derived polar decomposition.
///
/// Interpreted as `(chi, sqrt(P))` for postselected amplitudes and as
/// `(2 chibar, e^{-alpha})` for averaged ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseResult {
    pub amplitude: Complex64,
    /// Principal-value argument in `(-pi, pi]`.
    pub phase: f64,
    pub magnitude: f64,
}

impl PhaseResult {
    pub fn from_amplitude(amplitude: Complex64) -> Self {
        Self {
            amplitude,
            phase: wrap_angle(amplitude.arg()),
            magnitude: amplitude.norm(),
        }
    }

    /// Postselection probability `P = magnitude^2`.
    pub fn probability(&self) -> f64 {
        self.magnitude * self.magnitude
    }
}

/// Closed-form scaling-limit amplitude as a bare complex number.
pub(crate) fn closed_form_amplitude(c: f64, a: f64, theta: f64, d: f64) -> Complex64 {
    closed_form_with_branch(c, a, theta, d, false)
}

/// Same evaluation with the opposite square-root branch for `tau`; the two
/// must agree because the expression is even in `tau`.
pub(crate) fn closed_form_with_branch(c: f64, a: f64, theta: f64, d: f64, flip: bool) -> Complex64 {
    let z = c64(c, a + PI * d * theta.cos());
    let s = PI * theta.sin();
    let mut tau = (z * z - c64(s * s, 0.0)).sqrt();
    if flip {
        tau = -tau;
    }
    // Exponent of the prefactor e^{i pi d (cos theta - 1) - Z}.
    let pre = c64(0.0, PI * d * (theta.cos() - 1.0)) - z;
    if tau.norm() < 1e-4 {
        // Removable singularity: cosh and sinh(tau)/tau by series.
        let t2 = tau * tau;
        let cosh = c64(1.0, 0.0) + t2 * 0.5 + t2 * t2 * (1.0 / 24.0);
        let sinhc = c64(1.0, 0.0) + t2 * (1.0 / 6.0) + t2 * t2 * (1.0 / 120.0);
        return pre.exp() * (cosh + z * sinhc);
    }
    // cosh tau + Z sinh(tau)/tau written through e^{pre +- tau} so that the
    // decaying and growing exponentials never overflow separately (C up to
    // ~50 appears in the limit checks).
    let zt = z / tau;
    let one = c64(1.0, 0.0);
    ((pre + tau).exp() * (one + zt) + (pre - tau).exp() * (one - zt)) * 0.5
}

/// Scaling-limit amplitude for the all-zeros readout sequence.
pub fn amplitude_closed_form(pp: &ProtocolParams) -> PhaseResult {
    assert!(pp.steps.is_infinite(), "amplitude_closed_form is the N -> oo limit; use amplitude_finite_n for finite N");
    PhaseResult::from_amplitude(closed_form_amplitude(pp.c, pp.a, pp.theta, pp.d()))
}

/// Exact finite-`N` amplitude `(1 0) deltaR (M^(0) deltaR)^N (1 0)^T`,
/// evaluated by sequential 2x2 multiplication in `O(N)`.
pub fn amplitude_finite_n(pp: &ProtocolParams) -> PhaseResult {
    let n = pp.finite_steps().expect("amplitude_finite_n needs finite N");
    let dr = delta_r(pp).unwrap();
    let m0 = kraus_scaled(pp, Readout::Zero).unwrap();
    let step = m0 * dr;
    let mut v = [c64(1.0, 0.0), c64(0.0, 0.0)];
    for _ in 0..n {
        v = step.mul_vec(v);
    }
    v = dr.mul_vec(v);
    PhaseResult::from_amplitude(v[0])
}

/// Continuous branch of the postselected phase over `theta in [0, pi]`,
/// pinned to `chi(0) = 0`, refined adaptively near rapid phase steps and
/// small magnitudes.
///
/// Fails with [`crate::Error::UndefinedAtCriticalPoint`] when `(c, a)` lies
/// on the critical line and the amplitude vanishes at some `theta`.
pub fn phase_curve(c: f64, a: f64, d: Direction, grid_hint: usize) -> Result<PhaseCurve> {
    assert!(grid_hint >= 16, "phase_curve needs grid_hint >= 16");
    let sign = d.sign();
    let f = move |theta: f64| closed_form_amplitude(c, a, theta, sign);
    trace(&f, 0.0, PI, grid_hint, &TraceSettings::default())
}

/// Winding number `round[(chi(pi) - chi(0)) / 2 pi]` of a traced branch.
pub fn winding_number(curve: &PhaseCurve) -> Result<i32> {
    curve.winding_number()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::Steps;
    use crate::Error;

    const D: Direction = Direction::Clockwise;

    #[test]
    fn amplitude_is_one_on_the_pole() {
        for (c, a, d) in [(0.0, 0.0, D), (2.0, -1.0, D), (5.0, 3.0, D.reversed())] {
            let pp = ProtocolParams::limit(c, a, 0.0, d).unwrap();
            let r = amplitude_closed_form(&pp);
            assert!((r.amplitude - c64(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn no_measurement_no_phase() {
        for theta in [0.1, 1.0, 2.0, 3.0] {
            let pp = ProtocolParams::limit(0.0, 0.0, theta, D).unwrap();
            let r = amplitude_closed_form(&pp);
            assert!((r.amplitude - c64(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_reference_point() {
        let pp = ProtocolParams::limit(1.0, 0.0, PI / 2.0, D).unwrap();
        let r = amplitude_closed_form(&pp);
        assert!((r.amplitude.re - 0.342_884_203_086_152_7).abs() < 1e-13);
        assert!(r.amplitude.im.abs() < 1e-13);
        assert!((r.probability() - 0.117_569_576_726_026).abs() < 1e-12);
        assert!(r.phase.abs() < 1e-12);
    }

    #[test]
    fn branch_choice_is_immaterial() {
        for (c, a, theta) in [(1.0, 1.0, 1.0), (0.3, -2.0, 2.5), (4.0, 0.0, 1.8), (0.0, 1.5, 0.9)] {
            let plus = closed_form_with_branch(c, a, theta, 1.0, false);
            let minus = closed_form_with_branch(c, a, theta, 1.0, true);
            assert!((plus - minus).norm() < 1e-13);
        }
    }

    #[test]
    fn finite_n_single_step_by_hand() {
        let pp = ProtocolParams::finite(0.0, 0.0, 1.3, D, 1).unwrap();
        let dr = delta_r(&pp).unwrap();
        // C = A = 0 makes M^(0) the identity, so the product is deltaR^2.
        let sq = dr * dr;
        let got = amplitude_finite_n(&pp);
        assert!((got.amplitude - sq[(0, 0)]).norm() < 1e-15);
    }

    #[test]
    fn finite_n_converges_to_closed_form() {
        let n = 10_000u64;
        let fin = ProtocolParams::finite(1.0, 1.0, 3.0 * PI / 4.0, D, n).unwrap();
        let lim = fin.with_steps(Steps::Infinite);
        let diff = (amplitude_finite_n(&fin).amplitude - amplitude_closed_form(&lim).amplitude).norm();
        assert!(diff < 5.0 / n as f64, "diff = {diff}");
    }

    #[test]
    fn flat_curve_without_measurement() {
        let curve = phase_curve(0.0, 0.0, D, 32).unwrap();
        for (i, &p) in curve.unwrapped_phase().iter().enumerate() {
            assert!(p.abs() < 1e-9, "node {i} phase {p}");
        }
        assert_eq!(winding_number(&curve).unwrap(), 0);
    }

    #[test]
    fn strong_measurement_curve_is_pancharatnam() {
        let curve = phase_curve(5.0, 0.0, D, 64).unwrap();
        assert!((curve.endpoint_phase() + 2.0 * PI).abs() < 1e-3);
        for (i, &t) in curve.thetas().iter().enumerate() {
            let want = PI * (t.cos() - 1.0);
            assert!(
                (curve.unwrapped_phase()[i] - want).abs() < 0.45,
                "theta {t}: {} vs {want}",
                curve.unwrapped_phase()[i]
            );
        }
        assert_eq!(winding_number(&curve).unwrap(), -1);
    }

    #[test]
    fn curve_hits_critical_point() {
        // Critical strength at A = 1, from the bisection pipeline: the
        // amplitude vanishes at theta = arccos(-1/pi).
        let c_crit = 1.924_091_031_327_755_5;
        let err = phase_curve(c_crit, 1.0, D, 256).unwrap_err();
        match err {
            Error::UndefinedAtCriticalPoint { theta, .. } => {
                assert!((theta - (-1.0 / PI).acos()).abs() < 1e-3, "theta = {theta}");
            }
            other => panic!("expected critical point, got {other:?}"),
        }
    }

    #[test]
    fn winding_examples() {
        let w = |c, a, d| winding_number(&phase_curve(c, a, d, 64).unwrap()).unwrap();
        assert_eq!(w(0.1, 0.0, D), 0);
        assert_eq!(w(5.0, 0.0, D), -1);
        assert_eq!(w(5.0, 0.0, D.reversed()), 1);
    }

    #[test]
    fn reversal_and_conjugation_symmetries() {
        for (c, a, theta) in [(0.7, 1.3, 1.1), (2.0, -0.8, 2.6), (0.0, 2.0, 0.4)] {
            let base = closed_form_amplitude(c, a, theta, 1.0);
            let reversed = closed_form_amplitude(c, a, PI - theta, -1.0);
            assert!((base - reversed).norm() < 1e-12);
            let conj = closed_form_amplitude(c, -a, theta, -1.0);
            assert!((base - conj.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_case_probabilities_and_phases_pair_up() {
        // At A = 0: P^(+1) = P^(-1) and chi^(+1) = -chi^(-1) (mod 2 pi), so
        // the symmetric phase component vanishes mod 2 pi.
        for (c, theta) in [(0.5, 1.0), (2.0, 2.2), (3.0, 0.6)] {
            let fwd = PhaseResult::from_amplitude(closed_form_amplitude(c, 0.0, theta, 1.0));
            let rev = PhaseResult::from_amplitude(closed_form_amplitude(c, 0.0, theta, -1.0));
            assert!((fwd.magnitude - rev.magnitude).abs() < 1e-12);
            assert!(wrap_angle(fwd.phase + rev.phase).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_antisymmetric_components_recombine() {
        let (c, a, theta) = (1.2, 0.9, 1.7);
        let fwd = PhaseResult::from_amplitude(closed_form_amplitude(c, a, theta, 1.0)).phase;
        let rev = PhaseResult::from_amplitude(closed_form_amplitude(c, a, theta, -1.0)).phase;
        let sym = fwd + rev;
        let asym = fwd - rev;
        assert!(wrap_angle(0.5 * (sym + asym) - fwd).abs() < 1e-12);
        assert!(wrap_angle(0.5 * (sym - asym) - rev).abs() < 1e-12);
    }
}
