//! Cross-module invariants that tie the independent evaluation routes
//! together over randomized parameter boxes.

use miphase::measurement::Steps;
use miphase::numerics::wrap_angle;
use miphase::{averaged, critical, limits, postselected, Direction, Protocol, ProtocolParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::PI;

const D: Direction = Direction::Clockwise;

fn draw_params(rng: &mut ChaCha12Rng) -> (f64, f64, f64, Direction) {
    let c = rng.gen::<f64>() * 5.0;
    let a = rng.gen::<f64>() * 10.0 - 5.0;
    let theta = 0.02 + rng.gen::<f64>() * (PI - 0.04);
    let d = if rng.gen::<bool>() { D } else { D.reversed() };
    (c, a, theta, d)
}

#[test]
fn finite_n_convergence_constant_is_bounded() {
    // |finite_N - closed| <= c/N with a fitted constant below 50 over the
    // whole box, at three decades of N.
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (c, a, theta, d) = draw_params(&mut rng);
        let lim = ProtocolParams::limit(c, a, theta, d).unwrap();
        let closed = postselected::amplitude_closed_form(&lim).amplitude;
        for n in [1_000u64, 10_000, 100_000] {
            let fin = lim.with_steps(Steps::Finite(n));
            let diff = (postselected::amplitude_finite_n(&fin).amplitude - closed).norm();
            worst = worst.max(diff * n as f64);
        }
    }
    assert!(worst < 50.0, "fitted convergence constant {worst}");
}

#[test]
fn endpoint_phase_is_quantized_off_the_critical_line() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    for _ in 0..25 {
        let (c, a, _, d) = draw_params(&mut rng);
        match postselected::phase_curve(c, a, d, 64) {
            Ok(curve) => {
                let turns = curve.endpoint_phase() / (2.0 * PI);
                assert!(
                    (turns - turns.round()).abs() < 1e-6,
                    "endpoint {} at C={c} A={a}",
                    curve.endpoint_phase()
                );
            }
            // A draw can land on the critical line; that is the one
            // legitimate escape.
            Err(miphase::Error::UndefinedAtCriticalPoint { .. }) => {}
            Err(other) => panic!("unexpected error {other:?}"),
        }
    }
}

#[test]
fn expansion_residuals_scale_at_the_nominal_power() {
    // Log-log slope of the residual against the expansion parameter within
    // +-0.3 of the first dropped power (3 for both series).
    let probe = ProtocolParams::limit(1.0, 1.0, 2.0, D).unwrap();

    let residual_a = |a: f64| {
        let pp = ProtocolParams::limit(probe.c, a, probe.theta, D).unwrap();
        let e = limits::large_a_expansion(&pp);
        let exact = postselected::amplitude_closed_form(&pp);
        wrap_angle(exact.phase - e.phase).abs()
    };
    let slope_a = ((residual_a(160.0) / residual_a(20.0)).ln()) / ((160.0f64 / 20.0).ln());
    assert!((-3.0 - slope_a).abs() < 0.3, "large-A slope {slope_a}");

    let residual_c = |c: f64| {
        let pp = ProtocolParams::limit(c, probe.a, probe.theta, D).unwrap();
        let e = limits::large_c_expansion(&pp, Protocol::Postselected).unwrap();
        let exact = postselected::amplitude_closed_form(&pp);
        wrap_angle(exact.phase - e.phase).abs()
    };
    let slope_c = ((residual_c(160.0) / residual_c(20.0)).ln()) / ((160.0f64 / 20.0).ln());
    assert!((-3.0 - slope_c).abs() < 0.3, "large-C slope {slope_c}");
}

#[test]
fn averaged_winding_steps_down_across_each_critical_strength() {
    let scan = critical::averaged_critical_points(1.0, D);
    assert_eq!(scan.points.len(), 2, "{:?}", scan.points);
    let (c1, c2) = (scan.points[0].c_crit, scan.points[1].c_crit);
    assert!(c1 < c2);
    let w = |c: f64| {
        averaged::averaged_winding(&averaged::averaged_phase_curve(c, 1.0, D, 128).unwrap())
            .unwrap()
    };
    assert_eq!(w(c1 - 0.1), 0);
    assert_eq!(w(c1 + 0.1), -1);
    assert_eq!(w(c2 - 0.1), -1);
    assert_eq!(w(c2 + 0.1), -2);
    // Total change from weak to strong measurements is -2d.
    assert_eq!(w(0.05), 0);
    assert_eq!(w(10.0), -2);
}

#[test]
fn dephasing_exceeds_postselection_suppression_nowhere_unphysical() {
    // e^{-alpha} collects every sequence, so it dominates the all-zeros
    // weight squared: P^2 <= e^{-alpha} would not hold in general, but both
    // must stay within [0, 1].
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    for _ in 0..40 {
        let (c, a, theta, d) = draw_params(&mut rng);
        let lim = ProtocolParams::limit(c, a, theta, d).unwrap();
        let ps = postselected::amplitude_closed_form(&lim);
        assert!(ps.magnitude <= 1.0 + 1e-9, "sqrt(P) = {}", ps.magnitude);
        let avg = averaged::averaged_amplitude(&lim).unwrap();
        assert!(avg.amplitude.norm() <= 1.0 + 1e-9, "e^-alpha = {}", avg.amplitude.norm());
    }
}
