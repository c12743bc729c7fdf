//! Critical lines where the relevant amplitude vanishes and the winding
//! number jumps.
//!
//! The postselective line is analytic: the amplitude vanishes only where
//! `A + pi d cos(theta) = 0` (so `Z = C` is real), `tau = i b` with
//! `sin(b)/b = 1/(pi sin theta)` on `b in [pi/2, b_c]` (the admissible
//! branch has `cos b <= 0`), and `C = sqrt(pi^2 sin^2 theta - b^2)`.
//! The averaging protocol has no such closed form; its critical points are
//! located by a grid scan for minima of `|[exp G]_11|` polished with a
//! damped Newton zero search in `(C, theta)` at fixed `A`.

use crate::measurement::Direction;
use crate::numerics::{
    solve_complex_zero_2d, solve_scalar_root, Complex64,
};
use crate::postselected::closed_form_amplitude;
use std::f64::consts::{FRAC_PI_2, PI};

/// Largest asymmetry at which the postselective transition exists:
/// `A_0 = pi sqrt(3) / 2`.
pub fn postselected_a_max() -> f64 {
    PI * 3f64.sqrt() / 2.0
}

/// Which amplitude vanishes at the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalBranch {
    Postselected,
    /// Averaged transition with the smaller critical strength.
    AveragedFirst,
    /// Averaged transition with the larger critical strength.
    AveragedSecond,
}

/// A parameter triple where the relevant amplitude vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub c_crit: f64,
    pub a_crit: f64,
    pub theta_crit: f64,
    pub branch: CriticalBranch,
}

/// Result of a numeric critical-point scan.
#[derive(Debug, Clone)]
pub struct CriticalScan {
    pub points: Vec<CriticalPoint>,
    /// Seeds whose Newton polish failed to converge (skipped).
    pub skipped_seeds: u32,
}

fn solve_b(sin_theta: f64, tol: f64) -> f64 {
    let b_c = solve_scalar_root(|b| b.sin() / b - 1.0 / PI, FRAC_PI_2, PI, tol)
        .expect("sin(b)/b - 1/pi changes sign on [pi/2, pi]");
    let rhs = 1.0 / (PI * sin_theta);
    // The root sits exactly on an endpoint at theta = pi/2 (b = b_c) and at
    // theta = 5 pi/6 (b = pi/2); pad the bracket so the sign change
    // survives rounding.
    solve_scalar_root(|b| b.sin() / b - rhs, FRAC_PI_2 - 1e-6, b_c + 1e-6, tol)
        .expect("sin(b)/b - rhs changes sign on [pi/2, b_c] for sin theta in [1/2, 1]")
}

/// Analytic critical line of the postselective protocol for `A >= 0`,
/// sampled at `n_points` values of the critical polar angle and ordered by
/// it. For `d = -1` the angles mirror to `pi - theta`; negative asymmetries
/// follow from the conjugation symmetry.
pub fn postselected_critical_line(d: Direction, n_points: usize) -> Vec<CriticalPoint> {
    postselected_critical_line_with_tol(d, n_points, 1e-13)
}

/// Same with an explicit bisection tolerance for the `b` solves.
pub fn postselected_critical_line_with_tol(
    d: Direction,
    n_points: usize,
    tol: f64,
) -> Vec<CriticalPoint> {
    assert!(n_points >= 2, "postselected_critical_line needs n_points >= 2");
    let sign = d.sign();
    (0..n_points)
        .map(|i| {
            let frac = i as f64 / (n_points - 1) as f64;
            // theta in [pi/2, 5pi/6] for d = +1; mirrored for d = -1.
            let theta = if sign > 0.0 {
                FRAC_PI_2 + frac * (5.0 * PI / 6.0 - FRAC_PI_2)
            } else {
                FRAC_PI_2 - frac * (FRAC_PI_2 - PI / 6.0)
            };
            let a_crit = -PI * sign * theta.cos();
            let b = solve_b(theta.sin(), tol);
            let c_sq = (PI * theta.sin()).powi(2) - b * b;
            CriticalPoint {
                c_crit: c_sq.max(0.0).sqrt(),
                a_crit,
                theta_crit: theta,
                branch: CriticalBranch::Postselected,
            }
        })
        .collect()
}

/// Residual `|cosh tau + Z sinh(tau)/tau|` of the vanishing condition at a
/// postselected critical point; at most ~1e-10 on the analytic line.
pub fn verify_critical_point(p: &CriticalPoint) -> f64 {
    // The closed form strips the prefactor e^{i pi d (cos t - 1) - Z}, whose
    // magnitude is e^{-C}; d is fixed by a_crit + pi d cos(theta_crit) = 0.
    let d = if (p.a_crit + PI * p.theta_crit.cos()).abs()
        <= (p.a_crit - PI * p.theta_crit.cos()).abs()
    {
        1.0
    } else {
        -1.0
    };
    let amp = closed_form_amplitude(p.c_crit, p.a_crit, p.theta_crit, d);
    amp.norm() * p.c_crit.exp()
}

/// Scan box for the numeric searches: `C in [0, 8]` step 0.05 and
/// `theta in (0, pi)` step `pi/256`.
const C_MAX: f64 = 8.0;
const C_STEP: f64 = 0.05;
const THETA_DIVISIONS: usize = 256;
/// Seed filter: only grid minima below this magnitude are polished.
const SEED_MAGNITUDE: f64 = 0.25;
/// Polished points must reach this residual.
const ZERO_TOL: f64 = 1e-10;

fn numeric_zero_scan(f: &dyn Fn(f64, f64) -> Complex64) -> CriticalScan {
    let n_c = (C_MAX / C_STEP).round() as usize + 1;
    let thetas: Vec<f64> = (1..THETA_DIVISIONS)
        .map(|j| PI * j as f64 / THETA_DIVISIONS as f64)
        .collect();
    let mags: Vec<Vec<f64>> = (0..n_c)
        .map(|i| {
            let c = i as f64 * C_STEP;
            thetas.iter().map(|&t| f(c, t).norm()).collect()
        })
        .collect();

    let mut seeds = Vec::new();
    for i in 0..n_c {
        for j in 0..thetas.len() {
            let v = mags[i][j];
            if v >= SEED_MAGNITUDE {
                continue;
            }
            let mut is_min = true;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= n_c as i64 || nj >= thetas.len() as i64 {
                        continue;
                    }
                    if mags[ni as usize][nj as usize] < v {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                seeds.push((i as f64 * C_STEP, thetas[j]));
            }
        }
    }

    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut skipped = 0u32;
    for seed in seeds {
        match solve_complex_zero_2d(|c, t| f(c, t), seed, ZERO_TOL) {
            Ok((c, t)) => {
                // Reject zeros that escaped the physical box; a zero pushed
                // marginally past C = 0 by rounding clamps to the boundary.
                if !(-1e-8..=C_MAX + 0.5).contains(&c) || !(1e-3..PI - 1e-3).contains(&t) {
                    skipped += 1;
                    continue;
                }
                let c = c.max(0.0);
                if points.iter().any(|&(pc, pt)| (pc - c).abs() < 1e-4 && (pt - t).abs() < 1e-4) {
                    continue;
                }
                points.push((c, t));
            }
            Err(_) => skipped += 1,
        }
    }
    points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    CriticalScan {
        points: points
            .into_iter()
            .map(|(c, t)| CriticalPoint {
                c_crit: c,
                a_crit: f64::NAN, // filled by callers
                theta_crit: t,
                branch: CriticalBranch::AveragedFirst,
            })
            .collect(),
        skipped_seeds: skipped,
    }
}

fn tag_scan(mut scan: CriticalScan, a: f64, averaged: bool) -> CriticalScan {
    let n = scan.points.len();
    for (i, p) in scan.points.iter_mut().enumerate() {
        p.a_crit = a;
        p.branch = if !averaged {
            CriticalBranch::Postselected
        } else if i == 0 || n == 1 {
            CriticalBranch::AveragedFirst
        } else {
            CriticalBranch::AveragedSecond
        };
    }
    scan
}

/// Numeric critical points of the averaging protocol at fixed asymmetry:
/// grid minima of `|[exp G]_11|` over `(C, theta)`, Newton-polished to
/// `|amplitude| <= 1e-10`. Points come back sorted by critical strength.
pub fn averaged_critical_points(a: f64, d: Direction) -> CriticalScan {
    let sign = d.sign();
    // The generator is entire in C, so the polish may probe marginally
    // negative strengths; the box filter keeps only physical zeros.
    let scan = numeric_zero_scan(&|c, t| crate::averaged::limit_amplitude(c, a, t, sign));
    tag_scan(scan, a, true)
}

/// The same numeric search run on the postselected closed form; confirms
/// that the analytic line is the only zero set in the box.
pub fn postselected_critical_points_numeric(a: f64, d: Direction) -> CriticalScan {
    let sign = d.sign();
    let scan = numeric_zero_scan(&|c, t| closed_form_amplitude(c, a, t, sign));
    tag_scan(scan, a, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::postselected::{phase_curve, winding_number};

    const D: Direction = Direction::Clockwise;

    #[test]
    fn line_terminates_at_the_threshold_asymmetry() {
        let line = postselected_critical_line(D, 101);
        let last = line.last().unwrap();
        assert!((last.theta_crit - 5.0 * PI / 6.0).abs() < 1e-12);
        assert!((last.a_crit - postselected_a_max()).abs() < 1e-9);
        assert!(last.c_crit.abs() < 1e-6, "C at the endpoint = {}", last.c_crit);
    }

    #[test]
    fn hermitian_endpoint_of_the_line() {
        let line = postselected_critical_line(D, 101);
        let first = &line[0];
        assert!((first.theta_crit - FRAC_PI_2).abs() < 1e-12);
        assert!(first.a_crit.abs() < 1e-12);
        // b_c = 2.3137341..., C = sqrt(pi^2 - b_c^2).
        assert!((first.c_crit - 2.125_144_4).abs() < 1e-6, "C = {}", first.c_crit);
    }

    #[test]
    fn unit_asymmetry_point() {
        let line = postselected_critical_line(D, 2001);
        let near = line
            .iter()
            .min_by(|x, y| {
                (x.a_crit - 1.0).abs().partial_cmp(&(y.a_crit - 1.0).abs()).unwrap()
            })
            .unwrap();
        assert!((near.c_crit - 1.9240910).abs() < 5e-3, "C = {}", near.c_crit);
        assert!((near.theta_crit - 1.8947424).abs() < 5e-3, "theta = {}", near.theta_crit);
    }

    #[test]
    fn residuals_vanish_on_the_line_only() {
        // Interior points; the C = 0 terminus is degenerate for the square
        // root and is checked by direct substitution below.
        let line = postselected_critical_line(D, 41);
        for p in line.iter().filter(|p| p.c_crit > 1e-3) {
            let r = verify_critical_point(p);
            assert!(r <= 1e-10, "residual {r} at theta {}", p.theta_crit);
        }
        let endpoint = CriticalPoint {
            c_crit: 0.0,
            a_crit: postselected_a_max(),
            theta_crit: 5.0 * PI / 6.0,
            branch: CriticalBranch::Postselected,
        };
        assert!(verify_critical_point(&endpoint) <= 1e-12);

        let off = CriticalPoint {
            c_crit: 1.0,
            a_crit: 0.0,
            theta_crit: FRAC_PI_2,
            branch: CriticalBranch::Postselected,
        };
        assert!(verify_critical_point(&off) >= 1e-2);
    }

    #[test]
    fn admissible_b_has_negative_cosine() {
        for p in postselected_critical_line(D, 41) {
            let b_sq = (PI * p.theta_crit.sin()).powi(2) - p.c_crit * p.c_crit;
            let b = b_sq.max(0.0).sqrt();
            assert!(b.cos() < 1e-12, "cos b = {} at theta {}", b.cos(), p.theta_crit);
        }
    }

    #[test]
    fn critical_strength_is_monotone_along_the_line() {
        let line = postselected_critical_line(D, 101);
        for w in line.windows(2) {
            assert!(w[1].c_crit <= w[0].c_crit + 1e-9);
            assert!(w[1].a_crit >= w[0].a_crit - 1e-9);
        }
    }

    #[test]
    fn mirrored_line_for_the_reversed_direction() {
        let fwd = postselected_critical_line(D, 11);
        let rev = postselected_critical_line(D.reversed(), 11);
        for (f, r) in fwd.iter().zip(&rev) {
            assert!((f.theta_crit - (PI - r.theta_crit)).abs() < 1e-12);
            // C itself is ill-conditioned where the line meets C = 0, so
            // compare the square.
            assert!((f.c_crit.powi(2) - r.c_crit.powi(2)).abs() < 1e-12);
            assert!((f.a_crit - r.a_crit).abs() < 1e-12);
        }
    }

    #[test]
    fn winding_flips_across_the_line() {
        let line = postselected_critical_line(D, 9);
        for p in line.iter().filter(|p| p.c_crit > 0.1) {
            let below = winding_number(&phase_curve(p.c_crit - 0.05, p.a_crit, D, 64).unwrap()).unwrap();
            let above = winding_number(&phase_curve(p.c_crit + 0.05, p.a_crit, D, 64).unwrap()).unwrap();
            assert_eq!(below, 0, "below at theta {}", p.theta_crit);
            assert_eq!(above, -1, "above at theta {}", p.theta_crit);
        }
    }

    #[test]
    fn numeric_scan_recovers_the_analytic_line() {
        for a in [0.0, 1.0, 2.0] {
            let scan = postselected_critical_points_numeric(a, D);
            assert_eq!(scan.points.len(), 1, "A = {a}: {:?}", scan.points);
            let analytic_theta = ((-a) / PI).acos();
            let got = &scan.points[0];
            assert!((got.theta_crit - analytic_theta).abs() < 1e-6);
            let b = solve_b(analytic_theta.sin(), 1e-13);
            let c = ((PI * analytic_theta.sin()).powi(2) - b * b).max(0.0).sqrt();
            assert!((got.c_crit - c).abs() < 1e-6, "C {} vs {c}", got.c_crit);
        }
    }

    #[test]
    fn no_postselected_zeros_beyond_the_threshold() {
        for a in [postselected_a_max() + 1e-6, postselected_a_max() + 0.2, 4.5] {
            let scan = postselected_critical_points_numeric(a, D);
            assert!(scan.points.is_empty(), "unexpected zeros at A = {a}: {:?}", scan.points);
        }
    }

    #[test]
    fn averaged_scan_at_zero_asymmetry() {
        let scan = averaged_critical_points(0.0, D);
        assert_eq!(scan.points.len(), 2, "{:?}", scan.points);
        let (p1, p2) = (&scan.points[0], &scan.points[1]);
        // One critical strength, two polar angles symmetric about pi/2.
        assert!((p1.c_crit - p2.c_crit).abs() < 1e-5);
        assert!((p1.theta_crit + p2.theta_crit - PI).abs() < 1e-5);
        assert!((p1.c_crit - 3.3627).abs() < 5e-3, "C = {}", p1.c_crit);
    }

    #[test]
    fn averaged_and_postselected_coincide_at_zero_strength() {
        let scan = averaged_critical_points(postselected_a_max(), D);
        let boundary = scan
            .points
            .iter()
            .find(|p| p.c_crit < 1e-3)
            .expect("zero-strength critical point");
        assert!((boundary.theta_crit - 5.0 * PI / 6.0).abs() < 1e-3);
    }
}
