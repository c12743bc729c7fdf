//! Readout-averaged phase factor `e^{2i chibar - alpha}`.
//!
//! Squaring the per-sequence amplitude doubles the 2x2 chain into a 4x4 one:
//! the sum over all readout sequences collapses to a single transfer-matrix
//! product, and in the scaling limit to the `(1,1)` element of `exp(G)` for
//! the generator `G` below. `chibar` lives modulo pi, so windings are read
//! off the continuous branch of `2 chibar`.

use crate::curve::{trace, PhaseCurve, TraceSettings};
use crate::measurement::{delta_r, kraus_scaled, Direction, ProtocolParams, Readout};
use crate::numerics::{c64, mat_exp_4, CMat4, Complex64, DEFAULT_EXP_TOL};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Magnitudes below this are treated as a divergent dephasing point.
pub const UNDEFINED_MAGNITUDE: f64 = 1e-14;

/// The averaged phase factor with its polar decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedResult {
    /// The value `e^{2i chibar - alpha}`.
    pub amplitude: Complex64,
    /// Averaged phase in `(-pi/2, pi/2]` (defined modulo pi).
    pub chi_bar: f64,
    /// Dephasing parameter `alpha = -ln|amplitude| >= 0`.
    pub alpha: f64,
}

impl AveragedResult {
    pub fn from_amplitude(amplitude: Complex64) -> Result<Self> {
        let mag = amplitude.norm();
        if mag < UNDEFINED_MAGNITUDE {
            return Err(Error::UndefinedPhase { magnitude: mag });
        }
        let arg = crate::numerics::wrap_angle(amplitude.arg());
        Ok(Self { amplitude, chi_bar: arg / 2.0, alpha: -mag.ln() })
    }
}

/// Transfer-matrix generator: the averaged chain is `(I + G/N + O(1/N^2))^N`.
///
/// Rows, with `s = sin theta`, `c = cos theta`:
///
/// ```text
/// [ 2 i pi d c   -i pi d s     -i pi d s     0                    ]
/// [ -i pi d s    -2(C + i A)   0             -i pi d s            ]
/// [ -i pi d s    0             -2(C + i A)   -i pi d s            ]
/// [ 0            -i pi d s     -i pi d s     -2 i pi d c - 4 i A  ]
/// ```
pub fn generator(pp: &ProtocolParams) -> CMat4 {
    let d = pp.d();
    let (s, c) = (pp.theta.sin(), pp.theta.cos());
    let z = c64(0.0, 0.0);
    let off = c64(0.0, -PI * d * s);
    let m2 = c64(-2.0 * pp.c, -2.0 * pp.a);
    CMat4::new([
        [c64(0.0, 2.0 * PI * d * c), off, off, z],
        [off, m2, z, off],
        [off, z, m2, off],
        [z, off, off, c64(0.0, -2.0 * PI * d * c - 4.0 * pp.a)],
    ])
}

/// Scaling-limit averaged amplitude `[exp(G)]_11`.
pub fn averaged_amplitude(pp: &ProtocolParams) -> Result<AveragedResult> {
    averaged_amplitude_with_tol(pp, DEFAULT_EXP_TOL)
}

/// Same with an explicit matrix-exponential tolerance.
pub fn averaged_amplitude_with_tol(pp: &ProtocolParams, exp_tol: f64) -> Result<AveragedResult> {
    assert!(pp.steps.is_infinite(), "averaged_amplitude is the N -> oo limit; use averaged_finite_n for finite N");
    let e = mat_exp_4(&generator(pp), exp_tol)?;
    AveragedResult::from_amplitude(e[(0, 0)])
}

pub(crate) fn limit_amplitude(c: f64, a: f64, theta: f64, d: f64) -> Complex64 {
    let pp = ProtocolParams { c, a, theta, direction: if d > 0.0 { Direction::Clockwise } else { Direction::Counterclockwise }, steps: crate::measurement::Steps::Infinite };
    mat_exp_4(&generator(&pp), DEFAULT_EXP_TOL).expect("finite generator")[(0, 0)]
}

/// Evaluation route for [`averaged_finite_n`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiniteMethod {
    /// Sum `(amplitude)^2` over all `2^N` readout sequences (`N <= 20`).
    BruteForce,
    /// `[deltaR_4 (M_4 deltaR_4)^N]_11` on the doubled chain, `O(N)`.
    Transfer,
}

/// Maximum `N` accepted by the brute-force route.
pub const BRUTE_FORCE_MAX_N: u64 = 20;

/// Exact finite-`N` averaged amplitude. Both routes evaluate the same
/// algebraic rearrangement of the sum over readout sequences, built from the
/// exact finite-`N` `deltaR` and the scaled per-step Kraus matrices, so they
/// agree to rounding.
pub fn averaged_finite_n(pp: &ProtocolParams, method: FiniteMethod) -> Result<AveragedResult> {
    let n = pp.finite_steps()?;
    let amplitude = match method {
        FiniteMethod::BruteForce => {
            if n > BRUTE_FORCE_MAX_N {
                return Err(Error::TooLargeForBruteForce { n, max: BRUTE_FORCE_MAX_N });
            }
            brute_force_sum(pp, n)
        }
        FiniteMethod::Transfer => transfer_product(pp, n),
    };
    AveragedResult::from_amplitude(amplitude)
}

fn brute_force_sum(pp: &ProtocolParams, n: u64) -> Complex64 {
    let dr = delta_r(pp).unwrap();
    let m = [
        kraus_scaled(pp, Readout::Zero).unwrap(),
        kraus_scaled(pp, Readout::One).unwrap(),
    ];
    let steps = [m[0] * dr, m[1] * dr];
    let mut total = c64(0.0, 0.0);
    for seq in 0u64..(1u64 << n) {
        let mut v = [c64(1.0, 0.0), c64(0.0, 0.0)];
        for k in 0..n {
            v = steps[((seq >> k) & 1) as usize].mul_vec(v);
        }
        let amp = dr.mul_vec(v)[0];
        total += amp * amp;
    }
    total
}

fn transfer_product(pp: &ProtocolParams, n: u64) -> Complex64 {
    let dr = delta_r(pp).unwrap();
    let dr4 = dr.kron(&dr);
    let m0 = kraus_scaled(pp, Readout::Zero).unwrap();
    let m1 = kraus_scaled(pp, Readout::One).unwrap();
    let m4 = m0.kron(&m0) + m1.kron(&m1);
    let step = m4 * dr4;
    let mut v = [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)];
    for _ in 0..n {
        v = step.mul_vec(v);
    }
    dr4.mul_vec(v)[0]
}

/// Continuous branch of `2 chibar` over `theta in [0, pi]`, pinned to zero
/// at `theta = 0`.
pub fn averaged_phase_curve(c: f64, a: f64, d: Direction, grid_hint: usize) -> Result<PhaseCurve> {
    assert!(grid_hint >= 16, "averaged_phase_curve needs grid_hint >= 16");
    let sign = d.sign();
    let f = move |theta: f64| limit_amplitude(c, a, theta, sign);
    trace(&f, 0.0, PI, grid_hint, &TraceSettings::default())
}

/// Winding number of the averaged branch: `round[(Phi(pi) - Phi(0)) / 2 pi]`
/// on the unwrapped `2 chibar`, i.e. `(chibar(pi) - chibar(0)) / pi`.
pub fn averaged_winding(curve: &PhaseCurve) -> Result<i32> {
    curve.winding_number()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::Steps;

    const D: Direction = Direction::Clockwise;

    #[test]
    fn generator_is_diagonal_on_the_pole() {
        let pp = ProtocolParams::limit(1.5, 0.7, 0.0, D).unwrap();
        let g = generator(&pp);
        let want = CMat4::from_diag([
            c64(0.0, 2.0 * PI),
            c64(-3.0, -1.4),
            c64(-3.0, -1.4),
            c64(0.0, -2.0 * PI - 2.8),
        ]);
        assert!(g.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn generator_reversal_symmetry() {
        // U^-1 G(-d, pi - theta) U = G(d, theta) with U = diag(1,-1,-1,1).
        let pp = ProtocolParams::limit(1.3, -0.6, 1.1, D).unwrap();
        let flipped = ProtocolParams::limit(1.3, -0.6, PI - 1.1, D.reversed()).unwrap();
        let g = generator(&pp);
        let gf = generator(&flipped);
        let u = [1.0, -1.0, -1.0, 1.0];
        for r in 0..4 {
            for c in 0..4 {
                let conj = gf[(r, c)] * u[r] * u[c];
                assert!((conj - g[(r, c)]).norm() < 1e-12, "({r},{c})");
            }
        }
    }

    #[test]
    fn generator_matches_exact_transfer_step() {
        // The exact one-step transfer matrix is I + G'/N + O(1/N^2), where
        // G' differs from the printed generator by the similarity transform
        // U = diag(1,-1,-1,1) and a global -2 i pi d shift (both leave the
        // (1,1) element of the N-th power invariant in the limit).
        let n = 1000u64;
        let pp = ProtocolParams::finite(1.2, 0.8, 2.0, D, n).unwrap();
        let dr = delta_r(&pp).unwrap();
        let dr4 = dr.kron(&dr);
        let m0 = kraus_scaled(&pp, Readout::Zero).unwrap();
        let m1 = kraus_scaled(&pp, Readout::One).unwrap();
        let step = (m0.kron(&m0) + m1.kron(&m1)) * dr4;
        let g = generator(&pp.with_steps(Steps::Infinite));
        let u = [1.0, -1.0, -1.0, 1.0];
        let mut worst = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                let mut want = g[(r, c)] * u[r] * u[c];
                if r == c {
                    want -= c64(0.0, 2.0 * PI * pp.d());
                }
                let got = (step[(r, c)] - if r == c { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
                    * n as f64;
                worst = worst.max((got - want).norm());
            }
        }
        assert!(worst < 100.0 / n as f64, "worst entry deviation {worst}");
    }

    #[test]
    fn limit_amplitude_trivial_cases() {
        let pole = ProtocolParams::limit(2.0, 0.5, 0.0, D).unwrap();
        let r = averaged_amplitude(&pole).unwrap();
        assert!((r.amplitude - c64(1.0, 0.0)).norm() < 1e-10);
        assert!(r.chi_bar.abs() < 1e-10 && r.alpha.abs() < 1e-10);

        for theta in [0.4, 1.6, 2.8] {
            let free = ProtocolParams::limit(0.0, 0.0, theta, D).unwrap();
            let r = averaged_amplitude(&free).unwrap();
            assert!((r.amplitude - c64(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn brute_force_equals_transfer() {
        let pp = ProtocolParams::finite(3.0, 1.0, 3.0 * PI / 4.0, D, 12).unwrap();
        let b = averaged_finite_n(&pp, FiniteMethod::BruteForce).unwrap();
        let t = averaged_finite_n(&pp, FiniteMethod::Transfer).unwrap();
        assert!((b.amplitude - t.amplitude).norm() < 1e-12);

        // N = 1 by explicit two-term sum.
        let one = ProtocolParams::finite(0.8, -0.4, 1.2, D, 1).unwrap();
        let dr = delta_r(&one).unwrap();
        let mut want = c64(0.0, 0.0);
        for r in [Readout::Zero, Readout::One] {
            let m = kraus_scaled(&one, r).unwrap();
            let amp = (dr * m * dr)[(0, 0)];
            want += amp * amp;
        }
        let got = averaged_finite_n(&one, FiniteMethod::BruteForce).unwrap();
        assert!((got.amplitude - want).norm() < 1e-14);
        let got = averaged_finite_n(&one, FiniteMethod::Transfer).unwrap();
        assert!((got.amplitude - want).norm() < 1e-14);
    }

    #[test]
    fn brute_force_rejects_large_n() {
        let pp = ProtocolParams::finite(1.0, 0.0, 1.0, D, 21).unwrap();
        assert!(matches!(
            averaged_finite_n(&pp, FiniteMethod::BruteForce),
            Err(Error::TooLargeForBruteForce { .. })
        ));
    }

    #[test]
    fn zero_strength_reduces_to_squared_postselected() {
        // C = 0: only the all-zeros sequence survives the sum.
        let pp = ProtocolParams::finite(0.0, 1.3, 2.1, D, 50).unwrap();
        let avg = averaged_finite_n(&pp, FiniteMethod::Transfer).unwrap();
        let ps = crate::postselected::amplitude_finite_n(&pp);
        assert!((avg.amplitude - ps.amplitude * ps.amplitude).norm() < 1e-12);
    }

    #[test]
    fn limit_matches_large_n_transfer() {
        let lim = ProtocolParams::limit(3.0, 1.0, PI / 2.0, D).unwrap();
        let fin = lim.with_steps(Steps::Finite(10_000));
        let a = averaged_amplitude(&lim).unwrap().amplitude;
        let b = averaged_finite_n(&fin, FiniteMethod::Transfer).unwrap().amplitude;
        assert!((a - b).norm() < 5e-3, "diff {}", (a - b).norm());
    }

    #[test]
    fn limit_matches_brute_force_at_weak_strength() {
        // The truncated per-step matrices need 4C/N << 1, so the finite-N
        // cross-check of the limit runs at weak strength.
        let lim = ProtocolParams::limit(0.5, 0.5, 2.3, D).unwrap();
        let fin = lim.with_steps(Steps::Finite(16));
        let a = averaged_amplitude(&lim).unwrap().amplitude;
        let b = averaged_finite_n(&fin, FiniteMethod::BruteForce).unwrap().amplitude;
        assert!((a - b).norm() < 1e-2, "diff {}", (a - b).norm());
    }

    #[test]
    fn averaged_curve_windings() {
        let flat = averaged_phase_curve(0.0, 0.0, D, 32).unwrap();
        assert_eq!(averaged_winding(&flat).unwrap(), 0);

        let strong = averaged_phase_curve(6.0, 0.0, D, 128).unwrap();
        assert!((strong.endpoint_phase() + 4.0 * PI).abs() < 2e-3);
        assert_eq!(averaged_winding(&strong).unwrap(), -2);

        // Middle sector at A = 1: the computed critical line at A = 1 puts
        // the two transitions near C = 1.95 and C = 4.12, so C = 3 is the
        // middle sector and C = 1.5 still the trivial one.
        let middle = averaged_phase_curve(3.0, 1.0, D, 128).unwrap();
        assert_eq!(averaged_winding(&middle).unwrap(), -1);
        let trivial = averaged_phase_curve(1.5, 1.0, D, 128).unwrap();
        assert_eq!(averaged_winding(&trivial).unwrap(), 0);
    }

    #[test]
    fn alpha_is_nonnegative_on_a_grid() {
        for &c in &[0.0, 0.5, 2.0, 5.0] {
            for &a in &[-3.0, 0.0, 1.0, 4.0] {
                for &theta in &[0.3, 1.2, 2.0, 2.9] {
                    let pp = ProtocolParams::limit(c, a, theta, D).unwrap();
                    let r = averaged_amplitude(&pp).unwrap();
                    assert!(r.alpha >= -1e-9, "alpha {} at C={c} A={a} theta={theta}", r.alpha);
                }
            }
        }
    }

    #[test]
    fn averaged_symmetries() {
        for (c, a, theta) in [(0.9, 1.4, 0.8), (2.5, -0.7, 2.4), (0.1, 2.2, 1.9)] {
            let base = limit_amplitude(c, a, theta, 1.0);
            let reversed = limit_amplitude(c, a, PI - theta, -1.0);
            assert!((base - reversed).norm() < 1e-12);
            let conj = limit_amplitude(c, -a, theta, -1.0);
            assert!((base - conj.conj()).norm() < 1e-12);
        }
    }
}
