//! Complex scalars, small dense complex matrices, and the root-finding
//! utilities used throughout the crate.
//!
//! Matrices are fixed-size 2x2 and 4x4 value types; nothing here allocates.

use crate::{Error, Result};

pub use num_complex::Complex64;

/// Shorthand constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Default width tolerance for scalar root bracketing.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
/// Default elementwise tolerance for the 4x4 matrix exponential.
pub const DEFAULT_EXP_TOL: f64 = 1e-10;
/// Iteration cap for the damped-Newton complex zero search.
pub const NEWTON_ITERATION_CAP: u32 = 200;

/// Taylor terms below this magnitude are dropped from the exponential series.
const SERIES_TRUNCATION: f64 = 1e-18;

/// Reduce an angle to the principal interval `(-pi, pi]`.
#[inline]
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(std::f64::consts::TAU);
    if y > std::f64::consts::PI {
        y - std::f64::consts::TAU
    } else {
        y
    }
}

/// Dense 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2 {
    e: [[Complex64; 2]; 2],
}

impl CMat2 {
    pub const fn new(e: [[Complex64; 2]; 2]) -> Self {
        Self { e }
    }

    pub fn zero() -> Self {
        Self::new([[c64(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        Self::diag(c64(1.0, 0.0), c64(1.0, 0.0))
    }

    pub fn diag(a: Complex64, b: Complex64) -> Self {
        let z = c64(0.0, 0.0);
        Self::new([[a, z], [z, b]])
    }

    pub fn mul_vec(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.e[0][0] * v[0] + self.e[0][1] * v[1],
            self.e[1][0] * v[0] + self.e[1][1] * v[1],
        ]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.e[r][c] = self.e[c][r].conj();
            }
        }
        out
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        let mut out = *self;
        for row in out.e.iter_mut() {
            for z in row.iter_mut() {
                *z = z.conj();
            }
        }
        out
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = *self;
        for row in out.e.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        out
    }

    /// Kronecker product, row-major block convention: the `(2i0+i1, 2j0+j1)`
    /// entry of the result is `self[i0,j0] * rhs[i1,j1]`.
    pub fn kron(&self, rhs: &CMat2) -> CMat4 {
        let mut out = CMat4::zero();
        for i0 in 0..2 {
            for j0 in 0..2 {
                for i1 in 0..2 {
                    for j1 in 0..2 {
                        out.e[2 * i0 + i1][2 * j0 + j1] = self.e[i0][j0] * rhs.e[i1][j1];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &CMat2) -> f64 {
        let mut m = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                m = m.max((self.e[r][c] - rhs.e[r][c]).norm());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Mul for CMat2 {
    type Output = CMat2;
    fn mul(self, rhs: CMat2) -> CMat2 {
        let mut out = CMat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.e[r][c] = self.e[r][0] * rhs.e[0][c] + self.e[r][1] * rhs.e[1][c];
            }
        }
        out
    }
}

impl std::ops::Add for CMat2 {
    type Output = CMat2;
    fn add(self, rhs: CMat2) -> CMat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.e[r][c] += rhs.e[r][c];
            }
        }
        out
    }
}

impl std::ops::Sub for CMat2 {
    type Output = CMat2;
    fn sub(self, rhs: CMat2) -> CMat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.e[r][c] -= rhs.e[r][c];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMat2 {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.e[r][c]
    }
}

/// Dense 4x4 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat4 {
    e: [[Complex64; 4]; 4],
}

impl CMat4 {
    pub const fn new(e: [[Complex64; 4]; 4]) -> Self {
        Self { e }
    }

    pub fn zero() -> Self {
        Self::new([[c64(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            out.e[i][i] = c64(1.0, 0.0);
        }
        out
    }

    pub fn from_diag(d: [Complex64; 4]) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            out.e[i][i] = d[i];
        }
        out
    }

    pub fn mul_vec(&self, v: [Complex64; 4]) -> [Complex64; 4] {
        let mut out = [c64(0.0, 0.0); 4];
        for (r, row) in self.e.iter().enumerate() {
            let mut acc = c64(0.0, 0.0);
            for c in 0..4 {
                acc += row[c] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = *self;
        for row in out.e.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Maximum row sum of absolute values (operator infinity norm).
    pub fn norm_inf(&self) -> f64 {
        self.e
            .iter()
            .map(|row| row.iter().map(|z| z.norm()).sum())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &CMat4) -> f64 {
        let mut m = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                m = m.max((self.e[r][c] - rhs.e[r][c]).norm());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Mul for CMat4 {
    type Output = CMat4;
    fn mul(self, rhs: CMat4) -> CMat4 {
        let mut out = CMat4::zero();
        for r in 0..4 {
            for k in 0..4 {
                let s = self.e[r][k];
                if s.re == 0.0 && s.im == 0.0 {
                    continue;
                }
                for c in 0..4 {
                    out.e[r][c] += s * rhs.e[k][c];
                }
            }
        }
        out
    }
}

impl std::ops::Add for CMat4 {
    type Output = CMat4;
    fn add(self, rhs: CMat4) -> CMat4 {
        let mut out = self;
        for r in 0..4 {
            for c in 0..4 {
                out.e[r][c] += rhs.e[r][c];
            }
        }
        out
    }
}

impl std::ops::Sub for CMat4 {
    type Output = CMat4;
    fn sub(self, rhs: CMat4) -> CMat4 {
        let mut out = self;
        for r in 0..4 {
            for c in 0..4 {
                out.e[r][c] -= rhs.e[r][c];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMat4 {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.e[r][c]
    }
}

/// Matrix exponential of a 4x4 complex matrix by scaling and squaring.
///
/// The argument is halved until its infinity norm drops below 1/2, the
/// Taylor series is summed with terms truncated below 1e-18, and the result
/// is squared back up. Generators arising here have norms well under 50, so
/// the elementwise error stays below `tol` for the default `tol = 1e-10`.
pub fn mat_exp_4(g: &CMat4, tol: f64) -> Result<CMat4> {
    assert!(tol > 0.0, "mat_exp_4 requires tol > 0");
    if !g.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = g.norm_inf();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let a = g.scaled(c64(2f64.powi(-(squarings as i32)), 0.0));
    let cutoff = tol.min(SERIES_TRUNCATION);
    let mut sum = CMat4::identity();
    let mut term = CMat4::identity();
    for k in 1..=120u32 {
        term = (term * a).scaled(c64(1.0 / k as f64, 0.0));
        sum = sum + term;
        if term.max_abs() < cutoff {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    Ok(sum)
}

/// Bisect `f` to a root inside `[lo, hi]`, shrinking the bracket to width
/// `tol`. Deterministic: the same bracket always yields the same midpoint.
pub fn solve_scalar_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    assert!(lo < hi && tol > 0.0, "solve_scalar_root requires lo < hi and tol > 0");
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() * fhi.signum() > 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket exhausted at f64 resolution
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Damped Newton search for a zero of a complex-valued function of two real
/// variables, using a central finite-difference Jacobian.
///
/// Deterministic for a fixed seed point. Fails with [`Error::NoConvergence`]
/// if the residual does not drop below `tol` within 200 iterations or the
/// line search stalls.
pub fn solve_complex_zero_2d(
    f: impl Fn(f64, f64) -> Complex64,
    seed_point: (f64, f64),
    tol: f64,
) -> Result<(f64, f64)> {
    assert!(tol > 0.0, "solve_complex_zero_2d requires tol > 0");
    let (mut x, mut y) = seed_point;
    let mut fxy = f(x, y);
    for it in 0..NEWTON_ITERATION_CAP {
        let res = fxy.norm();
        if res <= tol {
            return Ok((x, y));
        }
        let hx = 1e-6 * (1.0 + x.abs());
        let hy = 1e-6 * (1.0 + y.abs());
        let dfdx = (f(x + hx, y) - f(x - hx, y)) / (2.0 * hx);
        let dfdy = (f(x, y + hy) - f(x, y - hy)) / (2.0 * hy);
        // Solve the real 2x2 system J * step = -f.
        let (a, b, c, d) = (dfdx.re, dfdy.re, dfdx.im, dfdy.im);
        let det = a * d - b * c;
        if det.abs() < 1e-300 || !det.is_finite() {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: res,
            });
        }
        let (r0, r1) = (-fxy.re, -fxy.im);
        let dx = (r0 * d - b * r1) / det;
        let dy = (a * r1 - r0 * c) / det;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (xn, yn) = (x + lambda * dx, y + lambda * dy);
            let fn_ = f(xn, yn);
            if fn_.norm() < res {
                x = xn;
                y = yn;
                fxy = fn_;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations: it,
                residual: res,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: NEWTON_ITERATION_CAP,
        residual: fxy.norm(),
    })
}
