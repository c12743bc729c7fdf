//! Continuous phase branches over the polar angle and their winding numbers.
//!
//! The tracer samples a complex amplitude on an adaptive theta grid,
//! bisecting intervals until adjacent phase steps are small, and then
//! unwraps the argument into a single continuous branch pinned to zero at
//! `theta = 0`. An interval that cannot be resolved at the minimum width is
//! passing through a zero of the amplitude: the branch is ill-defined there
//! and the trace reports a critical point.

use crate::numerics::{wrap_angle, Complex64};
use crate::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Refinement thresholds for [`trace`].
#[derive(Debug, Clone, Copy)]
pub struct TraceSettings {
    /// Split an interval whose endpoint phases differ by more than this.
    pub max_phase_step: f64,
    /// Split an interval whose endpoint magnitude drops below this.
    pub refine_magnitude: f64,
    /// Split an interval whose endpoint magnitudes differ by more than this
    /// ratio.
    pub max_magnitude_ratio: f64,
    /// Narrowest interval the refinement will produce.
    pub min_interval: f64,
    /// Magnitudes below this are treated as an exact zero of the amplitude.
    pub undefined_magnitude: f64,
}

impl Default for TraceSettings {
    fn default() -> Self {
        Self {
            max_phase_step: FRAC_PI_2,
            refine_magnitude: 1e-6,
            max_magnitude_ratio: 4.0,
            min_interval: 1e-9,
            undefined_magnitude: 1e-12,
        }
    }
}

/// A theta grid with amplitudes and the continuously unwrapped phase branch.
#[derive(Debug, Clone)]
pub struct PhaseCurve {
    thetas: Vec<f64>,
    amplitudes: Vec<Complex64>,
    unwrapped: Vec<f64>,
}

impl PhaseCurve {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Unwrapped phase per node; the branch starts at exactly zero.
    pub fn unwrapped_phase(&self) -> &[f64] {
        &self.unwrapped
    }

    pub fn magnitude(&self, i: usize) -> f64 {
        self.amplitudes[i].norm()
    }

    /// Phase at the last node of the branch.
    pub fn endpoint_phase(&self) -> f64 {
        *self.unwrapped.last().expect("curve has at least two nodes")
    }

    /// Winding number `round(endpoint / 2 pi)`; the endpoint of a
    /// well-traced branch is a multiple of `2 pi` to much better than the
    /// 1e-3 acceptance slack.
    pub fn winding_number(&self) -> Result<i32> {
        let turns = self.endpoint_phase() / std::f64::consts::TAU;
        let rounded = turns.round();
        if (turns - rounded).abs() > 1e-3 {
            return Err(Error::NotQuantized { endpoint: self.endpoint_phase() });
        }
        Ok(rounded as i32)
    }
}

fn needs_split(zl: Complex64, zr: Complex64, s: &TraceSettings) -> bool {
    let (ml, mr) = (zl.norm(), zr.norm());
    if ml == 0.0 || mr == 0.0 {
        return true;
    }
    if ml.min(mr) < s.refine_magnitude {
        return true;
    }
    if ml.max(mr) / ml.min(mr) > s.max_magnitude_ratio {
        return true;
    }
    wrap_angle((zr / zl).arg()).abs() > s.max_phase_step
}

/// Whether an interval stuck at the minimum width sits on a zero of the
/// amplitude (phase step unresolvable, or magnitude numerically zero).
fn unresolvable(zl: Complex64, zr: Complex64, s: &TraceSettings) -> bool {
    let (ml, mr) = (zl.norm(), zr.norm());
    if ml.min(mr) < s.undefined_magnitude {
        return true;
    }
    if ml == 0.0 || mr == 0.0 {
        return true;
    }
    wrap_angle((zr / zl).arg()).abs() > s.max_phase_step
}

fn refine(
    f: &dyn Fn(f64) -> Complex64,
    tl: f64,
    zl: Complex64,
    tr: f64,
    zr: Complex64,
    s: &TraceSettings,
    out: &mut Vec<(f64, Complex64)>,
) -> Result<()> {
    if needs_split(zl, zr, s) {
        if tr - tl <= s.min_interval {
            if unresolvable(zl, zr, s) {
                return Err(Error::UndefinedAtCriticalPoint {
                    theta: 0.5 * (tl + tr),
                    magnitude: zl.norm().min(zr.norm()),
                });
            }
        } else {
            let tm = 0.5 * (tl + tr);
            let zm = f(tm);
            refine(f, tl, zl, tm, zm, s, out)?;
            refine(f, tm, zm, tr, zr, s, out)?;
            return Ok(());
        }
    }
    out.push((tr, zr));
    Ok(())
}

/// Trace `f` over `[lo, hi]` starting from `grid_hint` uniform intervals and
/// return the continuous branch pinned to zero at the left endpoint.
pub fn trace(
    f: &dyn Fn(f64) -> Complex64,
    lo: f64,
    hi: f64,
    grid_hint: usize,
    settings: &TraceSettings,
) -> Result<PhaseCurve> {
    assert!(grid_hint >= 2 && hi > lo, "trace requires grid_hint >= 2 and hi > lo");
    let mut nodes: Vec<(f64, Complex64)> = Vec::with_capacity(grid_hint + 1);
    let coarse: Vec<(f64, Complex64)> = (0..=grid_hint)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / grid_hint as f64;
            (t, f(t))
        })
        .collect();
    nodes.push(coarse[0]);
    for w in coarse.windows(2) {
        let (tl, zl) = w[0];
        let (tr, zr) = w[1];
        refine(f, tl, zl, tr, zr, settings, &mut nodes)?;
    }

    let mut thetas = Vec::with_capacity(nodes.len());
    let mut amplitudes = Vec::with_capacity(nodes.len());
    let mut unwrapped = Vec::with_capacity(nodes.len());
    let mut phase = 0.0;
    let mut prev = nodes[0].1;
    for (i, &(t, z)) in nodes.iter().enumerate() {
        if z.norm() < settings.undefined_magnitude {
            return Err(Error::UndefinedAtCriticalPoint { theta: t, magnitude: z.norm() });
        }
        if i > 0 {
            phase += wrap_angle((z / prev).arg());
            prev = z;
        }
        thetas.push(t);
        amplitudes.push(z);
        unwrapped.push(phase);
    }
    Ok(PhaseCurve { thetas, amplitudes, unwrapped })
}
