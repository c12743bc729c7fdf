//! Explicit state trajectories for arbitrary readout sequences, Bloch
//! coordinates, and the split of the postselected phase into Pancharatnam
//! (geometric) and dynamical components.
//!
//! The geometric component is the argument of the projector chain
//! `<psi_0| P_N ... P_1 |psi_0>`, evaluated as the product of consecutive
//! normalized overlaps closed by the final overlap with the initial state.
//! The closing overlap realizes the shortest-geodesic closure of the Bloch
//! trajectory. For Hermitian positive-semidefinite Kraus chains (`A = 0`,
//! all-zeros readouts) every overlap is real non-negative and the phase is
//! purely geometric.

use crate::curve::{trace, TraceSettings};
use crate::measurement::{
    axis_sequence, kraus_scaled, rotation, Direction, ProtocolParams, QubitState, Readout,
};
use crate::numerics::{c64, wrap_angle, Complex64};
use crate::{Error, Result};
use std::f64::consts::PI;

/// A fixed record of weak-measurement readouts plus the final projective one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadoutSequence {
    bits: Vec<Readout>,
    final_projective: Readout,
}

impl ReadoutSequence {
    pub fn new(bits: Vec<Readout>, final_projective: Readout) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParams("readout sequence must have length >= 1".into()));
        }
        Ok(Self { bits, final_projective })
    }

    /// The postselected record: every readout zero.
    pub fn all_zeros(n: usize) -> Result<Self> {
        Self::new(vec![Readout::Zero; n], Readout::Zero)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[Readout] {
        &self.bits
    }

    /// Readout of weak measurement `k` (1-based).
    pub fn bit(&self, k: usize) -> Readout {
        self.bits[k - 1]
    }

    pub fn final_projective(&self) -> Readout {
        self.final_projective
    }

    pub fn is_all_zeros(&self) -> bool {
        self.final_projective == Readout::Zero && self.bits.iter().all(|&r| r == Readout::Zero)
    }
}

/// The state chain `|psi_0> ... |psi_N>` (unnormalized) and the Bloch points
/// of its leading non-null stretch.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<QubitState>,
    pub bloch_points: Vec<[f64; 3]>,
}

impl Trajectory {
    pub(crate) fn from_states(states: Vec<QubitState>) -> Self {
        let bloch_points = states.iter().map_while(|s| s.bloch()).collect();
        Self { states, bloch_points }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `<psi_0|psi_N>`: the amplitude of the record closed by a null final
    /// projective readout.
    pub fn amplitude(&self) -> Complex64 {
        self.states[0].inner(self.states.last().expect("non-empty trajectory"))
    }
}

/// Apply the rotated Kraus chain `M_k = R^-1(n_k) M^(r_k) R(n_k)` to the
/// protocol initial state and record every intermediate state.
///
/// A null state (after `M^(1)` annihilates the component along the axis) is
/// recorded as-is; the Bloch trace simply stops there.
pub fn evolve(pp: &ProtocolParams, seq: &ReadoutSequence) -> Trajectory {
    let n = pp.finite_steps().expect("evolve needs finite N");
    assert_eq!(n as usize, seq.len(), "sequence length must equal the step count");
    let kraus = [
        kraus_scaled(pp, Readout::Zero).unwrap(),
        kraus_scaled(pp, Readout::One).unwrap(),
    ];
    let mut states = Vec::with_capacity(seq.len() + 1);
    let mut psi = pp.initial_state();
    states.push(psi);
    for k in 1..=seq.len() {
        let r = rotation(&axis_sequence(pp, k as u64).unwrap());
        let m = &kraus[seq.bit(k).bit() as usize];
        psi = psi.apply(&r).apply(m).apply(&r.adjoint());
        states.push(psi);
    }
    Trajectory::from_states(states)
}

/// Complex Pancharatnam factor: the product of consecutive normalized
/// overlaps times the closing overlap `<psi_0|psi_N>`.
///
/// Its argument is the geometric phase; its magnitude vanishes when the
/// geodesic closure degenerates.
pub fn geometric_factor(traj: &Trajectory) -> Result<Complex64> {
    let mut normalized = Vec::with_capacity(traj.states.len());
    for (k, s) in traj.states.iter().enumerate() {
        normalized.push(s.normalized().map_err(|_| Error::OrthogonalNeighbors { k })?);
    }
    let mut factor = c64(1.0, 0.0);
    for (k, pair) in normalized.windows(2).enumerate() {
        let overlap = pair[1].inner(&pair[0]);
        if overlap.norm() < 1e-14 {
            return Err(Error::OrthogonalNeighbors { k: k + 1 });
        }
        factor *= overlap;
    }
    let closing = normalized[0].inner(normalized.last().unwrap());
    if closing.norm() < 1e-14 {
        return Err(Error::OrthogonalNeighbors { k: traj.states.len() - 1 });
    }
    Ok(factor * closing)
}

/// Geometric (Pancharatnam) phase of the trajectory, in `(-pi, pi]`.
pub fn pancharatnam_phase(traj: &Trajectory) -> Result<f64> {
    Ok(wrap_angle(geometric_factor(traj)?.arg()))
}

/// Dynamical component: total phase minus the Pancharatnam phase, reduced
/// to `(-pi, pi]`.
pub fn dynamical_component(pp: &ProtocolParams, seq: &ReadoutSequence) -> Result<f64> {
    let traj = evolve(pp, seq);
    let total = traj.amplitude();
    if total.norm() < 1e-280 {
        return Err(Error::OrthogonalNeighbors { k: traj.states.len() - 1 });
    }
    let geometric = pancharatnam_phase(&traj)?;
    Ok(wrap_angle(total.arg() - geometric))
}

/// Winding number of the geodesically-closed trajectory family: the
/// Pancharatnam phase of the all-zeros trajectory, traced continuously over
/// `theta` and read off at the endpoint.
///
/// The family wraps (nonzero winding) exactly when the postselected
/// protocol is above its critical line; the two transitions happen
/// concomitantly.
pub fn family_winding_classifier(
    c: f64,
    a: f64,
    d: Direction,
    theta_grid: usize,
    n: u64,
) -> Result<i32> {
    assert!(theta_grid >= 64, "family_winding_classifier needs theta_grid >= 64");
    assert!(n >= 1_000, "family_winding_classifier needs n >= 1000");
    let sign = d.sign();
    let f = move |theta: f64| {
        let pp = ProtocolParams {
            c,
            a,
            theta,
            direction: if sign > 0.0 { Direction::Clockwise } else { Direction::Counterclockwise },
            steps: crate::measurement::Steps::Finite(n),
        };
        let seq = ReadoutSequence::all_zeros(n as usize).unwrap();
        match geometric_factor(&evolve(&pp, &seq)) {
            Ok(z) => z,
            // A degenerate closure behaves like a zero of the family.
            Err(_) => c64(0.0, 0.0),
        }
    };
    let curve = trace(&f, 0.0, PI, theta_grid, &TraceSettings::default())?;
    curve.winding_number()
}
