//! Monte Carlo sampling of readout sequences and the estimator of the
//! averaged phase factor `<e^{2i chi}>`.
//!
//! Readouts are drawn step by step from the conditional Born probabilities
//! of the current unnormalized state, then the final projective readout from
//! the overlap with the initial state. The truncated scaled Kraus pair is
//! complete only to `O(1/N^2)`, so the two per-step probabilities are
//! normalized for the draw and the product of their raw sums travels with
//! the sample as a weight; weighting the accepted contribution
//! `e^{2i arg(amp)}` makes the estimator exactly unbiased for the finite-N
//! averaged amplitude. Rejected samples (final readout 1) contribute zero.
//!
//! Streams are ChaCha12 with one substream per sample index, so estimates
//! are reproducible bit for bit and samples can be partitioned freely.

use crate::measurement::{axis_sequence, kraus_scaled, rotation, ProtocolParams, Readout};
use crate::numerics::{c64, Complex64};
use crate::trajectories::ReadoutSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Monte Carlo estimate of the averaged phase factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Mean of the per-sample contributions.
    pub estimate: Complex64,
    /// Jackknife standard error of the mean (total over both components).
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// Fraction of samples whose final projective readout was zero.
    pub accepted_fraction: f64,
}

/// One sampled readout record.
#[derive(Debug, Clone)]
pub struct SampledSequence {
    pub sequence: ReadoutSequence,
    /// Postselected amplitude `<psi_0|M...M|psi_0>`; zero if the final
    /// projective readout was 1.
    pub amplitude: Complex64,
    /// Product of the per-step raw probability sums `p_0 + p_1`; equals 1
    /// when the Kraus pair is exactly complete.
    pub norm_weight: f64,
}

/// Draw one readout sequence and its amplitude from the conditional Born
/// chain. Deterministic given the generator state.
pub fn sample_sequence(pp: &ProtocolParams, rng: &mut impl Rng) -> SampledSequence {
    let n = pp.finite_steps().expect("sample_sequence needs finite N");
    assert!(n >= 1, "sample_sequence needs N >= 1");
    let kraus = [
        kraus_scaled(pp, Readout::Zero).unwrap(),
        kraus_scaled(pp, Readout::One).unwrap(),
    ];
    let psi0 = pp.initial_state();
    let mut psi = psi0;
    let mut bits = Vec::with_capacity(n as usize);
    let mut weight = 1.0;
    for k in 1..=n {
        let r = rotation(&axis_sequence(pp, k).unwrap());
        let in_frame = psi.apply(&r);
        let w0 = in_frame.apply(&kraus[0]).norm_sq();
        let w1 = in_frame.apply(&kraus[1]).norm_sq();
        let total = w0 + w1;
        weight *= total / in_frame.norm_sq();
        let click = rng.gen::<f64>() < w1 / total;
        let readout = if click { Readout::One } else { Readout::Zero };
        bits.push(readout);
        psi = in_frame.apply(&kraus[readout.bit() as usize]).apply(&r.adjoint());
    }
    let amp = psi0.inner(&psi);
    let p_accept = amp.norm_sqr() / psi.norm_sq();
    let accepted = rng.gen::<f64>() < p_accept;
    let final_projective = if accepted { Readout::Zero } else { Readout::One };
    SampledSequence {
        sequence: ReadoutSequence::new(bits, final_projective).unwrap(),
        amplitude: if accepted { amp } else { c64(0.0, 0.0) },
        norm_weight: weight,
    }
}

/// Estimate the finite-N averaged phase factor from `n_rs` sampled
/// sequences. Sample `i` runs on substream `i` of the seeded generator, and
/// the reduction is in index order, so the result is bit-identical for a
/// fixed seed.
pub fn estimate_averaged(pp: &ProtocolParams, n_rs: u64, seed: u64) -> McEstimate {
    assert!(n_rs >= 1, "estimate_averaged needs n_rs >= 1");
    let mut terms = Vec::with_capacity(n_rs as usize);
    let mut accepted = 0u64;
    for i in 0..n_rs {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let s = sample_sequence(pp, &mut rng);
        if s.sequence.final_projective() == Readout::Zero {
            accepted += 1;
            let phase = s.amplitude / s.amplitude.norm();
            terms.push(phase * phase * s.norm_weight);
        } else {
            terms.push(c64(0.0, 0.0));
        }
    }
    let n = n_rs as f64;
    let mean = terms.iter().sum::<Complex64>() / n;
    let stderr = if n_rs > 1 {
        let ss: f64 = terms.iter().map(|t| (t - mean).norm_sqr()).sum();
        (ss / (n * (n - 1.0))).sqrt()
    } else {
        0.0
    };
    McEstimate {
        estimate: mean,
        stderr,
        n_samples: n_rs,
        seed,
        accepted_fraction: accepted as f64 / n,
    }
}

/// Exhaustive distribution of the sampler at small `N`: the probability of
/// drawing each weak-readout sequence with an accepted final readout,
/// together with its weighted contribution. Test oracle for the sampler.
pub fn enumerate_sampler_distribution(pp: &ProtocolParams) -> Vec<(ReadoutSequence, f64, Complex64)> {
    let n = pp.finite_steps().expect("enumeration needs finite N");
    assert!(n <= 20, "enumeration is exponential in N");
    let kraus = [
        kraus_scaled(pp, Readout::Zero).unwrap(),
        kraus_scaled(pp, Readout::One).unwrap(),
    ];
    let psi0 = pp.initial_state();
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u64..(1u64 << n) {
        let mut psi = psi0;
        let mut prob = 1.0;
        let mut weight = 1.0;
        let mut bits = Vec::with_capacity(n as usize);
        for k in 1..=n {
            let r = rotation(&axis_sequence(pp, k).unwrap());
            let in_frame = psi.apply(&r);
            let w0 = in_frame.apply(&kraus[0]).norm_sq();
            let w1 = in_frame.apply(&kraus[1]).norm_sq();
            let total = w0 + w1;
            weight *= total / in_frame.norm_sq();
            let bit = ((mask >> (k - 1)) & 1) as usize;
            prob *= [w0, w1][bit] / total;
            bits.push(if bit == 1 { Readout::One } else { Readout::Zero });
            psi = in_frame.apply(&kraus[bit]).apply(&r.adjoint());
        }
        let amp = psi0.inner(&psi);
        let p_accept = amp.norm_sqr() / psi.norm_sq();
        let seq = ReadoutSequence::new(bits, Readout::Zero).unwrap();
        let contribution = if amp.norm() > 0.0 {
            amp / amp.norm() * (amp / amp.norm()) * weight
        } else {
            c64(0.0, 0.0)
        };
        out.push((seq, prob * p_accept, contribution));
    }
    out
}
