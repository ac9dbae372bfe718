//! Hermitian two-mode coherence operators and relative-number statistics.
//!
//! The first-order operators are
//!
//! ```text
//! cos(phi) = (a2+ a1 + a2 a1+) / sqrt(2 K_S)
//! sin(phi) = i (a2+ a1 - a2 a1+) / sqrt(2 K_S)
//! ```
//!
//! with the normalization K_S = <2 n1 n2 + n1 + n2> taken on the state
//! (or ensemble) under study, so that <sin^2 + cos^2> = 1 holds
//! identically. Second-order analogues divide (a2+ a1)^2 +- (a2 a1+)^2
//! by K_S itself. Coherence fluctuations are the variance
//! D(cos phi) = <cos^2 phi> - <cos phi>^2: zero for phase-locked
//! condensates, 1/2 for uncorrelated ones.
//!
//! Number squeezing is reported through 1/S^2 = D(N_r)/N for the
//! relative number N_r = n2 - n1.
//!
//! For mixed states every raw moment is the weight-average of per-state
//! moments and the ensemble K_S enters the denominators; the alternative
//! (normalizing per state, then averaging) is deliberately not used.
//!
//! All moment sums run in ascending Fock index with compensated
//! summation so tabulated output reproduces to 12 digits.

use crate::kahan::KahanSum;
use crate::model::PureState;
use crate::scalar::real;
use crate::{Error, Result, Scalar};

/// First- and second-order coherence moments of one state or ensemble.
#[derive(Clone, Copy, Debug)]
pub struct CoherenceStats<R> {
    /// <cos phi>
    pub mean_cos: R,
    /// <sin phi>; identically zero for real amplitudes, kept as a
    /// NaN-propagating corruption canary.
    pub mean_sin: R,
    /// <cos^2 phi>
    pub mean_cos2: R,
    /// <sin^2 phi>
    pub mean_sin2: R,
    /// D(cos phi) = <cos^2 phi> - <cos phi>^2
    pub var_cos: R,
    /// <cos 2phi>
    pub mean_cos_2phi: R,
    /// <sin 2phi>; same canary role as `mean_sin`.
    pub mean_sin_2phi: R,
    /// K_S = <2 n1 n2 + n1 + n2>
    pub ks: R,
}

/// Relative-number moments of one state or ensemble.
#[derive(Clone, Copy, Debug)]
pub struct NumberStats<R> {
    /// <N_r>
    pub mean_nr: R,
    /// D(N_r) = <N_r^2> - <N_r>^2
    pub var_nr: R,
    /// 1/S^2 = D(N_r)/N with the squeezing S = sqrt(N/D(N_r)).
    pub inv_s_squared: R,
}

/// Raw moments entering every coherence/number ratio. Ensemble values
/// are plain weight-averages of these.
#[derive(Clone, Copy, Debug)]
struct RawMoments<R> {
    hop1: R,
    hop2: R,
    ks: R,
    nr: R,
    nr2: R,
}

/// <a2+ a1 + a2 a1+> = 2 sum_k c_{k-1} c_k sqrt(k (N-k+1)).
pub fn hop_moment_1<R: Scalar>(state: &PureState<R>, n_total: u32) -> R {
    assert_eq!(state.len(), n_total as usize + 1, "state/N mismatch");
    real::<R>(2.0) * one_sided_hop_1(state.amplitudes(), n_total)
}

/// <(a2+ a1)^2 + (a2 a1+)^2>
/// = 2 sum_k c_{k-2} c_k sqrt(k (k-1) (N-k+1) (N-k+2)).
pub fn hop_moment_2<R: Scalar>(state: &PureState<R>, n_total: u32) -> R {
    assert_eq!(state.len(), n_total as usize + 1, "state/N mismatch");
    real::<R>(2.0) * one_sided_hop_2(state.amplitudes(), n_total)
}

/// K_S = <2 n1 n2 + n1 + n2> = sum_k c_k^2 (2 k (N-k) + N).
pub fn ks_norm<R: Scalar>(state: &PureState<R>, n_total: u32) -> R {
    assert_eq!(state.len(), n_total as usize + 1, "state/N mismatch");
    let c = state.amplitudes();
    let n = n_total as i64;
    let mut acc = KahanSum::new();
    for (k, &ck) in c.iter().enumerate() {
        let weight = real::<R>((2 * k as i64 * (n - k as i64) + n) as f64);
        acc.add(ck * ck * weight);
    }
    acc.value()
}

fn one_sided_hop_1<R: Scalar>(c: &[R], n_total: u32) -> R {
    let n = n_total as i64;
    let mut acc = KahanSum::new();
    for k in 1..=n {
        let amp = (k * (n - k + 1)) as f64;
        acc.add(c[(k - 1) as usize] * c[k as usize] * real::<R>(amp).sqrt());
    }
    acc.value()
}

fn one_sided_hop_2<R: Scalar>(c: &[R], n_total: u32) -> R {
    let n = n_total as i64;
    let mut acc = KahanSum::new();
    for k in 2..=n {
        let amp = (k * (k - 1) * (n - k + 1) * (n - k + 2)) as f64;
        acc.add(c[(k - 2) as usize] * c[k as usize] * real::<R>(amp).sqrt());
    }
    acc.value()
}

fn raw_moments<R: Scalar>(state: &PureState<R>, n_total: u32) -> RawMoments<R> {
    assert_eq!(state.len(), n_total as usize + 1, "state/N mismatch");
    let c = state.amplitudes();
    let n = n_total as i64;
    let fwd1 = one_sided_hop_1(c, n_total);
    let fwd2 = one_sided_hop_2(c, n_total);
    let two = real::<R>(2.0);

    let mut ks = KahanSum::new();
    let mut nr = KahanSum::new();
    let mut nr2 = KahanSum::new();
    for (k, &ck) in c.iter().enumerate() {
        let p = ck * ck;
        let rel = (n - 2 * k as i64) as f64;
        ks.add(p * real::<R>(2.0 * (k as f64) * ((n - k as i64) as f64) + n as f64));
        nr.add(p * real::<R>(rel));
        nr2.add(p * real::<R>(rel * rel));
    }

    RawMoments {
        hop1: two * fwd1,
        hop2: two * fwd2,
        ks: ks.value(),
        nr: nr.value(),
        nr2: nr2.value(),
    }
}

#[allow(clippy::eq_op)] // the sin-channel x - x keeps NaN corruption visible
fn coherence_from_moments<R: Scalar>(m: &RawMoments<R>) -> Result<CoherenceStats<R>> {
    if m.ks.is_nan() || m.ks <= R::zero() {
        return Err(Error::KsNotPositive {
            ks: m.ks.to_f64().unwrap_or(f64::NAN),
        });
    }
    let two = real::<R>(2.0);
    let half = real::<R>(0.5);
    let denom = (two * m.ks).sqrt();

    let mean_cos = m.hop1 / denom;
    // forward and backward hops coincide for real amplitudes; the
    // difference stays in the formula so NaN corruption shows up here
    let mean_sin = (m.hop1 - m.hop1) / denom;
    let second = m.hop2 / (two * m.ks);
    let mean_cos2 = half + second;
    let mean_sin2 = half - second;
    let var_cos = mean_cos2 - mean_cos * mean_cos;
    let mean_cos_2phi = m.hop2 / m.ks;
    let mean_sin_2phi = (m.hop2 - m.hop2) / m.ks;

    Ok(CoherenceStats {
        mean_cos,
        mean_sin,
        mean_cos2,
        mean_sin2,
        var_cos,
        mean_cos_2phi,
        mean_sin_2phi,
        ks: m.ks,
    })
}

fn number_from_moments<R: Scalar>(m: &RawMoments<R>, n_total: u32) -> NumberStats<R> {
    let var_nr = m.nr2 - m.nr * m.nr;
    NumberStats {
        mean_nr: m.nr,
        var_nr,
        inv_s_squared: var_nr / real::<R>(n_total as f64),
    }
}

/// Coherence statistics of a pure state.
pub fn coherence_stats<R: Scalar>(
    state: &PureState<R>,
    n_total: u32,
) -> Result<CoherenceStats<R>> {
    coherence_from_moments(&raw_moments(state, n_total))
}

/// Relative-number statistics of a pure state.
pub fn number_stats<R: Scalar>(state: &PureState<R>, n_total: u32) -> NumberStats<R> {
    number_from_moments(&raw_moments(state, n_total), n_total)
}

fn validate_weights<R: Scalar>(weights: &[R], states: &[PureState<R>]) -> Result<()> {
    assert_eq!(weights.len(), states.len(), "weights/states mismatch");
    for (i, &w) in weights.iter().enumerate() {
        if w < R::zero() {
            return Err(Error::NegativeWeight { index: i });
        }
    }
    let total = crate::kahan::sum(weights.iter().copied());
    if (total - R::one()).abs() > R::sum_tol() {
        return Err(Error::WeightSum {
            sum: total.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

fn ensemble_moments<R: Scalar>(
    weights: &[R],
    states: &[PureState<R>],
    n_total: u32,
) -> RawMoments<R> {
    let mut hop1 = KahanSum::new();
    let mut hop2 = KahanSum::new();
    let mut ks = KahanSum::new();
    let mut nr = KahanSum::new();
    let mut nr2 = KahanSum::new();
    for (&w, state) in weights.iter().zip(states) {
        let m = raw_moments(state, n_total);
        hop1.add(w * m.hop1);
        hop2.add(w * m.hop2);
        ks.add(w * m.ks);
        nr.add(w * m.nr);
        nr2.add(w * m.nr2);
    }
    RawMoments {
        hop1: hop1.value(),
        hop2: hop2.value(),
        ks: ks.value(),
        nr: nr.value(),
        nr2: nr2.value(),
    }
}

/// Coherence statistics of a statistical mixture: raw moments are
/// weight-averaged, then the ratios are formed with the ensemble K_S.
pub fn ensemble_coherence_stats<R: Scalar>(
    weights: &[R],
    states: &[PureState<R>],
    n_total: u32,
) -> Result<CoherenceStats<R>> {
    validate_weights(weights, states)?;
    coherence_from_moments(&ensemble_moments(weights, states, n_total))
}

/// Relative-number statistics of a statistical mixture.
pub fn ensemble_number_stats<R: Scalar>(
    weights: &[R],
    states: &[PureState<R>],
    n_total: u32,
) -> Result<NumberStats<R>> {
    validate_weights(weights, states)?;
    Ok(number_from_moments(
        &ensemble_moments(weights, states, n_total),
        n_total,
    ))
}
