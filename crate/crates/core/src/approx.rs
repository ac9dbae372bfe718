//! Approximation schemes for cross-checking the exact diagonalization.
//!
//! Three routes, each with its own regime of validity:
//!
//! * a variational Gaussian profile for the symmetric ground-state
//!   amplitudes, width optimized by golden-section search;
//! * two-level perturbation theory near a single-atom resonance, where
//!   the ground state is a superposition of the two lowest
//!   zero-tunneling Fock states;
//! * a classical Boltzmann average over the mean-field phase space
//!   (n, phi) of the non-rigid pendulum Hamiltonian
//!   H_cl = E_C n^2/2 + delta n - E_J sqrt(1 - (2n/N)^2) cos phi,
//!   good at low temperature and small E_C/E_J.

use crate::model::{
    build_hamiltonian, zero_tunneling_energy, FockIndex, JunctionParams, PureState, QuasiMomentum,
};
use crate::scalar::real;
use crate::{Error, Result, Scalar};

/// Bracket for the Gaussian width sigma, searched on a log scale.
const SIGMA_MIN: f64 = 1e-2;

/// Golden-section tolerance in log sigma.
const GOLDEN_TOL: f64 = 1e-10;

/// Hard cap on quadrature resolution per axis.
const QUADRATURE_MAX_POINTS: usize = 1 << 14;

/// Successive grid-doubling agreement required of the classical
/// variance.
const QUADRATURE_TOL: f64 = 1e-6;

/// Variational Gaussian ground-state approximation.
#[derive(Clone, Debug)]
pub struct GaussianAnsatzResult<R> {
    /// Optimal amplitude width in Fock-index units.
    pub sigma: R,
    /// Variational energy <H>; an upper bound on the true ground energy.
    pub energy: R,
    /// The normalized Gaussian amplitude vector.
    pub state: PureState<R>,
}

/// Ground state of the two-level resonance problem.
#[derive(Clone, Debug)]
pub struct TwoLevelResult<R> {
    /// Coefficient of the lower-momentum basis state |L1>.
    pub alpha1: R,
    /// Coefficient of |L2>.
    pub alpha2: R,
    /// Lower eigenvalue of the 2x2 problem.
    pub energy: R,
    /// The superposition embedded in the full Fock basis.
    pub state: PureState<R>,
    /// Momentum of |L1>; |L2> sits at n + 1.
    pub lower_momentum: QuasiMomentum,
}

/// Classical Boltzmann phase-space averages.
#[derive(Clone, Debug)]
pub struct ClassicalEstimate<R> {
    pub mean_cos: R,
    pub mean_cos2: R,
    pub var_cos: R,
    /// Partition integral estimate; exposed for inspection, no contract.
    pub partition: R,
    /// (n-axis, phi-axis) resolution the estimate converged at.
    pub grid: (usize, usize),
}

/// Minimizes <H> over Gaussian amplitude profiles centered at k = N/2.
///
/// Amplitudes are c_k prop. exp(-(k - N/2)^2 / (4 sigma^2)); sigma is
/// searched on log scale within [0.01, N].
pub fn gaussian_ansatz<R: Scalar>(params: &JunctionParams<R>) -> Result<GaussianAnsatzResult<R>> {
    if params.asymmetry_delta() != R::zero() {
        return Err(Error::AsymmetricAnsatz(
            params.asymmetry_delta().to_f64().unwrap_or(f64::NAN),
        ));
    }
    let h = build_hamiltonian(params);
    let n = params.n_total();

    let energy_at = |log_sigma: R| -> R {
        let state = gaussian_state::<R>(n, log_sigma.exp());
        h.expectation(state.amplitudes())
    };

    let lo = real::<R>(SIGMA_MIN.ln());
    let hi = real::<R>((n as f64).ln());
    let mid = (lo + hi) / real::<R>(2.0);

    // a flat landscape leaves the minimizer nothing to select
    let probes = [energy_at(lo), energy_at(mid), energy_at(hi)];
    let span = probes
        .iter()
        .fold(R::zero(), |acc, &x| acc.max((x - probes[0]).abs()));
    let scale = probes.iter().fold(R::one(), |acc, &x| acc.max(x.abs()));
    if span <= real::<R>(1e-13) * scale {
        return Err(Error::FlatVariationalLandscape);
    }

    let log_sigma = golden_min(energy_at, lo, hi, real::<R>(GOLDEN_TOL));
    let sigma = log_sigma.exp();
    let state = gaussian_state::<R>(n, sigma);
    let energy = h.expectation(state.amplitudes());
    Ok(GaussianAnsatzResult {
        sigma,
        energy,
        state,
    })
}

fn gaussian_state<R: Scalar>(n_total: u32, sigma: R) -> PureState<R> {
    let center = real::<R>(n_total as f64 / 2.0);
    let four = real::<R>(4.0);
    let amplitudes: Vec<R> = (0..=n_total)
        .map(|k| {
            let offset = real::<R>(k as f64) - center;
            (-offset * offset / (four * sigma * sigma)).exp()
        })
        .collect();
    PureState::from_unnormalized(amplitudes).expect("Gaussian profile has positive norm")
}

/// Golden-section minimization on [a, b] to absolute tolerance `tol`.
fn golden_min<R: Scalar>(f: impl Fn(R) -> R, mut a: R, mut b: R, tol: R) -> R {
    let inv_phi = (real::<R>(5.0).sqrt() - R::one()) / real::<R>(2.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // bracket shrinks by inv_phi each step; bound the count anyway
    for _ in 0..400 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    (a + b) / real::<R>(2.0)
}

/// Two lowest zero-tunneling momenta at the given asymmetry, sorted by
/// E*(n) with ties broken toward smaller |n|. They are adjacent except
/// in degenerate flat cases.
pub fn lowest_zero_tunneling_pair<R: Scalar>(
    params: &JunctionParams<R>,
) -> Result<(QuasiMomentum, QuasiMomentum)> {
    let n = params.n_total() as i64;
    let mut levels: Vec<(R, i64)> = Vec::with_capacity(n as usize + 1);
    let mut twice = -n;
    while twice <= n {
        let m = QuasiMomentum::from_twice(twice);
        levels.push((zero_tunneling_energy(params, m)?, twice));
        twice += 2;
    }
    levels.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite energies")
            .then(a.1.abs().cmp(&b.1.abs()))
            .then(a.1.cmp(&b.1))
    });
    let (ta, tb) = (levels[0].1, levels[1].1);
    if (ta - tb).abs() != 2 {
        return Err(Error::NonAdjacentLevels {
            twice_a: ta,
            twice_b: tb,
        });
    }
    let lower = ta.min(tb);
    Ok((
        QuasiMomentum::from_twice(lower),
        QuasiMomentum::from_twice(lower + 2),
    ))
}

/// Solves the 2x2 eigenvalue problem in the span of the zero-tunneling
/// states |n> and |n+1> and embeds the ground superposition in the Fock
/// basis.
pub fn two_level_ground<R: Scalar>(
    params: &JunctionParams<R>,
    lower: QuasiMomentum,
) -> Result<TwoLevelResult<R>> {
    let upper = lower.succ();
    let k1 = FockIndex::from_momentum(lower, params.n_total())?.k;
    let k2 = FockIndex::from_momentum(upper, params.n_total())?.k;
    debug_assert_eq!(k2 + 1, k1);

    let h11 = zero_tunneling_energy(params, lower)?;
    let h22 = zero_tunneling_energy(params, upper)?;
    // coupling between adjacent Fock states k2 and k1 = k2 + 1
    let n = params.n_total() as f64;
    let amp = ((k2 as f64 + 1.0) * (n - k2 as f64)).sqrt();
    let h12 = -params.tunneling_j() * real::<R>(amp);

    let mean = (h11 + h22) / real::<R>(2.0);
    let half_diff = (h11 - h22) / real::<R>(2.0);
    let disc = half_diff.hypot(h12);
    let energy = mean - disc;

    // eigenvector of [[h11, h12], [h12, h22]] for the lower eigenvalue;
    // pick the numerically larger of the two equivalent forms
    let (mut a1, mut a2) = if (energy - h22).abs() > (energy - h11).abs() {
        (energy - h22, h12)
    } else {
        (h12, energy - h11)
    };
    let norm = a1.hypot(a2);
    if norm == R::zero() {
        // h12 = 0 and degenerate diagonal: pick |L1>
        a1 = R::one();
        a2 = R::zero();
    } else {
        a1 /= norm;
        a2 /= norm;
    }
    if (a1.abs() >= a2.abs() && a1 < R::zero()) || (a2.abs() > a1.abs() && a2 < R::zero()) {
        a1 = -a1;
        a2 = -a2;
    }

    let mut amplitudes = vec![R::zero(); params.dim()];
    amplitudes[k1] = a1;
    amplitudes[k2] = a2;
    Ok(TwoLevelResult {
        alpha1: a1,
        alpha2: a2,
        energy,
        state: PureState::new(amplitudes).expect("two-level coefficients are normalized"),
        lower_momentum: lower,
    })
}

/// Two-level ground state with the basis pair picked automatically as
/// the two lowest zero-tunneling levels.
pub fn two_level_ground_auto<R: Scalar>(params: &JunctionParams<R>) -> Result<TwoLevelResult<R>> {
    let (lower, _) = lowest_zero_tunneling_pair(params)?;
    two_level_ground(params, lower)
}

/// Classical Boltzmann averages of cos(phi) and cos^2(phi) over the
/// rectangle n in [-N/2, N/2], phi in [-pi, pi], by trapezoidal
/// quadrature with grid doubling until the variance stabilizes.
pub fn classical_boltzmann<R: Scalar>(
    params: &JunctionParams<R>,
    beta: R,
) -> Result<ClassicalEstimate<R>> {
    if beta.is_nan() || beta <= R::zero() || !beta.is_finite() {
        return Err(Error::ClassicalRequiresPositiveBeta(
            beta.to_f64().unwrap_or(f64::NAN),
        ));
    }
    if params.n_total() < 2 {
        return Err(Error::ClassicalTooFewAtoms(params.n_total()));
    }

    let mut resolution = 32;
    let mut last: Option<ClassicalEstimate<R>> = None;
    while resolution <= QUADRATURE_MAX_POINTS {
        let est = classical_on_grid(params, beta, resolution, resolution);
        if let Some(prev) = &last {
            if (est.var_cos - prev.var_cos).abs() < real::<R>(QUADRATURE_TOL) {
                return Ok(est);
            }
        }
        last = Some(est);
        resolution *= 2;
    }
    Err(Error::QuadratureNoConvergence {
        resolution: QUADRATURE_MAX_POINTS,
    })
}

/// One trapezoidal pass at fixed resolution (cells per axis).
fn classical_on_grid<R: Scalar>(
    params: &JunctionParams<R>,
    beta: R,
    cells_n: usize,
    cells_phi: usize,
) -> ClassicalEstimate<R> {
    let n_tot = real::<R>(params.n_total() as f64);
    let half_n = n_tot / real::<R>(2.0);
    let ej = params.junction_energy();
    let ec = params.charging_ec();
    let delta = params.asymmetry_delta();
    let two = real::<R>(2.0);
    let half = real::<R>(0.5);

    let dn = n_tot / real::<R>(cells_n as f64);
    let dphi = two * R::PI() / real::<R>(cells_phi as f64);

    // H_cl rows: u(n) = E_C n^2/2 + delta n, w(n) = E_J sqrt(1-(2n/N)^2)
    let mut u = Vec::with_capacity(cells_n + 1);
    let mut w = Vec::with_capacity(cells_n + 1);
    let mut h_min = R::infinity();
    let mut cos_phi = Vec::with_capacity(cells_phi + 1);
    for j in 0..=cells_phi {
        let phi = -R::PI() + dphi * real::<R>(j as f64);
        cos_phi.push(phi.cos());
    }
    for i in 0..=cells_n {
        let nv = -half_n + dn * real::<R>(i as f64);
        let ui = ec * nv * nv / two + delta * nv;
        let ratio = nv / half_n;
        let wi = ej * (R::one() - ratio * ratio).max(R::zero()).sqrt();
        // row minimum of H_cl sits at cos(phi) = +-1 depending on sign
        let row_min = ui - wi.abs();
        if row_min < h_min {
            h_min = row_min;
        }
        u.push(ui);
        w.push(wi);
    }

    let mut z = R::zero();
    let mut zc = R::zero();
    let mut zc2 = R::zero();
    for i in 0..=cells_n {
        let edge_n = i == 0 || i == cells_n;
        let mut row_z = R::zero();
        let mut row_c = R::zero();
        let mut row_c2 = R::zero();
        for (j, &c) in cos_phi.iter().enumerate() {
            let h_cl = u[i] - w[i] * c;
            let mut weight = (-beta * (h_cl - h_min)).exp();
            if j == 0 || j == cells_phi {
                weight *= half;
            }
            row_z += weight;
            row_c += weight * c;
            row_c2 += weight * c * c;
        }
        let factor = if edge_n { half } else { R::one() };
        z += factor * row_z;
        zc += factor * row_c;
        zc2 += factor * row_c2;
    }

    let mean_cos = zc / z;
    let mean_cos2 = zc2 / z;
    ClassicalEstimate {
        mean_cos,
        mean_cos2,
        var_cos: mean_cos2 - mean_cos * mean_cos,
        partition: z * dn * dphi * (-beta * h_min).exp(),
        grid: (cells_n, cells_phi),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::{diagonalize, ground_state};
    use crate::model::build_hamiltonian;
    use crate::observables::{coherence_stats, number_stats};

    fn junction(n: u32, j: f64, ec: f64, delta: f64) -> JunctionParams<f64> {
        JunctionParams::new(n, j, ec, delta).unwrap()
    }

    #[test]
    fn gaussian_width_matches_binomial_at_zero_charging() {
        let p = junction(100, 1e-2, 0.0, 0.0); // E_J = 1
        let g = gaussian_ansatz(&p).unwrap();
        let sigma_sqr = g.sigma * g.sigma;
        assert!(
            (sigma_sqr - 25.0).abs() <= 0.05 * 25.0,
            "sigma^2 = {sigma_sqr}"
        );
        // and the ansatz state should reproduce the exact k-variance
        let st = number_stats(&g.state, 100);
        assert!((st.var_nr - 100.0).abs() < 5.0);
    }

    #[test]
    fn gaussian_energy_is_variational_bound() {
        for (n, j, ec) in [(10u32, 0.5, 0.3), (40, 0.1, 2.0), (100, 1e-2, 1e-3)] {
            let p = junction(n, j, ec, 0.0);
            let g = gaussian_ansatz(&p).unwrap();
            let (e0, _) = ground_state(&build_hamiltonian(&p)).unwrap();
            assert!(
                g.energy >= e0 - 1e-10 * (1.0 + e0.abs()),
                "bound violated: {} < {e0}",
                g.energy
            );
        }
    }

    #[test]
    fn gaussian_collapses_toward_fock_at_strong_charging() {
        let p = junction(20, 1e-6, 100.0, 0.0);
        let g = gaussian_ansatz(&p).unwrap();
        assert!(g.sigma < 0.3, "sigma = {}", g.sigma);
        let c = coherence_stats(&g.state, 20).unwrap();
        assert!((c.var_cos - 0.5).abs() < 1e-3);
    }

    #[test]
    fn gaussian_rejects_asymmetric_junction() {
        assert!(matches!(
            gaussian_ansatz(&junction(10, 1.0, 1.0, 0.5)),
            Err(Error::AsymmetricAnsatz(_))
        ));
    }

    #[test]
    fn gaussian_flat_landscape_reported() {
        // no tunneling, no charging: <H> is independent of sigma
        assert!(matches!(
            gaussian_ansatz(&junction(10, 0.0, 0.0, 0.0)),
            Err(Error::FlatVariationalLandscape)
        ));
    }

    #[test]
    fn golden_finds_quadratic_minimum() {
        let x = golden_min(|x: f64| (x - 0.3) * (x - 0.3), -2.0, 2.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-9);
    }

    #[test]
    fn two_level_symmetric_at_resonance() {
        // N=100, E_J=100, E_C=800: resonance of (n, n+1) = (0, 1) at
        // delta = -E_C/2
        let p = junction(100, 1.0, 800.0, -400.0);
        let r = two_level_ground(&p, QuasiMomentum::new_integer(0)).unwrap();
        let inv_sqrt2 = 0.5f64.sqrt();
        assert!((r.alpha1.abs() - inv_sqrt2).abs() < 1e-12);
        assert!((r.alpha2.abs() - inv_sqrt2).abs() < 1e-12);
        assert!((r.alpha1 * r.alpha1 + r.alpha2 * r.alpha2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_level_matches_closed_form() {
        let p = junction(100, 1.0, 800.0, -380.0);
        let r = two_level_ground(&p, QuasiMomentum::new_integer(0)).unwrap();
        let h11 = 0.0f64;
        let h22 = -380.0 + 400.0; // E*(1) = delta + E_C/2
        let k2 = 49.0f64; // Fock index of n = 1
        let h12 = -((k2 + 1.0) * (100.0 - k2)).sqrt();
        let expect = (h11 + h22) / 2.0 - (((h11 - h22) / 2.0).powi(2) + h12 * h12).sqrt();
        assert!((r.energy - expect).abs() < 1e-14 * expect.abs().max(1.0));
    }

    #[test]
    fn two_level_perturbative_limit_off_resonance() {
        // |H11 - H22| >> |H12|: ground is mostly the lower level
        let p = junction(4, 1e-3, 10.0, -1.0);
        // E*(n) = -n + 5 n^2: lowest at n = 0, next at n = 1? E*(1)=4,
        // E*(-1)=6, so pair (0, 1)
        let r = two_level_ground(&p, QuasiMomentum::new_integer(0)).unwrap();
        let h12 = -1e-3 * (3.0f64 * 2.0).sqrt(); // k2 = 1: sqrt(2*3)? see below
        let ratio = r.alpha2 / r.alpha1;
        // alpha ~ H12/(H11 - H22) to first order
        let expect = h12 / (0.0 - 4.0);
        assert!(
            (ratio - expect).abs() < 1e-3 * expect.abs(),
            "{ratio} vs {expect}"
        );
    }

    #[test]
    fn two_level_rejects_out_of_ladder() {
        let p = junction(4, 1.0, 10.0, 0.0);
        assert!(two_level_ground(&p, QuasiMomentum::new_integer(2)).is_err());
        assert!(two_level_ground(&p, QuasiMomentum::new_integer(-3)).is_err());
    }

    #[test]
    fn auto_pair_selection_near_resonance() {
        let p = junction(100, 1.0, 800.0, -390.0);
        let (lo, hi) = lowest_zero_tunneling_pair(&p).unwrap();
        assert_eq!(lo.twice(), 0);
        assert_eq!(hi.twice(), 2);
        let r = two_level_ground_auto(&p).unwrap();
        assert_eq!(r.lower_momentum.twice(), 0);
    }

    #[test]
    fn auto_pair_tie_breaks_toward_smaller_momentum() {
        // delta = -E_C: E*(0) = 0, E*(1) = E*(-1)... vertex at n = 1, so
        // E*(1) lowest, tie between E*(0) and E*(2); |0| < |2| wins.
        let p = junction(10, 0.1, 8.0, -8.0);
        let (lo, hi) = lowest_zero_tunneling_pair(&p).unwrap();
        assert_eq!((lo.twice(), hi.twice()), (0, 2));
    }

    #[test]
    fn two_level_energy_above_exact_ground() {
        let base = junction(100, 1.0, 800.0, 0.0);
        for frac in [-0.55, -0.5, -0.45, -0.4] {
            let p = base.with_delta(800.0 * frac).unwrap();
            let r = two_level_ground_auto(&p).unwrap();
            let (e0, _) = ground_state(&build_hamiltonian(&p)).unwrap();
            assert!(r.energy >= e0 - 1e-10 * e0.abs().max(1.0));
        }
    }

    #[test]
    fn two_level_variance_close_to_exact_near_resonance() {
        let p = junction(100, 1.0, 800.0, -400.0);
        let r = two_level_ground_auto(&p).unwrap();
        let c_two = coherence_stats(&r.state, 100).unwrap();
        let (_, v) = ground_state(&build_hamiltonian(&p)).unwrap();
        let c_exact = coherence_stats(&v, 100).unwrap();
        assert!(
            (c_two.var_cos - c_exact.var_cos).abs() < 0.05,
            "{} vs {}",
            c_two.var_cos,
            c_exact.var_cos
        );
    }

    #[test]
    fn classical_high_temperature_is_uniform_in_phase() {
        let p = junction(100, 1e-2, 1e-3, 0.0);
        let est = classical_boltzmann(&p, 1e-9).unwrap();
        assert!(est.mean_cos.abs() < 1e-6);
        assert!((est.mean_cos2 - 0.5).abs() < 1e-6);
        assert!((est.var_cos - 0.5).abs() < 1e-6);
    }

    #[test]
    fn classical_laplace_limit_phase_locks() {
        // beta E_J large with tiny charging: weight collapses to (0, 0)
        let p = junction(100, 1e-2, 1e-6, 0.0);
        let est = classical_boltzmann(&p, 2000.0).unwrap();
        assert!(est.mean_cos > 0.99, "mean_cos = {}", est.mean_cos);
        assert!(est.var_cos < 1e-3, "var_cos = {}", est.var_cos);
    }

    #[test]
    fn classical_estimate_independent_of_starting_grid() {
        let p = junction(100, 1e-2, 1e-4, 0.0);
        let converged = classical_boltzmann(&p, 50.0).unwrap();
        // recompute at double the converged resolution
        let finer = classical_on_grid(&p, 50.0, converged.grid.0 * 2, converged.grid.1 * 2);
        assert!((converged.var_cos - finer.var_cos).abs() < 1e-6);
    }

    #[test]
    fn classical_rejects_bad_inputs() {
        let p = junction(100, 1e-2, 1e-4, 0.0);
        assert!(matches!(
            classical_boltzmann(&p, 0.0),
            Err(Error::ClassicalRequiresPositiveBeta(_))
        ));
        assert!(matches!(
            classical_boltzmann(&p, f64::INFINITY),
            Err(Error::ClassicalRequiresPositiveBeta(_))
        ));
        let tiny = junction(1, 1.0, 0.0, 0.0);
        assert!(matches!(
            classical_boltzmann(&tiny, 1.0),
            Err(Error::ClassicalTooFewAtoms(1))
        ));
    }

    /// Independent oracle: the phi integral of exp(a cos phi) weighted by
    /// {1, cos, cos^2} has the exact Bessel-series form 2 pi I_k(a).
    mod bessel_oracle {
        use super::*;

        /// Modified Bessel I_k by its power series; fine for |x| < 60.
        fn bessel_i(k: u32, x: f64) -> f64 {
            let half = x / 2.0;
            let mut term = half.powi(k as i32);
            for m in 1..=k {
                term /= m as f64;
            }
            let mut total = term;
            for m in 1..200 {
                term *= half * half / (m as f64 * (m as f64 + k as f64));
                total += term;
                if term.abs() < 1e-18 * total.abs() {
                    break;
                }
            }
            total
        }

        fn classical_via_bessel(p: &JunctionParams<f64>, beta: f64, cells_n: usize) -> (f64, f64) {
            let n_tot = p.n_total() as f64;
            let half_n = n_tot / 2.0;
            let dn = n_tot / cells_n as f64;
            let (mut z, mut zc, mut zc2) = (0.0, 0.0, 0.0);
            // shift the n-weight by its minimum for stability
            let mut u_min = f64::INFINITY;
            let rows: Vec<(f64, f64)> = (0..=cells_n)
                .map(|i| {
                    let nv = -half_n + dn * i as f64;
                    let u = p.charging_ec() * nv * nv / 2.0 + p.asymmetry_delta() * nv;
                    let w = p.junction_energy() * (1.0 - (nv / half_n).powi(2)).max(0.0).sqrt();
                    if u - w.abs() < u_min {
                        u_min = u - w.abs();
                    }
                    (u, w)
                })
                .collect();
            for (i, (u, w)) in rows.iter().enumerate() {
                let a = beta * w;
                // exp(-beta u) * Int exp(a cos) {1, cos, cos^2} dphi
                // = exp(-beta u) * 2 pi {I0, I1, (I0 + I2)/2}(a);
                // u_min = min(u - w) keeps exp(-beta(u - u_min)) * I_k(a)
                // of order I_k(a) e^-a, safe from overflow
                let damp = (-beta * (u - u_min)).exp();
                let i0 = bessel_i(0, a) * damp;
                let i1 = bessel_i(1, a) * damp;
                let i2 = bessel_i(2, a) * damp;
                let edge = if i == 0 || i == cells_n { 0.5 } else { 1.0 };
                z += edge * i0;
                zc += edge * i1;
                zc2 += edge * (i0 + i2) / 2.0;
            }
            (zc / z, zc2 / z)
        }

        #[test]
        fn trapezoid_matches_bessel_route() {
            for (ec, beta) in [(1e-4, 10.0), (1e-3, 30.0), (1e-2, 5.0)] {
                let p = junction(100, 1e-2, ec, 0.0);
                let est = classical_boltzmann(&p, beta).unwrap();
                let (mc, mc2) = classical_via_bessel(&p, beta, 4096);
                assert!(
                    (est.mean_cos - mc).abs() < 1e-5,
                    "mean_cos {} vs {mc} at ec={ec}",
                    est.mean_cos
                );
                assert!(
                    (est.mean_cos2 - mc2).abs() < 1e-5,
                    "mean_cos2 {} vs {mc2} at ec={ec}",
                    est.mean_cos2
                );
            }
        }
    }

    #[test]
    fn classical_tracks_quantum_at_low_temperature_small_charging() {
        use crate::thermal::thermal_coherence;
        let n = 100u32;
        let ej = 1.0;
        let beta = 100.0; // k_B T = 0.01
        let mut discrepancy = Vec::new();
        for ratio in [1e-4, 1e-1] {
            let p = junction(n, ej / n as f64, ej * ratio, 0.0);
            let s = diagonalize(&build_hamiltonian(&p)).unwrap();
            let quantum = thermal_coherence(&p, &s, beta).unwrap().var_cos;
            let classical = classical_boltzmann(&p, beta).unwrap().var_cos;
            discrepancy.push((quantum - classical).abs());
        }
        assert!(discrepancy[0] < 0.02, "low-ratio gap {}", discrepancy[0]);
        assert!(
            discrepancy[1] > discrepancy[0],
            "agreement should degrade with E_C/E_J: {discrepancy:?}"
        );
    }
}
