//! Canonical-ensemble states and spectrum diagnostics.
//!
//! Equilibrium mixed states follow rho(T) = exp(-beta H)/Tr[exp(-beta H)]
//! with beta = 1/(k_B T) expressed in the same energy units as the
//! junction parameters. Thermal averages of the coherence and number
//! operators reduce to Boltzmann-weighted ensemble moments over the
//! eigenbasis. The spacing diagnostics back the finite-temperature
//! anomaly: macroscopic self-trapping shows up as a quasi-degenerate
//! top of the spectrum and a minimum of the averaged level spacing in
//! the crossover region.

use crate::eigensolve::SpectralDecomposition;
use crate::kahan::KahanSum;
use crate::model::JunctionParams;
use crate::observables::{
    ensemble_coherence_stats, ensemble_number_stats, CoherenceStats, NumberStats,
};
use crate::scalar::real;
use crate::{Error, Result, Scalar};

/// Default relative threshold for calling the top of a spectrum
/// degenerate: far above eigensolver residuals, far below physical gaps.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-6;

/// Boltzmann weights over a spectral decomposition.
///
/// Weights are computed after subtracting the ground energy, so large
/// beta never overflows. `beta = +inf` is a distinguished value meaning
/// the T -> 0 limit: equal weights on the ground multiplet.
#[derive(Clone, Debug)]
pub struct ThermalEnsemble<'s, R> {
    beta: R,
    weights: Vec<R>,
    spectrum: &'s SpectralDecomposition<R>,
}

impl<'s, R: Scalar> ThermalEnsemble<'s, R> {
    pub fn beta(&self) -> R {
        self.beta
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn spectrum(&self) -> &'s SpectralDecomposition<R> {
        self.spectrum
    }

    /// Number of levels sharing the ground weight at beta = inf.
    pub fn ground_multiplicity(&self) -> usize {
        ground_multiplet(self.spectrum)
    }
}

fn ground_multiplet<R: Scalar>(spectrum: &SpectralDecomposition<R>) -> usize {
    let e = spectrum.eigenvalues();
    let scale = e
        .iter()
        .fold(R::one(), |acc, &x| if x.abs() > acc { x.abs() } else { acc });
    let tol = real::<R>(1e-12) * scale;
    e.iter().take_while(|&&x| x - e[0] <= tol).count()
}

/// Builds the canonical ensemble at inverse temperature `beta`.
pub fn thermal_ensemble<R: Scalar>(
    spectrum: &SpectralDecomposition<R>,
    beta: R,
) -> Result<ThermalEnsemble<'_, R>> {
    if beta.is_nan() || beta < R::zero() {
        return Err(Error::NegativeBeta(beta.to_f64().unwrap_or(f64::NAN)));
    }
    let d = spectrum.dim();
    let mut weights = vec![R::zero(); d];

    if beta.is_infinite() {
        let m = ground_multiplet(spectrum);
        let share = R::one() / real::<R>(m as f64);
        for w in weights.iter_mut().take(m) {
            *w = share;
        }
    } else {
        let e0 = spectrum.ground_energy();
        let mut z = KahanSum::new();
        for (i, &e) in spectrum.eigenvalues().iter().enumerate() {
            let w = (-beta * (e - e0)).exp();
            weights[i] = w;
            z.add(w);
        }
        let z = z.value();
        for w in &mut weights {
            *w /= z;
        }
    }

    Ok(ThermalEnsemble {
        beta,
        weights,
        spectrum,
    })
}

/// Thermal coherence statistics, Tr[rho Q] over the coherence moments.
pub fn thermal_coherence<R: Scalar>(
    params: &JunctionParams<R>,
    spectrum: &SpectralDecomposition<R>,
    beta: R,
) -> Result<CoherenceStats<R>> {
    let ens = thermal_ensemble(spectrum, beta)?;
    ensemble_coherence_stats(ens.weights(), spectrum.eigenvectors(), params.n_total())
}

/// Thermal relative-number statistics, with D(N_r)_T about the thermal
/// mean.
pub fn thermal_number<R: Scalar>(
    params: &JunctionParams<R>,
    spectrum: &SpectralDecomposition<R>,
    beta: R,
) -> Result<NumberStats<R>> {
    let ens = thermal_ensemble(spectrum, beta)?;
    ensemble_number_stats(ens.weights(), spectrum.eigenvectors(), params.n_total())
}

/// Thermal coherence fluctuations under the per-state normalization:
/// each eigenstate keeps its own K_S inside <cos phi>_i and
/// <cos^2 phi>_i before the Boltzmann average.
///
/// This is the comparison alternative to [`thermal_coherence`]; the
/// self-trapping anomaly (a local maximum of the fluctuations versus
/// E_C/E_J near 4/N^2 at sufficiently high temperature) shows up in
/// this variant, driven by the enhanced population of the
/// quasi-degenerate high-excited states in the crossover region.
#[derive(Clone, Copy, Debug)]
pub struct PerStateCoherence<R> {
    pub mean_cos: R,
    pub mean_cos2: R,
    pub var_cos: R,
}

pub fn thermal_coherence_per_state<R: Scalar>(
    params: &JunctionParams<R>,
    spectrum: &SpectralDecomposition<R>,
    beta: R,
) -> Result<PerStateCoherence<R>> {
    let ens = thermal_ensemble(spectrum, beta)?;
    let mut mean = KahanSum::new();
    let mut mean2 = KahanSum::new();
    for (&w, v) in ens.weights().iter().zip(spectrum.eigenvectors()) {
        if w == R::zero() {
            continue;
        }
        let c = crate::observables::coherence_stats(v, params.n_total())?;
        mean.add(w * c.mean_cos);
        mean2.add(w * c.mean_cos2);
    }
    let mean_cos = mean.value();
    let mean_cos2 = mean2.value();
    Ok(PerStateCoherence {
        mean_cos,
        mean_cos2,
        var_cos: mean_cos2 - mean_cos * mean_cos,
    })
}

/// Level-spacing summary of a spectrum.
#[derive(Clone, Copy, Debug)]
pub struct SpectrumDiagnostics<R> {
    /// Average of E_{i+1} - E_i, i.e. (E_max - E_0)/(d - 1).
    pub mean_spacing: R,
    /// Average spacing across the upper half of the spectrum,
    /// (E_max - E_{d/2})/(d - 1 - d/2). The self-trapping crossover
    /// compresses the high-excited levels, so this statistic dips at
    /// E_C/E_J near 4/N^2 where the full-range average stays monotone.
    pub upper_mean_spacing: R,
    /// Gap below the top level, E_max - E_{max-1}.
    pub top_gap: R,
    /// Whether `top_gap` is below `tol * mean_spacing`.
    pub degenerate_top: bool,
}

/// Computes spacing diagnostics; needs at least two levels.
pub fn spectrum_diagnostics<R: Scalar>(
    spectrum: &SpectralDecomposition<R>,
    degeneracy_tol: R,
) -> Result<SpectrumDiagnostics<R>> {
    let d = spectrum.dim();
    if d < 2 {
        return Err(Error::TooFewLevels { dim: d });
    }
    let e = spectrum.eigenvalues();
    let mean_spacing = (e[d - 1] - e[0]) / real::<R>((d - 1) as f64);
    let half = d / 2;
    let upper_mean_spacing = if half < d - 1 {
        (e[d - 1] - e[half]) / real::<R>((d - 1 - half) as f64)
    } else {
        e[d - 1] - e[d - 2]
    };
    let top_gap = e[d - 1] - e[d - 2];
    Ok(SpectrumDiagnostics {
        mean_spacing,
        upper_mean_spacing,
        top_gap,
        degenerate_top: top_gap < degeneracy_tol * mean_spacing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::diagonalize;
    use crate::model::{build_hamiltonian, JunctionParams, TridiagonalHamiltonian};
    use crate::observables::{coherence_stats, number_stats};

    fn junction(n: u32, j: f64, ec: f64, delta: f64) -> JunctionParams<f64> {
        JunctionParams::new(n, j, ec, delta).unwrap()
    }

    fn pair_spectrum() -> crate::Spectrum {
        diagonalize(&build_hamiltonian(&junction(2, 1.0, 0.0, 0.0))).unwrap()
    }

    #[test]
    fn uniform_at_infinite_temperature() {
        let s = pair_spectrum();
        let ens = thermal_ensemble(&s, 0.0).unwrap();
        for &w in ens.weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ground_at_zero_temperature() {
        let s = pair_spectrum();
        let ens = thermal_ensemble(&s, f64::INFINITY).unwrap();
        assert_eq!(ens.weights(), &[1.0, 0.0, 0.0]);
        assert_eq!(ens.ground_multiplicity(), 1);
    }

    #[test]
    fn boltzmann_weights_direct_evaluation() {
        // spectrum (-2, 0, 2) at beta = 1/2: weights prop. to (e, 1, 1/e)
        let s = pair_spectrum();
        let ens = thermal_ensemble(&s, 0.5).unwrap();
        let e = 1.0f64.exp();
        let z = e + 1.0 + 1.0 / e;
        let expect = [e / z, 1.0 / z, 1.0 / (e * z)];
        for (w, x) in ens.weights().iter().zip(expect) {
            assert!((w - x).abs() < 1e-15, "{w} vs {x}");
        }
        let total: f64 = ens.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weights_nonincreasing_and_normalized() {
        let s = diagonalize(&build_hamiltonian(&junction(20, 0.7, 0.9, -1.3))).unwrap();
        for beta in [0.0, 0.01, 0.3, 5.0, 1e4, f64::INFINITY] {
            let ens = thermal_ensemble(&s, beta).unwrap();
            let total: f64 = crate::kahan::sum(ens.weights().iter().copied());
            assert!((total - 1.0).abs() <= 1e-12, "beta={beta}");
            for w in ens.weights().windows(2) {
                assert!(w[0] >= w[1], "weights not monotone at beta={beta}");
            }
        }
    }

    #[test]
    fn rejects_negative_beta() {
        let s = pair_spectrum();
        assert!(matches!(
            thermal_ensemble(&s, -1.0),
            Err(Error::NegativeBeta(_))
        ));
    }

    #[test]
    fn degenerate_ground_multiplet_shares_weight() {
        // J = 0 at a single-atom resonance: two degenerate lowest levels
        let h = build_hamiltonian(&junction(2, 0.0, 100.0, -50.0));
        let s = diagonalize(&h).unwrap();
        let ens = thermal_ensemble(&s, f64::INFINITY).unwrap();
        assert_eq!(ens.ground_multiplicity(), 2);
        assert!((ens.weights()[0] - 0.5).abs() < 1e-15);
        assert!((ens.weights()[1] - 0.5).abs() < 1e-15);
        assert_eq!(ens.weights()[2], 0.0);
    }

    #[test]
    fn zero_temperature_matches_ground_observables() {
        let p = junction(12, 0.8, 0.4, 0.6);
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let c_t = thermal_coherence(&p, &s, f64::INFINITY).unwrap();
        let c_g = coherence_stats(s.eigenvector(0), 12).unwrap();
        assert_eq!(c_t.var_cos, c_g.var_cos);
        let n_t = thermal_number(&p, &s, f64::INFINITY).unwrap();
        let n_g = number_stats(s.eigenvector(0), 12);
        assert_eq!(n_t.var_nr, n_g.var_nr);
    }

    #[test]
    fn infinite_temperature_kills_coherence() {
        let p = junction(9, 1.1, 0.7, 0.2);
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let c = thermal_coherence(&p, &s, 0.0).unwrap();
        assert!(c.mean_cos.abs() < 1e-12);
        assert!((c.var_cos - 0.5).abs() < 1e-12);
    }

    #[test]
    fn uniform_mixture_matches_fock_basis_sum() {
        // beta = 0 observables equal direct Fock-basis averages by trace
        // invariance; strong cross-check of the eigenvectors.
        let p = junction(7, 0.9, 1.4, -0.8);
        let n = p.n_total();
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let d = s.dim();
        let n_t = thermal_number(&p, &s, 0.0).unwrap();

        let mut nr = 0.0;
        let mut nr2 = 0.0;
        for k in 0..d {
            let rel = n as f64 - 2.0 * k as f64;
            nr += rel / d as f64;
            nr2 += rel * rel / d as f64;
        }
        assert!((n_t.mean_nr - nr).abs() < 1e-10);
        assert!((n_t.var_nr - (nr2 - nr * nr)).abs() < 1e-10);
    }

    #[test]
    fn uniform_variance_closed_form_pair() {
        let p = junction(2, 1.0, 0.0, 0.0);
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let n_t = thermal_number(&p, &s, 0.0).unwrap();
        assert!(n_t.mean_nr.abs() < 1e-12);
        assert!((n_t.var_nr - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn large_beta_converges_to_ground() {
        // beta * range >= 50 is necessary; the rate is set by the first
        // gap, so push beta far enough for 1e-8 there too.
        let p = junction(15, 1.0, 0.5, 0.3);
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let gap = s.eigenvalues()[1] - s.eigenvalues()[0];
        let beta = (50.0 / s.spectral_range()).max(40.0 / gap);
        assert!(beta * s.spectral_range() >= 50.0);
        let c_beta = thermal_coherence(&p, &s, beta).unwrap();
        let c_inf = thermal_coherence(&p, &s, f64::INFINITY).unwrap();
        assert!((c_beta.var_cos - c_inf.var_cos).abs() < 1e-8);
        assert!((c_beta.mean_cos - c_inf.mean_cos).abs() < 1e-8);
    }

    #[test]
    fn coherence_continuous_in_beta() {
        let p = junction(20, 1.0, 0.05, 0.0);
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let beta = 2.0;
        let a = thermal_coherence(&p, &s, beta).unwrap().var_cos;
        let b = thermal_coherence(&p, &s, beta * (1.0 + 1e-8))
            .unwrap()
            .var_cos;
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn fluctuations_grow_with_temperature() {
        let p = junction(30, 1.0 / 30.0, 1e-3, 0.0); // E_J = 1
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let betas = [f64::INFINITY, 100.0, 10.0, 1.0, 0.1, 0.0];
        let mut last = -1.0;
        for beta in betas {
            let v = thermal_coherence(&p, &s, beta).unwrap().var_cos;
            assert!(v >= last - 1e-10, "var_cos fell at beta={beta}");
            last = v;
        }
    }

    #[test]
    fn diagnostics_two_levels() {
        let h = TridiagonalHamiltonian::<f64>::from_bands(vec![-1.0, 1.0], vec![0.0]).unwrap();
        let s = diagonalize(&h).unwrap();
        let d = spectrum_diagnostics(&s, 1e-6).unwrap();
        assert_eq!(d.mean_spacing, 2.0);
        assert_eq!(d.top_gap, 2.0);
        assert!(!d.degenerate_top);
    }

    #[test]
    fn diagnostics_reject_single_level() {
        let h = TridiagonalHamiltonian::<f64>::from_bands(vec![1.0], vec![]).unwrap();
        let s = diagonalize(&h).unwrap();
        assert!(matches!(
            spectrum_diagnostics(&s, 1e-6),
            Err(Error::TooFewLevels { dim: 1 })
        ));
    }

    #[test]
    fn per_state_variance_shows_crossover_anomaly() {
        // the per-state-normalized fluctuations peak near E_C/E_J =
        // 4/N^2 at high temperature and stay monotone at low T
        let n = 100u32;
        let ratios: Vec<f64> = (0..=60)
            .map(|i| 10f64.powf(-4.0 + 2.0 * i as f64 / 60.0))
            .collect();
        let curve = |beta: f64| -> Vec<f64> {
            ratios
                .iter()
                .map(|&r| {
                    let p = junction(n, 1.0 / n as f64, r, 0.0);
                    let s = diagonalize(&build_hamiltonian(&p)).unwrap();
                    thermal_coherence_per_state(&p, &s, beta).unwrap().var_cos
                })
                .collect()
        };
        let hot = curve(2.0); // k_B T = 0.5 E_J
        let peaks: Vec<f64> = (1..hot.len() - 1)
            .filter(|&i| hot[i] > hot[i - 1] && hot[i] > hot[i + 1])
            .map(|i| ratios[i])
            .collect();
        assert!(
            peaks.iter().any(|&r| r > 4e-4 / 3.0 && r < 4e-4 * 3.0),
            "no anomaly peak near 4e-4: {peaks:?}"
        );
        let cold = curve(100.0); // k_B T = 0.01 E_J
        let cold_peaks = (1..cold.len() - 1)
            .filter(|&i| cold[i] > cold[i - 1] && cold[i] > cold[i + 1])
            .count();
        assert_eq!(cold_peaks, 0, "anomaly should vanish at low T");
    }

    #[test]
    fn upper_spacing_dips_at_crossover() {
        let n = 100u32;
        let ratios: Vec<f64> = (0..=60)
            .map(|i| 10f64.powf(-5.0 + 4.0 * i as f64 / 60.0))
            .collect();
        let vals: Vec<(f64, f64)> = ratios
            .iter()
            .map(|&r| {
                let p = junction(n, 1.0 / n as f64, r, 0.0);
                let s = diagonalize(&build_hamiltonian(&p)).unwrap();
                let d = spectrum_diagnostics(&s, 1e-6).unwrap();
                (d.mean_spacing, d.upper_mean_spacing)
            })
            .collect();
        // full-range average is monotone nondecreasing here
        for w in vals.windows(2) {
            assert!(w[1].0 >= w[0].0 - 1e-12);
        }
        // upper-half average has an interior minimum near 4/N^2 = 4e-4
        let (imin, _) = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
            .unwrap();
        assert!(imin > 0 && imin < vals.len() - 1, "minimum not interior");
        let loc = ratios[imin];
        assert!(
            loc > 4e-4 / 3.0 && loc < 4e-4 * 3.0,
            "upper-spacing minimum at {loc:.3e}"
        );
    }

    #[test]
    fn self_trapped_spectrum_has_degenerate_top() {
        // E_C/E_J = 1 at N = 100 is far above 4/N^2
        let p = junction(100, 1e-2, 1.0, 0.0);
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let d = spectrum_diagnostics(&s, 1e-6).unwrap();
        assert!(
            d.degenerate_top,
            "top gap {} spacing {}",
            d.top_gap, d.mean_spacing
        );
    }

    #[test]
    fn mean_spacing_is_range_over_count() {
        let p = junction(25, 0.6, 0.8, 0.1);
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let d = spectrum_diagnostics(&s, 1e-6).unwrap();
        let direct: f64 = s
            .eigenvalues()
            .windows(2)
            .map(|w| w[1] - w[0])
            .sum::<f64>()
            / 25.0;
        assert!((d.mean_spacing - direct).abs() < 1e-12);
    }
}
