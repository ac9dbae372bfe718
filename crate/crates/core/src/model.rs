//! Two-mode Bose-Hubbard model of a quantized Bose-Josephson junction.
//!
//! With the total particle number N conserved, the Fock basis is
//! |k> = |n1 = k, n2 = N - k> for k = 0..N. In that basis the junction
//! Hamiltonian
//!
//! ```text
//! H = -J (a1+ a2 + a1 a2+) + (delta/2) (n2 - n1) + (E_C/8) (n2 - n1)^2
//! ```
//!
//! is a real symmetric tridiagonal matrix, stored here as its two bands.
//! Constant terms in N are dropped. The module also carries the
//! zero-tunneling level algebra E*(n) = delta n + E_C n^2 / 2 behind the
//! single-atom and two-atom resonance conditions.

use crate::kahan::KahanSum;
use crate::scalar::real;
use crate::{Error, Result, Scalar};

/// The four physical knobs of the junction.
///
/// Energies are plain numbers in whatever consistent unit the caller
/// picked; only the ratios matter. The junction energy E_J = N J is
/// derived, never stored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JunctionParams<R> {
    n_total: u32,
    tunneling_j: R,
    charging_ec: R,
    asymmetry_delta: R,
}

impl<R: Scalar> JunctionParams<R> {
    /// Validates N >= 1, E_C >= 0, and finiteness of all energies.
    ///
    /// Negative J is accepted but unvalidated by the bundled studies,
    /// which all use J >= 0.
    pub fn new(n_total: u32, tunneling_j: R, charging_ec: R, asymmetry_delta: R) -> Result<Self> {
        if n_total == 0 {
            return Err(Error::EmptyJunction);
        }
        if !tunneling_j.is_finite() {
            return Err(Error::NonFinite("tunneling_j"));
        }
        if !charging_ec.is_finite() {
            return Err(Error::NonFinite("charging_ec"));
        }
        if !asymmetry_delta.is_finite() {
            return Err(Error::NonFinite("asymmetry_delta"));
        }
        if charging_ec < R::zero() {
            return Err(Error::NegativeChargingEnergy(
                charging_ec.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(JunctionParams {
            n_total,
            tunneling_j,
            charging_ec,
            asymmetry_delta,
        })
    }

    pub fn n_total(&self) -> u32 {
        self.n_total
    }

    pub fn tunneling_j(&self) -> R {
        self.tunneling_j
    }

    pub fn charging_ec(&self) -> R {
        self.charging_ec
    }

    pub fn asymmetry_delta(&self) -> R {
        self.asymmetry_delta
    }

    /// Junction energy E_J = N J, exactly.
    pub fn junction_energy(&self) -> R {
        real::<R>(self.n_total as f64) * self.tunneling_j
    }

    /// Hilbert-space dimension N + 1.
    pub fn dim(&self) -> usize {
        self.n_total as usize + 1
    }

    /// Same junction with a different asymmetry.
    pub fn with_delta(&self, asymmetry_delta: R) -> Result<Self> {
        Self::new(
            self.n_total,
            self.tunneling_j,
            self.charging_ec,
            asymmetry_delta,
        )
    }

    /// Same junction with a different charging energy.
    pub fn with_charging_ec(&self, charging_ec: R) -> Result<Self> {
        Self::new(
            self.n_total,
            self.tunneling_j,
            charging_ec,
            self.asymmetry_delta,
        )
    }
}

/// Quasi-angular momentum n = (n2 - n1)/2, half-integer for odd N.
///
/// Stored as 2n so resonance positions stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuasiMomentum {
    twice: i64,
}

impl QuasiMomentum {
    /// From 2n.
    pub fn from_twice(twice: i64) -> Self {
        QuasiMomentum { twice }
    }

    /// From an integer n (even-N ladders).
    pub fn new_integer(n: i64) -> Self {
        QuasiMomentum { twice: 2 * n }
    }

    pub fn twice(&self) -> i64 {
        self.twice
    }

    pub fn value<R: Scalar>(&self) -> R {
        real::<R>(self.twice as f64 / 2.0)
    }

    /// Whether n sits on the ladder {-N/2, -N/2+1, ..., N/2}.
    pub fn on_ladder(&self, n_total: u32) -> bool {
        let n = n_total as i64;
        self.twice.abs() <= n && (self.twice - n) % 2 == 0
    }

    pub fn succ(&self) -> Self {
        QuasiMomentum {
            twice: self.twice + 2,
        }
    }
}

/// Index into the Fock basis: k atoms in well 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockIndex {
    pub k: usize,
}

impl FockIndex {
    /// Relative number N_r = n2 - n1 = N - 2k.
    pub fn relative_number(&self, n_total: u32) -> i64 {
        n_total as i64 - 2 * self.k as i64
    }

    /// Quasi-angular momentum n = (N - 2k)/2.
    pub fn quasi_momentum(&self, n_total: u32) -> QuasiMomentum {
        QuasiMomentum::from_twice(self.relative_number(n_total))
    }

    /// Inverse map; fails off the ladder.
    pub fn from_momentum(n: QuasiMomentum, n_total: u32) -> Result<Self> {
        if !n.on_ladder(n_total) {
            return Err(Error::MomentumOutOfRange {
                twice_n: n.twice(),
                n_total,
            });
        }
        let k = (n_total as i64 - n.twice()) / 2;
        Ok(FockIndex { k: k as usize })
    }
}

/// The two bands of the symmetric tridiagonal junction Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalHamiltonian<R> {
    diag: Vec<R>,
    offdiag: Vec<R>,
}

impl<R: Scalar> TridiagonalHamiltonian<R> {
    /// Wraps raw bands; `offdiag` couples k and k+1.
    pub fn from_bands(diag: Vec<R>, offdiag: Vec<R>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::BandLengthMismatch {
                diag: diag.len(),
                offdiag: offdiag.len(),
            });
        }
        if diag.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("diag"));
        }
        if offdiag.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("offdiag"));
        }
        Ok(TridiagonalHamiltonian { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[R] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[R] {
        &self.offdiag
    }

    /// Infinity norm (max absolute row sum), the scale used by residual
    /// and degeneracy tolerances.
    pub fn norm_inf(&self) -> R {
        let d = self.dim();
        let mut worst = R::zero();
        for k in 0..d {
            let mut row = self.diag[k].abs();
            if k > 0 {
                row += self.offdiag[k - 1].abs();
            }
            if k + 1 < d {
                row += self.offdiag[k].abs();
            }
            if row > worst {
                worst = row;
            }
        }
        worst
    }

    /// y = H x.
    pub fn matvec(&self, x: &[R]) -> Vec<R> {
        let d = self.dim();
        assert_eq!(x.len(), d, "matvec dimension mismatch");
        let mut y = vec![R::zero(); d];
        for (k, out) in y.iter_mut().enumerate() {
            let mut acc = self.diag[k] * x[k];
            if k > 0 {
                acc += self.offdiag[k - 1] * x[k - 1];
            }
            if k + 1 < d {
                acc += self.offdiag[k] * x[k + 1];
            }
            *out = acc;
        }
        y
    }

    /// <x|H|x> for a normalized amplitude vector.
    pub fn expectation(&self, x: &[R]) -> R {
        let d = self.dim();
        assert_eq!(x.len(), d, "expectation dimension mismatch");
        let mut acc = KahanSum::new();
        for (k, &dk) in self.diag.iter().enumerate() {
            acc.add(dk * x[k] * x[k]);
        }
        let two = real::<R>(2.0);
        for (k, &ok) in self.offdiag.iter().enumerate() {
            acc.add(two * ok * x[k] * x[k + 1]);
        }
        acc.value()
    }
}

/// Normalized real amplitude vector over the Fock basis.
///
/// Eigenvectors of the real symmetric Hamiltonian are chosen real, so a
/// plain `Vec` of reals carries every state this crate handles.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<R> {
    amplitudes: Vec<R>,
}

impl<R: Scalar> PureState<R> {
    /// Accepts an already-normalized vector (|c|^2 = 1 within tolerance).
    pub fn new(amplitudes: Vec<R>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let norm_sqr = norm_sqr(&amplitudes);
        if (norm_sqr - R::one()).abs() > R::sum_tol() {
            return Err(Error::StateNotNormalized {
                norm_sqr: norm_sqr.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(PureState { amplitudes })
    }

    /// Normalizes the vector; fails on a (numerically) zero input.
    pub fn from_unnormalized(mut amplitudes: Vec<R>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let norm = norm_sqr(&amplitudes).sqrt();
        if !norm.is_finite() || norm < R::min_positive_value().sqrt() {
            return Err(Error::ZeroNorm);
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(PureState { amplitudes })
    }

    /// Fock basis state |k> in an (N+1)-dimensional space.
    pub fn fock(dim: usize, k: usize) -> Self {
        assert!(k < dim, "Fock index out of range");
        let mut amplitudes = vec![R::zero(); dim];
        amplitudes[k] = R::one();
        PureState { amplitudes }
    }

    pub fn amplitudes(&self) -> &[R] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> R {
        norm_sqr(&self.amplitudes)
    }
}

fn norm_sqr<R: Scalar>(amplitudes: &[R]) -> R {
    let mut acc = KahanSum::new();
    for &a in amplitudes {
        acc.add(a * a);
    }
    acc.value()
}

/// Builds the two bands of Eq.-(1)-in-Fock-basis for the given junction.
pub fn build_hamiltonian<R: Scalar>(params: &JunctionParams<R>) -> TridiagonalHamiltonian<R> {
    let n = params.n_total as i64;
    let dim = params.dim();
    let half_delta = params.asymmetry_delta / real::<R>(2.0);
    let ec_eighth = params.charging_ec / real::<R>(8.0);

    let mut diag = Vec::with_capacity(dim);
    for k in 0..dim as i64 {
        let nr = real::<R>((n - 2 * k) as f64);
        diag.push(half_delta * nr + ec_eighth * nr * nr);
    }

    let mut offdiag = Vec::with_capacity(dim - 1);
    for k in 0..(dim - 1) as i64 {
        let amp = ((k + 1) * (n - k)) as f64;
        offdiag.push(-params.tunneling_j * real::<R>(amp).sqrt());
    }

    TridiagonalHamiltonian { diag, offdiag }
}

/// Zero-tunneling level energy E*(n) = delta n + E_C n^2 / 2.
pub fn zero_tunneling_energy<R: Scalar>(
    params: &JunctionParams<R>,
    n: QuasiMomentum,
) -> Result<R> {
    if !n.on_ladder(params.n_total) {
        return Err(Error::MomentumOutOfRange {
            twice_n: n.twice(),
            n_total: params.n_total,
        });
    }
    let nv = n.value::<R>();
    Ok(params.asymmetry_delta * nv + params.charging_ec * nv * nv / real::<R>(2.0))
}

/// Asymmetries where E*(n) = E*(n+1): delta = -E_C (n + 1/2) for
/// n = -N/2 .. N/2 - 1. Exactly N values, ascending.
pub fn single_atom_resonances<R: Scalar>(params: &JunctionParams<R>) -> Result<Vec<R>> {
    resonances(params, 1)
}

/// Asymmetries where E*(n) = E*(n+2): delta = -E_C (n + 1), one per
/// admissible n. Empty for N = 1.
pub fn two_atom_resonances<R: Scalar>(params: &JunctionParams<R>) -> Result<Vec<R>> {
    resonances(params, 2)
}

fn resonances<R: Scalar>(params: &JunctionParams<R>, hop: i64) -> Result<Vec<R>> {
    if params.charging_ec <= R::zero() {
        return Err(Error::ZeroChargingEnergy);
    }
    let n = params.n_total as i64;
    let mut out = Vec::new();
    // twice_n runs over the ladder with n and n+hop both in range;
    // delta = -E_C (n + hop/2) = -E_C (2n + hop)/2 decreases with n.
    let mut twice_n = -n;
    while twice_n + 2 * hop <= n {
        let mid = real::<R>((twice_n + hop) as f64 / 2.0);
        out.push(-params.charging_ec * mid);
        twice_n += 2;
    }
    out.reverse();
    Ok(out)
}
