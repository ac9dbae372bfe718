//! Full spectral decomposition of the symmetric tridiagonal Hamiltonian.
//!
//! The production path is an implicit-shift QL iteration with Wilkinson
//! shifts and accumulated eigenvectors (the classic tql2 scheme). A
//! cyclic Jacobi rotation method on the dense matrix serves as an
//! independent brute-force oracle for cross-checking at test scale.
//!
//! Both solvers share one output contract: eigenvalues ascending,
//! orthonormal real eigenvectors, and a fixed sign convention (the
//! largest-magnitude component of each vector is positive) so repeated
//! runs are bit-identical.

use crate::model::{PureState, TridiagonalHamiltonian};
use crate::scalar::real;
use crate::{Error, Result, Scalar};

/// QL sweeps allowed per eigenvalue before declaring numerical pathology.
const MAX_QL_SWEEPS: usize = 50;

/// Jacobi sweeps allowed before declaring non-convergence.
const MAX_JACOBI_SWEEPS: usize = 100;

/// Largest dimension the dense oracle accepts; it is test-scale only.
pub const ORACLE_MAX_DIM: usize = 200;

/// Eigenvalues in ascending order with their orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<R> {
    eigenvalues: Vec<R>,
    eigenvectors: Vec<PureState<R>>,
}

impl<R: Scalar> SpectralDecomposition<R> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[R] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, i: usize) -> &PureState<R> {
        &self.eigenvectors[i]
    }

    pub fn eigenvectors(&self) -> &[PureState<R>] {
        &self.eigenvectors
    }

    pub fn ground_energy(&self) -> R {
        self.eigenvalues[0]
    }

    /// E_max - E_0.
    pub fn spectral_range(&self) -> R {
        self.eigenvalues[self.dim() - 1] - self.eigenvalues[0]
    }
}

/// Diagonalizes the banded Hamiltonian by implicit-shift QL.
pub fn diagonalize<R: Scalar>(
    h: &TridiagonalHamiltonian<R>,
) -> Result<SpectralDecomposition<R>> {
    let n = h.dim();
    let mut d = h.diag().to_vec();
    // subdiagonal with a trailing sentinel, as ql_implicit expects
    let mut e = h.offdiag().to_vec();
    e.push(R::zero());

    let mut z = vec![R::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = R::one();
    }

    ql_implicit(&mut d, &mut e, &mut z, n)?;
    Ok(assemble(d, z, n))
}

/// Ground eigenpair, with a warning when the gap to the first excited
/// level is below 1e-9 of the matrix scale (resonant quasi-degeneracy
/// makes "the" ground state ill-conditioned there).
pub fn ground_state<R: Scalar>(h: &TridiagonalHamiltonian<R>) -> Result<(R, PureState<R>)> {
    let spectrum = diagonalize(h)?;
    if spectrum.dim() > 1 {
        let gap = spectrum.eigenvalues()[1] - spectrum.eigenvalues()[0];
        let scale = h.norm_inf().max(R::one());
        if gap < real::<R>(1e-9) * scale {
            log::warn!(
                "ground state is quasi-degenerate: gap {:e} below 1e-9 of matrix scale {:e}",
                gap.to_f64().unwrap_or(f64::NAN),
                scale.to_f64().unwrap_or(f64::NAN)
            );
        }
    }
    let energy = spectrum.ground_energy();
    let state = spectrum.eigenvectors.into_iter().next().expect("dim >= 1");
    Ok((energy, state))
}

/// Dense symmetric matrix in row-major storage, input to the oracle.
#[derive(Clone, Debug)]
pub struct DenseSymmetric<R> {
    dim: usize,
    data: Vec<R>,
}

impl<R: Scalar> DenseSymmetric<R> {
    /// Symmetrizes nothing: caller supplies `dim*dim` entries of an
    /// already-symmetric matrix.
    pub fn new(dim: usize, data: Vec<R>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != dim * dim {
            return Err(Error::BandLengthMismatch {
                diag: dim * dim,
                offdiag: data.len(),
            });
        }
        Ok(DenseSymmetric { dim, data })
    }

    pub fn from_tridiagonal(h: &TridiagonalHamiltonian<R>) -> Self {
        let dim = h.dim();
        let mut data = vec![R::zero(); dim * dim];
        for k in 0..dim {
            data[k * dim + k] = h.diag()[k];
        }
        for k in 0..dim - 1 {
            data[k * dim + k + 1] = h.offdiag()[k];
            data[(k + 1) * dim + k] = h.offdiag()[k];
        }
        DenseSymmetric { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn at(&self, r: usize, c: usize) -> R {
        self.data[r * self.dim + c]
    }

    fn frobenius(&self) -> R {
        let mut acc = R::zero();
        for &x in &self.data {
            acc += x * x;
        }
        acc.sqrt()
    }

    fn off_norm(&self) -> R {
        let mut acc = R::zero();
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c {
                    let x = self.at(r, c);
                    acc += x * x;
                }
            }
        }
        acc.sqrt()
    }
}

/// Brute-force eigendecomposition by cyclic Jacobi rotations, run until
/// the off-diagonal norm falls below 1e-13 of the matrix norm. Same
/// output contract as [`diagonalize`]; dimension capped at
/// [`ORACLE_MAX_DIM`].
pub fn dense_oracle_diagonalize<R: Scalar>(
    m: &DenseSymmetric<R>,
) -> Result<SpectralDecomposition<R>> {
    let n = m.dim;
    if n > ORACLE_MAX_DIM {
        return Err(Error::OracleTooLarge {
            dim: n,
            max: ORACLE_MAX_DIM,
        });
    }
    let mut a = m.data.clone();
    let mut v = vec![R::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = R::one();
    }

    let scale = m.frobenius();
    let target = real::<R>(1e-13) * scale;
    let one = R::one();

    let mut sweeps = 0;
    loop {
        let off = DenseSymmetric {
            dim: n,
            data: a.clone(),
        }
        .off_norm();
        if off <= target || scale == R::zero() {
            break;
        }
        sweeps += 1;
        if sweeps > MAX_JACOBI_SWEEPS {
            return Err(Error::JacobiStall { sweeps });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == R::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (real::<R>(2.0) * apq);
                let t = if theta >= R::zero() {
                    one / (theta + (theta * theta + one).sqrt())
                } else {
                    -one / (-theta + (theta * theta + one).sqrt())
                };
                let c = one / (t * t + one).sqrt();
                let s = t * c;
                let tau = s / (one + c);

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp - s * (akq + tau * akp);
                    a[p * n + k] = a[k * n + p];
                    a[k * n + q] = akq + s * (akp - tau * akq);
                    a[q * n + k] = a[k * n + q];
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = R::zero();
                a[q * n + p] = R::zero();

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let d: Vec<R> = (0..n).map(|i| a[i * n + i]).collect();
    Ok(assemble(d, v, n))
}

/// Implicit-shift QL on (d, e) with eigenvector accumulation into z.
/// e has length n with e[n-1] an unused sentinel.
fn ql_implicit<R: Scalar>(d: &mut [R], e: &mut [R], z: &mut [R], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let eps = R::epsilon();
    let zero = R::zero();
    let one = R::one();
    let two = real::<R>(2.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            // deflation scan: first m >= l with a negligible coupling
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::EigensolveStall {
                    index: l,
                    sweeps: MAX_QL_SWEEPS,
                });
            }

            // Wilkinson shift from the leading 2x2 of the active block
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(one);
            let denom = g + if g >= zero { r } else { -r };
            g = d[m] - d[l] + e[l] / denom;

            let mut s = one;
            let mut c = one;
            let mut p = zero;
            let mut underflow = false;

            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == zero {
                    // rotation annihilated prematurely; restart the sweep
                    d[i + 1] -= p;
                    e[m] = zero;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let t = (d[i] - g) * s + two * c * b;
                p = s * t;
                d[i + 1] = g + p;
                g = c * t - b;

                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = zero;
        }
    }
    Ok(())
}

/// Sorts ascending, applies the sign convention, renormalizes, and wraps.
fn assemble<R: Scalar>(d: Vec<R>, z: Vec<R>, n: usize) -> SpectralDecomposition<R> {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &col in &order {
        eigenvalues.push(d[col]);
        let mut vec_col: Vec<R> = (0..n).map(|row| z[row * n + col]).collect();
        // largest-magnitude component positive; first index wins ties
        let mut pivot = 0;
        for (i, x) in vec_col.iter().enumerate() {
            if x.abs() > vec_col[pivot].abs() {
                pivot = i;
            }
        }
        if vec_col[pivot] < R::zero() {
            for x in &mut vec_col {
                *x = -*x;
            }
        }
        eigenvectors.push(
            PureState::from_unnormalized(vec_col).expect("rotation columns cannot vanish"),
        );
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kahan;
    use crate::model::{build_hamiltonian, JunctionParams};

    fn junction(n: u32, j: f64, ec: f64, delta: f64) -> JunctionParams<f64> {
        JunctionParams::new(n, j, ec, delta).unwrap()
    }

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        kahan::sum(a.iter().zip(b).map(|(x, y)| x * y))
    }

    fn check_contract(h: &TridiagonalHamiltonian<f64>, s: &SpectralDecomposition<f64>) {
        let n = s.dim();
        let scale = h.norm_inf().max(1.0);
        for w in s.eigenvalues().windows(2) {
            assert!(w[0] <= w[1], "eigenvalues not ascending");
        }
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                let g = dot(s.eigenvector(i).amplitudes(), s.eigenvector(j).amplitudes());
                assert!(
                    (g - expected).abs() <= 1e-10,
                    "orthonormality violated at ({i},{j}): {g}"
                );
            }
        }
        for i in 0..n {
            let v = s.eigenvector(i).amplitudes();
            let hv = h.matvec(v);
            let lam = s.eigenvalues()[i];
            let res = hv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - lam * b) * (a - lam * b))
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-10 * scale, "residual {res} too large at {i}");
        }
    }

    #[test]
    fn symmetric_two_by_two() {
        let h = TridiagonalHamiltonian::<f64>::from_bands(vec![3.0, 3.0], vec![-2.0]).unwrap();
        let s = diagonalize(&h).unwrap();
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 5.0).abs() < 1e-14);
        let inv_sqrt2 = 0.5_f64.sqrt();
        for (a, b) in s.eigenvector(0).amplitudes().iter().zip([inv_sqrt2; 2]) {
            assert!((a - b).abs() < 1e-14);
        }
        check_contract(&h, &s);
    }

    #[test]
    fn single_particle_junction() {
        // diag both E_C/8 = 0.1, offdiag -1
        let h = build_hamiltonian(&junction(1, 1.0, 0.8, 0.0));
        let s = diagonalize(&h).unwrap();
        assert!((s.eigenvalues()[0] + 0.9).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.1).abs() < 1e-14);
    }

    #[test]
    fn noninteracting_pair_spectrum() {
        let h = build_hamiltonian(&junction(2, 1.0, 0.0, 0.0));
        let s = diagonalize(&h).unwrap();
        let expect = [-2.0, 0.0, 2.0];
        for (a, b) in s.eigenvalues().iter().zip(expect) {
            assert!((a - b).abs() < 1e-13);
        }
        let ground = s.eigenvector(0).amplitudes();
        let expect_v = [0.5, 0.5_f64.sqrt(), 0.5];
        for (a, b) in ground.iter().zip(expect_v) {
            assert!((a - b).abs() < 1e-13);
        }
        check_contract(&h, &s);
    }

    #[test]
    fn ground_state_noninteracting_single() {
        let h = build_hamiltonian(&junction(1, 1.0, 0.0, 0.0));
        let (e, v) = ground_state(&h).unwrap();
        assert!((e + 1.0).abs() < 1e-14);
        let inv_sqrt2 = 0.5_f64.sqrt();
        assert!((v.amplitudes()[0] - inv_sqrt2).abs() < 1e-14);
        assert!((v.amplitudes()[1] - inv_sqrt2).abs() < 1e-14);
    }

    #[test]
    fn charging_dominates_toward_fock() {
        let h = build_hamiltonian(&junction(2, 1e-8, 8.0, 0.0));
        let (_, v) = ground_state(&h).unwrap();
        assert!(v.amplitudes()[1] > 1.0 - 1e-8);
        assert!(v.amplitudes()[0].abs() < 1e-8);
        assert!(v.amplitudes()[2].abs() < 1e-8);
    }

    #[test]
    fn oracle_identity() {
        let m =
            DenseSymmetric::<f64>::new(3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
                .unwrap();
        let s = dense_oracle_diagonalize(&m).unwrap();
        for &ev in s.eigenvalues() {
            assert!((ev - 1.0).abs() < 1e-14);
        }
        for i in 0..3 {
            let v = s.eigenvector(i).amplitudes();
            let mx: f64 = v.iter().fold(0.0, |a, b| a.max(b.abs()));
            assert!((mx - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_antidiagonal_pair() {
        let m = DenseSymmetric::<f64>::new(2, vec![0.0, -1.0, -1.0, 0.0]).unwrap();
        let s = dense_oracle_diagonalize(&m).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn oracle_rejects_large_input() {
        let n = ORACLE_MAX_DIM + 1;
        let m = DenseSymmetric::<f64>::new(n, vec![0.0; n * n]).unwrap();
        assert!(matches!(
            dense_oracle_diagonalize(&m),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn ql_matches_oracle_on_random_junctions() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1234);
        for _ in 0..25 {
            let n = rng.random_range(1..=50);
            let j = rng.random_range(0.0..4.0);
            let ec = rng.random_range(0.0..10.0);
            let delta = rng.random_range(-8.0..8.0);
            let h = build_hamiltonian(&junction(n, j, ec, delta));
            let s_ql = diagonalize(&h).unwrap();
            let s_or = dense_oracle_diagonalize(&DenseSymmetric::from_tridiagonal(&h)).unwrap();
            let scale = h.norm_inf().max(1.0);
            for (a, b) in s_ql.eigenvalues().iter().zip(s_or.eigenvalues()) {
                assert!((a - b).abs() <= 1e-10 * scale, "N={n}: {a} vs {b}");
            }
            for i in 0..s_ql.dim() {
                let va = s_ql.eigenvector(i).amplitudes();
                let vb = s_or.eigenvector(i).amplitudes();
                let sign = if dot(va, vb) >= 0.0 { 1.0 } else { -1.0 };
                for (x, y) in va.iter().zip(vb) {
                    assert!((x - sign * y).abs() <= 1e-8, "N={n} vec {i}");
                }
            }
            check_contract(&h, &s_ql);
        }
    }

    #[test]
    fn trace_is_preserved() {
        let h = build_hamiltonian(&junction(40, 1.3, 0.9, -2.1));
        let s = diagonalize(&h).unwrap();
        let tr_bands = kahan::sum(h.diag().iter().copied());
        let tr_spec = kahan::sum(s.eigenvalues().iter().copied());
        let tol = 1e-10 * h.norm_inf().max(1.0) * h.dim() as f64;
        assert!((tr_bands - tr_spec).abs() <= tol);
    }

    #[test]
    fn spectrum_invariant_under_delta_sign() {
        let base = junction(12, 0.9, 1.7, 0.0);
        let plus = diagonalize(&build_hamiltonian(&base.with_delta(2.3).unwrap())).unwrap();
        let minus = diagonalize(&build_hamiltonian(&base.with_delta(-2.3).unwrap())).unwrap();
        for (a, b) in plus.eigenvalues().iter().zip(minus.eigenvalues()) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn interlacing_with_truncated_matrix() {
        let h = build_hamiltonian(&junction(10, 1.1, 0.6, 0.4));
        let full = dense_oracle_diagonalize(&DenseSymmetric::from_tridiagonal(&h)).unwrap();
        let trunc = TridiagonalHamiltonian::from_bands(
            h.diag()[..h.dim() - 1].to_vec(),
            h.offdiag()[..h.dim() - 2].to_vec(),
        )
        .unwrap();
        let small = dense_oracle_diagonalize(&DenseSymmetric::from_tridiagonal(&trunc)).unwrap();
        let big = full.eigenvalues();
        let mid = small.eigenvalues();
        for i in 0..mid.len() {
            assert!(
                big[i] <= mid[i] + 1e-10 && mid[i] <= big[i + 1] + 1e-10,
                "interlacing violated at {i}"
            );
        }
    }

    #[test]
    fn eigenvector_parity_alternates_for_symmetric_even_n() {
        let h = build_hamiltonian(&junction(8, 1.0, 0.7, 0.0));
        let s = diagonalize(&h).unwrap();
        let d = s.dim();
        for (i, v) in s.eigenvectors().iter().enumerate() {
            let a = v.amplitudes();
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            for k in 0..d {
                assert!(
                    (a[k] - sign * a[d - 1 - k]).abs() < 1e-10,
                    "state {i} lacks parity {sign} at k={k}"
                );
            }
        }
    }

    #[test]
    fn deterministic_bitwise_output() {
        let h = build_hamiltonian(&junction(30, 0.8, 2.4, -1.2));
        let a = diagonalize(&h).unwrap();
        let b = diagonalize(&h).unwrap();
        assert_eq!(a.eigenvalues(), b.eigenvalues());
        for i in 0..a.dim() {
            assert_eq!(
                a.eigenvector(i).amplitudes(),
                b.eigenvector(i).amplitudes()
            );
        }
    }

    #[test]
    fn dim_one_matrix() {
        let h = TridiagonalHamiltonian::<f64>::from_bands(vec![4.2], vec![]).unwrap();
        let s = diagonalize(&h).unwrap();
        assert_eq!(s.eigenvalues(), &[4.2]);
        assert_eq!(s.eigenvector(0).amplitudes(), &[1.0]);
    }
}
