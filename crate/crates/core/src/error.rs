use thiserror::Error;

/// Errors reported by the junction model, solvers, and sweep engine.
///
/// Scalar payloads are carried as `f64` regardless of the working
/// precision so the variants stay object-simple.
#[derive(Debug, Error)]
pub enum Error {
    #[error("junction needs at least one particle")]
    EmptyJunction,

    #[error("charging energy must be nonnegative, got {0}")]
    NegativeChargingEnergy(f64),

    #[error("parameter `{0}` must be finite")]
    NonFinite(&'static str),

    #[error("quasi-angular momentum 2n={twice_n} outside the ladder of N={n_total}")]
    MomentumOutOfRange { twice_n: i64, n_total: u32 },

    #[error("resonance positions are undefined at zero charging energy")]
    ZeroChargingEnergy,

    #[error("band lengths inconsistent: {diag} diagonal vs {offdiag} off-diagonal entries")]
    BandLengthMismatch { diag: usize, offdiag: usize },

    #[error("matrix must have at least one row")]
    EmptyMatrix,

    #[error("QL iteration stalled on eigenvalue {index} after {sweeps} sweeps")]
    EigensolveStall { index: usize, sweeps: usize },

    #[error("Jacobi rotations did not converge within {sweeps} sweeps")]
    JacobiStall { sweeps: usize },

    #[error("dense oracle limited to dimension {max}, got {dim}")]
    OracleTooLarge { dim: usize, max: usize },

    #[error("state not normalized: |c|^2 = {norm_sqr}")]
    StateNotNormalized { norm_sqr: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroNorm,

    #[error("ensemble weights must sum to 1, got {sum}")]
    WeightSum { sum: f64 },

    #[error("ensemble weight {index} is negative")]
    NegativeWeight { index: usize },

    #[error("coherence normalization K_S = {ks} is not positive; state is corrupted")]
    KsNotPositive { ks: f64 },

    #[error("inverse temperature must be nonnegative, got {0}")]
    NegativeBeta(f64),

    #[error("spectrum diagnostics need at least two levels, got {dim}")]
    TooFewLevels { dim: usize },

    #[error("Gaussian ansatz requires a symmetric junction, got delta = {0}")]
    AsymmetricAnsatz(f64),

    #[error("variational energy landscape is flat; no width to select")]
    FlatVariationalLandscape,

    #[error("two lowest zero-tunneling levels (2n = {twice_a}, {twice_b}) are not adjacent")]
    NonAdjacentLevels { twice_a: i64, twice_b: i64 },

    #[error("classical estimate requires a positive finite inverse temperature, got {0}")]
    ClassicalRequiresPositiveBeta(f64),

    #[error("classical phase space needs N >= 2, got {0}")]
    ClassicalTooFewAtoms(u32),

    #[error("phase-space quadrature did not converge at {resolution} points per axis")]
    QuadratureNoConvergence { resolution: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("sweep point {index} (axis value {axis_value}) failed: {source}")]
    SweepPointFailure {
        index: usize,
        axis_value: f64,
        #[source]
        source: Box<Error>,
    },
}
