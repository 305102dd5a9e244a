use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{coordinate} = {value} out of range (must be < {bound})")]
    OutOfRange {
        coordinate: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("truncation insufficient: deficit {deficit:e} exceeds tolerance {tolerance:e}")]
    TruncationInsufficient { deficit: f64, tolerance: f64 },

    #[error("block assignment ambiguous for state {state}")]
    BlockAmbiguity { state: String },

    #[error("block B({m},{n}) does not fit phonon/photon cutoffs {cutoff_m}x{cutoff_n}")]
    BlockDoesNotFit {
        m: usize,
        n: usize,
        cutoff_m: usize,
        cutoff_n: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("eigensystem not available")]
    MissingEigensystem,

    #[error("effective dimension {d} is smaller than the support rank {rank}")]
    DimensionMismatch { d: usize, rank: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("at grid point theta={theta_deg} deg, T={t_deg} deg: {source}")]
    GridPoint {
        theta_deg: f64,
        t_deg: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attaches the failing (θ, T) grid point to an error.
    pub fn at_point(self, theta_deg: f64, t_deg: f64) -> Self {
        Error::GridPoint {
            theta_deg,
            t_deg,
            source: Box::new(self),
        }
    }
}
