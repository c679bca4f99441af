use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid degrees N={n}, M={m}: need N <= M <= 3N+2")]
    InvalidDegrees { n: usize, m: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("cell index {index} out of range for a grid of {n_cells} cells")]
    CellOutOfRange { index: usize, n_cells: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("reconstruction system is singular (relative pivot {ratio:.3e})")]
    SingularSystem { ratio: f64 },

    #[error("state {value} outside the admissible range of the {model} model")]
    InadmissibleState { model: &'static str, value: f64 },

    #[error("{flux} flux is not available for the {model} model")]
    UnsupportedFlux {
        flux: &'static str,
        model: &'static str,
    },

    #[error("non-finite coefficient in cell {cell}")]
    NonFinite { cell: usize },

    #[error("solution blew up at t={t:.6}: sup norm {norm:.3e} exceeds {limit:.3e}")]
    BlowUp { t: f64, norm: f64, limit: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("a convergence study needs at least two grids, got {0}")]
    TooFewGrids(usize),
}
