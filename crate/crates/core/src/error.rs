use thiserror::Error;

/// Errors raised while building meshes, discretizations, and solutions.
#[derive(Debug, Error)]
pub enum VemError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polygon has non-positive signed area {area:e} (expected counter-clockwise vertices)")]
    Orientation { area: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("mesh is not conforming: {0}")]
    NonConforming(String),

    #[error("cell {cell}: fan sub-triangle {triangle} has non-positive area; the cell is not star-shaped with respect to its centroid (run mesh validation)")]
    NotStarShaped { cell: usize, triangle: usize },

    #[error("cell {cell}: numerical degeneracy in {what}")]
    Degenerate { cell: usize, what: String },

    #[error("cell {cell}: stabilization-free stiffness has rank {rank}, expected {expected} (well-posedness is only proven for k=1)")]
    StabilizationFree { cell: usize, rank: usize, expected: usize },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl VemError {
    /// Attach a cell id to errors raised by element-local routines that do not know it.
    pub fn at_cell(self, cell: usize) -> Self {
        match self {
            VemError::Degenerate { what, .. } => VemError::Degenerate { cell, what },
            VemError::NotStarShaped { triangle, .. } => VemError::NotStarShaped { cell, triangle },
            VemError::StabilizationFree { rank, expected, .. } => {
                VemError::StabilizationFree { cell, rank, expected }
            }
            VemError::Orientation { area } => {
                VemError::InvalidInput(format!("cell {cell}: non-positive signed area {area:e}"))
            }
            other => other,
        }
    }

    /// True for failures of the linear solve or of stabilization-free coercivity.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, VemError::Solver(_) | VemError::StabilizationFree { .. } | VemError::Degenerate { .. })
    }
}

pub type Result<T, E = VemError> = std::result::Result<T, E>;
