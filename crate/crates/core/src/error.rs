use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("matrix is singular over the rational function field")]
    SingularMatrix,
    #[error("vector fields live on different charts")]
    ChartMismatch,
    #[error("degenerate basis: the fields do not generate the tangent space at a general point (det S = 0)")]
    DegenerateBasis,
    #[error("trajectory norm exceeded {bound} at t = {t}")]
    BlowupDetected { t: f64, bound: f64 },
    #[error("point lies on (or too close to) the divisor: |det S| = {det_abs:e} below floor {floor:e}")]
    OnDivisor { det_abs: f64, floor: f64 },
    #[error("probe direction does not leave the divisor")]
    BadDirection,
    #[error("matrix is not hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("lattice does not span C^n over C (m = {m}); the cone formula is not asserted")]
    NotSemiTorus { m: usize },
    #[error("matrix violates the required block pattern: {0}")]
    PatternViolation(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Shift a parse error found inside an expression to its place in a file.
    pub fn at(self, line: usize, col_offset: usize) -> Error {
        match self {
            Error::Parse { column, message, .. } => Error::Parse {
                line,
                column: column + col_offset,
                message,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
