use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("first integral is singular at phi = 0 (A = {a}, B = {b})")]
    DivisionByZero { a: f64, b: f64 },

    #[error("no positive solution: F(phi) < 0 for every phi > 0")]
    NoPositiveSolution,

    #[error("quadrature inversion failed: {0}")]
    Inversion(String),

    #[error("supports of components {first} and {second} overlap")]
    Overlap { first: usize, second: usize },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("infeasible target: {0}")]
    Infeasible(String),

    #[error("orthogonality violated: {0}")]
    Orthogonality(String),

    #[error("boundary condition violated: {0}")]
    BoundaryCondition(String),

    #[error("truncation too small: |V(T)| = {0:e}")]
    Truncation(f64),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("non-finite right-hand side at t = {t}")]
    NonFinite { t: f64 },

    #[error("linear solver failure: {0}")]
    Linear(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
