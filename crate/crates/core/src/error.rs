use thiserror::Error;

/// Failure while evaluating an objective or constraint function.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("evaluation timed out after {0:?}")]
    Timeout(std::time::Duration),
    #[error("unparseable reply from black-box program: {reply:?}")]
    Protocol { reply: String },
    #[error("black-box program exited: {0}")]
    ProcessExit(String),
    #[error("i/o error talking to black-box program: {0}")]
    Io(String),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    /// The input vectors are (numerically) linearly dependent.
    #[error("degenerate vector set: column {column} has norm {norm:e} after orthogonalization")]
    DegenerateSet { column: usize, norm: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("step reduction schedule exhausted at trial {0} (limit 50)")]
    Exhausted(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("objective evaluation failed: {0}")]
    Objective(EvalError),
    #[error("constraint evaluation failed: {0}")]
    Constraint(EvalError),
    #[error("evaluation budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error("initial point is infeasible")]
    NoFeasibleStart,
    #[error("no feasible point found after {0} random draws")]
    NoFeasiblePoint(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T, E = SolveError> = std::result::Result<T, E>;
