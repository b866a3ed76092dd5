use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),
    #[error("substitution leaves the representable class: {0}")]
    SubstitutionOutsideClass(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("chart mismatch: {0} vs {1}")]
    ChartMismatch(String, String),
    #[error("form degree {0} exceeds chart dimension {1}")]
    DegreeOverflow(usize, usize),
    #[error("forms are dependent: rank {rank} < {count}")]
    DependentForms { rank: usize, count: usize },
    #[error("symbolic rank {symbolic} disagrees with numeric ranks {numeric:?}")]
    InconsistentRank { symbolic: usize, numeric: Vec<usize> },
    #[error("not equivalent: residual {0}")]
    NotEquivalent(String),
    #[error("structure equations have no solution; {0} residual components")]
    NoSolution(usize),
    #[error("metric is singular at the sample point")]
    SingularMetric,
    #[error("curvature paths disagree: relative gap {0:e}")]
    OracleDisagreement(f64),
    #[error("guard violated: {0}")]
    GuardViolation(String),
    #[error("no multiple of dx matches: {0}")]
    NotSolvable(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}
