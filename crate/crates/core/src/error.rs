use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    IdenticallyZero,
    #[error("zero base raised to a negative power")]
    DivisionByZero,
    #[error("exponent {num}/{den} has an even denominator; use the non-negative base path")]
    EvenDenominator { num: i64, den: i64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state became non-finite at t = {time}")]
    NonFiniteState { time: f64 },
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("degenerate family: {0}")]
    DegenerateFamily(String),
    #[error("damping f(x) is not a monomial a*x^alpha")]
    NotMonomialDamping,
    #[error("not a Lienard system: {0}")]
    NotLienard(String),
    #[error("inconsistent Cheillini solution: {0}")]
    InconsistentSolution(String),
    #[error("singular exponent ell = {ell}: {reason}")]
    SingularEll { ell: f64, reason: &'static str },
    #[error("no velocity branch admits p = {p}")]
    EmptyDomain { p: f64 },
    #[error("unsupported family for this operation: {0}")]
    UnsupportedFamily(&'static str),
    #[error("Hamiltonian is not of the form c(p) x^2 + U(p): {0}")]
    NotDecomposable(String),
    #[error("no branch reproduces v = {v} at x = {x}")]
    BranchNotFound { x: f64, v: f64 },
    #[error("branch {branch} does not contain the initial state (x = {x}, p = {p})")]
    OutsideBranchDomain { branch: usize, x: f64, p: f64 },
    #[error("trajectory has {0} samples, at least 3 are needed")]
    TooFewSamples(usize),
    #[error("closed form disagrees with the Legendre transform: {0}")]
    ClosedFormMismatch(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
