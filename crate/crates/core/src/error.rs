//! Error types, one enum per subsystem.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CharFieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the machine-word bound 2^31")]
    ModulusTooLarge(u64),
    #[error("n = 0 has no squarefree part")]
    ZeroNotAllowed,
    #[error("d = {0} is not squarefree")]
    NotSquarefree(i64),
    #[error("d = {0} does not define a quadratic extension")]
    TrivialTwist(i64),
    #[error("operation requires an odd prime")]
    OddPrimeRequired,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QSeriesError {
    #[error("eta exponent sum {0} is not divisible by 24")]
    NotDivisibleBy24(i64),
    #[error("leading power q^{lead} exceeds precision {precision}")]
    LeadingPowerBeyondPrecision { lead: i64, precision: usize },
    #[error("coefficient index {index} out of precision range 1..={precision}")]
    OutOfPrecision { index: usize, precision: usize },
    #[error("requested precision {requested} exceeds available precision {available}")]
    PrecisionExceeded { requested: usize, available: usize },
    #[error("precision must be at least 1")]
    EmptyPrecision,
    #[error("eta factor q^{0} must have a positive multiplier")]
    BadEtaFactor(i64),
    #[error("gcd({n}, {d}) > 1: the twisted level has no simple answer")]
    NoSimpleAnswer { n: u64, d: i64 },
    #[error("no candidate newforms supplied")]
    NoCandidates,
    #[error("newform {0} carries no coefficient data")]
    NoCoefficientData(String),
    #[error("coefficient file: {0}")]
    CoefficientFile(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VarietyError {
    #[error("unknown catalog id `{0}`")]
    UnknownId(String),
    #[error("term {term} is not homogeneous of multi-degree {expected:?} (factor {factor})")]
    NotHomogeneous {
        term: String,
        expected: Vec<u32>,
        factor: usize,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("coordinate vector has length {got}, ambient needs {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("map does not square to the identity")]
    NotAnInvolution,
    #[error("equation {index} maps to a polynomial that is not +- any system equation")]
    ImageNotInSystem { index: usize },
    #[error("d = {0} is not a valid twist parameter")]
    BadTwistParameter(i64),
    #[error("variety `{id}` has no {what}")]
    MissingAttachment { id: String, what: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("enumeration of {points} points exceeds the budget of 2^{budget_log2}")]
    BudgetExceeded { points: u128, budget_log2: u32 },
    #[error("double-cover counting needs an even-degree branch polynomial (got degree {0})")]
    OddBranchDegree(u32),
    #[error("character-sum counting requires an odd prime")]
    OddPrimeRequired,
    #[error("p = {p} divides the twist parameter d = {d}")]
    PDividesTwist { p: u64, d: i64 },
    #[error("curve has bad reduction at p = {0}")]
    BadReduction(u64),
    #[error("variety `{0}` is not of the shape this counter handles")]
    WrongShape(String),
    #[error("thread count must be at least 1")]
    NoWorkers,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormsError {
    #[error("chart index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("I must contain exactly {expected} indices, got {got}")]
    WrongMinorSize { expected: usize, got: usize },
    #[error("i0 = {0} must not belong to I")]
    OverlappingIndices(usize),
    #[error("Jacobian minor is identically zero on this chart")]
    ZeroMinor,
    #[error("involution does not stabilize the numerator wedge indices")]
    WedgeNotStable,
    #[error("D_I is not semi-invariant under the involution; retry with another (i0, I)")]
    ChartNotSemiInvariant,
    #[error("local sign entries must be +1 or -1")]
    BadLocalSign,
    #[error("involution rejected: {0}")]
    Involution(#[from] VarietyError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("p = {0} is a bad prime for this family")]
    BadPrime(u64),
    #[error(transparent)]
    CharField(#[from] CharFieldError),
    #[error(transparent)]
    QSeries(#[from] QSeriesError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("report i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("report serialization: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
}
