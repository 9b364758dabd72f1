use thiserror::Error;

/// Failures of coefficient-ring arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("polynomial division leaves a nonzero remainder")]
    NonDivisible,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("cannot specialize q: an odd power of v is present")]
    OddHalfPower,
    #[error("q must be specialized at a positive integer")]
    NonPositiveSpecialization,
}

/// Rejections raised while validating a root datum.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatumError {
    #[error("malformed datum: {0}")]
    Malformed(String),
    #[error("Cartan check failed: {0}")]
    NonCrystallographic(String),
    #[error("finite Weyl group exceeds {0} elements")]
    InfiniteFiniteWeyl(usize),
    #[error("parameters differ on braid-related generators s{0} and s{1}")]
    ParameterBraidMismatch(usize, usize),
    #[error("generator {0} does not fix the torsion subgroup")]
    TorsionNotFixed(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid highest root: {0}")]
    HighestRoot(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error("not antidominant: {0}")]
    NotAntidominant(String),
    #[error("diagonal coefficient is not a unit monomial at {0}")]
    NonUnitDiagonal(String),
    #[error("operation needs equal parameters on a simply-laced datum")]
    UnsupportedParameters,
    #[error("facet group W_J is infinite for J = {0}")]
    InfiniteFacetGroup(String),
    #[error("element is not bi-invariant under the facet group")]
    NotBiinvariant,
    #[error("centrality check failed: {0}")]
    CentralityFailure(String),
    #[error("element is not central: {0}")]
    NotCentral(String),
    #[error("triangular solve found no solution: {0}")]
    SolveInconsistent(String),
    #[error("positivity violated: {0}")]
    NegativeCoefficient(String),
    #[error("invalid torsion subgroup: {0}")]
    SubgroupInvalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
