//! Error taxonomy.  Each pipeline stage has its own error type; the CLI maps
//! the classes onto distinct exit codes.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("defining polynomial is not irreducible modulo p (or not monic of the right degree)")]
    ReducibleDefiningPolynomial,
    #[error("working precision must be at least 1")]
    PrecisionTooSmall,
    #[error("extension degree {0} is not supported")]
    BadExtensionDegree(usize),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("division by p is not exact at this precision")]
    InexactDivision,
    #[error("linear system is singular to working precision")]
    SingularToPrecision,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("Q is not monic in y")]
    NotMonicInY,
    #[error("the support of Q changes modulo p: coefficient of x^{xdeg} y^{ydeg} vanishes")]
    SupportChangedModP { xdeg: usize, ydeg: usize },
    #[error("leading coefficient of the discriminant radical is not a unit; lift rejected")]
    RadicalNotUnitLeading,
    #[error("the branch locus degenerates modulo p (disc(r) is not a unit)")]
    BranchLocusCollapses,
    #[error("no cofactor g with r^m = g*Delta for m <= deg Delta")]
    NoCofactor,
    #[error("a connection matrix has a pole deeper than the simple pole bound")]
    ConnectionPoleTooDeep,
    #[error("a residue-matrix eigenvalue lies outside Q intersect Z_p in [0,1)")]
    ExponentOutsideRange,
    #[error("degenerate input: d_x = 1 (zeta is (1-T)^-1 (1-qT)^-1, chi = 1)")]
    DegenerateCurve,
    #[error("r' is not invertible modulo r; inconsistent input")]
    RPrimeNotInvertible,
    #[error("hyperelliptic constructor requires odd characteristic")]
    EvenCharacteristic,
    #[error("f is not squarefree modulo p")]
    NotSquarefreeModP,
    #[error("matrix {0} is not invertible over its declared ring")]
    MatrixNotInvertible(&'static str),
    #[error("padic arithmetic failed during curve setup: {0}")]
    Padic(#[from] PadicError),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FrobeniusError {
    #[error("Newton iteration failed to converge: residual valuation did not double")]
    NonConvergence,
    #[error("series violates its proven shape bound: {0}")]
    ShapeViolation(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("reduction system is singular: exponent hypothesis violated")]
    SystemSingular,
    #[error("cohomology space has unexpected dimension: {0}")]
    RankDeficient(String),
    #[error("Frobenius matrix entry below the valuation floor -delta")]
    ValuationBreach,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ZetaError {
    #[error("matrix entries are not Q_p-rational at working precision")]
    NotRational,
    #[error("no integer in the Weil window matches the approximation for a_{0}")]
    BoundBreach(usize),
    #[error("negative point count derived from L-polynomial")]
    NegativeCount,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration budget exceeded: q^i = {0} point evaluations requested")]
    BudgetExceeded(String),
    #[error("no primitive element with squarefree characteristic polynomial; input not etale")]
    NoPrimitiveElement,
    #[error("point counts violate the Weil bound")]
    InconsistentCounts,
    #[error("prime too large for the enumeration oracle")]
    PrimeTooLarge,
}

/// Top-level error for the pipeline entry points.
#[derive(Error, Debug)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("audit failure: {0}")]
    AuditFailure(String),
    #[error("pipeline error: {0}")]
    Pipeline(String),
}

impl Error {
    /// Stable process exit code per error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::AuditFailure(_) => 3,
            Error::Pipeline(_) => 4,
        }
    }
}

macro_rules! into_pipeline {
    ($($t:ty),*) => {$(
        impl From<$t> for Error {
            fn from(e: $t) -> Self {
                Error::Pipeline(e.to_string())
            }
        }
    )*}
}

into_pipeline!(PadicError, FrobeniusError, CohomologyError, ZetaError, OracleError);

impl From<CurveError> for Error {
    fn from(e: CurveError) -> Self {
        // Lift-validity failures surface as audit failures; the rest are
        // pipeline faults.
        match &e {
            CurveError::NotMonicInY
            | CurveError::SupportChangedModP { .. }
            | CurveError::RadicalNotUnitLeading
            | CurveError::BranchLocusCollapses
            | CurveError::NoCofactor
            | CurveError::ConnectionPoleTooDeep
            | CurveError::EvenCharacteristic
            | CurveError::NotSquarefreeModP
            | CurveError::MatrixNotInvertible(_) => Error::AuditFailure(e.to_string()),
            _ => Error::Pipeline(e.to_string()),
        }
    }
}
