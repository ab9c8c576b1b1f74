use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("weight axiom violated: row sum of generator {i} differs from column sum of generator {j} at symbol {a}")]
    AxiomViolation { i: usize, j: usize, a: String },
    #[error("negative entry in generator {i} at ({a}, {b})")]
    NegativeEntry { i: usize, a: String, b: String },
    #[error("generator {i} matrix sums to {sum}, expected 1")]
    NotNormalized { i: usize, sum: String },
    #[error("weight is not denominator {n}: {detail}")]
    NotDenominatorN { n: u64, detail: String },
    #[error("marginal is not a denominator-{n} weight matching the target alphabet: {detail}")]
    MarginalNotDenominatorN { n: u64, detail: String },
    #[error("rounding repair found no positive entry ({stage})")]
    InfeasibleRepair { stage: &'static str },
    #[error("ball labeling inconsistent at point {j}, word {word}")]
    Inconsistent { j: usize, word: String },
    #[error("label frequencies do not match the weight's vertex measure")]
    FrequencyMismatch,
    #[error("fiber is empty")]
    EmptyFiber,
    #[error("rejection sampler exhausted {attempts} attempts")]
    RejectBudgetExceeded { attempts: u64 },
    #[error("budget exceeded: {what} needs {needed}, limit {limit}")]
    BudgetExceeded { what: &'static str, needed: String, limit: u64 },
    #[error("non-integer result in exact count")]
    NonIntegerResult,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Budget-type failures (as opposed to invalid input).
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::RejectBudgetExceeded { .. }
        )
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
