use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("prime {0} listed more than once")]
    DuplicatePrime(u64),

    #[error("interval evaluation did not settle below the precision cap of {cap} bits")]
    PrecisionExhausted { cap: u32 },

    #[error("factorization of {0} exceeded the rho budget")]
    FactorizationBudget(String),

    #[error("generator {generator} is not a unit modulo {modulus}")]
    NotAUnit { generator: String, modulus: String },

    #[error("lattice enumeration produced more than {cap} candidates")]
    CandidateOverflow { cap: usize },

    #[error("basis is not of full rank")]
    RankDeficient,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn in_stage(self, stage: impl Into<String>) -> Error {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, unwrapping stage annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// Budget-type failures: the computation may succeed with larger limits.
    pub fn is_budget(&self) -> bool {
        matches!(
            self.root(),
            Error::PrecisionExhausted { .. }
                | Error::FactorizationBudget(_)
                | Error::CandidateOverflow { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
