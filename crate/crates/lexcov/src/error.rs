use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid machine `{name}`: {first} ({count} violation(s))")]
    Invalid {
        name: String,
        first: String,
        count: usize,
    },

    #[error("state cap {cap} exceeded while building {construction} (theoretical bound: {bound})")]
    StateCap {
        cap: usize,
        construction: &'static str,
        bound: String,
    },

    #[error("computation cap {cap} exceeded during enumeration")]
    ComputationCap { cap: usize },

    #[error("computation is not well-chained at step {step}")]
    BrokenComputation { step: usize },

    #[error(
        "incomparable outputs: the lead-or-delay of the full sequences is zero, lag is undefined"
    )]
    IncomparableOutputs,

    #[error("immersion is unverifiable: the morphism carries no recorded completion")]
    Unverifiable,

    #[error("machine is not {k}-valued at desk scale: input `{witness}` has {found} images")]
    NotKValued { k: u64, witness: String, found: u64 },

    #[error("input automaton is not {k}-ambiguous at desk scale (witness `{witness}` has {found} computations); a larger lag bound is needed")]
    NotKAmbiguous { k: u64, witness: String, found: u64 },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the error maps to: caps are 3, verification-style
    /// failures are 2, everything else (usage, parse, io) is 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::StateCap { .. } | Error::ComputationCap { .. } => 3,
            Error::NotKValued { .. } | Error::NotKAmbiguous { .. } | Error::Unverifiable => 2,
            _ => 1,
        }
    }
}
