use thiserror::Error;

use crate::text::ParseError;
use crate::tree::Word;

/// Errors produced by the constructions and decision procedures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("tree arity must be at least 1")]
    ZeroArity,
    #[error("block size must be at least 1 (the set of words of length < 0 is undefined)")]
    ZeroHeight,
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("duplicate alphabet symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("invalid token `{0}`: tokens must be nonempty and free of whitespace and parentheses")]
    InvalidToken(String),
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("letter index {0} is outside the alphabet")]
    LetterOutOfRange(usize),
    #[error("state index {0} is outside the state set")]
    StateOutOfRange(usize),
    #[error("expected {expected} children at a vertex, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("word {0} is outside the pattern support")]
    OutOfSupport(Word),
    #[error("pattern is not a block (its support is not a set of the form words of length < n)")]
    NotABlock,
    #[error("alphabets do not match")]
    AlphabetMismatch,
    #[error("tree arities do not match")]
    SignatureMismatch,
    #[error("automaton is not essential")]
    NotEssential,
    #[error("automaton is not co-deterministic")]
    NotCodeterministic,
    #[error("automaton is not strongly connected")]
    NotStronglyConnected,
    #[error("pattern is not accepted: {0}")]
    NotAccepted(&'static str),
    #[error("run assignment is not valid for the pattern")]
    InvalidRun,
    #[error("bundle choice must pick, for every state, a bundle starting at that state")]
    InvalidChoice,
    #[error("local rule is undefined on block {0}")]
    OutsideDomain(String),
    #[error("local rule does not cover domain block {0}")]
    MissingRule(String),
    #[error("cellular automaton image is not contained in its target shift; witness {0}")]
    ImageNotContained(String),
    #[error("brute-force enumeration would visit more than {limit} patterns")]
    ResourceLimit { limit: u128 },
    #[error("{0}")]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
