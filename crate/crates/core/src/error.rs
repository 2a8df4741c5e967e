use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("space has too many words to enumerate ({0})")]
    SpaceTooLarge(String),

    #[error("words belong to different spaces")]
    MismatchedSpaces,

    #[error("index {index} out of range for space of cardinality {cardinality}")]
    IndexOutOfRange { index: u64, cardinality: u64 },

    #[error("cannot parse `{input}` at position {position}: {message}")]
    Parse {
        input: String,
        position: usize,
        message: String,
    },

    #[error("line {line}: {message}")]
    CodeFile { line: usize, message: String },

    #[error("duplicate word {0}")]
    DuplicateWord(String),

    #[error("need at least two words, got {0}")]
    TooFewWords(usize),

    #[error("code is not {d}-feasible: {a} and {b} are at distance {distance}")]
    Infeasible {
        a: String,
        b: String,
        distance: usize,
        d: usize,
    },

    #[error("invalid symbol swap: {0}")]
    InvalidSwap(String),

    #[error("invalid marginal profile: {0}")]
    InvalidProfile(String),

    #[error("expected a word at distance {expected} from the zero word, {word} is at distance {found}")]
    WrongDistance {
        word: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ledger line {line}: {message}")]
    Ledger { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
