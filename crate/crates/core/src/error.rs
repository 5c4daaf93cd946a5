use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("lbit/vbit undefined for equal arguments ({0})")]
    EqualArguments(u64),
    #[error("empty input")]
    Empty,
    #[error("letter {0} outside the letter namespace")]
    LetterOutOfRange(u64),
    #[error("range [{lo}, {hi}) invalid for length {len}")]
    BadRange { lo: usize, hi: usize, len: usize },
    #[error("block does not cover the requested interval")]
    NotCovering,
    #[error("trie queried before finalization")]
    NotFinalized,
    #[error("stream already finished")]
    Finished,
    #[error("corrupt index: {0}")]
    Corrupt(String),
    #[error("i/o: {0}")]
    Io(String),
}
