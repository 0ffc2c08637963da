//! Error types for braid parsing and arithmetic.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BraidError {
    /// A token in a braid word string was not a signed integer.
    MalformedToken { token: String },
    /// A letter index was zero or at least the strand count.
    LetterOutOfRange { letter: i64, strands: u32 },
    /// Strand counts of two operands disagree.
    StrandMismatch { left: u32, right: u32 },
    /// Strand count below 2.
    InvalidStrandCount { strands: u32 },
    /// A one-line table was not a permutation of 1..=N.
    InvalidPermutation { one_line: Vec<u32> },
    /// A normal-form string did not match `D^-r | f1 ; f2 ; ...`.
    MalformedNormalForm { text: String },
}

impl fmt::Display for BraidError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BraidError::MalformedToken { token } => {
                write!(f, "malformed braid letter token {:?}", token)
            }
            BraidError::LetterOutOfRange { letter, strands } => write!(
                f,
                "letter {} out of range for B_{} (need 1 <= |e| <= {})",
                letter,
                strands,
                strands - 1
            ),
            BraidError::StrandMismatch { left, right } => {
                write!(f, "strand count mismatch: {} vs {}", left, right)
            }
            BraidError::InvalidStrandCount { strands } => {
                write!(f, "invalid strand count {} (need N >= 2)", strands)
            }
            BraidError::InvalidPermutation { one_line } => {
                write!(f, "not a permutation of 1..={}: {:?}", one_line.len(), one_line)
            }
            BraidError::MalformedNormalForm { text } => {
                write!(f, "malformed normal form text {:?}", text)
            }
        }
    }
}

impl std::error::Error for BraidError {}
