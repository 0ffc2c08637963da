//! Braid words: signed sequences of Artin generators, the universal input
//! format. Letter `+i` is `σ_i`, letter `-i` is `σ_i⁻¹`.

use std::fmt;

use crate::error::BraidError;
use crate::perm::PermutationBraid;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: u32,
    letters: Vec<i32>,
}

impl BraidWord {
    /// The empty word, representing the identity of `B_N`.
    pub fn identity(strands: u32) -> Self {
        BraidWord {
            strands,
            letters: Vec::new(),
        }
    }

    pub fn new(strands: u32, letters: Vec<i32>) -> Result<Self, BraidError> {
        if strands < 2 {
            return Err(BraidError::InvalidStrandCount { strands });
        }
        for &e in &letters {
            if e == 0 || e.unsigned_abs() >= strands {
                return Err(BraidError::LetterOutOfRange {
                    letter: e as i64,
                    strands,
                });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Parses a whitespace-separated list of signed letter indices,
    /// e.g. `"1 -2 1"`. The empty string is the identity word.
    pub fn parse(text: &str, strands: u32) -> Result<Self, BraidError> {
        if strands < 2 {
            return Err(BraidError::InvalidStrandCount { strands });
        }
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let e: i64 = token.parse().map_err(|_| BraidError::MalformedToken {
                token: token.to_string(),
            })?;
            if e == 0 || e.unsigned_abs() >= strands as u64 {
                return Err(BraidError::LetterOutOfRange { letter: e, strands });
            }
            letters.push(e as i32);
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn strands(&self) -> u32 {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The reversed, sign-flipped word, representing the group inverse.
    pub fn inverse(&self) -> Self {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|&e| -e).collect(),
        }
    }

    pub fn concat(&self, other: &BraidWord) -> Result<Self, BraidError> {
        if self.strands != other.strands {
            return Err(BraidError::StrandMismatch {
                left: self.strands,
                right: other.strands,
            });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord {
            strands: self.strands,
            letters,
        })
    }

    /// The permutation induced on strand positions, computed directly by
    /// composing the letters' transpositions in reading order. Serves as an
    /// oracle independent of the normal-form machinery.
    pub fn permutation(&self) -> PermutationBraid {
        let mut table: Vec<u32> = (0..self.strands).collect();
        let mut pos: Vec<u32> = (0..self.strands).collect();
        for &e in &self.letters {
            // The crossing at the bottom of the diagram swaps the strands
            // currently ending at positions i, i+1, i.e. the table values.
            let i = e.unsigned_abs() as usize - 1;
            let a = pos[i] as usize;
            let b = pos[i + 1] as usize;
            table.swap(a, b);
            pos.swap(i, i + 1);
        }
        let one_line: Vec<u32> = table.iter().map(|&v| v + 1).collect();
        PermutationBraid::from_one_line(&one_line).expect("valid by construction")
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}", e)?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_signed_letters() {
        let w = BraidWord::parse("1 -2 1", 3).unwrap();
        assert_eq!(w.letters(), &[1, -2, 1]);
    }

    #[test]
    fn empty_text_is_identity() {
        let w = BraidWord::parse("", 8).unwrap();
        assert!(w.is_empty());
        assert_eq!(w, BraidWord::identity(8));
    }

    #[test]
    fn rejects_out_of_range_letters() {
        assert_eq!(
            BraidWord::parse("7", 4),
            Err(BraidError::LetterOutOfRange {
                letter: 7,
                strands: 4
            })
        );
        assert!(BraidWord::parse("0", 4).is_err());
        assert!(BraidWord::parse("1 x", 4).is_err());
        assert!(BraidWord::new(4, vec![-4]).is_err());
    }

    #[test]
    fn inverse_reverses_and_flips() {
        let w = BraidWord::parse("1 -2 3", 5).unwrap();
        assert_eq!(w.inverse().letters(), &[-3, 2, -1]);
    }

    #[test]
    fn permutation_composes_transpositions() {
        let w = BraidWord::parse("1 2", 3).unwrap();
        assert_eq!(w.permutation().one_line(), vec![3, 1, 2]);
        let cancel = BraidWord::parse("2 -2", 4).unwrap();
        assert!(cancel.permutation().is_identity());
    }

    #[test]
    fn display_round_trips() {
        let w = BraidWord::parse("1 -2 1", 3).unwrap();
        assert_eq!(BraidWord::parse(&w.to_string(), 3).unwrap(), w);
    }
}
