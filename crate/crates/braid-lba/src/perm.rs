//! Permutation braids: the positive braids in which each pair of strands
//! crosses at most once. They are in bijection with permutations of
//! `{1,...,N}`, and their Artin letter length equals the inversion count of
//! the permutation. All normal-form arithmetic reduces to table operations
//! on these.

use std::fmt;

use crate::error::BraidError;

/// A permutation braid on `N` strands, stored as the permutation it induces.
///
/// Internally the table is 0-based: the strand entering at top position `i`
/// leaves at bottom position `table[i]`. Letters act left to right, so the
/// permutation of a product `u·v` is `perm(v) ∘ perm(u)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PermutationBraid {
    table: Vec<u32>,
    inverse: Vec<u32>,
    inversions: u64,
}

impl PermutationBraid {
    /// The trivial braid on `strands` strands.
    pub fn identity(strands: u32) -> Self {
        let table: Vec<u32> = (0..strands).collect();
        let inverse = table.clone();
        PermutationBraid {
            table,
            inverse,
            inversions: 0,
        }
    }

    /// The half twist `Δ_N`, i.e. the full reversal permutation.
    pub fn delta(strands: u32) -> Self {
        let table: Vec<u32> = (0..strands).rev().collect();
        let inverse = table.clone();
        let n = strands as u64;
        PermutationBraid {
            table,
            inverse,
            inversions: n * (n - 1) / 2,
        }
    }

    /// The single Artin generator `σ_i` (`i` is 1-based, `1 ≤ i ≤ N−1`).
    pub fn artin(strands: u32, i: u32) -> Self {
        debug_assert!(i >= 1 && i < strands);
        let mut p = Self::identity(strands);
        p.table.swap(i as usize - 1, i as usize);
        p.inverse.swap(i as usize - 1, i as usize);
        p.inversions = 1;
        p
    }

    /// Builds a permutation braid from 1-based one-line notation.
    pub fn from_one_line(values: &[u32]) -> Result<Self, BraidError> {
        let n = values.len() as u32;
        if n < 2 {
            return Err(BraidError::InvalidStrandCount { strands: n });
        }
        let mut table = Vec::with_capacity(values.len());
        let mut seen = vec![false; values.len()];
        for &v in values {
            if v < 1 || v > n || seen[v as usize - 1] {
                return Err(BraidError::InvalidPermutation {
                    one_line: values.to_vec(),
                });
            }
            seen[v as usize - 1] = true;
            table.push(v - 1);
        }
        let mut inverse = vec![0u32; table.len()];
        for (i, &v) in table.iter().enumerate() {
            inverse[v as usize] = i as u32;
        }
        let inversions = count_inversions(&table);
        Ok(PermutationBraid {
            table,
            inverse,
            inversions,
        })
    }

    pub fn strands(&self) -> u32 {
        self.table.len() as u32
    }

    /// Artin letter length of the braid: the number of pairs `i < j` with
    /// `perm(i) > perm(j)`.
    pub fn inversions(&self) -> u64 {
        self.inversions
    }

    pub fn is_identity(&self) -> bool {
        self.inversions == 0
    }

    pub fn is_delta(&self) -> bool {
        let n = self.table.len() as u64;
        self.inversions == n * (n - 1) / 2
    }

    /// 1-based one-line notation, e.g. `[3, 1, 2]`.
    pub fn one_line(&self) -> Vec<u32> {
        self.table.iter().map(|&v| v + 1).collect()
    }

    /// Bitmask of the starting set: bit `i−1` is set iff the braid has a
    /// positive word beginning with `σ_i`. These are the descents of the
    /// one-line notation.
    pub fn starting_set(&self) -> u128 {
        let mut mask = 0u128;
        for i in 0..self.table.len() - 1 {
            if self.table[i] > self.table[i + 1] {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Bitmask of the finishing set: bit `i−1` is set iff some positive word
    /// for the braid ends with `σ_i`. These are the descents of the inverse
    /// permutation.
    pub fn finishing_set(&self) -> u128 {
        let mut mask = 0u128;
        for i in 0..self.inverse.len() - 1 {
            if self.inverse[i] > self.inverse[i + 1] {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Replaces `self` by `self·σ_i`. Caller must ensure `i` is not in the
    /// finishing set, so the result is still a permutation braid.
    pub(crate) fn absorb_right(&mut self, i: u32) {
        let a = self.inverse[i as usize - 1] as usize;
        let b = self.inverse[i as usize] as usize;
        debug_assert!(a < b, "absorb_right requires i outside the finishing set");
        self.table.swap(a, b);
        self.inverse.swap(i as usize - 1, i as usize);
        self.inversions += 1;
    }

    /// Replaces `self` by `σ_i⁻¹·self`. Caller must ensure `i` is in the
    /// starting set.
    pub(crate) fn strip_left(&mut self, i: u32) {
        let a = i as usize - 1;
        let u = self.table[a] as usize;
        let v = self.table[a + 1] as usize;
        debug_assert!(u > v, "strip_left requires i in the starting set");
        self.table.swap(a, a + 1);
        self.inverse.swap(u, v);
        self.inversions -= 1;
    }

    /// Recomputes the starting-set bits that a `strip_left(i)` can change:
    /// only the descents at positions `i−2..=i` are affected.
    pub(crate) fn refresh_starting_bits(&self, mask: &mut u128, i: u32) {
        let n = self.table.len();
        let lo = (i as usize).saturating_sub(2);
        let hi = (i as usize).min(n - 2);
        for j in lo..=hi {
            if self.table[j] > self.table[j + 1] {
                *mask |= 1 << j;
            } else {
                *mask &= !(1 << j);
            }
        }
    }

    /// Recomputes the finishing-set bits that an `absorb_right(i)` can
    /// change: the inverse table only moved at entries `i−1, i`.
    pub(crate) fn refresh_finishing_bits(&self, mask: &mut u128, i: u32) {
        let n = self.inverse.len();
        let lo = (i as usize).saturating_sub(2);
        let hi = (i as usize).min(n - 2);
        for j in lo..=hi {
            if self.inverse[j] > self.inverse[j + 1] {
                *mask |= 1 << j;
            } else {
                *mask &= !(1 << j);
            }
        }
    }

    /// The flip automorphism `τ(p) = Δ⁻¹ p Δ`, which maps `σ_i` to `σ_{N−i}`.
    pub fn tau(&self) -> Self {
        let n = self.table.len();
        let mut table = vec![0u32; n];
        for j in 0..n {
            table[j] = (n - 1) as u32 - self.table[n - 1 - j];
        }
        let mut inverse = vec![0u32; n];
        for (i, &v) in table.iter().enumerate() {
            inverse[v as usize] = i as u32;
        }
        PermutationBraid {
            table,
            inverse,
            inversions: self.inversions,
        }
    }

    /// The right complement `∂p = p⁻¹Δ`, the unique permutation braid with
    /// `p·∂p = Δ`.
    pub fn right_complement(&self) -> Self {
        let n = self.table.len();
        let mut table = vec![0u32; n];
        for j in 0..n {
            table[j] = (n - 1) as u32 - self.inverse[j];
        }
        let mut inverse = vec![0u32; n];
        for (i, &v) in table.iter().enumerate() {
            inverse[v as usize] = i as u32;
        }
        let full = (n as u64) * (n as u64 - 1) / 2;
        PermutationBraid {
            table,
            inverse,
            inversions: full - self.inversions,
        }
    }

    /// Permutation of the product `self·next` (letters act left to right).
    pub fn then(&self, next: &Self) -> Self {
        debug_assert_eq!(self.strands(), next.strands());
        let table: Vec<u32> = self
            .table
            .iter()
            .map(|&v| next.table[v as usize])
            .collect();
        let mut inverse = vec![0u32; table.len()];
        for (i, &v) in table.iter().enumerate() {
            inverse[v as usize] = i as u32;
        }
        let inversions = count_inversions(&table);
        PermutationBraid {
            table,
            inverse,
            inversions,
        }
    }

    /// Expands the braid into a reduced positive Artin word (1-based letters),
    /// peeling the smallest starting letter first.
    pub fn artin_letters(&self) -> Vec<u32> {
        let mut work = self.clone();
        let mut letters = Vec::with_capacity(self.inversions as usize);
        while !work.is_identity() {
            let start = work.starting_set();
            debug_assert_ne!(start, 0);
            let i = start.trailing_zeros() + 1;
            letters.push(i);
            work.strip_left(i);
        }
        letters
    }
}

fn count_inversions(table: &[u32]) -> u64 {
    let mut count = 0u64;
    for i in 0..table.len() {
        for j in i + 1..table.len() {
            if table[i] > table[j] {
                count += 1;
            }
        }
    }
    count
}

impl fmt::Debug for PermutationBraid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermutationBraid{:?}", self.one_line())
    }
}

impl fmt::Display for PermutationBraid {
    /// One-line notation with 1-based values: `3 1 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in self.one_line() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}", v)?;
            first = false;
        }
        Ok(())
    }
}
