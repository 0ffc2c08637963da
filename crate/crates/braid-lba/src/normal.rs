//! Left canonical (Garside) normal forms `Δ⁻ʳ·p₁⋯p_q` with `r ≥ 0` minimal
//! and the factors left-weighted permutation braids. Positive powers of the
//! half twist appear as leading `Δ` factors, which can only happen when
//! `r = 0`.
//!
//! Negative Artin letters are rewritten as `σ_i⁻¹ = Δ⁻¹·(Δσ_i⁻¹)`, the `Δ⁻¹`
//! powers are pushed to the front with the flip automorphism `τ`, and the
//! remaining positive factors are made left-weighted by repeated local
//! sliding: while some `σ_i` starts a factor but does not finish its left
//! neighbour, move it across. Leading `Δ` factors then cancel against the
//! accumulated negative power.

use std::fmt;

use crate::error::BraidError;
use crate::perm::PermutationBraid;
use crate::word::BraidWord;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GarsideNormalForm {
    strands: u32,
    delta_exp: u32,
    factors: Vec<PermutationBraid>,
}

impl GarsideNormalForm {
    pub fn identity(strands: u32) -> Self {
        GarsideNormalForm {
            strands,
            delta_exp: 0,
            factors: Vec::new(),
        }
    }

    /// Computes the normal form of a braid word.
    pub fn from_word(word: &BraidWord) -> Self {
        let n = word.strands();
        let letters = word.letters();
        let negatives = letters.iter().filter(|&&e| e < 0).count() as u64;

        // Each negative letter contributes one Δ⁻¹ plus the complement
        // Δσ_i⁻¹; a factor picks up one τ per Δ⁻¹ that starts to its right.
        let mut remaining_negs = negatives;
        let mut factors = Vec::with_capacity(letters.len());
        for &e in letters {
            let i = e.unsigned_abs();
            let factor = if e > 0 {
                PermutationBraid::artin(n, i)
            } else {
                remaining_negs -= 1;
                delta_times_inverse_artin(n, i)
            };
            if remaining_negs % 2 == 1 {
                factors.push(factor.tau());
            } else {
                factors.push(factor);
            }
        }
        assemble(n, -(negatives as i64), factors)
    }

    pub fn strands(&self) -> u32 {
        self.strands
    }

    /// The exponent `r` in `Δ⁻ʳ·p₁⋯p_q`.
    pub fn delta_exponent(&self) -> u32 {
        self.delta_exp
    }

    pub fn factors(&self) -> &[PermutationBraid] {
        &self.factors
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn is_identity(&self) -> bool {
        self.delta_exp == 0 && self.factors.is_empty()
    }

    /// Normal form of the product `self·other`.
    pub fn multiply(&self, other: &GarsideNormalForm) -> Result<Self, BraidError> {
        if self.strands != other.strands {
            return Err(BraidError::StrandMismatch {
                left: self.strands,
                right: other.strands,
            });
        }
        Ok(self.multiply_unchecked(other))
    }

    pub(crate) fn multiply_unchecked(&self, other: &GarsideNormalForm) -> Self {
        // Δ⁻ᵃ·P · Δ⁻ᵇ·Q  =  Δ⁻⁽ᵃ⁺ᵇ⁾ · τᵇ(P) · Q
        let flip = other.delta_exp % 2 == 1;
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        for f in &self.factors {
            factors.push(if flip { f.tau() } else { f.clone() });
        }
        factors.extend(other.factors.iter().cloned());
        assemble(
            self.strands,
            -(self.delta_exp as i64) - other.delta_exp as i64,
            factors,
        )
    }

    /// Normal form of the group inverse.
    pub fn inverse(&self) -> Self {
        // (Δ⁻ʳ p₁⋯p_q)⁻¹ = Δ^(r−q) · τ^(r+q)(∂p_q) ⋯ τ^(r+1)(∂p₁)
        let r = self.delta_exp as i64;
        let q = self.factors.len() as i64;
        let mut factors = Vec::with_capacity(self.factors.len());
        for (idx, p) in self.factors.iter().enumerate().rev() {
            let j = idx as i64 + 1;
            let c = p.right_complement();
            factors.push(if (r + j) % 2 == 1 { c.tau() } else { c });
        }
        assemble(self.strands, r - q, factors)
    }

    /// The permutation induced on strand positions.
    pub fn permutation(&self) -> PermutationBraid {
        let mut acc = if self.delta_exp % 2 == 1 {
            PermutationBraid::delta(self.strands)
        } else {
            PermutationBraid::identity(self.strands)
        };
        for f in &self.factors {
            acc = acc.then(f);
        }
        acc
    }

    /// Expands the normal form back into a braid word.
    pub fn to_word(&self) -> BraidWord {
        let delta_letters = PermutationBraid::delta(self.strands).artin_letters();
        let mut letters: Vec<i32> = Vec::new();
        for _ in 0..self.delta_exp {
            for &i in delta_letters.iter().rev() {
                letters.push(-(i as i32));
            }
        }
        for f in &self.factors {
            for i in f.artin_letters() {
                letters.push(i as i32);
            }
        }
        BraidWord::new(self.strands, letters).expect("letters valid by construction")
    }

    /// Checks the structural invariants of a left canonical form; used by
    /// tests and debug assertions.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, f) in self.factors.iter().enumerate() {
            if f.is_identity() {
                return Err(format!("factor {} is trivial", i));
            }
            if f.is_delta() && (self.delta_exp > 0 || (i > 0 && !self.factors[i - 1].is_delta()))
            {
                return Err(format!(
                    "Δ factor at index {} with r = {}",
                    i, self.delta_exp
                ));
            }
        }
        for i in 0..self.factors.len().saturating_sub(1) {
            let start = self.factors[i + 1].starting_set();
            let finish = self.factors[i].finishing_set();
            if start & !finish != 0 {
                return Err(format!("pair ({}, {}) is not left-weighted", i, i + 1));
            }
        }
        Ok(())
    }

    /// Renders `D^-r | f1 ; f2 ; ...` with factors in one-line notation.
    pub fn to_text(&self) -> String {
        let mut out = format!("D^-{} |", self.delta_exp);
        for (i, f) in self.factors.iter().enumerate() {
            if i > 0 {
                out.push_str(" ;");
            }
            out.push(' ');
            out.push_str(&f.to_string());
        }
        out
    }

    /// Parses the `to_text` format. The strand count is taken from the
    /// factor tables; a factorless form needs `strands` supplied.
    pub fn parse(text: &str, strands: u32) -> Result<Self, BraidError> {
        let bad = || BraidError::MalformedNormalForm {
            text: text.to_string(),
        };
        let (head, tail) = text.split_once('|').ok_or_else(bad)?;
        let head = head.trim();
        let exp: u32 = head.strip_prefix("D^-").ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let mut factors = Vec::new();
        for part in tail.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let values: Result<Vec<u32>, _> = part.split_whitespace().map(|t| t.parse()).collect();
            let values = values.map_err(|_| bad())?;
            if values.len() != strands as usize {
                return Err(bad());
            }
            factors.push(PermutationBraid::from_one_line(&values)?);
        }
        // Re-assemble so that arbitrary but well-formed input lands in
        // canonical form.
        Ok(assemble(strands, -(exp as i64), factors))
    }
}

/// The permutation braid `Δσ_i⁻¹`, i.e. the left complement of `σ_i`.
fn delta_times_inverse_artin(strands: u32, i: u32) -> PermutationBraid {
    let n = strands as usize;
    let mut one_line: Vec<u32> = (1..=strands).rev().collect();
    one_line.swap(n - 1 - i as usize, n - i as usize);
    PermutationBraid::from_one_line(&one_line).expect("valid by construction")
}

/// Builds the canonical form of `Δ^d · f₁⋯f_k` for any integer `d`.
fn assemble(strands: u32, delta_power: i64, mut factors: Vec<PermutationBraid>) -> GarsideNormalForm {
    left_weight(&mut factors);
    let mut power = delta_power;
    let leading = factors.iter().take_while(|f| f.is_delta()).count();
    power += leading as i64;
    factors.drain(..leading);
    if power > 0 {
        let delta = PermutationBraid::delta(strands);
        let mut with_delta = Vec::with_capacity(power as usize + factors.len());
        for _ in 0..power {
            with_delta.push(delta.clone());
        }
        with_delta.extend(factors);
        GarsideNormalForm {
            strands,
            delta_exp: 0,
            factors: with_delta,
        }
    } else {
        GarsideNormalForm {
            strands,
            delta_exp: (-power) as u32,
            factors,
        }
    }
}

/// Makes every adjacent factor pair left-weighted and removes trivial
/// factors. Sweeps with backtracking: a changed pair can break its left
/// neighbour, so step back after every modification.
fn left_weight(factors: &mut Vec<PermutationBraid>) {
    factors.retain(|f| !f.is_identity());
    let mut i = 0;
    while i + 1 < factors.len() {
        let (left, right) = factors.split_at_mut(i + 1);
        let a = &mut left[i];
        let b = &mut right[0];
        let mut finish_a = a.finishing_set();
        let mut start_b = b.starting_set();
        let mut changed = false;
        loop {
            let movable = start_b & !finish_a;
            if movable == 0 {
                break;
            }
            let gen = movable.trailing_zeros() + 1;
            a.absorb_right(gen);
            b.strip_left(gen);
            a.refresh_finishing_bits(&mut finish_a, gen);
            b.refresh_starting_bits(&mut start_b, gen);
            changed = true;
        }
        if changed {
            if factors[i + 1].is_identity() {
                factors.remove(i + 1);
            }
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
}

impl fmt::Display for GarsideNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
