//! The memory-bounded length-based beam solver for equation systems
//! `X·Wᵢ = bᵢ` over a finitely generated subgroup of `B_N`, plus its
//! conjugacy, membership and parametric specializations.
//!
//! Candidates are peel sequences: lists of `(j, σ)` pairs where the pair at
//! the front is the most recent peel. Reading a sequence left to right and
//! premultiplying each `bᵢ` by `a_j^{−σ}` yields the candidate's residuals,
//! so the reconstruction of `X` multiplies the pairs in reverse order with
//! the stored signs. Every step expands each kept sequence by all `2m`
//! extensions, scores by the summed reduced Garside length of the residuals,
//! and keeps the `M` best.
//!
//! Expansion recomputes each parent's residual chain from the `bᵢ` and then
//! applies one more peel per extension, so the reported multiplication count
//! is the exact number of normal-form multiplications performed and tracks
//! the closed form `n(n+4m+1)kM/2` for fixed-step runs with full beams.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;

use crate::error::BraidError;
use crate::length::rg_length;
use crate::normal::GarsideNormalForm;
use crate::word::BraidWord;

/// Safety cap on steps for halting rules without a fixed bound.
const DEFAULT_STEP_LIMIT: usize = 1024;

/// Expansions at least this large are mapped over a thread pool. The result
/// never depends on the worker count: children are produced in a fixed order
/// and selection is a deterministic sort.
const PARALLEL_THRESHOLD: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// One subgroup-generator letter `(j, σ)`, `j` 1-based. Orders by generator
/// index with `+` before `−`; candidate tie-breaking is lexicographic in
/// this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenLetter {
    pub gen: u32,
    pub sign: Sign,
}

impl GenLetter {
    pub fn new(gen: u32, sign: Sign) -> Self {
        GenLetter { gen, sign }
    }

    /// From a signed index: `+j` is `(j, +)`, `−j` is `(j, −)`.
    pub fn from_signed(value: i64) -> Option<Self> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(GenLetter {
            gen: value.unsigned_abs() as u32,
            sign: if value > 0 { Sign::Plus } else { Sign::Minus },
        })
    }

    pub fn to_signed(self) -> i64 {
        self.sign.as_i8() as i64 * self.gen as i64
    }
}

impl fmt::Display for GenLetter {
    /// Presentation form `j:+1` / `j:-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:+}", self.gen, self.sign.as_i8())
    }
}

#[derive(Debug, Clone)]
pub struct SubgroupGenerator {
    pub word: BraidWord,
    pub form: GarsideNormalForm,
}

impl SubgroupGenerator {
    pub fn from_word(word: BraidWord) -> Self {
        let form = GarsideNormalForm::from_word(&word);
        SubgroupGenerator { word, form }
    }
}

#[derive(Debug, Clone)]
pub struct Equation {
    pub b_word: BraidWord,
    pub b: GarsideNormalForm,
    /// Known prefix parameter `Pᵢ` of the unknown word `Wᵢ`, when given.
    pub prefix_word: Option<BraidWord>,
    pub prefix: Option<GarsideNormalForm>,
    /// Optional record of the word `Wᵢ` used to build the instance.
    pub w_hint: Option<BraidWord>,
}

/// A system `X·Wᵢ = bᵢ`, `i = 1..k`, over generators `a₁..a_m` of a
/// subgroup of `B_N`.
#[derive(Debug, Clone)]
pub struct EquationSystem {
    strands: u32,
    generators: Vec<SubgroupGenerator>,
    equations: Vec<Equation>,
}

impl EquationSystem {
    pub fn new(
        strands: u32,
        generator_words: Vec<BraidWord>,
        equations: Vec<(BraidWord, Option<BraidWord>, Option<BraidWord>)>,
    ) -> Result<Self, SolveError> {
        if generator_words.is_empty() {
            return Err(SolveError::EmptySystem { what: "generators" });
        }
        if equations.is_empty() {
            return Err(SolveError::EmptySystem { what: "equations" });
        }
        for w in generator_words
            .iter()
            .chain(equations.iter().map(|(b, _, _)| b))
        {
            if w.strands() != strands {
                return Err(SolveError::Braid(BraidError::StrandMismatch {
                    left: strands,
                    right: w.strands(),
                }));
            }
        }
        let generators = generator_words
            .into_iter()
            .map(SubgroupGenerator::from_word)
            .collect();
        let equations = equations
            .into_iter()
            .map(|(b_word, prefix_word, w_hint)| {
                if let Some(p) = &prefix_word {
                    if p.strands() != strands {
                        return Err(SolveError::Braid(BraidError::StrandMismatch {
                            left: strands,
                            right: p.strands(),
                        }));
                    }
                }
                let b = GarsideNormalForm::from_word(&b_word);
                let prefix = prefix_word.as_ref().map(GarsideNormalForm::from_word);
                Ok(Equation {
                    b_word,
                    b,
                    prefix_word,
                    prefix,
                    w_hint,
                })
            })
            .collect::<Result<Vec<_>, SolveError>>()?;
        Ok(EquationSystem {
            strands,
            generators,
            equations,
        })
    }

    pub fn strands(&self) -> u32 {
        self.strands
    }

    pub fn generators(&self) -> &[SubgroupGenerator] {
        &self.generators
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Number of subgroup generators `m`.
    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Number of equations `k`.
    pub fn equation_count(&self) -> usize {
        self.equations.len()
    }

    /// Indices of generators whose normal form is much shorter than their
    /// defining word (reduced length below half the letter count). Such
    /// collapsed generators break the length monotonicity the solver relies
    /// on, so callers may want to warn about them.
    pub fn short_generator_warnings(&self) -> Vec<usize> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.word.is_empty() && rg_length(&g.form) * 2 < g.word.len() as u64)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HaltRule {
    /// Stop after exactly `max_steps` steps.
    FixedSteps,
    /// Stop when the beam score sum has not decreased for `patience`
    /// consecutive steps; the reported beam is the one with the smallest
    /// score sum seen.
    ScoreSumRises,
    /// Stop when the prefix test fires for some candidate: the summed
    /// length of the `Pᵢ⁻¹Wᵢ` is at most `tau` times the summed length of
    /// the `Wᵢ`.
    Parametric { tau: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktrackConfig {
    /// How many steps to rewind when a failure is detected.
    pub lookback: usize,
    /// Beam width multiplier for the replayed window.
    pub beam_multiplier: usize,
    /// Plateau window of the failure detector.
    pub window: usize,
    /// Minimal relative decrease of the mean score over the window.
    pub epsilon: f64,
    /// Total rewind budget.
    pub max_backtracks: usize,
}

impl Default for BacktrackConfig {
    fn default() -> Self {
        BacktrackConfig {
            lookback: 5,
            beam_multiplier: 8,
            window: 4,
            epsilon: 0.01,
            max_backtracks: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamConfig {
    /// The memory parameter: number of sequences kept per step.
    pub beam_width: usize,
    /// Known bound on the generator length of `X`, when available. Required
    /// by `FixedSteps` and used as a step cap by the other rules.
    pub max_steps: Option<usize>,
    pub halt: HaltRule,
    /// Consecutive non-decreasing steps tolerated by `ScoreSumRises`.
    pub patience: usize,
    /// Peel `a_j^{−σ}` from the left and `a_j^{σ}` from the right at each
    /// step (conjugacy systems).
    pub two_sided: bool,
    /// Skip the extension that undoes the previous peel. On by default:
    /// secrets are freely reduced, so the undone sequences can never be the
    /// truth, and without pruning they flood the beam with re-encodings of
    /// elements already present and crowd the true prefix out. Turn off to
    /// study the unpruned 2m-way expansion.
    pub prune_immediate_inverse: bool,
    pub backtrack: Option<BacktrackConfig>,
}

impl BeamConfig {
    pub fn fixed_steps(beam_width: usize, steps: usize) -> Self {
        BeamConfig {
            beam_width,
            max_steps: Some(steps),
            halt: HaltRule::FixedSteps,
            patience: 1,
            two_sided: false,
            prune_immediate_inverse: true,
            backtrack: None,
        }
    }

    pub fn score_sum_rises(beam_width: usize) -> Self {
        BeamConfig {
            beam_width,
            max_steps: None,
            halt: HaltRule::ScoreSumRises,
            patience: 1,
            two_sided: false,
            prune_immediate_inverse: true,
            backtrack: None,
        }
    }

    pub fn parametric(beam_width: usize, tau: f64) -> Self {
        BeamConfig {
            beam_width,
            max_steps: None,
            halt: HaltRule::Parametric { tau },
            patience: 1,
            two_sided: false,
            prune_immediate_inverse: true,
            backtrack: None,
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.beam_width == 0 {
            return Err(SolveError::InconsistentConfig(
                "beam width must be at least 1".into(),
            ));
        }
        if self.patience == 0 {
            return Err(SolveError::InconsistentConfig(
                "patience must be at least 1".into(),
            ));
        }
        if matches!(self.halt, HaltRule::FixedSteps) && self.max_steps.is_none() {
            return Err(SolveError::InconsistentConfig(
                "fixed-step halting requires max_steps".into(),
            ));
        }
        if let HaltRule::Parametric { tau } = self.halt {
            if !(tau > 0.0) {
                return Err(SolveError::InconsistentConfig(
                    "parametric threshold must be positive".into(),
                ));
            }
        }
        if let Some(bt) = &self.backtrack {
            if bt.beam_multiplier == 0 || bt.window == 0 {
                return Err(SolveError::InconsistentConfig(
                    "backtrack multiplier and window must be at least 1".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A partial peeling sequence with its residuals and score.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Peel-order letters: the front entry is the most recent peel.
    pub letters: Vec<GenLetter>,
    /// Current `a_{j_s}^{−σ_s}⋯a_{j_1}^{−σ_1}·bᵢ` per equation.
    pub residuals: Vec<GarsideNormalForm>,
    /// Summed reduced Garside length of the residuals.
    pub score: u64,
}

impl Candidate {
    /// The empty sequence: residuals are the `bᵢ` themselves.
    pub fn initial(sys: &EquationSystem) -> Self {
        let residuals: Vec<GarsideNormalForm> =
            sys.equations().iter().map(|eq| eq.b.clone()).collect();
        let score = residuals.iter().map(rg_length).sum();
        Candidate {
            letters: Vec::new(),
            residuals,
            score,
        }
    }

    /// Reconstruction of the candidate `X`: the letters multiplied in
    /// reverse order with their stored signs.
    pub fn reconstruction(&self, sys: &EquationSystem) -> GarsideNormalForm {
        let mut acc = GarsideNormalForm::identity(sys.strands());
        for letter in self.letters.iter().rev() {
            let g = &sys.generators()[letter.gen as usize - 1].form;
            let factor = match letter.sign {
                Sign::Plus => g.clone(),
                Sign::Minus => g.inverse(),
            };
            acc = acc.multiply_unchecked(&factor);
        }
        acc
    }

    /// Consistency check used by tests: the stored score matches the
    /// recomputed residual lengths, and multiplying the letters in order
    /// (original signs) onto the left of each residual reproduces `bᵢ`
    /// (conjugating back for two-sided runs).
    pub fn verify_against(&self, sys: &EquationSystem, two_sided: bool) -> Result<(), String> {
        if self.residuals.len() != sys.equation_count() {
            return Err("residual count differs from equation count".into());
        }
        let recomputed: u64 = self.residuals.iter().map(rg_length).sum();
        if recomputed != self.score {
            return Err(format!("score {} != recomputed {}", self.score, recomputed));
        }
        for (eq, residual) in sys.equations().iter().zip(&self.residuals) {
            let mut acc = residual.clone();
            for letter in &self.letters {
                let g = &sys.generators()[letter.gen as usize - 1].form;
                let (left, right) = match letter.sign {
                    Sign::Plus => (g.clone(), g.inverse()),
                    Sign::Minus => (g.inverse(), g.clone()),
                };
                acc = left.multiply_unchecked(&acc);
                if two_sided {
                    acc = acc.multiply_unchecked(&right);
                }
            }
            if acc != eq.b {
                return Err("peeling does not reproduce b".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    /// Scores of the kept beam, ascending.
    pub scores: Vec<u64>,
    pub mean_score: f64,
    /// 1-based rank of the ground-truth prefix in the beam; 0 when it has
    /// dropped out; `None` when no truth was supplied or the step exceeds
    /// the truth length.
    pub truth_rank: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    FixedSteps,
    ScoreSumRises,
    Parametric,
    /// All right-hand sides were already the identity: `X` is empty.
    IdentityAtStart,
    MembershipFound,
    /// Safety cap for rules without a fixed bound.
    StepLimit,
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HaltReason::FixedSteps => "fixed_steps",
            HaltReason::ScoreSumRises => "score_sum_rises",
            HaltReason::Parametric => "parametric",
            HaltReason::IdentityAtStart => "identity_at_start",
            HaltReason::MembershipFound => "membership_found",
            HaltReason::StepLimit => "step_limit",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for HaltReason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixed_steps" => Ok(HaltReason::FixedSteps),
            "score_sum_rises" => Ok(HaltReason::ScoreSumRises),
            "parametric" => Ok(HaltReason::Parametric),
            "identity_at_start" => Ok(HaltReason::IdentityAtStart),
            "membership_found" => Ok(HaltReason::MembershipFound),
            "step_limit" => Ok(HaltReason::StepLimit),
            other => Err(format!("unknown halt reason {:?}", other)),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    /// Normal-form multiplications performed by the solver.
    pub multiplications: u64,
    /// Length-function evaluations performed by the solver.
    pub length_evaluations: u64,
}

/// Outcome of the prefix test for one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricVerdict {
    /// `Σᵢ ℓ(Pᵢ⁻¹Wᵢ)`.
    pub peeled_sum: u64,
    /// `Σᵢ ℓ(Wᵢ)`, i.e. the candidate score.
    pub residual_sum: u64,
    pub passes: bool,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Up to `M` candidates, ascending by `(score, letters)`.
    pub ranked: Vec<Candidate>,
    pub halted_at_step: usize,
    pub halt_reason: HaltReason,
    pub trace: Vec<StepTrace>,
    pub op_counts: OpCounts,
    /// Prefix-test verdicts aligned with `ranked`, present for parametric
    /// runs; the passing candidates disambiguate which of the `M` sequences
    /// is the correct one.
    pub parametric: Option<Vec<ParametricVerdict>>,
    /// Rewinds performed by the backtracking strategy.
    pub backtracks: usize,
}

impl SolveResult {
    /// 1-based rank of a truth sequence (multiplication order) in the final
    /// list; 0 when absent.
    pub fn rank_of_truth(&self, truth: &[GenLetter]) -> usize {
        let stored: Vec<GenLetter> = truth.iter().rev().copied().collect();
        self.ranked
            .iter()
            .position(|c| c.letters == stored)
            .map(|p| p + 1)
            .unwrap_or(0)
    }
}

/// Membership solve outcome: the result plus, on success, the presentation
/// of `g` over the subgroup generators in multiplication order.
#[derive(Debug, Clone)]
pub struct MembershipOutcome {
    pub result: SolveResult,
    pub presentation: Option<Vec<GenLetter>>,
    pub found_at_step: Option<usize>,
    /// 1-based position of the coding sequence in the beam when found; 0
    /// when nothing was found.
    pub found_rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    Braid(BraidError),
    EmptySystem { what: &'static str },
    InconsistentConfig(String),
    /// Parametric mode needs a prefix on every equation.
    MissingPrefix { equation: usize },
    /// Unknown conjugated element requires a known step bound.
    MissingStepBound,
    BadTruthLetter { index: usize, gen: u32, m: usize },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Braid(e) => write!(f, "{}", e),
            SolveError::EmptySystem { what } => write!(f, "system has no {}", what),
            SolveError::InconsistentConfig(msg) => write!(f, "inconsistent config: {}", msg),
            SolveError::MissingPrefix { equation } => {
                write!(f, "equation {} has no prefix parameter P", equation + 1)
            }
            SolveError::MissingStepBound => {
                write!(f, "unknown conjugated element requires max_steps")
            }
            SolveError::BadTruthLetter { index, gen, m } => write!(
                f,
                "truth letter {} references generator {} but the subgroup has {}",
                index, gen, m
            ),
        }
    }
}

impl std::error::Error for SolveError {}

impl From<BraidError> for SolveError {
    fn from(e: BraidError) -> Self {
        SolveError::Braid(e)
    }
}

/// True iff the mean beam score failed to decrease by at least `epsilon`
/// (relative) over the last `window` trace entries.
pub fn detect_failure(trace: &[StepTrace], window: usize, epsilon: f64) -> bool {
    if window < 2 || trace.len() < window {
        return false;
    }
    let first = trace[trace.len() - window].mean_score;
    let last = trace[trace.len() - 1].mean_score;
    if first <= 0.0 {
        return last >= first;
    }
    (first - last) < epsilon * first
}

/// The prefix test: with `Wᵢ` the candidate's residuals, true iff
/// `Σᵢ ℓ(Pᵢ⁻¹Wᵢ) ≤ tau · Σᵢ ℓ(Wᵢ)`.
pub fn parametric_halt_test(
    candidate: &Candidate,
    sys: &EquationSystem,
    tau: f64,
) -> Result<bool, SolveError> {
    let mut peeled_sum = 0u64;
    for (i, (eq, residual)) in sys
        .equations()
        .iter()
        .zip(&candidate.residuals)
        .enumerate()
    {
        let prefix = eq
            .prefix
            .as_ref()
            .ok_or(SolveError::MissingPrefix { equation: i })?;
        peeled_sum += rg_length(&prefix.inverse().multiply_unchecked(residual));
    }
    let residual_sum: u64 = candidate.residuals.iter().map(rg_length).sum();
    Ok(passes_parametric(peeled_sum, residual_sum, tau))
}

fn passes_parametric(peeled_sum: u64, residual_sum: u64, tau: f64) -> bool {
    if residual_sum == 0 {
        return peeled_sum == 0;
    }
    peeled_sum as f64 <= tau * residual_sum as f64
}

/// One beam step: expands every candidate by all `2m` extensions, scores
/// the children and returns the `M` least-scored in deterministic
/// `(score, letters)` order. Step 1 is the expansion of the single empty
/// candidate.
pub fn beam_step(
    beam: &[Candidate],
    sys: &EquationSystem,
    cfg: &BeamConfig,
) -> Result<Vec<Candidate>, SolveError> {
    cfg.validate()?;
    if beam.is_empty() {
        return Err(SolveError::InconsistentConfig("empty beam".into()));
    }
    let engine = Engine::new(sys, cfg)?;
    let (children, _ops) = engine.expand_and_select(beam, cfg.beam_width);
    Ok(children)
}

/// Runs the beam solver on a system. `truth`, when supplied in
/// multiplication order, enables per-step rank tracking in the trace.
pub fn solve(
    sys: &EquationSystem,
    cfg: &BeamConfig,
    truth: Option<&[GenLetter]>,
) -> Result<SolveResult, SolveError> {
    cfg.validate()?;
    let engine = Engine::new(sys, cfg)?;
    engine.run(truth, false).map(|(result, _)| result)
}

/// Backtracking variant: identical to `solve` when the detector never
/// fires; otherwise rewinds `lookback` steps and replays a window with beam
/// width `beam_multiplier·M`.
pub fn solve_with_backtracking(
    sys: &EquationSystem,
    cfg: &BeamConfig,
    truth: Option<&[GenLetter]>,
) -> Result<SolveResult, SolveError> {
    if cfg.backtrack.is_none() {
        return Err(SolveError::InconsistentConfig(
            "backtracking solve requires a backtrack config".into(),
        ));
    }
    solve(sys, cfg, truth)
}

/// Conjugacy solve for `b = X·P·X⁻¹`. With `P` known and `cfg.two_sided`,
/// peels `a_j^{−σ}` from the left and `a_j^{σ}` from the right, halting by
/// the prefix test against `P`. With `P` unknown, runs the plain one-sided
/// solve for exactly `max_steps` steps.
pub fn solve_conjugacy(
    b: GarsideNormalForm,
    p: Option<GarsideNormalForm>,
    generators: Vec<BraidWord>,
    cfg: &BeamConfig,
    truth: Option<&[GenLetter]>,
) -> Result<SolveResult, SolveError> {
    let strands = b.strands();
    let b_word = b.to_word();
    let p_word = p.as_ref().map(|p| p.to_word());
    let sys = EquationSystem::new(strands, generators, vec![(b_word, p_word, None)])?;
    let mut cfg = cfg.clone();
    match p {
        Some(_) => {
            if !matches!(cfg.halt, HaltRule::Parametric { .. }) {
                cfg.halt = HaltRule::Parametric { tau: 0.5 };
            }
        }
        None => {
            if cfg.max_steps.is_none() {
                return Err(SolveError::MissingStepBound);
            }
            cfg.two_sided = false;
            cfg.halt = HaltRule::FixedSteps;
        }
    }
    solve(&sys, &cfg, truth)
}

/// Membership / shortest-presentation solve: runs on the single equation
/// `b = g` with empty `W` and checks after every step whether `g` is coded
/// by one of the kept sequences. Not finding a presentation is not a proof
/// of non-membership.
pub fn solve_membership(
    g: GarsideNormalForm,
    generators: Vec<BraidWord>,
    cfg: &BeamConfig,
) -> Result<MembershipOutcome, SolveError> {
    let strands = g.strands();
    let sys = EquationSystem::new(strands, generators, vec![(g.to_word(), None, None)])?;
    cfg.validate()?;
    let engine = Engine::new(&sys, cfg)?;
    let (result, found) = engine.run(None, true)?;
    let (presentation, found_at_step, found_rank) = match found {
        Some(hit) => {
            let mut letters = hit.letters;
            letters.reverse();
            (Some(letters), Some(hit.step), hit.rank)
        }
        None => {
            if result.halt_reason == HaltReason::IdentityAtStart {
                (Some(Vec::new()), Some(0), 1)
            } else {
                (None, None, 0)
            }
        }
    };
    Ok(MembershipOutcome {
        result,
        presentation,
        found_at_step,
        found_rank,
    })
}

struct MembershipHit {
    letters: Vec<GenLetter>,
    step: usize,
    rank: usize,
}

struct Engine<'a> {
    sys: &'a EquationSystem,
    cfg: &'a BeamConfig,
    /// Normal forms of `a_j^{−σ}` per extension letter.
    peel: Vec<GarsideNormalForm>,
    /// Normal forms of `a_j^{σ}`, used on the right in two-sided mode.
    unpeel: Vec<GarsideNormalForm>,
    letters: Vec<GenLetter>,
    prefix_inverses: Option<Vec<GarsideNormalForm>>,
}

impl<'a> Engine<'a> {
    fn new(sys: &'a EquationSystem, cfg: &'a BeamConfig) -> Result<Self, SolveError> {
        let m = sys.generator_count();
        let mut peel = Vec::with_capacity(2 * m);
        let mut unpeel = Vec::with_capacity(2 * m);
        let mut letters = Vec::with_capacity(2 * m);
        for j in 1..=m as u32 {
            let form = &sys.generators()[j as usize - 1].form;
            let inv = form.inverse();
            letters.push(GenLetter::new(j, Sign::Plus));
            peel.push(inv.clone());
            unpeel.push(form.clone());
            letters.push(GenLetter::new(j, Sign::Minus));
            peel.push(form.clone());
            unpeel.push(inv);
        }
        let prefix_inverses = if matches!(cfg.halt, HaltRule::Parametric { .. }) {
            let mut inv = Vec::with_capacity(sys.equation_count());
            for (i, eq) in sys.equations().iter().enumerate() {
                match &eq.prefix {
                    Some(p) => inv.push(p.inverse()),
                    None => return Err(SolveError::MissingPrefix { equation: i }),
                }
            }
            Some(inv)
        } else {
            None
        };
        Ok(Engine {
            sys,
            cfg,
            peel,
            unpeel,
            letters,
            prefix_inverses,
        })
    }

    fn letter_index(letter: GenLetter) -> usize {
        (letter.gen as usize - 1) * 2 + if letter.sign == Sign::Plus { 0 } else { 1 }
    }

    /// Recomputes a parent's residuals from the `bᵢ` and produces all
    /// scored children, together with the operations spent.
    fn expand_parent(&self, parent: &Candidate) -> (Vec<Candidate>, OpCounts) {
        let mut ops = OpCounts::default();
        let k = self.sys.equation_count();
        let mut base: Vec<GarsideNormalForm> = Vec::with_capacity(k);
        for eq in self.sys.equations() {
            let mut acc = eq.b.clone();
            for letter in parent.letters.iter().rev() {
                let idx = Self::letter_index(*letter);
                acc = self.peel[idx].multiply_unchecked(&acc);
                ops.multiplications += 1;
                if self.cfg.two_sided {
                    acc = acc.multiply_unchecked(&self.unpeel[idx]);
                    ops.multiplications += 1;
                }
            }
            base.push(acc);
        }
        debug_assert_eq!(base, parent.residuals);

        let skip = if self.cfg.prune_immediate_inverse {
            parent
                .letters
                .first()
                .map(|l| GenLetter::new(l.gen, l.sign.flip()))
        } else {
            None
        };
        let mut children = Vec::with_capacity(self.letters.len());
        for &letter in &self.letters {
            if Some(letter) == skip {
                continue;
            }
            let idx = Self::letter_index(letter);
            let mut residuals = Vec::with_capacity(k);
            let mut score = 0u64;
            for r in &base {
                let mut next = self.peel[idx].multiply_unchecked(r);
                ops.multiplications += 1;
                if self.cfg.two_sided {
                    next = next.multiply_unchecked(&self.unpeel[idx]);
                    ops.multiplications += 1;
                }
                score += rg_length(&next);
                ops.length_evaluations += 1;
                residuals.push(next);
            }
            let mut letters = Vec::with_capacity(parent.letters.len() + 1);
            letters.push(letter);
            letters.extend_from_slice(&parent.letters);
            children.push(Candidate {
                letters,
                residuals,
                score,
            });
        }
        (children, ops)
    }

    fn expand_and_select(&self, beam: &[Candidate], width: usize) -> (Vec<Candidate>, OpCounts) {
        let work = beam.len() * self.letters.len() * self.sys.equation_count();
        let per_parent: Vec<(Vec<Candidate>, OpCounts)> = if work >= PARALLEL_THRESHOLD {
            beam.par_iter().map(|c| self.expand_parent(c)).collect()
        } else {
            beam.iter().map(|c| self.expand_parent(c)).collect()
        };
        let mut ops = OpCounts::default();
        let mut children = Vec::with_capacity(beam.len() * self.letters.len());
        for (mut cs, o) in per_parent {
            ops.multiplications += o.multiplications;
            ops.length_evaluations += o.length_evaluations;
            children.append(&mut cs);
        }
        children
            .sort_unstable_by(|a, b| a.score.cmp(&b.score).then_with(|| a.letters.cmp(&b.letters)));
        children.truncate(width);
        (children, ops)
    }

    /// Prefix-test verdicts for a beam; returns whether any candidate
    /// passed.
    fn parametric_verdicts(
        &self,
        beam: &[Candidate],
        tau: f64,
        ops: &mut OpCounts,
    ) -> (Vec<ParametricVerdict>, bool) {
        let inverses = self
            .prefix_inverses
            .as_ref()
            .expect("parametric mode has prefix inverses");
        let mut any = false;
        let verdicts = beam
            .iter()
            .map(|c| {
                let mut peeled_sum = 0u64;
                for (pinv, r) in inverses.iter().zip(&c.residuals) {
                    peeled_sum += rg_length(&pinv.multiply_unchecked(r));
                    ops.multiplications += 1;
                    ops.length_evaluations += 1;
                }
                let passes = passes_parametric(peeled_sum, c.score, tau);
                any |= passes;
                ParametricVerdict {
                    peeled_sum,
                    residual_sum: c.score,
                    passes,
                }
            })
            .collect();
        (verdicts, any)
    }

    fn run(
        &self,
        truth: Option<&[GenLetter]>,
        membership: bool,
    ) -> Result<(SolveResult, Option<MembershipHit>), SolveError> {
        let m = self.sys.generator_count();
        if let Some(truth) = truth {
            for (index, l) in truth.iter().enumerate() {
                if l.gen == 0 || l.gen as usize > m {
                    return Err(SolveError::BadTruthLetter {
                        index,
                        gen: l.gen,
                        m,
                    });
                }
            }
        }
        let width = self.cfg.beam_width;
        let mut ops = OpCounts::default();

        let initial = Candidate::initial(self.sys);
        ops.length_evaluations += self.sys.equation_count() as u64;

        // Degenerate input: every right-hand side is already the identity.
        if initial.score == 0 {
            let result = SolveResult {
                ranked: vec![initial],
                halted_at_step: 0,
                halt_reason: HaltReason::IdentityAtStart,
                trace: Vec::new(),
                op_counts: ops,
                parametric: None,
                backtracks: 0,
            };
            return Ok((result, None));
        }
        // The prefix test also applies before any expansion (e.g. conjugacy
        // with trivial X, where b equals P from the start).
        if let HaltRule::Parametric { tau } = self.cfg.halt {
            let (verdicts, fired) =
                self.parametric_verdicts(std::slice::from_ref(&initial), tau, &mut ops);
            if fired {
                let result = SolveResult {
                    ranked: vec![initial],
                    halted_at_step: 0,
                    halt_reason: HaltReason::Parametric,
                    trace: Vec::new(),
                    op_counts: ops,
                    parametric: Some(verdicts),
                    backtracks: 0,
                };
                return Ok((result, None));
            }
        }

        let step_cap = match self.cfg.halt {
            HaltRule::FixedSteps => self.cfg.max_steps.expect("validated"),
            _ => self.cfg.max_steps.unwrap_or(DEFAULT_STEP_LIMIT),
        };

        let bt = self.cfg.backtrack;
        let mut beam = vec![initial];
        let mut trace: Vec<StepTrace> = Vec::new();
        let mut sums: Vec<u64> = Vec::new();
        let mut history: VecDeque<(usize, Vec<Candidate>)> = VecDeque::new();
        if bt.is_some() {
            history.push_back((0, beam.clone()));
        }
        let mut best: Option<(u64, Vec<Candidate>)> = None;
        let mut boost_until = 0usize;
        let mut backtracks = 0usize;
        let mut last_fire_step = 0usize;

        loop {
            let step = trace.len() + 1;
            let step_width = if step <= boost_until {
                width * bt.map(|b| b.beam_multiplier).unwrap_or(1)
            } else {
                width
            };
            let (next, step_ops) = self.expand_and_select(&beam, step_width);
            ops.multiplications += step_ops.multiplications;
            ops.length_evaluations += step_ops.length_evaluations;
            beam = next;

            let scores: Vec<u64> = beam.iter().map(|c| c.score).collect();
            let sum: u64 = scores.iter().sum();
            let mean_score = sum as f64 / scores.len() as f64;
            let truth_rank = truth.and_then(|t| {
                if step > t.len() {
                    return None;
                }
                let prefix: Vec<GenLetter> = t[..step].iter().rev().copied().collect();
                Some(
                    beam.iter()
                        .position(|c| c.letters == prefix)
                        .map(|p| p + 1)
                        .unwrap_or(0),
                )
            });
            trace.push(StepTrace {
                scores,
                mean_score,
                truth_rank,
            });
            sums.push(sum);

            // Failure detection and rewind, checked before any halting rule
            // so the final step still gets a second chance.
            if let Some(btc) = bt {
                let can_fire = step > boost_until
                    && backtracks < btc.max_backtracks
                    && step > last_fire_step
                    && detect_failure(&trace, btc.window, btc.epsilon);
                if can_fire {
                    let target = step.saturating_sub(btc.lookback);
                    // Take the oldest stored beam if the lookback reaches
                    // past the kept window (clamps to step 0 early on).
                    let (restored_step, restored) = history
                        .iter()
                        .find(|(s, _)| *s >= target)
                        .or_else(|| history.back())
                        .expect("history holds at least the initial beam")
                        .clone();
                    beam = restored;
                    trace.truncate(restored_step);
                    sums.truncate(restored_step);
                    while history
                        .back()
                        .map(|(s, _)| *s > restored_step)
                        .unwrap_or(false)
                    {
                        history.pop_back();
                    }
                    best = None;
                    boost_until = restored_step + btc.lookback + btc.window;
                    backtracks += 1;
                    last_fire_step = step;
                    continue;
                }
                history.push_back((step, beam.clone()));
                while history.len() > btc.lookback + 1 {
                    history.pop_front();
                }
            }

            if best.as_ref().map(|(s, _)| sum < *s).unwrap_or(true) {
                best = Some((sum, beam.clone()));
            }

            // Halting rules, in precedence order.
            if membership {
                let visible = beam.len().min(width);
                if let Some(pos) = beam[..visible]
                    .iter()
                    .position(|c| c.residuals.iter().all(|r| r.is_identity()))
                {
                    let hit = MembershipHit {
                        letters: beam[pos].letters.clone(),
                        step,
                        rank: pos + 1,
                    };
                    beam.truncate(width);
                    let result = SolveResult {
                        halted_at_step: trace.len(),
                        ranked: beam,
                        halt_reason: HaltReason::MembershipFound,
                        trace,
                        op_counts: ops,
                        parametric: None,
                        backtracks,
                    };
                    return Ok((result, Some(hit)));
                }
            }
            if let HaltRule::Parametric { tau } = self.cfg.halt {
                let visible = beam.len().min(width);
                let (verdicts, fired) = self.parametric_verdicts(&beam[..visible], tau, &mut ops);
                if fired {
                    beam.truncate(width);
                    let result = SolveResult {
                        halted_at_step: trace.len(),
                        ranked: beam,
                        halt_reason: HaltReason::Parametric,
                        trace,
                        op_counts: ops,
                        parametric: Some(verdicts),
                        backtracks,
                    };
                    return Ok((result, None));
                }
            }
            if matches!(self.cfg.halt, HaltRule::ScoreSumRises) {
                // Count trailing non-decreases between equally sized beams.
                let mut streak = 0usize;
                for i in (1..sums.len()).rev() {
                    let comparable = trace[i].scores.len() == trace[i - 1].scores.len();
                    if comparable && sums[i] >= sums[i - 1] {
                        streak += 1;
                    } else {
                        break;
                    }
                }
                if streak >= self.cfg.patience {
                    let mut ranked = best.map(|(_, b)| b).unwrap_or(beam);
                    ranked.truncate(width);
                    let result = SolveResult {
                        halted_at_step: trace.len(),
                        ranked,
                        halt_reason: HaltReason::ScoreSumRises,
                        trace,
                        op_counts: ops,
                        parametric: None,
                        backtracks,
                    };
                    return Ok((result, None));
                }
            }
            if step >= step_cap {
                beam.truncate(width);
                let reason = if matches!(self.cfg.halt, HaltRule::FixedSteps) {
                    HaltReason::FixedSteps
                } else {
                    HaltReason::StepLimit
                };
                let result = SolveResult {
                    halted_at_step: trace.len(),
                    ranked: beam,
                    halt_reason: reason,
                    trace,
                    op_counts: ops,
                    parametric: None,
                    backtracks,
                };
                return Ok((result, None));
            }
        }
    }
}
