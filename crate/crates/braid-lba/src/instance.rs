//! Seeded generation of random subgroups, secrets and equation systems, the
//! experiment parameter grid, and the instance file format.
//!
//! Randomness is uniform over the space in question ("generator" always
//! means a generator or its inverse): subgroup generators are products of
//! `generator_letters` signed Artin letters, the secret `X` is a product of
//! `secret_length` signed subgroup letters, and each `Wᵢ` a product of
//! `word_length` of them. All products are drawn uniformly over *freely
//! reduced* sequences (no letter immediately followed by its inverse);
//! without this the secrets collapse so badly that no length function can
//! track them. The stream is ChaCha8 seeded with the instance seed; draw
//! order is subgroup generators first, then `X`, then the `Wᵢ` in equation
//! order.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::BraidError;
use crate::solver::{EquationSystem, GenLetter, Sign, SolveError};
use crate::word::BraidWord;

/// Identifier of the random stream recorded in experiment output.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Artin letters per random subgroup generator.
pub const DEFAULT_GENERATOR_LETTERS: u32 = 10;

/// One experiment cell: `(m, n, k, l, M)` at a strand count `N`, plus the
/// instance seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExperimentParams {
    /// `N`: strand count of the ambient braid group.
    pub strands: u32,
    /// `m`: number of subgroup generators.
    pub generators: u32,
    /// `n`: subgroup letters multiplied to obtain `X`.
    pub secret_length: u32,
    /// `k`: number of equations.
    pub equations: u32,
    /// `l`: subgroup letters multiplied to obtain each `Wᵢ`.
    pub word_length: u32,
    /// `M`: beam width.
    pub beam_width: u32,
    /// Artin letters per subgroup generator.
    pub generator_letters: u32,
    pub seed: u64,
}

impl ExperimentParams {
    pub fn new(strands: u32, m: u32, n: u32, k: u32, l: u32, beam_width: u32) -> Self {
        ExperimentParams {
            strands,
            generators: m,
            secret_length: n,
            equations: k,
            word_length: l,
            beam_width,
            generator_letters: DEFAULT_GENERATOR_LETTERS,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Cell key without the seed, used for grouping and CSV sorting.
    pub fn cell_key(&self) -> (u32, u32, u32, u32, u32, u32) {
        (
            self.strands,
            self.generators,
            self.secret_length,
            self.equations,
            self.word_length,
            self.beam_width,
        )
    }
}

/// A uniform signed Artin word of the given letter count (not reduced;
/// used for length studies on generic words).
pub fn random_artin_word(strands: u32, letters: usize, rng: &mut ChaCha8Rng) -> BraidWord {
    let choices = 2 * (strands - 1);
    let letters: Vec<i32> = (0..letters)
        .map(|_| {
            let v = rng.gen_range(0..choices);
            let gen = (v / 2 + 1) as i32;
            if v % 2 == 0 {
                gen
            } else {
                -gen
            }
        })
        .collect();
    BraidWord::new(strands, letters).expect("letters in range by construction")
}

/// A uniform freely reduced signed Artin word: rejection over the single
/// forbidden follower keeps each letter marginally uniform.
pub fn random_reduced_artin_word(strands: u32, letters: usize, rng: &mut ChaCha8Rng) -> BraidWord {
    let choices = 2 * (strands - 1);
    let mut out: Vec<i32> = Vec::with_capacity(letters);
    while out.len() < letters {
        let v = rng.gen_range(0..choices);
        let gen = (v / 2 + 1) as i32;
        let e = if v % 2 == 0 { gen } else { -gen };
        if out.last().map(|&p| p == -e).unwrap_or(false) {
            continue;
        }
        out.push(e);
    }
    BraidWord::new(strands, out).expect("letters in range by construction")
}

/// `m` random subgroup generators, each a freely reduced product of
/// `generator_letters` signed Artin letters.
pub fn random_subgroup(params: &ExperimentParams, rng: &mut ChaCha8Rng) -> Vec<BraidWord> {
    (0..params.generators)
        .map(|_| random_reduced_artin_word(params.strands, params.generator_letters as usize, rng))
        .collect()
}

/// Uniform freely reduced signed subgroup letters `(j, σ)`.
pub fn random_subgroup_letters(m: u32, count: usize, rng: &mut ChaCha8Rng) -> Vec<GenLetter> {
    let mut out: Vec<GenLetter> = Vec::with_capacity(count);
    while out.len() < count {
        let v = rng.gen_range(0..2 * m);
        let l = GenLetter::new(
            v / 2 + 1,
            if v % 2 == 0 { Sign::Plus } else { Sign::Minus },
        );
        if let Some(prev) = out.last() {
            if prev.gen == l.gen && prev.sign != l.sign {
                continue;
            }
        }
        out.push(l);
    }
    out
}

/// Expands subgroup letters into the Artin word they spell.
pub fn expand_letters(letters: &[GenLetter], generators: &[BraidWord]) -> BraidWord {
    let strands = generators
        .first()
        .map(|g| g.strands())
        .expect("nonempty generator list");
    let mut acc = BraidWord::identity(strands);
    for l in letters {
        let g = &generators[l.gen as usize - 1];
        let g = match l.sign {
            Sign::Plus => g.clone(),
            Sign::Minus => g.inverse(),
        };
        acc = acc.concat(&g).expect("same strand count");
    }
    acc
}

/// A generated or parsed problem instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub system: EquationSystem,
    /// The letters of `X` in multiplication order, when known.
    pub truth: Option<Vec<GenLetter>>,
    pub seed: Option<u64>,
}

/// Plain instance: `bᵢ = X·Wᵢ` with the footnote semantics (letters are
/// generators or their inverses). Every equation records its `Wᵢ` as a hint.
pub fn random_instance(params: &ExperimentParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let gens = random_subgroup(params, &mut rng);
    let truth = random_subgroup_letters(params.generators, params.secret_length as usize, &mut rng);
    let x_word = expand_letters(&truth, &gens);
    let mut equations = Vec::with_capacity(params.equations as usize);
    for _ in 0..params.equations {
        let w_letters =
            random_subgroup_letters(params.generators, params.word_length as usize, &mut rng);
        let w_word = expand_letters(&w_letters, &gens);
        let b = x_word.concat(&w_word).expect("same strand count");
        equations.push((b, None, Some(w_word)));
    }
    let system = EquationSystem::new(params.strands, gens, equations)
        .expect("generated system is well formed");
    Instance {
        system,
        truth: Some(truth),
        seed: Some(params.seed),
    }
}

/// Parametric instance: like the plain one, but each `Wᵢ` begins with a
/// known prefix `Pᵢ` of `⌈l/2⌉` subgroup letters.
pub fn random_parametric_instance(params: &ExperimentParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let gens = random_subgroup(params, &mut rng);
    let truth = random_subgroup_letters(params.generators, params.secret_length as usize, &mut rng);
    let x_word = expand_letters(&truth, &gens);
    let prefix_len = (params.word_length as usize + 1) / 2;
    let mut equations = Vec::with_capacity(params.equations as usize);
    for _ in 0..params.equations {
        let w_letters =
            random_subgroup_letters(params.generators, params.word_length as usize, &mut rng);
        let w_word = expand_letters(&w_letters, &gens);
        let p_word = expand_letters(&w_letters[..prefix_len.min(w_letters.len())], &gens);
        let b = x_word.concat(&w_word).expect("same strand count");
        equations.push((b, Some(p_word), Some(w_word)));
    }
    let system = EquationSystem::new(params.strands, gens, equations)
        .expect("generated system is well formed");
    Instance {
        system,
        truth: Some(truth),
        seed: Some(params.seed),
    }
}

/// Conjugacy instance: a single equation `b = X·P·X⁻¹` where `P` is a
/// product of `l` subgroup letters. The prefix slot carries `P`.
pub fn random_conjugacy_instance(params: &ExperimentParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let gens = random_subgroup(params, &mut rng);
    let truth = random_subgroup_letters(params.generators, params.secret_length as usize, &mut rng);
    let x_word = expand_letters(&truth, &gens);
    let p_letters =
        random_subgroup_letters(params.generators, params.word_length as usize, &mut rng);
    let p_word = expand_letters(&p_letters, &gens);
    let b = x_word
        .concat(&p_word)
        .and_then(|w| w.concat(&x_word.inverse()))
        .expect("same strand count");
    let system = EquationSystem::new(params.strands, gens, vec![(b, Some(p_word), None)])
        .expect("generated system is well formed");
    Instance {
        system,
        truth: Some(truth),
        seed: Some(params.seed),
    }
}

/// Membership instance: `g = X` presented as the single equation `b = g`
/// with empty `W` (the `word_length` parameter is ignored).
pub fn random_membership_instance(params: &ExperimentParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let gens = random_subgroup(params, &mut rng);
    let truth = random_subgroup_letters(params.generators, params.secret_length as usize, &mut rng);
    let g_word = expand_letters(&truth, &gens);
    let system = EquationSystem::new(params.strands, gens, vec![(g_word, None, None)])
        .expect("generated system is well formed");
    Instance {
        system,
        truth: Some(truth),
        seed: Some(params.seed),
    }
}

/// Value sets per parameter; the cell list is their cross product in
/// deterministic order (strands outermost, then m, n, k, l, M).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub strands: Vec<u32>,
    pub generators: Vec<u32>,
    pub secret_length: Vec<u32>,
    pub equations: Vec<u32>,
    pub word_length: Vec<u32>,
    pub beam_width: Vec<u32>,
    pub generator_letters: u32,
}

impl GridSpec {
    /// The full study grid: `m ∈ {2,4,8}`, `n ∈ {16,32,64}`,
    /// `k ∈ {1,2,4,8}`, `l ∈ {4,8}`, `M ∈ {2,…,512}` at `N = 8`;
    /// 648 cells.
    pub fn full_grid() -> Self {
        GridSpec {
            strands: vec![8],
            generators: vec![2, 4, 8],
            secret_length: vec![16, 32, 64],
            equations: vec![1, 2, 4, 8],
            word_length: vec![4, 8],
            beam_width: vec![2, 4, 8, 16, 32, 64, 128, 256, 512],
            generator_letters: DEFAULT_GENERATOR_LETTERS,
        }
    }

    pub fn single_cell(params: &ExperimentParams) -> Self {
        GridSpec {
            strands: vec![params.strands],
            generators: vec![params.generators],
            secret_length: vec![params.secret_length],
            equations: vec![params.equations],
            word_length: vec![params.word_length],
            beam_width: vec![params.beam_width],
            generator_letters: params.generator_letters,
        }
    }

    /// The strand-count sweep for a fixed `(m,n,k,l,M)` cell.
    pub fn strand_sweep(m: u32, n: u32, k: u32, l: u32, beam_width: u32) -> Self {
        GridSpec {
            strands: sweep_strand_counts(),
            generators: vec![m],
            secret_length: vec![n],
            equations: vec![k],
            word_length: vec![l],
            beam_width: vec![beam_width],
            generator_letters: DEFAULT_GENERATOR_LETTERS,
        }
    }

    pub fn cells(&self) -> Vec<ExperimentParams> {
        let mut out = Vec::new();
        for &strands in &self.strands {
            for &m in &self.generators {
                for &n in &self.secret_length {
                    for &k in &self.equations {
                        for &l in &self.word_length {
                            for &beam in &self.beam_width {
                                let mut p = ExperimentParams::new(strands, m, n, k, l, beam);
                                p.generator_letters = self.generator_letters;
                                out.push(p);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Parses a grid config: one `key v1 v2 ...` line per parameter, keys
    /// `N m n k l M` plus optional `gen_len`, `#` comments.
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let mut grid = GridSpec {
            strands: vec![8],
            generators: vec![2],
            secret_length: vec![16],
            equations: vec![1],
            word_length: vec![4],
            beam_width: vec![16],
            generator_letters: DEFAULT_GENERATOR_LETTERS,
        };
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap();
            let values: Result<Vec<u32>, _> = parts.map(|t| t.parse::<u32>()).collect();
            let values = values.map_err(|_| InstanceError::Parse {
                line: lineno + 1,
                message: format!("bad value list for {:?}", key),
            })?;
            if values.is_empty() {
                return Err(InstanceError::Parse {
                    line: lineno + 1,
                    message: format!("{:?} needs at least one value", key),
                });
            }
            match key {
                "N" => grid.strands = values,
                "m" => grid.generators = values,
                "n" => grid.secret_length = values,
                "k" => grid.equations = values,
                "l" => grid.word_length = values,
                "M" => grid.beam_width = values,
                "gen_len" => grid.generator_letters = values[0],
                other => {
                    return Err(InstanceError::Parse {
                        line: lineno + 1,
                        message: format!("unknown grid key {:?}", other),
                    })
                }
            }
        }
        Ok(grid)
    }

    pub fn to_text(&self) -> String {
        let join = |vs: &[u32]| {
            vs.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "N {}\nm {}\nn {}\nk {}\nl {}\nM {}\ngen_len {}\n",
            join(&self.strands),
            join(&self.generators),
            join(&self.secret_length),
            join(&self.equations),
            join(&self.word_length),
            join(&self.beam_width),
            self.generator_letters
        )
    }
}

/// Strand counts of the larger-N study.
pub fn sweep_strand_counts() -> Vec<u32> {
    vec![8, 10, 12, 14, 16, 20, 24, 28, 32, 36, 40, 50, 60, 70, 80, 96, 100]
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a per-trial seed by chaining the cell parameters and trial index
/// through a splitmix64 mixer. Keyed by the parameter values themselves, so
/// adding cells to a grid never shifts the randomness of existing cells.
pub fn derive_trial_seed(master: u64, params: &ExperimentParams, variant_tag: u8, trial: u32) -> u64 {
    let mut h = splitmix64(master);
    for v in [
        params.strands as u64,
        params.generators as u64,
        params.secret_length as u64,
        params.equations as u64,
        params.word_length as u64,
        params.beam_width as u64,
        params.generator_letters as u64,
        variant_tag as u64,
        trial as u64,
    ] {
        h = splitmix64(h ^ v);
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceError {
    Parse { line: usize, message: String },
    Braid(BraidError),
    System(String),
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::Parse { line, message } => write!(f, "line {}: {}", line, message),
            InstanceError::Braid(e) => write!(f, "{}", e),
            InstanceError::System(msg) => write!(f, "{}", msg),
        }
    }
}

impl std::error::Error for InstanceError {}

impl From<BraidError> for InstanceError {
    fn from(e: BraidError) -> Self {
        InstanceError::Braid(e)
    }
}

impl From<SolveError> for InstanceError {
    fn from(e: SolveError) -> Self {
        InstanceError::System(e.to_string())
    }
}

/// Renders an instance in the line-oriented text format:
///
/// ```text
/// strands 8
/// seed 42
/// gen 1 -2 ...      (one line per subgroup generator)
/// eq 1 2 -3 ...     (the b word; p/w lines attach to the preceding eq)
/// p 1 2
/// w 2 -1
/// truth 1 -2 1      (signed subgroup letters, multiplication order)
/// ```
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    out.push_str(&format!("strands {}\n", instance.system.strands()));
    if let Some(seed) = instance.seed {
        out.push_str(&format!("seed {}\n", seed));
    }
    for g in instance.system.generators() {
        out.push_str(&format!("gen {}\n", g.word));
    }
    for eq in instance.system.equations() {
        out.push_str(&format!("eq {}\n", eq.b_word));
        if let Some(p) = &eq.prefix_word {
            out.push_str(&format!("p {}\n", p));
        }
        if let Some(w) = &eq.w_hint {
            out.push_str(&format!("w {}\n", w));
        }
    }
    if let Some(truth) = &instance.truth {
        let rendered: Vec<String> = truth.iter().map(|l| l.to_signed().to_string()).collect();
        out.push_str(&format!("truth {}\n", rendered.join(" ")));
    }
    out
}

pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut strands: Option<u32> = None;
    let mut seed: Option<u64> = None;
    let mut gens: Vec<BraidWord> = Vec::new();
    let mut equations: Vec<(BraidWord, Option<BraidWord>, Option<BraidWord>)> = Vec::new();
    let mut truth: Option<Vec<GenLetter>> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        let err = |message: String| InstanceError::Parse {
            line: lineno + 1,
            message,
        };
        match key {
            "strands" => {
                strands =
                    Some(rest.parse().map_err(|_| err(format!("bad strand count {:?}", rest)))?)
            }
            "seed" => {
                seed = Some(rest.parse().map_err(|_| err(format!("bad seed {:?}", rest)))?)
            }
            "gen" | "eq" | "p" | "w" => {
                let n = strands.ok_or_else(|| err("strands must come first".into()))?;
                let word = BraidWord::parse(rest, n)?;
                match key {
                    "gen" => gens.push(word),
                    "eq" => equations.push((word, None, None)),
                    "p" => {
                        let eq = equations
                            .last_mut()
                            .ok_or_else(|| err("p line before any eq".into()))?;
                        eq.1 = Some(word);
                    }
                    _ => {
                        let eq = equations
                            .last_mut()
                            .ok_or_else(|| err("w line before any eq".into()))?;
                        eq.2 = Some(word);
                    }
                }
            }
            "truth" => {
                let mut letters = Vec::new();
                for token in rest.split_whitespace() {
                    let v: i64 = token
                        .parse()
                        .map_err(|_| err(format!("bad truth letter {:?}", token)))?;
                    letters.push(
                        GenLetter::from_signed(v)
                            .ok_or_else(|| err(format!("bad truth letter {:?}", token)))?,
                    );
                }
                truth = Some(letters);
            }
            other => return Err(err(format!("unknown key {:?}", other))),
        }
    }
    let strands = strands.ok_or(InstanceError::Parse {
        line: 0,
        message: "missing strands line".into(),
    })?;
    let system = EquationSystem::new(strands, gens, equations)?;
    if let Some(truth) = &truth {
        let m = system.generator_count();
        for l in truth {
            if l.gen as usize > m {
                return Err(InstanceError::System(format!(
                    "truth letter {} exceeds generator count {}",
                    l.to_signed(),
                    m
                )));
            }
        }
    }
    Ok(Instance {
        system,
        truth,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::length::rg_length;
    use crate::normal::GarsideNormalForm;

    #[test]
    fn two_strand_words_only_use_sigma_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = random_artin_word(2, 50, &mut rng);
        assert!(w.letters().iter().all(|&e| e.abs() == 1));
    }

    #[test]
    fn subgroup_generators_have_requested_length() {
        let params = ExperimentParams::new(8, 4, 16, 1, 4, 16).with_seed(9);
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let gens = random_subgroup(&params, &mut rng);
        assert_eq!(gens.len(), 4);
        for g in &gens {
            assert_eq!(g.len(), 10);
            assert!(g.letters().iter().all(|&e| e.unsigned_abs() <= 7));
        }
    }

    #[test]
    fn fixed_seed_reproduces_generators() {
        let params = ExperimentParams::new(8, 3, 16, 2, 4, 16).with_seed(42);
        let mut a = ChaCha8Rng::seed_from_u64(params.seed);
        let mut b = ChaCha8Rng::seed_from_u64(params.seed);
        assert_eq!(random_subgroup(&params, &mut a), random_subgroup(&params, &mut b));
        let one = random_instance(&params);
        let two = random_instance(&params);
        assert_eq!(write_instance(&one), write_instance(&two));
    }

    #[test]
    fn letter_distribution_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut counts = [0u32; 14];
        let draws = 10_000;
        let w = random_artin_word(8, draws, &mut rng);
        for &e in w.letters() {
            let idx = (e.unsigned_abs() as usize - 1) * 2 + if e > 0 { 0 } else { 1 };
            counts[idx] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 1.0 / 14.0).abs() <= 0.01, "freq {}", freq);
        }
    }

    #[test]
    fn zero_length_secret_gives_b_equal_w() {
        let params = ExperimentParams::new(8, 2, 0, 1, 4, 4).with_seed(3);
        let inst = random_instance(&params);
        assert_eq!(inst.truth.as_deref(), Some(&[][..]));
        let eq = &inst.system.equations()[0];
        assert_eq!(
            eq.b,
            GarsideNormalForm::from_word(eq.w_hint.as_ref().unwrap())
        );
    }

    #[test]
    fn membership_instance_has_empty_w() {
        let params = ExperimentParams::new(8, 2, 4, 1, 0, 4).with_seed(3);
        let inst = random_membership_instance(&params);
        assert_eq!(inst.system.equation_count(), 1);
        let truth = inst.truth.unwrap();
        let expanded = expand_letters(
            &truth,
            &inst
                .system
                .generators()
                .iter()
                .map(|g| g.word.clone())
                .collect::<Vec<_>>(),
        );
        assert_eq!(inst.system.equations()[0].b, GarsideNormalForm::from_word(&expanded));
    }

    #[test]
    fn conjugacy_instance_conjugates_prefix() {
        let params = ExperimentParams::new(8, 2, 3, 1, 4, 4).with_seed(11);
        let inst = random_conjugacy_instance(&params);
        let eq = &inst.system.equations()[0];
        let p = eq.prefix.as_ref().unwrap();
        let gens: Vec<BraidWord> = inst
            .system
            .generators()
            .iter()
            .map(|g| g.word.clone())
            .collect();
        let x = GarsideNormalForm::from_word(&expand_letters(&inst.truth.unwrap(), &gens));
        let expect = x
            .multiply(p)
            .unwrap()
            .multiply(&x.inverse())
            .unwrap();
        assert_eq!(eq.b, expect);
    }

    #[test]
    fn parametric_instance_prefixes_w() {
        let params = ExperimentParams::new(8, 2, 4, 2, 4, 4).with_seed(17);
        let inst = random_parametric_instance(&params);
        for eq in inst.system.equations() {
            // Each W begins with its prefix: P⁻¹W cancels exactly to the
            // two-letter suffix, i.e. a word of half the expanded length.
            let p = eq.prefix_word.as_ref().unwrap();
            let w = eq.w_hint.as_ref().unwrap();
            assert_eq!(p.len() * 2, w.len());
            let suffix_word =
                BraidWord::new(params.strands, w.letters()[p.len()..].to_vec()).unwrap();
            let cancelled = GarsideNormalForm::from_word(
                &p.inverse().concat(w).unwrap(),
            );
            assert_eq!(cancelled, GarsideNormalForm::from_word(&suffix_word));
        }
    }

    #[test]
    fn full_grid_has_648_cells() {
        let cells = GridSpec::full_grid().cells();
        assert_eq!(cells.len(), 648);
        // Deterministic order: first cell is the smallest in every
        // coordinate, last the largest.
        assert_eq!(cells[0].cell_key(), (8, 2, 16, 1, 4, 2));
        assert_eq!(cells[647].cell_key(), (8, 8, 64, 8, 8, 512));
    }

    #[test]
    fn sub_grid_of_one_cell() {
        let grid = GridSpec::parse("m 2\nn 16\nk 1\nl 4\nM 16\nN 8\n").unwrap();
        let cells = grid.cells();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].cell_key(), (8, 2, 16, 1, 4, 16));
    }

    #[test]
    fn strand_sweep_has_17_cells() {
        let cells = GridSpec::strand_sweep(2, 16, 8, 8, 2).cells();
        assert_eq!(cells.len(), 17);
        assert_eq!(cells[0].strands, 8);
        assert_eq!(cells[16].strands, 100);
    }

    #[test]
    fn grid_text_round_trips() {
        let grid = GridSpec::full_grid();
        assert_eq!(GridSpec::parse(&grid.to_text()).unwrap(), grid);
        assert!(GridSpec::parse("q 1\n").is_err());
        assert!(GridSpec::parse("m\n").is_err());
    }

    #[test]
    fn trial_seeds_differ_between_cells_and_trials() {
        let a = ExperimentParams::new(8, 2, 16, 1, 4, 16);
        let b = ExperimentParams::new(8, 2, 16, 1, 4, 32);
        let s1 = derive_trial_seed(1, &a, 0, 0);
        let s2 = derive_trial_seed(1, &a, 0, 1);
        let s3 = derive_trial_seed(1, &b, 0, 0);
        let s4 = derive_trial_seed(2, &a, 0, 0);
        let s5 = derive_trial_seed(1, &a, 1, 0);
        assert_eq!(s1, derive_trial_seed(1, &a, 0, 0));
        assert!(s1 != s2 && s1 != s3 && s1 != s4 && s1 != s5);
    }

    #[test]
    fn instance_file_round_trips_and_lengths_match() {
        let params = ExperimentParams::new(8, 8, 16, 8, 8, 4).with_seed(1234);
        let inst = random_instance(&params);
        let text = write_instance(&inst);
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(write_instance(&parsed), text);
        let total: u64 = inst
            .system
            .equations()
            .iter()
            .map(|eq| rg_length(&eq.b))
            .sum();
        let reparsed: u64 = parsed
            .system
            .equations()
            .iter()
            .map(|eq| rg_length(&eq.b))
            .sum();
        assert_eq!(total, reparsed);
        assert_eq!(parsed.truth, inst.truth);
        assert_eq!(parsed.seed, Some(1234));
    }

    #[test]
    fn parse_instance_reports_errors() {
        assert!(parse_instance("gen 1 2\n").is_err());
        assert!(parse_instance("strands 4\np 1\n").is_err());
        assert!(parse_instance("strands 4\ngen 1\neq 9\n").is_err());
        assert!(parse_instance("strands 4\ngen 1\neq 1\ntruth 5\n").is_err());
    }
}
