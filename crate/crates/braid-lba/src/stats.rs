//! The logistic success model: the built-in fitted constants, fresh fitting
//! from experiment data via iteratively reweighted least squares with Wald
//! significance filtering, and the closed-form memory and operation-count
//! estimates.
//!
//! Predictors are `x₁..x₅ = log₂(m, n, k, l, M)`; success probability is
//! `p = e^L/(1+e^L)` with `L` linear in the included predictors.

use std::fmt;

use crate::instance::ExperimentParams;

pub const PREDICTOR_NAMES: [&str; 6] = ["intercept", "x1", "x2", "x3", "x4", "x5"];

/// IRLS stops when the relative log-likelihood change drops below this.
const IRLS_TOLERANCE: f64 = 1e-8;
const IRLS_MAX_ITERATIONS: usize = 50;
/// Coefficients beyond this magnitude indicate (quasi-)separation.
const SEPARATION_BOUND: f64 = 30.0;
const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Slot 0 is the intercept, slots 1..=5 the coefficients of `x₁..x₅`.
/// Excluded predictors keep a zero coefficient; standard errors and
/// significance levels are `NaN` where unknown (e.g. the built-in model).
#[derive(Debug, Clone)]
pub struct LogisticModel {
    pub coefficients: [f64; 6],
    pub standard_errors: [f64; 6],
    pub significance: [f64; 6],
    pub included: [bool; 6],
}

impl LogisticModel {
    /// The published approximation
    /// `L ≈ 7.0814 − 1.7165·x₁ − 0.7547·x₂ + 0.1094·x₃ + 0.5437·x₅`,
    /// with `x₄` excluded as insignificant.
    pub fn published() -> Self {
        LogisticModel {
            coefficients: [7.0814, -1.7165, -0.7547, 0.1094, 0.0, 0.5437],
            standard_errors: [f64::NAN; 6],
            significance: [f64::NAN; 6],
            included: [true, true, true, true, false, true],
        }
    }

    pub fn linear_predictor(&self, params: &ExperimentParams) -> f64 {
        let x = predictors(params);
        let mut l = if self.included[0] {
            self.coefficients[0]
        } else {
            0.0
        };
        for i in 0..5 {
            if self.included[i + 1] {
                l += self.coefficients[i + 1] * x[i];
            }
        }
        l
    }

    /// One line per term: `term x1 coef -1.7165 se 0.0301 p 0.0000 included yes`.
    pub fn to_summary_text(&self) -> String {
        let fmt_opt = |v: f64| {
            if v.is_nan() {
                "-".to_string()
            } else {
                format!("{:.6}", v)
            }
        };
        let mut out = String::from("# logistic model: L = b0 + sum b_i * log2(param_i)\n");
        for i in 0..6 {
            out.push_str(&format!(
                "term {} coef {:.6} se {} p {} included {}\n",
                PREDICTOR_NAMES[i],
                self.coefficients[i],
                fmt_opt(self.standard_errors[i]),
                fmt_opt(self.significance[i]),
                if self.included[i] { "yes" } else { "no" }
            ));
        }
        out
    }

    pub fn parse_summary(text: &str) -> Result<Self, FitError> {
        let mut model = LogisticModel {
            coefficients: [0.0; 6],
            standard_errors: [f64::NAN; 6],
            significance: [f64::NAN; 6],
            included: [false; 6],
        };
        let mut seen = [false; 6];
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 10 || tokens[0] != "term" {
                return Err(FitError::BadModelText(line.to_string()));
            }
            let idx = PREDICTOR_NAMES
                .iter()
                .position(|&n| n == tokens[1])
                .ok_or_else(|| FitError::BadModelText(line.to_string()))?;
            let parse_opt = |t: &str| -> Result<f64, FitError> {
                if t == "-" {
                    Ok(f64::NAN)
                } else {
                    t.parse().map_err(|_| FitError::BadModelText(line.to_string()))
                }
            };
            model.coefficients[idx] = parse_opt(tokens[3])?;
            model.standard_errors[idx] = parse_opt(tokens[5])?;
            model.significance[idx] = parse_opt(tokens[7])?;
            model.included[idx] = tokens[9] == "yes";
            seen[idx] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(FitError::BadModelText("missing term lines".into()));
        }
        Ok(model)
    }
}

fn predictors(params: &ExperimentParams) -> [f64; 5] {
    // Zero parameters (membership rows have l = 0) are clamped to 1 so the
    // logs stay finite; such degenerate columns carry no information anyway.
    let log2 = |v: u32| (v.max(1) as f64).log2();
    [
        log2(params.generators),
        log2(params.secret_length),
        log2(params.equations),
        log2(params.word_length),
        log2(params.beam_width),
    ]
}

/// Success probability `e^L/(1+e^L)` under the model.
pub fn predict_success(model: &LogisticModel, params: &ExperimentParams) -> f64 {
    sigmoid(model.linear_predictor(params))
}

/// Prediction from raw predictor values `x₁..x₅ = log₂(m,n,k,l,M)`; lets
/// plots sample the curves at fractional parameters.
pub fn predict_from_log2(model: &LogisticModel, x: [f64; 5]) -> f64 {
    let mut l = if model.included[0] {
        model.coefficients[0]
    } else {
        0.0
    };
    for i in 0..5 {
        if model.included[i + 1] {
            l += model.coefficients[i + 1] * x[i];
        }
    }
    sigmoid(l)
}

fn sigmoid(l: f64) -> f64 {
    1.0 / (1.0 + (-l).exp())
}

/// The published closed form for the memory reaching success probability
/// one half: `M ≈ 0.00012·m^3.16·n^1.39/k^0.2`.
pub fn required_memory(m: u32, n: u32, k: u32) -> f64 {
    0.00012 * (m as f64).powf(3.16) * (n as f64).powf(1.39) / (k as f64).powf(0.2)
}

/// `required_memory` with the reporting floor of `M = 1`.
pub fn required_memory_floored(m: u32, n: u32, k: u32) -> u64 {
    required_memory(m, n, k).max(1.0).round() as u64
}

/// Factor by which the memory must grow when `m` doubles while holding the
/// predicted success fixed: `2^(1.7165/0.5437) ≈ 8.92`.
pub fn memory_doubling_factor() -> f64 {
    2f64.powf(1.7165 / 0.5437)
}

/// Closed-form operation counts for an `n`-step run: the pair
/// `(n(n+4m+1)kM/2, 2kmnM)` of group multiplications and length-function
/// evaluations.
pub fn multiplication_count(n: u64, m: u64, k: u64, beam_width: u64) -> (u64, u64) {
    let mults = n * (n + 4 * m + 1) * k * beam_width / 2;
    let evals = 2 * k * m * n * beam_width;
    (mults, evals)
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitError {
    /// Fewer than two distinct outcomes: the likelihood has no maximum.
    Separation,
    /// The weighted design matrix is singular on the included predictors.
    RankDeficient,
    TooFewRows { rows: usize },
    BadModelText(String),
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::Separation => write!(f, "separation: maximum likelihood does not exist"),
            FitError::RankDeficient => write!(f, "design matrix is rank deficient"),
            FitError::TooFewRows { rows } => write!(f, "need more data rows, got {}", rows),
            FitError::BadModelText(line) => write!(f, "bad model summary line {:?}", line),
        }
    }
}

impl std::error::Error for FitError {}

/// Maximum-likelihood logistic fit with backward elimination: predictors
/// whose Wald significance exceeds 0.05 are dropped and the model refit
/// until all survivors are significant.
pub fn fit_logistic(rows: &[(ExperimentParams, bool)]) -> Result<LogisticModel, FitError> {
    if rows.len() < 8 {
        return Err(FitError::TooFewRows { rows: rows.len() });
    }
    let successes = rows.iter().filter(|(_, y)| *y).count();
    if successes == 0 || successes == rows.len() {
        return Err(FitError::Separation);
    }
    let xs: Vec<[f64; 5]> = rows.iter().map(|(p, _)| predictors(p)).collect();
    let ys: Vec<f64> = rows.iter().map(|(_, y)| if *y { 1.0 } else { 0.0 }).collect();

    let mut included = [true; 6];
    loop {
        let model = irls(&xs, &ys, &included)?;
        // Drop every insignificant predictor (never the intercept), refit.
        let mut dropped = false;
        for i in 1..6 {
            if included[i] && model.significance[i] > SIGNIFICANCE_LEVEL {
                included[i] = false;
                dropped = true;
            }
        }
        if !dropped {
            return Ok(model);
        }
    }
}

fn irls(xs: &[[f64; 5]], ys: &[f64], included: &[bool; 6]) -> Result<LogisticModel, FitError> {
    let cols: Vec<usize> = (0..6).filter(|&i| included[i]).collect();
    let p = cols.len();
    let row_of = |x: &[f64; 5]| -> Vec<f64> {
        cols.iter()
            .map(|&c| if c == 0 { 1.0 } else { x[c - 1] })
            .collect()
    };

    let mut beta = vec![0.0f64; p];
    let mut last_ll = f64::NEG_INFINITY;
    for _ in 0..IRLS_MAX_ITERATIONS {
        // Accumulate XᵀWX and XᵀWz for the working response z.
        let mut xtwx = vec![vec![0.0f64; p]; p];
        let mut xtwz = vec![0.0f64; p];
        let mut ll = 0.0f64;
        for (x, &y) in xs.iter().zip(ys) {
            let row = row_of(x);
            let eta: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let mu = sigmoid(eta);
            let w = (mu * (1.0 - mu)).max(1e-10);
            let z = eta + (y - mu) / w;
            for i in 0..p {
                for j in i..p {
                    xtwx[i][j] += w * row[i] * row[j];
                }
                xtwz[i] += w * row[i] * z;
            }
            let mu_c = mu.clamp(1e-12, 1.0 - 1e-12);
            ll += y * mu_c.ln() + (1.0 - y) * (1.0 - mu_c).ln();
        }
        for i in 0..p {
            for j in 0..i {
                xtwx[i][j] = xtwx[j][i];
            }
        }
        let next = solve_symmetric(&xtwx, &xtwz).ok_or(FitError::RankDeficient)?;
        beta = next;
        if beta.iter().any(|b| b.abs() > SEPARATION_BOUND) {
            return Err(FitError::Separation);
        }
        if ll.is_nan() {
            return Err(FitError::Separation);
        }
        if (ll - last_ll).abs() < IRLS_TOLERANCE * (ll.abs() + 1.0) {
            break;
        }
        last_ll = ll;
    }

    // Wald standard errors from the inverse of XᵀWX at the optimum.
    let mut xtwx = vec![vec![0.0f64; p]; p];
    for x in xs {
        let row = row_of(x);
        let eta: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
        let mu = sigmoid(eta);
        let w = (mu * (1.0 - mu)).max(1e-10);
        for i in 0..p {
            for j in i..p {
                xtwx[i][j] += w * row[i] * row[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            xtwx[i][j] = xtwx[j][i];
        }
    }
    let inv = invert(&xtwx).ok_or(FitError::RankDeficient)?;

    let mut model = LogisticModel {
        coefficients: [0.0; 6],
        standard_errors: [f64::NAN; 6],
        significance: [f64::NAN; 6],
        included: *included,
    };
    for (slot, &c) in cols.iter().enumerate() {
        let se = inv[slot][slot].max(0.0).sqrt();
        let z = beta[slot] / se;
        model.coefficients[c] = beta[slot];
        model.standard_errors[c] = se;
        model.significance[c] = 2.0 * (1.0 - normal_cdf(z.abs()));
    }
    Ok(model)
}

fn solve_symmetric(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let factor = m[row][col] / m[col][col];
                for k in col..=n {
                    let v = m[col][k];
                    m[row][k] -= factor * v;
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve_symmetric(a, &e)?);
    }
    // cols holds the columns of the inverse; transpose into rows.
    let mut inv = vec![vec![0.0; n]; n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    Some(inv)
}

/// Standard normal CDF via the Abramowitz–Stegun error-function
/// approximation (absolute error below 1.5e-7).
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}
