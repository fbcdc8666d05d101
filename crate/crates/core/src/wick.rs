//! Wick contractions of bath operator strings and a brute-force
//! truncated-Fock-space oracle for the same thermal averages.

use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::bath::{BathCorrelation, Beta, Mode};
use crate::error::{invalid, Error, Result};
use crate::system::Channel;

/// Longest string accepted by [`wick_contraction_sum`] by default.
pub const DEFAULT_MAX_LENGTH: usize = 12;

/// Largest Fock-space dimension accepted by the brute-force oracle by default.
pub const DEFAULT_DIMENSION_LIMIT: usize = 4096;

/// Largest population allowed at the truncation level.
pub const DEFAULT_TRUNCATION_THRESHOLD: f64 = 1e-8;

/// `B(t)` for [`Channel::Lower`], `B^dagger(t)` for [`Channel::Raise`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Token {
    pub channel: Channel,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OperatorString {
    pub tokens: Vec<Token>,
}

impl OperatorString {
    pub fn new(tokens: Vec<Token>) -> Result<Self> {
        if let Some(t) = tokens.iter().find(|t| !t.time.is_finite()) {
            return Err(invalid(format!(
                "operator time must be finite, got {}",
                t.time
            )));
        }
        Ok(Self { tokens })
    }

    /// Builds a string from `(label, time)` pairs, label 1 for `B`, 2 for `B^dagger`.
    pub fn from_labels(items: &[(u8, f64)]) -> Result<Self> {
        let tokens = items
            .iter()
            .map(|&(label, time)| {
                Channel::from_label(label)
                    .map(|channel| Token { channel, time })
                    .ok_or_else(|| invalid(format!("channel label must be 1 or 2, got {label}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(tokens)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// `(n - 1)!!` for even `n`, zero for odd `n`.
pub fn matching_count(n: usize) -> u64 {
    if n % 2 == 1 {
        return 0;
    }
    (1..n as u64).step_by(2).product()
}

/// All perfect matchings of `0..n`, each pairing the first unpaired position.
pub fn perfect_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn recurse(
        free: &mut Vec<usize>,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if free.is_empty() {
            out.push(current.clone());
            return;
        }
        let first = free.remove(0);
        for k in 0..free.len() {
            let partner = free.remove(k);
            current.push((first, partner));
            recurse(free, current, out);
            current.pop();
            free.insert(k, partner);
        }
        free.insert(0, first);
    }
    let mut out = Vec::new();
    if n % 2 == 1 {
        return out;
    }
    recurse(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

/// Sum over pairings of products of two-point functions, each pair taken in
/// string order.
pub fn wick_contraction_sum(s: &OperatorString, corr: &BathCorrelation) -> Result<C64> {
    wick_contraction_sum_with_limit(s, corr, DEFAULT_MAX_LENGTH)
}

pub fn wick_contraction_sum_with_limit(
    s: &OperatorString,
    corr: &BathCorrelation,
    max_len: usize,
) -> Result<C64> {
    let n = s.len();
    if n > max_len {
        return Err(Error::Limit(format!(
            "operator string of length {n} exceeds limit {max_len}"
        )));
    }
    if n % 2 == 1 {
        return Ok(C64::new(0.0, 0.0));
    }
    // Pair values only depend on the two positions; tabulate them once.
    let mut table = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (s.tokens[i], s.tokens[j]);
            table[i * n + j] = corr.time(a.channel, b.channel, a.time - b.time);
        }
    }
    let matchings = perfect_matchings(n);
    debug_assert_eq!(matchings.len() as u64, matching_count(n));
    Ok(matchings
        .iter()
        .map(|m| m.iter().map(|&(i, j)| table[i * n + j]).product::<C64>())
        .sum())
}

/// Truncated Fock space of independent bath modes in a thermal state.
#[derive(Debug, Clone)]
pub struct FockOracle {
    modes: Vec<Mode>,
    n_max: usize,
    beta: Beta,
    dimension_limit: usize,
    truncation_threshold: f64,
}

impl FockOracle {
    pub fn new(modes: Vec<Mode>, n_max: usize, beta: Beta) -> Result<Self> {
        if n_max < 2 {
            return Err(invalid(format!(
                "photon cutoff must be at least 2, got {n_max}"
            )));
        }
        if modes.is_empty() {
            return Err(invalid("oracle needs at least one mode"));
        }
        beta.validate()?;
        for m in &modes {
            if !(m.omega > 0.0) || !m.lambda.is_finite() {
                return Err(invalid(format!("invalid mode ({}, {})", m.lambda, m.omega)));
            }
        }
        Ok(Self {
            modes,
            n_max,
            beta,
            dimension_limit: DEFAULT_DIMENSION_LIMIT,
            truncation_threshold: DEFAULT_TRUNCATION_THRESHOLD,
        })
    }

    pub fn with_dimension_limit(mut self, limit: usize) -> Self {
        self.dimension_limit = limit;
        self
    }

    pub fn with_truncation_threshold(mut self, threshold: f64) -> Self {
        self.truncation_threshold = threshold;
        self
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn dimension(&self) -> Option<usize> {
        (self.n_max + 1).checked_pow(self.modes.len() as u32)
    }

    /// Normalized thermal populations of one mode on levels `0..=n_max`.
    fn populations(&self, omega: f64) -> Vec<f64> {
        let levels = self.n_max + 1;
        match self.beta {
            Beta::Infinite => {
                let mut p = vec![0.0; levels];
                p[0] = 1.0;
                p
            }
            Beta::Finite(b) => {
                let w: Vec<f64> = (0..levels).map(|n| (-b * omega * n as f64).exp()).collect();
                let z: f64 = w.iter().sum();
                w.into_iter().map(|x| x / z).collect()
            }
        }
    }

    /// Largest population on the truncation level over all modes.
    pub fn truncation_error(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| self.populations(m.omega)[self.n_max])
            .fold(0.0, f64::max)
    }
}

/// Applies `B(t)` or `B^dagger(t)` to a sparse state in the product basis.
fn apply_token(
    state: &BTreeMap<usize, C64>,
    token: Token,
    modes: &[Mode],
    levels: usize,
) -> BTreeMap<usize, C64> {
    let mut out = BTreeMap::new();
    for (&index, &amp) in state {
        let mut stride = 1;
        for m in modes {
            let occ = (index / stride) % levels;
            match token.channel {
                Channel::Lower if occ > 0 => {
                    // b e^{-i W t}
                    let c = amp
                        * m.lambda
                        * (occ as f64).sqrt()
                        * C64::from_polar(1.0, -m.omega * token.time);
                    *out.entry(index - stride).or_insert(C64::new(0.0, 0.0)) += c;
                }
                Channel::Raise if occ + 1 < levels => {
                    // b^dagger e^{+i W t}
                    let c = amp
                        * m.lambda
                        * ((occ + 1) as f64).sqrt()
                        * C64::from_polar(1.0, m.omega * token.time);
                    *out.entry(index + stride).or_insert(C64::new(0.0, 0.0)) += c;
                }
                _ => {}
            }
            stride *= levels;
        }
    }
    out
}

/// `Tr[rho_B X_1 ... X_n]` on the truncated Fock space.
pub fn thermal_expectation_bruteforce(oracle: &FockOracle, s: &OperatorString) -> Result<C64> {
    let dim = oracle
        .dimension()
        .filter(|&d| d <= oracle.dimension_limit)
        .ok_or_else(|| {
            Error::Limit(format!(
                "Fock dimension {}^{} exceeds limit {}",
                oracle.n_max + 1,
                oracle.modes.len(),
                oracle.dimension_limit
            ))
        })?;
    let trunc = oracle.truncation_error();
    if trunc > oracle.truncation_threshold {
        return Err(Error::Limit(format!(
            "truncation level population {trunc:.3e} exceeds {:.1e}; raise n_max",
            oracle.truncation_threshold
        )));
    }
    let levels = oracle.n_max + 1;
    let pops: Vec<Vec<f64>> = oracle
        .modes
        .iter()
        .map(|m| oracle.populations(m.omega))
        .collect();
    let mut total = C64::new(0.0, 0.0);
    for index in 0..dim {
        let mut weight = 1.0;
        let mut rest = index;
        for p in &pops {
            weight *= p[rest % levels];
            rest /= levels;
        }
        if weight == 0.0 {
            continue;
        }
        let mut state = BTreeMap::from([(index, C64::new(1.0, 0.0))]);
        for &token in s.tokens.iter().rev() {
            state = apply_token(&state, token, &oracle.modes, levels);
            if state.is_empty() {
                break;
            }
        }
        if let Some(&diag) = state.get(&index) {
            total += diag * weight;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthReport {
    pub length: usize,
    pub strings: usize,
    pub matchings: u64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WickReport {
    pub n_max: usize,
    pub truncation_error: f64,
    pub lengths: Vec<LengthReport>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct WickCheckOptions {
    pub strings_per_length: usize,
    pub time_span: f64,
    pub seed: u64,
}

impl Default for WickCheckOptions {
    fn default() -> Self {
        Self {
            strings_per_length: 8,
            time_span: 2.0,
            seed: 0x5eed,
        }
    }
}

/// Random string with equal numbers of `B` and `B^dagger` in random order.
pub fn random_balanced_string(rng: &mut impl Rng, length: usize, time_span: f64) -> OperatorString {
    let mut channels: Vec<Channel> = (0..length)
        .map(|k| {
            if k < length / 2 {
                Channel::Lower
            } else {
                Channel::Raise
            }
        })
        .collect();
    channels.shuffle(rng);
    OperatorString {
        tokens: channels
            .into_iter()
            .map(|channel| Token {
                channel,
                time: rng.gen_range(0.0..time_span),
            })
            .collect(),
    }
}

/// Compares both evaluations on random strings of every even length up to `max_n`.
pub fn verify_wick(
    oracle: &FockOracle,
    corr: &BathCorrelation,
    max_n: usize,
) -> Result<WickReport> {
    verify_wick_with(oracle, corr, max_n, WickCheckOptions::default())
}

pub fn verify_wick_with(
    oracle: &FockOracle,
    corr: &BathCorrelation,
    max_n: usize,
    opts: WickCheckOptions,
) -> Result<WickReport> {
    if max_n > 8 || max_n % 2 == 1 || max_n == 0 {
        return Err(invalid(format!("max_n must be 2, 4, 6 or 8, got {max_n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    // Scale of a pair contraction, used to floor the relative deviation.
    let pair_scale: f64 = oracle
        .modes
        .iter()
        .map(|m| {
            let n = match oracle.beta {
                Beta::Infinite => 0.0,
                Beta::Finite(b) => 1.0 / (b * m.omega).exp_m1(),
            };
            m.lambda * m.lambda * (1.0 + n)
        })
        .sum();
    let mut lengths = Vec::new();
    for length in (2..=max_n).step_by(2) {
        let floor = 1e-14 * pair_scale.powi(length as i32 / 2);
        let mut worst = 0.0f64;
        for _ in 0..opts.strings_per_length {
            let s = random_balanced_string(&mut rng, length, opts.time_span);
            let brute = thermal_expectation_bruteforce(oracle, &s)?;
            let wick = wick_contraction_sum(&s, corr)?;
            worst = worst.max((brute - wick).norm() / (brute.norm() + floor));
        }
        lengths.push(LengthReport {
            length,
            strings: opts.strings_per_length,
            matchings: matching_count(length),
            max_deviation: worst,
        });
    }
    let max_deviation = lengths.iter().map(|l| l.max_deviation).fold(0.0, f64::max);
    Ok(WickReport {
        n_max: oracle.n_max,
        truncation_error: oracle.truncation_error(),
        lengths,
        max_deviation,
    })
}
