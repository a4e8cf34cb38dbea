//! Seeded verification suites over the walk lemmas. Reports are ordered by
//! pair index and carry no timings, so equal configurations give equal bytes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::csequence::{CSequence, CanonicalLadder, FiniteSuccessor, TableCSequence};
use crate::ordinal::Ordinal;
use crate::walks::lemmas::{check_coherence_samples, check_walk, Lemma, LemmaViolation};
use crate::{GENERATOR, SCHEMA};

/// Cap on violation records kept in a report.
pub const MAX_RECORDS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport<C> {
    pub schema: String,
    pub generator: String,
    pub suite: String,
    pub config: C,
    /// Walks or `(β, δ, α)` triples checked.
    pub checked: u64,
    pub violation_count: u64,
    pub violations: Vec<LemmaViolation>,
    pub truncated: bool,
}

impl<C> SuiteReport<C> {
    fn new(suite: &str, config: C, checked: u64, mut violations: Vec<LemmaViolation>) -> Self {
        let violation_count = violations.len() as u64;
        let truncated = violations.len() > MAX_RECORDS;
        violations.truncate(MAX_RECORDS);
        Self {
            schema: SCHEMA.to_string(),
            generator: GENERATOR.to_string(),
            suite: suite.to_string(),
            config,
            checked,
            violation_count,
            violations,
            truncated,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkLemmaConfig {
    /// Size of the finite-successor model.
    pub n: usize,
    /// Number of random explicit tables.
    pub tables: u64,
    pub table_n: usize,
    /// Probability that a point below `α - 1` joins `e_α`.
    pub density: f64,
    pub seed: u64,
}

impl Default for WalkLemmaConfig {
    fn default() -> Self {
        Self {
            n: 64,
            tables: 200,
            table_n: 32,
            density: 0.3,
            seed: 7,
        }
    }
}

/// The labelling used by the walk suites: spreads points over a few labels
/// so the label identity is not trivially the step identity.
fn spread(x: &usize) -> usize {
    x * 7 % 11
}

fn provider_violations<C: CSequence<Point = usize>>(cs: &C, n: usize, origin: &str) -> Vec<LemmaViolation> {
    let sample: Vec<usize> = (0..n).collect();
    cs.validate(&sample)
        .violations
        .into_iter()
        .map(|v| LemmaViolation {
            lemma: Lemma::Provider,
            beta: v.point.clone(),
            alpha: String::new(),
            detail: format!("{origin}: {}: {}", v.kind, v.detail),
        })
        .collect()
}

/// Every pair `0 < α < β < n` of one model, rows in parallel.
fn all_pairs<C: CSequence<Point = usize>>(cs: &C, n: usize) -> (u64, Vec<LemmaViolation>) {
    let rows: Vec<Vec<LemmaViolation>> = (2..n)
        .into_par_iter()
        .map(|beta| {
            (1..beta)
                .flat_map(|alpha| check_walk(cs, spread, &beta, &alpha))
                .collect()
        })
        .collect();
    let pairs = (n.saturating_sub(1) * n.saturating_sub(2) / 2) as u64;
    (pairs, rows.into_iter().flatten().collect())
}

/// The step, descent, minimality, decomposition and label-length lemmas on
/// every pair of the finite-successor model, of `tables` seeded random
/// tables, and of each table in `extra`.
pub fn walk_lemmas(config: &WalkLemmaConfig, extra: &[TableCSequence]) -> SuiteReport<WalkLemmaConfig> {
    let mut checked = 0;
    let mut violations = Vec::new();

    let cs = FiniteSuccessor::new(config.n);
    violations.extend(provider_violations(&cs, config.n, "finite-successor"));
    let (c, v) = all_pairs(&cs, config.n);
    checked += c;
    violations.extend(v);

    let tables: Vec<(String, TableCSequence)> = (0..config.tables)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(t);
            (
                format!("table {t}"),
                TableCSequence::random(config.table_n, config.density, &mut rng),
            )
        })
        .chain(
            extra
                .iter()
                .enumerate()
                .map(|(i, t)| (format!("input table {i}"), t.clone())),
        )
        .collect();
    for (origin, table) in &tables {
        violations.extend(provider_violations(table, table.size(), origin));
        let (c, v) = all_pairs(table, table.size());
        checked += c;
        violations.extend(v.into_iter().map(|mut x| {
            x.detail = format!("{origin}: {}", x.detail);
            x
        }));
    }
    SuiteReport::new("walk-lemmas", *config, checked, violations)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherenceConfig {
    /// Number of `(β, δ)` pairs.
    pub pairs: u64,
    /// Sampled `α` per pair.
    pub alphas: usize,
    /// Largest exponent plus one: ordinals are drawn below `ω^degree`.
    pub degree: u64,
    /// Largest coefficient drawn.
    pub max_coefficient: u64,
    pub seed: u64,
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        Self {
            pairs: 1000,
            alphas: 50,
            degree: 4,
            max_coefficient: 3,
            seed: 7,
        }
    }
}

/// A random ordinal below `ω^degree`; `limit` forces a zero constant term.
fn random_ordinal<R: Rng + ?Sized>(config: &CoherenceConfig, limit: bool, rng: &mut R) -> Ordinal {
    let terms: Vec<(Ordinal, u64)> = (0..config.degree)
        .rev()
        .filter_map(|e| {
            let c = if e == 0 && limit {
                0
            } else {
                rng.random_range(0..=config.max_coefficient)
            };
            (c > 0).then(|| (Ordinal::from_nat(e), c))
        })
        .collect();
    Ordinal::from_terms(terms).expect("decreasing exponents")
}

/// A random pair `δ < β` with `δ` a limit.
fn random_pair<R: Rng + ?Sized>(config: &CoherenceConfig, rng: &mut R) -> (Ordinal, Ordinal) {
    loop {
        let beta = random_ordinal(config, false, rng);
        let delta = random_ordinal(config, true, rng);
        if delta.is_limit() && delta < beta {
            return (beta, delta);
        }
    }
}

/// `count` samples from `[lo, δ)`: near `lo`, near points of the ladder of
/// `δ`, and arbitrary ordinals, all rejected unless inside the interval.
fn sample_alphas<R: Rng + ?Sized>(
    config: &CoherenceConfig,
    lo: &Ordinal,
    delta: &Ordinal,
    count: usize,
    rng: &mut R,
) -> Vec<Ordinal> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 200 * count {
        attempts += 1;
        let t = Ordinal::from_nat(rng.random_range(0..8));
        let candidate = match rng.random_range(0..3) {
            0 => lo.add(&t),
            1 => delta
                .fundamental(rng.random_range(0..12))
                .expect("δ is a limit")
                .add(&t),
            _ => random_ordinal(config, false, rng),
        };
        if candidate >= *lo && candidate < *delta && !candidate.is_zero() {
            out.push(candidate);
        }
    }
    out
}

/// The coherence clauses on seeded pairs `δ < β` below `ω^degree` with
/// sampled `α ∈ [α₀, δ)`; labels are the identity.
pub fn coherence(config: &CoherenceConfig) -> SuiteReport<CoherenceConfig> {
    let bound = Ordinal::omega_pow(Ordinal::from_nat(config.degree));
    let cs = CanonicalLadder::new(Some(bound));
    let results: Vec<(u64, Vec<LemmaViolation>)> = (0..config.pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(k);
            let (beta, delta) = random_pair(config, &mut rng);
            let threshold = crate::walks::coherence_threshold(&cs, &beta, &delta);
            let lo = match threshold {
                Ok(t) => t,
                Err(e) => {
                    let v = LemmaViolation {
                        lemma: Lemma::Provider,
                        beta: beta.to_string(),
                        alpha: delta.to_string(),
                        detail: e.to_string(),
                    };
                    return (0, vec![v]);
                }
            };
            let alphas = sample_alphas(config, &lo, &delta, config.alphas, &mut rng);
            let (_, checked, violations) = check_coherence_samples(&cs, Ordinal::clone, &beta, &delta, &alphas);
            (checked as u64, violations)
        })
        .collect();
    let checked = results.iter().map(|r| r.0).sum();
    let violations = results.into_iter().flat_map(|r| r.1).collect();
    SuiteReport::new("coherence", *config, checked, violations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_walk_suite_is_clean() {
        let config = WalkLemmaConfig {
            n: 16,
            tables: 5,
            table_n: 12,
            ..WalkLemmaConfig::default()
        };
        let r = walk_lemmas(&config, &[]);
        assert!(r.is_clean(), "{:?}", r.violations);
        assert_eq!(r.checked, 105 + 5 * 55);
    }

    #[test]
    fn corrupted_table_is_reported() {
        let bad = TableCSequence::new(vec![vec![], vec![0], vec![0], vec![1]]);
        let config = WalkLemmaConfig {
            n: 4,
            tables: 0,
            ..WalkLemmaConfig::default()
        };
        let r = walk_lemmas(&config, &[bad]);
        assert!(!r.is_clean());
        assert!(r.violations.iter().all(|v| v.lemma == Lemma::Provider));
    }

    #[test]
    fn small_coherence_suite_is_clean_and_reproducible() {
        let config = CoherenceConfig {
            pairs: 40,
            alphas: 10,
            ..CoherenceConfig::default()
        };
        let r = coherence(&config);
        assert!(r.is_clean(), "{:?}", r.violations);
        assert!(r.checked >= 300, "only {} checks", r.checked);
        assert_eq!(r, coherence(&config));
    }

    #[test]
    fn sampled_alphas_stay_in_range() {
        let config = CoherenceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lo: Ordinal = "w*2+3".parse().unwrap();
        let delta: Ordinal = "w^2".parse().unwrap();
        let alphas = sample_alphas(&config, &lo, &delta, 50, &mut rng);
        assert_eq!(alphas.len(), 50);
        assert!(alphas.iter().all(|a| *a >= lo && *a < delta));
    }
}
