//! The index function `d` on finite labelled sequences.
//!
//! A sequence `ϱ` carries two value sequences `F₀(ϱ)` and `F₁(ϱ)`. A
//! *decomposition* splits `ϱ = η₀ ⌢ ν₀ ⌢ ρ ⌢ ν₁ ⌢ η₁` at points
//! `p₁ ≤ p₂ ≤ p₃ ≤ p₄` subject to four max-comparison clauses, and names the
//! position `p₁ + ℓ₄` inside `ν₀`. The value of `d(ϱ)` is that position,
//! provided all valid decompositions agree on it, and 0 when there are none.
//!
//! Three routes compute it:
//!
//! * [`d_by_enumeration`] tries every split tuple against
//!   [`valid_decomposition`]. This is the definition.
//! * [`structural_values`] derives the same set of positions in `O(n²)`
//!   from a closed description of which `p₂` admit a valid decomposition.
//!   Walk label sequences are too long to enumerate, so the colourings use it.
//! * [`d_direct`] is the single-pass extraction rule.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{GENERATOR, SCHEMA};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DError {
    #[error("F₀ has length {f0} but F₁ has length {f1}")]
    LengthMismatch { f0: usize, f1: usize },
    #[error("value {value} at position {position} is not below the bound {bound}")]
    OutOfBounds { position: usize, value: u64, bound: u64 },
    #[error("decompositions disagree: {} vs {}", .first.index, .second.index)]
    InconsistentDecompositions {
        first: Box<Decomposition>,
        second: Box<Decomposition>,
    },
}

/// A finite sequence seen through its two value sequences `F₀` and `F₁`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LabelledSeq {
    f0: Vec<u64>,
    f1: Vec<u64>,
}

impl LabelledSeq {
    pub fn new(f0: Vec<u64>, f1: Vec<u64>) -> Result<Self, DError> {
        if f0.len() != f1.len() {
            return Err(DError::LengthMismatch {
                f0: f0.len(),
                f1: f1.len(),
            });
        }
        Ok(Self { f0, f1 })
    }

    /// Like [`LabelledSeq::new`], also requiring `F₀ < κ₀` and `F₁ < κ₁`.
    pub fn with_bounds(f0: Vec<u64>, f1: Vec<u64>, kappa0: u64, kappa1: u64) -> Result<Self, DError> {
        let seq = Self::new(f0, f1)?;
        for (vals, bound) in [(&seq.f0, kappa0), (&seq.f1, kappa1)] {
            if let Some((position, &value)) = vals.iter().enumerate().find(|(_, &v)| v >= bound) {
                return Err(DError::OutOfBounds { position, value, bound });
            }
        }
        Ok(seq)
    }

    /// Maps each symbol of `symbols` through `f0` and `f1`.
    pub fn from_symbols<T>(symbols: &[T], f0: impl Fn(&T) -> u64, f1: impl Fn(&T) -> u64) -> Self {
        Self {
            f0: symbols.iter().map(&f0).collect(),
            f1: symbols.iter().map(&f1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.f0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0.is_empty()
    }

    pub fn f0(&self) -> &[u64] {
        &self.f0
    }

    pub fn f1(&self) -> &[u64] {
        &self.f1
    }

    /// Appends one element.
    pub fn push(&mut self, f0: u64, f1: u64) {
        self.f0.push(f0);
        self.f1.push(f1);
    }
}

/// A valid split `η₀ ⌢ ν₀ ⌢ ρ ⌢ ν₁ ⌢ η₁` with its derived indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decomposition {
    /// `[p₁, p₂, p₃, p₄]`: `ν₀ = [p₁,p₂)`, `ρ = [p₂,p₃)`, `ν₁ = [p₃,p₄)`.
    pub splits: [usize; 4],
    /// Position in `ν₀` of the first global `F₁`-maximum.
    pub l1: usize,
    /// Position in `ρ` of the first `F₀`-maximum of `ρ`.
    pub l2: usize,
    /// Position in `ν₁` of the first `F₁`-maximum of `ν₁`.
    pub l3: usize,
    /// The least `ℓ ∈ u` minimizing `F₁(ν₀(ℓ))`.
    pub l4: usize,
    /// `{ℓ < lg(ν₀) : ℓ ≥ ℓ₁, F₁(ν₀(ℓ)) ≥ F₁(ν₁(ℓ₃))}`.
    pub u: Vec<usize>,
    /// `p₁ + ℓ₄`.
    pub index: usize,
}

fn max_of<'a>(values: impl IntoIterator<Item = &'a u64>) -> Option<u64> {
    values.into_iter().copied().max()
}

fn first_index_of(values: &[u64], target: u64) -> Option<usize> {
    values.iter().position(|&v| v == target)
}

/// Checks one split tuple against every decomposition clause.
///
/// Intervals written `ϱ↾(a, n)` are open on the left: position `a` itself
/// is excluded. A maximum over an empty range makes its clause fail.
pub fn valid_decomposition(seq: &LabelledSeq, splits: [usize; 4]) -> Option<Decomposition> {
    let [p1, p2, p3, p4] = splits;
    let n = seq.len();
    if !(p1 <= p2 && p2 <= p3 && p3 <= p4 && p4 <= n) {
        return None;
    }
    let (f0, f1) = (&seq.f0, &seq.f1);

    // (a) the global F₁-maximum sits in ν₀ and nowhere else
    let global = max_of(f1)?;
    let nu0_max = max_of(&f1[p1..p2])?;
    let outside = max_of(f1[..p1].iter().chain(&f1[p2..]))?;
    if global != nu0_max || nu0_max <= outside {
        return None;
    }
    let l1 = first_index_of(&f1[p1..p2], global)?;
    let pos1 = p1 + l1;

    // (b) the F₀-maximum after pos1 sits in ρ, strictly above the rest of
    // ν₀ from ℓ₁ on, ν₁ and η₁
    let after1 = max_of(&f0[pos1 + 1..])?;
    let rho_max = max_of(&f0[p2..p3])?;
    let others = max_of(f0[pos1..p2].iter().chain(&f0[p3..]))?;
    if after1 != rho_max || rho_max <= others {
        return None;
    }
    let l2 = first_index_of(&f0[p2..p3], rho_max)?;
    let pos2 = p2 + l2;

    // (c) after pos2 the F₁-maximum is that of ν₁, below the one in ν₀
    let after2 = max_of(&f1[pos2 + 1..])?;
    let nu1_max = max_of(&f1[p3..p4])?;
    if nu0_max <= after2 || after2 != nu1_max {
        return None;
    }
    let l3 = first_index_of(&f1[p3..p4], nu1_max)?;

    // (d)
    let floor = f1[p3 + l3];
    let u: Vec<usize> = (l1..p2 - p1).filter(|&l| f1[p1 + l] >= floor).collect();
    let l4 = *u.iter().min_by_key(|&&l| (f1[p1 + l], l))?;

    Some(Decomposition {
        splits,
        l1,
        l2,
        l3,
        l4,
        u,
        index: p1 + l4,
    })
}

/// Every weakly increasing split tuple in `[0, n]`, in lexicographic order.
pub fn split_tuples(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..=n).flat_map(move |p1| {
        (p1..=n).flat_map(move |p2| (p2..=n).flat_map(move |p3| (p3..=n).map(move |p4| [p1, p2, p3, p4])))
    })
}

/// All valid decompositions, keyed by the index they produce; each key keeps
/// the first decomposition found in split-tuple order.
pub fn enumerate_decompositions(seq: &LabelledSeq) -> BTreeMap<usize, Decomposition> {
    let mut found = BTreeMap::new();
    for splits in split_tuples(seq.len()) {
        if let Some(d) = valid_decomposition(seq, splits) {
            found.entry(d.index).or_insert(d);
        }
    }
    found
}

/// `d(ϱ)` by exhaustive enumeration of split tuples: the common index of all
/// valid decompositions, or 0 when there is none.
pub fn d_by_enumeration(seq: &LabelledSeq) -> Result<usize, DError> {
    let mut first: Option<Decomposition> = None;
    for splits in split_tuples(seq.len()) {
        let Some(d) = valid_decomposition(seq, splits) else {
            continue;
        };
        match &first {
            None => first = Some(d),
            Some(f) if f.index == d.index => {}
            Some(f) => {
                return Err(DError::InconsistentDecompositions {
                    first: Box::new(f.clone()),
                    second: Box::new(d),
                })
            }
        }
    }
    Ok(first.map_or(0, |d| d.index))
}

/// The set of indices `p₁ + ℓ₄` over all valid decompositions, computed
/// without enumerating split tuples.
///
/// With `P₁` the first global `F₁`-maximum, `m₀` the `F₀`-maximum after it
/// (first and last attained at `P₂ ≤ Q₂`) and `m₁` the `F₁`-maximum after
/// `P₂`, a decomposition exists for a given `p₂` iff every `F₁`-maximum lies
/// before `p₂ ≤ P₂`, `F₀(P₁) < m₀`, and `m₁` is attained after `Q₂`. The index
/// then depends on `p₂` alone: the least position of minimal `F₁` among
/// `[P₁, p₂)` restricted to `F₁ ≥ m₁`.
pub fn structural_values(seq: &LabelledSeq) -> BTreeSet<usize> {
    let mut values = BTreeSet::new();
    let (f0, f1) = (&seq.f0, &seq.f1);
    let n = seq.len();
    let Some(global) = max_of(f1) else {
        return values;
    };
    let pos1 = first_index_of(f1, global).expect("max is attained");
    let last_max = f1.iter().rposition(|&v| v == global).expect("max is attained");
    let Some(m0) = max_of(&f0[pos1 + 1..]) else {
        return values;
    };
    if f0[pos1] >= m0 {
        return values;
    }
    let pos2 = pos1 + 1 + first_index_of(&f0[pos1 + 1..], m0).expect("max is attained");
    let last_m0 = f0.iter().rposition(|&v| v == m0).expect("max is attained");
    let Some(m1) = max_of(&f1[pos2 + 1..]) else {
        return values;
    };
    if !f1[last_m0 + 1..].contains(&m1) {
        return values;
    }
    // Sweep p₂ upward, tracking the least-F₁ candidate in [P₁, p₂).
    let mut best: Option<usize> = None;
    for p in pos1..n {
        if f1[p] >= m1 && best.is_none_or(|b| f1[p] < f1[b]) {
            best = Some(p);
        }
        let p2 = p + 1;
        if p2 > last_max && p2 <= pos2 {
            values.insert(best.expect("F₁(P₁) ≥ m₁"));
        }
    }
    values
}

/// The single-pass extraction rule: `P₁` the first global `F₁`-maximum, `P₂`
/// the first position after it attaining the `F₀`-maximum there, `m₁` the
/// `F₁`-maximum after `P₂`; returns the least position of minimal `F₁`
/// among `p ∈ [P₁, P₂)` with `F₁(p) ≥ m₁`, and 0 when a range is empty.
pub fn d_direct(seq: &LabelledSeq) -> usize {
    let (f0, f1) = (&seq.f0, &seq.f1);
    let Some(global) = max_of(f1) else {
        return 0;
    };
    let pos1 = first_index_of(f1, global).expect("max is attained");
    let Some(m0) = max_of(&f0[pos1 + 1..]) else {
        return 0;
    };
    let pos2 = pos1 + 1 + first_index_of(&f0[pos1 + 1..], m0).expect("max is attained");
    let Some(m1) = max_of(&f1[pos2 + 1..]) else {
        return 0;
    };
    (pos1..pos2)
        .filter(|&p| f1[p] >= m1)
        .min_by_key(|&p| (f1[p], p))
        .unwrap_or(0)
}

/// How an index was resolved by [`d_index`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status", content = "candidates")]
pub enum DStatus {
    /// Exactly one index over all valid decompositions.
    Unique,
    /// No valid decomposition; the index defaults to 0.
    Default,
    /// Valid decompositions disagree; the least candidate was taken.
    Conflict(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DIndex {
    pub value: usize,
    #[serde(flatten)]
    pub status: DStatus,
}

/// A total index for use inside colourings: the unique decomposition index,
/// 0 without decompositions, and the least candidate on disagreement.
pub fn d_index(seq: &LabelledSeq) -> DIndex {
    let values = structural_values(seq);
    match values.len() {
        0 => DIndex {
            value: 0,
            status: DStatus::Default,
        },
        1 => DIndex {
            value: *values.first().expect("one value"),
            status: DStatus::Unique,
        },
        _ => DIndex {
            value: *values.first().expect("values"),
            status: DStatus::Conflict(values.into_iter().collect()),
        },
    }
}

/// Which sequences a sweep visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SweepMode {
    /// Every sequence of length `0..=max_len` over `κ₀ × κ₁`.
    Exhaustive,
    /// `trials` sequences with uniformly random length and values.
    Random { seed: u64, trials: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kappa0: u64,
    pub kappa1: u64,
    pub max_len: usize,
    #[serde(flatten)]
    pub mode: SweepMode,
    /// Cap on each list of records kept in the report.
    pub max_records: usize,
}

impl SweepConfig {
    pub fn exhaustive(kappa0: u64, kappa1: u64, max_len: usize) -> Self {
        Self {
            kappa0,
            kappa1,
            max_len,
            mode: SweepMode::Exhaustive,
            max_records: 1000,
        }
    }

    /// Number of sequences the sweep visits, or `None` on overflow.
    pub fn sequence_count(&self) -> Option<u64> {
        match self.mode {
            SweepMode::Random { trials, .. } => Some(trials),
            SweepMode::Exhaustive => {
                let base = self.kappa0.checked_mul(self.kappa1)?;
                (0..=self.max_len as u32).try_fold(0u64, |acc, len| acc.checked_add(base.checked_pow(len)?))
            }
        }
    }
}

/// Two decompositions of one sequence with different indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InconsistencyRecord {
    pub sequence: u64,
    pub f0: Vec<u64>,
    pub f1: Vec<u64>,
    pub first: Decomposition,
    pub second: Decomposition,
}

/// A sequence on which the direct rule and the enumeration differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisagreementRecord {
    pub sequence: u64,
    pub f0: Vec<u64>,
    pub f1: Vec<u64>,
    /// `None` when the enumeration found conflicting decompositions.
    pub enumeration: Option<usize>,
    pub direct: usize,
    pub decomposable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: String,
    pub generator: String,
    pub config: SweepConfig,
    pub sequences: u64,
    pub decomposable: u64,
    pub inconsistencies: u64,
    /// Sequences where [`structural_values`] and enumeration differ; any
    /// nonzero count is a bug.
    pub structural_mismatches: u64,
    pub direct_agreements: u64,
    pub direct_disagreements: u64,
    /// Disagreements among sequences with a unique decomposition index.
    pub direct_disagreements_decomposable: u64,
    pub direct_agreement_rate: f64,
    pub inconsistency_records: Vec<InconsistencyRecord>,
    pub disagreement_records: Vec<DisagreementRecord>,
    pub records_truncated: bool,
}

impl SweepReport {
    /// True when no sequence has conflicting decompositions and the
    /// structural route matched the enumeration everywhere.
    pub fn is_consistent(&self) -> bool {
        self.inconsistencies == 0 && self.structural_mismatches == 0
    }
}

#[derive(Default)]
struct Partial {
    sequences: u64,
    decomposable: u64,
    inconsistencies: u64,
    structural_mismatches: u64,
    direct_agreements: u64,
    direct_disagreements: u64,
    direct_disagreements_decomposable: u64,
    inconsistency_records: Vec<InconsistencyRecord>,
    disagreement_records: Vec<DisagreementRecord>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.sequences += other.sequences;
        self.decomposable += other.decomposable;
        self.inconsistencies += other.inconsistencies;
        self.structural_mismatches += other.structural_mismatches;
        self.direct_agreements += other.direct_agreements;
        self.direct_disagreements += other.direct_disagreements;
        self.direct_disagreements_decomposable += other.direct_disagreements_decomposable;
        self.inconsistency_records.extend(other.inconsistency_records);
        self.disagreement_records.extend(other.disagreement_records);
        self
    }

    fn visit(mut self, index: u64, seq: &LabelledSeq) -> Partial {
        self.sequences += 1;
        let decompositions = enumerate_decompositions(seq);
        let values: BTreeSet<usize> = decompositions.keys().copied().collect();
        if structural_values(seq) != values {
            self.structural_mismatches += 1;
        }
        let decomposable = !values.is_empty();
        if decomposable {
            self.decomposable += 1;
        }
        let enumeration = match d_by_enumeration(seq) {
            Ok(v) => Some(v),
            Err(DError::InconsistentDecompositions { first, second }) => {
                self.inconsistencies += 1;
                self.inconsistency_records.push(InconsistencyRecord {
                    sequence: index,
                    f0: seq.f0.clone(),
                    f1: seq.f1.clone(),
                    first: *first,
                    second: *second,
                });
                None
            }
            Err(e) => unreachable!("enumeration only fails on conflicts: {e}"),
        };
        let direct = d_direct(seq);
        if enumeration == Some(direct) {
            self.direct_agreements += 1;
        } else {
            self.direct_disagreements += 1;
            if enumeration.is_some() && decomposable {
                self.direct_disagreements_decomposable += 1;
            }
            self.disagreement_records.push(DisagreementRecord {
                sequence: index,
                f0: seq.f0.clone(),
                f1: seq.f1.clone(),
                enumeration,
                direct,
                decomposable,
            });
        }
        self
    }
}

/// Decodes the `index`-th sequence of length `len` over `κ₀ × κ₁`; position
/// `p` holds digit `p` (least significant first) in base `κ₀·κ₁`.
pub fn decode_sequence(mut index: u64, len: usize, kappa0: u64, kappa1: u64) -> LabelledSeq {
    let base = kappa0 * kappa1;
    let mut seq = LabelledSeq {
        f0: Vec::with_capacity(len),
        f1: Vec::with_capacity(len),
    };
    for _ in 0..len {
        let digit = index % base;
        index /= base;
        seq.push(digit % kappa0, digit / kappa0);
    }
    seq
}

/// Runs `d` over a sequence space and reports decomposability,
/// inconsistencies and the agreement of the direct rule.
pub fn claim_e4_sweep(config: &SweepConfig) -> SweepReport {
    assert!(config.kappa0 > 0 && config.kappa1 > 0, "bounds must be positive");
    let partial = match config.mode {
        SweepMode::Exhaustive => {
            let base = config.kappa0 * config.kappa1;
            (0..=config.max_len)
                .map(|len| {
                    let count = base.pow(len as u32);
                    let offset: u64 = (0..len).map(|l| base.pow(l as u32)).sum();
                    (0..count)
                        .into_par_iter()
                        .fold(Partial::default, |acc, i| {
                            acc.visit(offset + i, &decode_sequence(i, len, config.kappa0, config.kappa1))
                        })
                        .reduce(Partial::default, Partial::merge)
                })
                .fold(Partial::default(), Partial::merge)
        }
        SweepMode::Random { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<LabelledSeq> = (0..trials)
                .map(|_| {
                    let len = rng.random_range(0..=config.max_len);
                    let mut seq = LabelledSeq {
                        f0: Vec::new(),
                        f1: Vec::new(),
                    };
                    for _ in 0..len {
                        seq.push(rng.random_range(0..config.kappa0), rng.random_range(0..config.kappa1));
                    }
                    seq
                })
                .collect();
            samples
                .par_iter()
                .enumerate()
                .fold(Partial::default, |acc, (i, s)| acc.visit(i as u64, s))
                .reduce(Partial::default, Partial::merge)
        }
    };
    let Partial {
        sequences,
        decomposable,
        inconsistencies,
        structural_mismatches,
        direct_agreements,
        direct_disagreements,
        direct_disagreements_decomposable,
        mut inconsistency_records,
        mut disagreement_records,
    } = partial;
    inconsistency_records.sort_by_key(|r| r.sequence);
    disagreement_records.sort_by_key(|r| r.sequence);
    let records_truncated =
        inconsistency_records.len() > config.max_records || disagreement_records.len() > config.max_records;
    inconsistency_records.truncate(config.max_records);
    disagreement_records.truncate(config.max_records);
    SweepReport {
        schema: SCHEMA.to_string(),
        generator: GENERATOR.to_string(),
        config: *config,
        sequences,
        decomposable,
        inconsistencies,
        structural_mismatches,
        direct_agreements,
        direct_disagreements,
        direct_disagreements_decomposable,
        direct_agreement_rate: if sequences == 0 {
            1.0
        } else {
            direct_agreements as f64 / sequences as f64
        },
        inconsistency_records,
        disagreement_records,
        records_truncated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(f0: &[u64], f1: &[u64]) -> LabelledSeq {
        LabelledSeq::new(f0.to_vec(), f1.to_vec()).unwrap()
    }

    #[test]
    fn worked_example_decomposition() {
        let s = seq(&[0, 0, 5, 1, 0], &[0, 9, 1, 2, 0]);
        let d = valid_decomposition(&s, [1, 2, 3, 4]).unwrap();
        assert_eq!((d.l1, d.l2, d.l3, d.l4), (0, 0, 0, 0));
        assert_eq!(d.u, vec![0]);
        assert_eq!(d.index, 1);
    }

    #[test]
    fn worked_example_value() {
        let s = seq(&[0, 0, 5, 1, 0], &[0, 9, 1, 2, 0]);
        assert_eq!(split_tuples(5).count(), 126);
        let all = enumerate_decompositions(&s);
        assert_eq!(all.keys().copied().collect::<Vec<_>>(), vec![1]);
        assert_eq!(d_by_enumeration(&s).unwrap(), 1);
        assert_eq!(d_direct(&s), 1);
        assert_eq!(structural_values(&s), BTreeSet::from([1]));
    }

    #[test]
    fn constant_labels_have_no_decomposition() {
        let s = seq(&[1, 1, 1], &[3, 3, 3]);
        assert!(split_tuples(3).all(|t| valid_decomposition(&s, t).is_none()));
        assert_eq!(d_by_enumeration(&s).unwrap(), 0);
    }

    #[test]
    fn empty_nu1_is_rejected() {
        let s = seq(&[0, 0, 5, 1, 0], &[0, 9, 1, 2, 0]);
        assert!(valid_decomposition(&s, [1, 2, 3, 3]).is_none());
        assert!(valid_decomposition(&s, [1, 2, 5, 5]).is_none());
    }

    #[test]
    fn degenerate_sequences() {
        let empty = seq(&[], &[]);
        assert_eq!(d_by_enumeration(&empty).unwrap(), 0);
        assert_eq!(d_direct(&empty), 0);
        let single = seq(&[4], &[2]);
        assert_eq!(d_by_enumeration(&single).unwrap(), 0);
        assert_eq!(d_direct(&single), 0);
    }

    #[test]
    fn split_points_out_of_order_are_rejected() {
        let s = seq(&[0, 0, 5, 1, 0], &[0, 9, 1, 2, 0]);
        assert!(valid_decomposition(&s, [2, 1, 3, 4]).is_none());
        assert!(valid_decomposition(&s, [1, 2, 3, 6]).is_none());
    }

    #[test]
    fn rho_prefix_before_its_maximum_changes_the_index() {
        // Position 1 (F₁ = 1 = max F₁(ν₁)) can end ν₀ or start ρ; the two
        // placements give indices 1 and 0.
        let s = seq(&[0, 0, 1, 0], &[2, 1, 0, 1]);
        let a = valid_decomposition(&s, [0, 2, 3, 4]).unwrap();
        let b = valid_decomposition(&s, [0, 1, 3, 4]).unwrap();
        assert_eq!((a.index, b.index), (1, 0));
        assert!(matches!(
            d_by_enumeration(&s),
            Err(DError::InconsistentDecompositions { .. })
        ));
        assert_eq!(structural_values(&s), BTreeSet::from([0, 1]));
        assert_eq!(d_index(&s).status, DStatus::Conflict(vec![0, 1]));
        assert_eq!(d_index(&s).value, 0);
    }

    #[test]
    fn bounds_and_lengths_are_checked() {
        assert_eq!(
            LabelledSeq::new(vec![1], vec![]),
            Err(DError::LengthMismatch { f0: 1, f1: 0 })
        );
        assert!(matches!(
            LabelledSeq::with_bounds(vec![0, 3], vec![0, 0], 3, 3),
            Err(DError::OutOfBounds {
                position: 1,
                value: 3,
                bound: 3
            })
        ));
    }

    #[test]
    fn decode_covers_every_sequence_once() {
        let mut seen = BTreeSet::new();
        for i in 0..36 {
            let s = decode_sequence(i, 2, 2, 3);
            assert!(s.f0.iter().all(|&v| v < 2) && s.f1.iter().all(|&v| v < 3));
            assert!(seen.insert(s));
        }
    }

    #[test]
    fn zero_length_sweep() {
        let r = claim_e4_sweep(&SweepConfig::exhaustive(3, 3, 0));
        assert_eq!(r.sequences, 1);
        assert_eq!(r.decomposable, 0);
        assert_eq!(r.inconsistencies, 0);
    }

    #[test]
    fn random_sweep_is_deterministic() {
        let cfg = SweepConfig {
            mode: SweepMode::Random { seed: 11, trials: 400 },
            ..SweepConfig::exhaustive(3, 4, 7)
        };
        let a = serde_json::to_string(&claim_e4_sweep(&cfg)).unwrap();
        let b = serde_json::to_string(&claim_e4_sweep(&cfg)).unwrap();
        assert_eq!(a, b);
    }
}

#[cfg(test)]
mod sweep_tests {
    use super::*;

    #[test]
    fn structural_route_matches_enumeration_exhaustively() {
        let r = claim_e4_sweep(&SweepConfig::exhaustive(3, 3, 5));
        assert_eq!(r.structural_mismatches, 0);
        assert_eq!(r.sequences, (0..=5).map(|l| 9u64.pow(l)).sum::<u64>());
    }
}
