//! C-sequences `α ↦ e_α`: the routing tables that minimal walks follow.
//!
//! Three providers share the [`CSequence`] trait:
//!
//! * [`CanonicalLadder`] over Cantor-normal-form ordinals, where a limit `α`
//!   gets the ω-type ladder `{α[n] : n ∈ ℕ}` and a successor `β+1` gets `{β}`;
//! * [`FiniteSuccessor`] over `{0, …, N-1}` with `e_{β+1} = {β}`;
//! * [`TableCSequence`], an explicit finite table. Any `e_α` that contains
//!   `α-1` gives terminating walks, which makes random tables usable for
//!   testing the walk lemmas.
//!
//! In all three providers `e_γ ∩ δ` is finite for `δ < γ`, so no `e_γ` has
//! an accumulation point below `γ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError, OrdinalKind};
use crate::SCHEMA;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsError {
    #[error("{0} is outside the provider's domain")]
    OutOfDomain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("provider corruption at e_{beta}: {detail}")]
    ProviderCorruption { beta: String, detail: String },
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error("invalid C-sequence table: {0}")]
    Table(String),
}

/// Point types a C-sequence can range over.
pub trait Point: Clone + Ord + Eq + Hash + fmt::Display + fmt::Debug + Send + Sync + Serialize + 'static {
    fn zero() -> Self;
    fn successor(&self) -> Self;
}

impl Point for usize {
    fn zero() -> Self {
        0
    }

    fn successor(&self) -> Self {
        self + 1
    }
}

impl Point for Ordinal {
    fn zero() -> Self {
        Ordinal::zero()
    }

    fn successor(&self) -> Self {
        Ordinal::successor(self)
    }
}

/// A C-sequence provider.
pub trait CSequence: Sync {
    type Point: Point;

    fn in_domain(&self, p: &Self::Point) -> bool;

    fn kind(&self, p: &Self::Point) -> OrdinalKind;

    /// `γ(β, α) = min{γ ∈ e_β : γ ≥ α}` for `0 < α < β`.
    fn e_min_at_least(&self, beta: &Self::Point, alpha: &Self::Point) -> Result<Self::Point, CsError>;

    /// `max(e_γ ∩ δ)`, or `None` when the intersection is empty.
    fn e_sup_below(&self, gamma: &Self::Point, delta: &Self::Point) -> Result<Option<Self::Point>, CsError>;

    fn e_contains(&self, gamma: &Self::Point, x: &Self::Point) -> Result<bool, CsError>;

    /// Whether `x ∈ acc(e_γ)`. Always false for the bundled providers.
    fn e_is_accumulation(&self, gamma: &Self::Point, x: &Self::Point) -> Result<bool, CsError> {
        self.check_domain(gamma)?;
        self.check_domain(x)?;
        Ok(false)
    }

    /// Whether `x ∈ nacc(e_γ) = e_γ ∖ acc(e_γ)`.
    fn e_nacc(&self, gamma: &Self::Point, x: &Self::Point) -> Result<bool, CsError> {
        Ok(self.e_contains(gamma, x)? && !self.e_is_accumulation(gamma, x)?)
    }

    /// Checks every clause of the C-sequence definition on `sample`.
    fn validate(&self, sample: &[Self::Point]) -> ValidationReport;

    fn check_domain(&self, p: &Self::Point) -> Result<(), CsError> {
        if self.in_domain(p) {
            Ok(())
        } else {
            Err(CsError::OutOfDomain(p.to_string()))
        }
    }
}

/// What went wrong with a C-sequence at one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// `e_0` must be empty.
    NonemptyAtZero,
    /// `e_α` empty for `α > 0`.
    EmptySet,
    /// A member of `e_α` is not below `α`.
    MemberNotBelow,
    /// `e_α` lacks `α - 1`.
    MissingPredecessor,
    /// The ladder of a limit is not strictly increasing below it.
    LadderNotIncreasing,
    /// A member lies in the configured avoid-set.
    MemberInAvoidSet,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::NonemptyAtZero => "e_0 nonempty",
            ViolationKind::EmptySet => "e_α empty for α>0",
            ViolationKind::MemberNotBelow => "member of e_α not below α",
            ViolationKind::MissingPredecessor => "e_α does not contain α−1",
            ViolationKind::LadderNotIncreasing => "ladder not strictly increasing below α",
            ViolationKind::MemberInAvoidSet => "member of e_α in the avoid-set",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsViolation {
    pub point: String,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checked: usize,
    pub violations: Vec<CsViolation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, point: impl fmt::Display, kind: ViolationKind, detail: impl Into<String>) {
        self.violations.push(CsViolation {
            point: point.to_string(),
            kind,
            detail: detail.into(),
        });
    }
}

fn require_walk_pair<P: Point>(beta: &P, alpha: &P) -> Result<(), CsError> {
    if *alpha <= P::zero() || alpha >= beta {
        return Err(CsError::Precondition(format!(
            "need 0 < α < β, got α={alpha}, β={beta}"
        )));
    }
    Ok(())
}

/// The canonical ladder system on ordinals below an optional bound.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CanonicalLadder {
    bound: Option<Ordinal>,
}

/// Ladder elements probed per limit during validation.
const LADDER_PROBE: u64 = 16;

impl CanonicalLadder {
    pub fn new(bound: Option<Ordinal>) -> Self {
        Self { bound }
    }

    pub fn bound(&self) -> Option<&Ordinal> {
        self.bound.as_ref()
    }
}

impl CSequence for CanonicalLadder {
    type Point = Ordinal;

    fn in_domain(&self, p: &Ordinal) -> bool {
        self.bound.as_ref().is_none_or(|b| p < b)
    }

    fn kind(&self, p: &Ordinal) -> OrdinalKind {
        p.kind()
    }

    fn e_min_at_least(&self, beta: &Ordinal, alpha: &Ordinal) -> Result<Ordinal, CsError> {
        self.check_domain(beta)?;
        require_walk_pair(beta, alpha)?;
        match beta.kind() {
            OrdinalKind::Zero => unreachable!("β > α > 0"),
            OrdinalKind::Successor => {
                let pred = beta.predecessor().expect("successor");
                // pred ≥ α since α < β = pred + 1
                Ok(pred)
            }
            OrdinalKind::Limit => {
                let n = beta.fundamental_index_at_least(alpha)?;
                Ok(beta.fundamental(n)?)
            }
        }
    }

    fn e_sup_below(&self, gamma: &Ordinal, delta: &Ordinal) -> Result<Option<Ordinal>, CsError> {
        self.check_domain(gamma)?;
        if delta >= gamma {
            return Err(CsError::Precondition(format!("need δ < γ, got δ={delta}, γ={gamma}")));
        }
        match gamma.kind() {
            OrdinalKind::Zero => Ok(None),
            OrdinalKind::Successor => {
                let pred = gamma.predecessor().expect("successor");
                Ok((pred < *delta).then_some(pred))
            }
            OrdinalKind::Limit => {
                let m = gamma.fundamental_index_at_least(delta)?;
                if m == 0 {
                    Ok(None)
                } else {
                    Ok(Some(gamma.fundamental(m - 1)?))
                }
            }
        }
    }

    fn e_contains(&self, gamma: &Ordinal, x: &Ordinal) -> Result<bool, CsError> {
        self.check_domain(gamma)?;
        if x >= gamma {
            return Ok(false);
        }
        match gamma.kind() {
            OrdinalKind::Zero => Ok(false),
            OrdinalKind::Successor => Ok(gamma.predecessor().as_ref() == Some(x)),
            OrdinalKind::Limit => {
                let n = gamma.fundamental_index_at_least(x)?;
                Ok(gamma.fundamental(n)? == *x)
            }
        }
    }

    fn validate(&self, sample: &[Ordinal]) -> ValidationReport {
        let mut report = ValidationReport::default();
        for alpha in sample {
            report.checked += 1;
            if !alpha.is_limit() {
                // e_0 = ∅ and e_{β+1} = {β} hold by construction.
                continue;
            }
            let mut prev: Option<Ordinal> = None;
            for n in 0..LADDER_PROBE {
                let x = match alpha.fundamental(n) {
                    Ok(x) => x,
                    Err(e) => {
                        report.push(alpha, ViolationKind::LadderNotIncreasing, e.to_string());
                        break;
                    }
                };
                if x >= *alpha {
                    report.push(alpha, ViolationKind::MemberNotBelow, format!("{alpha}[{n}] = {x}"));
                }
                if prev.as_ref().is_some_and(|p| *p >= x) {
                    report.push(alpha, ViolationKind::LadderNotIncreasing, format!("at n = {n}"));
                }
                prev = Some(x);
            }
        }
        report
    }
}

/// `e_0 = ∅` and `e_{β+1} = {β}` on `{0, …, N-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteSuccessor {
    n: usize,
}

impl FiniteSuccessor {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn size(&self) -> usize {
        self.n
    }
}

impl CSequence for FiniteSuccessor {
    type Point = usize;

    fn in_domain(&self, p: &usize) -> bool {
        *p < self.n
    }

    fn kind(&self, p: &usize) -> OrdinalKind {
        if *p == 0 {
            OrdinalKind::Zero
        } else {
            OrdinalKind::Successor
        }
    }

    fn e_min_at_least(&self, beta: &usize, alpha: &usize) -> Result<usize, CsError> {
        self.check_domain(beta)?;
        require_walk_pair(beta, alpha)?;
        Ok(beta - 1)
    }

    fn e_sup_below(&self, gamma: &usize, delta: &usize) -> Result<Option<usize>, CsError> {
        self.check_domain(gamma)?;
        if delta >= gamma {
            return Err(CsError::Precondition(format!("need δ < γ, got δ={delta}, γ={gamma}")));
        }
        Ok((gamma - 1 < *delta).then_some(gamma - 1))
    }

    fn e_contains(&self, gamma: &usize, x: &usize) -> Result<bool, CsError> {
        self.check_domain(gamma)?;
        Ok(*gamma > 0 && *x == gamma - 1)
    }

    fn validate(&self, sample: &[usize]) -> ValidationReport {
        let mut report = ValidationReport::default();
        for p in sample {
            report.checked += 1;
            if !self.in_domain(p) {
                report.push(p, ViolationKind::MemberNotBelow, format!("outside domain {}", self.n));
            }
        }
        report
    }
}

/// An explicit table `α ↦ e_α` over `{0, …, N-1}`.
///
/// Construction accepts any table; [`CSequence::validate`] reports the
/// clauses it breaks and walks fail with [`CsError::ProviderCorruption`]
/// when a broken entry is reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableCSequence {
    sets: Vec<Vec<usize>>,
    avoid: Option<BTreeSet<usize>>,
}

impl TableCSequence {
    /// `sets[α]` is `e_α`; members are sorted and deduplicated.
    pub fn new(sets: Vec<Vec<usize>>) -> Self {
        let sets = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        Self { sets, avoid: None }
    }

    /// Members of `avoid` are forbidden in every `e_α`.
    pub fn with_avoid_set(mut self, avoid: BTreeSet<usize>) -> Self {
        self.avoid = Some(avoid);
        self
    }

    /// A random table on `{0, …, n-1}`: each `e_α` (`α > 0`) holds `α-1` plus
    /// each smaller ordinal independently with probability `density`.
    pub fn random<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Self {
        let sets = (0..n)
            .map(|alpha| {
                if alpha == 0 {
                    return Vec::new();
                }
                let mut e: Vec<usize> = (0..alpha - 1).filter(|_| rng.random_bool(density)).collect();
                e.push(alpha - 1);
                e
            })
            .collect();
        Self::new(sets)
    }

    pub fn size(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, alpha: usize) -> &[usize] {
        &self.sets[alpha]
    }

    pub fn avoid_set(&self) -> Option<&BTreeSet<usize>> {
        self.avoid.as_ref()
    }

    pub fn from_json(text: &str) -> Result<Self, CsError> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| CsError::Table(e.to_string()))?;
        file.into_table()
    }

    pub fn to_json(&self) -> String {
        let file = TableFile {
            schema: SCHEMA.to_string(),
            kind: "csequence".to_string(),
            domain: self.sets.len(),
            e: self
                .sets
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.is_empty())
                .map(|(a, s)| (a.to_string(), s.iter().map(|&m| Member::Nat(m as u64)).collect()))
                .collect(),
            avoid: self.avoid.as_ref().map(|a| a.iter().copied().collect()),
        };
        serde_json::to_string_pretty(&file).expect("table serializes")
    }
}

impl CSequence for TableCSequence {
    type Point = usize;

    fn in_domain(&self, p: &usize) -> bool {
        *p < self.sets.len()
    }

    fn kind(&self, p: &usize) -> OrdinalKind {
        if *p == 0 {
            OrdinalKind::Zero
        } else {
            OrdinalKind::Successor
        }
    }

    fn e_min_at_least(&self, beta: &usize, alpha: &usize) -> Result<usize, CsError> {
        self.check_domain(beta)?;
        require_walk_pair(beta, alpha)?;
        let set = &self.sets[*beta];
        let idx = set.partition_point(|m| m < alpha);
        match set.get(idx) {
            Some(&g) if g < *beta => Ok(g),
            Some(&g) => Err(CsError::ProviderCorruption {
                beta: beta.to_string(),
                detail: format!("least member ≥ {alpha} is {g}, not below β"),
            }),
            None => Err(CsError::ProviderCorruption {
                beta: beta.to_string(),
                detail: format!("no member ≥ {alpha}"),
            }),
        }
    }

    fn e_sup_below(&self, gamma: &usize, delta: &usize) -> Result<Option<usize>, CsError> {
        self.check_domain(gamma)?;
        if delta >= gamma {
            return Err(CsError::Precondition(format!("need δ < γ, got δ={delta}, γ={gamma}")));
        }
        let set = &self.sets[*gamma];
        let idx = set.partition_point(|m| m < delta);
        Ok(idx.checked_sub(1).map(|i| set[i]))
    }

    fn e_contains(&self, gamma: &usize, x: &usize) -> Result<bool, CsError> {
        self.check_domain(gamma)?;
        Ok(self.sets[*gamma].binary_search(x).is_ok())
    }

    fn validate(&self, sample: &[usize]) -> ValidationReport {
        let mut report = ValidationReport::default();
        for &alpha in sample {
            report.checked += 1;
            if alpha >= self.sets.len() {
                report.push(alpha, ViolationKind::MemberNotBelow, "outside the table domain");
                continue;
            }
            let set = &self.sets[alpha];
            if alpha == 0 {
                if !set.is_empty() {
                    report.push(alpha, ViolationKind::NonemptyAtZero, format!("{set:?}"));
                }
                continue;
            }
            if set.is_empty() {
                report.push(alpha, ViolationKind::EmptySet, "");
                continue;
            }
            if let Some(m) = set.iter().find(|&&m| m >= alpha) {
                report.push(alpha, ViolationKind::MemberNotBelow, format!("member {m}"));
            }
            if set.binary_search(&(alpha - 1)).is_err() {
                report.push(alpha, ViolationKind::MissingPredecessor, format!("{set:?}"));
            }
            if let Some(avoid) = &self.avoid {
                if let Some(m) = set.iter().find(|m| avoid.contains(m)) {
                    report.push(alpha, ViolationKind::MemberInAvoidSet, format!("member {m}"));
                }
            }
        }
        report
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Member {
    Nat(u64),
    Text(String),
}

impl Member {
    fn to_usize(&self) -> Result<usize, CsError> {
        let value = match self {
            Member::Nat(n) => *n,
            Member::Text(s) => {
                let o: Ordinal = s.parse()?;
                o.as_nat()
                    .ok_or_else(|| CsError::Table(format!("{s} is not a finite ordinal")))?
            }
        };
        usize::try_from(value).map_err(|_| CsError::Table(format!("{value} too large")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableFile {
    schema: String,
    kind: String,
    domain: usize,
    e: BTreeMap<String, Vec<Member>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    avoid: Option<Vec<usize>>,
}

impl TableFile {
    fn into_table(self) -> Result<TableCSequence, CsError> {
        if self.schema != SCHEMA {
            return Err(CsError::Table(format!("unsupported schema {:?}", self.schema)));
        }
        if self.kind != "csequence" {
            return Err(CsError::Table(format!(
                "expected kind \"csequence\", got {:?}",
                self.kind
            )));
        }
        let mut sets = vec![Vec::new(); self.domain];
        for (key, members) in &self.e {
            let alpha = Member::Text(key.clone()).to_usize()?;
            let slot = sets
                .get_mut(alpha)
                .ok_or_else(|| CsError::Table(format!("key {key} outside domain {}", self.domain)))?;
            *slot = members.iter().map(Member::to_usize).collect::<Result<_, _>>()?;
        }
        let table = TableCSequence::new(sets);
        Ok(match self.avoid {
            Some(a) => table.with_avoid_set(a.into_iter().collect()),
            None => table,
        })
    }
}
