//! Trace colourings `c₁`, `c₂` of pairs from a finite model, and the two
//! colouring transformations `derive_colouring` and `promote_colouring`.
//!
//! Walks are defined for `0 < α < β`; pairs `{0, β}` have no trace and get
//! colour 0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csequence::CSequence;
use crate::dfunction::{d_index, DIndex, LabelledSeq};
use crate::walks::{walk, WalkError};
use crate::SCHEMA;

#[derive(Debug, Error)]
pub enum ColouringError {
    #[error("bad generator {text:?}: {reason}")]
    Generator { text: String, reason: String },
    #[error("{slot}: input {input} is outside the table of length {len}")]
    OutsideTable { slot: String, input: u64, len: usize },
    #[error("{slot}({input}) = {value} is not below {bound}")]
    OutOfRange {
        slot: String,
        input: u64,
        value: u64,
        bound: u64,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error("pair ({alpha}, {beta}) is not an increasing pair below {n}")]
    Pair { alpha: usize, beta: usize, n: usize },
    #[error("no derivation entry for colour {0}")]
    MissingEntry(u64),
    #[error("f_{beta} is not injective: {x} and {y} both map to {value}")]
    NonInjective { beta: usize, x: u64, y: u64, value: u64 },
    #[error("malformed colour table: {0}")]
    Table(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A named function `ℕ → ℕ` for one slot of a [`ColouringSystem`].
///
/// Text forms: `identity`, `mod:k`, `const:c`, `table:[v₀,v₁,…]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Generator {
    Identity,
    Mod(u64),
    Const(u64),
    Table(Vec<u64>),
}

impl Generator {
    pub fn apply(&self, slot: &str, x: u64) -> Result<u64, ColouringError> {
        match self {
            Generator::Identity => Ok(x),
            Generator::Mod(k) => Ok(x % k),
            Generator::Const(c) => Ok(*c),
            Generator::Table(values) => values
                .get(x as usize)
                .copied()
                .ok_or_else(|| ColouringError::OutsideTable {
                    slot: slot.to_string(),
                    input: x,
                    len: values.len(),
                }),
        }
    }
}

impl FromStr for Generator {
    type Err = ColouringError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| ColouringError::Generator {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let number = |s: &str| s.trim().parse::<u64>().map_err(|_| bad("expected a natural number"));
        let text_trim = text.trim();
        if text_trim == "identity" {
            return Ok(Generator::Identity);
        }
        if let Some(k) = text_trim.strip_prefix("mod:") {
            let k = number(k)?;
            if k == 0 {
                return Err(bad("modulus must be positive"));
            }
            return Ok(Generator::Mod(k));
        }
        if let Some(c) = text_trim.strip_prefix("const:") {
            return Ok(Generator::Const(number(c)?));
        }
        if let Some(body) = text_trim.strip_prefix("table:") {
            let values: Vec<u64> = serde_json::from_str(body).map_err(|_| bad("expected a JSON array of naturals"))?;
            return Ok(Generator::Table(values));
        }
        Err(bad("unknown generator"))
    }
}

impl TryFrom<String> for Generator {
    type Error = ColouringError;

    fn try_from(text: String) -> Result<Self, Self::Error> {
        text.parse()
    }
}

impl From<Generator> for String {
    fn from(g: Generator) -> String {
        g.to_string()
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Identity => f.write_str("identity"),
            Generator::Mod(k) => write!(f, "mod:{k}"),
            Generator::Const(c) => write!(f, "const:{c}"),
            Generator::Table(values) => {
                let body: Vec<String> = values.iter().map(u64::to_string).collect();
                write!(f, "table:[{}]", body.join(","))
            }
        }
    }
}

fn default_kind() -> String {
    "colouring-system".to_string()
}

fn default_schema() -> String {
    SCHEMA.to_string()
}

/// The parameter pack defining `c₁` and `c₂`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColouringSystem {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(default = "default_kind")]
    pub kind: String,
    pub kappa0: u64,
    pub kappa1: u64,
    pub kappa2: u64,
    /// Label function on points.
    pub h: Generator,
    /// The set `S` off which `h` is zero; absent means every point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<BTreeSet<usize>>,
    pub f0: Generator,
    pub f1: Generator,
    pub f2: Generator,
    pub hprime: Generator,
    pub h1: Generator,
    pub h2: Generator,
}

/// Coverage of the fibers and onto-conditions a system is meant to have.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RichnessReport {
    /// Number of triples `(ε₀, ε₁, ε₂)` checked.
    pub triples: u64,
    /// Triples with no label `γ` such that `F_ι(γ) = ε_ι` for `ι ≤ 2`.
    pub empty_fibers: u64,
    /// The first few empty triples.
    pub empty_examples: Vec<[u64; 3]>,
    /// Colours `< κ₁` outside the range of `h′`.
    pub hprime_missing: Vec<u64>,
    /// Colours `< κ₁` outside the range of `h′₁`.
    pub h1_missing: Vec<u64>,
    /// The range of `h′₂` on `κ₁`.
    pub h2_range: Vec<u64>,
}

impl RichnessReport {
    pub fn is_rich(&self) -> bool {
        self.empty_fibers == 0 && self.hprime_missing.is_empty() && self.h1_missing.is_empty()
    }
}

impl ColouringSystem {
    pub fn from_json(text: &str) -> Result<Self, ColouringError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system serializes")
    }

    /// `h(γ)`, zero off the support.
    pub fn label(&self, gamma: usize) -> Result<u64, ColouringError> {
        if self.support.as_ref().is_some_and(|s| !s.contains(&gamma)) {
            return Ok(0);
        }
        self.h.apply("h", gamma as u64)
    }

    fn bounded(&self, slot: &str, g: &Generator, x: u64, bound: u64) -> Result<u64, ColouringError> {
        let value = g.apply(slot, x)?;
        if value >= bound {
            return Err(ColouringError::OutOfRange {
                slot: slot.to_string(),
                input: x,
                value,
                bound,
            });
        }
        Ok(value)
    }

    pub fn f0_of(&self, label: u64) -> Result<u64, ColouringError> {
        self.bounded("f0", &self.f0, label, self.kappa0)
    }

    pub fn f1_of(&self, label: u64) -> Result<u64, ColouringError> {
        self.bounded("f1", &self.f1, label, self.kappa1)
    }

    pub fn f2_of(&self, label: u64) -> Result<u64, ColouringError> {
        self.bounded("f2", &self.f2, label, self.kappa2)
    }

    /// The distinct labels of the points `0..n`.
    pub fn labels_on(&self, n: usize) -> Result<BTreeSet<u64>, ColouringError> {
        (0..n).map(|g| self.label(g)).collect()
    }

    /// Checks bounds and totality of every slot on the model `0..n`.
    pub fn validate(&self, n: usize) -> Result<(), ColouringError> {
        if self.schema != SCHEMA {
            return Err(ColouringError::Config(format!("unknown schema {:?}", self.schema)));
        }
        if !(self.kappa0 < self.kappa1 && self.kappa1 <= self.kappa2) {
            return Err(ColouringError::Config(format!(
                "need κ₀ < κ₁ ≤ κ₂, got {}, {}, {}",
                self.kappa0, self.kappa1, self.kappa2
            )));
        }
        for label in self.labels_on(n)? {
            self.f0_of(label)?;
            self.f1_of(label)?;
            self.f2_of(label)?;
        }
        for e in 0..self.kappa1 {
            self.bounded("hprime", &self.hprime, e, self.kappa1)?;
            self.bounded("h1", &self.h1, e, self.kappa1)?;
            self.h2.apply("h2", e)?;
        }
        Ok(())
    }

    /// Finite stand-in for the stationarity requirements: which fibers and
    /// onto-conditions hold on the model `0..n`.
    pub fn richness(&self, n: usize) -> Result<RichnessReport, ColouringError> {
        let mut present = BTreeSet::new();
        for label in self.labels_on(n)? {
            present.insert([self.f0_of(label)?, self.f1_of(label)?, self.f2_of(label)?]);
        }
        let mut empty_fibers = 0;
        let mut empty_examples = Vec::new();
        for e0 in 0..self.kappa0 {
            for e1 in 0..self.kappa1 {
                for e2 in 0..self.kappa2 {
                    if !present.contains(&[e0, e1, e2]) {
                        empty_fibers += 1;
                        if empty_examples.len() < 16 {
                            empty_examples.push([e0, e1, e2]);
                        }
                    }
                }
            }
        }
        let range = |slot: &str, g: &Generator| -> Result<BTreeSet<u64>, ColouringError> {
            (0..self.kappa1).map(|e| g.apply(slot, e)).collect()
        };
        let hprime = range("hprime", &self.hprime)?;
        let h1 = range("h1", &self.h1)?;
        Ok(RichnessReport {
            triples: self.kappa0 * self.kappa1 * self.kappa2,
            empty_fibers,
            empty_examples,
            hprime_missing: (0..self.kappa1).filter(|e| !hprime.contains(e)).collect(),
            h1_missing: (0..self.kappa1).filter(|e| !h1.contains(e)).collect(),
            h2_range: range("h2", &self.h2)?.into_iter().collect(),
        })
    }
}

/// Every intermediate value of `c₁{α,β}` and `c₂{α,β}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEvaluation {
    pub alpha: usize,
    pub beta: usize,
    /// `ρ_h̄(β, α)`.
    pub labels: Vec<u64>,
    pub f0: Vec<u64>,
    pub f1: Vec<u64>,
    /// `ℓ¹ = d(ρ_h̄(β, α))`, absent for pairs with `α = 0`.
    pub d: Option<DIndex>,
    /// `ε = F₁(ρ_h̄(β, α))(ℓ¹)`.
    pub epsilon: Option<u64>,
    pub c1: u64,
    /// `{ℓ : F₁(ρ_h̄(β,α))(ℓ) = h′₁(ε)}`.
    pub positions: Vec<usize>,
    /// `ℓ²`.
    pub l2: Option<usize>,
    pub c2: u64,
    /// Set when `P` has at most `h′₂(ε)` members and `ℓ²` fell back.
    pub c2_fallback: bool,
}

fn check_pair(alpha: usize, beta: usize, n: usize) -> Result<(), ColouringError> {
    if alpha < beta && beta < n {
        Ok(())
    } else {
        Err(ColouringError::Pair { alpha, beta, n })
    }
}

/// Evaluates both colourings on the pair `α < β` of the model `cs` on `0..n`.
pub fn evaluate<C: CSequence<Point = usize>>(
    sys: &ColouringSystem,
    cs: &C,
    n: usize,
    alpha: usize,
    beta: usize,
) -> Result<PairEvaluation, ColouringError> {
    check_pair(alpha, beta, n)?;
    let mut out = PairEvaluation {
        alpha,
        beta,
        labels: Vec::new(),
        f0: Vec::new(),
        f1: Vec::new(),
        d: None,
        epsilon: None,
        c1: 0,
        positions: Vec::new(),
        l2: None,
        c2: 0,
        c2_fallback: false,
    };
    if alpha == 0 {
        return Ok(out);
    }
    let trace = walk(cs, &beta, &alpha)?;
    let labels = trace.steps()[1..]
        .iter()
        .map(|&g| sys.label(g))
        .collect::<Result<Vec<_>, _>>()?;
    let f0 = labels.iter().map(|&l| sys.f0_of(l)).collect::<Result<Vec<_>, _>>()?;
    let f1 = labels.iter().map(|&l| sys.f1_of(l)).collect::<Result<Vec<_>, _>>()?;
    let seq = LabelledSeq::new(f0.clone(), f1.clone()).expect("equal lengths");
    let d = d_index(&seq);
    let l1 = d.value;
    assert!(
        l1 < labels.len(),
        "d index {l1} outside a trace of length {}",
        labels.len()
    );
    let epsilon = f1[l1];
    out.c1 = sys.bounded("hprime", &sys.hprime, epsilon, sys.kappa1)?;

    let target = sys.bounded("h1", &sys.h1, epsilon, sys.kappa1)?;
    let nth = sys.h2.apply("h2", epsilon)?;
    let positions: Vec<usize> = (0..f1.len()).filter(|&l| f1[l] == target).collect();
    let (l2, fallback) = match positions.get(nth as usize) {
        Some(&l) => (l, false),
        None => (positions.last().copied().unwrap_or(0), true),
    };
    out.c2 = sys.f2_of(labels[l2])?;
    out.c2_fallback = fallback;
    out.l2 = Some(l2);
    out.positions = positions;
    out.d = Some(d);
    out.epsilon = Some(epsilon);
    out.labels = labels;
    out.f0 = f0;
    out.f1 = f1;
    Ok(out)
}

pub fn c1<C: CSequence<Point = usize>>(
    sys: &ColouringSystem,
    cs: &C,
    n: usize,
    alpha: usize,
    beta: usize,
) -> Result<u64, ColouringError> {
    Ok(evaluate(sys, cs, n, alpha, beta)?.c1)
}

pub fn c2<C: CSequence<Point = usize>>(
    sys: &ColouringSystem,
    cs: &C,
    n: usize,
    alpha: usize,
    beta: usize,
) -> Result<u64, ColouringError> {
    Ok(evaluate(sys, cs, n, alpha, beta)?.c2)
}

/// A symmetric colouring of pairs from `0..n`; row `α` lists the colours
/// of `{α, β}` for `β = α+1, …, n-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColourTable {
    n: usize,
    colours: Vec<Vec<u64>>,
}

impl ColourTable {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> u64) -> Self {
        Self {
            n,
            colours: (0..n).map(|a| (a + 1..n).map(|b| f(a, b)).collect()).collect(),
        }
    }

    pub fn try_from_fn<E: Send>(n: usize, f: impl Fn(usize, usize) -> Result<u64, E> + Sync) -> Result<Self, E> {
        let colours = (0..n)
            .into_par_iter()
            .map(|a| (a + 1..n).map(|b| f(a, b)).collect::<Result<Vec<_>, E>>())
            .collect::<Result<Vec<_>, E>>()?;
        Ok(Self { n, colours })
    }

    pub fn constant(n: usize, colour: u64) -> Self {
        Self::from_fn(n, |_, _| colour)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, colours: u64, rng: &mut R) -> Self {
        Self {
            n,
            colours: (0..n)
                .map(|a| (a + 1..n).map(|_| rng.random_range(0..colours)).collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.colours
    }

    /// `c{x, y}` for `x ≠ y`.
    pub fn get(&self, x: usize, y: usize) -> u64 {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        assert!(
            a != b && b < self.n,
            "no colour for ({x}, {y}) in a table on {}",
            self.n
        );
        self.colours[a][b - a - 1]
    }

    pub fn set(&mut self, x: usize, y: usize, colour: u64) {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        assert!(
            a != b && b < self.n,
            "no colour for ({x}, {y}) in a table on {}",
            self.n
        );
        self.colours[a][b - a - 1] = colour;
    }

    /// Largest colour plus one, or 0 for tables without pairs.
    pub fn colour_bound(&self) -> u64 {
        self.colours.iter().flatten().max().map_or(0, |m| m + 1)
    }

    pub fn from_json(text: &str) -> Result<Self, ColouringError> {
        let table: ColourTable = serde_json::from_str(text)?;
        if table.colours.len() != table.n {
            return Err(ColouringError::Table(format!(
                "{} rows for n = {}",
                table.colours.len(),
                table.n
            )));
        }
        for (a, row) in table.colours.iter().enumerate() {
            if row.len() != table.n - a - 1 {
                return Err(ColouringError::Table(format!(
                    "row {a} has {} entries, expected {}",
                    row.len(),
                    table.n - a - 1
                )));
            }
        }
        Ok(table)
    }

    /// Compact JSON: one line per row.
    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .colours
            .iter()
            .map(|r| serde_json::to_string(r).expect("row serializes"))
            .collect();
        format!("{{\"n\":{},\"colours\":[\n{}\n]}}\n", self.n, rows.join(",\n"))
    }
}

/// Which of the two trace colourings to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    C1,
    C2,
}

/// The full table of `c₁` or `c₂` on the model `0..n`.
pub fn colour_table<C: CSequence<Point = usize>>(
    sys: &ColouringSystem,
    cs: &C,
    n: usize,
    which: Which,
) -> Result<ColourTable, ColouringError> {
    ColourTable::try_from_fn(n, |a, b| {
        let e = evaluate(sys, cs, n, a, b)?;
        Ok(match which {
            Which::C1 => e.c1,
            Which::C2 => e.c2,
        })
    })
}

/// One pair `(a_i, d_i)` of a derivation table. `d_i` is zero except on
/// the listed subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEntry {
    pub a: BTreeSet<usize>,
    #[serde(default)]
    pub d: Vec<SubsetValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetValue {
    pub b: BTreeSet<usize>,
    pub value: u64,
}

impl PairEntry {
    /// `d_i(b)`.
    pub fn value(&self, b: &BTreeSet<usize>) -> u64 {
        self.d.iter().find(|e| &e.b == b).map_or(0, |e| e.value)
    }
}

/// The data `χ`, `⟨A_α⟩` and `⟨(a_i, d_i)⟩` of a derived colouring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationTable {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub chi: usize,
    #[serde(rename = "A")]
    pub sets: Vec<BTreeSet<usize>>,
    /// Keyed by colour `i`.
    pub pairs: BTreeMap<u64, PairEntry>,
    /// Bound on `|a_i|` and on the support of `d_i`, when checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<usize>,
}

impl DerivationTable {
    pub fn from_json(text: &str) -> Result<Self, ColouringError> {
        let table: DerivationTable = serde_json::from_str(text)?;
        table.validate()?;
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Checks that the `A_α` are distinct subsets of `χ` and every `(a_i, d_i)`
    /// is well formed.
    pub fn validate(&self) -> Result<(), ColouringError> {
        let cfg = |m: String| Err(ColouringError::Config(m));
        let mut seen = BTreeMap::new();
        for (alpha, set) in self.sets.iter().enumerate() {
            if let Some(&x) = set.iter().find(|&&x| x >= self.chi) {
                return cfg(format!("A_{alpha} contains {x} ≥ χ = {}", self.chi));
            }
            if let Some(prev) = seen.insert(set, alpha) {
                return cfg(format!("A_{prev} = A_{alpha}"));
            }
        }
        for (i, entry) in &self.pairs {
            if let Some(&x) = entry.a.iter().find(|&&x| x >= self.chi) {
                return cfg(format!("a_{i} contains {x} ≥ χ = {}", self.chi));
            }
            let mut keys = BTreeSet::new();
            for sv in &entry.d {
                if !sv.b.is_subset(&entry.a) {
                    return cfg(format!("d_{i} is given on {:?}, not a subset of a_{i}", sv.b));
                }
                if !keys.insert(&sv.b) {
                    return cfg(format!("d_{i} is given twice on {:?}", sv.b));
                }
            }
            if let Some(theta) = self.theta {
                let nonzero = entry.d.iter().filter(|e| e.value != 0).count();
                if entry.a.len() >= theta || nonzero >= theta {
                    return cfg(format!(
                        "a_{i} has {} members and d_{i} {nonzero} nonzero values; both must be < θ = {theta}",
                        entry.a.len()
                    ));
                }
            }
        }
        Ok(())
    }

    /// `d_i(A_ζ ∩ a_i)`.
    pub fn value(&self, colour: u64, zeta: usize) -> Result<u64, ColouringError> {
        let entry = self.pairs.get(&colour).ok_or(ColouringError::MissingEntry(colour))?;
        let set = self
            .sets
            .get(zeta)
            .ok_or_else(|| ColouringError::Config(format!("no A_{zeta}")))?;
        let b: BTreeSet<usize> = set.intersection(&entry.a).copied().collect();
        Ok(entry.value(&b))
    }
}

/// `d(α₀, α₁) = d_i(A_{α_ι} ∩ a_i)` with `i = c(α₀, α₁)`, for `α₀ < α₁`.
pub fn derive_colouring(c: &ColourTable, table: &DerivationTable, iota: usize) -> Result<ColourTable, ColouringError> {
    if iota > 1 {
        return Err(ColouringError::Config(format!("ι must be 0 or 1, got {iota}")));
    }
    table.validate()?;
    if table.sets.len() < c.n() {
        return Err(ColouringError::Config(format!(
            "A_α given for {} points, colouring has {}",
            table.sets.len(),
            c.n()
        )));
    }
    ColourTable::try_from_fn(c.n(), |a0, a1| table.value(c.get(a0, a1), [a0, a1][iota]))
}

/// Per-point injections `f_β` used by [`promote_colouring`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Promotion {
    Identity,
    /// `f_β(x) = x + β`.
    Shift,
    /// `f_β(x) = maps[β][x]`; missing `β` means identity.
    Table {
        maps: BTreeMap<usize, Vec<u64>>,
    },
}

impl Promotion {
    pub fn apply(&self, beta: usize, x: u64) -> Result<u64, ColouringError> {
        match self {
            Promotion::Identity => Ok(x),
            Promotion::Shift => Ok(x + beta as u64),
            Promotion::Table { maps } => match maps.get(&beta) {
                None => Ok(x),
                Some(m) => m.get(x as usize).copied().ok_or_else(|| ColouringError::OutsideTable {
                    slot: format!("f_{beta}"),
                    input: x,
                    len: m.len(),
                }),
            },
        }
    }

    /// Rejects any `f_β`, `β < n`, that is not injective on `0..colours`.
    pub fn check_injective(&self, n: usize, colours: u64) -> Result<(), ColouringError> {
        for beta in 0..n {
            let mut seen = BTreeMap::new();
            for x in 0..colours {
                let value = self.apply(beta, x)?;
                if let Some(y) = seen.insert(value, x) {
                    return Err(ColouringError::NonInjective {
                        beta,
                        x: y,
                        y: x,
                        value,
                    });
                }
            }
        }
        Ok(())
    }
}

/// `{α, β} ↦ f_β(c{α, β})` for `α < β`.
pub fn promote_colouring(c: &ColourTable, f: &Promotion) -> Result<ColourTable, ColouringError> {
    f.check_injective(c.n(), c.colour_bound())?;
    ColourTable::try_from_fn(c.n(), |a, b| f.apply(b, c.get(a, b)))
}

/// A planted instance of the transfer identity: `c` is constantly `colour`
/// on `t⁰ × t¹`, and `d_colour(A_ζ ∩ a*) = ξ_ε` for the `ε`-th point `ζ` of
/// `t^ι`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedTransfer {
    pub iota: usize,
    pub colouring: ColourTable,
    pub table: DerivationTable,
    pub t0: Vec<usize>,
    pub t1: Vec<usize>,
    pub colour: u64,
    pub a_star: BTreeSet<usize>,
    pub xi: Vec<u64>,
}

/// Parameters for [`planted_transfer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedParams {
    pub n: usize,
    pub chi: usize,
    pub sigma1: u64,
    pub sigma2: u64,
    /// Upper bounds on `|t⁰|` and `|t¹|`.
    pub max_t0: usize,
    pub max_t1: usize,
}

impl Default for PlantedParams {
    fn default() -> Self {
        Self {
            n: 24,
            chi: 6,
            sigma1: 6,
            sigma2: 5,
            max_t0: 3,
            max_t1: 3,
        }
    }
}

/// A smallest-effort separating set: a subset `a` of `χ` such that the sets
/// `A ∩ a` are pairwise distinct for `A` in `sets` (which must be distinct).
pub fn separating_set(sets: &[&BTreeSet<usize>]) -> BTreeSet<usize> {
    let mut a = BTreeSet::new();
    loop {
        let mut classes: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut clash = None;
        for (k, s) in sets.iter().enumerate() {
            let key: Vec<usize> = s.intersection(&a).copied().collect();
            if let Some(&j) = classes.get(&key) {
                clash = Some((j, k));
                break;
            }
            classes.insert(key, k);
        }
        let Some((j, k)) = clash else {
            return a;
        };
        let x = *sets[j]
            .symmetric_difference(sets[k])
            .next()
            .expect("sets are pairwise distinct");
        a.insert(x);
    }
}

/// Builds a random planted instance from `rng`.
pub fn planted_transfer<R: Rng + ?Sized>(params: &PlantedParams, iota: usize, rng: &mut R) -> PlantedTransfer {
    let PlantedParams {
        n,
        chi,
        sigma1,
        sigma2,
        max_t0,
        max_t1,
    } = *params;
    assert!(chi < 64 && (1u64 << chi) >= n as u64, "need 2^χ ≥ n");
    assert!(max_t0 >= 1 && max_t1 >= 1 && max_t0 + max_t1 <= n);

    // Distinct A_α: a random injection of 0..n into the subsets of χ.
    let mut codes: Vec<u64> = (0..1u64 << chi).collect();
    codes.shuffle(rng);
    let sets: Vec<BTreeSet<usize>> = codes[..n]
        .iter()
        .map(|&code| (0..chi).filter(|&b| code >> b & 1 == 1).collect())
        .collect();

    // t⁰ entirely below t¹.
    let len0 = rng.random_range(1..=max_t0);
    let len1 = rng.random_range(1..=max_t1);
    let mut points: Vec<usize> = (0..n).collect();
    points.shuffle(rng);
    let mut chosen: Vec<usize> = points[..len0 + len1].to_vec();
    chosen.sort_unstable();
    let t0 = chosen[..len0].to_vec();
    let t1 = chosen[len0..].to_vec();
    let side = if iota == 0 { &t0 } else { &t1 };

    let xi: Vec<u64> = side.iter().map(|_| rng.random_range(0..sigma2)).collect();
    let side_sets: Vec<&BTreeSet<usize>> = side.iter().map(|&z| &sets[z]).collect();
    let a_star = separating_set(&side_sets);
    let colour = rng.random_range(0..sigma1);

    let mut pairs = BTreeMap::new();
    for i in 0..sigma1 {
        let entry = if i == colour {
            PairEntry {
                a: a_star.clone(),
                d: side_sets
                    .iter()
                    .zip(&xi)
                    .map(|(s, &value)| SubsetValue {
                        b: s.intersection(&a_star).copied().collect(),
                        value,
                    })
                    .collect(),
            }
        } else {
            let a: BTreeSet<usize> = (0..chi).filter(|_| rng.random_bool(0.3)).collect();
            let subsets: Vec<Vec<usize>> = (0..1u64 << a.len())
                .map(|mask| {
                    a.iter()
                        .enumerate()
                        .filter(|(k, _)| mask >> k & 1 == 1)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let mut d = Vec::new();
            for b in subsets {
                if rng.random_bool(0.3) {
                    d.push(SubsetValue {
                        b: b.into_iter().collect(),
                        value: rng.random_range(0..sigma2),
                    });
                }
            }
            PairEntry { a, d }
        };
        pairs.insert(i, entry);
    }

    let mut colouring = ColourTable::random(n, sigma1, rng);
    for &z0 in &t0 {
        for &z1 in &t1 {
            colouring.set(z0, z1, colour);
        }
    }
    PlantedTransfer {
        iota,
        colouring,
        table: DerivationTable {
            schema: SCHEMA.to_string(),
            chi,
            sets,
            pairs,
            theta: None,
        },
        t0,
        t1,
        colour,
        a_star,
        xi,
    }
}

/// Outcome of checking one planted instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferCheck {
    /// Cells `(ζ⁰, ζ¹)` of the rectangle.
    pub cells: usize,
    /// Cells where the derived colour is not `ξ_{ε_ι}`.
    pub failures: Vec<[usize; 2]>,
    /// Whether `d_i(a*_ε) = ξ_ε` for every `ε`.
    pub table_identity: bool,
}

/// Derives the colouring of a planted instance and compares it with `ξ` on
/// the rectangle.
pub fn check_planted(p: &PlantedTransfer) -> Result<TransferCheck, ColouringError> {
    let derived = derive_colouring(&p.colouring, &p.table, p.iota)?;
    let entry = &p.table.pairs[&p.colour];
    let side = if p.iota == 0 { &p.t0 } else { &p.t1 };
    let table_identity = side.iter().zip(&p.xi).all(|(&z, &x)| {
        let a_eps: BTreeSet<usize> = p.table.sets[z].intersection(&p.a_star).copied().collect();
        entry.a == p.a_star && entry.value(&a_eps) == x
    });
    let mut failures = Vec::new();
    for (e0, &z0) in p.t0.iter().enumerate() {
        for (e1, &z1) in p.t1.iter().enumerate() {
            let expected = p.xi[[e0, e1][p.iota]];
            if derived.get(z0, z1) != expected {
                failures.push([z0, z1]);
            }
        }
    }
    Ok(TransferCheck {
        cells: p.t0.len() * p.t1.len(),
        failures,
        table_identity,
    })
}

/// Summary of a seeded batch of planted instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferCampaign {
    pub schema: String,
    pub generator: String,
    pub seed: u64,
    pub params: PlantedParams,
    pub configurations: u64,
    pub cells: u64,
    pub failures: u64,
    pub identity_failures: u64,
    /// Indices of failing configurations, at most 100.
    pub failing: Vec<u64>,
}

/// Runs `count` planted instances; configuration `k` uses `ι = k mod 2` and
/// its own generator seeded from `(seed, k)`.
pub fn transfer_campaign(params: &PlantedParams, seed: u64, count: u64) -> Result<TransferCampaign, ColouringError> {
    let checks = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let planted = planted_transfer(params, (k % 2) as usize, &mut rng);
            check_planted(&planted).map(|c| (k, c))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut campaign = TransferCampaign {
        schema: SCHEMA.to_string(),
        generator: crate::GENERATOR.to_string(),
        seed,
        params: *params,
        configurations: count,
        cells: 0,
        failures: 0,
        identity_failures: 0,
        failing: Vec::new(),
    };
    for (k, check) in checks {
        campaign.cells += check.cells as u64;
        campaign.failures += check.failures.len() as u64;
        if !check.table_identity {
            campaign.identity_failures += 1;
        }
        if (!check.failures.is_empty() || !check.table_identity) && campaign.failing.len() < 100 {
            campaign.failing.push(k);
        }
    }
    Ok(campaign)
}
