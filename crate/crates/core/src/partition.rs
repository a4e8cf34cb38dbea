//! Square-bracket partition properties on finite colourings: instance
//! checkers for the `Pr` and `Qr` families, the pairing function, and a
//! counterexample search over generated instances.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colouring::ColourTable;
use crate::{GENERATOR, SCHEMA};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("parameters: {0}")]
    Params(String),
    #[error("instance: {0}")]
    Instance(String),
    #[error("colouring is on {found} points, parameters need λ = {lambda}")]
    Colouring { found: usize, lambda: usize },
    #[error("instance space of about {estimate:.3e} exceeds the limit {limit}")]
    BoundExplosion { estimate: f64, limit: u64 },
}

/// Cantor pairing `(x+y)(x+y+1)/2 + y`.
pub fn pairing_pr(x: u64, y: u64) -> u64 {
    let s = x + y;
    s * (s + 1) / 2 + y
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Theta {
    Single(usize),
    Pair([usize; 2]),
}

impl Theta {
    pub fn pair(self) -> [usize; 2] {
        match self {
            Theta::Single(t) => [t, t],
            Theta::Pair(p) => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Pr0,
    Pr1,
    Pr0Iota,
    Pr0Uf,
    Qr0,
    Qr0Iota,
    Qr1,
    Col,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Pr0,
        Variant::Pr1,
        Variant::Pr0Iota,
        Variant::Pr0Uf,
        Variant::Qr0,
        Variant::Qr0Iota,
        Variant::Qr1,
        Variant::Col,
    ];

    pub fn is_qr(self) -> bool {
        matches!(self, Variant::Qr0 | Variant::Qr0Iota | Variant::Qr1)
    }

    pub fn needs_iota(self) -> bool {
        matches!(self, Variant::Pr0Iota | Variant::Pr0Uf | Variant::Qr0Iota)
    }
}

/// `λ, μ, σ, θ̄` and the property checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionParams {
    pub lambda: usize,
    pub mu: usize,
    pub sigma: u64,
    pub theta: Theta,
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iota: Option<usize>,
}

impl PartitionParams {
    /// `Col(λ, θ)`, i.e. `Pr₀(λ, λ, 2, θ⁺)` once expanded.
    pub fn col(lambda: usize, theta: usize) -> Self {
        Self {
            lambda,
            mu: lambda,
            sigma: 2,
            theta: Theta::Single(theta),
            variant: Variant::Col,
            iota: None,
        }
    }

    /// Replaces `Col(λ, θ)` by `Pr₀(λ, λ, 2, θ+1)`; other variants unchanged.
    pub fn expand(&self) -> Result<Self, PartitionError> {
        if self.variant != Variant::Col {
            return Ok(*self);
        }
        let Theta::Single(theta) = self.theta else {
            return Err(PartitionError::Params("Col takes a single θ".into()));
        };
        Ok(Self {
            lambda: self.lambda,
            mu: self.lambda,
            sigma: 2,
            theta: Theta::Single(theta + 1),
            variant: Variant::Pr0,
            iota: None,
        })
    }

    /// Expands `Col` and checks `λ ≥ μ ≥ σ, θ₀, θ₁` and the `ι` setting.
    pub fn validated(&self) -> Result<Self, PartitionError> {
        let p = self.expand()?;
        let [t0, t1] = p.theta.pair();
        let bad = |m: String| Err(PartitionError::Params(m));
        if p.sigma == 0 || t0 == 0 || t1 == 0 {
            return bad("σ, θ₀ and θ₁ must be positive".into());
        }
        if !(p.lambda >= p.mu && p.mu as u64 >= p.sigma && p.mu >= t0 && p.mu >= t1) {
            return bad(format!(
                "need λ ≥ μ ≥ σ, θ₀, θ₁; got λ={}, μ={}, σ={}, θ̄=({t0},{t1})",
                p.lambda, p.mu, p.sigma
            ));
        }
        match (p.variant.needs_iota(), p.iota) {
            (true, Some(0 | 1)) | (false, None) => Ok(p),
            (true, _) => bad(format!("{:?} needs ι ∈ {{0, 1}}", p.variant)),
            (false, Some(_)) => bad(format!("{:?} takes no ι", p.variant)),
        }
    }
}

/// Re-encodes a single `θ` as `(θ, θ)`.
pub fn normalize_theta(params: &PartitionParams) -> PartitionParams {
    PartitionParams {
        theta: Theta::Pair(params.theta.pair()),
        ..*params
    }
}

/// The prescribed colour pattern of a `Pr` instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HFun {
    /// `h : i₀ × i₁ → σ`.
    Full(Vec<Vec<u64>>),
    /// `h : i_ι → σ`.
    Side(Vec<u64>),
    /// The constant `γ`.
    Constant(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrInstance {
    pub i0: usize,
    pub i1: usize,
    /// `μ′` rows of `i₀` points.
    pub zeta0: Vec<Vec<usize>>,
    /// `μ′` rows of `i₁` points.
    pub zeta1: Vec<Vec<usize>>,
    pub h: HFun,
    /// The principal index `j_D < i_{1-ι}` of the ultrafilter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ultra: Option<usize>,
}

/// One family `(u⁰_α, u¹_α, h⁰_α, h¹_α)`; `h^ι[k]` is the value at `u^ι[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QrFamily {
    pub u0: Vec<usize>,
    pub u1: Vec<usize>,
    pub h0: Vec<u64>,
    pub h1: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QrInstance {
    pub families: Vec<QrFamily>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Instance {
    Pr(PrInstance),
    Qr(QrInstance),
}

/// Instance file: parameters plus one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default = "schema")]
    pub schema: String,
    pub params: PartitionParams,
    #[serde(flatten)]
    pub instance: Instance,
}

fn schema() -> String {
    SCHEMA.to_string()
}

/// The result of checking one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub witness: Option<[usize; 2]>,
}

fn instance_err<T>(m: String) -> Result<T, PartitionError> {
    Err(PartitionError::Instance(m))
}

fn check_colouring(c: &ColourTable, p: &PartitionParams) -> Result<(), PartitionError> {
    if c.n() != p.lambda {
        return Err(PartitionError::Colouring {
            found: c.n(),
            lambda: p.lambda,
        });
    }
    Ok(())
}

impl PrInstance {
    pub fn rows(&self) -> usize {
        self.zeta0.len()
    }

    /// Checks shapes, bounds, distinctness and disjointness against
    /// already validated parameters.
    pub fn validate(&self, p: &PartitionParams) -> Result<(), PartitionError> {
        let [t0, t1] = p.theta.pair();
        if self.i0 >= t0 || self.i1 >= t1 {
            return instance_err(format!("need i₀ < θ₀ and i₁ < θ₁, got ({}, {})", self.i0, self.i1));
        }
        if self.zeta1.len() != self.rows() || self.rows() > p.mu {
            return instance_err(format!(
                "{} and {} rows; both must be equal and at most μ = {}",
                self.zeta0.len(),
                self.zeta1.len(),
                p.mu
            ));
        }
        let mut seen0 = BTreeSet::new();
        let mut seen1 = BTreeSet::new();
        for (side, matrix, width, seen) in [
            (0, &self.zeta0, self.i0, &mut seen0),
            (1, &self.zeta1, self.i1, &mut seen1),
        ] {
            for (a, row) in matrix.iter().enumerate() {
                if row.len() != width {
                    return instance_err(format!(
                        "row {a} of ζ{side} has {} entries, expected {width}",
                        row.len()
                    ));
                }
                for &z in row {
                    if z >= p.lambda {
                        return instance_err(format!("ζ{side} contains {z} ≥ λ"));
                    }
                    if !seen.insert(z) {
                        return instance_err(format!("ζ{side} repeats {z}"));
                    }
                }
            }
        }
        if let Some(z) = seen0.intersection(&seen1).next() {
            return instance_err(format!("{z} occurs in both ζ0 and ζ1"));
        }
        let in_sigma = |v: &u64| *v < p.sigma;
        let side_len = |iota: usize| [self.i0, self.i1][iota];
        match (p.variant, &self.h) {
            (Variant::Pr0, HFun::Full(m)) => {
                if m.len() != self.i0 || m.iter().any(|r| r.len() != self.i1) {
                    return instance_err("h must be an i₀ × i₁ matrix".into());
                }
                if !m.iter().flatten().all(in_sigma) {
                    return instance_err("h takes a value ≥ σ".into());
                }
            }
            (Variant::Pr1, HFun::Constant(g)) => {
                if !in_sigma(g) {
                    return instance_err("γ ≥ σ".into());
                }
            }
            (Variant::Pr0Iota | Variant::Pr0Uf, HFun::Side(v)) => {
                let iota = p.iota.expect("validated");
                if v.len() != side_len(iota) {
                    return instance_err(format!("h must have i_ι = {} entries", side_len(iota)));
                }
                if !v.iter().all(in_sigma) {
                    return instance_err("h takes a value ≥ σ".into());
                }
            }
            (v, h) => return instance_err(format!("{v:?} does not take h of the form {h:?}")),
        }
        match (p.variant, self.ultra) {
            (Variant::Pr0Uf, Some(j)) => {
                let other = side_len(1 - p.iota.expect("validated"));
                if j >= other {
                    return instance_err(format!("j_D = {j} is not below i_(1-ι) = {other}"));
                }
            }
            (Variant::Pr0Uf, None) => return instance_err("Pr0uf needs the ultrafilter index j_D".into()),
            (_, Some(_)) => return instance_err("only Pr0uf takes j_D".into()),
            (_, None) => {}
        }
        Ok(())
    }

    fn pair_works(&self, c: &ColourTable, p: &PartitionParams, a0: usize, a1: usize) -> bool {
        let (r0, r1) = (&self.zeta0[a0], &self.zeta1[a1]);
        match &self.h {
            HFun::Full(m) => (0..self.i0).all(|i| (0..self.i1).all(|j| c.get(r0[i], r1[j]) == m[i][j])),
            HFun::Constant(g) => r0.iter().all(|&x| r1.iter().all(|&y| c.get(x, y) == *g)),
            HFun::Side(v) => {
                let iota = p.iota.expect("validated");
                let (mine, other) = if iota == 0 { (r0, r1) } else { (r1, r0) };
                match self.ultra {
                    Some(j) => (0..mine.len()).all(|i| c.get(mine[i], other[j]) == v[i]),
                    None => (0..mine.len()).all(|i| other.iter().all(|&y| c.get(mine[i], y) == v[i])),
                }
            }
        }
    }
}

impl QrInstance {
    pub fn validate(&self, p: &PartitionParams) -> Result<(), PartitionError> {
        let [t0, t1] = p.theta.pair();
        if self.families.len() > p.mu {
            return instance_err(format!("{} families, more than μ = {}", self.families.len(), p.mu));
        }
        let mut owner = std::collections::BTreeMap::new();
        for (a, f) in self.families.iter().enumerate() {
            if f.u0.len() >= t0 || f.u1.len() >= t1 {
                return instance_err(format!("family {a}: need |u⁰| < θ₀ and |u¹| < θ₁"));
            }
            if f.h0.len() != f.u0.len() || f.h1.len() != f.u1.len() {
                return instance_err(format!("family {a}: h⁰, h¹ must match u⁰, u¹"));
            }
            for (side, u) in [(0, &f.u0), (1, &f.u1)] {
                let distinct: BTreeSet<_> = u.iter().collect();
                if distinct.len() != u.len() {
                    return instance_err(format!("family {a}: u{side} repeats a point"));
                }
            }
            for &z in f.u0.iter().chain(&f.u1) {
                if z >= p.lambda {
                    return instance_err(format!("family {a}: {z} ≥ λ"));
                }
                if let Some(&b) = owner.get(&z) {
                    if b != a {
                        return instance_err(format!("families {b} and {a} share {z}"));
                    }
                }
                owner.insert(z, a);
            }
            if !f.h0.iter().chain(&f.h1).all(|&v| v < p.sigma) {
                return instance_err(format!("family {a}: h takes a value ≥ σ"));
            }
            let constant = |h: &[u64]| h.windows(2).all(|w| w[0] == w[1]);
            let need = match p.variant {
                Variant::Qr0 => [false, false],
                Variant::Qr0Iota => {
                    let iota = p.iota.expect("validated");
                    [iota == 1, iota == 0]
                }
                Variant::Qr1 => [true, true],
                v => return instance_err(format!("{v:?} does not take a Qr instance")),
            };
            if (need[0] && !constant(&f.h0)) || (need[1] && !constant(&f.h1)) {
                return instance_err(format!("family {a}: {:?} needs a constant h", p.variant));
            }
        }
        Ok(())
    }

    fn pair_works(&self, c: &ColourTable, a0: usize, a1: usize) -> bool {
        let (f0, f1) = (&self.families[a0], &self.families[a1]);
        f0.u0.iter().zip(&f0.h0).all(|(&z0, &x)| {
            f1.u1
                .iter()
                .zip(&f1.h1)
                .all(|(&z1, &y)| z0 < z1 && c.get(z0, z1) == pairing_pr(x, y))
        })
    }
}

/// Validates `inst` and returns the first `α₀ < α₁` realizing the pattern.
pub fn check_pr_instance(
    c: &ColourTable,
    params: &PartitionParams,
    inst: &PrInstance,
) -> Result<Verdict, PartitionError> {
    let p = params.validated()?;
    if p.variant.is_qr() {
        return Err(PartitionError::Params(format!("{:?} is not a Pr variant", p.variant)));
    }
    check_colouring(c, &p)?;
    inst.validate(&p)?;
    Ok(scan_pr(c, &p, inst))
}

fn scan_pr(c: &ColourTable, p: &PartitionParams, inst: &PrInstance) -> Verdict {
    let rows = inst.rows();
    let witness = (0..rows)
        .flat_map(|a0| (a0 + 1..rows).map(move |a1| [a0, a1]))
        .find(|&[a0, a1]| inst.pair_works(c, p, a0, a1));
    Verdict { witness }
}

pub fn check_qr_instance(
    c: &ColourTable,
    params: &PartitionParams,
    inst: &QrInstance,
) -> Result<Verdict, PartitionError> {
    let p = params.validated()?;
    if !p.variant.is_qr() {
        return Err(PartitionError::Params(format!("{:?} is not a Qr variant", p.variant)));
    }
    check_colouring(c, &p)?;
    inst.validate(&p)?;
    Ok(scan_qr(c, inst))
}

fn scan_qr(c: &ColourTable, inst: &QrInstance) -> Verdict {
    let rows = inst.families.len();
    let witness = (0..rows)
        .flat_map(|a0| (a0 + 1..rows).map(move |a1| [a0, a1]))
        .find(|&[a0, a1]| inst.pair_works(c, a0, a1));
    Verdict { witness }
}

/// Dispatches on the instance kind.
pub fn check_instance(c: &ColourTable, file: &InstanceFile) -> Result<Verdict, PartitionError> {
    match &file.instance {
        Instance::Pr(i) => check_pr_instance(c, &file.params, i),
        Instance::Qr(i) => check_qr_instance(c, &file.params, i),
    }
}

/// Shape of the generated instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    /// `μ′`: rows or families per instance.
    pub rows: usize,
    /// `i₀` (Pr) or `|u⁰_α|` (Qr).
    pub i0: usize,
    /// `i₁` (Pr) or `|u¹_α|` (Qr).
    pub i1: usize,
    /// Colours the generated `h` may take; all of `σ` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colours: Option<Vec<u64>>,
    /// Largest instance space the exhaustive strategy accepts.
    #[serde(default = "default_max_instances")]
    pub max_instances: u64,
}

fn default_max_instances() -> u64 {
    50_000_000
}

impl SearchBounds {
    pub fn new(rows: usize, i0: usize, i1: usize) -> Self {
        Self {
            rows,
            i0,
            i1,
            colours: None,
            max_instances: default_max_instances(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "strategy")]
pub enum Strategy {
    Exhaustive,
    Random { seed: u64, trials: u64 },
}

/// A generated instance on which the checker finds no witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Position in generation order.
    pub index: u64,
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema: String,
    pub generator: String,
    pub params: PartitionParams,
    pub bounds: SearchBounds,
    #[serde(flatten)]
    pub strategy: Strategy,
    /// Size of the instance space.
    pub space: u64,
    /// Instances up to and including the counterexample, or the whole space.
    pub instances_tried: u64,
    pub counterexample: Option<Counterexample>,
}

/// How the `h` part of an instance is laid out as digits over `colours`.
#[derive(Debug, Clone, Copy)]
struct HShape {
    /// Digits of `h`, over `colours`.
    digits: usize,
    /// Extra factor for the ultrafilter index.
    ultra: usize,
}

fn h_shape(p: &PartitionParams, b: &SearchBounds) -> HShape {
    let iota = p.iota.unwrap_or(0);
    let side = [b.i0, b.i1];
    let (digits, ultra) = match p.variant {
        Variant::Pr0 | Variant::Col => (b.i0 * b.i1, 1),
        Variant::Pr1 => (1, 1),
        Variant::Pr0Iota => (side[iota], 1),
        Variant::Pr0Uf => (side[iota], side[1 - iota]),
        Variant::Qr0 => (b.rows * (b.i0 + b.i1), 1),
        Variant::Qr0Iota => (b.rows * (side[iota] + usize::from(side[1 - iota] > 0)), 1),
        Variant::Qr1 => (b.rows * (usize::from(b.i0 > 0) + usize::from(b.i1 > 0)), 1),
    };
    HShape { digits, ultra }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Point layouts: `rows` blocks of `i₀ + i₁` points, blocks increasing, each
/// block split into its first and second part in every way.
fn layouts(lambda: usize, rows: usize, i0: usize, i1: usize) -> Vec<Vec<(Vec<usize>, Vec<usize>)>> {
    let width = i0 + i1;
    let mut splits: Vec<Vec<bool>> = Vec::new();
    for mask in 0u64..1 << width {
        if mask.count_ones() as usize == i1 {
            // bit k set: the k-th smallest point of the block goes to side 1
            splits.push((0..width).map(|k| mask >> k & 1 == 1).collect());
        }
    }
    splits.sort();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        start: usize,
        lambda: usize,
        rows: usize,
        width: usize,
        splits: &[Vec<bool>],
        current: &mut Vec<(Vec<usize>, Vec<usize>)>,
        out: &mut Vec<Vec<(Vec<usize>, Vec<usize>)>>,
    ) {
        if current.len() == rows {
            out.push(current.clone());
            return;
        }
        let remaining = (rows - current.len()) * width;
        if start + remaining > lambda {
            return;
        }
        for block in combinations(start, lambda - (rows - current.len() - 1) * width, width) {
            let next = block.last().map_or(start, |&m| m + 1);
            for split in splits {
                let side0 = block.iter().zip(split).filter(|(_, &s)| !s).map(|(&z, _)| z).collect();
                let side1 = block.iter().zip(split).filter(|(_, &s)| s).map(|(&z, _)| z).collect();
                current.push((side0, side1));
                rec(next, lambda, rows, width, splits, current, out);
                current.pop();
            }
        }
    }
    rec(0, lambda, rows, width, &splits, &mut current, &mut out);
    out
}

/// Increasing `k`-tuples from `[lo, hi)` in lexicographic order.
fn combinations(lo: usize, hi: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(lo: usize, hi: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for z in lo..hi {
            if z + need > hi {
                break;
            }
            cur.push(z);
            rec(z + 1, hi, k, cur, out);
            cur.pop();
        }
    }
    rec(lo, hi, k, &mut cur, &mut out);
    out
}

fn digits_of(mut index: u64, count: usize, base: u64) -> Vec<u64> {
    let mut d = vec![0; count];
    for slot in d.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    d
}

fn build_instance(
    p: &PartitionParams,
    b: &SearchBounds,
    layout: &[(Vec<usize>, Vec<usize>)],
    colours: &[u64],
    digits: &[u64],
    ultra: usize,
) -> Instance {
    let col = |k: usize| colours[digits[k] as usize];
    let iota = p.iota.unwrap_or(0);
    if p.variant.is_qr() {
        let mut k = 0;
        let families = layout
            .iter()
            .map(|(u0, u1)| {
                let mut side = |len: usize, constant: bool| -> Vec<u64> {
                    if len == 0 {
                        return Vec::new();
                    }
                    if constant {
                        k += 1;
                        vec![col(k - 1); len]
                    } else {
                        k += len;
                        (k - len..k).map(col).collect()
                    }
                };
                let constant = match p.variant {
                    Variant::Qr0 => [false, false],
                    Variant::Qr0Iota => [iota == 1, iota == 0],
                    _ => [true, true],
                };
                let h0 = side(u0.len(), constant[0]);
                let h1 = side(u1.len(), constant[1]);
                QrFamily {
                    u0: u0.clone(),
                    u1: u1.clone(),
                    h0,
                    h1,
                }
            })
            .collect();
        return Instance::Qr(QrInstance { families });
    }
    let h = match p.variant {
        Variant::Pr0 | Variant::Col => HFun::Full(
            (0..b.i0)
                .map(|i| (0..b.i1).map(|j| col(i * b.i1 + j)).collect())
                .collect(),
        ),
        Variant::Pr1 => HFun::Constant(col(0)),
        _ => HFun::Side((0..[b.i0, b.i1][iota]).map(col).collect()),
    };
    Instance::Pr(PrInstance {
        i0: b.i0,
        i1: b.i1,
        zeta0: layout.iter().map(|(z0, _)| z0.clone()).collect(),
        zeta1: layout.iter().map(|(_, z1)| z1.clone()).collect(),
        h,
        ultra: (p.variant == Variant::Pr0Uf).then_some(ultra),
    })
}

fn verdict_of(c: &ColourTable, p: &PartitionParams, inst: &Instance) -> Verdict {
    match inst {
        Instance::Pr(i) => scan_pr(c, p, i),
        Instance::Qr(i) => scan_qr(c, i),
    }
}

/// Looks for a generated instance without witness. The reported
/// counterexample is the least one in generation order, whatever the
/// thread count.
pub fn search_counterexample(
    c: &ColourTable,
    params: &PartitionParams,
    bounds: &SearchBounds,
    strategy: Strategy,
) -> Result<SearchReport, PartitionError> {
    let p = params.validated()?;
    check_colouring(c, &p)?;
    let [t0, t1] = p.theta.pair();
    if bounds.i0 >= t0 || bounds.i1 >= t1 || bounds.rows > p.mu {
        return Err(PartitionError::Params(format!(
            "bounds ({} rows, {}, {}) do not fit μ = {}, θ̄ = ({t0},{t1})",
            bounds.rows, bounds.i0, bounds.i1, p.mu
        )));
    }
    if p.variant == Variant::Pr0Uf && [bounds.i0, bounds.i1][1 - p.iota.expect("validated")] == 0 {
        return Err(PartitionError::Params("Pr0uf needs i_(1-ι) ≥ 1".into()));
    }
    let colours: Vec<u64> = match &bounds.colours {
        Some(list) => {
            let set: BTreeSet<u64> = list.iter().copied().collect();
            if set.is_empty() || set.iter().any(|&v| v >= p.sigma) {
                return Err(PartitionError::Params("colours must be a nonempty subset of σ".into()));
            }
            set.into_iter().collect()
        }
        None => (0..p.sigma).collect(),
    };
    let width = bounds.i0 + bounds.i1;
    if bounds.rows * width > p.lambda {
        return Err(PartitionError::Params(format!(
            "{} rows of {width} points do not fit in λ = {}",
            bounds.rows, p.lambda
        )));
    }
    let shape = h_shape(&p, bounds);
    let base = colours.len() as u64;
    let h_count_f = (base as f64).powi(shape.digits as i32) * shape.ultra as f64;

    let mut report = SearchReport {
        schema: SCHEMA.to_string(),
        generator: GENERATOR.to_string(),
        params: *params,
        bounds: bounds.clone(),
        strategy,
        space: 0,
        instances_tried: 0,
        counterexample: None,
    };

    match strategy {
        Strategy::Exhaustive => {
            let layout_count =
                binomial(p.lambda, bounds.rows * width) * binomial(width, bounds.i1).powi(bounds.rows as i32);
            let estimate = layout_count * h_count_f;
            if estimate > bounds.max_instances as f64 {
                return Err(PartitionError::BoundExplosion {
                    estimate,
                    limit: bounds.max_instances,
                });
            }
            let all = layouts(p.lambda, bounds.rows, bounds.i0, bounds.i1);
            let h_count = base.pow(shape.digits as u32) * shape.ultra as u64;
            report.space = all.len() as u64 * h_count;
            let found = all.par_iter().enumerate().find_map_first(|(li, layout)| {
                (0..h_count).find_map(|hi| {
                    let digits = digits_of(hi / shape.ultra as u64, shape.digits, base);
                    let ultra = (hi % shape.ultra as u64) as usize;
                    let inst = build_instance(&p, bounds, layout, &colours, &digits, ultra);
                    verdict_of(c, &p, &inst).witness.is_none().then(|| Counterexample {
                        index: li as u64 * h_count + hi,
                        instance: inst,
                    })
                })
            });
            report.instances_tried = found.as_ref().map_or(report.space, |f| f.index + 1);
            report.counterexample = found;
        }
        Strategy::Random { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<Instance> = (0..trials)
                .map(|_| {
                    let points = sample(&mut rng, p.lambda, bounds.rows * width).into_vec();
                    let layout: Vec<(Vec<usize>, Vec<usize>)> = points
                        .chunks(width.max(1))
                        .take(bounds.rows)
                        .map(|ch| (ch[..bounds.i0].to_vec(), ch[bounds.i0..].to_vec()))
                        .collect();
                    let layout = if width == 0 {
                        vec![(Vec::new(), Vec::new()); bounds.rows]
                    } else {
                        layout
                    };
                    let digits: Vec<u64> = (0..shape.digits).map(|_| rng.random_range(0..base)).collect();
                    let ultra = rng.random_range(0..shape.ultra);
                    build_instance(&p, bounds, &layout, &colours, &digits, ultra)
                })
                .collect();
            report.space = trials;
            let found = samples.into_par_iter().enumerate().find_map_first(|(k, inst)| {
                verdict_of(c, &p, &inst).witness.is_none().then_some(Counterexample {
                    index: k as u64,
                    instance: inst,
                })
            });
            report.instances_tried = found.as_ref().map_or(trials, |f| f.index + 1);
            report.counterexample = found;
        }
    }
    Ok(report)
}
