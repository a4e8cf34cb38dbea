//! Minimal walks `β = γ₀ > γ₁ > … > γ_k = α` along a C-sequence.
//!
//! Each step goes to `γ_{ℓ+1} = min{γ ∈ e_{γ_ℓ} : γ ≥ α}`. The walk `ρ(β, α)`
//! is the step sequence without its final entry `α`; its labels read
//! `h(γ_{ℓ+1})` for `ℓ < k`.

pub mod lemmas;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csequence::{CSequence, CsError, Point};
use crate::ordinal::OrdinalKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error(transparent)]
    CSequence(#[from] CsError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{gamma} is not on the walk from {beta} to {alpha}")]
    NotOnWalk { beta: String, gamma: String, alpha: String },
    #[error("{0} is not a limit")]
    NotLimit(String),
}

/// The full step sequence of a walk, including its endpoint `α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WalkTrace<P> {
    steps: Vec<P>,
}

impl<P: Point> WalkTrace<P> {
    pub fn beta(&self) -> &P {
        &self.steps[0]
    }

    pub fn alpha(&self) -> &P {
        self.steps.last().expect("walk has at least one step")
    }

    /// `γ₀, …, γ_k`.
    pub fn steps(&self) -> &[P] {
        &self.steps
    }

    /// `k(β, α)`, the number of steps taken.
    pub fn k(&self) -> usize {
        self.steps.len() - 1
    }

    /// `ρ(β, α) = ⟨γ₀, …, γ_{k-1}⟩`; empty when `α = β`.
    pub fn rho(&self) -> &[P] {
        &self.steps[..self.k()]
    }

    /// `γ_lt(β, α) = γ_{k-1}`, the last entry of `ρ(β, α)`.
    pub fn gamma_lt(&self) -> Option<&P> {
        self.rho().last()
    }

    /// `ρ_h̄(β, α) = ⟨h(γ₁), …, h(γ_k)⟩`.
    pub fn labels<L>(&self, h: impl Fn(&P) -> L) -> Vec<L> {
        self.steps[1..].iter().map(h).collect()
    }

    pub fn to_json<L: Serialize>(&self, h: impl Fn(&P) -> L) -> TraceJson<L> {
        TraceJson {
            beta: self.beta().to_string(),
            alpha: self.alpha().to_string(),
            steps: self.steps.iter().map(ToString::to_string).collect(),
            labels: self.labels(h),
        }
    }
}

/// Serialized form of a trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson<L> {
    pub beta: String,
    pub alpha: String,
    pub steps: Vec<String>,
    pub labels: Vec<L>,
}

/// Walks from `beta` down to `alpha` (`0 < α ≤ β`).
pub fn walk<C: CSequence>(cs: &C, beta: &C::Point, alpha: &C::Point) -> Result<WalkTrace<C::Point>, WalkError> {
    cs.check_domain(beta)?;
    cs.check_domain(alpha)?;
    if *alpha <= C::Point::zero() || alpha > beta {
        return Err(WalkError::Precondition(format!(
            "need 0 < α ≤ β, got α={alpha}, β={beta}"
        )));
    }
    let mut steps = vec![beta.clone()];
    loop {
        let current = steps.last().expect("nonempty");
        if current == alpha {
            return Ok(WalkTrace { steps });
        }
        let next = cs.e_min_at_least(current, alpha)?;
        if next >= *current || next < *alpha {
            return Err(CsError::ProviderCorruption {
                beta: current.to_string(),
                detail: format!("step to {next} leaves [{alpha}, {current})"),
            }
            .into());
        }
        steps.push(next);
    }
}

/// `ρ_h̄(β, α)`.
pub fn walk_labels<C: CSequence, L>(
    cs: &C,
    h: impl Fn(&C::Point) -> L,
    beta: &C::Point,
    alpha: &C::Point,
) -> Result<Vec<L>, WalkError> {
    Ok(walk(cs, beta, alpha)?.labels(h))
}

/// The least `α₀` past which walks to `α ∈ [α₀, δ)` begin with the walk to
/// the limit `δ`: the maximum of `sup(e_{γ_ℓ(β,δ)} ∩ δ) + 1` over the steps
/// `ℓ < k(β, δ)` with `δ ∉ acc(e_{γ_ℓ(β,δ)})`. An empty intersection has
/// supremum 0.
pub fn coherence_threshold<C: CSequence>(cs: &C, beta: &C::Point, delta: &C::Point) -> Result<C::Point, WalkError> {
    if cs.kind(delta) != OrdinalKind::Limit {
        return Err(WalkError::NotLimit(delta.to_string()));
    }
    if delta >= beta {
        return Err(WalkError::Precondition(format!("need δ < β, got δ={delta}, β={beta}")));
    }
    let trace = walk(cs, beta, delta)?;
    let mut threshold = C::Point::zero();
    for gamma in trace.rho() {
        if cs.e_is_accumulation(gamma, delta)? {
            continue;
        }
        let sup = cs.e_sup_below(gamma, delta)?.unwrap_or_else(C::Point::zero);
        let candidate = sup.successor();
        if candidate > threshold {
            threshold = candidate;
        }
    }
    Ok(threshold)
}

/// Checks `ρ(β,α) = ρ(β,γ) ⌢ ρ(γ,α)` and the same for labels, where `γ` is a
/// step `γ_ℓ(β,α)` with `ℓ < k(β,α)`. A `false` result is a bug.
pub fn check_decomposition_law<C: CSequence, L: PartialEq>(
    cs: &C,
    h: impl Fn(&C::Point) -> L,
    beta: &C::Point,
    gamma: &C::Point,
    alpha: &C::Point,
) -> Result<bool, WalkError> {
    let whole = walk(cs, beta, alpha)?;
    if !whole.rho().contains(gamma) {
        return Err(WalkError::NotOnWalk {
            beta: beta.to_string(),
            gamma: gamma.to_string(),
            alpha: alpha.to_string(),
        });
    }
    let upper = walk(cs, beta, gamma)?;
    let lower = walk(cs, gamma, alpha)?;
    let joined: Vec<&C::Point> = upper.rho().iter().chain(lower.rho()).collect();
    let rho_ok = whole.rho().iter().eq(joined);
    let mut joined_labels = upper.labels(&h);
    joined_labels.extend(lower.labels(&h));
    Ok(rho_ok && whole.labels(&h) == joined_labels)
}
