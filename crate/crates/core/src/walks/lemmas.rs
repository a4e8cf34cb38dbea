//! Per-walk checks of the walk lemmas. Each checker returns the violations it
//! found; an empty vector means every clause held.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{coherence_threshold, walk, WalkTrace};
use crate::csequence::{CSequence, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    /// Every step `γ_ℓ` with `ℓ ≥ 1` lies in `[α, β)`.
    StepBounds,
    /// The trace starts at `β`, strictly decreases, ends at `α`, and
    /// `α ∈ e_{γ_lt}`.
    Descent,
    /// Each step is the least member of `e_{γ_ℓ}` that is `≥ α`.
    Minimality,
    /// `ρ(β,α) = ρ(β,γ) ⌢ ρ(γ,α)` for every step `γ`.
    Decomposition,
    /// The label sequence has length `k(β, α)`.
    LabelLength,
    /// Walks past the threshold agree with the walk to `δ` on its steps.
    CoherenceSteps,
    /// Non-accumulation of `δ` in `e_{γ_lt(β,δ)}` matches the next step.
    CoherenceNacc,
    /// `ρ(β,δ)` is an initial segment of `ρ(β,α)`.
    CoherencePrefix,
    /// `ρ(β,δ) ⌢ ⟨δ⟩` and its labels are initial segments.
    CoherenceExtension,
    /// A walk or C-sequence query failed outright.
    Provider,
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("lemma serializes");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaViolation {
    pub lemma: Lemma,
    pub beta: String,
    pub alpha: String,
    pub detail: String,
}

impl LemmaViolation {
    fn new(lemma: Lemma, beta: impl fmt::Display, alpha: impl fmt::Display, detail: impl Into<String>) -> Self {
        Self {
            lemma,
            beta: beta.to_string(),
            alpha: alpha.to_string(),
            detail: detail.into(),
        }
    }
}

/// Checks the step bounds, descent, minimality, decomposition and label
/// length lemmas on the walk from `beta` to `alpha` (`0 < α < β`).
pub fn check_walk<C: CSequence, L: PartialEq>(
    cs: &C,
    h: impl Fn(&C::Point) -> L,
    beta: &C::Point,
    alpha: &C::Point,
) -> Vec<LemmaViolation> {
    let mut out = Vec::new();
    let v = |lemma, detail: String| LemmaViolation::new(lemma, beta, alpha, detail);
    let trace = match walk(cs, beta, alpha) {
        Ok(t) => t,
        Err(e) => {
            out.push(v(Lemma::Provider, e.to_string()));
            return out;
        }
    };
    let steps = trace.steps();

    for (l, g) in steps.iter().enumerate().skip(1) {
        if g < alpha || g >= beta {
            out.push(v(Lemma::StepBounds, format!("γ_{l} = {g}")));
        }
    }

    if steps.first() != Some(beta) || steps.last() != Some(alpha) {
        out.push(v(Lemma::Descent, "trace endpoints".into()));
    }
    if steps.windows(2).any(|w| w[0] <= w[1]) {
        out.push(v(Lemma::Descent, "not strictly decreasing".into()));
    }
    if trace.k() == 0 {
        out.push(v(Lemma::Descent, "k = 0 for α < β".into()));
    }
    match trace.gamma_lt().map(|lt| cs.e_contains(lt, alpha)) {
        Some(Ok(true)) => {}
        Some(Ok(false)) => out.push(v(Lemma::Descent, "α ∉ e_{γ_lt}".into())),
        Some(Err(e)) => out.push(v(Lemma::Provider, e.to_string())),
        None => {}
    }

    // Minimality via membership and the supremum below the next step, not
    // through the query the walk itself used.
    for (l, w) in steps.windows(2).enumerate() {
        let (cur, next) = (&w[0], &w[1]);
        match (cs.e_contains(cur, next), cs.e_sup_below(cur, next)) {
            (Ok(true), Ok(below)) => {
                if below.is_some_and(|b| b >= *alpha) {
                    out.push(v(
                        Lemma::Minimality,
                        format!("e_{cur} has a member in [{alpha}, {next})"),
                    ));
                }
            }
            (Ok(false), _) => out.push(v(Lemma::Minimality, format!("γ_{} = {next} ∉ e_{cur}", l + 1))),
            (Err(e), _) | (_, Err(e)) => out.push(v(Lemma::Provider, e.to_string())),
        }
    }

    let labels = trace.labels(&h);
    if labels.len() != trace.k() {
        out.push(v(
            Lemma::LabelLength,
            format!("{} labels, k = {}", labels.len(), trace.k()),
        ));
    }

    for gamma in trace.rho().iter().skip(1) {
        match (walk(cs, beta, gamma), walk(cs, gamma, alpha)) {
            (Ok(upper), Ok(lower)) => {
                let joined: Vec<&C::Point> = upper.rho().iter().chain(lower.rho()).collect();
                let mut joined_labels = upper.labels(&h);
                joined_labels.extend(lower.labels(&h));
                if !trace.rho().iter().eq(joined) || labels != joined_labels {
                    out.push(v(Lemma::Decomposition, format!("split at γ = {gamma}")));
                }
            }
            (Err(e), _) | (_, Err(e)) => out.push(v(Lemma::Provider, e.to_string())),
        }
    }
    out
}

/// Checks the coherence clauses for one `α ∈ [α₀, δ)`, where `α₀` is
/// [`coherence_threshold`] for `(β, δ)` and `delta_trace` is the walk from
/// `β` to the limit `δ`.
pub fn check_coherence<C: CSequence, L: PartialEq>(
    cs: &C,
    h: impl Fn(&C::Point) -> L,
    delta_trace: &WalkTrace<C::Point>,
    alpha: &C::Point,
) -> Vec<LemmaViolation> {
    let beta = delta_trace.beta();
    let delta = delta_trace.alpha();
    let mut out = Vec::new();
    let v = |lemma, detail: String| LemmaViolation::new(lemma, beta, alpha, detail);
    let trace = match walk(cs, beta, alpha) {
        Ok(t) => t,
        Err(e) => {
            out.push(v(Lemma::Provider, e.to_string()));
            return out;
        }
    };
    let k_delta = delta_trace.k();

    // (i) γ_ℓ(β,δ) = γ_ℓ(β,α) for ℓ < k(β,δ)
    if trace.steps().len() <= k_delta || trace.steps()[..k_delta] != delta_trace.steps()[..k_delta] {
        out.push(v(Lemma::CoherenceSteps, format!("δ = {delta}")));
        return out;
    }

    // (ii) δ ∈ nacc(e_{γ_lt(β,δ)}) ⇔ γ_{k(β,δ)}(β,α) = δ ⇔ ¬(δ > γ_{k(β,δ)}(β,α))
    let lt = delta_trace.gamma_lt().expect("δ < β");
    let nacc = match cs.e_nacc(lt, delta) {
        Ok(b) => b,
        Err(e) => {
            out.push(v(Lemma::Provider, e.to_string()));
            return out;
        }
    };
    let next = &trace.steps()[k_delta];
    let hits_delta = next == delta;
    let not_below = !(delta > next);
    if nacc != hits_delta || hits_delta != not_below {
        out.push(v(
            Lemma::CoherenceNacc,
            format!("δ = {delta}: nacc = {nacc}, γ_k(β,α) = {next}"),
        ));
    }

    // (iii)
    if !trace.rho().starts_with(delta_trace.rho()) {
        out.push(v(Lemma::CoherencePrefix, format!("δ = {delta}")));
    }

    // (iv) The label of the step γ_lt(β,δ) → δ is h(δ), which is already the
    // last entry of ρ_h̄(β,δ); the labelled form of the extension is
    // therefore ρ_h̄(β,δ) ⊴ ρ_h̄(β,α) with that last entry equal to h(δ).
    if nacc {
        let mut extended = delta_trace.rho().to_vec();
        extended.push(delta.clone());
        let delta_labels = delta_trace.labels(&h);
        let labels = trace.labels(&h);
        let last_is_delta = delta_labels.last().is_some_and(|l| *l == h(delta));
        if !trace.rho().starts_with(&extended) || !labels.starts_with(&delta_labels) || !last_is_delta {
            out.push(v(Lemma::CoherenceExtension, format!("δ = {delta}")));
        }
    }
    out
}

/// Runs [`check_coherence`] for every sampled `α`, computing the threshold
/// first; samples outside `[α₀, δ)` are skipped and counted.
pub fn check_coherence_samples<C: CSequence, L: PartialEq>(
    cs: &C,
    h: impl Fn(&C::Point) -> L,
    beta: &C::Point,
    delta: &C::Point,
    alphas: &[C::Point],
) -> (C::Point, usize, Vec<LemmaViolation>) {
    let fail = |e: super::WalkError| vec![LemmaViolation::new(Lemma::Provider, beta, delta, e.to_string())];
    let threshold = match coherence_threshold(cs, beta, delta) {
        Ok(t) => t,
        Err(e) => return (C::Point::zero(), 0, fail(e)),
    };
    let delta_trace = match walk(cs, beta, delta) {
        Ok(t) => t,
        Err(e) => return (threshold, 0, fail(e)),
    };
    let mut checked = 0;
    let mut out = Vec::new();
    for alpha in alphas.iter().filter(|a| **a >= threshold && *a < delta) {
        checked += 1;
        out.extend(check_coherence(cs, &h, &delta_trace, alpha));
    }
    (threshold, checked, out)
}
