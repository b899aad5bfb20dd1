//! Deterministic sequential simulation and cycle detection.
//!
//! Exactly one reaction fires per transition. Which one is decided by a
//! [`SchedulerPolicy`] over the chemistry's declaration order, so a
//! `(spec, policy, mode, budget)` tuple always yields the same [`Trace`].

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::reaction::{ChemistrySpec, Reaction, ReactionSeq};

/// How the availability of a reaction's inputs is compared with a state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibilityMode {
    /// `P(g) >= input(g)`: the usual multiset-rewriting rule.
    #[default]
    Standard,
    /// `P(g) > input(g)`: a reaction may never exhaust an input species.
    Strict,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulerPolicy {
    /// The feasible reaction declared first.
    #[default]
    FirstDeclared,
    /// The first feasible reaction declared after the previously executed
    /// one, wrapping around.
    RoundRobin,
}

impl SchedulerPolicy {
    pub const ALL: [SchedulerPolicy; 2] = [SchedulerPolicy::FirstDeclared, SchedulerPolicy::RoundRobin];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// No reaction was feasible in the last state.
    Terminated,
    /// The step budget ran out while a reaction was still feasible.
    BudgetExhausted,
}

pub fn is_feasible(reaction: &Reaction, state: &Multiset, mode: FeasibilityMode) -> bool {
    reaction.input.iter().all(|(g, need)| {
        let have = state.count(g);
        match mode {
            FeasibilityMode::Standard => have >= need,
            FeasibilityMode::Strict => have > need,
        }
    })
}

/// Fires `reaction` on `state`: `(P - input) ∪ output`.
pub fn apply(reaction: &Reaction, state: &Multiset, mode: FeasibilityMode) -> Result<Multiset> {
    if !is_feasible(reaction, state, mode) {
        return Err(Error::Infeasible { reaction: reaction.name.clone() });
    }
    Ok(state.subtract(&reaction.input).union(&reaction.output))
}

/// Declaration indices of every reaction feasible in `state`.
pub fn feasible_reactions(spec: &ChemistrySpec, state: &Multiset, mode: FeasibilityMode) -> Vec<usize> {
    spec.reactions()
        .iter()
        .enumerate()
        .filter(|(_, r)| is_feasible(r, state, mode))
        .map(|(i, _)| i)
        .collect()
}

/// Picks the reaction to fire in `state`, given the declaration index of the
/// previously executed reaction (if any).
pub fn schedule<'s>(
    state: &Multiset,
    spec: &'s ChemistrySpec,
    policy: SchedulerPolicy,
    mode: FeasibilityMode,
    previous: Option<usize>,
) -> Option<&'s Reaction> {
    let reactions = spec.reactions();
    let n = reactions.len();
    if n == 0 {
        return None;
    }
    let start = match (policy, previous) {
        (SchedulerPolicy::RoundRobin, Some(p)) => (p + 1) % n,
        _ => 0,
    };
    (0..n)
        .map(|k| &reactions[(start + k) % n])
        .find(|r| is_feasible(r, state, mode))
}

/// A recorded run: `executed[i]` turned `states[i]` into `states[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    states: Vec<Multiset>,
    executed: Vec<String>,
    stop: StopReason,
}

impl Trace {
    /// Assembles a trace from parts, checking only the length relation.
    /// Use [`Trace::validate`] to check transitions against a chemistry.
    pub fn from_parts(states: Vec<Multiset>, executed: Vec<String>, stop: StopReason) -> Result<Self> {
        if states.is_empty() || executed.len() + 1 != states.len() {
            return Err(Error::InconsistentTrace(format!(
                "{} states with {} executed reactions",
                states.len(),
                executed.len()
            )));
        }
        Ok(Trace { states, executed, stop })
    }

    pub fn states(&self) -> &[Multiset] {
        &self.states
    }

    pub fn state(&self, index: usize) -> Result<&Multiset> {
        self.states
            .get(index)
            .ok_or(Error::IndexOutOfRange { index, len: self.states.len() })
    }

    pub fn executed(&self) -> &[String] {
        &self.executed
    }

    pub fn stop(&self) -> StopReason {
        self.stop
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last_state(&self) -> &Multiset {
        self.states.last().expect("a trace has at least one state")
    }

    /// Checks that every recorded transition is a feasible firing of the
    /// named reaction under `mode`.
    pub fn validate(&self, spec: &ChemistrySpec, mode: FeasibilityMode) -> Result<()> {
        if self.states[0] != *spec.initial() {
            return Err(Error::InconsistentTrace("state 0 differs from the initial population".into()));
        }
        for (i, name) in self.executed.iter().enumerate() {
            let r = spec.reaction(name)?;
            let next = apply(r, &self.states[i], mode).map_err(|_| {
                Error::InconsistentTrace(format!("`{name}` is not feasible in state {i}"))
            })?;
            if next != self.states[i + 1] {
                return Err(Error::InconsistentTrace(format!(
                    "state {} is not the result of firing `{name}` in state {i}",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// Incremental simulator; [`simulate`] drives one to completion.
#[derive(Debug, Clone)]
pub struct Simulator<'s> {
    spec: &'s ChemistrySpec,
    policy: SchedulerPolicy,
    mode: FeasibilityMode,
    state: Multiset,
    previous: Option<usize>,
}

impl<'s> Simulator<'s> {
    pub fn new(spec: &'s ChemistrySpec, policy: SchedulerPolicy, mode: FeasibilityMode) -> Self {
        Self::resume(spec, policy, mode, spec.initial().clone(), None)
    }

    /// Starts from an arbitrary state, as if `previous` had just fired.
    pub fn resume(
        spec: &'s ChemistrySpec,
        policy: SchedulerPolicy,
        mode: FeasibilityMode,
        state: Multiset,
        previous: Option<usize>,
    ) -> Self {
        Simulator { spec, policy, mode, state, previous }
    }

    pub fn state(&self) -> &Multiset {
        &self.state
    }

    /// Fires one reaction; `None` when nothing is feasible.
    pub fn step(&mut self) -> Option<&'s Reaction> {
        let r = schedule(&self.state, self.spec, self.policy, self.mode, self.previous)?;
        self.state = self.state.subtract(&r.input).union(&r.output);
        self.previous = self.spec.reaction_index(&r.name);
        Some(r)
    }
}

/// Runs at most `max_steps` transitions from the chemistry's initial state.
pub fn simulate(
    spec: &ChemistrySpec,
    max_steps: usize,
    policy: SchedulerPolicy,
    mode: FeasibilityMode,
) -> Trace {
    let mut sim = Simulator::new(spec, policy, mode);
    let mut states = vec![sim.state().clone()];
    let mut executed = Vec::new();
    let mut stop = StopReason::BudgetExhausted;
    for _ in 0..max_steps {
        match sim.step() {
            Some(r) => {
                executed.push(r.name.clone());
                states.push(sim.state().clone());
            }
            None => {
                stop = StopReason::Terminated;
                break;
            }
        }
    }
    if stop == StopReason::BudgetExhausted && schedule(sim.state(), spec, policy, mode, None).is_none() {
        stop = StopReason::Terminated;
    }
    Trace { states, executed, stop }
}

/// Checks each step's reaction against its anchored state.
pub fn is_feasible_seq(
    seq: &ReactionSeq,
    trace: &Trace,
    spec: &ChemistrySpec,
    mode: FeasibilityMode,
) -> Result<bool> {
    for step in seq.steps() {
        let state = trace.state(step.state)?;
        if !is_feasible(spec.reaction(&step.reaction)?, state, mode) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `states[n + k*l + r] == states[n + r]` for `k >= 1`, `0 < r <= l`: the
/// run is `<P_0 .. P_n, [P_{n+1} .. P_{n+l}]^∞>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleWitness {
    pub prefix_len: usize,
    pub cycle_len: usize,
}

impl CycleWitness {
    /// Index of the first state of the cycle body.
    pub fn cycle_start(&self) -> usize {
        self.prefix_len + 1
    }

    /// Number of states a trace needs to show the body twice.
    pub fn required_states(&self) -> usize {
        self.prefix_len + 2 * self.cycle_len + 1
    }

    /// True when every recorded state is consistent with this witness and the
    /// cycle body is observed at least twice.
    pub fn holds_for(&self, states: &[Multiset]) -> bool {
        if self.cycle_len == 0 || states.len() < self.required_states() {
            return false;
        }
        (self.cycle_start()..states.len() - self.cycle_len)
            .all(|j| states[j + self.cycle_len] == states[j])
    }
}

pub fn detect_cycle(trace: &Trace) -> Option<CycleWitness> {
    detect_cycle_in(trace.states())
}

/// Smallest period `l`, then smallest prefix `n` for it, such that the
/// recorded states satisfy the cyclic-run equation and contain the cycle
/// body twice. `None` means no cycle within the recorded horizon.
pub fn detect_cycle_in(states: &[Multiset]) -> Option<CycleWitness> {
    let len = states.len();
    let hashes: Vec<u64> = states
        .iter()
        .map(|s| {
            let mut h = DefaultHasher::new();
            s.canonical_encode().hash(&mut h);
            h.finish()
        })
        .collect();
    let same = |i: usize, j: usize| hashes[i] == hashes[j] && states[i] == states[j];

    for l in 1..len {
        // need n + 2l + 1 <= len with n >= 0
        if 2 * l + 1 > len {
            break;
        }
        // last j >= 1 where states[j + l] != states[j]; n must be >= that j
        let mismatch = (1..len - l).rev().find(|&j| !same(j, j + l));
        let n = mismatch.unwrap_or(0);
        if n + 2 * l < len {
            return Some(CycleWitness { prefix_len: n, cycle_len: l });
        }
    }
    None
}
