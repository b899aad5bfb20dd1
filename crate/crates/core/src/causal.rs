//! Level-0 potential causality.
//!
//! `g ⇒_r g'` holds when `r` is feasible in some state of a run, `g` is one
//! of its inputs and `g'` one of its outputs. A potential causal path chains
//! such links across strictly increasing state indices of a [`Trace`]: it is
//! built as the run evolves, not by walking one state's reaction graph.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::engine::{is_feasible, FeasibilityMode, Trace};
use crate::error::{Error, Result};
use crate::multiset::{Multiset, Symbol};
use crate::reaction::{ChemistrySpec, ReactionSeq, Step};

/// Default cap on the number of paths a single query may enumerate.
pub const DEFAULT_PATH_BUDGET: usize = 10_000;

/// `source ⇒_via target`, with `via` feasible at `state_index`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CausalEdge {
    pub source: Symbol,
    pub target: Symbol,
    pub via: String,
    pub state_index: usize,
}

/// All causal links induced by the reactions feasible in `state`, in
/// declaration order, then source, then target.
pub fn causal_edges(
    state: &Multiset,
    spec: &ChemistrySpec,
    state_index: usize,
    mode: FeasibilityMode,
) -> Vec<CausalEdge> {
    let mut edges = Vec::new();
    for r in spec.reactions().iter().filter(|r| is_feasible(r, state, mode)) {
        for source in r.input.symbols() {
            for target in r.output.symbols() {
                edges.push(CausalEdge {
                    source: source.clone(),
                    target: target.clone(),
                    via: r.name.clone(),
                    state_index,
                });
            }
        }
    }
    edges
}

/// The potential reaction multigraph of one state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReactionGraph {
    pub state_index: usize,
    pub nodes: BTreeSet<Symbol>,
    pub edges: Vec<CausalEdge>,
    /// Edge targets that are not in the state's support; they are added to
    /// `nodes` so every edge has both endpoints.
    pub output_only: BTreeSet<Symbol>,
}

pub fn reaction_graph(
    state: &Multiset,
    spec: &ChemistrySpec,
    state_index: usize,
    mode: FeasibilityMode,
) -> ReactionGraph {
    let edges = causal_edges(state, spec, state_index, mode);
    let mut nodes = state.support();
    let output_only: BTreeSet<Symbol> = edges
        .iter()
        .filter(|e| !nodes.contains(&e.target))
        .map(|e| e.target.clone())
        .collect();
    nodes.extend(output_only.iter().cloned());
    ReactionGraph { state_index, nodes, edges, output_only }
}

/// `g_0 ⇒_{r_1} g_1 ⇒_{r_2} … ⇒_{r_n} g_n` anchored in a trace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CausalPath {
    pub waypoints: Vec<Symbol>,
    pub steps: ReactionSeq,
}

impl CausalPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn source(&self) -> &Symbol {
        &self.waypoints[0]
    }

    pub fn target(&self) -> &Symbol {
        self.waypoints.last().expect("a path has at least one waypoint")
    }

    /// Checks the link and anchoring invariants against a trace.
    pub fn is_valid(&self, spec: &ChemistrySpec, trace: &Trace, mode: FeasibilityMode) -> bool {
        if self.waypoints.len() != self.steps.len() + 1 {
            return false;
        }
        self.steps.steps().iter().enumerate().all(|(i, step)| {
            let (Ok(r), Ok(state)) = (spec.reaction(&step.reaction), trace.state(step.state)) else {
                return false;
            };
            is_feasible(r, state, mode)
                && r.input.contains_symbol(&self.waypoints[i])
                && r.output.contains_symbol(&self.waypoints[i + 1])
        })
    }
}

impl fmt::Display for CausalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.waypoints[0])?;
        for (step, next) in self.steps.steps().iter().zip(&self.waypoints[1..]) {
            write!(f, " ={step}=> {next}")?;
        }
        Ok(())
    }
}

/// Which reaction occurrences a path may use.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum PathScope {
    /// Any reaction feasible in any state of the trace.
    #[default]
    Whole,
    /// Any reaction feasible in a state with index in `start..=end`.
    Window { start: usize, end: usize },
    /// Only these anchored occurrences (for example the steps of a meta
    /// reaction). Each must be feasible at its anchor.
    Steps(Vec<Step>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathQuery {
    pub max_len: usize,
    pub budget: usize,
    pub mode: FeasibilityMode,
    pub scope: PathScope,
}

impl PathQuery {
    pub fn new(max_len: usize) -> Self {
        PathQuery {
            max_len,
            budget: DEFAULT_PATH_BUDGET,
            mode: FeasibilityMode::Standard,
            scope: PathScope::Whole,
        }
    }

    pub fn mode(mut self, mode: FeasibilityMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn scope(mut self, scope: PathScope) -> Self {
        self.scope = scope;
        self
    }

    pub fn window(self, start: usize, end: usize) -> Self {
        self.scope(PathScope::Window { start, end })
    }
}

type Emit<'e> = dyn FnMut(&[usize], &[Occurrence]) -> Result<()> + 'e;

#[derive(Clone, Copy)]
struct Occurrence {
    state: usize,
    reaction: usize,
}

/// Precomputed search structure shared by every (source, target) query on
/// the same trace and scope.
struct Occurrences<'a> {
    spec: &'a ChemistrySpec,
    // occurrences grouped by anchor state, ascending
    groups: Vec<Vec<Occurrence>>,
    inputs: Vec<Vec<bool>>,
    outputs: Vec<Vec<usize>>,
    molecules: usize,
}

impl<'a> Occurrences<'a> {
    fn build(spec: &'a ChemistrySpec, trace: &Trace, query: &PathQuery) -> Result<Self> {
        let molecules = spec.molecules().len();
        let index = |s: &Symbol| spec.molecule_index(s).expect("reaction symbols are declared");
        let inputs = spec
            .reactions()
            .iter()
            .map(|r| {
                let mut mask = vec![false; molecules];
                r.input.symbols().for_each(|s| mask[index(s)] = true);
                mask
            })
            .collect();
        let outputs = spec.reactions().iter().map(|r| r.output.symbols().map(index).collect()).collect();

        let mut all: Vec<Occurrence> = Vec::new();
        let feasible_at = |state: usize| -> Vec<Occurrence> {
            spec.reactions()
                .iter()
                .enumerate()
                .filter(|(_, r)| is_feasible(r, &trace.states()[state], query.mode))
                .map(|(reaction, _)| Occurrence { state, reaction })
                .collect()
        };
        match &query.scope {
            PathScope::Whole => (0..trace.len()).for_each(|i| all.extend(feasible_at(i))),
            PathScope::Window { start, end } => {
                if *end >= trace.len() {
                    return Err(Error::IndexOutOfRange { index: *end, len: trace.len() });
                }
                (*start..=*end).for_each(|i| all.extend(feasible_at(i)));
            }
            PathScope::Steps(steps) => {
                for step in steps {
                    let r = spec.reaction(&step.reaction)?;
                    if !is_feasible(r, trace.state(step.state)?, query.mode) {
                        return Err(Error::Infeasible { reaction: step.reaction.clone() });
                    }
                    let reaction = spec.reaction_index(&step.reaction).expect("looked up above");
                    all.push(Occurrence { state: step.state, reaction });
                }
                all.sort_by_key(|o| (o.state, o.reaction));
                all.dedup_by_key(|o| (o.state, o.reaction));
            }
        }

        let mut groups: Vec<Vec<Occurrence>> = Vec::new();
        for occ in all {
            match groups.last_mut() {
                Some(g) if g[0].state == occ.state => g.push(occ),
                _ => groups.push(vec![occ]),
            }
        }
        Ok(Occurrences { spec, groups, inputs, outputs, molecules })
    }

    /// `reach[k][g][s]`: from symbol `s`, `target` is reachable in at most
    /// `k` links using occurrences in groups `g..`.
    fn reachability(&self, target: usize, max_len: usize) -> Vec<Vec<Vec<bool>>> {
        let n_groups = self.groups.len();
        let empty = vec![false; self.molecules];
        let mut reach = vec![vec![empty.clone(); n_groups + 1]; max_len + 1];
        for k in 1..=max_len {
            for g in (0..n_groups).rev() {
                let mut row = reach[k][g + 1].clone();
                for occ in &self.groups[g] {
                    let continues = self.outputs[occ.reaction]
                        .iter()
                        .any(|&o| o == target || (k > 1 && reach[k - 1][g + 1][o]));
                    if continues {
                        for (s, &is_input) in self.inputs[occ.reaction].iter().enumerate() {
                            row[s] |= is_input;
                        }
                    }
                }
                reach[k][g] = row;
            }
        }
        reach
    }

    /// Calls `emit` for every path from `source` to `target` of length
    /// `1..=max_len`, in depth-first order.
    fn walk(
        &self,
        source: usize,
        target: usize,
        max_len: usize,
        emit: &mut Emit<'_>,
    ) -> Result<()> {
        if max_len == 0 || self.groups.is_empty() {
            return Ok(());
        }
        let reach = self.reachability(target, max_len);
        let mut waypoints = vec![source];
        let mut steps = Vec::with_capacity(max_len);
        self.dfs(0, max_len, target, &reach, &mut waypoints, &mut steps, emit)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        first_group: usize,
        remaining: usize,
        target: usize,
        reach: &[Vec<Vec<bool>>],
        waypoints: &mut Vec<usize>,
        steps: &mut Vec<Occurrence>,
        emit: &mut Emit<'_>,
    ) -> Result<()> {
        let current = *waypoints.last().expect("non-empty");
        for g in first_group..self.groups.len() {
            // reach is monotone in the group index
            if !reach[remaining][g][current] {
                return Ok(());
            }
            for &occ in &self.groups[g] {
                if !self.inputs[occ.reaction][current] {
                    continue;
                }
                for &next in &self.outputs[occ.reaction] {
                    waypoints.push(next);
                    steps.push(occ);
                    if next == target {
                        emit(waypoints, steps)?;
                    }
                    if remaining > 1 && g + 1 < self.groups.len() && reach[remaining - 1][g + 1][next] {
                        self.dfs(g + 1, remaining - 1, target, reach, waypoints, steps, emit)?;
                    }
                    waypoints.pop();
                    steps.pop();
                }
            }
        }
        Ok(())
    }

    fn to_path(&self, waypoints: &[usize], steps: &[Occurrence]) -> CausalPath {
        let molecules = self.spec.molecules();
        let reactions = self.spec.reactions();
        let steps = steps
            .iter()
            .map(|o| Step::new(reactions[o.reaction].name.clone(), o.state))
            .collect();
        CausalPath {
            waypoints: waypoints.iter().map(|&i| molecules[i].clone()).collect(),
            steps: ReactionSeq::new(steps).expect("anchors strictly increase by construction"),
        }
    }
}

fn molecule(spec: &ChemistrySpec, symbol: &str) -> Result<usize> {
    spec.molecule_index(symbol)
        .ok_or_else(|| Error::UnknownSymbol(Symbol::from(symbol)))
}

/// Every potential causal path from `from` to `to` with at most
/// `query.max_len` links inside `query.scope`.
pub fn causal_paths(
    spec: &ChemistrySpec,
    trace: &Trace,
    from: &str,
    to: &str,
    query: &PathQuery,
) -> Result<Vec<CausalPath>> {
    let (source, target) = (molecule(spec, from)?, molecule(spec, to)?);
    let occurrences = Occurrences::build(spec, trace, query)?;
    let mut paths = Vec::new();
    occurrences.walk(source, target, query.max_len, &mut |w, s| {
        if paths.len() == query.budget {
            return Err(Error::PathBudgetExceeded { limit: query.budget });
        }
        paths.push(occurrences.to_path(w, s));
        Ok(())
    })?;
    Ok(paths)
}

/// Number of distinct potential causal paths `(a, b)` with `a ∈ sources`
/// and `b ∈ targets` inside `query.scope`.
pub fn count_pairwise_paths<'a>(
    spec: &ChemistrySpec,
    trace: &Trace,
    sources: impl IntoIterator<Item = &'a Symbol>,
    targets: impl IntoIterator<Item = &'a Symbol>,
    query: &PathQuery,
) -> Result<usize> {
    let sources: BTreeSet<usize> = sources.into_iter().map(|s| molecule(spec, s)).collect::<Result<_>>()?;
    let targets: BTreeSet<usize> = targets.into_iter().map(|s| molecule(spec, s)).collect::<Result<_>>()?;
    if sources.is_empty() || targets.is_empty() {
        return Ok(0);
    }
    let occurrences = Occurrences::build(spec, trace, query)?;
    let mut count = 0usize;
    for &t in &targets {
        for &s in &sources {
            occurrences.walk(s, t, query.max_len, &mut |_, _| {
                if count == query.budget {
                    return Err(Error::PathBudgetExceeded { limit: query.budget });
                }
                count += 1;
                Ok(())
            })?;
        }
    }
    Ok(count)
}
