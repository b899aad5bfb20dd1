//! Self-reproduction of single molecules.
//!
//! A molecule `g` is potentially self-reproducing in a run when the run
//! contains a potential causal path from `g` to some `g' ∼ g` along which
//! the population of `g` grows while some other consumed input shrinks.
//! On a cyclic run under sequential scheduling, such a path that is
//! feasible inside the cycle is also checked against the reactions that
//! actually fire there.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::causal::{causal_paths, CausalPath, PathQuery, PathScope, DEFAULT_PATH_BUDGET};
use crate::engine::{simulate, CycleWitness, FeasibilityMode, SchedulerPolicy, Trace};
use crate::error::{Error, Result};
use crate::multiset::Symbol;
use crate::reaction::{seq_input, ChemistrySpec};

/// Observer-defined equivalence on molecules: identity, widened by
/// declared classes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EquivalenceSpec {
    classes: Vec<BTreeSet<Symbol>>,
    class_of: BTreeMap<Symbol, usize>,
}

impl EquivalenceSpec {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_classes<I, C, S>(classes: I) -> Result<Self>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = S>,
        S: Into<Symbol>,
    {
        let mut eq = EquivalenceSpec::default();
        for class in classes {
            let members: BTreeSet<Symbol> = class.into_iter().map(Into::into).collect();
            let idx = eq.classes.len();
            for m in &members {
                if eq.class_of.insert(m.clone(), idx).is_some() {
                    return Err(Error::MalformedEntity(format!(
                        "`{m}` belongs to two equivalence classes"
                    )));
                }
            }
            eq.classes.push(members);
        }
        Ok(eq)
    }

    pub fn from_spec(spec: &ChemistrySpec) -> Self {
        Self::from_classes(spec.equivalences().iter().map(|c| c.members.iter().cloned()))
            .expect("chemistry validation rejects overlapping classes")
    }

    pub fn equivalent(&self, a: &str, b: &str) -> bool {
        a == b
            || matches!(
                (self.class_of.get(a), self.class_of.get(b)),
                (Some(x), Some(y)) if x == y
            )
    }

    /// `g` and everything equivalent to it, sorted.
    pub fn class_members(&self, g: &Symbol) -> Vec<Symbol> {
        match self.class_of.get(g) {
            Some(&i) => self.classes[i].iter().cloned().collect(),
            None => vec![g.clone()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    PotentiallySelfReproducing,
    ActuallySelfReproducing,
    Rejected,
}

impl Status {
    pub fn is_positive(self) -> bool {
        self != Status::Rejected
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "reason")]
pub enum Level0Failure {
    NoCausalPath,
    MaterialBasisViolated { offending: CausalPath },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Level0Verdict {
    pub subject: Symbol,
    pub status: Status,
    /// Paths that satisfy the material-basis condition, shortest first.
    pub witness_paths: Vec<CausalPath>,
    pub partner: Option<Symbol>,
    /// Union of the depleted sets `X` of every witness path.
    pub consumed: BTreeSet<Symbol>,
    pub failure: Option<Level0Failure>,
    /// Number of causal paths examined, passing or not.
    pub paths_examined: usize,
    pub max_len: usize,
    /// Anchor window searched, inclusive.
    pub window: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfRepQuery {
    pub max_len: usize,
    pub budget: usize,
    pub mode: FeasibilityMode,
    /// Inclusive anchor window; the whole trace when `None`.
    pub window: Option<(usize, usize)>,
}

impl Default for SelfRepQuery {
    fn default() -> Self {
        SelfRepQuery {
            max_len: 4,
            budget: DEFAULT_PATH_BUDGET,
            mode: FeasibilityMode::Standard,
            window: None,
        }
    }
}

impl SelfRepQuery {
    pub fn new(max_len: usize) -> Self {
        SelfRepQuery { max_len, ..Default::default() }
    }

    pub fn mode(mut self, mode: FeasibilityMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn window(mut self, start: usize, end: usize) -> Self {
        self.window = Some((start, end));
        self
    }

    pub fn budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }
}

pub fn equivalent(g: &str, g2: &str, eq: &EquivalenceSpec) -> bool {
    eq.equivalent(g, g2)
}

/// Material basis of one path for subject `g`: compares the state in which
/// the first step is anchored with the state produced after the last
/// anchored step. Succeeds with the set `X` of other inputs of the path
/// whose population fell, provided `g` grew and `X` is non-empty.
pub fn check_material_basis(
    spec: &ChemistrySpec,
    path: &CausalPath,
    trace: &Trace,
    g: &str,
) -> Result<(bool, BTreeSet<Symbol>)> {
    let (Some(first), Some(last)) = (path.steps.first_state(), path.steps.last_state()) else {
        return Ok((false, BTreeSet::new()));
    };
    let before = trace.state(first)?;
    trace.state(last)?;
    // the successor of the last anchored state is not recorded
    let Ok(after) = trace.state(last + 1) else {
        return Ok((false, BTreeSet::new()));
    };
    if after.count(g) <= before.count(g) {
        return Ok((false, BTreeSet::new()));
    }
    let depleted: BTreeSet<Symbol> = seq_input(&path.steps, spec)?
        .symbols()
        .filter(|s| s.as_str() != g && after.count(s) < before.count(s))
        .cloned()
        .collect();
    if depleted.is_empty() {
        return Ok((false, depleted));
    }
    Ok((true, depleted))
}

fn resolve_window(trace: &Trace, window: Option<(usize, usize)>) -> Result<(usize, usize)> {
    let (start, end) = window.unwrap_or((0, trace.len() - 1));
    if end >= trace.len() {
        return Err(Error::IndexOutOfRange { index: end, len: trace.len() });
    }
    Ok((start, end))
}

/// Searches the trace for a self-reproducing path of `g`.
///
/// Every causal path from `g` to an equivalent molecule of at most
/// `query.max_len` links is enumerated; paths passing the material-basis
/// check become witnesses. Verdicts are relative to the searched window and
/// path length.
pub fn detect_selfrep(
    spec: &ChemistrySpec,
    trace: &Trace,
    g: &str,
    eq: &EquivalenceSpec,
    query: &SelfRepQuery,
) -> Result<Level0Verdict> {
    let subject = spec
        .molecules()
        .iter()
        .find(|m| m.as_str() == g)
        .cloned()
        .ok_or_else(|| Error::UnknownSymbol(Symbol::from(g)))?;
    let window = resolve_window(trace, query.window)?;

    let mut examined = 0usize;
    let mut witnesses: Vec<(Symbol, CausalPath, BTreeSet<Symbol>)> = Vec::new();
    let mut offending = None;
    for partner in eq.class_members(&subject).into_iter().filter(|p| spec.is_declared(p)) {
        let remaining = query.budget - examined;
        let paths_query = PathQuery::new(query.max_len)
            .mode(query.mode)
            .budget(remaining)
            .scope(PathScope::Window { start: window.0, end: window.1 });
        let paths = causal_paths(spec, trace, g, &partner, &paths_query)
            .map_err(|e| match e {
                Error::PathBudgetExceeded { .. } => Error::PathBudgetExceeded { limit: query.budget },
                other => other,
            })?;
        examined += paths.len();
        for path in paths {
            let (ok, depleted) = check_material_basis(spec, &path, trace, g)?;
            if ok {
                witnesses.push((partner.clone(), path, depleted));
            } else if offending.is_none() {
                offending = Some(path);
            }
        }
    }
    witnesses.sort_by_key(|(_, p, _)| p.len());

    let mut verdict = Level0Verdict {
        subject,
        status: Status::Rejected,
        witness_paths: Vec::new(),
        partner: None,
        consumed: BTreeSet::new(),
        failure: None,
        paths_examined: examined,
        max_len: query.max_len,
        window,
    };
    if witnesses.is_empty() {
        verdict.failure = Some(match offending {
            Some(offending) => Level0Failure::MaterialBasisViolated { offending },
            None => Level0Failure::NoCausalPath,
        });
        return Ok(verdict);
    }
    verdict.status = Status::PotentiallySelfReproducing;
    verdict.partner = Some(witnesses[0].0.clone());
    for (_, path, depleted) in witnesses {
        verdict.consumed.extend(depleted);
        verdict.witness_paths.push(path);
    }
    Ok(verdict)
}

/// Checks a potentially self-reproducing `g` on a cyclic run.
///
/// The search is restricted to anchors in the cycle (two periods from
/// `n + 1`, within the recorded trace). A witness is promoted to actual
/// self-reproduction when every one of its reactions fires within one
/// period of the cycle; otherwise the restricted verdict is returned as is.
pub fn verify_theorem1(
    spec: &ChemistrySpec,
    trace: &Trace,
    cycle: &CycleWitness,
    g: &str,
    eq: &EquivalenceSpec,
    query: &SelfRepQuery,
) -> Result<Level0Verdict> {
    if !cycle.holds_for(trace.states()) {
        return Err(Error::WitnessMismatch(format!(
            "states do not repeat with prefix {} and period {}",
            cycle.prefix_len, cycle.cycle_len
        )));
    }
    let start = cycle.cycle_start();
    let end = (cycle.prefix_len + 2 * cycle.cycle_len).min(trace.len() - 1);
    let restricted = SelfRepQuery { window: Some((start, end)), ..query.clone() };
    let mut verdict = detect_selfrep(spec, trace, g, eq, &restricted)?;
    if verdict.status != Status::PotentiallySelfReproducing {
        return Ok(verdict);
    }

    let period: BTreeSet<&str> = trace.executed()[start..start + cycle.cycle_len]
        .iter()
        .map(String::as_str)
        .collect();
    let executed: Vec<CausalPath> = verdict
        .witness_paths
        .iter()
        .filter(|p| p.steps.reaction_names().all(|r| period.contains(r)))
        .cloned()
        .collect();
    if executed.is_empty() {
        return Ok(verdict);
    }
    verdict.consumed.clear();
    for path in &executed {
        verdict.consumed.extend(check_material_basis(spec, path, trace, g)?.1);
    }
    verdict.partner = Some(executed[0].target().clone());
    verdict.witness_paths = executed;
    verdict.status = Status::ActuallySelfReproducing;
    Ok(verdict)
}

/// Runs [`detect_selfrep`] for every declared molecule, in declaration
/// order. Molecules are analysed in parallel.
pub fn sweep_molecules(
    spec: &ChemistrySpec,
    trace: &Trace,
    eq: &EquivalenceSpec,
    query: &SelfRepQuery,
) -> Vec<(Symbol, Result<Level0Verdict>)> {
    spec.molecules()
        .par_iter()
        .map(|g| (g.clone(), detect_selfrep(spec, trace, g, eq, query)))
        .collect()
}

/// Approximates "there is a run" by simulating every scheduler policy and
/// returning the first positive verdict, or the last policy's verdict.
pub fn detect_selfrep_over_policies(
    spec: &ChemistrySpec,
    g: &str,
    eq: &EquivalenceSpec,
    max_steps: usize,
    query: &SelfRepQuery,
) -> Result<(SchedulerPolicy, Level0Verdict)> {
    let mut last = None;
    for policy in SchedulerPolicy::ALL {
        let trace = simulate(spec, max_steps, policy, query.mode);
        let verdict = detect_selfrep(spec, &trace, g, eq, query)?;
        if verdict.status.is_positive() {
            return Ok((policy, verdict));
        }
        last = Some((policy, verdict));
    }
    Ok(last.expect("at least one policy"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::detect_cycle;
    use crate::reaction::{ReactionSeq, Step};
    use crate::parse_chemistry;

    const STD: FeasibilityMode = FeasibilityMode::Standard;

    fn autocatalytic() -> ChemistrySpec {
        parse_chemistry("molecules: a, f\nreaction r1: a + f -> 2 a\nreaction r2: 2 a -> a + f\ninit: a, f")
            .unwrap()
    }

    fn flip_flop() -> ChemistrySpec {
        parse_chemistry("molecules: a, b\nreaction rab: a -> b\nreaction rba: b -> a\ninit: a").unwrap()
    }

    fn sym_set(items: &[&str]) -> BTreeSet<Symbol> {
        items.iter().map(|s| Symbol::from(*s)).collect()
    }

    #[test]
    fn equivalence_relation() {
        let eq = EquivalenceSpec::from_classes([["a", "a_mut"]]).unwrap();
        assert!(equivalent("a", "a", &EquivalenceSpec::identity()));
        assert!(equivalent("a", "a_mut", &eq));
        assert!(equivalent("a_mut", "a", &eq));
        assert!(!equivalent("a", "b", &EquivalenceSpec::identity()));
        assert!(EquivalenceSpec::from_classes([vec!["a", "b"], vec!["b", "c"]]).is_err());
        assert_eq!(eq.class_members(&"a".into()), vec![Symbol::from("a"), Symbol::from("a_mut")]);
        assert_eq!(eq.class_members(&"q".into()), vec![Symbol::from("q")]);
    }

    #[test]
    fn material_basis_single_step() {
        let spec = autocatalytic();
        let trace = simulate(&spec, 4, SchedulerPolicy::FirstDeclared, STD);
        let path = CausalPath {
            waypoints: vec!["a".into(), "a".into()],
            steps: ReactionSeq::new(vec![Step::new("r1", 0)]).unwrap(),
        };
        assert_eq!(check_material_basis(&spec, &path, &trace, "a").unwrap(), (true, sym_set(&["f"])));
    }

    #[test]
    fn material_basis_without_growth() {
        let spec = flip_flop();
        let trace = simulate(&spec, 4, SchedulerPolicy::FirstDeclared, STD);
        let path = CausalPath {
            waypoints: vec!["a".into(), "b".into(), "a".into()],
            steps: ReactionSeq::new(vec![Step::new("rab", 0), Step::new("rba", 1)]).unwrap(),
        };
        assert_eq!(check_material_basis(&spec, &path, &trace, "a").unwrap(), (false, BTreeSet::new()));
    }

    #[test]
    fn material_basis_with_replenished_inputs() {
        // `hold` refills f while keeping s, so every non-subject input is back
        // at its starting count when the window closes
        let spec = parse_chemistry(
            "molecules: a, f, s\n\
             reaction r: a + f -> 2 a\n\
             reaction hold: a + s -> a + s + f\n\
             init: a, f, s",
        )
        .unwrap();
        let trace = simulate(&spec, 2, SchedulerPolicy::FirstDeclared, STD);
        assert_eq!(trace.executed(), &["r", "hold"]);
        let path = CausalPath {
            waypoints: vec!["a".into(), "a".into(), "a".into()],
            steps: ReactionSeq::new(vec![Step::new("r", 0), Step::new("hold", 1)]).unwrap(),
        };
        assert!(path.is_valid(&spec, &trace, STD));
        assert!(trace.states()[2].count("a") > trace.states()[0].count("a"));
        assert_eq!(check_material_basis(&spec, &path, &trace, "a").unwrap(), (false, BTreeSet::new()));
    }

    #[test]
    fn material_basis_needs_recorded_successor() {
        let spec = autocatalytic();
        let trace = simulate(&spec, 4, SchedulerPolicy::FirstDeclared, STD);
        let path = CausalPath {
            waypoints: vec!["a".into(), "a".into()],
            steps: ReactionSeq::new(vec![Step::new("r1", 4)]).unwrap(),
        };
        assert_eq!(check_material_basis(&spec, &path, &trace, "a").unwrap(), (false, BTreeSet::new()));
    }

    #[test]
    fn detects_autocatalysis() {
        let spec = autocatalytic();
        let trace = simulate(&spec, 4, SchedulerPolicy::FirstDeclared, STD);
        let eq = EquivalenceSpec::from_spec(&spec);
        let v = detect_selfrep(&spec, &trace, "a", &eq, &SelfRepQuery::new(1)).unwrap();
        assert_eq!(v.status, Status::PotentiallySelfReproducing);
        assert_eq!(v.witness_paths[0].steps.reaction_names().collect::<Vec<_>>(), ["r1"]);
        assert_eq!(v.consumed, sym_set(&["f"]));
        assert_eq!(v.partner.as_ref().map(Symbol::as_str), Some("a"));
        assert!(v.failure.is_none());
    }

    #[test]
    fn inert_and_spontaneous_are_rejected() {
        let spec = parse_chemistry("molecules: a\ninit: a").unwrap();
        let trace = simulate(&spec, 4, SchedulerPolicy::FirstDeclared, STD);
        let v = detect_selfrep(&spec, &trace, "a", &EquivalenceSpec::identity(), &SelfRepQuery::default()).unwrap();
        assert_eq!(v.status, Status::Rejected);
        assert_eq!(v.failure, Some(Level0Failure::NoCausalPath));

        let spec = parse_chemistry("molecules: a, f\nreaction r: f -> a\ninit: 3 f").unwrap();
        let trace = simulate(&spec, 3, SchedulerPolicy::FirstDeclared, STD);
        let v = detect_selfrep(&spec, &trace, "a", &EquivalenceSpec::identity(), &SelfRepQuery::default()).unwrap();
        assert_eq!(v.failure, Some(Level0Failure::NoCausalPath));
        assert!(matches!(
            detect_selfrep(&spec, &trace, "zz", &EquivalenceSpec::identity(), &SelfRepQuery::default()),
            Err(Error::UnknownSymbol(_))
        ));
    }

    #[test]
    fn cyclic_run_positive_and_negative() {
        let spec = autocatalytic();
        let trace = simulate(&spec, 4, SchedulerPolicy::FirstDeclared, STD);
        let w = detect_cycle(&trace).unwrap();
        assert_eq!(w, CycleWitness { prefix_len: 0, cycle_len: 2 });
        let eq = EquivalenceSpec::identity();
        let v = verify_theorem1(&spec, &trace, &w, "a", &eq, &SelfRepQuery::default()).unwrap();
        assert_eq!(v.status, Status::ActuallySelfReproducing);
        assert_eq!(v.witness_paths[0].steps.reaction_names().collect::<Vec<_>>(), ["r1"]);
        assert!(trace.executed()[1..3].contains(&"r1".to_string()));

        let spec = flip_flop();
        let trace = simulate(&spec, 4, SchedulerPolicy::FirstDeclared, STD);
        let w = detect_cycle(&trace).unwrap();
        let v = verify_theorem1(&spec, &trace, &w, "a", &eq, &SelfRepQuery::default()).unwrap();
        assert_eq!(v.status, Status::Rejected);
        assert!(matches!(v.failure, Some(Level0Failure::MaterialBasisViolated { .. })));
    }

    #[test]
    fn cyclic_run_rejects_fabricated_witness() {
        let spec = parse_chemistry("molecules: a\nreaction r: a -> 2 a\ninit: a").unwrap();
        let trace = simulate(&spec, 6, SchedulerPolicy::FirstDeclared, STD);
        let fake = CycleWitness { prefix_len: 0, cycle_len: 1 };
        assert!(matches!(
            verify_theorem1(&spec, &trace, &fake, "a", &EquivalenceSpec::identity(), &SelfRepQuery::default()),
            Err(Error::WitnessMismatch(_))
        ));
    }

    #[test]
    fn feasible_but_never_fired_stays_potential() {
        // `grow` is feasible whenever f is present, but `feed` always wins the
        // scheduler; a's growth is real, just not caused by `grow`
        let spec = parse_chemistry(
            "molecules: a, f\n\
             reaction feed: f -> a\n\
             reaction reset: 2 a -> a + f\n\
             reaction grow: a + f -> 2 a\n\
             init: a, f",
        )
        .unwrap();
        let trace = simulate(&spec, 6, SchedulerPolicy::FirstDeclared, STD);
        let w = detect_cycle(&trace).unwrap();
        assert_eq!(w, CycleWitness { prefix_len: 0, cycle_len: 2 });
        let eq = EquivalenceSpec::identity();
        let v = verify_theorem1(&spec, &trace, &w, "a", &eq, &SelfRepQuery::new(1)).unwrap();
        assert_eq!(v.status, Status::PotentiallySelfReproducing);
        assert!(v.witness_paths.iter().all(|p| p.steps.reaction_names().all(|r| r == "grow")));
        assert!(!trace.executed().contains(&"grow".to_string()));
    }

    #[test]
    fn sweep_preserves_declaration_order() {
        let spec = autocatalytic();
        let trace = simulate(&spec, 4, SchedulerPolicy::FirstDeclared, STD);
        let eq = EquivalenceSpec::identity();
        let out = sweep_molecules(&spec, &trace, &eq, &SelfRepQuery::default());
        let names: Vec<&str> = out.iter().map(|(s, _)| s.as_str()).collect();
        assert_eq!(names, ["a", "f"]);
        assert!(out[0].1.as_ref().unwrap().status.is_positive());
        assert!(!out[1].1.as_ref().unwrap().status.is_positive());
    }

    #[test]
    fn policy_sweep_finds_a_run() {
        let spec = autocatalytic();
        let (policy, v) =
            detect_selfrep_over_policies(&spec, "a", &EquivalenceSpec::identity(), 4, &SelfRepQuery::default())
                .unwrap();
        assert_eq!(policy, SchedulerPolicy::FirstDeclared);
        assert!(v.status.is_positive());
    }

    #[test]
    fn mutants_count_as_partners() {
        let spec = parse_chemistry(
            "molecules: a, a_mut, f\nreaction copy: a + f -> a + a_mut\nequiv alpha: a, a_mut\ninit: a, 2 f",
        )
        .unwrap();
        let trace = simulate(&spec, 2, SchedulerPolicy::FirstDeclared, STD);
        let eq = EquivalenceSpec::from_spec(&spec);
        let v = detect_selfrep(&spec, &trace, "a", &eq, &SelfRepQuery::new(1)).unwrap();
        // a's own count never rises, so neither partner certifies growth of a
        assert_eq!(v.status, Status::Rejected);
        let v = detect_selfrep(&spec, &trace, "a_mut", &eq, &SelfRepQuery::new(1)).unwrap();
        assert_eq!(v.status, Status::Rejected);
        assert!(v.paths_examined == 0);
    }
}
