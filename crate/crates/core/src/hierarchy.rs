//! Higher organizational levels.
//!
//! A level-`n` entity is a finite set of at least two lower-level entities,
//! at least one of which has level `n - 1`; molecules are level 0. A
//! level-1 *meta reaction* is a feasible level-0 reaction sequence in which
//! a level-1 entity takes part (every step consumes one of its members).
//! Level-1 causality `ζ ⇒¹_R ζ'` holds when `ζ'` lies in the net product
//! `Output(R) - Input(R)`. Such a claim only counts as organization when
//! the level-0 paths between the members outnumber `|ζ'|`: otherwise each
//! member of `ζ'` could be explained by one independent link.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::causal::{count_pairwise_paths, PathQuery, PathScope, DEFAULT_PATH_BUDGET};
use crate::engine::{FeasibilityMode, Trace};
use crate::error::{Error, Result};
use crate::multiset::{Multiset, Symbol};
use crate::reaction::{seq_input, seq_output, ChemistrySpec, ReactionSeq, Step};
use crate::selfrep::{EquivalenceSpec, Status};

/// A member of a hierarchical set: a molecule or a lower-level set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entity {
    Molecule(Symbol),
    Set(HierEntity),
}

impl Entity {
    pub fn level(&self) -> usize {
        match self {
            Entity::Molecule(_) => 0,
            Entity::Set(set) => set.level(),
        }
    }
}

impl From<Symbol> for Entity {
    fn from(s: Symbol) -> Self {
        Entity::Molecule(s)
    }
}

impl From<&str> for Entity {
    fn from(s: &str) -> Self {
        Entity::Molecule(Symbol::from(s))
    }
}

impl From<HierEntity> for Entity {
    fn from(h: HierEntity) -> Self {
        Entity::Set(h)
    }
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Molecule(s) => write!(f, "{s}"),
            Entity::Set(h) => write!(f, "{h}"),
        }
    }
}

/// A set-valued entity of level >= 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HierEntity {
    members: BTreeSet<Entity>,
    level: usize,
}

impl HierEntity {
    pub fn new(members: impl IntoIterator<Item = Entity>) -> Result<Self> {
        let members: BTreeSet<Entity> = members.into_iter().collect();
        if members.len() < 2 {
            return Err(Error::MalformedEntity(format!(
                "a set entity needs at least two distinct members, got {}",
                members.len()
            )));
        }
        let level = 1 + members.iter().map(Entity::level).max().expect("non-empty");
        Ok(HierEntity { members, level })
    }

    pub fn from_symbols<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<Symbol>,
    {
        HierEntity::new(symbols.into_iter().map(|s| Entity::Molecule(s.into())))
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn members(&self) -> &BTreeSet<Entity> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The member molecules of a level-1 entity.
    pub fn molecules(&self) -> Result<BTreeSet<Symbol>> {
        self.members
            .iter()
            .map(|m| match m {
                Entity::Molecule(s) => Ok(s.clone()),
                Entity::Set(_) => Err(Error::MalformedEntity(format!("{self} is not a level-1 entity"))),
            })
            .collect()
    }

    /// The defining clauses of level `n`, checked directly: every member
    /// has level below `n`, some member has level `n - 1`, and there are
    /// more than one.
    pub fn satisfies_level_clauses(&self) -> bool {
        let n = self.level;
        n >= 1
            && self.members.len() > 1
            && self.members.iter().all(|m| m.level() < n)
            && self.members.iter().any(|m| m.level() == n - 1)
            && self.members.iter().all(|m| match m {
                Entity::Molecule(_) => true,
                Entity::Set(h) => h.satisfies_level_clauses(),
            })
    }
}

impl fmt::Display for HierEntity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for HierEntity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for HierEntity {
    type Err = Error;

    /// Brace notation: `{x, y}`, `{{a, b}, c}`.
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.char_indices().peekable();
        let entity = parse_entity(s, &mut chars)?;
        skip_ws(&mut chars);
        if let Some((i, _)) = chars.peek() {
            return Err(Error::MalformedEntity(format!("unexpected input at offset {i}")));
        }
        match entity {
            Entity::Set(h) => Ok(h),
            Entity::Molecule(m) => Err(Error::MalformedEntity(format!("`{m}` is a molecule, not a set"))),
        }
    }
}

type Chars<'a> = std::iter::Peekable<std::str::CharIndices<'a>>;

fn skip_ws(chars: &mut Chars<'_>) {
    while chars.next_if(|(_, c)| c.is_whitespace()).is_some() {}
}

fn parse_entity(src: &str, chars: &mut Chars<'_>) -> Result<Entity> {
    skip_ws(chars);
    match chars.peek().copied() {
        Some((_, '{')) => {
            chars.next();
            let mut members = Vec::new();
            skip_ws(chars);
            if chars.next_if(|(_, c)| *c == '}').is_none() {
                loop {
                    members.push(parse_entity(src, chars)?);
                    skip_ws(chars);
                    match chars.next() {
                        Some((_, ',')) => continue,
                        Some((_, '}')) => break,
                        Some((i, c)) => {
                            return Err(Error::MalformedEntity(format!("unexpected `{c}` at offset {i}")))
                        }
                        None => return Err(Error::MalformedEntity("unterminated set".into())),
                    }
                }
            }
            let count = members.len();
            let set: BTreeSet<_> = members.into_iter().collect();
            if set.len() != count {
                return Err(Error::MalformedEntity("duplicate members".into()));
            }
            HierEntity::new(set).map(Entity::Set)
        }
        Some((start, _)) => {
            let mut end = start;
            while let Some((i, c)) = chars.next_if(|(_, c)| !c.is_whitespace() && !"{},".contains(*c)) {
                end = i + c.len_utf8();
            }
            if end == start {
                return Err(Error::MalformedEntity(format!("expected a member at offset {start}")));
            }
            Ok(Entity::Molecule(Symbol::from(&src[start..end])))
        }
        None => Err(Error::MalformedEntity("unexpected end of input".into())),
    }
}

/// Level of a molecule (0) or of a set (1 + highest member level).
pub fn level_of(x: &Entity) -> usize {
    x.level()
}

/// Default cap on the number of entities [`enumerate_level1`] may return.
pub const DEFAULT_ENTITY_BUDGET: usize = 10_000;

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// All level-1 entities drawn from `support` with between 2 and `size_cap`
/// members, ordered by size and then lexicographically. Fails without
/// producing anything when there would be more than `budget` of them.
pub fn enumerate_level1(support: &BTreeSet<Symbol>, size_cap: usize, budget: usize) -> Result<Vec<HierEntity>> {
    if size_cap < 2 {
        return Err(Error::MalformedEntity("size cap must be at least 2".into()));
    }
    let n = support.len();
    let count = (2..=size_cap.min(n))
        .map(|k| binomial(n as u128, k as u128))
        .fold(0u128, u128::saturating_add);
    if count > budget as u128 {
        return Err(Error::CombinatorialBudgetExceeded { count, limit: budget });
    }
    let items: Vec<&Symbol> = support.iter().collect();
    let mut out = Vec::with_capacity(count as usize);
    for k in 2..=size_cap.min(n) {
        for combo in combinations(n, k) {
            out.push(HierEntity::from_symbols(combo.into_iter().map(|i| items[i].clone()))?);
        }
    }
    Ok(out)
}

/// Index combinations of `k` out of `n`, lexicographic.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// A level-1 reaction: a feasible level-0 reaction sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct MetaReaction {
    steps: ReactionSeq,
}

impl MetaReaction {
    /// Wraps `steps`, checking each is feasible at its anchor.
    pub fn new(steps: ReactionSeq, spec: &ChemistrySpec, trace: &Trace, mode: FeasibilityMode) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::MalformedEntity("a meta reaction needs at least one step".into()));
        }
        if !crate::engine::is_feasible_seq(&steps, trace, spec, mode)? {
            return Err(Error::Infeasible { reaction: steps.to_string() });
        }
        Ok(MetaReaction { steps })
    }

    pub fn steps(&self) -> &ReactionSeq {
        &self.steps
    }

    pub fn first_state(&self) -> usize {
        self.steps.first_state().expect("non-empty")
    }

    pub fn last_state(&self) -> usize {
        self.steps.last_state().expect("non-empty")
    }

    /// `Output(R) - Input(R)` (truncated).
    pub fn net_product(&self, spec: &ChemistrySpec) -> Result<Multiset> {
        Ok(seq_output(&self.steps, spec)?.subtract(&seq_input(&self.steps, spec)?))
    }
}

impl fmt::Display for MetaReaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.steps)
    }
}

fn level1_members(z: &HierEntity) -> Result<BTreeSet<Symbol>> {
    if z.level() != 1 {
        return Err(Error::MalformedEntity(format!("{z} has level {}, expected 1", z.level())));
    }
    z.molecules()
}

fn takes_part_symbols(members: &BTreeSet<Symbol>, r: &MetaReaction, spec: &ChemistrySpec) -> Result<bool> {
    for step in r.steps.steps() {
        let input = &spec.reaction(&step.reaction)?.input;
        if !input.symbols().any(|s| members.contains(s)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every step of `r` consumes at least one member of `z`.
pub fn takes_part(z: &HierEntity, r: &MetaReaction, spec: &ChemistrySpec) -> Result<bool> {
    takes_part_symbols(&level1_members(z)?, r, spec)
}

/// `z ⇒¹_R z2`: `z` takes part in `r` and every member of `z2` is in the
/// support of `Output(R) - Input(R)`.
pub fn level1_causal(z: &HierEntity, r: &MetaReaction, z2: &HierEntity, spec: &ChemistrySpec) -> Result<bool> {
    let target = level1_members(z2)?;
    if !takes_part(z, r, spec)? {
        return Ok(false);
    }
    let net = r.net_product(spec)?;
    Ok(target.iter().all(|s| net.contains_symbol(s)))
}

/// `r` starts before `s` and ends before `s` ends. The merged anchors span
/// `k` states with `max(m, n) <= k <= m + n`; interleaving is allowed.
pub fn temporally_precedes(r: &MetaReaction, s: &MetaReaction) -> bool {
    if r.first_state() >= s.first_state() || r.last_state() >= s.last_state() {
        return false;
    }
    let (n, m) = (r.steps.len(), s.steps.len());
    let anchors: BTreeSet<usize> = r
        .steps
        .steps()
        .iter()
        .chain(s.steps.steps())
        .map(|st| st.state)
        .collect();
    let k = anchors.len();
    n.max(m) <= k && k <= n + m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Nontriviality {
    pub nontrivial: bool,
    pub counted: usize,
    pub threshold: usize,
}

/// Counts level-0 causal paths from members of `z` to members of `z2` that
/// use only the steps of `rs`, and compares the count with `|z2|`.
pub fn is_nontrivial(
    spec: &ChemistrySpec,
    trace: &Trace,
    z: &HierEntity,
    z2: &HierEntity,
    rs: &[MetaReaction],
    max_len: usize,
    mode: FeasibilityMode,
) -> Result<Nontriviality> {
    let sources = level1_members(z)?;
    let targets = level1_members(z2)?;
    nontriviality(spec, trace, &sources, &targets, rs, max_len, DEFAULT_PATH_BUDGET, mode)
}

#[allow(clippy::too_many_arguments)]
fn nontriviality(
    spec: &ChemistrySpec,
    trace: &Trace,
    sources: &BTreeSet<Symbol>,
    targets: &BTreeSet<Symbol>,
    rs: &[MetaReaction],
    max_len: usize,
    budget: usize,
    mode: FeasibilityMode,
) -> Result<Nontriviality> {
    let steps: Vec<Step> = rs.iter().flat_map(|r| r.steps.steps().iter().cloned()).collect();
    let query = PathQuery::new(max_len).mode(mode).budget(budget).scope(PathScope::Steps(steps));
    let counted = count_pairwise_paths(spec, trace, sources, targets, &query)?;
    let threshold = targets.len();
    Ok(Nontriviality { nontrivial: counted > threshold, counted, threshold })
}

/// One-to-one pairing of `left` with `right` under `eq`, if one exists.
pub fn perfect_matching(
    left: &BTreeSet<Symbol>,
    right: &BTreeSet<Symbol>,
    eq: &EquivalenceSpec,
) -> Option<Vec<(Symbol, Symbol)>> {
    if left.len() != right.len() {
        return None;
    }
    let left: Vec<&Symbol> = left.iter().collect();
    let right: Vec<&Symbol> = right.iter().collect();
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|l| (0..right.len()).filter(|&j| eq.equivalent(l, right[j])).collect())
        .collect();

    // Kuhn's augmenting paths; sets here are small
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right.len()];
    for i in 0..left.len() {
        let mut seen = vec![false; right.len()];
        if !augment(i, &adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut pairs: Vec<(Symbol, Symbol)> = owner
        .iter()
        .enumerate()
        .map(|(j, i)| (left[i.expect("perfect")].clone(), right[j].clone()))
        .collect();
    pairs.sort();
    Some(pairs)
}

/// `ζ ∼¹ ζ'`: a one-to-one equivalence between the members.
pub fn level1_equivalent(z: &HierEntity, z2: &HierEntity, eq: &EquivalenceSpec) -> Result<bool> {
    Ok(perfect_matching(&level1_members(z)?, &level1_members(z2)?, eq).is_some())
}

/// Copies of a level-1 entity present in a state: the smallest member count.
pub fn copy_count(members: &BTreeSet<Symbol>, state: &Multiset) -> u64 {
    members.iter().map(|m| state.count(m)).min().unwrap_or(0)
}

/// Search limits for [`detect_selfrep1`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Level1Caps {
    /// Most steps in one meta reaction.
    pub max_meta_len: usize,
    /// Most meta reactions in one level-1 causal path.
    pub max_chain: usize,
    /// A meta reaction's anchors lie within this many consecutive states.
    pub max_span: usize,
    /// Longest level-0 path counted for non-triviality.
    pub max_path_len: usize,
    /// Most candidate partners examined before giving up.
    pub max_candidates: usize,
    pub path_budget: usize,
    /// Inclusive window of executed steps searched; whole trace when `None`.
    pub window: Option<(usize, usize)>,
}

impl Default for Level1Caps {
    fn default() -> Self {
        Level1Caps {
            max_meta_len: 4,
            max_chain: 2,
            max_span: 8,
            max_path_len: 4,
            max_candidates: 10_000,
            path_budget: DEFAULT_PATH_BUDGET,
            window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "reason")]
pub enum Level1Failure {
    /// The entity takes part in no meta reaction with a level-1 net product.
    NoCausalPath,
    /// Meta reactions exist but none yields a product equivalent to the entity.
    NoEquivalentProduct,
    /// Equivalent products exist but only via independent member-wise links.
    TrivialCausality { counted: usize, threshold: usize },
    /// Non-trivial paths exist but none grows the entity while depleting
    /// another participant.
    MaterialBasisViolated,
}

impl Level1Failure {
    fn rank(&self) -> u8 {
        match self {
            Level1Failure::NoCausalPath => 0,
            Level1Failure::NoEquivalentProduct => 1,
            Level1Failure::TrivialCausality { .. } => 2,
            Level1Failure::MaterialBasisViolated => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Level1Verdict {
    pub subject: HierEntity,
    pub status: Status,
    /// The level-1 causal path `R_1 … R_k`.
    pub witness: Vec<MetaReaction>,
    /// Entities between consecutive meta reactions (`ζ_1 … ζ_{k-1}`).
    pub intermediates: Vec<HierEntity>,
    pub partner: Option<HierEntity>,
    pub matching: Vec<(Symbol, Symbol)>,
    pub nontriviality: Option<Nontriviality>,
    /// Copies of the subject before and after the witness window.
    pub copy_count: Option<(u64, u64)>,
    /// Participating non-member molecules whose population fell.
    pub decreased: BTreeSet<Symbol>,
    pub failure: Option<Level1Failure>,
    pub candidates_examined: usize,
    pub caps: Level1Caps,
}

/// Copies before and after, and the depleted non-members.
type Growth = ((u64, u64), BTreeSet<Symbol>);

struct Search<'a> {
    spec: &'a ChemistrySpec,
    trace: &'a Trace,
    eq: &'a EquivalenceSpec,
    caps: &'a Level1Caps,
    mode: FeasibilityMode,
    members: BTreeSet<Symbol>,
    pool: Vec<Step>,
    examined: usize,
    best_failure: Level1Failure,
}

struct Found {
    chain: Vec<MetaReaction>,
    intermediates: Vec<HierEntity>,
    partner: HierEntity,
    matching: Vec<(Symbol, Symbol)>,
    nontriviality: Nontriviality,
    copies: (u64, u64),
    decreased: BTreeSet<Symbol>,
}

impl Search<'_> {
    fn note(&mut self, failure: Level1Failure) {
        if failure.rank() > self.best_failure.rank() {
            self.best_failure = failure;
        }
    }

    /// Executed-step subsequences in which every step consumes a member of
    /// `entity`, starting strictly after `after` when given.
    fn meta_reactions(&self, entity: &BTreeSet<Symbol>, after: Option<usize>) -> Result<Vec<MetaReaction>> {
        let mut eligible = Vec::new();
        for step in &self.pool {
            if after.is_some_and(|a| step.state <= a) {
                continue;
            }
            let input = &self.spec.reaction(&step.reaction)?.input;
            if input.symbols().any(|s| entity.contains(s)) {
                eligible.push(step.clone());
            }
        }
        let mut out = Vec::new();
        let mut cur = Vec::new();
        for i in 0..eligible.len() {
            cur.push(i);
            self.extend_meta(&eligible, &mut cur, &mut out);
            cur.pop();
        }
        Ok(out)
    }

    fn extend_meta(&self, eligible: &[Step], cur: &mut Vec<usize>, out: &mut Vec<MetaReaction>) {
        let steps = cur.iter().map(|&i| eligible[i].clone()).collect();
        out.push(MetaReaction { steps: ReactionSeq::new(steps).expect("increasing") });
        if cur.len() == self.caps.max_meta_len {
            return;
        }
        let first = eligible[cur[0]].state;
        for j in cur[cur.len() - 1] + 1..eligible.len() {
            if eligible[j].state - first >= self.caps.max_span {
                break;
            }
            cur.push(j);
            self.extend_meta(eligible, cur, out);
            cur.pop();
        }
    }

    fn search(&mut self, chain: &mut Vec<MetaReaction>, intermediates: &mut Vec<HierEntity>) -> Result<Option<Found>> {
        let last = chain.last().expect("non-empty chain");
        let net: BTreeSet<Symbol> = last.net_product(self.spec)?.support();
        if net.len() < 2 {
            return Ok(None);
        }
        self.note(Level1Failure::NoEquivalentProduct);

        if net.len() >= self.members.len() {
            let net_items: Vec<&Symbol> = net.iter().collect();
            for combo in combinations(net_items.len(), self.members.len()) {
                self.examined += 1;
                if self.examined > self.caps.max_candidates {
                    return Err(Error::CombinatorialBudgetExceeded {
                        count: self.examined as u128,
                        limit: self.caps.max_candidates,
                    });
                }
                let candidate: BTreeSet<Symbol> = combo.iter().map(|&i| net_items[i].clone()).collect();
                let Some(matching) = perfect_matching(&self.members, &candidate, self.eq) else {
                    continue;
                };
                let nt = nontriviality(
                    self.spec,
                    self.trace,
                    &self.members,
                    &candidate,
                    chain,
                    self.caps.max_path_len,
                    self.caps.path_budget,
                    self.mode,
                )?;
                if !nt.nontrivial {
                    self.note(Level1Failure::TrivialCausality { counted: nt.counted, threshold: nt.threshold });
                    continue;
                }
                match self.material_basis(chain)? {
                    Some((copies, decreased)) => {
                        return Ok(Some(Found {
                            chain: chain.clone(),
                            intermediates: intermediates.clone(),
                            partner: HierEntity::from_symbols(candidate)?,
                            matching,
                            nontriviality: nt,
                            copies,
                            decreased,
                        }))
                    }
                    None => self.note(Level1Failure::MaterialBasisViolated),
                }
            }
        }

        if chain.len() < self.caps.max_chain {
            let next_entity = HierEntity::from_symbols(net.iter().cloned())?;
            for s in self.meta_reactions(&net, Some(chain[0].first_state()))? {
                if !temporally_precedes(chain.last().expect("non-empty"), &s) {
                    continue;
                }
                chain.push(s);
                intermediates.push(next_entity.clone());
                let found = self.search(chain, intermediates)?;
                chain.pop();
                intermediates.pop();
                if found.is_some() {
                    return Ok(found);
                }
            }
        }
        Ok(None)
    }

    /// Copies of the subject grow from the first anchored state to the state
    /// after the last anchored step, while some participating non-member
    /// shrinks.
    fn material_basis(&self, chain: &[MetaReaction]) -> Result<Option<Growth>> {
        let first = chain.iter().map(MetaReaction::first_state).min().expect("non-empty");
        let last = chain.iter().map(MetaReaction::last_state).max().expect("non-empty");
        let Ok(after) = self.trace.state(last + 1) else {
            return Ok(None);
        };
        let before = self.trace.state(first)?;
        let copies = (copy_count(&self.members, before), copy_count(&self.members, after));
        if copies.1 <= copies.0 {
            return Ok(None);
        }
        let mut participants = BTreeSet::new();
        for r in chain {
            participants.extend(seq_input(&r.steps, self.spec)?.support());
        }
        let decreased: BTreeSet<Symbol> = participants
            .into_iter()
            .filter(|s| !self.members.contains(s) && after.count(s) < before.count(s))
            .collect();
        Ok((!decreased.is_empty()).then_some((copies, decreased)))
    }
}

/// Searches the executed steps of a trace for a non-trivial level-1 causal
/// path from `z` to an equivalent entity along which `z` gains copies.
///
/// Meta reactions are subsequences of executed steps (bounded by
/// `caps.max_meta_len` and `caps.max_span`) in which `z`, or the previous
/// intermediate entity, takes part. Candidate partners are subsets of the
/// last meta reaction's net product with as many members as `z`.
pub fn detect_selfrep1(
    spec: &ChemistrySpec,
    trace: &Trace,
    z: &HierEntity,
    eq: &EquivalenceSpec,
    caps: &Level1Caps,
    mode: FeasibilityMode,
) -> Result<Level1Verdict> {
    let members = level1_members(z)?;
    if let Some(m) = members.iter().find(|m| !spec.is_declared(m)) {
        return Err(Error::UnknownSymbol(m.clone()));
    }
    let executed = trace.executed();
    let (start, end) = caps.window.unwrap_or((0, trace.len() - 1));
    if end >= trace.len() {
        return Err(Error::IndexOutOfRange { index: end, len: trace.len() });
    }
    let pool: Vec<Step> = (start..=end.min(executed.len().saturating_sub(1)))
        .filter(|&i| i < executed.len())
        .map(|i| Step::new(executed[i].clone(), i))
        .collect();

    let mut search = Search {
        spec,
        trace,
        eq,
        caps,
        mode,
        members: members.clone(),
        pool,
        examined: 0,
        best_failure: Level1Failure::NoCausalPath,
    };
    let mut found = None;
    for r in search.meta_reactions(&members, None)? {
        let mut chain = vec![r];
        let mut intermediates = Vec::new();
        if let Some(f) = search.search(&mut chain, &mut intermediates)? {
            found = Some(f);
            break;
        }
    }

    let mut verdict = Level1Verdict {
        subject: z.clone(),
        status: Status::Rejected,
        witness: Vec::new(),
        intermediates: Vec::new(),
        partner: None,
        matching: Vec::new(),
        nontriviality: None,
        copy_count: None,
        decreased: BTreeSet::new(),
        failure: None,
        candidates_examined: search.examined,
        caps: caps.clone(),
    };
    match found {
        Some(f) => {
            verdict.status = Status::PotentiallySelfReproducing;
            verdict.witness = f.chain;
            verdict.intermediates = f.intermediates;
            verdict.partner = Some(f.partner);
            verdict.matching = f.matching;
            verdict.nontriviality = Some(f.nontriviality);
            verdict.copy_count = Some(f.copies);
            verdict.decreased = f.decreased;
        }
        None => {
            if let Level1Failure::TrivialCausality { counted, threshold } = search.best_failure {
                verdict.nontriviality = Some(Nontriviality { nontrivial: false, counted, threshold });
            }
            verdict.failure = Some(search.best_failure);
        }
    }
    Ok(verdict)
}
