//! Chemistry declarations: molecules, named reactions, the initial
//! population and the observer's equivalence classes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, ParseErrorKind, Result};
use crate::multiset::{Multiset, Symbol};

/// A deterministic rewriting rule `input -> output`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    pub name: String,
    pub input: Multiset,
    pub output: Multiset,
}

impl Reaction {
    pub fn new(name: impl Into<String>, input: Multiset, output: Multiset) -> Self {
        Reaction { name: name.into(), input, output }
    }
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "reaction {}: ", self.name)?;
        write_terms(f, &self.input, " + ")?;
        f.write_str(" ->")?;
        if !self.output.is_empty() {
            f.write_str(" ")?;
            write_terms(f, &self.output, " + ")?;
        }
        Ok(())
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, m: &Multiset, sep: &str) -> fmt::Result {
    for (i, (s, n)) in m.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        if n == 1 {
            write!(f, "{s}")?;
        } else {
            write!(f, "{n} {s}")?;
        }
    }
    Ok(())
}

/// A named class of observationally equivalent molecules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivClass {
    pub name: String,
    pub members: Vec<Symbol>,
}

/// A validated chemistry: the declared universe, its reactions in priority
/// order, the initial state and the observer's equivalence classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChemistrySpec {
    molecules: Vec<Symbol>,
    reactions: Vec<Reaction>,
    initial: Multiset,
    equivalences: Vec<EquivClass>,
    molecule_index: BTreeMap<Symbol, usize>,
    reaction_index: HashMap<String, usize>,
}

impl ChemistrySpec {
    /// Validates and assembles a chemistry. Violations are reported as
    /// parse errors at position 0:0; the DSL parser reports real positions.
    pub fn new(
        molecules: Vec<Symbol>,
        reactions: Vec<Reaction>,
        initial: Multiset,
        equivalences: Vec<EquivClass>,
    ) -> Result<Self> {
        let err = |kind| Error::Parse(ParseError { line: 0, column: 0, kind });

        let mut molecule_index = BTreeMap::new();
        let mut unique = Vec::with_capacity(molecules.len());
        for m in molecules {
            if !molecule_index.contains_key(&m) {
                molecule_index.insert(m.clone(), unique.len());
                unique.push(m);
            }
        }
        let declared = |s: &Symbol| molecule_index.contains_key(s);

        let mut reaction_index = HashMap::new();
        for (i, r) in reactions.iter().enumerate() {
            if r.input.is_empty() {
                return Err(err(ParseErrorKind::EmptyReactionInput(r.name.clone())));
            }
            if reaction_index.insert(r.name.clone(), i).is_some() {
                return Err(err(ParseErrorKind::DuplicateReaction(r.name.clone())));
            }
            if let Some(s) = r.input.symbols().chain(r.output.symbols()).find(|s| !declared(s)) {
                return Err(err(ParseErrorKind::UndeclaredSymbol(s.clone())));
            }
        }
        if let Some(s) = initial.symbols().find(|s| !declared(s)) {
            return Err(err(ParseErrorKind::UndeclaredSymbol(s.clone())));
        }
        let mut seen = BTreeSet::new();
        for class in &equivalences {
            for s in &class.members {
                if !declared(s) {
                    return Err(err(ParseErrorKind::UndeclaredSymbol(s.clone())));
                }
                if !seen.insert(s.clone()) {
                    return Err(err(ParseErrorKind::OverlappingEquivalence(s.clone())));
                }
            }
        }

        Ok(ChemistrySpec {
            molecules: unique,
            reactions,
            initial,
            equivalences,
            molecule_index,
            reaction_index,
        })
    }

    pub fn molecules(&self) -> &[Symbol] {
        &self.molecules
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn initial(&self) -> &Multiset {
        &self.initial
    }

    pub fn equivalences(&self) -> &[EquivClass] {
        &self.equivalences
    }

    pub fn is_declared(&self, symbol: &str) -> bool {
        self.molecule_index.contains_key(symbol)
    }

    /// Declaration index of a molecule.
    pub fn molecule_index(&self, symbol: &str) -> Option<usize> {
        self.molecule_index.get(symbol).copied()
    }

    /// Declaration index of a reaction; this is also its scheduling priority.
    pub fn reaction_index(&self, name: &str) -> Option<usize> {
        self.reaction_index.get(name).copied()
    }

    pub fn reaction(&self, name: &str) -> Result<&Reaction> {
        self.reaction_index(name)
            .map(|i| &self.reactions[i])
            .ok_or_else(|| Error::UnknownReaction(name.to_owned()))
    }

    /// Replaces the initial population, revalidating declarations.
    pub fn with_initial(&self, initial: Multiset) -> Result<Self> {
        ChemistrySpec::new(
            self.molecules.clone(),
            self.reactions.clone(),
            initial,
            self.equivalences.clone(),
        )
    }
}

impl fmt::Display for ChemistrySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.molecules.iter().map(Symbol::as_str).collect();
        writeln!(f, "molecules: {}", names.join(", "))?;
        for r in &self.reactions {
            writeln!(f, "{r}")?;
        }
        f.write_str("init:")?;
        if !self.initial.is_empty() {
            f.write_str(" ")?;
            write_terms(f, &self.initial, ", ")?;
        }
        writeln!(f)?;
        for class in &self.equivalences {
            let members: Vec<&str> = class.members.iter().map(Symbol::as_str).collect();
            writeln!(f, "equiv {}: {}", class.name, members.join(", "))?;
        }
        Ok(())
    }
}

/// One reaction of a sequence, anchored to the trace state it is feasible in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Step {
    pub reaction: String,
    pub state: usize,
}

impl Step {
    pub fn new(reaction: impl Into<String>, state: usize) -> Self {
        Step { reaction: reaction.into(), state }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.reaction, self.state)
    }
}

/// A reaction sequence anchored to strictly increasing state indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ReactionSeq {
    steps: Vec<Step>,
}

impl ReactionSeq {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        if steps.windows(2).any(|w| w[0].state >= w[1].state) {
            return Err(Error::NonIncreasingAnchors);
        }
        Ok(ReactionSeq { steps })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn first_state(&self) -> Option<usize> {
        self.steps.first().map(|s| s.state)
    }

    pub fn last_state(&self) -> Option<usize> {
        self.steps.last().map(|s| s.state)
    }

    /// True when the anchors are consecutive state indices.
    pub fn is_partial_run(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].state + 1 == w[1].state)
    }

    /// Concatenation; fails unless every anchor of `other` follows `self`.
    pub fn concat(&self, other: &ReactionSeq) -> Result<ReactionSeq> {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        ReactionSeq::new(steps)
    }

    pub fn reaction_names(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().map(|s| s.reaction.as_str())
    }
}

impl<'de> Deserialize<'de> for ReactionSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let steps = Vec::<Step>::deserialize(d)?;
        ReactionSeq::new(steps).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ReactionSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(">")
    }
}

/// `Input(R)`: additive union of the inputs of every step.
pub fn seq_input(seq: &ReactionSeq, spec: &ChemistrySpec) -> Result<Multiset> {
    seq.steps().iter().try_fold(Multiset::new(), |acc, step| {
        Ok(acc.union(&spec.reaction(&step.reaction)?.input))
    })
}

/// `Output(R)`: additive union of the outputs of every step.
pub fn seq_output(seq: &ReactionSeq, spec: &ChemistrySpec) -> Result<Multiset> {
    seq.steps().iter().try_fold(Multiset::new(), |acc, step| {
        Ok(acc.union(&spec.reaction(&step.reaction)?.output))
    })
}
