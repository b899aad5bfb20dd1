//! Finite multisets over molecule symbols.
//!
//! A [`Multiset`] is the state representation of a chemistry: every symbol
//! maps to a positive multiplicity and absent symbols have multiplicity zero.
//! Zero entries are never stored, so structural equality is multiset
//! equality and the canonical encoding is injective.

use std::borrow::Borrow;
use std::collections::btree_map;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An opaque molecule name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: impl AsRef<str>) -> Self {
        Symbol(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::ops::Deref for Symbol {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Symbol {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer).map(Symbol::from)
    }
}

/// Byte emitted for the empty multiset and as the header of every encoding.
const ENCODING_TAG: u8 = 0xA5;

/// A multiset of symbols in canonical form (no zero multiplicities).
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset {
    counts: BTreeMap<Symbol, u64>,
}

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a multiset from `(symbol, count)` pairs, summing repeats and
    /// dropping zero counts.
    pub fn from_counts<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<Symbol>,
    {
        let mut m = Multiset::new();
        for (s, n) in pairs {
            m.add(s.into(), n);
        }
        m
    }

    /// Multiplicity of `symbol`; zero when absent.
    pub fn count(&self, symbol: &str) -> u64 {
        self.counts.get(symbol).copied().unwrap_or(0)
    }

    pub fn add(&mut self, symbol: Symbol, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(symbol).or_insert(0) += n;
    }

    /// Removes up to `n` copies of `symbol`, saturating at zero.
    pub fn remove(&mut self, symbol: &str, n: u64) {
        if let Some(c) = self.counts.get_mut(symbol) {
            if *c <= n {
                self.counts.remove(symbol);
            } else {
                *c -= n;
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Number of distinct symbols with nonzero multiplicity.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Sum of all multiplicities.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn contains_symbol(&self, symbol: &str) -> bool {
        self.counts.contains_key(symbol)
    }

    pub fn support(&self) -> BTreeSet<Symbol> {
        self.counts.keys().cloned().collect()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.counts.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, u64)> {
        self.counts.iter().map(|(s, &n)| (s, n))
    }

    /// Additive union: `(M ∪ M')(e) = M(e) + M'(e)`.
    pub fn union(&self, other: &Multiset) -> Multiset {
        let mut out = self.clone();
        for (s, n) in other.iter() {
            out.add(s.clone(), n);
        }
        out
    }

    /// Intersection: `(M ∩ M')(e) = min(M(e), M'(e))`.
    pub fn intersect(&self, other: &Multiset) -> Multiset {
        let counts = self
            .counts
            .iter()
            .filter_map(|(s, &n)| {
                let m = n.min(other.count(s));
                (m > 0).then(|| (s.clone(), m))
            })
            .collect();
        Multiset { counts }
    }

    /// Truncated difference: `max(0, M(e) - M'(e))`.
    pub fn subtract(&self, other: &Multiset) -> Multiset {
        let counts = self
            .counts
            .iter()
            .filter_map(|(s, &n)| {
                let m = n.saturating_sub(other.count(s));
                (m > 0).then(|| (s.clone(), m))
            })
            .collect();
        Multiset { counts }
    }

    /// Inclusion: true iff `other(e) <= self(e)` for every `e`.
    pub fn contains(&self, other: &Multiset) -> bool {
        other.iter().all(|(s, n)| self.count(s) >= n)
    }

    /// Deterministic byte encoding, equal for two multisets iff they are
    /// equal. Symbols are emitted in lexicographic order, each as a
    /// length-prefixed UTF-8 string followed by its big-endian count.
    pub fn canonical_encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + 8 + self.counts.len() * 16);
        out.push(ENCODING_TAG);
        out.extend_from_slice(&(self.counts.len() as u64).to_be_bytes());
        for (s, &n) in &self.counts {
            let bytes = s.as_str().as_bytes();
            out.extend_from_slice(&(bytes.len() as u64).to_be_bytes());
            out.extend_from_slice(bytes);
            out.extend_from_slice(&n.to_be_bytes());
        }
        out
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (s, n)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}:{n}")?;
        }
        f.write_str("}")
    }
}

impl<S: Into<Symbol>> FromIterator<(S, u64)> for Multiset {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        Multiset::from_counts(iter)
    }
}

impl<'a> IntoIterator for &'a Multiset {
    type Item = (&'a Symbol, &'a u64);
    type IntoIter = btree_map::Iter<'a, Symbol, u64>;

    fn into_iter(self) -> Self::IntoIter {
        self.counts.iter()
    }
}

impl Serialize for Multiset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.counts.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Multiset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<Symbol, u64>::deserialize(deserializer)?;
        Ok(Multiset::from_counts(raw))
    }
}

/// Shorthand for building multisets in tests and examples:
/// `ms! { "a" => 2, "b" => 1 }`.
#[macro_export]
macro_rules! ms {
    () => { $crate::Multiset::new() };
    ($($sym:expr => $n:expr),+ $(,)?) => {
        $crate::Multiset::from_counts([$(($sym, $n as u64)),+])
    };
}
