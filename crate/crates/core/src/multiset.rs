//! Finite multi-sets with the sum/union/difference/intersection algebra.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// How two multi-sets are combined, elementwise on multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    /// `m_X + m_Y`
    Sum,
    /// `max(m_X, m_Y)`
    Union,
    /// `max(m_X - m_Y, 0)`
    Diff,
    /// `min(m_X, m_Y)`
    Intersect,
    /// `(X ∪ Y) \ (X ∩ Y)`
    SymDiff,
}

/// Serde adapter writing a map as a list of `[key, value]` pairs, for maps
/// whose keys are not strings.
pub mod pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(m: &BTreeMap<K, V>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, K, V, D>(d: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Ok(Vec::<(K, V)>::deserialize(d)?.into_iter().collect())
    }
}

/// A multi-set; every stored key has multiplicity at least one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize + Ord",
    deserialize = "T: Deserialize<'de> + Ord"
))]
pub struct MultiSet<T: Ord> {
    #[serde(with = "pairs")]
    entries: BTreeMap<T, usize>,
}

impl<T: Ord> Default for MultiSet<T> {
    fn default() -> Self {
        MultiSet { entries: BTreeMap::new() }
    }
}

impl<T: Ord + fmt::Debug> fmt::Debug for MultiSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

impl<T: Ord + Clone> MultiSet<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, item: T) {
        self.insert_many(item, 1);
    }

    pub fn insert_many(&mut self, item: T, count: usize) {
        if count > 0 {
            *self.entries.entry(item).or_insert(0) += count;
        }
    }

    /// Remove up to `count` copies; returns how many were removed.
    pub fn remove_many(&mut self, item: &T, count: usize) -> usize {
        let Some(m) = self.entries.get_mut(item) else {
            return 0;
        };
        let removed = count.min(*m);
        *m -= removed;
        if *m == 0 {
            self.entries.remove(item);
        }
        removed
    }

    pub fn multiplicity(&self, item: &T) -> usize {
        self.entries.get(item).copied().unwrap_or(0)
    }

    /// Total number of elements counted with multiplicity.
    pub fn count(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn distinct_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct elements with their multiplicities, in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (&T, usize)> + '_ {
        self.entries.iter().map(|(k, &m)| (k, m))
    }

    /// Every element repeated according to its multiplicity.
    pub fn iter_expanded(&self) -> impl Iterator<Item = &T> + '_ {
        self.entries
            .iter()
            .flat_map(|(k, &m)| std::iter::repeat_n(k, m))
    }

    pub fn combine(&self, kind: Combine, other: &Self) -> Self {
        if kind == Combine::SymDiff {
            let union = self.combine(Combine::Union, other);
            let inter = self.combine(Combine::Intersect, other);
            return union.combine(Combine::Diff, &inter);
        }
        let mut out = MultiSet::new();
        let keys = self.entries.keys().chain(other.entries.keys());
        for key in keys {
            if out.entries.contains_key(key) {
                continue;
            }
            let (x, y) = (self.multiplicity(key), other.multiplicity(key));
            let m = match kind {
                Combine::Sum => x + y,
                Combine::Union => x.max(y),
                Combine::Diff => x.saturating_sub(y),
                Combine::Intersect => x.min(y),
                Combine::SymDiff => unreachable!(),
            };
            if m > 0 {
                out.entries.insert(key.clone(), m);
            }
        }
        out
    }

    pub fn map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> U) -> MultiSet<U> {
        let mut out = MultiSet::new();
        for (k, m) in self.iter() {
            out.insert_many(f(k), m);
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&T) -> bool) -> Self {
        MultiSet {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, &m)| (k.clone(), m))
                .collect(),
        }
    }
}

impl<T: Ord + Clone> FromIterator<T> for MultiSet<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut out = MultiSet::new();
        for item in iter {
            out.insert(item);
        }
        out
    }
}

impl<T: Ord + Clone> Extend<T> for MultiSet<T> {
    fn extend<I: IntoIterator<Item = T>>(&mut self, iter: I) {
        for item in iter {
            self.insert(item);
        }
    }
}
