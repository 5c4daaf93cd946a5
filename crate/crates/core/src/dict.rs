//! Maps that are hashed by default and ordered in deterministic mode.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

#[derive(Clone, Debug)]
pub enum Dict<K: Ord + Hash + Eq, V> {
    Hashed(HashMap<K, V>),
    Ordered(BTreeMap<K, V>),
}

impl<K: Ord + Hash + Eq, V> Dict<K, V> {
    pub fn new(deterministic: bool) -> Self {
        if deterministic {
            Dict::Ordered(BTreeMap::new())
        } else {
            Dict::Hashed(HashMap::new())
        }
    }

    pub fn get<Q>(&self, k: &Q) -> Option<&V>
    where
        K: std::borrow::Borrow<Q>,
        Q: Ord + Hash + Eq + ?Sized,
    {
        match self {
            Dict::Hashed(m) => m.get(k),
            Dict::Ordered(m) => m.get(k),
        }
    }

    pub fn get_mut<Q>(&mut self, k: &Q) -> Option<&mut V>
    where
        K: std::borrow::Borrow<Q>,
        Q: Ord + Hash + Eq + ?Sized,
    {
        match self {
            Dict::Hashed(m) => m.get_mut(k),
            Dict::Ordered(m) => m.get_mut(k),
        }
    }

    pub fn insert(&mut self, k: K, v: V) -> Option<V> {
        match self {
            Dict::Hashed(m) => m.insert(k, v),
            Dict::Ordered(m) => m.insert(k, v),
        }
    }

    pub fn contains_key<Q>(&self, k: &Q) -> bool
    where
        K: std::borrow::Borrow<Q>,
        Q: Ord + Hash + Eq + ?Sized,
    {
        self.get(k).is_some()
    }

    pub fn len(&self) -> usize {
        match self {
            Dict::Hashed(m) => m.len(),
            Dict::Ordered(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Dict::Ordered(_))
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = (&K, &V)> + '_> {
        match self {
            Dict::Hashed(m) => Box::new(m.iter()),
            Dict::Ordered(m) => Box::new(m.iter()),
        }
    }
}
