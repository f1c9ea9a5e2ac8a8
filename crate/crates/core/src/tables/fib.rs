use std::collections::BTreeMap;

use super::FaceId;
use crate::ndn::Name;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibEntry {
    pub prefix: Name,
    pub next_hops: Vec<FaceId>,
}

#[derive(Debug, Clone, Default)]
pub struct Fib {
    entries: BTreeMap<Name, FibEntry>,
}

impl Fib {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FibEntry> {
        self.entries.values()
    }

    pub fn get(&self, prefix: &Name) -> Option<&FibEntry> {
        self.entries.get(prefix)
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Adds `face` as a next hop for `prefix`, creating the entry if needed.
    pub fn add_next_hop(&mut self, prefix: Name, face: FaceId) {
        let entry = self.entries.entry(prefix.clone()).or_insert_with(|| FibEntry {
            prefix,
            next_hops: Vec::new(),
        });
        if !entry.next_hops.contains(&face) {
            entry.next_hops.push(face);
            entry.next_hops.sort();
        }
    }

    /// Drops `face` from `prefix`; the entry disappears with its last hop.
    pub fn remove_next_hop(&mut self, prefix: &Name, face: FaceId) {
        if let Some(entry) = self.entries.get_mut(prefix) {
            entry.next_hops.retain(|&f| f != face);
            if entry.next_hops.is_empty() {
                self.entries.remove(prefix);
            }
        }
    }

    /// Longest-prefix match.
    pub fn lpm(&self, name: &Name) -> Option<&FibEntry> {
        (1..=name.len())
            .rev()
            .find_map(|len| self.entries.get(&name.prefix(len).unwrap()))
    }
}
