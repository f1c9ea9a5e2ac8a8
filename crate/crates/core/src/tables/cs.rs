use std::collections::{BTreeMap, BTreeSet};

use crate::ndn::{Data, Interest, Name};
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq)]
pub struct CsEntry {
    pub data: Data,
    pub arrival_time: SimTime,
    pub last_used: SimTime,
}

impl CsEntry {
    fn is_stale(&self, now: SimTime) -> bool {
        now.saturating_sub(self.arrival_time) > SimTime::from_millis(u64::from(self.data.freshness_ms))
    }
}

/// Bounded Data cache with least-recently-used eviction.
///
/// Eviction order is `(last_used, arrival_time, name)`, all ascending. Stale
/// entries are dropped lazily when a lookup touches them.
#[derive(Debug, Clone, Default)]
pub struct ContentStore {
    capacity: usize,
    entries: BTreeMap<Name, CsEntry>,
    order: BTreeSet<(SimTime, SimTime, Name)>,
}

impl ContentStore {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            ..Default::default()
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.entries.contains_key(name)
    }

    pub fn get(&self, name: &Name) -> Option<&CsEntry> {
        self.entries.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &CsEntry)> {
        self.entries.iter()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.order.clear();
    }

    /// Looks up a fresh entry for `interest`, refreshing its recency on a hit.
    pub fn find(&mut self, interest: &Interest, now: SimTime) -> Option<Data> {
        let candidates: Vec<Name> = if interest.can_be_prefix {
            self.entries
                .range(interest.name.clone()..)
                .take_while(|(n, _)| interest.name.is_prefix_of(n))
                .map(|(n, _)| n.clone())
                .collect()
        } else if self.entries.contains_key(&interest.name) {
            vec![interest.name.clone()]
        } else {
            Vec::new()
        };

        for name in candidates {
            let stale = self.entries[&name].is_stale(now);
            if stale {
                self.remove(&name);
                continue;
            }
            let entry = self.entries.get_mut(&name).unwrap();
            self.order.remove(&(entry.last_used, entry.arrival_time, name.clone()));
            entry.last_used = now.max(entry.arrival_time);
            self.order.insert((entry.last_used, entry.arrival_time, name));
            return Some(entry.data.clone());
        }
        None
    }

    /// Caches `data`, returning the evicted name when the store was full.
    pub fn insert(&mut self, data: Data, now: SimTime) -> Option<Name> {
        if self.capacity == 0 {
            return None;
        }
        let name = data.name.clone();
        if self.entries.contains_key(&name) {
            self.remove(&name);
        }
        let evicted = if self.entries.len() >= self.capacity {
            let victim = self.order.iter().next().map(|(_, _, n)| n.clone());
            if let Some(v) = &victim {
                self.remove(v);
            }
            victim
        } else {
            None
        };
        self.order.insert((now, now, name.clone()));
        self.entries.insert(
            name,
            CsEntry {
                data,
                arrival_time: now,
                last_used: now,
            },
        );
        evicted
    }

    fn remove(&mut self, name: &Name) -> Option<CsEntry> {
        let entry = self.entries.remove(name)?;
        self.order.remove(&(entry.last_used, entry.arrival_time, name.clone()));
        Some(entry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::parse_uri(s).unwrap()
    }

    fn data(s: &str, fresh: u32) -> Data {
        Data::new(n(s), b"x".to_vec(), fresh)
    }

    fn ms(v: u64) -> SimTime {
        SimTime::from_millis(v)
    }

    #[test]
    fn exact_hit() {
        let mut cs = ContentStore::new(10);
        cs.insert(data("/a/b", 1000), ms(0));
        assert!(cs.find(&Interest::new(n("/a/b"), 1), ms(10)).is_some());
        assert!(cs.find(&Interest::new(n("/a"), 1), ms(10)).is_none());
    }

    #[test]
    fn prefix_hit() {
        let mut cs = ContentStore::new(10);
        cs.insert(data("/a/b/c", 1000), ms(0));
        let i = Interest::new(n("/a/b"), 1).with_can_be_prefix(true);
        assert_eq!(cs.find(&i, ms(1)).unwrap().name, n("/a/b/c"));
        let i = Interest::new(n("/a/bc"), 1).with_can_be_prefix(true);
        assert!(cs.find(&i, ms(1)).is_none());
    }

    #[test]
    fn stale_entry_is_evicted_on_lookup() {
        let mut cs = ContentStore::new(10);
        cs.insert(data("/a/b", 100), ms(0));
        assert!(cs.find(&Interest::new(n("/a/b"), 1), ms(100)).is_some());
        assert!(cs.find(&Interest::new(n("/a/b"), 1), ms(150)).is_none());
        assert!(cs.is_empty());
    }

    #[test]
    fn capacity_one_replaces() {
        let mut cs = ContentStore::new(1);
        assert_eq!(cs.insert(data("/a", 1000), ms(0)), None);
        assert_eq!(cs.insert(data("/b", 1000), ms(1)), Some(n("/a")));
        assert_eq!(cs.len(), 1);
        assert!(cs.contains(&n("/b")));
    }

    #[test]
    fn capacity_zero_is_noop() {
        let mut cs = ContentStore::new(0);
        assert_eq!(cs.insert(data("/a", 1000), ms(0)), None);
        assert!(cs.is_empty());
    }

    #[test]
    fn lru_touch_protects_entry() {
        let mut cs = ContentStore::new(2);
        cs.insert(data("/a", 1000), ms(0));
        cs.insert(data("/b", 1000), ms(1));
        assert!(cs.find(&Interest::new(n("/a"), 1), ms(2)).is_some());
        assert_eq!(cs.insert(data("/c", 1000), ms(3)), Some(n("/b")));
    }

    #[test]
    fn ties_break_by_name() {
        let mut cs = ContentStore::new(2);
        cs.insert(data("/b", 1000), ms(0));
        cs.insert(data("/a", 1000), ms(0));
        assert_eq!(cs.insert(data("/c", 1000), ms(0)), Some(n("/a")));
    }

    #[test]
    fn reinsert_refreshes() {
        let mut cs = ContentStore::new(2);
        cs.insert(data("/a", 1000), ms(0));
        cs.insert(data("/b", 1000), ms(1));
        cs.insert(data("/a", 1000), ms(2));
        assert_eq!(cs.len(), 2);
        assert_eq!(cs.insert(data("/c", 1000), ms(3)), Some(n("/b")));
    }
}
