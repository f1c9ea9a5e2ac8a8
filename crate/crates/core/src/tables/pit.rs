use std::collections::BTreeMap;

use super::FaceId;
use crate::ndn::{Data, Interest, Name};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InRecord {
    pub face: FaceId,
    pub nonce: u32,
    pub expiry: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutRecord {
    pub face: FaceId,
    pub nonce: u32,
    pub sent_at: SimTime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PitEntry {
    pub name: Name,
    pub can_be_prefix: bool,
    pub in_records: Vec<InRecord>,
    pub out_records: Vec<OutRecord>,
    pub expiry: SimTime,
}

impl PitEntry {
    pub fn has_nonce(&self, nonce: u32) -> bool {
        self.in_records.iter().any(|r| r.nonce == nonce) || self.out_records.iter().any(|r| r.nonce == nonce)
    }

    fn matches(&self, data: &Data) -> bool {
        self.name == data.name || (self.can_be_prefix && self.name.is_prefix_of(&data.name))
    }

    fn recompute_expiry(&mut self) {
        self.expiry = self.in_records.iter().map(|r| r.expiry).max().unwrap_or(SimTime::ZERO);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PitInsert {
    NewEntry,
    Aggregated,
    DuplicateNonce,
}

/// Pending Interest Table keyed by exact name.
#[derive(Debug, Clone, Default)]
pub struct Pit {
    entries: BTreeMap<Name, PitEntry>,
    expired_total: u64,
}

impl Pit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &Name) -> Option<&PitEntry> {
        self.entries.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PitEntry> {
        self.entries.values()
    }

    /// Entries removed because their lifetime ran out, over the table's life.
    pub fn expired_total(&self) -> u64 {
        self.expired_total
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn insert_or_aggregate(&mut self, interest: &Interest, in_face: FaceId, now: SimTime) -> PitInsert {
        let record = InRecord {
            face: in_face,
            nonce: interest.nonce,
            expiry: now + SimTime::from_millis(u64::from(interest.lifetime_ms)),
        };
        if self.entries.get(&interest.name).is_some_and(|e| e.expiry <= now) {
            self.entries.remove(&interest.name);
            self.expired_total += 1;
        }
        match self.entries.get_mut(&interest.name) {
            Some(entry) if entry.has_nonce(interest.nonce) => PitInsert::DuplicateNonce,
            Some(entry) => {
                entry.in_records.retain(|r| r.face != in_face);
                entry.in_records.push(record);
                entry.can_be_prefix |= interest.can_be_prefix;
                entry.recompute_expiry();
                PitInsert::Aggregated
            }
            None => {
                self.entries.insert(
                    interest.name.clone(),
                    PitEntry {
                        name: interest.name.clone(),
                        can_be_prefix: interest.can_be_prefix,
                        in_records: vec![record],
                        out_records: Vec::new(),
                        expiry: record.expiry,
                    },
                );
                PitInsert::NewEntry
            }
        }
    }

    pub fn add_out_record(&mut self, name: &Name, face: FaceId, nonce: u32, now: SimTime) {
        if let Some(entry) = self.entries.get_mut(name) {
            entry.out_records.retain(|r| r.face != face);
            entry.out_records.push(OutRecord {
                face,
                nonce,
                sent_at: now,
            });
        }
    }

    /// Forgets that the entry was sent out of `face`.
    pub fn remove_out_record(&mut self, name: &Name, face: FaceId) {
        if let Some(entry) = self.entries.get_mut(name) {
            entry.out_records.retain(|r| r.face != face);
        }
    }

    pub fn remove(&mut self, name: &Name) -> Option<PitEntry> {
        self.entries.remove(name)
    }

    /// Removes and returns every live entry satisfied by `data`, shortest
    /// name first.
    pub fn match_data(&mut self, data: &Data, now: SimTime) -> Vec<PitEntry> {
        let mut matched = Vec::new();
        for len in 1..=data.name.len() {
            let key = data.name.prefix(len).unwrap();
            let hit = self.entries.get(&key).map(|e| (e.matches(data), e.expiry <= now));
            match hit {
                Some((_, true)) => {
                    self.entries.remove(&key);
                    self.expired_total += 1;
                }
                Some((true, false)) => matched.push(self.entries.remove(&key).unwrap()),
                _ => {}
            }
        }
        matched
    }

    /// Removes entries whose expiry is at or before `now`, ordered by expiry
    /// then name.
    pub fn expire(&mut self, now: SimTime) -> Vec<PitEntry> {
        let names: Vec<Name> = self
            .entries
            .iter()
            .filter(|(_, e)| e.expiry <= now)
            .map(|(n, _)| n.clone())
            .collect();
        let mut out: Vec<PitEntry> = names.iter().filter_map(|n| self.entries.remove(n)).collect();
        out.sort_by(|a, b| a.expiry.cmp(&b.expiry).then_with(|| a.name.cmp(&b.name)));
        self.expired_total += out.len() as u64;
        out
    }

    pub fn next_expiry(&self) -> Option<SimTime> {
        self.entries.values().map(|e| e.expiry).min()
    }
}
