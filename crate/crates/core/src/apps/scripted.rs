use std::collections::BTreeMap;

use rand::Rng;

use super::{AppAction, AppContext, Outcome};
use crate::ndn::{Data, Interest, Name};
use crate::time::SimTime;

/// An interest the scripted app sends at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedInterest {
    pub at: SimTime,
    pub name: Name,
    /// Drawn from the node's RNG when absent.
    pub nonce: Option<u32>,
    pub lifetime_ms: u32,
    pub can_be_prefix: bool,
}

/// A canned Data reply for interests under `prefix`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedReply {
    pub prefix: Name,
    pub payload: Vec<u8>,
    pub freshness_ms: u32,
}

/// Test and scenario driver: sends interests on a schedule, answers from a
/// fixed table and logs every outcome.
#[derive(Debug, Clone, Default)]
pub struct ScriptedApp {
    schedule: Vec<ScriptedInterest>,
    replies: Vec<ScriptedReply>,
    pub outcomes: Vec<(SimTime, Name, Outcome)>,
    pub interests_seen: Vec<(SimTime, Name)>,
}

impl ScriptedApp {
    pub fn new(schedule: Vec<ScriptedInterest>, replies: Vec<ScriptedReply>) -> Self {
        Self {
            schedule,
            replies,
            outcomes: Vec::new(),
            interests_seen: Vec::new(),
        }
    }

    pub fn prefixes(&self) -> Vec<Name> {
        self.replies.iter().map(|r| r.prefix.clone()).collect()
    }

    pub fn start(&mut self, ctx: &mut AppContext) -> Vec<AppAction> {
        self.schedule
            .iter()
            .enumerate()
            .map(|(i, s)| AppAction::Timer {
                delay: s.at.saturating_sub(ctx.now),
                tag: i as u64,
            })
            .collect()
    }

    pub fn on_timer(&mut self, ctx: &mut AppContext, tag: u64) -> Vec<AppAction> {
        let Some(s) = self.schedule.get(tag as usize) else {
            return Vec::new();
        };
        let nonce = s.nonce.unwrap_or_else(|| ctx.rng.random());
        let interest = Interest::new(s.name.clone(), nonce)
            .with_lifetime(s.lifetime_ms)
            .with_can_be_prefix(s.can_be_prefix);
        vec![AppAction::Express { interest, tracked: true }]
    }

    pub fn on_interest(&mut self, ctx: &mut AppContext, interest: &Interest) -> Vec<AppAction> {
        self.interests_seen.push((ctx.now, interest.name.clone()));
        self.replies
            .iter()
            .find(|r| r.prefix.is_prefix_of(&interest.name))
            .map(|r| vec![AppAction::PutData(Data::new(interest.name.clone(), r.payload.clone(), r.freshness_ms))])
            .unwrap_or_default()
    }

    pub fn record(&mut self, now: SimTime, interest: &Interest, outcome: Outcome) {
        self.outcomes.push((now, interest.name.clone(), outcome));
    }

    /// Count of each outcome kind.
    pub fn tally(&self) -> BTreeMap<Outcome, usize> {
        let mut m = BTreeMap::new();
        for (_, _, o) in &self.outcomes {
            *m.entry(*o).or_default() += 1;
        }
        m
    }
}
