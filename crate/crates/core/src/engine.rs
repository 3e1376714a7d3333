//! Synchronous Broadcast CONGEST executor and round accounting.
//!
//! A node acts in a round only when it scheduled a wakeup for it, so rounds
//! in which nothing happens cost nothing to simulate but are still counted.
//! Within round `r` every woken node may emit one [`Word`]; the engine then
//! hands that word to every neighbour before round `r + 1` begins.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{CommNetwork, NodeId};

/// One message unit: a node id, an integer and a small tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Word {
    pub id: u32,
    pub value: u64,
    pub tag: u32,
}

impl Word {
    pub fn new(id: usize, value: u64, tag: u32) -> Self {
        Self { id: id as u32, value, tag }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundLedger {
    pub rounds: u64,
    pub total_words: u64,
    pub per_node_broadcasts: Vec<u64>,
    pub phases: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerSummary {
    pub rounds: u64,
    pub total_words: u64,
    pub phases: BTreeMap<String, u64>,
    pub max_node_broadcasts: u64,
}

impl RoundLedger {
    pub fn new(n: usize) -> Self {
        Self { per_node_broadcasts: vec![0; n], ..Self::default() }
    }

    pub fn charge(&mut self, phase: &str, rounds: u64) {
        self.rounds += rounds;
        *self.phases.entry(phase.to_string()).or_insert(0) += rounds;
    }

    pub fn record_words(&mut self, v: NodeId, words: u64) {
        self.total_words += words;
        self.per_node_broadcasts[v] += words;
    }

    pub fn max_node_broadcasts(&self) -> u64 {
        self.per_node_broadcasts.iter().copied().max().unwrap_or(0)
    }

    pub fn summary(&self) -> LedgerSummary {
        LedgerSummary {
            rounds: self.rounds,
            total_words: self.total_words,
            phases: self.phases.clone(),
            max_node_broadcasts: self.max_node_broadcasts(),
        }
    }

    /// Rounds charged to phases whose name starts with `prefix`.
    pub fn phase_rounds(&self, prefix: &str) -> u64 {
        self.phases.iter().filter(|(k, _)| k.starts_with(prefix)).map(|(_, v)| v).sum()
    }

    /// The accounting identities every ledger must satisfy.
    pub fn is_consistent(&self) -> bool {
        let n = self.per_node_broadcasts.len() as u64;
        self.total_words <= self.rounds.saturating_mul(n)
            && self.per_node_broadcasts.iter().all(|&b| b <= self.rounds)
            && self.per_node_broadcasts.iter().sum::<u64>() == self.total_words
    }
}

/// When a synchronous execution ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    /// As soon as every program reports done; at least one round runs.
    AllDone,
    /// After exactly this many rounds.
    Horizon(u64),
    /// After the last round in which some node was scheduled.
    Quiescence,
}

#[derive(Default)]
struct Calendar {
    base: u64,
    buckets: VecDeque<Vec<(u32, u64)>>,
    spare: Vec<Vec<(u32, u64)>>,
}

impl Calendar {
    fn push(&mut self, at: u64, node: NodeId, token: u64) {
        let idx = (at - self.base) as usize;
        while self.buckets.len() <= idx {
            let b = self.spare.pop().unwrap_or_default();
            self.buckets.push_back(b);
        }
        self.buckets[idx].push((node as u32, token));
    }

    /// Earliest round with pending entries.
    fn next(&mut self) -> Option<u64> {
        while let Some(front) = self.buckets.front() {
            if !front.is_empty() {
                return Some(self.base);
            }
            let b = self.buckets.pop_front().unwrap();
            self.spare.push(b);
            self.base += 1;
        }
        None
    }

    fn take_front(&mut self) -> Vec<(u32, u64)> {
        let b = self.buckets.pop_front().unwrap_or_default();
        self.base += 1;
        b
    }

    fn recycle(&mut self, mut b: Vec<(u32, u64)>) {
        b.clear();
        self.spare.push(b);
    }
}

/// Per-callback handle for scheduling future activity.
pub struct Ctx<'c> {
    round: u64,
    node: NodeId,
    cal: &'c mut Calendar,
}

impl Ctx<'_> {
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn node(&self) -> NodeId {
        self.node
    }

    /// Schedules `on_wake(token)` and then `on_round` for round `at`.
    pub fn wake(&mut self, at: u64, token: u64) {
        assert!(at > self.round, "wakeups must lie in the future");
        self.cal.push(at, self.node, token);
    }
}

/// Behaviour of one node. Each program only sees its own state, the words
/// its neighbours broadcast, and whatever local input it was built with.
pub trait NodeProgram {
    fn init(&mut self, _ctx: &mut Ctx) {}

    fn on_wake(&mut self, _token: u64, _ctx: &mut Ctx) {}

    /// Called once per round in which the node is awake; the returned word
    /// goes to every neighbour.
    fn on_round(&mut self, ctx: &mut Ctx) -> Option<Word>;

    /// `pos` is the receiver's adjacency position of the sender.
    fn on_receive(&mut self, _pos: usize, _from: NodeId, _word: &Word, _ctx: &mut Ctx) {}

    fn is_done(&self) -> bool {
        true
    }
}

/// Runs `programs` (one per node) in lockstep. Returns the rounds charged.
pub fn run_synchronous<P: NodeProgram>(
    net: &CommNetwork,
    programs: &mut [P],
    stop: Stop,
    round_cap: u64,
    ledger: &mut RoundLedger,
    phase: &str,
) -> Result<u64> {
    let n = net.node_count();
    assert_eq!(programs.len(), n, "one program per node");
    let mut cal = Calendar { base: 1, ..Calendar::default() };
    for (v, p) in programs.iter_mut().enumerate() {
        p.init(&mut Ctx { round: 0, node: v, cal: &mut cal });
    }
    let track_done = stop == Stop::AllDone;
    let mut done: Vec<bool> = if track_done { programs.iter().map(|p| p.is_done()).collect() } else { Vec::new() };
    let mut done_count = done.iter().filter(|&&d| d).count();
    let mut stamp = vec![0u64; n];
    let mut active: Vec<NodeId> = Vec::new();
    let mut outbox: Vec<(NodeId, Word)> = Vec::new();
    let mut round = 0u64;

    if let Stop::Horizon(h) = stop {
        if h > round_cap {
            return Err(budget(round_cap, ledger, phase, 0));
        }
    }

    loop {
        if track_done && done_count == n {
            round = round.max(1);
            break;
        }
        let next = cal.next();
        match stop {
            Stop::AllDone if next.is_none() => {
                ledger.charge(phase, round);
                return Err(Error::Stalled(round));
            }
            Stop::Horizon(h) if next.is_none_or(|r| r > h) => {
                round = h;
                break;
            }
            Stop::Quiescence if next.is_none() => {
                round = round.max(1);
                break;
            }
            _ => {}
        }
        let r = next.expect("checked above");
        if r > round_cap {
            return Err(budget(round_cap, ledger, phase, round));
        }
        round = r;
        let bucket = cal.take_front();
        for &(v, token) in &bucket {
            let v = v as usize;
            if stamp[v] != round {
                stamp[v] = round;
                active.push(v);
            }
            programs[v].on_wake(token, &mut Ctx { round, node: v, cal: &mut cal });
        }
        cal.recycle(bucket);
        for &v in &active {
            if let Some(w) = programs[v].on_round(&mut Ctx { round, node: v, cal: &mut cal }) {
                outbox.push((v, w));
            }
        }
        for &(u, w) in &outbox {
            ledger.record_words(u, 1);
            for p in net.positions(u) {
                let v = net.neighbor_at(p);
                programs[v].on_receive(net.mirror(p), u, &w, &mut Ctx { round, node: v, cal: &mut cal });
                if track_done {
                    let d = programs[v].is_done();
                    if d != done[v] {
                        done[v] = d;
                        if d { done_count += 1 } else { done_count -= 1 }
                    }
                }
            }
        }
        if track_done {
            for &v in &active {
                let d = programs[v].is_done();
                if d != done[v] {
                    done[v] = d;
                    if d { done_count += 1 } else { done_count -= 1 }
                }
            }
        }
        active.clear();
        outbox.clear();
    }
    ledger.charge(phase, round);
    Ok(round)
}

fn budget(cap: u64, ledger: &mut RoundLedger, phase: &str, spent: u64) -> Error {
    ledger.charge(phase, spent);
    Error::BudgetExceeded { cap, ledger: Box::new(ledger.clone()) }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Flood {
        has: bool,
    }

    impl NodeProgram for Flood {
        fn init(&mut self, ctx: &mut Ctx) {
            if self.has {
                ctx.wake(1, 0);
            }
        }
        fn on_round(&mut self, _ctx: &mut Ctx) -> Option<Word> {
            Some(Word::default())
        }
        fn on_receive(&mut self, _pos: usize, _from: NodeId, _w: &Word, ctx: &mut Ctx) {
            if !self.has {
                self.has = true;
                let r = ctx.round();
                ctx.wake(r + 1, 0);
            }
        }
        fn is_done(&self) -> bool {
            self.has
        }
    }

    struct Silent;

    impl NodeProgram for Silent {
        fn on_round(&mut self, _ctx: &mut Ctx) -> Option<Word> {
            None
        }
    }

    fn path(n: usize) -> CommNetwork {
        let links: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        CommNetwork::new(n, &links).unwrap()
    }

    #[test]
    fn flood_on_five_node_path_takes_four_rounds() {
        let net = path(5);
        let mut progs: Vec<Flood> = (0..5).map(|v| Flood { has: v == 0 }).collect();
        let mut ledger = RoundLedger::new(5);
        let r = run_synchronous(&net, &mut progs, Stop::AllDone, 100, &mut ledger, "flood").unwrap();
        assert_eq!(r, 4);
        assert_eq!(ledger.rounds, 4);
        assert_eq!(ledger.total_words, 4);
        assert!(ledger.is_consistent());
    }

    #[test]
    fn silent_programs_take_one_round() {
        let net = path(3);
        let mut progs = vec![Silent, Silent, Silent];
        let mut ledger = RoundLedger::new(3);
        let r = run_synchronous(&net, &mut progs, Stop::AllDone, 10, &mut ledger, "idle").unwrap();
        assert_eq!(r, 1);
        assert_eq!(ledger.total_words, 0);
    }

    #[test]
    fn budget_exceeded_carries_ledger() {
        let net = path(6);
        let mut progs: Vec<Flood> = (0..6).map(|v| Flood { has: v == 0 }).collect();
        let mut ledger = RoundLedger::new(6);
        match run_synchronous(&net, &mut progs, Stop::AllDone, 3, &mut ledger, "flood") {
            Err(Error::BudgetExceeded { cap, ledger }) => {
                assert_eq!(cap, 3);
                assert_eq!(ledger.rounds, 3);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn stall_detected() {
        let net = path(3);
        let mut progs: Vec<Flood> = (0..3).map(|_| Flood { has: false }).collect();
        let mut ledger = RoundLedger::new(3);
        assert!(matches!(
            run_synchronous(&net, &mut progs, Stop::AllDone, 10, &mut ledger, "x"),
            Err(Error::Stalled(0))
        ));
    }

    #[test]
    fn horizon_charges_exactly() {
        let net = path(4);
        let mut progs: Vec<Flood> = (0..4).map(|v| Flood { has: v == 0 }).collect();
        let mut ledger = RoundLedger::new(4);
        let r = run_synchronous(&net, &mut progs, Stop::Horizon(10), 10, &mut ledger, "h").unwrap();
        assert_eq!(r, 10);
        assert_eq!(ledger.total_words, 4);
        assert!(run_synchronous(&net, &mut progs, Stop::Horizon(11), 10, &mut ledger, "h").is_err());
    }

    #[test]
    fn summary_serializes_expected_keys() {
        let mut l = RoundLedger::new(2);
        l.charge("a", 3);
        l.record_words(1, 2);
        let json = serde_json::to_string(&l.summary()).unwrap();
        assert_eq!(json, r#"{"rounds":3,"total_words":2,"phases":{"a":3},"max_node_broadcasts":2}"#);
    }
}
