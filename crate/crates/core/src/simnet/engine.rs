//! Discrete-event core: a `(time, sequence)`-ordered queue, per-node CPU
//! serialization, link latencies, and critical-path accounting.
//!
//! Nodes are plain state machines owned by a driver. The driver pops a
//! [`Delivery`], runs the receiving node's handler, and hands the resulting
//! [`Reaction`] back to [`Engine::react`], which charges the node's compute
//! time and schedules the outgoing messages.
//!
//! Every timestamp carries the breakdown of the causal chain that produced it.
//! When a node is busy, its work starts from whichever of (message arrival,
//! previous completion) is later, and that chain's breakdown is inherited, so
//! a [`Stamp`]'s breakdown always sums to its time.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::AddAssign;
use core::time::Duration;

use super::latency::LatencyModel;

pub type SimTime = Duration;

/// Where time on the critical path went.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Radio,
    CoreLink,
    EcPointMul,
    AsymEncrypt,
    AsymDecrypt,
    Hash,
}

impl Phase {
    pub const ALL: [Phase; 6] =
        [Phase::Radio, Phase::CoreLink, Phase::EcPointMul, Phase::AsymEncrypt, Phase::AsymDecrypt, Phase::Hash];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Radio => "drone_link",
            Phase::CoreLink => "core_link",
            Phase::EcPointMul => "ec_point_mul",
            Phase::AsymEncrypt => "asym_encrypt",
            Phase::AsymDecrypt => "asym_decrypt",
            Phase::Hash => "hash",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Breakdown([Duration; 6]);

impl Breakdown {
    pub fn get(&self, phase: Phase) -> Duration {
        self.0[phase.index()]
    }

    pub fn total(&self) -> Duration {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Phase, Duration)> + '_ {
        Phase::ALL.iter().map(|p| (*p, self.get(*p)))
    }
}

/// A point in simulated time plus the critical path that reached it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stamp {
    pub at: SimTime,
    pub path: Breakdown,
}

impl Stamp {
    pub const ZERO: Stamp = Stamp { at: Duration::ZERO, path: Breakdown([Duration::ZERO; 6]) };

    pub fn advance(mut self, phase: Phase, d: Duration) -> Self {
        self.at += d;
        self.path.0[phase.index()] += d;
        self
    }

    /// The later of two stamps; ties keep `self`.
    pub fn later(self, other: Stamp) -> Stamp {
        if other.at > self.at {
            other
        } else {
            self
        }
    }
}

/// Counts of costed operations performed by a handler.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    pub ec_point_mul: u32,
    pub asym_encrypt: u32,
    pub asym_decrypt: u32,
    pub hash: u32,
}

impl OpCount {
    pub const NONE: OpCount = OpCount { ec_point_mul: 0, asym_encrypt: 0, asym_decrypt: 0, hash: 0 };

    pub fn ec(n: u32) -> Self {
        Self { ec_point_mul: n, ..Self::NONE }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Phase, u32)> {
        [
            (Phase::EcPointMul, self.ec_point_mul),
            (Phase::AsymEncrypt, self.asym_encrypt),
            (Phase::AsymDecrypt, self.asym_decrypt),
            (Phase::Hash, self.hash),
        ]
        .into_iter()
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: Self) {
        self.ec_point_mul += rhs.ec_point_mul;
        self.asym_encrypt += rhs.asym_encrypt;
        self.asym_decrypt += rhs.asym_decrypt;
        self.hash += rhs.hash;
    }
}

/// Kind of hop between two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    /// Drone to drone (also a broadcast heard back by its sender).
    Radio,
    /// One leg between a device and the core network.
    Cellular,
    /// Inside the core network; free.
    Local,
}

#[derive(Debug, Clone)]
pub struct Outgoing<A, M> {
    pub to: Vec<A>,
    pub msg: M,
}

/// What a node did in response to one event: `work`, then `sends`, then `after`.
#[derive(Debug, Clone)]
pub struct Reaction<A, M> {
    pub work: OpCount,
    pub sends: Vec<Outgoing<A, M>>,
    pub after: OpCount,
}

impl<A, M> Default for Reaction<A, M> {
    fn default() -> Self {
        Self { work: OpCount::NONE, sends: Vec::new(), after: OpCount::NONE }
    }
}

impl<A, M> Reaction<A, M> {
    pub fn idle() -> Self {
        Self::default()
    }

    pub fn send(mut self, to: Vec<A>, msg: M) -> Self {
        self.sends.push(Outgoing { to, msg });
        self
    }

    pub fn merge(&mut self, other: Reaction<A, M>) {
        self.work += other.work;
        self.sends.extend(other.sends);
        self.after += other.after;
    }
}

/// Completion times of one [`Reaction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReactionTimes {
    /// After `work`; when the sends leave.
    pub sent: Stamp,
    /// After `after`.
    pub done: Stamp,
}

#[derive(Debug, Clone)]
pub struct Delivery<A, M> {
    pub from: A,
    pub to: A,
    pub msg: M,
    pub stamp: Stamp,
    /// Re-injected by an adversary rather than sent by `from`.
    pub injected: bool,
}

/// In-path observer. Sees every transmission, may rewrite or drop it, and may
/// re-inject captured traffic once the network goes quiet.
pub trait Tap<A, M> {
    fn on_send(&mut self, _from: &A, _to: &A, msg: M) -> Option<M> {
        Some(msg)
    }

    /// Called when the queue drains. Returned deliveries are scheduled one hop
    /// later and bypass `on_send`.
    fn on_quiescent(&mut self) -> Vec<(A, A, M)> {
        Vec::new()
    }
}

/// A tap that changes nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct PassThrough;

impl<A, M> Tap<A, M> for PassThrough {}

struct Entry<E> {
    at: SimTime,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Entry<E> {
    fn eq(&self, other: &Self) -> bool {
        self.at == other.at && self.seq == other.seq
    }
}

impl<E> Eq for Entry<E> {}

impl<E> PartialOrd for Entry<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Entry<E> {
    // Reversed: BinaryHeap is a max-heap and we want the earliest first.
    fn cmp(&self, other: &Self) -> Ordering {
        (other.at, other.seq).cmp(&(self.at, self.seq))
    }
}

/// Min-queue on `(time, insertion sequence)`.
pub struct EventQueue<E> {
    heap: BinaryHeap<Entry<E>>,
    seq: u64,
}

impl<E> Default for EventQueue<E> {
    fn default() -> Self {
        Self { heap: BinaryHeap::new(), seq: 0 }
    }
}

impl<E> EventQueue<E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, at: SimTime, event: E) {
        self.heap.push(Entry { at, seq: self.seq, event });
        self.seq += 1;
    }

    pub fn pop(&mut self) -> Option<(SimTime, E)> {
        self.heap.pop().map(|e| (e.at, e.event))
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

pub struct Engine<'t, A, M> {
    model: LatencyModel,
    link: fn(&A, &A) -> Link,
    queue: EventQueue<Delivery<A, M>>,
    cpu: BTreeMap<A, Stamp>,
    ops: OpCount,
    transmissions: u32,
    tap: &'t mut dyn Tap<A, M>,
    now: SimTime,
    last: Stamp,
}

impl<'t, A: Ord + Clone, M: Clone> Engine<'t, A, M> {
    pub fn new(model: LatencyModel, link: fn(&A, &A) -> Link, tap: &'t mut dyn Tap<A, M>) -> Self {
        Self {
            model,
            link,
            queue: EventQueue::new(),
            cpu: BTreeMap::new(),
            ops: OpCount::NONE,
            transmissions: 0,
            tap,
            now: Duration::ZERO,
            last: Stamp::ZERO,
        }
    }

    pub fn model(&self) -> &LatencyModel {
        &self.model
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    /// Operations charged so far, summed over all nodes.
    pub fn ops(&self) -> OpCount {
        self.ops
    }

    /// Point-to-point transmissions scheduled so far (a broadcast counts once per receiver).
    pub fn transmissions(&self) -> u32 {
        self.transmissions
    }

    /// Latest completion seen on any node.
    pub fn last_activity(&self) -> Stamp {
        self.last
    }

    /// When `node` is next free.
    pub fn free_at(&self, node: &A) -> Stamp {
        self.cpu.get(node).copied().unwrap_or(Stamp::ZERO)
    }

    fn charge(&mut self, mut at: Stamp, ops: &OpCount) -> Stamp {
        self.ops += *ops;
        for (phase, n) in ops.iter() {
            for _ in 0..n {
                at = at.advance(phase, self.model.op_cost(phase));
            }
        }
        at
    }

    fn hop(&self, from: &A, to: &A, at: Stamp) -> Stamp {
        match (self.link)(from, to) {
            Link::Radio => at.advance(Phase::Radio, self.model.drone_to_drone),
            Link::Cellular => at.advance(Phase::CoreLink, self.model.core_leg()),
            Link::Local => at,
        }
    }

    /// Runs `reaction` on `node`, triggered at `trigger`.
    pub fn react(&mut self, node: &A, trigger: Stamp, reaction: Reaction<A, M>) -> ReactionTimes {
        let start = trigger.later(self.free_at(node));
        let sent = self.charge(start, &reaction.work);
        for out in reaction.sends {
            for to in &out.to {
                if let Some(msg) = self.tap.on_send(node, to, out.msg.clone()) {
                    let stamp = self.hop(node, to, sent);
                    self.transmissions += 1;
                    self.queue
                        .push(stamp.at, Delivery { from: node.clone(), to: to.clone(), msg, stamp, injected: false });
                }
            }
        }
        let done = self.charge(sent, &reaction.after);
        self.cpu.insert(node.clone(), done);
        self.last = self.last.later(done);
        ReactionTimes { sent, done }
    }

    /// Next delivery in time order. When the queue drains, the tap gets one
    /// chance per drain to re-inject traffic.
    pub fn next_delivery(&mut self) -> Option<Delivery<A, M>> {
        if self.queue.is_empty() {
            let base = Stamp { at: self.now, path: self.last.path };
            let base = if self.last.at >= self.now { self.last } else { base };
            for (from, to, msg) in self.tap.on_quiescent() {
                let stamp = self.hop(&from, &to, base);
                self.queue.push(stamp.at, Delivery { from, to, msg, stamp, injected: true });
            }
        }
        let (at, delivery) = self.queue.pop()?;
        self.now = at;
        self.last = self.last.later(delivery.stamp);
        Some(delivery)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn radio(_: &u8, _: &u8) -> Link {
        Link::Radio
    }

    #[test]
    fn queue_orders_by_time_then_insertion() {
        let mut q = EventQueue::new();
        q.push(Duration::from_micros(5), 'a');
        q.push(Duration::from_micros(1), 'b');
        q.push(Duration::from_micros(5), 'c');
        q.push(Duration::from_micros(1), 'd');
        let order: Vec<_> = core::iter::from_fn(|| q.pop().map(|(_, e)| e)).collect();
        assert_eq!(order, ['b', 'd', 'a', 'c']);
    }

    #[test]
    fn busy_node_serializes_and_breakdown_sums_to_time() {
        let mut tap = PassThrough;
        let mut engine: Engine<'_, u8, ()> = Engine::new(LatencyModel::default(), radio, &mut tap);
        let r = Reaction::idle().send(vec![1, 2], ());
        engine.react(&0, Stamp::ZERO, r);
        let mut finished = Vec::new();
        while let Some(d) = engine.next_delivery() {
            let t = engine.react(&d.to, d.stamp, Reaction { work: OpCount::ec(2), ..Reaction::idle() });
            finished.push(t.done);
        }
        for s in &finished {
            assert_eq!(s.at, Duration::from_micros(600 + 2 * 612));
            assert_eq!(s.path.total(), s.at);
        }
        // Second event on an already busy node waits for it.
        let t1 = engine.react(&1, Stamp::ZERO, Reaction { work: OpCount::ec(1), ..Reaction::idle() });
        assert_eq!(t1.done.at, Duration::from_micros(600 + 3 * 612));
        assert_eq!(t1.done.path.get(Phase::EcPointMul), Duration::from_micros(3 * 612));
        assert_eq!(engine.ops().ec_point_mul, 5);
    }

    struct Dropper;
    impl Tap<u8, u32> for Dropper {
        fn on_send(&mut self, _: &u8, to: &u8, msg: u32) -> Option<u32> {
            (*to != 2).then_some(msg + 1)
        }
    }

    #[test]
    fn tap_can_rewrite_and_drop() {
        let mut tap = Dropper;
        let mut engine: Engine<'_, u8, u32> = Engine::new(LatencyModel::default(), radio, &mut tap);
        engine.react(&0, Stamp::ZERO, Reaction::idle().send(vec![1, 2], 10));
        let d = engine.next_delivery().unwrap();
        assert_eq!((d.to, d.msg), (1, 11));
        assert!(engine.next_delivery().is_none());
    }
}
