//! Deterministic tick clock, node scheduler and publish/subscribe bus.
//!
//! Topics are single-slot mailboxes: a subscriber always observes the most
//! recent message, which is how a flooding attacker drowns a genuine sensor.
//! Writes are ordered by the `(tick, writer class, registration order)`
//! triple, so within one tick genuine writes land before attacker writes and
//! a later-registered attacker beats an earlier one. The base clock runs at
//! 1000 Hz (1 ms ticks); nodes fire at `tick % round(base / rate) == phase`.

use thiserror::Error;

use crate::sensors::{LaserScan, NavSatFixMsg, OdometryMsg};
use crate::world::PoseSetpoint;

/// Base scheduling rate: one tick per millisecond.
pub const BASE_RATE_HZ: f64 = 1000.0;

/// Duration of one tick in seconds.
pub const TICK_DURATION: f64 = 1.0 / BASE_RATE_HZ;

/// Topic names mirroring the simulated system's layout.
pub mod topics {
    pub const LASER_SCAN: &str = "/spur/laser/scan";
    pub const GLOBAL_POSITION_LOCAL: &str = "/mavros/global_position/local";
    pub const GLOBAL_POSITION_GLOBAL: &str = "/mavros/global_position/global";
    pub const SETPOINT_LOCAL: &str = "/mavros/setpoint_position/local";
}

/// Monotone simulation clock.
#[derive(Debug, Clone, Copy)]
pub struct SimClock {
    pub tick: u64,
    pub tick_duration: f64,
}

impl SimClock {
    pub fn new() -> Self {
        Self {
            tick: 0,
            tick_duration: TICK_DURATION,
        }
    }

    pub fn advance(&mut self) {
        self.tick += 1;
    }
}

impl Default for SimClock {
    fn default() -> Self {
        Self::new()
    }
}

/// Who authored a write. Within a tick, `Genuine < Attacker`, the discrete
/// stand-in for the counterfeit signal overpowering the original.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum WriterClass {
    Genuine,
    Attacker,
}

/// Message variants carried by the bus.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Scan(LaserScan),
    Odometry(OdometryMsg),
    NavSatFix(NavSatFixMsg),
    Setpoint(PoseSetpoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadKind {
    Scan,
    Odometry,
    NavSatFix,
    Setpoint,
}

impl Payload {
    pub fn kind(&self) -> PayloadKind {
        match self {
            Payload::Scan(_) => PayloadKind::Scan,
            Payload::Odometry(_) => PayloadKind::Odometry,
            Payload::NavSatFix(_) => PayloadKind::NavSatFix,
            Payload::Setpoint(_) => PayloadKind::Setpoint,
        }
    }
}

/// Identity of a publishing node as seen by the mailbox ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WriterId {
    pub class: WriterClass,
    /// Registration order on the bus; later registrations win ties.
    pub order: usize,
}

/// Total order on writes: greatest key owns the mailbox.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct WriteKey {
    pub tick: u64,
    pub class: WriterClass,
    pub order: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BusError {
    #[error("unknown topic '{0}'")]
    UnknownTopic(String),
    #[error("topic '{topic}' expects {expected:?}, got {got:?}")]
    TypeMismatch {
        topic: String,
        expected: PayloadKind,
        got: PayloadKind,
    },
}

/// Latest-write-wins slot for one topic.
#[derive(Debug, Clone)]
pub struct TopicMailbox {
    pub topic_name: String,
    pub kind: PayloadKind,
    slot: Option<(Payload, WriteKey)>,
}

impl TopicMailbox {
    fn apply(&mut self, payload: Payload, key: WriteKey) {
        match &self.slot {
            Some((_, held)) if *held > key => {}
            _ => self.slot = Some((payload, key)),
        }
    }
}

/// The bus: a small fixed set of declared topics.
#[derive(Debug, Clone, Default)]
pub struct Bus {
    topics: Vec<TopicMailbox>,
}

impl Bus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bus with the four standard topics declared.
    pub fn with_standard_topics() -> Self {
        let mut bus = Self::new();
        bus.declare_topic(topics::LASER_SCAN, PayloadKind::Scan);
        bus.declare_topic(topics::GLOBAL_POSITION_LOCAL, PayloadKind::Odometry);
        bus.declare_topic(topics::GLOBAL_POSITION_GLOBAL, PayloadKind::NavSatFix);
        bus.declare_topic(topics::SETPOINT_LOCAL, PayloadKind::Setpoint);
        bus
    }

    pub fn declare_topic(&mut self, name: &str, kind: PayloadKind) {
        self.topics.push(TopicMailbox {
            topic_name: name.to_string(),
            kind,
            slot: None,
        });
    }

    fn find(&self, topic: &str) -> Result<usize, BusError> {
        self.topics
            .iter()
            .position(|t| t.topic_name == topic)
            .ok_or_else(|| BusError::UnknownTopic(topic.to_string()))
    }

    /// Overwrite the mailbox if this write's key is the greatest seen.
    pub fn publish(
        &mut self,
        writer: WriterId,
        tick: u64,
        topic: &str,
        payload: Payload,
    ) -> Result<(), BusError> {
        let idx = self.find(topic)?;
        let mailbox = &mut self.topics[idx];
        if mailbox.kind != payload.kind() {
            return Err(BusError::TypeMismatch {
                topic: topic.to_string(),
                expected: mailbox.kind,
                got: payload.kind(),
            });
        }
        mailbox.apply(
            payload,
            WriteKey {
                tick,
                class: writer.class,
                order: writer.order,
            },
        );
        Ok(())
    }

    /// Current mailbox payload without consuming it; `None` before the first
    /// write.
    pub fn sample_latest(&self, topic: &str) -> Result<Option<&Payload>, BusError> {
        let idx = self.find(topic)?;
        Ok(self.topics[idx].slot.as_ref().map(|(p, _)| p))
    }

    /// Payload plus the write key that produced it.
    pub fn sample_with_key(&self, topic: &str) -> Result<Option<(&Payload, WriteKey)>, BusError> {
        let idx = self.find(topic)?;
        Ok(self.topics[idx].slot.as_ref().map(|(p, k)| (p, *k)))
    }
}

/// Execution stage of a node within a tick. Stages run in declaration order;
/// within a stage, registration order decides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Sensor,
    Attacker,
    Controller,
    Physics,
}

/// Firing schedule of one registered node.
#[derive(Debug, Clone)]
pub struct NodeSchedule {
    pub node_id: String,
    pub rate_hz: f64,
    pub phase: u64,
    pub writer_class: WriterClass,
    pub stage: Stage,
}

impl NodeSchedule {
    /// Tick period, `round(base / rate)`, at least 1 (rates above the base
    /// rate are capped at one firing per tick).
    pub fn period(&self) -> u64 {
        ((BASE_RATE_HZ / self.rate_hz).round() as u64).max(1)
    }

    pub fn fires_at(&self, tick: u64) -> bool {
        tick % self.period() == self.phase % self.period()
    }
}

/// One node firing, as reported by `advance_tick`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activation {
    pub tick: u64,
    pub node: usize,
    pub node_id: String,
}

/// Registry of node schedules with deterministic per-tick ordering.
#[derive(Debug, Clone, Default)]
pub struct Scheduler {
    nodes: Vec<NodeSchedule>,
}

impl Scheduler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a node; the returned index doubles as its tie-break order.
    pub fn register(&mut self, schedule: NodeSchedule) -> usize {
        self.nodes.push(schedule);
        self.nodes.len() - 1
    }

    pub fn node(&self, index: usize) -> &NodeSchedule {
        &self.nodes[index]
    }

    /// Indices of the nodes due at `tick`, ordered by (stage, registration).
    pub fn due(&self, tick: u64) -> Vec<usize> {
        let mut due: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.nodes[i].fires_at(tick))
            .collect();
        due.sort_by_key(|&i| (self.nodes[i].stage, i));
        due
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;
    use proptest::prelude::*;

    fn odo(x: f64) -> Payload {
        Payload::Odometry(OdometryMsg {
            position: Vector3::new(x, 0.0, 0.0),
            heading: 0.0,
        })
    }

    fn sched(id: &str, rate: f64, stage: Stage, class: WriterClass) -> NodeSchedule {
        NodeSchedule {
            node_id: id.to_string(),
            rate_hz: rate,
            phase: 0,
            writer_class: class,
            stage,
        }
    }

    #[test]
    fn ten_hz_node_fires_every_hundred_ticks() {
        let mut s = Scheduler::new();
        s.register(sched("lidar", 10.0, Stage::Sensor, WriterClass::Genuine));
        let fired: Vec<u64> = (0..301).filter(|&t| !s.due(t).is_empty()).collect();
        assert_eq!(fired, vec![0, 100, 200, 300]);
    }

    #[test]
    fn empty_scheduler_yields_no_activations() {
        let s = Scheduler::new();
        assert!(s.due(0).is_empty());
        assert!(s.due(12345).is_empty());
    }

    #[test]
    fn stage_order_beats_registration_order() {
        let mut s = Scheduler::new();
        let ctrl = s.register(sched(
            "ctrl",
            1000.0,
            Stage::Controller,
            WriterClass::Genuine,
        ));
        let atk = s.register(sched("atk", 1000.0, Stage::Attacker, WriterClass::Attacker));
        let sensor = s.register(sched("lidar", 1000.0, Stage::Sensor, WriterClass::Genuine));
        assert_eq!(s.due(7), vec![sensor, atk, ctrl]);
    }

    #[test]
    fn rate_counts_match_floor_or_ceil_for_integral_periods() {
        // Rates whose period divides the base rate exactly; any window
        // alignment may shift the count by at most the phase off-by-one.
        for &rate in &[10.0, 20.0, 50.0, 100.0, 125.0, 200.0, 250.0, 500.0, 1000.0] {
            for phase in [0u64, 3, 77] {
                for window_start in [0u64, 17, 4321] {
                    let node = NodeSchedule {
                        phase,
                        ..sched("n", rate, Stage::Sensor, WriterClass::Genuine)
                    };
                    let window = 10_000u64;
                    let count = (window_start..window_start + window)
                        .filter(|&t| node.fires_at(t))
                        .count() as f64;
                    let expect = window as f64 * TICK_DURATION * rate;
                    assert!(
                        count == expect.floor() || count == expect.ceil(),
                        "rate {rate} phase {phase} start {window_start}: fired {count}, expected ~{expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn genuine_then_attacker_same_tick_leaves_attacker_payload() {
        let mut bus = Bus::with_standard_topics();
        let genuine = WriterId {
            class: WriterClass::Genuine,
            order: 0,
        };
        let attacker = WriterId {
            class: WriterClass::Attacker,
            order: 1,
        };
        bus.publish(genuine, 5, topics::GLOBAL_POSITION_LOCAL, odo(1.0))
            .unwrap();
        bus.publish(attacker, 5, topics::GLOBAL_POSITION_LOCAL, odo(99.0))
            .unwrap();
        let got = bus
            .sample_latest(topics::GLOBAL_POSITION_LOCAL)
            .unwrap()
            .unwrap();
        assert_eq!(got, &odo(99.0));

        // Order of application must not matter within the tick.
        let mut bus = Bus::with_standard_topics();
        bus.publish(attacker, 5, topics::GLOBAL_POSITION_LOCAL, odo(99.0))
            .unwrap();
        bus.publish(genuine, 5, topics::GLOBAL_POSITION_LOCAL, odo(1.0))
            .unwrap();
        let got = bus
            .sample_latest(topics::GLOBAL_POSITION_LOCAL)
            .unwrap()
            .unwrap();
        assert_eq!(got, &odo(99.0));
    }

    #[test]
    fn lone_writer_persists_until_overwritten() {
        let mut bus = Bus::with_standard_topics();
        let w = WriterId {
            class: WriterClass::Genuine,
            order: 0,
        };
        assert_eq!(
            bus.sample_latest(topics::GLOBAL_POSITION_LOCAL).unwrap(),
            None
        );
        bus.publish(w, 100, topics::GLOBAL_POSITION_LOCAL, odo(2.0))
            .unwrap();
        assert_eq!(
            bus.sample_latest(topics::GLOBAL_POSITION_LOCAL).unwrap(),
            Some(&odo(2.0))
        );
    }

    #[test]
    fn fast_attacker_owns_every_tick_of_the_window() {
        // 10 Hz genuine sensor vs 1000 Hz attacker over 1000 ticks.
        let mut bus = Bus::with_standard_topics();
        let sensor = WriterId {
            class: WriterClass::Genuine,
            order: 0,
        };
        let attacker = WriterId {
            class: WriterClass::Attacker,
            order: 1,
        };
        for t in 0..1000u64 {
            if t % 100 == 0 {
                bus.publish(sensor, t, topics::GLOBAL_POSITION_LOCAL, odo(-1.0))
                    .unwrap();
            }
            bus.publish(attacker, t, topics::GLOBAL_POSITION_LOCAL, odo(t as f64))
                .unwrap();
            let (_, key) = bus
                .sample_with_key(topics::GLOBAL_POSITION_LOCAL)
                .unwrap()
                .unwrap();
            assert_eq!(key.class, WriterClass::Attacker, "tick {t}");
        }
    }

    #[test]
    fn genuine_reappears_after_attack_stops() {
        let mut bus = Bus::with_standard_topics();
        let sensor = WriterId {
            class: WriterClass::Genuine,
            order: 0,
        };
        let attacker = WriterId {
            class: WriterClass::Attacker,
            order: 1,
        };
        let end = 450u64;
        let mut recovered = None;
        for t in 0..700u64 {
            if t % 100 == 0 {
                bus.publish(sensor, t, topics::GLOBAL_POSITION_LOCAL, odo(-1.0))
                    .unwrap();
            }
            if t <= end {
                bus.publish(attacker, t, topics::GLOBAL_POSITION_LOCAL, odo(7.0))
                    .unwrap();
            }
            let (_, key) = bus
                .sample_with_key(topics::GLOBAL_POSITION_LOCAL)
                .unwrap()
                .unwrap();
            if t > end && key.class == WriterClass::Genuine && recovered.is_none() {
                recovered = Some(t);
            }
        }
        assert!(recovered.unwrap() <= end + 100);
    }

    #[test]
    fn type_mismatch_is_rejected() {
        let mut bus = Bus::with_standard_topics();
        let w = WriterId {
            class: WriterClass::Genuine,
            order: 0,
        };
        let err = bus.publish(w, 0, topics::LASER_SCAN, odo(0.0)).unwrap_err();
        assert!(matches!(err, BusError::TypeMismatch { .. }));
    }

    #[test]
    fn unknown_topic_is_a_lookup_error() {
        let bus = Bus::with_standard_topics();
        assert_eq!(
            bus.sample_latest("/nope"),
            Err(BusError::UnknownTopic("/nope".into()))
        );
    }

    proptest! {
        /// After any write sequence the mailbox holds the payload with the
        /// greatest (tick, class, order) triple.
        #[test]
        fn latest_write_wins_over_arbitrary_sequences(
            writes in proptest::collection::vec(
                (0u64..50, prop_oneof![Just(WriterClass::Genuine), Just(WriterClass::Attacker)], 0usize..4),
                1..40,
            )
        ) {
            let mut sorted = writes.clone();
            // Writes arrive tick-ordered; shuffle only within equal ticks by
            // leaving the generated order as-is after a stable sort on tick.
            sorted.sort_by_key(|w| w.0);
            let mut bus = Bus::with_standard_topics();
            let mut best: Option<(WriteKey, f64)> = None;
            for (i, (tick, class, order)) in sorted.iter().enumerate() {
                let value = i as f64;
                let key = WriteKey { tick: *tick, class: *class, order: *order };
                bus.publish(
                    WriterId { class: *class, order: *order },
                    *tick,
                    topics::GLOBAL_POSITION_LOCAL,
                    odo(value),
                ).unwrap();
                match &best {
                    Some((k, _)) if *k > key => {}
                    _ => best = Some((key, value)),
                }
            }
            let (payload, key) = bus.sample_with_key(topics::GLOBAL_POSITION_LOCAL).unwrap().unwrap();
            let (want_key, want_value) = best.unwrap();
            prop_assert_eq!(key, want_key);
            prop_assert_eq!(payload, &odo(want_value));
        }
    }
}
