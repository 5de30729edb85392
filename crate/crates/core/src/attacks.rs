//! Attack injector nodes: counterfeit LaserScan / odometry / NavSatFix
//! payload builders for the five scenario kinds, published at up to the base
//! rate (100x the genuine sensors) with attacker writer class.
//!
//! Spoof values come from the scenario file rather than an interactive
//! prompt, and jam payload streams are a pure function of `(seed, tick)`, so
//! every attack replays identically. The GPS propagation rule is kept
//! verbatim from the attack script it models: odometry x takes the longitude
//! and y the latitude, degrees landing in meter fields and all.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bus::{topics, Bus, Payload, WriterId, BASE_RATE_HZ};
use crate::sensors::{LaserScan, LidarConfig, NavSatFixMsg, OdometryMsg};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttackError {
    #[error("{field}: {value} outside sensor range [{min}, {max}]")]
    OutOfSensorRange {
        field: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("invalid bounds: min {min} > max {max}")]
    InvalidBounds { min: f64, max: f64 },
    #[error("front distance {d_front} must lie below the outside value {v_out}")]
    FrontNotBelowOutside { d_front: f64, v_out: f64 },
}

/// How spoofed GPS coordinates are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GpsSpoofParams {
    /// Publish these values directly.
    Fixed { latitude: f64, longitude: f64 },
    /// Genuine position at attack start plus this offset, held constant.
    Displaced { dx: f64, dy: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttackKind {
    LidarUniform { distance: f64 },
    LidarJam { min: f64, max: f64 },
    LidarFrontObject { d_front: f64, v_out: f64 },
    GpsFixedSpoof(GpsSpoofParams),
    GpsJam { lat: (f64, f64), lon: (f64, f64) },
}

impl AttackKind {
    /// Topics this attack floods.
    pub fn targets(&self) -> &'static [&'static str] {
        match self {
            AttackKind::LidarUniform { .. }
            | AttackKind::LidarJam { .. }
            | AttackKind::LidarFrontObject { .. } => &[topics::LASER_SCAN],
            AttackKind::GpsFixedSpoof(_) | AttackKind::GpsJam { .. } => &[
                topics::GLOBAL_POSITION_GLOBAL,
                topics::GLOBAL_POSITION_LOCAL,
            ],
        }
    }

    pub fn is_gps(&self) -> bool {
        matches!(
            self,
            AttackKind::GpsFixedSpoof(_) | AttackKind::GpsJam { .. }
        )
    }
}

/// When the injector starts publishing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartTrigger {
    /// At this absolute tick.
    Tick(u64),
    /// As soon as the vehicle reaches the Flying mode.
    ModeFlying,
    /// One tick after the mission commands its first waypoint.
    AfterFirstWaypointCommand,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub start: StartTrigger,
    pub end_tick: u64,
    pub rate_hz: f64,
    pub seed: u64,
}

/// All 1024 ranges set to one spoofed distance.
pub fn build_uniform_scan(distance: f64, lidar: &LidarConfig) -> Result<LaserScan, AttackError> {
    if distance < lidar.range_min || distance > lidar.range_max {
        return Err(AttackError::OutOfSensorRange {
            field: "distance",
            value: distance,
            min: lidar.range_min,
            max: lidar.range_max,
        });
    }
    Ok(LaserScan::uniform(distance, lidar))
}

/// 1024 independent uniform draws in `[min, max]` from the given stream.
pub fn build_noise_scan(
    min: f64,
    max: f64,
    lidar: &LidarConfig,
    rng: &mut impl Rng,
) -> Result<LaserScan, AttackError> {
    if min > max {
        return Err(AttackError::InvalidBounds { min, max });
    }
    if min < lidar.range_min || max > lidar.range_max {
        return Err(AttackError::OutOfSensorRange {
            field: "bounds",
            value: if min < lidar.range_min { min } else { max },
            min: lidar.range_min,
            max: lidar.range_max,
        });
    }
    let mut scan = LaserScan::uniform(min, lidar);
    for r in scan.ranges.iter_mut() {
        *r = rng.gen_range(min..=max);
    }
    Ok(scan)
}

/// Non-existent front-facing object: the two frontmost rays (255 and 256,
/// the boundary of the second and third eighth of the sweep) carry `d_front`,
/// with linear gradation out to `v_out` at the far edges of those eighths
/// (indices 128 and 383); everything else reads `v_out`.
pub fn build_front_object_scan(
    d_front: f64,
    v_out: f64,
    lidar: &LidarConfig,
) -> Result<LaserScan, AttackError> {
    if d_front >= v_out {
        return Err(AttackError::FrontNotBelowOutside { d_front, v_out });
    }
    if d_front < lidar.range_min {
        return Err(AttackError::OutOfSensorRange {
            field: "d_front",
            value: d_front,
            min: lidar.range_min,
            max: lidar.range_max,
        });
    }
    if v_out > lidar.range_max {
        return Err(AttackError::OutOfSensorRange {
            field: "v_out",
            value: v_out,
            min: lidar.range_min,
            max: lidar.range_max,
        });
    }
    let mut scan = LaserScan::uniform(v_out, lidar);
    // Mirror the descending half onto the ascending one so the pattern is
    // exactly symmetric under i -> 511 - i.
    for i in 128..=255 {
        let v = v_out + (d_front - v_out) * (i - 128) as f64 / 127.0;
        scan.ranges[i] = v;
        scan.ranges[511 - i] = v;
    }
    scan.ranges[128] = v_out;
    scan.ranges[383] = v_out;
    scan.ranges[255] = d_front;
    scan.ranges[256] = d_front;
    Ok(scan)
}

/// Counterfeit GPS pair: the fix carries the chosen coordinates and the
/// odometry receives them through the verbatim propagation rule
/// (x = longitude, y = latitude); altitude and heading are whatever genuine
/// values were last seen.
pub fn build_gps_spoof(
    latitude: f64,
    longitude: f64,
    genuine_z: f64,
    genuine_heading: f64,
) -> (NavSatFixMsg, OdometryMsg) {
    let fix = NavSatFixMsg {
        latitude,
        longitude,
    };
    let odo = OdometryMsg {
        position: nalgebra::Vector3::new(fix.longitude, fix.latitude, genuine_z),
        heading: genuine_heading,
    };
    (fix, odo)
}

/// Jammed GPS pair: lat/lon drawn uniformly per publication, then propagated
/// like the fixed spoof.
pub fn build_gps_jam(
    lat: (f64, f64),
    lon: (f64, f64),
    genuine_z: f64,
    genuine_heading: f64,
    rng: &mut impl Rng,
) -> Result<(NavSatFixMsg, OdometryMsg), AttackError> {
    for (min, max) in [lat, lon] {
        if min > max {
            return Err(AttackError::InvalidBounds { min, max });
        }
    }
    let latitude = rng.gen_range(lat.0..=lat.1);
    let longitude = rng.gen_range(lon.0..=lon.1);
    Ok(build_gps_spoof(
        latitude,
        longitude,
        genuine_z,
        genuine_heading,
    ))
}

/// Per-tick RNG stream: reseeding by `(seed, tick)` keeps each payload a pure
/// function of those two values.
pub fn jam_stream(seed: u64, tick: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tick);
    rng
}

/// What the attack script can observe: trigger cues plus the genuine sensor
/// output it mimics (the script subscribes alongside the victim).
#[derive(Debug, Clone, Copy, Default)]
pub struct AttackObservables {
    pub vehicle_flying: bool,
    pub first_waypoint_command_tick: Option<u64>,
    /// Most recent genuine odometry, regardless of who owns the mailbox.
    pub genuine_odometry: Option<OdometryMsg>,
}

/// Injector node state.
#[derive(Debug, Clone)]
pub struct AttackerNode {
    pub spec: AttackSpec,
    writer: WriterId,
    lidar: LidarConfig,
    pub armed_at: Option<u64>,
    /// Resolved (latitude, longitude) for the displaced spoof.
    resolved_fix: Option<(f64, f64)>,
}

impl AttackerNode {
    pub fn new(spec: AttackSpec, lidar: LidarConfig, writer: WriterId) -> Self {
        Self {
            spec,
            writer,
            lidar,
            armed_at: None,
            resolved_fix: None,
        }
    }

    /// Effective publication period in ticks, capped at the base rate.
    fn period(&self) -> u64 {
        ((BASE_RATE_HZ / self.spec.rate_hz).round() as u64).max(1)
    }

    pub fn active_at(&self, tick: u64) -> bool {
        self.armed_at
            .is_some_and(|armed| tick >= armed && tick <= self.spec.end_tick)
    }

    fn arm(&mut self, tick: u64, obs: &AttackObservables) {
        self.armed_at = Some(tick);
        if let AttackKind::GpsFixedSpoof(GpsSpoofParams::Displaced { dx, dy }) = self.spec.kind {
            let (x0, y0) = obs
                .genuine_odometry
                .map_or((0.0, 0.0), |o| (o.position.x, o.position.y));
            // Propagation rule inverted: longitude carries x, latitude y.
            self.resolved_fix = Some((y0 + dy, x0 + dx));
        }
    }

    /// Returns true iff a counterfeit payload was published this tick.
    pub fn on_activation(&mut self, bus: &mut Bus, tick: u64, obs: AttackObservables) -> bool {
        if self.armed_at.is_none() {
            let due = match self.spec.start {
                StartTrigger::Tick(t) => tick >= t,
                StartTrigger::ModeFlying => obs.vehicle_flying,
                StartTrigger::AfterFirstWaypointCommand => {
                    obs.first_waypoint_command_tick.is_some_and(|t| tick > t)
                }
            };
            if due {
                self.arm(tick, &obs);
            }
        }
        let Some(armed) = self.armed_at else {
            return false;
        };
        if tick < armed
            || tick > self.spec.end_tick
            || !(tick - armed).is_multiple_of(self.period())
        {
            return false;
        }

        let (z, heading) = obs
            .genuine_odometry
            .map_or((0.0, 0.0), |o| (o.position.z, o.heading));
        match &self.spec.kind {
            AttackKind::LidarUniform { distance } => {
                let scan =
                    build_uniform_scan(*distance, &self.lidar).expect("validated at scenario load");
                self.publish(bus, tick, topics::LASER_SCAN, Payload::Scan(scan));
            }
            AttackKind::LidarJam { min, max } => {
                let mut rng = jam_stream(self.spec.seed, tick);
                let scan = build_noise_scan(*min, *max, &self.lidar, &mut rng)
                    .expect("validated at scenario load");
                self.publish(bus, tick, topics::LASER_SCAN, Payload::Scan(scan));
            }
            AttackKind::LidarFrontObject { d_front, v_out } => {
                let scan = build_front_object_scan(*d_front, *v_out, &self.lidar)
                    .expect("validated at scenario load");
                self.publish(bus, tick, topics::LASER_SCAN, Payload::Scan(scan));
            }
            AttackKind::GpsFixedSpoof(params) => {
                let (latitude, longitude) = match (params, self.resolved_fix) {
                    (
                        GpsSpoofParams::Fixed {
                            latitude,
                            longitude,
                        },
                        _,
                    ) => (*latitude, *longitude),
                    (GpsSpoofParams::Displaced { .. }, Some(fix)) => fix,
                    (GpsSpoofParams::Displaced { dx, dy }, None) => (*dy, *dx),
                };
                let (fix, odo) = build_gps_spoof(latitude, longitude, z, heading);
                self.publish(
                    bus,
                    tick,
                    topics::GLOBAL_POSITION_GLOBAL,
                    Payload::NavSatFix(fix),
                );
                self.publish(
                    bus,
                    tick,
                    topics::GLOBAL_POSITION_LOCAL,
                    Payload::Odometry(odo),
                );
            }
            AttackKind::GpsJam { lat, lon } => {
                let mut rng = jam_stream(self.spec.seed, tick);
                let (fix, odo) = build_gps_jam(*lat, *lon, z, heading, &mut rng)
                    .expect("validated at scenario load");
                self.publish(
                    bus,
                    tick,
                    topics::GLOBAL_POSITION_GLOBAL,
                    Payload::NavSatFix(fix),
                );
                self.publish(
                    bus,
                    tick,
                    topics::GLOBAL_POSITION_LOCAL,
                    Payload::Odometry(odo),
                );
            }
        }
        true
    }

    fn publish(&self, bus: &mut Bus, tick: u64, topic: &str, payload: Payload) {
        bus.publish(self.writer, tick, topic, payload)
            .expect("target topics declared");
    }
}
