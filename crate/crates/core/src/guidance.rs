//! Waypoint guidance layer: local-frame initialization, the destination
//! coordinate transform, reach checking, and the mission state machine.
//!
//! Guidance reads position exclusively from the odometry topic, which is what
//! makes it spoofable: the physics keeps tracking setpoints from ground
//! truth while every decision here is based on whatever the mailbox holds.
//! The only ground-truth input is the anchor position captured at the
//! instant a destination is commanded, mirroring a target built from "the
//! current position of the model" on the autopilot side.

use nalgebra::Vector3;

use crate::bus::{topics, Bus, Payload, WriterId};
use crate::sensors::OdometryMsg;
use crate::world::PoseSetpoint;

/// Altitude below which the mission considers a landing finished, m.
const GROUND_EPSILON: f64 = 0.05;

/// Local reference frame established once before takeoff by averaging
/// odometry samples. Correction terms stay zero in every in-scope scenario.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    /// Frame heading offset, degrees.
    pub local_offset_deg: f64,
    pub local_offset_pose: Vector3<f64>,
    pub correction_heading_deg: f64,
    pub correction_vector: Vector3<f64>,
}

/// Mission waypoint in the local frame, heading in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub psi_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissionPhase {
    WaitingStart,
    InitializingFrame,
    TakingOff,
    EnRoute,
    Hovering,
    Landing,
    Done,
}

impl MissionPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            MissionPhase::WaitingStart => "WaitingStart",
            MissionPhase::InitializingFrame => "InitializingFrame",
            MissionPhase::TakingOff => "TakingOff",
            MissionPhase::EnRoute => "EnRoute",
            MissionPhase::Hovering => "Hovering",
            MissionPhase::Landing => "Landing",
            MissionPhase::Done => "Done",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbortReason {
    OdometryUnavailable,
    VehicleCrashed,
}

/// Observable things the mission did during one activation.
#[derive(Debug, Clone, PartialEq)]
pub enum MissionEvent {
    Started,
    FrameInitialized,
    TakeoffCommanded { altitude: f64 },
    WaypointCommanded { index: usize },
    WaypointReached { index: usize },
    LandCommanded,
    Done,
    Aborted(AbortReason),
}

/// Rotate mission coordinates into the local frame.
///
/// `heading = (correction_heading + local_offset - 90) * pi/180`; the -90 is
/// kept verbatim from the guidance formula this models.
pub fn rotate_to_local(frame: &LocalFrame, x: f64, y: f64) -> (f64, f64) {
    let heading = (frame.correction_heading_deg + frame.local_offset_deg - 90.0).to_radians();
    (
        x * heading.cos() - y * heading.sin(),
        x * heading.sin() + y * heading.cos(),
    )
}

/// Build the setpoint for a waypoint: the rotated target minus the sampled
/// local pose, added onto the true anchor position. With genuine odometry the
/// sampled pose equals the anchor and the setpoint is the rotated waypoint
/// itself; with spoofed odometry the difference drags the target elsewhere.
pub fn set_destination(
    wp: &Waypoint,
    frame: &LocalFrame,
    sampled_pose: Vector3<f64>,
    true_anchor: Vector3<f64>,
) -> PoseSetpoint {
    let (x_local, y_local) = rotate_to_local(frame, wp.x, wp.y);
    let local = Vector3::new(
        x_local + frame.correction_vector.x,
        y_local + frame.correction_vector.y,
        wp.z + frame.correction_vector.z,
    );
    let target = true_anchor + (local - sampled_pose);
    let psi =
        (wp.psi_deg + frame.correction_heading_deg + frame.local_offset_deg - 90.0).to_radians();
    PoseSetpoint { target, psi }
}

/// Chord distance between two headings given in degrees:
/// `sqrt((cos c - cos d)^2 + (sin c - sin d)^2)`.
pub fn heading_chord_error(current_deg: f64, desired_deg: f64) -> f64 {
    let c = current_deg.to_radians();
    let d = desired_deg.to_radians();
    let cos_err = c.cos() - d.cos();
    let sin_err = c.sin() - d.sin();
    (cos_err * cos_err + sin_err * sin_err).sqrt()
}

/// World heading back into mission-frame degrees (inverse of the psi part of
/// `set_destination`).
pub fn mission_heading_deg(frame: &LocalFrame, world_heading: f64) -> f64 {
    world_heading.to_degrees() - frame.correction_heading_deg - frame.local_offset_deg + 90.0
}

/// True iff the sampled odometry is within tolerance of the commanded
/// setpoint, in both position (Euclidean) and heading (chord error).
pub fn check_waypoint_reached(
    commanded: &PoseSetpoint,
    desired_psi_deg: f64,
    sampled: &OdometryMsg,
    frame: &LocalFrame,
    pos_tolerance: f64,
    heading_tolerance: f64,
) -> bool {
    let delta = commanded.target - sampled.position;
    let d_mag = delta.norm();
    let current_deg = mission_heading_deg(frame, sampled.heading);
    let heading_err = heading_chord_error(current_deg, desired_psi_deg);
    d_mag < pos_tolerance && heading_err < heading_tolerance
}

/// Mission tunables, validated at scenario load.
#[derive(Debug, Clone)]
pub struct MissionParams {
    pub takeoff_altitude: f64,
    pub pos_tolerance: f64,
    pub heading_tolerance: f64,
    pub frame_init_samples: usize,
    pub start_tick: u64,
}

impl Default for MissionParams {
    fn default() -> Self {
        Self {
            takeoff_altitude: 3.0,
            pos_tolerance: 0.3,
            heading_tolerance: 0.01,
            frame_init_samples: 100,
            start_tick: 0,
        }
    }
}

/// The currently commanded target the mission polls against.
#[derive(Debug, Clone)]
pub struct ActiveTarget {
    pub setpoint: PoseSetpoint,
    pub desired_psi_deg: f64,
    pub waypoint_index: Option<usize>,
}

/// Ground-truth inputs the simulation hands to one mission activation.
#[derive(Debug, Clone, Copy)]
pub struct AnchorPose {
    pub position: Vector3<f64>,
    pub heading: f64,
}

/// Mission state machine, activated at the mission rate as a bus node.
/// One activation performs one step.
#[derive(Debug, Clone)]
pub struct MissionNode {
    pub params: MissionParams,
    pub waypoints: Vec<Waypoint>,
    pub phase: MissionPhase,
    pub current_index: usize,
    pub frame: Option<LocalFrame>,
    pub active: Option<ActiveTarget>,
    pub aborted: Option<AbortReason>,
    writer: WriterId,
    sample_count: usize,
    heading_sum_deg: f64,
    position_sum: Vector3<f64>,
}

impl MissionNode {
    pub fn new(params: MissionParams, waypoints: Vec<Waypoint>, writer: WriterId) -> Self {
        Self {
            params,
            waypoints,
            phase: MissionPhase::WaitingStart,
            current_index: 0,
            frame: None,
            active: None,
            aborted: None,
            writer,
            sample_count: 0,
            heading_sum_deg: 0.0,
            position_sum: Vector3::zeros(),
        }
    }

    /// The simulation flags the vehicle as physically parked on the active
    /// setpoint while the reach check keeps failing.
    pub fn note_hovering(&mut self) {
        if self.phase == MissionPhase::EnRoute {
            self.phase = MissionPhase::Hovering;
        }
    }

    pub fn abort_crashed(&mut self) {
        if self.aborted.is_none() {
            self.aborted = Some(AbortReason::VehicleCrashed);
        }
    }

    fn sample_odometry(&self, bus: &Bus) -> Option<OdometryMsg> {
        match bus.sample_latest(topics::GLOBAL_POSITION_LOCAL) {
            Ok(Some(Payload::Odometry(odo))) => Some(*odo),
            _ => None,
        }
    }

    pub fn on_activation(
        &mut self,
        bus: &mut Bus,
        tick: u64,
        anchor: AnchorPose,
    ) -> Vec<MissionEvent> {
        let mut events = Vec::new();
        if self.aborted.is_some() {
            return events;
        }
        match self.phase {
            MissionPhase::WaitingStart => {
                if tick >= self.params.start_tick {
                    self.phase = MissionPhase::InitializingFrame;
                    events.push(MissionEvent::Started);
                }
            }
            MissionPhase::InitializingFrame => {
                let Some(odo) = self.sample_odometry(bus) else {
                    self.aborted = Some(AbortReason::OdometryUnavailable);
                    events.push(MissionEvent::Aborted(AbortReason::OdometryUnavailable));
                    return events;
                };
                self.sample_count += 1;
                self.heading_sum_deg += odo.heading.to_degrees();
                self.position_sum += odo.position;
                if self.sample_count >= self.params.frame_init_samples {
                    let n = self.sample_count as f64;
                    self.frame = Some(LocalFrame {
                        local_offset_deg: self.heading_sum_deg / n,
                        local_offset_pose: self.position_sum / n,
                        correction_heading_deg: 0.0,
                        correction_vector: Vector3::zeros(),
                    });
                    events.push(MissionEvent::FrameInitialized);

                    let alt = self.params.takeoff_altitude;
                    let setpoint = PoseSetpoint {
                        target: Vector3::new(anchor.position.x, anchor.position.y, alt),
                        psi: anchor.heading,
                    };
                    self.publish_setpoint(bus, tick, setpoint, None);
                    self.phase = MissionPhase::TakingOff;
                    events.push(MissionEvent::TakeoffCommanded { altitude: alt });
                }
            }
            MissionPhase::TakingOff => {
                if let Some(odo) = self.sample_odometry(bus) {
                    if (odo.position.z - self.params.takeoff_altitude).abs() < 0.1 {
                        self.command_next(bus, tick, &odo, anchor, &mut events);
                    }
                }
            }
            MissionPhase::EnRoute | MissionPhase::Hovering => {
                if let (Some(odo), Some(active), Some(frame)) = (
                    self.sample_odometry(bus),
                    self.active.clone(),
                    self.frame.clone(),
                ) {
                    if check_waypoint_reached(
                        &active.setpoint,
                        active.desired_psi_deg,
                        &odo,
                        &frame,
                        self.params.pos_tolerance,
                        self.params.heading_tolerance,
                    ) {
                        if let Some(index) = active.waypoint_index {
                            events.push(MissionEvent::WaypointReached { index });
                            self.current_index = index + 1;
                        }
                        self.command_next(bus, tick, &odo, anchor, &mut events);
                    }
                }
            }
            MissionPhase::Landing => {
                if let Some(odo) = self.sample_odometry(bus) {
                    if odo.position.z < GROUND_EPSILON {
                        self.phase = MissionPhase::Done;
                        events.push(MissionEvent::Done);
                    }
                }
            }
            MissionPhase::Done => {}
        }
        events
    }

    /// Command the next waypoint, or land after the last one.
    fn command_next(
        &mut self,
        bus: &mut Bus,
        tick: u64,
        odo: &OdometryMsg,
        anchor: AnchorPose,
        events: &mut Vec<MissionEvent>,
    ) {
        if self.current_index < self.waypoints.len() {
            let index = self.current_index;
            let wp = self.waypoints[index];
            let frame = self
                .frame
                .as_ref()
                .expect("frame initialized before commands");
            let setpoint = set_destination(&wp, frame, odo.position, anchor.position);
            self.publish_setpoint(bus, tick, setpoint, Some((index, wp.psi_deg)));
            self.phase = MissionPhase::EnRoute;
            events.push(MissionEvent::WaypointCommanded { index });
        } else {
            let setpoint = PoseSetpoint {
                target: Vector3::new(anchor.position.x, anchor.position.y, 0.0),
                psi: anchor.heading,
            };
            self.publish_setpoint(bus, tick, setpoint, None);
            self.phase = MissionPhase::Landing;
            events.push(MissionEvent::LandCommanded);
        }
    }

    fn publish_setpoint(
        &mut self,
        bus: &mut Bus,
        tick: u64,
        setpoint: PoseSetpoint,
        waypoint: Option<(usize, f64)>,
    ) {
        bus.publish(
            self.writer,
            tick,
            topics::SETPOINT_LOCAL,
            Payload::Setpoint(setpoint),
        )
        .expect("setpoint topic declared");
        self.active = Some(ActiveTarget {
            setpoint,
            desired_psi_deg: waypoint.map_or(
                self.frame
                    .as_ref()
                    .map_or(0.0, |f| mission_heading_deg(f, setpoint.psi)),
                |(_, psi)| psi,
            ),
            waypoint_index: waypoint.map(|(i, _)| i),
        });
    }
}
