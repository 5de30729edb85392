//! Artificial-potential-field obstacle avoidance.
//!
//! Subscribed to the laser topic; whenever any sampled range falls inside the
//! activation tolerance it overrides the mission setpoint with a one-step
//! carrot along the combined force direction. The attractive potential is the
//! classic quadratic pull toward a goal, the repulsive one the inverse-square
//! barrier with a hard cutoff at `d0`. The node wires the goal to the
//! vehicle's own sampled position, matching the guidance-library avoidance
//! this models (its override is built purely from the scan), so the
//! attractive term vanishes in flight and only explicit goals exercise it.

use nalgebra::{Vector2, Vector3};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::bus::{topics, Bus, Payload, WriterId};
use crate::sensors::{ray_direction, LaserScan};
use crate::world::PoseSetpoint;

/// Combined forces below this magnitude count as a degenerate equilibrium:
/// the node holds position instead of normalizing numerical dust.
pub const FORCE_EPSILON: f64 = 1e-9;

/// Planner gains and distances, configurable per scenario.
#[derive(Debug, Clone, Copy)]
pub struct PotentialFieldConfig {
    pub k_att: f64,
    pub k_rep: f64,
    /// Repulsive cutoff distance, m.
    pub d0: f64,
    /// Scan ranges below this trigger an override, m.
    pub activation_tolerance: f64,
    /// Carrot step length, m.
    pub step_length: f64,
}

impl Default for PotentialFieldConfig {
    fn default() -> Self {
        Self {
            k_att: 1.0,
            k_rep: 1.0,
            d0: 3.0,
            activation_tolerance: 3.0,
            step_length: 1.0,
        }
    }
}

/// Gradient of the quadratic attractive potential: `-k (current - goal)`.
pub fn compute_attractive(current: Vector2<f64>, goal: Vector2<f64>, k_att: f64) -> Vector2<f64> {
    -k_att * (current - goal)
}

fn repulsive_term(
    range: f64,
    heading: f64,
    mount_offset: f64,
    index: usize,
    k_rep: f64,
    d0: f64,
    range_min: f64,
) -> Vector2<f64> {
    if range >= d0 {
        return Vector2::zeros();
    }
    let d = range.max(range_min);
    let magnitude = k_rep * (1.0 / d - 1.0 / d0) / (d * d);
    -magnitude * ray_direction(heading, mount_offset, index)
}

/// Sum of per-ray repulsive contributions, sequential path.
///
/// Each ray closer than `d0` pushes away along the opposite of its world
/// direction with magnitude `k (1/d - 1/d0) / d^2`; ranges at or beyond `d0`
/// contribute exactly zero, and ranges below the sensor minimum are clamped
/// to it.
pub fn compute_repulsive_seq(
    scan: &LaserScan,
    heading: f64,
    mount_offset: f64,
    k_rep: f64,
    d0: f64,
) -> Vector2<f64> {
    scan.ranges
        .iter()
        .enumerate()
        .map(|(i, &r)| repulsive_term(r, heading, mount_offset, i, k_rep, d0, scan.range_min))
        .fold(Vector2::zeros(), |acc, t| acc + t)
}

/// Rayon path: terms are computed in parallel but reduced in index order, so
/// the sum is bit-identical to the sequential one.
#[cfg(feature = "parallel")]
pub fn compute_repulsive_par(
    scan: &LaserScan,
    heading: f64,
    mount_offset: f64,
    k_rep: f64,
    d0: f64,
) -> Vector2<f64> {
    let terms: Vec<Vector2<f64>> = scan
        .ranges
        .par_iter()
        .enumerate()
        .map(|(i, &r)| repulsive_term(r, heading, mount_offset, i, k_rep, d0, scan.range_min))
        .collect();
    terms.into_iter().fold(Vector2::zeros(), |acc, t| acc + t)
}

pub fn compute_repulsive(
    scan: &LaserScan,
    heading: f64,
    mount_offset: f64,
    k_rep: f64,
    d0: f64,
) -> Vector2<f64> {
    #[cfg(feature = "parallel")]
    {
        compute_repulsive_par(scan, heading, mount_offset, k_rep, d0)
    }
    #[cfg(not(feature = "parallel"))]
    {
        compute_repulsive_seq(scan, heading, mount_offset, k_rep, d0)
    }
}

/// What one avoidance cycle decided.
#[derive(Debug, Clone, PartialEq)]
pub enum AvoidanceDecision {
    /// Scan clear: the mission setpoint stands.
    PassThrough,
    /// Trigger distance violated: override with this setpoint.
    Override(PoseSetpoint),
}

/// One planner cycle. Altitude and heading of the override are held at
/// `altitude_hold` / `psi_hold`; a combined force below [`FORCE_EPSILON`]
/// keeps the carrot on the current position (degenerate equilibrium).
#[allow(clippy::too_many_arguments)]
pub fn avoidance_step(
    scan: &LaserScan,
    position: Vector2<f64>,
    heading: f64,
    goal: Vector2<f64>,
    altitude_hold: f64,
    psi_hold: f64,
    mount_offset: f64,
    cfg: &PotentialFieldConfig,
) -> AvoidanceDecision {
    if scan.min_range() >= cfg.activation_tolerance {
        return AvoidanceDecision::PassThrough;
    }
    let force = compute_attractive(position, goal, cfg.k_att)
        + compute_repulsive(scan, heading, mount_offset, cfg.k_rep, cfg.d0);
    let norm = force.norm();
    let target_xy = if norm < FORCE_EPSILON {
        position
    } else {
        position + force * (cfg.step_length / norm)
    };
    AvoidanceDecision::Override(PoseSetpoint {
        target: Vector3::new(target_xy.x, target_xy.y, altitude_hold),
        psi: psi_hold,
    })
}

/// Bus node wrapper. Remembers the latest guidance-authored setpoint so it
/// can put the mission target back on the channel once the trigger clears.
#[derive(Debug, Clone)]
pub struct AvoidanceNode {
    pub config: PotentialFieldConfig,
    pub mount_offset: f64,
    writer: WriterId,
    cached_mission: Option<PoseSetpoint>,
}

impl AvoidanceNode {
    pub fn new(config: PotentialFieldConfig, mount_offset: f64, writer: WriterId) -> Self {
        Self {
            config,
            mount_offset,
            writer,
            cached_mission: None,
        }
    }

    /// Returns true iff this cycle overrode the setpoint channel.
    pub fn on_activation(&mut self, bus: &mut Bus, tick: u64) -> bool {
        // Track the mission's setpoint: anything on the channel not written
        // by this node.
        let mut channel_is_ours = false;
        if let Ok(Some((Payload::Setpoint(sp), key))) = bus.sample_with_key(topics::SETPOINT_LOCAL)
        {
            if key.order == self.writer.order {
                channel_is_ours = true;
            } else {
                self.cached_mission = Some(*sp);
            }
        }

        let scan = match bus.sample_latest(topics::LASER_SCAN) {
            Ok(Some(Payload::Scan(scan))) => scan.clone(),
            _ => return false,
        };
        let odo = match bus.sample_latest(topics::GLOBAL_POSITION_LOCAL) {
            Ok(Some(Payload::Odometry(odo))) => *odo,
            _ => return false,
        };

        let altitude_hold = self.cached_mission.map_or(odo.position.z, |sp| sp.target.z);
        let decision = avoidance_step(
            &scan,
            odo.position.xy(),
            odo.heading,
            odo.position.xy(),
            altitude_hold,
            odo.heading,
            self.mount_offset,
            &self.config,
        );
        match decision {
            AvoidanceDecision::Override(sp) => {
                bus.publish(
                    self.writer,
                    tick,
                    topics::SETPOINT_LOCAL,
                    Payload::Setpoint(sp),
                )
                .expect("setpoint topic declared");
                true
            }
            AvoidanceDecision::PassThrough => {
                if channel_is_ours {
                    if let Some(mission_sp) = self.cached_mission {
                        bus.publish(
                            self.writer,
                            tick,
                            topics::SETPOINT_LOCAL,
                            Payload::Setpoint(mission_sp),
                        )
                        .expect("setpoint topic declared");
                    }
                }
                false
            }
        }
    }
}
