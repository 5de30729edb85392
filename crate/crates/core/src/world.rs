//! Ground-truth world and quadcopter state: planar disc obstacles, a
//! first-order setpoint tracker standing in for the autopilot's position
//! control, the flight-mode machine, and collision checking.
//!
//! The tracker consumes ground truth only. Bus topics never feed back into
//! the physics; that separation is what lets spoofed odometry mislead the
//! guidance layer while the vehicle itself keeps flying accurately.

use nalgebra::Vector3;
use thiserror::Error;

/// Planar disc obstacle, modelled as an infinite vertical cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub center: [f64; 2],
    pub radius: f64,
}

/// Static world contents. Obstacles may overlap.
#[derive(Debug, Clone, Default)]
pub struct World {
    pub obstacles: Vec<Obstacle>,
}

/// Flight mode of the vehicle. `Crashed` and `Landed` are absorbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlightMode {
    Idle,
    Guided,
    TakingOff,
    Flying,
    Landing,
    Landed,
    Crashed,
}

impl FlightMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FlightMode::Idle => "Idle",
            FlightMode::Guided => "Guided",
            FlightMode::TakingOff => "TakingOff",
            FlightMode::Flying => "Flying",
            FlightMode::Landing => "Landing",
            FlightMode::Landed => "Landed",
            FlightMode::Crashed => "Crashed",
        }
    }

    fn is_absorbing(self) -> bool {
        matches!(self, FlightMode::Crashed | FlightMode::Landed)
    }
}

/// Position setpoint published on the setpoint topic and tracked by the
/// vehicle: a target point in the local (world) frame plus a desired heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSetpoint {
    pub target: Vector3<f64>,
    pub psi: f64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("illegal mode transition {from:?} -> {to:?}")]
pub struct ModeViolation {
    pub from: FlightMode,
    pub to: FlightMode,
}

/// Tracker and airframe constants, configurable per scenario.
#[derive(Debug, Clone, Copy)]
pub struct VehicleLimits {
    /// Maximum horizontal/vertical speed, m/s.
    pub v_max: f64,
    /// Maximum heading slew rate, rad/s.
    pub omega_max: f64,
    /// Collision radius of the airframe, m.
    pub radius: f64,
    /// Takeoff considered complete when |z - alt| falls below this, m.
    pub takeoff_tolerance: f64,
}

impl Default for VehicleLimits {
    fn default() -> Self {
        Self {
            v_max: 2.0,
            omega_max: std::f64::consts::PI,
            radius: 0.3,
            takeoff_tolerance: 0.1,
        }
    }
}

/// True vehicle state, integrated by the physics step each tick.
#[derive(Debug, Clone)]
pub struct VehicleState {
    pub position: Vector3<f64>,
    pub heading: f64,
    pub velocity: Vector3<f64>,
    pub mode: FlightMode,
}

impl VehicleState {
    pub fn new(position: Vector3<f64>, heading: f64) -> Self {
        Self {
            position,
            heading,
            velocity: Vector3::zeros(),
            mode: FlightMode::Idle,
        }
    }

    /// Request a mode transition. Absorbing modes swallow every command;
    /// anything outside the mode machine is rejected.
    pub fn set_mode(&mut self, to: FlightMode) -> Result<(), ModeViolation> {
        if self.mode.is_absorbing() {
            return Ok(());
        }
        let legal = matches!(
            (self.mode, to),
            (FlightMode::Idle, FlightMode::Guided)
                | (FlightMode::Guided, FlightMode::TakingOff)
                | (FlightMode::TakingOff, FlightMode::Flying)
                | (FlightMode::Flying, FlightMode::Landing)
                | (FlightMode::Landing, FlightMode::Landed)
                | (_, FlightMode::Crashed)
        );
        if legal {
            self.mode = to;
            Ok(())
        } else {
            Err(ModeViolation {
                from: self.mode,
                to,
            })
        }
    }

    /// Latch the crashed state: position freezes, all later setpoints are
    /// ignored because `step_dynamics` only runs in airborne modes.
    pub fn crash(&mut self) {
        if self.mode != FlightMode::Crashed {
            self.mode = FlightMode::Crashed;
            self.velocity = Vector3::zeros();
        }
    }

    pub fn airborne(&self) -> bool {
        matches!(
            self.mode,
            FlightMode::TakingOff | FlightMode::Flying | FlightMode::Landing
        )
    }
}

/// Advance the vehicle one tick toward `setpoint`.
///
/// Moves at `min(v_max, distance / dt)` so the target is hit exactly once it
/// is within one step, slews heading by at most `omega_max * dt` along the
/// shorter direction, clamps altitude at the ground, and performs the
/// automatic TakingOff -> Flying and Landing -> Landed transitions.
pub fn step_dynamics(
    state: &mut VehicleState,
    setpoint: &PoseSetpoint,
    dt: f64,
    limits: &VehicleLimits,
) {
    if !state.airborne() {
        return;
    }

    let delta = setpoint.target - state.position;
    let dist = delta.norm();
    let max_step = limits.v_max * dt;
    if dist <= max_step {
        state.position = setpoint.target;
        state.velocity = Vector3::zeros();
    } else {
        let step = delta * (max_step / dist);
        state.position += step;
        state.velocity = step / dt;
    }

    let err = wrap_angle(setpoint.psi - state.heading);
    let max_turn = limits.omega_max * dt;
    state.heading = wrap_angle(state.heading + err.clamp(-max_turn, max_turn));

    if state.position.z < 0.0 {
        state.position.z = 0.0;
    }
    match state.mode {
        FlightMode::TakingOff
            if (state.position.z - setpoint.target.z).abs() < limits.takeoff_tolerance =>
        {
            state.mode = FlightMode::Flying;
        }
        FlightMode::Landing if state.position.z <= 0.0 => {
            state.mode = FlightMode::Landed;
            state.velocity = Vector3::zeros();
        }
        _ => {}
    }
}

/// True iff the vehicle disc overlaps any obstacle cylinder. Obstacles extend
/// over all altitudes, so only the horizontal distance matters.
pub fn check_collision(state: &VehicleState, world: &World, vehicle_radius: f64) -> bool {
    world.obstacles.iter().any(|obs| {
        let dx = state.position.x - obs.center[0];
        let dy = state.position.y - obs.center[1];
        (dx * dx + dy * dy).sqrt() < obs.radius + vehicle_radius
    })
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut a = a % two_pi;
    if a > std::f64::consts::PI {
        a -= two_pi;
    } else if a <= -std::f64::consts::PI {
        a += two_pi;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn limits() -> VehicleLimits {
        VehicleLimits {
            v_max: 1.0,
            ..VehicleLimits::default()
        }
    }

    fn flying_at(pos: [f64; 3]) -> VehicleState {
        let mut s = VehicleState::new(Vector3::new(pos[0], pos[1], pos[2]), 0.0);
        s.mode = FlightMode::Flying;
        s
    }

    #[test]
    fn state_at_setpoint_is_fixed_point() {
        let mut s = flying_at([2.0, -1.0, 3.0]);
        let sp = PoseSetpoint {
            target: s.position,
            psi: 0.0,
        };
        step_dynamics(&mut s, &sp, 0.001, &limits());
        assert_eq!(s.position, Vector3::new(2.0, -1.0, 3.0));
        assert_eq!(s.velocity, Vector3::zeros());
    }

    #[test]
    fn single_euler_step_moves_v_max_dt() {
        let mut s = flying_at([0.0, 0.0, 2.0]);
        let sp = PoseSetpoint {
            target: Vector3::new(10.0, 0.0, 2.0),
            psi: 0.0,
        };
        step_dynamics(&mut s, &sp, 0.001, &limits());
        assert_relative_eq!(s.position.x, 0.001, max_relative = 1e-12);
        assert_eq!(s.position.y, 0.0);
        assert_eq!(s.position.z, 2.0);
    }

    #[test]
    fn landing_clamps_at_ground_and_lands() {
        let mut s = flying_at([4.0, 4.0, 0.0005]);
        s.mode = FlightMode::Landing;
        let sp = PoseSetpoint {
            target: Vector3::new(4.0, 4.0, -1.0),
            psi: 0.0,
        };
        step_dynamics(&mut s, &sp, 0.001, &VehicleLimits::default());
        assert_eq!(s.position.z, 0.0);
        assert_eq!(s.mode, FlightMode::Landed);
    }

    #[test]
    fn takeoff_flips_to_flying_inside_tolerance() {
        let mut s = flying_at([0.0, 0.0, 2.95]);
        s.mode = FlightMode::TakingOff;
        let sp = PoseSetpoint {
            target: Vector3::new(0.0, 0.0, 3.0),
            psi: 0.0,
        };
        step_dynamics(&mut s, &sp, 0.001, &VehicleLimits::default());
        assert_eq!(s.mode, FlightMode::Flying);
    }

    #[test]
    fn collision_empty_world_is_false() {
        let s = flying_at([0.0, 0.0, 2.0]);
        assert!(!check_collision(&s, &World::default(), 0.3));
    }

    #[test]
    fn collision_distance_arithmetic() {
        let world = World {
            obstacles: vec![Obstacle {
                center: [5.0, 0.0],
                radius: 1.0,
            }],
        };
        let near = flying_at([4.9, 0.0, 2.0]);
        assert!(check_collision(&near, &world, 0.3));
        let far = flying_at([0.0, 0.0, 2.0]);
        assert!(!check_collision(&far, &world, 0.3));
    }

    #[test]
    fn mode_machine_nominal_and_absorbing() {
        let mut s = VehicleState::new(Vector3::zeros(), 0.0);
        assert!(s.set_mode(FlightMode::Guided).is_ok());
        assert!(s.set_mode(FlightMode::TakingOff).is_ok());
        assert!(s.set_mode(FlightMode::Flying).is_ok());
        assert!(s.set_mode(FlightMode::Landing).is_ok());
        assert_eq!(s.mode, FlightMode::Landing);

        let mut crashed = VehicleState::new(Vector3::zeros(), 0.0);
        crashed.crash();
        assert!(crashed.set_mode(FlightMode::Guided).is_ok());
        assert_eq!(crashed.mode, FlightMode::Crashed);
    }

    #[test]
    fn illegal_transition_rejected() {
        let mut s = VehicleState::new(Vector3::zeros(), 0.0);
        let err = s.set_mode(FlightMode::Landing).unwrap_err();
        assert_eq!(err.from, FlightMode::Idle);
        assert_eq!(s.mode, FlightMode::Idle);
    }

    #[test]
    fn takeoff_while_airborne_is_rejected() {
        let mut s = flying_at([0.0, 0.0, 3.0]);
        assert!(s.set_mode(FlightMode::TakingOff).is_err());
        assert_eq!(s.mode, FlightMode::Flying);
    }

    #[test]
    fn crash_latches_position() {
        let mut s = flying_at([1.0, 1.0, 2.0]);
        s.crash();
        let before = s.position;
        let sp = PoseSetpoint {
            target: Vector3::new(9.0, 9.0, 9.0),
            psi: 1.0,
        };
        for _ in 0..100 {
            step_dynamics(&mut s, &sp, 0.001, &VehicleLimits::default());
        }
        assert_eq!(s.position, before);
        assert_eq!(s.mode, FlightMode::Crashed);
    }

    proptest! {
        #[test]
        fn contraction_and_speed_bound(
            px in -20.0..20.0f64, py in -20.0..20.0f64, pz in 0.1..10.0f64,
            tx in -20.0..20.0f64, ty in -20.0..20.0f64, tz in 0.1..10.0f64,
            psi in -3.0..3.0f64,
        ) {
            let lim = VehicleLimits::default();
            let dt = 0.001;
            let mut s = flying_at([px, py, pz]);
            let sp = PoseSetpoint { target: Vector3::new(tx, ty, tz), psi };
            let mut prev_dist = (sp.target - s.position).norm();
            for _ in 0..50 {
                let before = s.position;
                step_dynamics(&mut s, &sp, dt, &lim);
                let moved = (s.position - before).norm();
                prop_assert!(moved <= lim.v_max * dt + 1e-12);
                let dist = (sp.target - s.position).norm();
                prop_assert!(dist <= prev_dist + 1e-12);
                prev_dist = dist;
            }
        }
    }

    #[test]
    fn wrap_angle_stays_in_range() {
        for k in -10..=10 {
            let a = 0.7 + k as f64 * 2.0 * std::f64::consts::PI;
            assert_relative_eq!(wrap_angle(a), 0.7, epsilon = 1e-9);
        }
    }
}
