//! Scenario files: the unit of reproducible experiment.
//!
//! A scenario is a TOML document with nested sections for the world, the
//! vehicle, the sensors, the mission, the avoidance planner, an optional
//! attack, and the list of verdict checks the run is graded against. Loading
//! validates everything up front and reports all violations at once, each
//! prefixed with its field path.

use std::path::Path;

use nalgebra::Vector3;
use serde::Deserialize;
use thiserror::Error;

use crate::attacks::{AttackKind, AttackSpec, GpsSpoofParams, StartTrigger};
use crate::avoidance::PotentialFieldConfig;
use crate::bus::BASE_RATE_HZ;
use crate::guidance::{MissionParams, Waypoint};
use crate::sensors::{GeoOrigin, LidarConfig};
use crate::world::{Obstacle, VehicleLimits, World};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
}

/// Verdict checks a scenario declares. Expected behaviors are encoded here;
/// the observed side comes out of the run statistics.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Check {
    /// Every waypoint got a reach event.
    AllWaypointsReached,
    /// Final flight mode is Landed.
    VehicleLanded,
    NoCollision,
    CollisionOccurred,
    /// The avoidance planner never fired inside the attack window.
    AvoidanceNeverTriggeredDuringAttack,
    /// No reach event at or after the attack arming tick.
    NoReachAfterAttackStart,
    /// True position stays within `radius` of the arming position from
    /// arming until the end of the run.
    BoundedNearAttackStart {
        radius: f64,
    },
    /// Within `within_seconds` of arming, displacement projected on the
    /// arming heading is negative.
    RearRetreatAfterAttack {
        within_seconds: f64,
    },
    /// True pose came within the mission position tolerance of waypoint 1.
    FirstWaypointApproached,
    NeverLandingMode,
    FinalPhaseHovering,
    /// X displacement between arming and window close is strictly negative.
    NegativeXDisplacementOverAttack,
    /// 100% of targeted-topic samples during the window are attacker-owned.
    AttackerDominatesWindow,
    /// Genuine payloads own the targeted topics within `ticks` of window end.
    GenuineRecoveryWithin {
        ticks: u64,
    },
}

impl Check {
    pub fn name(&self) -> &'static str {
        match self {
            Check::AllWaypointsReached => "all-waypoints-reached",
            Check::VehicleLanded => "vehicle-landed",
            Check::NoCollision => "no-collision",
            Check::CollisionOccurred => "collision-occurred",
            Check::AvoidanceNeverTriggeredDuringAttack => "avoidance-never-triggered-during-attack",
            Check::NoReachAfterAttackStart => "no-reach-after-attack-start",
            Check::BoundedNearAttackStart { .. } => "bounded-near-attack-start",
            Check::RearRetreatAfterAttack { .. } => "rear-retreat-after-attack",
            Check::FirstWaypointApproached => "first-waypoint-approached",
            Check::NeverLandingMode => "never-landing-mode",
            Check::FinalPhaseHovering => "final-phase-hovering",
            Check::NegativeXDisplacementOverAttack => "negative-x-displacement-over-attack",
            Check::AttackerDominatesWindow => "attacker-dominates-window",
            Check::GenuineRecoveryWithin { .. } => "genuine-recovery-within",
        }
    }

    pub fn needs_attack(&self) -> bool {
        !matches!(
            self,
            Check::AllWaypointsReached
                | Check::VehicleLanded
                | Check::NoCollision
                | Check::CollisionOccurred
                | Check::FirstWaypointApproached
                | Check::NeverLandingMode
                | Check::FinalPhaseHovering
        )
    }

    /// Catalog of all check kinds with a one-line description, for the CLI.
    pub fn catalog() -> &'static [(&'static str, &'static str)] {
        &[
            (
                "all-waypoints-reached",
                "every mission waypoint logged a reach event",
            ),
            ("vehicle-landed", "final flight mode is Landed"),
            ("no-collision", "no collision event during the run"),
            ("collision-occurred", "a collision event was recorded"),
            (
                "avoidance-never-triggered-during-attack",
                "avoidance never fired inside the attack window",
            ),
            (
                "no-reach-after-attack-start",
                "no reach event at or after attack arming",
            ),
            (
                "bounded-near-attack-start",
                "true position stayed within `radius` of the arming position",
            ),
            (
                "rear-retreat-after-attack",
                "within `within_seconds`, displacement along arming heading is negative",
            ),
            (
                "first-waypoint-approached",
                "true pose came within pos_tolerance of waypoint 1",
            ),
            ("never-landing-mode", "Landing mode never entered"),
            ("final-phase-hovering", "mission ends in the Hovering phase"),
            (
                "negative-x-displacement-over-attack",
                "x displacement over the window is strictly negative",
            ),
            (
                "attacker-dominates-window",
                "every targeted-topic sample during the window is attacker-owned",
            ),
            (
                "genuine-recovery-within",
                "genuine payloads return within `ticks` of window end",
            ),
        ]
    }
}

/// Fully validated scenario, ready to hand to the simulation.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub id: String,
    pub duration_ticks: u64,
    pub seed: u64,
    pub world: World,
    pub geo: GeoOrigin,
    pub start_position: Vector3<f64>,
    pub start_heading: f64,
    pub limits: VehicleLimits,
    pub lidar: LidarConfig,
    pub sensor_rate_hz: f64,
    pub mission: MissionParams,
    pub mission_rate_hz: f64,
    pub waypoints: Vec<Waypoint>,
    pub avoidance_enabled: bool,
    pub avoidance_rate_hz: f64,
    pub apf: PotentialFieldConfig,
    pub attack: Option<AttackSpec>,
    pub checks: Vec<Check>,
}

// ---------------------------------------------------------------------------
// Raw file schema
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioRaw {
    id: String,
    duration_ticks: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    world: WorldRaw,
    #[serde(default)]
    vehicle: VehicleRaw,
    #[serde(default)]
    sensors: SensorsRaw,
    #[serde(default)]
    mission: MissionRaw,
    #[serde(default)]
    avoidance: AvoidanceRaw,
    attack: Option<AttackRaw>,
    #[serde(default)]
    checks: Vec<Check>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldRaw {
    #[serde(default)]
    obstacles: Vec<ObstacleRaw>,
    #[serde(default)]
    geo_origin: GeoRaw,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObstacleRaw {
    x: f64,
    y: f64,
    radius: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeoRaw {
    latitude: f64,
    longitude: f64,
    meters_to_degrees: f64,
}

impl Default for GeoRaw {
    fn default() -> Self {
        let geo = GeoOrigin::default();
        Self {
            latitude: geo.latitude,
            longitude: geo.longitude,
            meters_to_degrees: geo.meters_to_degrees,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VehicleRaw {
    #[serde(default)]
    start_x: f64,
    #[serde(default)]
    start_y: f64,
    #[serde(default = "default_heading_deg")]
    start_heading_deg: f64,
    #[serde(default = "default_v_max")]
    v_max: f64,
    #[serde(default = "default_omega_max")]
    omega_max: f64,
    #[serde(default = "default_vehicle_radius")]
    radius: f64,
    #[serde(default = "default_takeoff_tolerance")]
    takeoff_tolerance: f64,
}

fn default_heading_deg() -> f64 {
    90.0
}
fn default_v_max() -> f64 {
    2.0
}
fn default_omega_max() -> f64 {
    std::f64::consts::PI
}
fn default_vehicle_radius() -> f64 {
    0.3
}
fn default_takeoff_tolerance() -> f64 {
    0.1
}

impl Default for VehicleRaw {
    fn default() -> Self {
        Self {
            start_x: 0.0,
            start_y: 0.0,
            start_heading_deg: default_heading_deg(),
            v_max: default_v_max(),
            omega_max: default_omega_max(),
            radius: default_vehicle_radius(),
            takeoff_tolerance: default_takeoff_tolerance(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensorsRaw {
    #[serde(default = "default_sensor_rate")]
    rate_hz: f64,
    #[serde(default = "default_range_min")]
    range_min: f64,
    #[serde(default = "default_range_max")]
    range_max: f64,
    #[serde(default)]
    mount_offset_deg: f64,
}

fn default_sensor_rate() -> f64 {
    10.0
}
fn default_range_min() -> f64 {
    0.1
}
fn default_range_max() -> f64 {
    30.0
}

impl Default for SensorsRaw {
    fn default() -> Self {
        Self {
            rate_hz: default_sensor_rate(),
            range_min: default_range_min(),
            range_max: default_range_max(),
            mount_offset_deg: 0.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MissionRaw {
    #[serde(default = "default_mission_rate")]
    rate_hz: f64,
    #[serde(default)]
    start_tick: u64,
    #[serde(default = "default_takeoff_altitude")]
    takeoff_altitude: f64,
    #[serde(default = "default_pos_tolerance")]
    pos_tolerance: f64,
    #[serde(default = "default_heading_tolerance")]
    heading_tolerance: f64,
    #[serde(default = "default_frame_samples")]
    frame_init_samples: usize,
    #[serde(default)]
    waypoints: Vec<WaypointRaw>,
}

fn default_mission_rate() -> f64 {
    3.0
}
fn default_takeoff_altitude() -> f64 {
    3.0
}
fn default_pos_tolerance() -> f64 {
    0.3
}
fn default_heading_tolerance() -> f64 {
    0.01
}
fn default_frame_samples() -> usize {
    100
}

impl Default for MissionRaw {
    fn default() -> Self {
        Self {
            rate_hz: default_mission_rate(),
            start_tick: 0,
            takeoff_altitude: default_takeoff_altitude(),
            pos_tolerance: default_pos_tolerance(),
            heading_tolerance: default_heading_tolerance(),
            frame_init_samples: default_frame_samples(),
            waypoints: Vec::new(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaypointRaw {
    x: f64,
    y: f64,
    z: f64,
    #[serde(default = "default_heading_deg")]
    psi_deg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AvoidanceRaw {
    #[serde(default = "default_true")]
    enabled: bool,
    #[serde(default = "default_sensor_rate")]
    rate_hz: f64,
    #[serde(default = "default_gain")]
    k_att: f64,
    #[serde(default = "default_gain")]
    k_rep: f64,
    #[serde(default = "default_d0")]
    d0: f64,
    #[serde(default = "default_d0")]
    activation_tolerance: f64,
    #[serde(default = "default_gain")]
    step_length: f64,
}

fn default_true() -> bool {
    true
}
fn default_gain() -> f64 {
    1.0
}
fn default_d0() -> f64 {
    3.0
}

impl Default for AvoidanceRaw {
    fn default() -> Self {
        Self {
            enabled: true,
            rate_hz: default_sensor_rate(),
            k_att: default_gain(),
            k_rep: default_gain(),
            d0: default_d0(),
            activation_tolerance: default_d0(),
            step_length: default_gain(),
        }
    }
}

#[derive(Debug, Deserialize)]
struct AttackRaw {
    #[serde(flatten)]
    kind: AttackKindRaw,
    #[serde(default)]
    trigger: TriggerRaw,
    #[serde(default)]
    start_tick: u64,
    end_tick: u64,
    #[serde(default = "default_attack_rate")]
    rate_hz: f64,
    seed: Option<u64>,
}

fn default_attack_rate() -> f64 {
    1000.0
}

#[derive(Debug, Default, Deserialize, PartialEq, Eq, Clone, Copy)]
#[serde(rename_all = "kebab-case")]
enum TriggerRaw {
    #[default]
    Tick,
    ModeFlying,
    AfterFirstWaypointCommand,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum AttackKindRaw {
    LidarUniform {
        distance: f64,
    },
    LidarJam {
        bounds: BoundsRaw,
    },
    LidarFrontObject {
        d_front: f64,
        v_out: f64,
    },
    GpsFixedSpoof {
        latitude: Option<f64>,
        longitude: Option<f64>,
        displacement: Option<DisplacementRaw>,
    },
    GpsJam {
        lat_bounds: BoundsRaw,
        lon_bounds: BoundsRaw,
    },
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct BoundsRaw {
    min: f64,
    max: f64,
}

#[derive(Debug, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct DisplacementRaw {
    dx: f64,
    dy: f64,
}

// ---------------------------------------------------------------------------
// Loading and validation
// ---------------------------------------------------------------------------

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ScenarioConfig::from_toml_str(&text)
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let raw: ScenarioRaw = toml::from_str(text)?;
        let mut errors = Vec::new();
        let cfg = validate(raw, &mut errors);
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(ScenarioError::Validation(errors))
        }
    }
}

// NaN must fail every bound check, so the comparisons below are written with
// an explicit finiteness test first.

fn check_positive(errors: &mut Vec<String>, path: &str, value: f64) {
    if !value.is_finite() || value <= 0.0 {
        errors.push(format!("{path}: must be positive and finite, got {value}"));
    }
}

fn check_finite(errors: &mut Vec<String>, path: &str, value: f64) {
    if !value.is_finite() {
        errors.push(format!("{path}: must be finite, got {value}"));
    }
}

fn check_non_negative(errors: &mut Vec<String>, path: &str, value: f64) {
    if !value.is_finite() || value < 0.0 {
        errors.push(format!("{path}: must be non-negative, got {value}"));
    }
}

fn check_rate(errors: &mut Vec<String>, path: &str, rate: f64) {
    if !rate.is_finite() || rate <= 0.0 || rate > BASE_RATE_HZ {
        errors.push(format!(
            "{path}: rate must be in (0, {BASE_RATE_HZ}] Hz, got {rate}"
        ));
    }
}

fn validate(raw: ScenarioRaw, errors: &mut Vec<String>) -> ScenarioConfig {
    if raw.duration_ticks == 0 {
        errors.push("duration_ticks: must be positive".into());
    }

    let mut world = World::default();
    for (i, obs) in raw.world.obstacles.iter().enumerate() {
        check_finite(errors, &format!("world.obstacles[{i}].x"), obs.x);
        check_finite(errors, &format!("world.obstacles[{i}].y"), obs.y);
        check_positive(errors, &format!("world.obstacles[{i}].radius"), obs.radius);
        world.obstacles.push(Obstacle {
            center: [obs.x, obs.y],
            radius: obs.radius,
        });
    }
    let geo = GeoOrigin {
        latitude: raw.world.geo_origin.latitude,
        longitude: raw.world.geo_origin.longitude,
        meters_to_degrees: raw.world.geo_origin.meters_to_degrees,
    };
    check_positive(
        errors,
        "world.geo_origin.meters_to_degrees",
        geo.meters_to_degrees,
    );

    let v = &raw.vehicle;
    check_positive(errors, "vehicle.v_max", v.v_max);
    check_positive(errors, "vehicle.omega_max", v.omega_max);
    check_non_negative(errors, "vehicle.radius", v.radius);
    check_positive(errors, "vehicle.takeoff_tolerance", v.takeoff_tolerance);
    let limits = VehicleLimits {
        v_max: v.v_max,
        omega_max: v.omega_max,
        radius: v.radius,
        takeoff_tolerance: v.takeoff_tolerance,
    };

    let s = &raw.sensors;
    check_rate(errors, "sensors.rate_hz", s.rate_hz);
    check_positive(errors, "sensors.range_min", s.range_min);
    if s.range_max <= s.range_min {
        errors.push(format!(
            "sensors.range_max: must exceed range_min {}, got {}",
            s.range_min, s.range_max
        ));
    }
    let lidar = LidarConfig {
        range_min: s.range_min,
        range_max: s.range_max,
        mount_offset: s.mount_offset_deg.to_radians(),
    };

    let m = &raw.mission;
    check_rate(errors, "mission.rate_hz", m.rate_hz);
    check_positive(errors, "mission.takeoff_altitude", m.takeoff_altitude);
    check_positive(errors, "mission.pos_tolerance", m.pos_tolerance);
    check_positive(errors, "mission.heading_tolerance", m.heading_tolerance);
    if m.frame_init_samples == 0 {
        errors.push("mission.frame_init_samples: must be at least 1".into());
    }
    let mut waypoints = Vec::new();
    for (i, wp) in m.waypoints.iter().enumerate() {
        for (field, value) in [
            ("x", wp.x),
            ("y", wp.y),
            ("z", wp.z),
            ("psi_deg", wp.psi_deg),
        ] {
            check_finite(errors, &format!("mission.waypoints[{i}].{field}"), value);
        }
        waypoints.push(Waypoint {
            x: wp.x,
            y: wp.y,
            z: wp.z,
            psi_deg: wp.psi_deg,
        });
    }

    let a = &raw.avoidance;
    check_rate(errors, "avoidance.rate_hz", a.rate_hz);
    check_positive(errors, "avoidance.k_att", a.k_att);
    check_positive(errors, "avoidance.k_rep", a.k_rep);
    check_positive(errors, "avoidance.step_length", a.step_length);
    if a.d0 <= s.range_min {
        errors.push(format!(
            "avoidance.d0: must exceed sensors.range_min {}, got {}",
            s.range_min, a.d0
        ));
    }
    if !a.activation_tolerance.is_finite()
        || a.activation_tolerance <= 0.0
        || a.activation_tolerance > a.d0
    {
        errors.push(format!(
            "avoidance.activation_tolerance: must be in (0, d0 = {}], got {}",
            a.d0, a.activation_tolerance
        ));
    }
    let apf = PotentialFieldConfig {
        k_att: a.k_att,
        k_rep: a.k_rep,
        d0: a.d0,
        activation_tolerance: a.activation_tolerance,
        step_length: a.step_length,
    };

    let attack = raw
        .attack
        .as_ref()
        .map(|atk| validate_attack(atk, &lidar, &apf, s.rate_hz, raw.seed, errors));

    if raw.checks.is_empty() {
        errors.push("checks: every scenario declares at least one check".into());
    }
    for (i, check) in raw.checks.iter().enumerate() {
        if check.needs_attack() && raw.attack.is_none() {
            errors.push(format!(
                "checks[{i}]: {} requires an attack section",
                check.name()
            ));
        }
        match check {
            Check::BoundedNearAttackStart { radius } => {
                check_positive(errors, &format!("checks[{i}].radius"), *radius)
            }
            Check::RearRetreatAfterAttack { within_seconds } => check_positive(
                errors,
                &format!("checks[{i}].within_seconds"),
                *within_seconds,
            ),
            Check::GenuineRecoveryWithin { ticks } if *ticks == 0 => {
                errors.push(format!("checks[{i}].ticks: must be positive"));
            }
            _ => {}
        }
    }

    ScenarioConfig {
        id: raw.id,
        duration_ticks: raw.duration_ticks,
        seed: raw.seed,
        world,
        geo,
        start_position: Vector3::new(v.start_x, v.start_y, 0.0),
        start_heading: v.start_heading_deg.to_radians(),
        limits,
        lidar,
        sensor_rate_hz: s.rate_hz,
        mission: MissionParams {
            takeoff_altitude: m.takeoff_altitude,
            pos_tolerance: m.pos_tolerance,
            heading_tolerance: m.heading_tolerance,
            frame_init_samples: m.frame_init_samples,
            start_tick: m.start_tick,
        },
        mission_rate_hz: m.rate_hz,
        waypoints,
        avoidance_enabled: a.enabled,
        avoidance_rate_hz: a.rate_hz,
        apf,
        attack,
        checks: raw.checks,
    }
}

fn validate_attack(
    atk: &AttackRaw,
    lidar: &LidarConfig,
    apf: &PotentialFieldConfig,
    sensor_rate_hz: f64,
    scenario_seed: u64,
    errors: &mut Vec<String>,
) -> AttackSpec {
    let kind = match &atk.kind {
        AttackKindRaw::LidarUniform { distance } => {
            if *distance < lidar.range_min || *distance > lidar.range_max {
                errors.push(format!(
                    "attack.distance: {} outside sensor range [{}, {}]",
                    distance, lidar.range_min, lidar.range_max
                ));
            }
            AttackKind::LidarUniform {
                distance: *distance,
            }
        }
        AttackKindRaw::LidarJam { bounds } => {
            check_finite(errors, "attack.bounds.min", bounds.min);
            check_finite(errors, "attack.bounds.max", bounds.max);
            if bounds.min >= bounds.max {
                errors.push(format!(
                    "attack.bounds: jam requires min < max, got [{}, {}]",
                    bounds.min, bounds.max
                ));
            }
            if bounds.min < lidar.range_min || bounds.max > lidar.range_max {
                errors.push(format!(
                    "attack.bounds: [{}, {}] outside sensor range [{}, {}]",
                    bounds.min, bounds.max, lidar.range_min, lidar.range_max
                ));
            }
            AttackKind::LidarJam {
                min: bounds.min,
                max: bounds.max,
            }
        }
        AttackKindRaw::LidarFrontObject { d_front, v_out } => {
            check_finite(errors, "attack.d_front", *d_front);
            check_finite(errors, "attack.v_out", *v_out);
            if d_front >= v_out {
                errors.push(format!(
                    "attack.d_front: {d_front} must lie below v_out {v_out}"
                ));
            }
            if *d_front < lidar.range_min || *d_front >= apf.d0 {
                errors.push(format!(
                    "attack.d_front: {} must lie in [range_min {}, d0 {})",
                    d_front, lidar.range_min, apf.d0
                ));
            }
            if *v_out < apf.d0 || *v_out > lidar.range_max {
                errors.push(format!(
                    "attack.v_out: {} must lie in [d0 {}, range_max {}]",
                    v_out, apf.d0, lidar.range_max
                ));
            }
            AttackKind::LidarFrontObject {
                d_front: *d_front,
                v_out: *v_out,
            }
        }
        AttackKindRaw::GpsFixedSpoof {
            latitude,
            longitude,
            displacement,
        } => match (latitude, longitude, displacement) {
            (Some(lat), Some(lon), None) => {
                check_finite(errors, "attack.latitude", *lat);
                check_finite(errors, "attack.longitude", *lon);
                AttackKind::GpsFixedSpoof(GpsSpoofParams::Fixed {
                    latitude: *lat,
                    longitude: *lon,
                })
            }
            (None, None, Some(d)) => {
                check_finite(errors, "attack.displacement.dx", d.dx);
                check_finite(errors, "attack.displacement.dy", d.dy);
                AttackKind::GpsFixedSpoof(GpsSpoofParams::Displaced { dx: d.dx, dy: d.dy })
            }
            _ => {
                errors.push(
                    "attack: gps-fixed-spoof takes either latitude+longitude or displacement"
                        .into(),
                );
                AttackKind::GpsFixedSpoof(GpsSpoofParams::Fixed {
                    latitude: 0.0,
                    longitude: 0.0,
                })
            }
        },
        AttackKindRaw::GpsJam {
            lat_bounds,
            lon_bounds,
        } => {
            for (name, b) in [("lat_bounds", lat_bounds), ("lon_bounds", lon_bounds)] {
                check_finite(errors, &format!("attack.{name}.min"), b.min);
                check_finite(errors, &format!("attack.{name}.max"), b.max);
                if b.min >= b.max {
                    errors.push(format!(
                        "attack.{name}: jam requires min < max, got [{}, {}]",
                        b.min, b.max
                    ));
                }
            }
            AttackKind::GpsJam {
                lat: (lat_bounds.min, lat_bounds.max),
                lon: (lon_bounds.min, lon_bounds.max),
            }
        }
    };

    if !atk.rate_hz.is_finite() || atk.rate_hz <= 0.0 {
        errors.push(format!(
            "attack.rate_hz: must be positive, got {}",
            atk.rate_hz
        ));
    } else if atk.rate_hz < sensor_rate_hz {
        errors.push(format!(
            "attack.rate_hz: {} below the genuine sensor rate {}",
            atk.rate_hz, sensor_rate_hz
        ));
    }

    let start = match atk.trigger {
        TriggerRaw::Tick => {
            if atk.start_tick >= atk.end_tick {
                errors.push(format!(
                    "attack.start_tick: {} must precede end_tick {}",
                    atk.start_tick, atk.end_tick
                ));
            }
            StartTrigger::Tick(atk.start_tick)
        }
        TriggerRaw::ModeFlying => StartTrigger::ModeFlying,
        TriggerRaw::AfterFirstWaypointCommand => StartTrigger::AfterFirstWaypointCommand,
    };
    if atk.end_tick == 0 {
        errors.push("attack.end_tick: must be positive".into());
    }

    AttackSpec {
        kind,
        start,
        end_tick: atk.end_tick,
        rate_hz: atk.rate_hz,
        seed: atk.seed.unwrap_or(scenario_seed),
    }
}
