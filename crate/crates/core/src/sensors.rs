//! Genuine sensor models: a planar 1024-ray LiDAR cast against disc
//! obstacles, and a GPS/odometry pair derived from the true vehicle state
//! through a linear equirectangular map.
//!
//! Ray `i` points at angle `heading + mount_offset - i * (2*pi/1024)`: the
//! zero ray lies along the vehicle x-axis and the index direction is
//! clockwise positive. The scan loop is the data-parallel hot spot; both the
//! rayon and the sequential implementation are exported so the benches can
//! compare them, and `lidar_scan` picks one based on the `parallel` feature.

use nalgebra::{Vector2, Vector3};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::world::{VehicleState, World};

/// Number of rays in a full 360-degree sweep.
pub const RAY_COUNT: usize = 1024;

/// Angular step between consecutive rays, radians (clockwise positive).
pub const RAY_STEP: f64 = 2.0 * std::f64::consts::PI / RAY_COUNT as f64;

/// LiDAR range limits and mounting, configurable per scenario.
#[derive(Debug, Clone, Copy)]
pub struct LidarConfig {
    pub range_min: f64,
    pub range_max: f64,
    /// Rotation of the zero ray away from the vehicle x-axis, radians.
    pub mount_offset: f64,
}

impl Default for LidarConfig {
    fn default() -> Self {
        Self {
            range_min: 0.1,
            range_max: 30.0,
            mount_offset: 0.0,
        }
    }
}

/// One full sweep: 1024 ranges in meters, no-hit encoded as `range_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaserScan {
    pub ranges: Box<[f64; RAY_COUNT]>,
    pub range_min: f64,
    pub range_max: f64,
}

impl LaserScan {
    pub fn uniform(distance: f64, cfg: &LidarConfig) -> Self {
        Self {
            ranges: Box::new([distance; RAY_COUNT]),
            range_min: cfg.range_min,
            range_max: cfg.range_max,
        }
    }

    pub fn min_range(&self) -> f64 {
        self.ranges.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Global position fix. No bounds are enforced: attackers publish arbitrary
/// values and the guidance layer consumes them as-is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NavSatFixMsg {
    pub latitude: f64,
    pub longitude: f64,
}

/// Local-frame position estimate as published on the odometry topic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdometryMsg {
    pub position: Vector3<f64>,
    pub heading: f64,
}

/// Linear lat/lon mapping anchored at a configurable origin.
#[derive(Debug, Clone, Copy)]
pub struct GeoOrigin {
    pub latitude: f64,
    pub longitude: f64,
    /// Degrees per meter along both axes.
    pub meters_to_degrees: f64,
}

impl Default for GeoOrigin {
    fn default() -> Self {
        Self {
            latitude: 47.0,
            longitude: 11.0,
            meters_to_degrees: 1e-5,
        }
    }
}

/// World-frame unit direction of ray `index` for a vehicle heading.
pub fn ray_direction(heading: f64, mount_offset: f64, index: usize) -> Vector2<f64> {
    let angle = ray_angle(heading, mount_offset, index);
    Vector2::new(angle.cos(), angle.sin())
}

/// World-frame angle of ray `index`, clockwise positive in the index.
pub fn ray_angle(heading: f64, mount_offset: f64, index: usize) -> f64 {
    heading + mount_offset - index as f64 * RAY_STEP
}

/// Distance from `origin` along `dir` (unit) to the nearest boundary of the
/// disc at `center`, if the ray hits it in front of the origin.
fn ray_disc_distance(
    origin: Vector2<f64>,
    dir: Vector2<f64>,
    center: [f64; 2],
    radius: f64,
) -> Option<f64> {
    let to_center = Vector2::new(center[0], center[1]) - origin;
    // t^2 - 2 b t + c = 0 with b = dir . to_center, c = |to_center|^2 - r^2
    let b = dir.dot(&to_center);
    let c = to_center.norm_squared() - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let sqrt_disc = disc.sqrt();
    let t_near = b - sqrt_disc;
    let t_far = b + sqrt_disc;
    if t_near > 0.0 {
        Some(t_near)
    } else if t_far > 0.0 {
        // Origin inside the disc: the boundary ahead is still a hit.
        Some(t_far)
    } else {
        None
    }
}

fn cast_ray(
    world: &World,
    origin: Vector2<f64>,
    heading: f64,
    cfg: &LidarConfig,
    index: usize,
) -> f64 {
    let dir = ray_direction(heading, cfg.mount_offset, index);
    let mut nearest = f64::INFINITY;
    for obs in &world.obstacles {
        if let Some(t) = ray_disc_distance(origin, dir, obs.center, obs.radius) {
            if t < nearest {
                nearest = t;
            }
        }
    }
    if nearest.is_finite() {
        nearest.clamp(cfg.range_min, cfg.range_max)
    } else {
        cfg.range_max
    }
}

/// Sequential scan over all 1024 rays.
pub fn lidar_scan_seq(world: &World, pose: &VehicleState, cfg: &LidarConfig) -> LaserScan {
    let origin = pose.position.xy();
    let mut scan = LaserScan::uniform(cfg.range_max, cfg);
    for (i, r) in scan.ranges.iter_mut().enumerate() {
        *r = cast_ray(world, origin, pose.heading, cfg, i);
    }
    scan
}

/// Rayon scan. Each ray writes its own slot, so the result is bit-identical
/// to the sequential path regardless of thread count.
#[cfg(feature = "parallel")]
pub fn lidar_scan_par(world: &World, pose: &VehicleState, cfg: &LidarConfig) -> LaserScan {
    let origin = pose.position.xy();
    let mut scan = LaserScan::uniform(cfg.range_max, cfg);
    scan.ranges
        .par_iter_mut()
        .enumerate()
        .for_each(|(i, r)| *r = cast_ray(world, origin, pose.heading, cfg, i));
    scan
}

/// Cast a full sweep from the vehicle pose against the world.
pub fn lidar_scan(world: &World, pose: &VehicleState, cfg: &LidarConfig) -> LaserScan {
    #[cfg(feature = "parallel")]
    {
        lidar_scan_par(world, pose, cfg)
    }
    #[cfg(not(feature = "parallel"))]
    {
        lidar_scan_seq(world, pose, cfg)
    }
}

/// Derive the genuine GPS pair from the true state: odometry carries the
/// local pose verbatim, the fix maps x to longitude and y to latitude.
pub fn publish_gps(state: &VehicleState, geo: &GeoOrigin) -> (NavSatFixMsg, OdometryMsg) {
    let fix = NavSatFixMsg {
        latitude: geo.latitude + state.position.y * geo.meters_to_degrees,
        longitude: geo.longitude + state.position.x * geo.meters_to_degrees,
    };
    let odo = OdometryMsg {
        position: state.position,
        heading: state.heading,
    };
    (fix, odo)
}

/// Inverse of the fix mapping, exact up to floating point.
pub fn position_from_fix(fix: &NavSatFixMsg, geo: &GeoOrigin) -> Vector2<f64> {
    Vector2::new(
        (fix.longitude - geo.longitude) / geo.meters_to_degrees,
        (fix.latitude - geo.latitude) / geo.meters_to_degrees,
    )
}
