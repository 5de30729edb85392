//! Deterministic simulation of sensor spoofing and jamming attacks on an
//! autonomous quadcopter.
//!
//! The crate models a small ROS-like system: genuine sensor nodes (a planar
//! 1024-ray LiDAR and a GPS/odometry publisher), a guidance layer that flies
//! waypoint missions reading position only from bus topics, a potential-field
//! obstacle avoidance node, and attack injector nodes that flood the same
//! topics with counterfeit messages at a far higher rate. Everything runs on
//! a single-threaded tick clock with latest-write-wins topic mailboxes, so a
//! scenario file plus a seed reproduces the exact same trajectory every run.
//!
//! The user-facing surface is the `spoofsim` binary plus [`scenario`]
//! (loading and validation), [`sim`] (execution) and [`verdict`] (grading);
//! the other modules are the simulation building blocks.

pub mod attacks;
pub mod avoidance;
pub mod bus;
pub mod guidance;
pub mod log;
pub mod scenario;
pub mod sensors;
pub mod sim;
pub mod verdict;
pub mod world;

pub use scenario::ScenarioConfig;
pub use sim::Simulation;
pub use verdict::Verdict;
