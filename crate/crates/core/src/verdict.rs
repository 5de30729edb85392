//! Verdict evaluation: grade a finished run against the checks its scenario
//! declared and render the result as a text summary.

use crate::bus::BASE_RATE_HZ;
use crate::guidance::MissionPhase;
use crate::scenario::{Check, ScenarioConfig};
use crate::sim::RunStats;
use crate::world::FlightMode;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub scenario_id: String,
    pub checks: Vec<CheckResult>,
}

impl Verdict {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One line per check plus a trailing summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scenario: {}\n", self.scenario_id));
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {}: expected {}; observed {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.expected,
                c.observed
            ));
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        out.push_str(&format!(
            "result: {} ({}/{} checks passed)\n",
            if failed == 0 { "PASS" } else { "FAIL" },
            self.checks.len() - failed,
            self.checks.len()
        ));
        out
    }
}

pub fn evaluate(cfg: &ScenarioConfig, stats: &RunStats) -> Verdict {
    let checks = cfg
        .checks
        .iter()
        .map(|check| evaluate_check(check, stats))
        .collect();
    Verdict {
        scenario_id: cfg.id.clone(),
        checks,
    }
}

fn result(name: &'static str, expected: String, observed: String, pass: bool) -> CheckResult {
    CheckResult {
        name,
        expected,
        observed,
        pass,
    }
}

fn evaluate_check(check: &Check, stats: &RunStats) -> CheckResult {
    let name = check.name();
    let attack = stats.attack.as_ref();
    match check {
        Check::AllWaypointsReached => {
            let reached = stats.reach_events.len();
            result(
                name,
                format!("{} reach events", stats.waypoint_total),
                format!("{} of {}", reached, stats.waypoint_total),
                reached == stats.waypoint_total,
            )
        }
        Check::VehicleLanded => result(
            name,
            "final mode Landed".into(),
            format!("final mode {}", stats.final_mode.as_str()),
            stats.final_mode == FlightMode::Landed,
        ),
        Check::NoCollision => result(
            name,
            "no collision".into(),
            match stats.collision_tick {
                Some(t) => format!("collision at tick {t}"),
                None => "no collision".into(),
            },
            stats.collision_tick.is_none(),
        ),
        Check::CollisionOccurred => result(
            name,
            "a collision event".into(),
            match stats.collision_tick {
                Some(t) => format!("collision at tick {t}"),
                None => "no collision".into(),
            },
            stats.collision_tick.is_some(),
        ),
        Check::AvoidanceNeverTriggeredDuringAttack => match attack {
            Some(atk) => result(
                name,
                "0 triggers inside the window".into(),
                format!("{} triggers", atk.avoidance_triggers_in_window),
                atk.avoidance_triggers_in_window == 0,
            ),
            None => never_armed(name),
        },
        Check::NoReachAfterAttackStart => match attack {
            Some(atk) => {
                let late = stats
                    .reach_events
                    .iter()
                    .filter(|(_, t)| *t >= atk.arm_tick)
                    .count();
                result(
                    name,
                    format!("no reach events at or after tick {}", atk.arm_tick),
                    format!("{late} late reach events"),
                    late == 0,
                )
            }
            None => never_armed(name),
        },
        Check::BoundedNearAttackStart { radius } => match attack {
            Some(atk) => result(
                name,
                format!("max excursion <= {radius} m"),
                format!("{:.3} m", atk.max_dist_from_start),
                atk.max_dist_from_start <= *radius,
            ),
            None => never_armed(name),
        },
        Check::RearRetreatAfterAttack { within_seconds } => {
            match attack {
                Some(atk) => {
                    let offset = (within_seconds * BASE_RATE_HZ).round() as u64;
                    match atk.rear_samples.iter().find(|(o, _)| *o == offset) {
                    Some((_, along)) => result(
                        name,
                        format!("negative displacement along arming heading after {within_seconds} s"),
                        format!("{along:.3} m"),
                        *along < 0.0,
                    ),
                    None => result(
                        name,
                        format!("sample {within_seconds} s after arming"),
                        "run ended before the sample".into(),
                        false,
                    ),
                }
                }
                None => never_armed(name),
            }
        }
        Check::FirstWaypointApproached => result(
            name,
            format!("true pose within {} m of waypoint 1", stats.pos_tolerance),
            format!("min distance {:.3} m", stats.min_dist_to_first_waypoint),
            stats.min_dist_to_first_waypoint < stats.pos_tolerance,
        ),
        Check::NeverLandingMode => result(
            name,
            "Landing mode never entered".into(),
            if stats.landing_mode_seen {
                "Landing mode entered".into()
            } else {
                "Landing mode never entered".into()
            },
            !stats.landing_mode_seen,
        ),
        Check::FinalPhaseHovering => result(
            name,
            "final mission phase Hovering".into(),
            format!("final phase {}", stats.final_phase.as_str()),
            stats.final_phase == MissionPhase::Hovering,
        ),
        Check::NegativeXDisplacementOverAttack => match attack {
            Some(atk) => {
                let dx = atk.last_window_position.x - atk.start_position.x;
                result(
                    name,
                    "x displacement < 0 over the window".into(),
                    format!("{dx:.3} m"),
                    dx < 0.0,
                )
            }
            None => never_armed(name),
        },
        Check::AttackerDominatesWindow => match attack {
            Some(atk) => {
                let pass = atk.window_ticks > 0
                    && atk
                        .topics
                        .iter()
                        .all(|d| d.attacker_owned == atk.window_ticks);
                let observed = atk
                    .topics
                    .iter()
                    .map(|d| format!("{} {}/{}", d.topic, d.attacker_owned, atk.window_ticks))
                    .collect::<Vec<_>>()
                    .join(", ");
                result(
                    name,
                    "attacker-owned samples on every targeted topic for the whole window".into(),
                    observed,
                    pass,
                )
            }
            None => never_armed(name),
        },
        Check::GenuineRecoveryWithin { ticks } => match attack {
            Some(atk) => {
                let mut worst: Option<u64> = None;
                let mut all = true;
                for d in &atk.topics {
                    match d.recovered_at {
                        Some(t) => {
                            let lag = t.saturating_sub(atk.end_tick);
                            worst = Some(worst.map_or(lag, |w| w.max(lag)));
                        }
                        None => all = false,
                    }
                }
                let observed = if all {
                    format!("recovered within {} ticks", worst.unwrap_or(0))
                } else {
                    "no genuine payload after window end".into()
                };
                result(
                    name,
                    format!("genuine payloads back within {ticks} ticks of window end"),
                    observed,
                    all && worst.unwrap_or(u64::MAX) <= *ticks,
                )
            }
            None => never_armed(name),
        },
    }
}

fn never_armed(name: &'static str) -> CheckResult {
    result(
        name,
        "attack armed during the run".into(),
        "attack never armed".into(),
        false,
    )
}
