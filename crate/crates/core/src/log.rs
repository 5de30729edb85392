//! Per-tick trajectory records and their CSV rendering.
//!
//! Column order is fixed: `tick,true_x,true_y,true_z,true_psi,odo_x,odo_y,
//! odo_z,set_x,set_y,set_z,min_range,mode,attack_active`. Floats are written
//! with the shortest round-trip representation, so reruns of the same
//! scenario and seed produce byte-identical files. Fields whose source
//! mailbox has not been written yet stay empty.

use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;

use crate::world::FlightMode;

pub const CSV_HEADER: &str =
    "tick,true_x,true_y,true_z,true_psi,odo_x,odo_y,odo_z,set_x,set_y,set_z,min_range,mode,attack_active";

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub tick: u64,
    pub true_position: Vector3<f64>,
    pub true_psi: f64,
    pub odometry: Option<Vector3<f64>>,
    pub setpoint: Option<Vector3<f64>>,
    pub min_range: Option<f64>,
    pub mode: FlightMode,
    pub attack_active: bool,
}

/// Append-only decimated trajectory log, one record per logged tick.
#[derive(Debug, Clone, Default)]
pub struct TrajectoryLog {
    pub records: Vec<TrajectoryRecord>,
}

fn push_f64(out: &mut String, value: f64) {
    out.push(',');
    out.push_str(&value.to_string());
}

fn push_opt_vec(out: &mut String, value: &Option<Vector3<f64>>) {
    match value {
        Some(v) => {
            push_f64(out, v.x);
            push_f64(out, v.y);
            push_f64(out, v.z);
        }
        None => out.push_str(",,,"),
    }
}

impl TrajectoryLog {
    pub fn push(&mut self, record: TrajectoryRecord) {
        self.records.push(record);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.tick.to_string());
            push_f64(&mut out, r.true_position.x);
            push_f64(&mut out, r.true_position.y);
            push_f64(&mut out, r.true_position.z);
            push_f64(&mut out, r.true_psi);
            push_opt_vec(&mut out, &r.odometry);
            push_opt_vec(&mut out, &r.setpoint);
            match r.min_range {
                Some(m) => push_f64(&mut out, m),
                None => out.push(','),
            }
            out.push(',');
            out.push_str(r.mode.as_str());
            out.push(',');
            out.push(if r.attack_active { '1' } else { '0' });
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_csv().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_log_is_header_only() {
        let log = TrajectoryLog::default();
        assert_eq!(log.to_csv(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn absent_mailboxes_leave_fields_empty() {
        let mut log = TrajectoryLog::default();
        log.push(TrajectoryRecord {
            tick: 5,
            true_position: Vector3::new(1.0, 2.5, 0.0),
            true_psi: 1.5,
            odometry: None,
            setpoint: None,
            min_range: None,
            mode: FlightMode::Idle,
            attack_active: false,
        });
        let csv = log.to_csv();
        let row = csv.lines().nth(1).unwrap();
        assert_eq!(row, "5,1,2.5,0,1.5,,,,,,,,Idle,0");
    }

    #[test]
    fn rendering_is_reproducible() {
        let mut log = TrajectoryLog::default();
        log.push(TrajectoryRecord {
            tick: 0,
            true_position: Vector3::new(0.1 + 0.2, -7.25, 3.0),
            true_psi: std::f64::consts::FRAC_PI_2,
            odometry: Some(Vector3::new(0.30000000000000004, -7.25, 3.0)),
            setpoint: Some(Vector3::zeros()),
            min_range: Some(29.999999999999996),
            mode: FlightMode::Flying,
            attack_active: true,
        });
        assert_eq!(log.to_csv(), log.clone().to_csv());
        assert!(log.to_csv().contains("0.30000000000000004"));
    }
}
