//! Per-tick JSONL traces and CSV exports.
//!
//! Trace floats are rounded to 9 significant digits when a record is built,
//! so writing a record and parsing it back gives the same value.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::{ScenarioConfig, SummaryStats, TrialResult};
use crate::{Behavior, WorldState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub alive: bool,
    pub mode: Behavior,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectRecord {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub goal_x: f64,
    pub goal_y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub tick: u64,
    pub robots: Vec<RobotRecord>,
    pub object: Option<ObjectRecord>,
    pub dist_to_goal: Option<f64>,
    pub object_speed: Option<f64>,
}

/// Rounds to 9 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

impl TraceRecord {
    pub fn from_world(world: &WorldState) -> Self {
        let robots = world
            .robots
            .iter()
            .map(|r| {
                let v = if r.alive {
                    r.velocity
                } else {
                    crate::Vec2::zero()
                };
                RobotRecord {
                    id: r.id,
                    x: round_sig(r.position.x),
                    y: round_sig(r.position.y),
                    vx: round_sig(v.x),
                    vy: round_sig(v.y),
                    alive: r.alive,
                    mode: r.behavior,
                }
            })
            .collect();
        let object = world.object.as_ref().map(|o| ObjectRecord {
            x: round_sig(o.position.x),
            y: round_sig(o.position.y),
            theta: round_sig(o.orientation),
            goal_x: round_sig(o.goal.x),
            goal_y: round_sig(o.goal.y),
        });
        Self {
            tick: world.tick,
            robots,
            object,
            dist_to_goal: world
                .object
                .as_ref()
                .map(|o| round_sig(o.distance_to_goal())),
            object_speed: world.object.as_ref().map(|o| round_sig(o.speed())),
        }
    }
}

/// Streams trace records, one JSON object per line.
pub struct TraceWriter<W: Write> {
    out: W,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn write_world(&mut self, world: &WorldState) -> Result<()> {
        self.write_record(&TraceRecord::from_world(world))
    }

    pub fn write_record(&mut self, record: &TraceRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

pub fn read_trace(input: impl BufRead) -> Result<Vec<TraceRecord>> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

pub const SUMMARY_HEADER: &str =
    "scenario,robots,shape,scale,mass_kg,n,success_rate,mean_time_s,ci95_s";

pub fn summary_row(config: &ScenarioConfig, stats: &SummaryStats) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        config.name,
        config.robot_count,
        config.object.shape.name(),
        config.object.scale,
        config.object.mass,
        stats.n,
        stats.success_rate,
        stats.mean_time,
        stats.ci95_halfwidth
    )
}

pub fn summary_csv(rows: &[(ScenarioConfig, SummaryStats)]) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for (cfg, stats) in rows {
        s.push_str(&summary_row(cfg, stats));
        s.push('\n');
    }
    s
}

pub fn trial_times_csv(trials: &[TrialResult]) -> String {
    let mut s = String::from("seed,outcome,transport_time_s,detection_to_arrival_s\n");
    for t in trials {
        let outcome = match t.outcome {
            crate::experiments::Outcome::Success => "success",
            crate::experiments::Outcome::Timeout => "timeout",
        };
        let det = t
            .detection_to_arrival
            .map(|d| d.to_string())
            .unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{}", t.seed, outcome, t.transport_time, det);
    }
    s
}

/// Distance and speed against time, one row per seed and tick.
pub fn time_series_csv(trials: &[TrialResult], dt: f64) -> String {
    let mut s = String::from("seed,tick,time_s,distance_m,speed_mps\n");
    for t in trials {
        for (&(tick, d), &(_, v)) in t.distance_series.iter().zip(&t.object_speed_series) {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                t.seed,
                tick,
                round_sig(tick as f64 * dt),
                d,
                v
            );
        }
    }
    s
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
