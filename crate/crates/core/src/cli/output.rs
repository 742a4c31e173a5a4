//! Level tables as CSV or JSON.
//!
//! CSV files start with `#` comment lines (profiles, diagnostics), followed by
//! the header and one row per level. Floats carry 17 significant digits so
//! that every value reads back bit for bit.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{GapError, Result};
use crate::operator::GapProfile;
use crate::solver::{LevelResult, LevelStatus, Side};

pub const LEVEL_HEADER: &str = "side,k,channel,tau,lambda,status,residual,iterations,multiplicity";
pub const CHECK_HEADER: &str = "channel,kind,side,k,lambda,eigenvalue,error";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub side: Side,
    pub k: usize,
    pub channel: String,
    pub tau: Option<f64>,
    pub lambda: f64,
    pub status: LevelStatus,
    pub residual: f64,
    pub iterations: usize,
    pub multiplicity: usize,
}

impl LevelRow {
    pub fn new(level: &LevelResult, channel: &str, tau: Option<f64>, multiplicity: usize) -> Self {
        Self {
            side: level.side,
            k: level.k,
            channel: channel.to_string(),
            tau,
            lambda: level.value,
            status: level.status,
            residual: level.residual,
            iterations: level.iterations,
            multiplicity,
        }
    }

    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.side,
            self.k,
            self.channel,
            fmt_opt(self.tau),
            fmt_f64(self.lambda),
            self.status,
            fmt_f64(self.residual),
            self.iterations,
            self.multiplicity
        )
    }
}

/// A profile line: `# profile <channel> a_minus=... a_plus=... ...`.
pub fn profile_comment(channel: &str, p: &GapProfile) -> String {
    let k0 = |k: Option<usize>| k.map_or("none".to_string(), |k| k.to_string());
    let mut line = format!(
        "# profile {channel} a_minus={} a_plus={} b_minus={} b_plus={} k0_plus={} k0_minus={} ordering={}",
        fmt_f64(p.a_minus),
        fmt_f64(p.a_plus),
        fmt_f64(p.b_minus),
        fmt_f64(p.b_plus),
        k0(p.k0_plus),
        k0(p.k0_minus),
        match p.ordering() {
            crate::operator::GapOrdering::Separated => "separated",
            crate::operator::GapOrdering::Overlapping => "overlapping",
        }
    );
    for issue in p.issues() {
        let _ = write!(line, "\n# warning {channel} {issue}");
    }
    line
}

pub fn level_csv(comments: &[String], rows: &[LevelRow]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(LEVEL_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Read back the level rows of a CSV table; comment lines are skipped.
pub fn parse_level_csv(text: &str) -> Result<Vec<LevelRow>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some(h) if h == LEVEL_HEADER => {}
        other => {
            return Err(GapError::Parse(format!("expected header '{LEVEL_HEADER}', found {other:?}")));
        }
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = |what: &str| GapError::Parse(format!("row {}: invalid {what} in '{line}'", i + 1));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(bad("field count"));
            }
            let float = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(what));
            let int = |s: &str, what: &str| s.parse::<usize>().map_err(|_| bad(what));
            Ok(LevelRow {
                side: f[0].parse().map_err(|_| bad("side"))?,
                k: int(f[1], "k")?,
                channel: f[2].to_string(),
                tau: if f[3].is_empty() { None } else { Some(float(f[3], "tau")?) },
                lambda: float(f[4], "lambda")?,
                status: f[5].parse().map_err(|_| bad("status"))?,
                residual: float(f[6], "residual")?,
                iterations: int(f[7], "iterations")?,
                multiplicity: int(f[8], "multiplicity")?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub channel: String,
    pub kind: String,
    pub side: Option<Side>,
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub eigenvalue: Option<f64>,
    pub error: Option<f64>,
}

impl CheckRow {
    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.channel,
            self.kind,
            self.side.map(|s| s.to_string()).unwrap_or_default(),
            self.k.map(|k| k.to_string()).unwrap_or_default(),
            fmt_opt(self.lambda),
            fmt_opt(self.eigenvalue),
            fmt_opt(self.error)
        )
    }
}

pub fn check_csv(comments: &[String], rows: &[CheckRow]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(CHECK_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}
