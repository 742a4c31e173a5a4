//! Merging per-channel levels into one list indexed with multiplicity.

use serde::{Deserialize, Serialize};

use super::{LevelResult, LevelStatus, Side};
use crate::discretization::ChannelSpec;
use crate::operator::GapProfile;

/// Levels of one channel, as computed, plus its profile.
#[derive(Debug, Clone)]
pub struct ChannelLevels {
    pub label: String,
    pub multiplicity: usize,
    pub profile: GapProfile,
    /// Levels `k = 1..=K`, either side.
    pub levels: Vec<LevelResult>,
}

impl ChannelLevels {
    pub fn new(channel: &ChannelSpec, profile: GapProfile, levels: Vec<LevelResult>) -> Self {
        Self {
            label: channel.label(),
            multiplicity: channel.multiplicity,
            profile,
            levels,
        }
    }
}

/// One row of the merged list; `level.k` is the global index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedLevel {
    pub level: LevelResult,
    pub channel: String,
    /// Index of the level within its channel.
    pub channel_k: usize,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedLevels {
    pub side: Side,
    pub profile: GapProfile,
    pub levels: Vec<MergedLevel>,
}

/// Direct-sum profile: the largest `a-`, the smallest `a+`, and the
/// innermost declared edges.
pub fn merged_profile(channels: &[ChannelLevels]) -> Option<GapProfile> {
    let first = channels.first()?;
    let mut p = first.profile.clone();
    for c in &channels[1..] {
        p.a_minus = p.a_minus.max(c.profile.a_minus);
        p.a_plus = p.a_plus.min(c.profile.a_plus);
        p.b_minus = p.b_minus.min(c.profile.b_minus);
        p.b_plus = p.b_plus.max(c.profile.b_plus);
    }
    p.k0_plus = None;
    p.k0_minus = None;
    Some(p)
}

/// Merge the `side` levels of several channels.
///
/// Every channel level is repeated `multiplicity` times. Levels at or beyond
/// the merged `a` value become `clamped_at_a` with that value. The list is cut
/// where some channel ran out of computed levels, since beyond that point a
/// level of that channel could be missing. Global indices follow the sorted
/// order; ties keep channel order.
pub fn merge_channels(channels: &[ChannelLevels], side: Side) -> MergedLevels {
    let Some(mut profile) = merged_profile(channels) else {
        return MergedLevels {
            side,
            profile: GapProfile::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN),
            levels: Vec::new(),
        };
    };
    let sign = side.sign();
    let a = match side {
        Side::Plus => profile.a_minus,
        Side::Minus => profile.a_plus,
    };
    // in plus orientation: values increase along the list
    let cutoff = channels
        .iter()
        .filter_map(|c| {
            let own: Vec<&LevelResult> = c.levels.iter().filter(|r| r.side == side).collect();
            let last = own.iter().max_by_key(|r| r.k)?;
            (last.status != LevelStatus::ClampedAtB).then_some(sign * last.value)
        })
        .fold(f64::INFINITY, f64::min);

    let mut rows: Vec<(LevelStatus, f64, usize, usize, MergedLevel)> = Vec::new();
    for (ci, c) in channels.iter().enumerate() {
        for r in c.levels.iter().filter(|r| r.side == side) {
            let oriented = sign * r.value;
            if oriented > cutoff {
                continue;
            }
            let mut level = r.clone();
            if sign * level.value <= sign * a || level.status == LevelStatus::ClampedAtA {
                level.status = LevelStatus::ClampedAtA;
                level.value = a;
            }
            for _ in 0..c.multiplicity {
                rows.push((
                    level.status,
                    sign * level.value,
                    ci,
                    r.k,
                    MergedLevel {
                        level: level.clone(),
                        channel: c.label.clone(),
                        channel_k: r.k,
                        multiplicity: c.multiplicity,
                    },
                ));
            }
        }
    }
    rows.sort_by(|x, y| {
        x.0.cmp(&y.0)
            .then(x.1.total_cmp(&y.1))
            .then(x.2.cmp(&y.2))
            .then(x.3.cmp(&y.3))
    });
    let levels: Vec<MergedLevel> = rows
        .into_iter()
        .enumerate()
        .map(|(i, (.., mut m))| {
            m.level.k = i + 1;
            m
        })
        .collect();
    let k0 = levels.iter().find(|m| m.level.status != LevelStatus::ClampedAtA).map(|m| m.level.k);
    match side {
        Side::Plus => profile.k0_plus = k0,
        Side::Minus => profile.k0_minus = k0,
    }
    MergedLevels { side, profile, levels }
}
