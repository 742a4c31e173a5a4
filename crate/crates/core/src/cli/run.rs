use std::path::Path;

use serde::Serialize;

use super::config::{Command, Format, ModelConfig, PerturbationConfig, RunConfig};
use super::output::{check_csv, fmt_f64, level_csv, profile_comment, CheckRow, LevelRow};
use crate::continuation::{sweep, verify_uniform_bounds, HypothesisPoint, SweepConfig, UniformBoundsReport};
use crate::discretization::dirac::dirac_channel_tridiagonal;
use crate::discretization::{
    build_dirac_radial, build_pauli_channel, dirac_perturbation, pauli_coupling_perturbation, ChannelModel,
    ChannelSpec, RadialGrid,
};
use crate::error::{GapError, Result};
use crate::operator::{gap_profile, DecomposedOperator, GapProfile};
use crate::solver::{
    merge_channels, merged_spectrum, solve_levels, spectrum_check_against, ChannelLevels, LevelResult, Side,
    SpectrumReport,
};

/// One channel of the run: a built-in angular channel or the matrix itself.
struct Channel {
    label: String,
    multiplicity: usize,
    spec: Option<ChannelSpec>,
}

fn channels(config: &RunConfig) -> Result<Vec<Channel>> {
    if let ModelConfig::MatrixFile { .. } = config.model {
        return Ok(vec![Channel { label: "matrix".into(), multiplicity: 1, spec: None }]);
    }
    Ok(config
        .channels()?
        .into_iter()
        .map(|spec| Channel { label: spec.label(), multiplicity: spec.multiplicity, spec: Some(spec) })
        .collect())
}

fn grid(config: &RunConfig) -> Result<RadialGrid> {
    config
        .grid
        .ok_or_else(|| GapError::Config("built-in models need a grid".into()))?
        .build()
}

fn read_matrix(path: &Path) -> Result<DecomposedOperator> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| GapError::Io { path: path.to_path_buf(), source })?;
    DecomposedOperator::parse_text(&text).map_err(|e| match e {
        GapError::Parse(msg) => GapError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn build(config: &RunConfig, ch: &Channel) -> Result<DecomposedOperator> {
    match (&config.model, &ch.spec) {
        (ModelConfig::MatrixFile { path }, _) => read_matrix(path),
        (ModelConfig::Pauli { nu, .. }, Some(spec)) => build_pauli_channel(*nu, spec.l, &grid(config)?),
        (ModelConfig::Dirac { potential, .. }, Some(spec)) => {
            build_dirac_radial(potential, spec.kappa, &grid(config)?)
        }
        _ => unreachable!("built-in channels carry their spec"),
    }
}

/// The spectrum of the channel operator, in the cheapest available form.
fn spectrum(config: &RunConfig, ch: &Channel, op: &DecomposedOperator) -> Result<Vec<f64>> {
    match (&config.model, &ch.spec) {
        (ModelConfig::Dirac { potential, .. }, Some(spec)) if spec.model == ChannelModel::Dirac => {
            let mut eigs = dirac_channel_tridiagonal(potential, spec.kappa, &grid(config)?)?.eigenvalues()?;
            eigs.sort_by(f64::total_cmp);
            Ok(eigs)
        }
        _ => op.full_spectrum(),
    }
}

fn solve_channel(config: &RunConfig, op: &DecomposedOperator) -> Result<(GapProfile, Vec<LevelResult>)> {
    let w = config.window();
    let mut profile = gap_profile(op, w.b_minus, w.b_plus)?;
    let mut levels = Vec::new();
    for &side in &config.sides {
        levels.extend(solve_levels(op, &mut profile, config.levels, side, config.tol())?);
    }
    Ok((profile, levels))
}

#[derive(Serialize)]
struct ProfileEntry<'a> {
    channel: &'a str,
    profile: &'a GapProfile,
}

#[derive(Serialize)]
struct SolveDoc<'a> {
    command: &'static str,
    profiles: Vec<ProfileEntry<'a>>,
    levels: &'a [LevelRow],
}

fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| GapError::Parse(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn merged_label(side: Side) -> String {
    format!("merged:{side}")
}

fn run_solve(config: &RunConfig, format: Format) -> Result<String> {
    let mut per_channel = Vec::new();
    for ch in channels(config)? {
        let op = build(config, &ch)?;
        let (profile, levels) = solve_channel(config, &op)?;
        per_channel.push(ChannelLevels { label: ch.label, multiplicity: ch.multiplicity, profile, levels });
    }
    let merged: Vec<_> = config.sides.iter().map(|&s| merge_channels(&per_channel, s)).collect();

    let mut rows = Vec::new();
    let mut profiles: Vec<(String, GapProfile)> = Vec::new();
    for c in &per_channel {
        profiles.push((c.label.clone(), c.profile.clone()));
        rows.extend(c.levels.iter().map(|l| LevelRow::new(l, &c.label, None, c.multiplicity)));
    }
    for m in &merged {
        profiles.push((merged_label(m.side), m.profile.clone()));
        rows.extend(m.levels.iter().map(|l| {
            LevelRow::new(&l.level, &format!("merged:{}", l.channel), None, l.multiplicity)
        }));
    }
    match format {
        Format::Csv => {
            let mut comments = vec!["# gapspec solve".to_string()];
            comments.extend(profiles.iter().map(|(c, p)| profile_comment(c, p)));
            Ok(level_csv(&comments, &rows))
        }
        Format::Json => to_json(&SolveDoc {
            command: "solve",
            profiles: profiles.iter().map(|(channel, profile)| ProfileEntry { channel, profile }).collect(),
            levels: &rows,
        }),
    }
}

#[derive(Serialize)]
struct SweepChannel {
    channel: String,
    declared: GapProfile,
    v_sup: f64,
    hypotheses: Vec<HypothesisPoint>,
    report: UniformBoundsReport,
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    command: &'static str,
    channels: &'a [SweepChannel],
    levels: &'a [LevelRow],
}

/// The perturbation operator of the sweep and a bound on its norm.
fn perturbation(
    config: &RunConfig,
    ch: &Channel,
    p: &PerturbationConfig,
) -> Result<(DecomposedOperator, f64)> {
    match (p, &ch.spec) {
        (PerturbationConfig::Coupling, Some(_)) => {
            let g = grid(config)?;
            Ok((pauli_coupling_perturbation(&g)?, 1.0 / g.node(0)))
        }
        (PerturbationConfig::Potential { potential }, Some(spec)) => {
            let g = grid(config)?;
            Ok((dirac_perturbation(potential, spec.kappa, &g)?, potential.sup_norm(&g)?))
        }
        (PerturbationConfig::MatrixFile { path }, None) => {
            let v = read_matrix(path)?;
            let sup = v.full_spectrum()?.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            Ok((v, sup))
        }
        _ => Err(GapError::Config("sweep perturbation kind does not fit the model".into())),
    }
}

fn fmt_bool(b: bool) -> &'static str {
    if b { "true" } else { "false" }
}

fn run_sweep(config: &RunConfig, format: Format) -> Result<String> {
    let block = config
        .sweep
        .as_ref()
        .ok_or_else(|| GapError::Config("sweep needs a 'sweep' block".into()))?;
    let w = config.window();
    let k_set: Vec<(Side, usize)> =
        config.sides.iter().flat_map(|&s| (1..=config.levels).map(move |k| (s, k))).collect();

    let mut rows = Vec::new();
    let mut out = Vec::new();
    for ch in channels(config)? {
        let op0 = build(config, &ch)?;
        let (v, v_sup) = perturbation(config, &ch, &block.perturbation)?;
        let declared = match block.declared {
            Some(d) => GapProfile::new(d.a_minus, d.a_plus, w.b_minus, w.b_plus),
            None => gap_profile(&op0, w.b_minus, w.b_plus)?,
        };
        let mut sweep_config = SweepConfig::new(block.tau.values(), k_set.clone(), v_sup);
        sweep_config.tol = config.tol();
        sweep_config.dense_diagnostics = block.dense_diagnostics;
        let branches = sweep(&op0, &v, &sweep_config, &declared)?;
        let report = verify_uniform_bounds(&branches, &declared, &sweep_config);
        for b in &branches {
            rows.extend(b.points.iter().map(|p| LevelRow::new(&p.level, &ch.label, Some(p.tau), ch.multiplicity)));
        }
        out.push(SweepChannel {
            channel: ch.label,
            declared,
            v_sup,
            hypotheses: branches.first().map(|b| b.hypothesis_report.clone()).unwrap_or_default(),
            report,
        });
    }
    match format {
        Format::Csv => {
            let mut comments = vec!["# gapspec sweep".to_string()];
            for c in &out {
                comments.push(profile_comment(&c.channel, &c.declared));
                for h in &c.hypotheses {
                    comments.push(format!(
                        "# hypothesis {} tau={} a_minus={} a_plus={} jj_minus={} jj_plus={} a1_minus={} a1_plus={}",
                        c.channel,
                        fmt_f64(h.tau),
                        fmt_f64(h.a_minus),
                        fmt_f64(h.a_plus),
                        fmt_bool(h.jj_minus),
                        fmt_bool(h.jj_plus),
                        h.lowest_above_a_minus.map(fmt_f64).unwrap_or_else(|| "none".into()),
                        h.highest_below_a_plus.map(fmt_f64).unwrap_or_else(|| "none".into()),
                    ));
                }
                comments.push(format!(
                    "# uniform {} v_sup={} hypotheses_hold={} conclusions_hold={}",
                    c.channel,
                    fmt_f64(c.v_sup),
                    fmt_bool(c.report.hypotheses_hold()),
                    fmt_bool(c.report.conclusions_hold())
                ));
                for b in &c.report.branches {
                    for (t0, t1) in &b.status_changes {
                        comments.push(format!(
                            "# status_change {} {} k={} between tau={} and tau={}",
                            c.channel,
                            b.side,
                            b.k,
                            fmt_f64(*t0),
                            fmt_f64(*t1)
                        ));
                    }
                }
            }
            Ok(level_csv(&comments, &rows))
        }
        Format::Json => to_json(&SweepDoc { command: "sweep", channels: &out, levels: &rows }),
    }
}

fn check_rows(channel: &str, report: &SpectrumReport) -> Vec<CheckRow> {
    let matched = report.matched.iter().map(|m| ("matched", m));
    let mismatched = report.mismatched.iter().map(|m| ("mismatched", m));
    let mut rows: Vec<CheckRow> = matched
        .chain(mismatched)
        .map(|(kind, m)| CheckRow {
            channel: channel.to_string(),
            kind: kind.into(),
            side: Some(m.side),
            k: Some(m.k),
            lambda: Some(m.value),
            eigenvalue: m.eigenvalue,
            error: Some(m.error),
        })
        .collect();
    rows.extend(report.missed.iter().map(|m| CheckRow {
        channel: channel.to_string(),
        kind: "missed".into(),
        side: Some(m.side),
        k: None,
        lambda: None,
        eigenvalue: Some(m.value),
        error: None,
    }));
    rows.extend(report.not_characterized.iter().map(|&e| CheckRow {
        channel: channel.to_string(),
        kind: "not_characterized".into(),
        side: None,
        k: None,
        lambda: None,
        eigenvalue: Some(e),
        error: None,
    }));
    rows
}

#[derive(Serialize)]
struct CheckEntry {
    channel: String,
    consistent: bool,
    report: SpectrumReport,
}

fn run_check(config: &RunConfig, format: Format) -> Result<String> {
    let tol = config.check_tol();
    let mut per_channel = Vec::new();
    let mut spectra = Vec::new();
    let mut entries = Vec::new();
    for ch in channels(config)? {
        let op = build(config, &ch)?;
        let (profile, levels) = solve_channel(config, &op)?;
        let eigs = spectrum(config, &ch, &op)?;
        drop(op);
        let report = spectrum_check_against(&eigs, &profile, &levels, tol);
        entries.push(CheckEntry { channel: ch.label.clone(), consistent: report.is_consistent(), report });
        spectra.push((eigs, ch.multiplicity));
        per_channel.push(ChannelLevels { label: ch.label, multiplicity: ch.multiplicity, profile, levels });
    }
    if per_channel.len() > 1 || per_channel.iter().any(|c| c.multiplicity > 1) {
        let all = merged_spectrum(&spectra);
        let merged: Vec<_> = config.sides.iter().map(|&s| merge_channels(&per_channel, s)).collect();
        let mut profile = merged[0].profile.clone();
        profile.k0_plus = merged.iter().find_map(|m| m.profile.k0_plus);
        profile.k0_minus = merged.iter().find_map(|m| m.profile.k0_minus);
        let levels: Vec<LevelResult> =
            merged.iter().flat_map(|m| m.levels.iter().map(|l| l.level.clone())).collect();
        let report = spectrum_check_against(&all, &profile, &levels, tol);
        entries.push(CheckEntry { channel: "merged".into(), consistent: report.is_consistent(), report });
    }
    match format {
        Format::Csv => {
            let mut comments = vec!["# gapspec check".to_string()];
            comments.extend(entries.iter().map(|e| {
                format!(
                    "# check {} consistent={} tol={} matched={} mismatched={} missed={} not_characterized={}",
                    e.channel,
                    fmt_bool(e.consistent),
                    fmt_f64(tol),
                    e.report.matched.len(),
                    e.report.mismatched.len(),
                    e.report.missed.len(),
                    e.report.not_characterized.len()
                )
            }));
            let rows: Vec<CheckRow> = entries.iter().flat_map(|e| check_rows(&e.channel, &e.report)).collect();
            Ok(check_csv(&comments, &rows))
        }
        Format::Json => to_json(&serde_json::json!({ "command": "check", "reports": entries })),
    }
}

/// Execute `command` and render its table.
pub fn run(command: Command, config: &RunConfig, format: Format) -> Result<String> {
    if let Some(c) = config.command {
        if c != command {
            return Err(GapError::Config(format!(
                "config is for '{}', not '{}'",
                c.as_str(),
                command.as_str()
            )));
        }
    }
    config.validate()?;
    match command {
        Command::Solve => run_solve(config, format),
        Command::Sweep => run_sweep(config, format),
        Command::Check => run_check(config, format),
    }
}
