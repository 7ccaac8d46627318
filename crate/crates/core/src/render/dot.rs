use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::intensity::{format_signed_micro, Coefficient, Intensity};
use crate::model::{apply_moves, compare, Effect, EoCoS, Side, UnitId};
use crate::montage::EoSReport;
use crate::relations::{build_action_points, ActionKind, ActionPoint};
use crate::structure::Structure;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum RankDir {
    #[default]
    LR,
    TB,
}

impl fmt::Display for RankDir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankDir::LR => "LR",
            RankDir::TB => "TB",
        })
    }
}

impl FromStr for RankDir {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "LR" | "lr" => Ok(RankDir::LR),
            "TB" | "tb" => Ok(RankDir::TB),
            other => Err(format!("unknown rankdir `{other}` (expected LR or TB)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RenderOptions {
    /// Append `Δ=±x.xxxxxx` to edges when a report is given.
    pub show_deltas: bool,
    /// Draw plates in their post-montage state (final intensity, applied
    /// moves) when a report is given.
    pub after_montage: bool,
    pub rankdir: RankDir,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            show_deltas: true,
            after_montage: false,
            rankdir: RankDir::LR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("report does not belong to this structure: {0}")]
    ReportMismatch(String),
}

fn check_report(s: &Structure, report: &EoSReport) -> Result<(), RenderError> {
    let known = |id: &UnitId| s.unit(id).is_some();
    if let Some(id) = report.units.keys().find(|id| !known(id)) {
        return Err(RenderError::ReportMismatch(format!("unknown unit `{id}`")));
    }
    if let Some(id) = s.units().keys().find(|id| !report.units.contains_key(*id)) {
        return Err(RenderError::ReportMismatch(format!(
            "unit `{id}` missing from report"
        )));
    }
    for d in &report.deltas {
        for id in [&d.target, &d.source.a, &d.source.b] {
            if !known(id) {
                return Err(RenderError::ReportMismatch(format!(
                    "delta references unknown unit `{id}`"
                )));
            }
        }
    }
    Ok(())
}

/// Escapes text for a record label inside a quoted DOT string.
fn escape_record(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '{' | '}' | '|' | '<' | '>' | '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

fn escape_string(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

fn plate_label(unit: &EoCoS, effect: &Effect, intensity: Intensity) -> String {
    let compartment = |side: Side| {
        let items: Vec<String> = unit
            .actual()
            .on(side)
            .map(|item| {
                let mut label = if item == unit.pleasant() {
                    "*pleasant*".to_owned()
                } else {
                    item.to_string()
                };
                if unit.ideal().side(item.as_str()) != Some(side) {
                    label.push('!');
                }
                label
            })
            .collect();
        escape_record(&format!("{}: {}", side.keyword(), items.join(", ")))
    };
    format!(
        "{{{}|{{{}|{}}}}}",
        escape_record(&format!("{} [{effect}, I={intensity}]", unit.id())),
        compartment(Side::Near),
        compartment(Side::Far),
    )
}

fn edge_attrs(point: &ActionPoint) -> (&'static str, bool, String) {
    match &point.kind {
        ActionKind::Resemblance => ("dashed", false, "resemble".into()),
        ActionKind::Contiguity { via } => ("dotted", false, format!("via {via}")),
        ActionKind::Causation { class } => ("solid", true, class.keyword().into()),
        ActionKind::Opposition => ("bold", false, "opp".into()),
    }
}

/// Net amount a point delivered to its `b` endpoint over the whole run. For
/// symmetric modes this equals what `a` received.
fn delta_to_b(report: &EoSReport, point: &ActionPoint) -> i64 {
    report
        .deltas
        .iter()
        .filter(|d| {
            d.target == point.b
                && d.source.a == point.a
                && d.source.b == point.b
                && d.source.kind == point.kind
        })
        .map(|d| d.amount)
        .sum()
}

/// Renders the structure as a DOT digraph: one record plate per unit with
/// near and far compartments of the actual placement (items out of their
/// ideal side marked `!`), one line per relation and per opposition.
pub fn emit_dot(
    s: &Structure,
    report: Option<&EoSReport>,
    opts: &RenderOptions,
) -> Result<String, RenderError> {
    if let Some(report) = report {
        check_report(s, report)?;
    }
    let mut out = String::new();
    out.push_str("digraph eos {\n");
    let _ = writeln!(out, "  rankdir={};", opts.rankdir);
    out.push_str("  node [shape=record];\n");

    for (id, unit) in s.units() {
        let label = match report.filter(|_| opts.after_montage) {
            Some(report) => {
                let rec = &report.units[id];
                let after = apply_moves(unit, &rec.applied_moves).map_err(|e| {
                    RenderError::ReportMismatch(format!("moves for `{id}` do not apply: {e}"))
                })?;
                plate_label(&after, &rec.effect_after, rec.intensity_final)
            }
            None => plate_label(unit, &compare(unit), unit.intensity()),
        };
        let _ = writeln!(out, "  \"{id}\" [label=\"{label}\"];");
    }

    // sigma only affects modes, which edges do not show
    let points = build_action_points(s, Coefficient::ZERO);
    for point in &points {
        let (style, directed, mut label) = edge_attrs(point);
        if let Some(report) = report.filter(|_| opts.show_deltas) {
            label.push_str(&format!(
                " Δ={}",
                format_signed_micro(delta_to_b(report, point))
            ));
        }
        let dir = if directed { "" } else { ", dir=none" };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [style={style}{dir}, label=\"{}\"];",
            point.a,
            point.b,
            escape_string(&label)
        );
    }
    out.push_str("}\n");
    Ok(out)
}
